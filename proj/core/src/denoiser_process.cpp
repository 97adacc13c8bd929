#include "egoview/denoiser_process.hpp"

#include <bit>
#include <cerrno>
#include <csignal>
#include <cstring>
#include <sstream>

#include <fcntl.h>
#include <sys/types.h>
#include <sys/wait.h>
#include <unistd.h>

namespace egoview {
namespace {

static_assert(std::endian::native == std::endian::little, "frame codec assumes a little-endian host");

void put_u32(std::ostream& out, std::uint32_t value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof value);
}

bool get_u32(std::istream& in, std::uint32_t& value) {
  in.read(reinterpret_cast<char*>(&value), sizeof value);
  return in.gcount() == sizeof value;
}

std::uint32_t require_u32(std::istream& in, const char* what) {
  std::uint32_t value = 0;
  if (!get_u32(in, value)) fail(ErrorCode::ProcessError, std::string("truncated frame: ") + what);
  return value;
}

}  // namespace

void write_tensor_frame(std::ostream& out, const LatentGrid& tensor) {
  put_u32(out, static_cast<std::uint32_t>(tensor.height()));
  put_u32(out, static_cast<std::uint32_t>(tensor.width()));
  put_u32(out, static_cast<std::uint32_t>(tensor.channels()));
  std::vector<float> buffer(tensor.size());
  auto values = tensor.values();
  for (std::size_t i = 0; i < buffer.size(); ++i) buffer[i] = static_cast<float>(values[i]);
  out.write(reinterpret_cast<const char*>(buffer.data()),
            static_cast<std::streamsize>(buffer.size() * sizeof(float)));
}

LatentGrid read_tensor_frame(std::istream& in) {
  const std::uint32_t h = require_u32(in, "height");
  const std::uint32_t w = require_u32(in, "width");
  const std::uint32_t c = require_u32(in, "channels");
  constexpr std::uint32_t kMaxExtent = 1u << 16;
  constexpr std::uint64_t kMaxElements = 1ull << 28;
  if (h == 0 || w == 0 || c == 0 || h > kMaxExtent || w > kMaxExtent || c > kMaxExtent ||
      std::uint64_t(h) * w * c > kMaxElements) {
    fail(ErrorCode::ProcessError, "tensor frame has an invalid shape");
  }
  LatentGrid tensor(static_cast<int>(h), static_cast<int>(w), static_cast<int>(c));
  std::vector<float> buffer(tensor.size());
  const auto bytes = static_cast<std::streamsize>(buffer.size() * sizeof(float));
  in.read(reinterpret_cast<char*>(buffer.data()), bytes);
  if (in.gcount() != bytes) fail(ErrorCode::ProcessError, "truncated frame: values");
  auto values = tensor.values();
  for (std::size_t i = 0; i < buffer.size(); ++i) values[i] = buffer[i];
  return tensor;
}

void write_denoise_request(std::ostream& out, const LatentGrid& assembled, int t,
                           const std::optional<TextEmbedding>& text) {
  require(t >= 0, "write_denoise_request: negative timestep");
  put_u32(out, static_cast<std::uint32_t>(t));
  put_u32(out, text ? 1u : 0u);
  write_tensor_frame(out, assembled);
  if (text) {
    require(!text->empty(), "write_denoise_request: empty text embedding");
    LatentGrid embedding(1, 1, static_cast<int>(text->size()));
    std::copy(text->begin(), text->end(), embedding.values().begin());
    write_tensor_frame(out, embedding);
  }
}

bool read_denoise_request(std::istream& in, DenoiseRequest& request) {
  std::uint32_t t = 0;
  if (!get_u32(in, t)) {
    if (in.gcount() == 0) return false;
    fail(ErrorCode::ProcessError, "truncated frame: timestep");
  }
  const std::uint32_t has_text = require_u32(in, "has_text");
  request.timestep = static_cast<int>(t);
  request.assembled = read_tensor_frame(in);
  request.text.reset();
  if (has_text) {
    const LatentGrid embedding = read_tensor_frame(in);
    request.text = TextEmbedding(embedding.values().begin(), embedding.values().end());
  }
  return true;
}

ProcessDenoiser::ProcessDenoiser(std::vector<std::string> argv) {
  require(!argv.empty(), "ProcessDenoiser: empty command line");
  int in_pipe[2];
  int out_pipe[2];
  if (pipe2(in_pipe, O_CLOEXEC) != 0) fail(ErrorCode::ProcessError, "pipe: " + std::string(std::strerror(errno)));
  if (pipe2(out_pipe, O_CLOEXEC) != 0) {
    ::close(in_pipe[0]);
    ::close(in_pipe[1]);
    fail(ErrorCode::ProcessError, "pipe: " + std::string(std::strerror(errno)));
  }

  std::vector<char*> args;
  for (auto& arg : argv) args.push_back(arg.data());
  args.push_back(nullptr);

  pid_ = fork();
  if (pid_ < 0) fail(ErrorCode::ProcessError, "fork: " + std::string(std::strerror(errno)));
  if (pid_ == 0) {
    dup2(in_pipe[0], STDIN_FILENO);
    dup2(out_pipe[1], STDOUT_FILENO);
    ::close(in_pipe[0]);
    ::close(in_pipe[1]);
    ::close(out_pipe[0]);
    ::close(out_pipe[1]);
    execvp(args[0], args.data());
    _exit(127);
  }
  ::close(in_pipe[0]);
  ::close(out_pipe[1]);
  to_child_ = in_pipe[1];
  from_child_ = out_pipe[0];
  std::signal(SIGPIPE, SIG_IGN);
}

ProcessDenoiser::~ProcessDenoiser() { close(); }

int ProcessDenoiser::close() {
  if (pid_ < 0) return 0;
  if (to_child_ >= 0) ::close(to_child_);
  if (from_child_ >= 0) ::close(from_child_);
  to_child_ = from_child_ = -1;
  int status = 0;
  waitpid(pid_, &status, 0);
  pid_ = -1;
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

void ProcessDenoiser::write_all(const std::string& bytes) {
  std::size_t written = 0;
  while (written < bytes.size()) {
    const ssize_t n = ::write(to_child_, bytes.data() + written, bytes.size() - written);
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) fail(ErrorCode::ProcessError, "denoiser process closed its input");
    written += static_cast<std::size_t>(n);
  }
}

void ProcessDenoiser::read_exact(char* data, std::size_t size) {
  std::size_t got = 0;
  while (got < size) {
    const ssize_t n = ::read(from_child_, data + got, size - got);
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) fail(ErrorCode::ProcessError, "denoiser process closed its output");
    got += static_cast<std::size_t>(n);
  }
}

LatentGrid ProcessDenoiser::operator()(const LatentGrid& assembled, int t,
                                       const std::optional<TextEmbedding>& text) {
  if (pid_ < 0) fail(ErrorCode::ProcessError, "denoiser process is not running");
  std::ostringstream request;
  write_denoise_request(request, assembled, t, text);
  write_all(request.str());

  std::uint32_t header[3];
  read_exact(reinterpret_cast<char*>(header), sizeof header);
  const std::size_t count = std::size_t{header[0]} * header[1] * header[2];
  if (count == 0 || count > (std::size_t{1} << 28)) {
    fail(ErrorCode::ProcessError, "denoiser response has an invalid shape");
  }
  std::string frame(sizeof header + count * sizeof(float), '\0');
  std::memcpy(frame.data(), header, sizeof header);
  read_exact(frame.data() + sizeof header, count * sizeof(float));
  std::istringstream in(frame);
  return read_tensor_frame(in);
}

Denoiser as_denoiser(std::shared_ptr<ProcessDenoiser> process) {
  require(process != nullptr, "as_denoiser: null process");
  return [process = std::move(process)](const LatentGrid& assembled, int t,
                                        const std::optional<TextEmbedding>& text) {
    return (*process)(assembled, t, text);
  };
}

}  // namespace egoview
