#pragma once

#include <cstdint>
#include <istream>
#include <memory>
#include <ostream>
#include <string>
#include <vector>

#include "egoview/diffusion.hpp"

namespace egoview {

// Tensor frame: three little-endian u32 (height, width, channels) followed by
// height*width*channels little-endian f32 values in HWC order.
//
// Request to an external denoiser:
//   u32 timestep, u32 has_text (0/1), tensor frame z'_t,
//   [tensor frame 1 x 1 x L text embedding when has_text = 1]
// Response: one tensor frame with the predicted noise.

void write_tensor_frame(std::ostream& out, const LatentGrid& tensor);
LatentGrid read_tensor_frame(std::istream& in);

void write_denoise_request(std::ostream& out, const LatentGrid& assembled, int t,
                           const std::optional<TextEmbedding>& text);

struct DenoiseRequest {
  int timestep = 0;
  LatentGrid assembled;
  std::optional<TextEmbedding> text;
};

/// Returns false on clean end-of-stream before the first byte.
bool read_denoise_request(std::istream& in, DenoiseRequest& request);

/// Runs an external executable as a long-lived child and exchanges frames
/// over its stdin/stdout. Queries are serialized.
class ProcessDenoiser {
 public:
  explicit ProcessDenoiser(std::vector<std::string> argv);
  ~ProcessDenoiser();

  ProcessDenoiser(const ProcessDenoiser&) = delete;
  ProcessDenoiser& operator=(const ProcessDenoiser&) = delete;

  LatentGrid operator()(const LatentGrid& assembled, int t,
                        const std::optional<TextEmbedding>& text);

  /// Closes the child's stdin and reaps it. Returns the exit status.
  int close();

 private:
  void write_all(const std::string& bytes);
  void read_exact(char* data, std::size_t size);

  int pid_ = -1;
  int to_child_ = -1;
  int from_child_ = -1;
};

/// Adapts a shared ProcessDenoiser to the Denoiser callable.
Denoiser as_denoiser(std::shared_ptr<ProcessDenoiser> process);

}  // namespace egoview
