#include "egoview/diffusion.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

namespace egoview {

LatentGrid::LatentGrid(int height, int width, int channels, double fill)
    : height_(height), width_(width), channels_(channels) {
  require(height >= 1 && width >= 1 && channels >= 1, "latent dimensions must be positive");
  values_.assign(static_cast<std::size_t>(height) * width * channels, fill);
}

bool LatentGrid::all_finite() const {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

LatentGrid slice_channels(const LatentGrid& grid, int begin, int count) {
  require(begin >= 0 && count >= 1 && begin + count <= grid.channels(),
          "slice_channels: channel range out of bounds");
  LatentGrid out(grid.height(), grid.width(), count);
  for (int y = 0; y < grid.height(); ++y)
    for (int x = 0; x < grid.width(); ++x)
      for (int c = 0; c < count; ++c) out.at(y, x, c) = grid.at(y, x, begin + c);
  return out;
}

void NoiseSchedule::validate() const {
  if (alpha_bar.size() < 2) throw ValidationError("alpha_bar", "need at least one timestep");
  if (alpha_bar[0] != 1.0) throw ValidationError("alpha_bar", "alpha_bar[0] must be 1");
  for (std::size_t t = 1; t < alpha_bar.size(); ++t) {
    if (!(alpha_bar[t] > 0.0 && alpha_bar[t] <= 1.0)) {
      throw ValidationError("alpha_bar", "entry " + std::to_string(t) + " outside (0, 1]");
    }
    if (!(alpha_bar[t] < alpha_bar[t - 1])) {
      throw ValidationError("alpha_bar", "not strictly decreasing at " + std::to_string(t));
    }
  }
}

NoiseSchedule linear_beta_schedule(int timesteps, double beta_start, double beta_end) {
  require(timesteps >= 1, "linear_beta_schedule: timesteps must be positive");
  require(beta_start > 0.0 && beta_start <= beta_end && beta_end < 1.0,
          "linear_beta_schedule: need 0 < beta_start <= beta_end < 1");
  NoiseSchedule schedule;
  schedule.alpha_bar.resize(static_cast<std::size_t>(timesteps) + 1);
  schedule.alpha_bar[0] = 1.0;
  double product = 1.0;
  for (int i = 1; i <= timesteps; ++i) {
    const double fraction = timesteps == 1 ? 0.0 : double(i - 1) / double(timesteps - 1);
    const double beta = beta_start + fraction * (beta_end - beta_start);
    product *= 1.0 - beta;
    schedule.alpha_bar[static_cast<std::size_t>(i)] = product;
  }
  schedule.validate();
  return schedule;
}

NoiseSchedule respace_schedule(const NoiseSchedule& schedule, int steps) {
  const int total = schedule.steps();
  require(steps >= 1 && steps <= total, "respace_schedule: steps must lie in [1, T]");
  NoiseSchedule out;
  out.alpha_bar.resize(static_cast<std::size_t>(steps) + 1);
  for (int i = 0; i <= steps; ++i) {
    const auto t = static_cast<int>(std::lround(double(i) * total / steps));
    out.alpha_bar[static_cast<std::size_t>(i)] = schedule.at(t);
  }
  out.validate();
  return out;
}

namespace {

void check_timestep(int t, const NoiseSchedule& schedule) {
  require(t >= 1 && t <= schedule.steps(),
          "timestep " + std::to_string(t) + " outside [1, " + std::to_string(schedule.steps()) + "]");
}

}  // namespace

LatentGrid forward_noise(const LatentGrid& z0, int t, const LatentGrid& eps,
                         const NoiseSchedule& schedule) {
  require(z0.same_shape(eps), "forward_noise: z0 and eps differ in shape");
  check_timestep(t, schedule);
  const double alpha_bar = schedule.at(t);
  const double signal = std::sqrt(alpha_bar);
  const double noise = std::sqrt(1.0 - alpha_bar);
  LatentGrid out = z0;
  auto dst = out.values();
  auto e = eps.values();
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = signal * dst[i] + noise * e[i];
  return out;
}

LatentGrid predict_x0(const LatentGrid& z_t, const LatentGrid& eps_hat, int t,
                      const NoiseSchedule& schedule) {
  require(z_t.same_shape(eps_hat), "predict_x0: z_t and eps_hat differ in shape");
  check_timestep(t, schedule);
  const double alpha_bar = schedule.at(t);
  require(alpha_bar > 0.0, "predict_x0: alpha_bar must be positive");
  const double signal = std::sqrt(alpha_bar);
  const double noise = std::sqrt(1.0 - alpha_bar);
  LatentGrid out = z_t;
  auto dst = out.values();
  auto e = eps_hat.values();
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = (dst[i] - noise * e[i]) / signal;
  return out;
}

LatentGrid cfg_combine(const LatentGrid& eps_cond, const LatentGrid& eps_uncond, double w) {
  require(eps_cond.same_shape(eps_uncond), "cfg_combine: predictions differ in shape");
  LatentGrid out = eps_cond;
  auto dst = out.values();
  auto u = eps_uncond.values();
  // cond + w (cond - uncond): exact when w = 0 or cond == uncond.
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += w * (dst[i] - u[i]);
  return out;
}

LatentGrid channel_reduce(const LatentGrid& pose_latent4, ChannelReducer reducer) {
  require(pose_latent4.channels() == 4, "channel_reduce: expected 4 channels, got " +
                                            std::to_string(pose_latent4.channels()));
  LatentGrid out(pose_latent4.height(), pose_latent4.width(), 1);
  for (int y = 0; y < out.height(); ++y) {
    for (int x = 0; x < out.width(); ++x) {
      if (reducer == ChannelReducer::FirstChannel) {
        out.at(y, x, 0) = pose_latent4.at(y, x, 0);
      } else {
        out.at(y, x, 0) = (pose_latent4.at(y, x, 0) + pose_latent4.at(y, x, 1) +
                           pose_latent4.at(y, x, 2) + pose_latent4.at(y, x, 3)) / 4.0;
      }
    }
  }
  return out;
}

void ConditioningBundle::validate(int sparse_channels, int pose_channels) const {
  if (sparse_latent.channels() != sparse_channels) {
    throw ValidationError("sparse_latent", "expected " + std::to_string(sparse_channels) + " channels");
  }
  if (pose_latent.channels() != pose_channels) {
    throw ValidationError("pose_latent", "expected " + std::to_string(pose_channels) + " channels");
  }
  if (!sparse_latent.same_spatial(pose_latent)) {
    throw ValidationError("pose_latent", "spatial size differs from sparse_latent");
  }
  if (text_embedding) {
    if (text_embedding->empty()) throw ValidationError("text_embedding", "must not be empty");
    for (double v : *text_embedding) {
      if (!std::isfinite(v)) throw ValidationError("text_embedding", "entries must be finite");
    }
  }
}

LatentGrid assemble_latent(const ConditioningBundle& bundle, const LatentGrid& noisy) {
  const LatentGrid& sparse = bundle.sparse_latent;
  const LatentGrid& pose = bundle.pose_latent;
  require(sparse.same_spatial(pose) && sparse.same_spatial(noisy),
          "assemble_latent: spatial dimensions differ");
  const int cs = sparse.channels();
  const int cp = pose.channels();
  const int cn = noisy.channels();
  LatentGrid out(noisy.height(), noisy.width(), cs + cp + cn);
  for (int y = 0; y < out.height(); ++y) {
    for (int x = 0; x < out.width(); ++x) {
      for (int c = 0; c < cs; ++c) out.at(y, x, c) = sparse.at(y, x, c);
      for (int c = 0; c < cp; ++c) out.at(y, x, cs + c) = pose.at(y, x, c);
      for (int c = 0; c < cn; ++c) out.at(y, x, cs + cp + c) = noisy.at(y, x, c);
    }
  }
  return out;
}

Denoiser zero_denoiser(int noise_channels) {
  require(noise_channels >= 1, "zero_denoiser: noise_channels must be positive");
  return [noise_channels](const LatentGrid& assembled, int, const std::optional<TextEmbedding>&) {
    return LatentGrid(assembled.height(), assembled.width(), noise_channels);
  };
}

Denoiser oracle_denoiser(LatentGrid z0, NoiseSchedule schedule) {
  schedule.validate();
  return [z0 = std::move(z0), schedule = std::move(schedule)](
             const LatentGrid& assembled, int t, const std::optional<TextEmbedding>&) {
    const int channels = z0.channels();
    require(assembled.same_spatial(z0) && assembled.channels() >= channels,
            "oracle_denoiser: assembled latent does not contain the clean-latent shape");
    const LatentGrid z_t = slice_channels(assembled, assembled.channels() - channels, channels);
    const double alpha_bar = schedule.at(t);
    const double signal = std::sqrt(alpha_bar);
    const double noise = std::sqrt(1.0 - alpha_bar);
    LatentGrid eps(z_t.height(), z_t.width(), channels);
    auto dst = eps.values();
    auto zt = z_t.values();
    auto clean = z0.values();
    for (std::size_t i = 0; i < dst.size(); ++i) {
      dst[i] = noise > 0.0 ? (zt[i] - signal * clean[i]) / noise : 0.0;
    }
    return eps;
  };
}

namespace {

LatentGrid query(const Denoiser& denoiser, const LatentGrid& assembled, int t,
                 const std::optional<TextEmbedding>& text, const LatentGrid& expected_shape) {
  LatentGrid eps = denoiser(assembled, t, text);
  require(eps.same_shape(expected_shape),
          "denoiser output shape does not match the noisy latent");
  return eps;
}

}  // namespace

double denoiser_loss(const LatentGrid& z0, const ConditioningBundle& bundle, int t,
                     const LatentGrid& eps, const NoiseSchedule& schedule,
                     const Denoiser& denoiser) {
  const LatentGrid z_t = forward_noise(z0, t, eps, schedule);
  const LatentGrid assembled = assemble_latent(bundle, z_t);
  const LatentGrid predicted = query(denoiser, assembled, t, bundle.text_embedding, eps);
  double loss = 0.0;
  auto a = eps.values();
  auto b = predicted.values();
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    loss += d * d;
  }
  return loss;
}

LatentGrid gaussian_latent(int height, int width, int channels, std::uint64_t seed) {
  std::mt19937_64 engine(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  LatentGrid out(height, width, channels);
  for (double& v : out.values()) v = normal(engine);
  return out;
}

LatentGrid reverse_sample(const Denoiser& denoiser, const ConditioningBundle& bundle,
                          const NoiseSchedule& schedule, const SamplerOptions& options) {
  schedule.validate();
  require(options.eta >= 0.0 && options.eta <= 1.0, "reverse_sample: eta must lie in [0, 1]");
  require(std::isfinite(options.guidance), "reverse_sample: guidance weight must be finite");
  bundle.validate(bundle.sparse_latent.channels(), bundle.pose_latent.channels());

  std::mt19937_64 engine(options.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const int h = bundle.sparse_latent.height();
  const int w = bundle.sparse_latent.width();

  LatentGrid z(h, w, options.noise_channels);
  for (double& v : z.values()) v = normal(engine);

  const bool guided = bundle.text_embedding.has_value() && options.guidance != 0.0;
  LatentGrid x0 = z;
  for (int t = schedule.steps(); t >= 1; --t) {
    const LatentGrid assembled = assemble_latent(bundle, z);
    LatentGrid eps = query(denoiser, assembled, t, bundle.text_embedding, z);
    if (guided) {
      const LatentGrid uncond = query(denoiser, assembled, t, std::nullopt, z);
      eps = cfg_combine(eps, uncond, options.guidance);
    }
    x0 = predict_x0(z, eps, t, schedule);

    const double ab_t = schedule.at(t);
    const double ab_prev = schedule.at(t - 1);
    const double sigma = options.eta * std::sqrt((1.0 - ab_prev) / (1.0 - ab_t)) *
                         std::sqrt(1.0 - ab_t / ab_prev);
    const double direction = std::sqrt(std::max(0.0, 1.0 - ab_prev - sigma * sigma));
    const double signal = std::sqrt(ab_prev);

    auto zv = z.values();
    auto xv = x0.values();
    auto ev = eps.values();
    for (std::size_t i = 0; i < zv.size(); ++i) {
      double next = signal * xv[i] + direction * ev[i];
      if (sigma > 0.0) next += sigma * normal(engine);
      zv[i] = next;
    }
  }
  return x0;
}

IdentityCodec::IdentityCodec(int stride) : stride_(stride) {
  require(stride >= 1, "IdentityCodec: stride must be positive");
}

LatentGrid IdentityCodec::encode(const RgbImage& image) const {
  require(image.width() % stride_ == 0 && image.height() % stride_ == 0,
          "IdentityCodec: image size must be a multiple of the stride");
  const int h = image.height() / stride_;
  const int w = image.width() / stride_;
  const double area = double(stride_) * stride_;
  LatentGrid out(h, w, 4);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double sum[3] = {0.0, 0.0, 0.0};
      for (int dy = 0; dy < stride_; ++dy)
        for (int dx = 0; dx < stride_; ++dx)
          for (int c = 0; c < 3; ++c) sum[c] += image.at(x * stride_ + dx, y * stride_ + dy, c);
      for (int c = 0; c < 3; ++c) out.at(y, x, c) = sum[c] / area;
      out.at(y, x, 3) = (out.at(y, x, 0) + out.at(y, x, 1) + out.at(y, x, 2)) / 3.0;
    }
  }
  return out;
}

RgbImage IdentityCodec::decode(const LatentGrid& latent) const {
  require(latent.channels() >= 3, "IdentityCodec: latent needs at least 3 channels");
  RgbImage out(latent.width(), latent.height());
  for (int y = 0; y < latent.height(); ++y)
    for (int x = 0; x < latent.width(); ++x)
      for (int c = 0; c < 3; ++c) {
        const double v = latent.at(y, x, c);
        out.at(x, y, c) = std::isfinite(v) ? std::clamp(v, 0.0, 1.0) : 0.0;
      }
  return out;
}

}  // namespace egoview
