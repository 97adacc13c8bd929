#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "egoview/image.hpp"

namespace egoview {

/// h x w x c real grid, channel-last (HWC) storage.
class LatentGrid {
 public:
  LatentGrid() = default;
  LatentGrid(int height, int width, int channels, double fill = 0.0);

  int height() const noexcept { return height_; }
  int width() const noexcept { return width_; }
  int channels() const noexcept { return channels_; }
  std::size_t size() const noexcept { return values_.size(); }

  double& at(int y, int x, int c) { return values_[offset(y, x, c)]; }
  double at(int y, int x, int c) const { return values_[offset(y, x, c)]; }

  std::span<double> values() noexcept { return values_; }
  std::span<const double> values() const noexcept { return values_; }

  bool same_shape(const LatentGrid& other) const noexcept {
    return height_ == other.height_ && width_ == other.width_ && channels_ == other.channels_;
  }
  bool same_spatial(const LatentGrid& other) const noexcept {
    return height_ == other.height_ && width_ == other.width_;
  }
  bool all_finite() const;

  bool operator==(const LatentGrid&) const = default;

 private:
  std::size_t offset(int y, int x, int c) const noexcept {
    return (static_cast<std::size_t>(y) * width_ + x) * channels_ + c;
  }

  int height_ = 0;
  int width_ = 0;
  int channels_ = 0;
  std::vector<double> values_;
};

/// Channels [begin, begin + count) of `grid`.
LatentGrid slice_channels(const LatentGrid& grid, int begin, int count);

/// Cumulative signal retention alpha_bar[0..T]; alpha_bar[0] = 1.
struct NoiseSchedule {
  std::vector<double> alpha_bar;

  int steps() const noexcept { return static_cast<int>(alpha_bar.size()) - 1; }
  double at(int t) const { return alpha_bar.at(static_cast<std::size_t>(t)); }

  /// Throws ValidationError unless alpha_bar[0] = 1, the table is strictly
  /// decreasing and every later entry is in (0, 1].
  void validate() const;
};

inline constexpr int kDefaultTimesteps = 1000;
inline constexpr double kDefaultBetaStart = 1e-4;
inline constexpr double kDefaultBetaEnd = 0.02;

/// alpha_bar_t = prod_{i<=t} (1 - beta_i), beta linearly spaced over [start, end].
NoiseSchedule linear_beta_schedule(int timesteps = kDefaultTimesteps,
                                   double beta_start = kDefaultBetaStart,
                                   double beta_end = kDefaultBetaEnd);

/// Sub-schedule over `steps` evenly spaced timesteps of `schedule`
/// (entry i takes alpha_bar at round(i * T / steps)).
NoiseSchedule respace_schedule(const NoiseSchedule& schedule, int steps);

/// sqrt(alpha_bar_t) * z0 + sqrt(1 - alpha_bar_t) * eps.
LatentGrid forward_noise(const LatentGrid& z0, int t, const LatentGrid& eps,
                         const NoiseSchedule& schedule);

/// (z_t - sqrt(1 - alpha_bar_t) * eps_hat) / sqrt(alpha_bar_t).
LatentGrid predict_x0(const LatentGrid& z_t, const LatentGrid& eps_hat, int t,
                      const NoiseSchedule& schedule);

/// (1 + w) * eps_cond - w * eps_uncond.
LatentGrid cfg_combine(const LatentGrid& eps_cond, const LatentGrid& eps_uncond, double w);

enum class ChannelReducer { Mean, FirstChannel };

/// Fixed-function 4 -> 1 channel reduction of the pose latent.
LatentGrid channel_reduce(const LatentGrid& pose_latent4, ChannelReducer reducer = ChannelReducer::Mean);

using TextEmbedding = std::vector<double>;

struct ConditioningBundle {
  LatentGrid sparse_latent;  ///< 4 channels by default
  LatentGrid pose_latent;    ///< 1 channel
  std::optional<TextEmbedding> text_embedding;
  std::optional<std::string> text_raw;

  void validate(int sparse_channels = 4, int pose_channels = 1) const;
};

/// Channel concatenation [sparse | pose | noisy]; 4 + 1 + 4 = 9 by default.
LatentGrid assemble_latent(const ConditioningBundle& bundle, const LatentGrid& noisy);

/// Noise prediction eps_hat(z'_t, t, text). An absent text embedding is the
/// unconditional branch. The output has the noisy-latent channel count.
using Denoiser = std::function<LatentGrid(const LatentGrid& assembled, int t,
                                          const std::optional<TextEmbedding>& text)>;

/// Always predicts zero noise.
Denoiser zero_denoiser(int noise_channels);

/// Predicts the noise that makes predict_x0 return exactly `z0` at every
/// step, by reading the noisy channels back out of the assembled latent.
Denoiser oracle_denoiser(LatentGrid z0, NoiseSchedule schedule);

/// Squared L2 norm of eps - denoiser(assemble(bundle, forward_noise(z0, t, eps)), t, text).
double denoiser_loss(const LatentGrid& z0, const ConditioningBundle& bundle, int t,
                     const LatentGrid& eps, const NoiseSchedule& schedule,
                     const Denoiser& denoiser);

struct SamplerOptions {
  double guidance = 0.0;  ///< CFG weight w
  double eta = 0.0;       ///< 0 deterministic, 1 ancestral
  std::uint64_t seed = 0;
  int noise_channels = 4;
};

/// Reverse process from a seeded standard-normal z_T. At each t the
/// denoiser is queried on the assembled latent (twice, conditional and
/// unconditional, when text is present and w != 0), the clean latent is
/// predicted, and the eta-generalized step moves to t - 1. Returns the
/// final clean-latent prediction. Owns its random stream.
LatentGrid reverse_sample(const Denoiser& denoiser, const ConditioningBundle& bundle,
                          const NoiseSchedule& schedule, const SamplerOptions& options);

/// Standard-normal grid from a private generator seeded with `seed`.
LatentGrid gaussian_latent(int height, int width, int channels, std::uint64_t seed);

/// Image <-> latent mapping.
class LatentCodec {
 public:
  virtual ~LatentCodec() = default;
  virtual LatentGrid encode(const RgbImage& image) const = 0;
  virtual RgbImage decode(const LatentGrid& latent) const = 0;
};

/// Neural-free stand-in: area-average over stride x stride blocks, channels
/// (r, g, b, mean(r, g, b)). Decoding keeps the latent resolution and clamps
/// to [0, 1]. Lossless at stride 1.
class IdentityCodec final : public LatentCodec {
 public:
  explicit IdentityCodec(int stride = 1);

  int stride() const noexcept { return stride_; }
  LatentGrid encode(const RgbImage& image) const override;
  RgbImage decode(const LatentGrid& latent) const override;

 private:
  int stride_;
};

}  // namespace egoview
