#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "wavefield/diff/tensor.hpp"
#include "wavefield/fields/height_field.hpp"
#include "wavefield/fields/image_field.hpp"
#include "wavefield/grid.hpp"
#include "wavefield/raster.hpp"

namespace wf::training {

enum class LossMode { l1, ndir3 };

std::string to_string(LossMode mode);
std::optional<LossMode> parse_loss_mode(const std::string& name);

struct TrainConfig {
  std::uint64_t seed = 0;
  std::size_t frames = 10;
  std::size_t iters_stage1 = 500;
  std::size_t iters_stage2 = 2000;
  double lr_stage1 = 1e-4;
  double lr_stage2 = 1e-4;
  LossMode loss_mode = LossMode::l1;
  double n_refraction = 1.33;
  double omega0 = 30.0;
  std::size_t height_hidden = 256;
  std::size_t image_hidden = 256;
  std::size_t fourier_m = 128;
  double fourier_bandwidth = 8.0;
  double height_offset = 1.0;
  double height_scale = 0.1;
  bool fourier = true;
};

void validate(const TrainConfig& config);
fields::HeightFieldOptions height_options(const TrainConfig& config);
fields::ImageFieldOptions image_options(const TrainConfig& config);

/// Observed frames (RGB in [0,1]) on a shared pixel grid, prepared for the
/// losses: timestamps and all frames stacked frame-major as [T*W*H, 3].
class Observations {
 public:
  explicit Observations(std::vector<Raster> frames);

  const Grid& grid() const { return grid_; }
  const std::vector<double>& times() const { return times_; }
  std::size_t frame_count() const { return frames_.size(); }
  const std::vector<Raster>& frames() const { return frames_; }
  const diff::Tensor& stacked() const { return stacked_; }

 private:
  std::vector<Raster> frames_;
  Grid grid_;
  std::vector<double> times_;
  diff::Tensor stacked_;
};

/// mean |d| over all frames + mean over t of mean |I(x_reg) - I_t|.
diff::Tensor init_loss(const fields::HeightField& height, const fields::ImageField& image,
                       const Observations& obs, const RefractionConstants& constants);

/// mean over t of mean |I(x_reg + d_t) - I_t|.
diff::Tensor main_loss(const fields::HeightField& height, const fields::ImageField& image,
                       const Observations& obs, const RefractionConstants& constants);

/// Three-term variant: |R_t - I_t| + |W_t - I_t| + |R_t - W_t|, each mean
/// reduced, where R_t renders the field at x_reg + d_t and W_t bilinearly
/// warps the clean render by d_t.
diff::Tensor ndir_loss(const fields::HeightField& height, const fields::ImageField& image,
                       const Observations& obs, const RefractionConstants& constants);

struct LogEntry {
  int stage = 1;
  std::size_t iteration = 0;
  double loss = 0.0;
  double elapsed_seconds = 0.0;
};

struct TrainLog {
  std::vector<LogEntry> entries;

  /// "iteration stage loss" per line; wall-clock is left out so the text is
  /// reproducible.
  std::string to_text() const;
  std::vector<double> losses(int stage) const;
};

struct FieldPair {
  fields::HeightField height;
  fields::ImageField image;
};

struct TrainResult {
  FieldPair fields;
  std::optional<FieldPair> after_stage1;
  TrainLog log;
};

using ProgressFn = std::function<void(const LogEntry&)>;

/// Two-stage fit: stage 1 minimizes init_loss, stage 2 the configured
/// reconstruction loss. Deterministic given config.seed.
TrainResult train(const std::vector<Raster>& frames, const TrainConfig& config, const ProgressFn& progress = {});

}  // namespace wf::training
