#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "wavefield/metrics.hpp"
#include "wavefield/training.hpp"
#include "wavefield/wavesim.hpp"

// The three commands as library calls; the CLI is a thin flag parser on top.
//
// Dataset directory (simulate):
//   gt.ppm, frame_000.ppm ..., d_gt_000.f32r ... (2 channels), h_gt_000.f32r ...
//   (1 channel), manifest.txt
// Results directory (restore):
//   restored.ppm, recon_000.ppm ..., d_pred_000.f32r ..., h_pred_000.f32r ...,
//   loss.log, config.txt, weights/
namespace wf::app {

struct SimulateOptions {
  std::filesystem::path image;
  std::filesystem::path out;
  wavesim::WaveParams wave;
  std::size_t frames = 10;
  double n_refraction = 1.33;
};

struct SimulateResult {
  std::vector<std::string> warnings;
  double max_distortion = 0.0;
};

SimulateResult run_simulate(const SimulateOptions& options);

/// Text of manifest.txt for a simulated sequence; no timestamps, so it is
/// reproducible byte for byte.
std::string format_manifest(const SimulateOptions& options, const wavesim::SimulatedSequence& sequence);

/// frame_*.ppm in name order.
std::vector<Raster> read_frames(const std::filesystem::path& dir);

struct RestoreOptions {
  std::filesystem::path frames;
  std::filesystem::path out;
  training::TrainConfig config;
  training::ProgressFn progress;
};

/// Trains on the first config.frames frames of the directory and writes the
/// results directory. Returns the training log.
training::TrainLog run_restore(const RestoreOptions& options);

struct EvaluateOptions {
  std::filesystem::path pred;
  std::filesystem::path gt;
  std::optional<std::filesystem::path> height_pred;
  std::optional<std::filesystem::path> height_gt;
  std::optional<std::filesystem::path> d_pred;
  std::optional<std::filesystem::path> d_gt;
};

/// Height and distortion entries are filled only when both sides are given
/// and hold at least one raster. A path may be a single .f32r file or a
/// directory, in which case its h_*.f32r (heights) or d_*.f32r (distortions)
/// files are read in name order.
metrics::EvalReport run_evaluate(const EvaluateOptions& options);

}  // namespace wf::app
