#include "wavefield/training.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>

#include "wavefield/diff/adam.hpp"
#include "wavefield/diff/ops.hpp"
#include "wavefield/errors.hpp"
#include "wavefield/refraction.hpp"

namespace wf::training {

using diff::Tensor;

std::string to_string(LossMode mode) { return mode == LossMode::l1 ? "l1" : "ndir3"; }

std::optional<LossMode> parse_loss_mode(const std::string& name) {
  if (name == "l1") return LossMode::l1;
  if (name == "ndir3") return LossMode::ndir3;
  return std::nullopt;
}

void validate(const TrainConfig& c) {
  if (c.frames < 2) throw InputError("config: frames must be at least 2");
  if (c.iters_stage2 < 1) throw InputError("config: iters_stage2 must be at least 1");
  if (!(c.lr_stage1 > 0.0) || !(c.lr_stage2 > 0.0)) throw InputError("config: learning rates must be positive");
  if (!(c.n_refraction > 1.0)) throw InputError("config: n_refraction must exceed 1");
  if (!(c.omega0 > 0.0)) throw InputError("config: omega0 must be positive");
  if (c.height_hidden == 0 || c.image_hidden == 0 || c.fourier_m == 0) {
    throw InputError("config: layer widths and fourier_m must be positive");
  }
  if (!(c.fourier_bandwidth >= 0.0)) throw InputError("config: fourier_bandwidth must be non-negative");
}

fields::HeightFieldOptions height_options(const TrainConfig& c) {
  return {c.height_hidden, c.omega0, c.height_offset, c.height_scale};
}

fields::ImageFieldOptions image_options(const TrainConfig& c) {
  return {c.image_hidden, c.omega0, c.fourier, c.fourier_m, c.fourier_bandwidth};
}

namespace {

Grid grid_of(const std::vector<Raster>& frames) {
  if (frames.empty()) throw InputError("no frames");
  return Grid(frames.front().width, frames.front().height);
}

}  // namespace

Observations::Observations(std::vector<Raster> frames)
    : frames_(std::move(frames)), grid_(grid_of(frames_)), times_(normalized_times(frames_.size())) {
  std::vector<double> all;
  all.reserve(frames_.size() * grid_.size() * 3);
  for (std::size_t i = 0; i < frames_.size(); ++i) {
    const auto& f = frames_[i];
    if (f.width != grid_.width() || f.height != grid_.height() || f.channels != 3) {
      throw InputError("frame " + std::to_string(i) + " is " + std::to_string(f.width) + "x" +
                       std::to_string(f.height) + "x" + std::to_string(f.channels) + ", expected " +
                       std::to_string(grid_.width()) + "x" + std::to_string(grid_.height()) + "x3");
    }
    all.insert(all.end(), f.data.begin(), f.data.end());
  }
  stacked_ = Tensor::from({frames_.size() * grid_.size(), 3}, std::move(all));
}

Tensor init_loss(const fields::HeightField& height, const fields::ImageField& image, const Observations& obs,
                 const RefractionConstants& constants) {
  const auto seq = refraction::sequence_distortion(height, obs.grid(), obs.times(), constants);
  const Tensor distortion_term = diff::reduce_mean(diff::abs(seq.distortion));
  const Tensor clean = refraction::render_clean(image, obs.grid());
  const Tensor tiled = obs.frame_count() == 1 ? clean : diff::repeat_rows(clean, obs.frame_count());
  const Tensor image_term = diff::reduce_mean(diff::abs(diff::sub(tiled, obs.stacked())));
  return diff::add(distortion_term, image_term);
}

Tensor main_loss(const fields::HeightField& height, const fields::ImageField& image, const Observations& obs,
                 const RefractionConstants& constants) {
  const auto seq = refraction::sequence_distortion(height, obs.grid(), obs.times(), constants);
  const Tensor rendered = refraction::render_distorted(image, obs.grid(), seq.distortion);
  return diff::reduce_mean(diff::abs(diff::sub(rendered, obs.stacked())));
}

Tensor ndir_loss(const fields::HeightField& height, const fields::ImageField& image, const Observations& obs,
                 const RefractionConstants& constants) {
  const auto seq = refraction::sequence_distortion(height, obs.grid(), obs.times(), constants);
  const Tensor rendered = refraction::render_distorted(image, obs.grid(), seq.distortion);
  const Tensor clean = refraction::render_clean(image, obs.grid());
  const std::size_t frames = obs.frame_count();
  const Tensor base = frames == 1 ? obs.grid().coords() : diff::repeat_rows(obs.grid().coords(), frames);
  const Tensor warped = refraction::warp(clean, obs.grid(), diff::add(base, seq.distortion));
  const Tensor t1 = diff::reduce_mean(diff::abs(diff::sub(rendered, obs.stacked())));
  const Tensor t2 = diff::reduce_mean(diff::abs(diff::sub(warped, obs.stacked())));
  const Tensor t3 = diff::reduce_mean(diff::abs(diff::sub(rendered, warped)));
  return diff::add(diff::add(t1, t2), t3);
}

std::string TrainLog::to_text() const {
  std::string out = "# iteration stage loss\n";
  char line[96];
  for (const auto& e : entries) {
    std::snprintf(line, sizeof line, "%zu %d %.17g\n", e.iteration, e.stage, e.loss);
    out += line;
  }
  return out;
}

std::vector<double> TrainLog::losses(int stage) const {
  std::vector<double> out;
  for (const auto& e : entries)
    if (e.stage == stage) out.push_back(e.loss);
  return out;
}

TrainResult train(const std::vector<Raster>& frames, const TrainConfig& config, const ProgressFn& progress) {
  validate(config);
  if (frames.size() < 2) throw InputError("training needs at least 2 frames, got " + std::to_string(frames.size()));
  const Observations obs(frames);
  const RefractionConstants constants(config.n_refraction);

  std::mt19937_64 seeder(config.seed);
  const std::uint64_t height_seed = seeder();
  const std::uint64_t image_seed = seeder();
  TrainResult result{{fields::HeightField::create(height_seed, height_options(config)),
                      fields::ImageField::create(image_seed, image_options(config))},
                     std::nullopt,
                     {}};
  auto& height = result.fields.height;
  auto& image = result.fields.image;

  auto params = height.net().parameters("height");
  for (auto& p : image.net().parameters("image")) params.push_back(std::move(p));

  const auto start = std::chrono::steady_clock::now();
  auto run_stage = [&](int stage, std::size_t iterations, double lr, auto&& loss_fn) {
    diff::Adam optimizer(params, {.learning_rate = lr});
    for (std::size_t it = 0; it < iterations; ++it) {
      const Tensor loss = loss_fn();
      const double value = loss.item();
      if (!std::isfinite(value)) {
        throw NumericalError("non-finite loss in stage " + std::to_string(stage) + " at iteration " +
                             std::to_string(it));
      }
      optimizer.zero_grad();
      diff::backward(loss);
      optimizer.step();
      const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      result.log.entries.push_back({stage, it, value, elapsed});
      if (progress) progress(result.log.entries.back());
    }
  };

  if (config.iters_stage1 > 0) {
    run_stage(1, config.iters_stage1, config.lr_stage1, [&] { return init_loss(height, image, obs, constants); });
    result.after_stage1 = FieldPair{height.clone(), image.clone()};
  }
  if (config.loss_mode == LossMode::l1) {
    run_stage(2, config.iters_stage2, config.lr_stage2, [&] { return main_loss(height, image, obs, constants); });
  } else {
    run_stage(2, config.iters_stage2, config.lr_stage2, [&] { return ndir_loss(height, image, obs, constants); });
  }
  return result;
}

}  // namespace wf::training
