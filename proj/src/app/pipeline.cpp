#include "wavefield/app/pipeline.hpp"

#include <cstdio>
#include <fstream>

#include "wavefield/app/config.hpp"
#include "wavefield/app/formats.hpp"
#include "wavefield/errors.hpp"
#include "wavefield/fields/weights.hpp"
#include "wavefield/refraction.hpp"

namespace wf::app {

namespace fs = std::filesystem;

namespace {

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path.string());
  out << text;
  if (!out) throw InputError("failed writing " + path.string());
}

void make_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw InputError("cannot create directory " + dir.string() + ": " + ec.message());
}

std::vector<Raster> read_rasters(const fs::path& path, const std::string& prefix) {
  if (fs::is_directory(path)) {
    std::vector<Raster> out;
    for (const auto& file : list_files(path, prefix, ".f32r")) out.push_back(read_f32r(file));
    return out;
  }
  if (!fs::exists(path)) throw InputError("no such file or directory: " + path.string());
  return {read_f32r(path)};
}

}  // namespace

std::string format_manifest(const SimulateOptions& o, const wavesim::SimulatedSequence& seq) {
  const auto& w = o.wave;
  std::string out;
  char line[160];
  auto put = [&](const char* fmt, auto... args) {
    std::snprintf(line, sizeof line, fmt, args...);
    out += line;
  };
  out += "# wavefield synthetic sequence\n";
  out += "format_image = ppm-p6-255\n";
  out += "format_raster = f32r-1\n";
  out += "color = linear values in [0,1], byte/255, no transfer function\n";
  out += "coordinates = normalized, x1 = -1 + 2*col/(W-1), x2 = -1 + 2*row/(H-1)\n";
  out += "wave_model = stand-in closed form (" + wavesim::to_string(w.type) + ")\n";
  put("width = %zu\n", seq.frames.empty() ? std::size_t{0} : seq.frames.front().width);
  put("height = %zu\n", seq.frames.empty() ? std::size_t{0} : seq.frames.front().height);
  put("frames = %zu\n", seq.frames.size());
  out += "wave = " + wavesim::to_string(w.type) + "\n";
  put("base_height = %.17g\n", w.base_height);
  put("amplitude = %.17g\n", w.amplitude);
  put("wavelength = %.17g\n", w.wavelength);
  put("speed = %.17g\n", w.speed);
  put("damping = %.17g\n", w.damping);
  put("center_x = %.17g\n", w.center_x);
  put("center_y = %.17g\n", w.center_y);
  put("components = %zu\n", w.components);
  put("blobs = %zu\n", w.blobs);
  put("sigma = %.17g\n", w.sigma);
  put("drift = %.17g\n", w.drift);
  put("seed = %llu\n", static_cast<unsigned long long>(w.seed));
  put("n_refraction = %.17g\n", o.n_refraction);
  put("mean_height = %.17g\n", seq.mean_height);
  put("max_distortion = %.17g\n", seq.max_distortion);
  for (std::size_t i = 0; i < seq.times.size(); ++i) {
    put("frame %s t = %.17g d = %s h = %s\n", indexed_name("frame_", i, ".ppm").c_str(), seq.times[i],
        indexed_name("d_gt_", i, ".f32r").c_str(), indexed_name("h_gt_", i, ".f32r").c_str());
  }
  out += "gt = gt.ppm\n";
  for (const auto& warning : seq.warnings) out += "warning = " + warning + "\n";
  return out;
}

SimulateResult run_simulate(const SimulateOptions& o) {
  const Raster scene = read_ppm(o.image);
  const auto seq = wavesim::simulate_sequence(scene, o.wave, o.frames, o.n_refraction);
  make_dir(o.out);
  write_ppm(o.out / "gt.ppm", scene);
  for (std::size_t i = 0; i < seq.frames.size(); ++i) {
    write_ppm(o.out / indexed_name("frame_", i, ".ppm"), seq.frames[i]);
    write_f32r(o.out / indexed_name("d_gt_", i, ".f32r"), seq.distortions[i]);
    write_f32r(o.out / indexed_name("h_gt_", i, ".f32r"), seq.heights[i]);
  }
  write_text(o.out / "manifest.txt", format_manifest(o, seq));
  return {seq.warnings, seq.max_distortion};
}

std::vector<Raster> read_frames(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw InputError("not a directory: " + dir.string());
  std::vector<Raster> frames;
  for (const auto& file : list_files(dir, "frame_", ".ppm")) frames.push_back(read_ppm(file));
  return frames;
}

training::TrainLog run_restore(const RestoreOptions& o) {
  training::validate(o.config);
  auto frames = read_frames(o.frames);
  if (frames.size() < 2) {
    throw InputError("restore needs at least 2 frames, found " + std::to_string(frames.size()) + " in " +
                     o.frames.string());
  }
  if (frames.size() < o.config.frames) {
    throw InputError("config asks for " + std::to_string(o.config.frames) + " frames but " + o.frames.string() +
                     " holds " + std::to_string(frames.size()));
  }
  frames.resize(o.config.frames);

  auto result = training::train(frames, o.config, o.progress);

  make_dir(o.out);
  const Grid grid(frames.front().width, frames.front().height);
  const auto times = normalized_times(frames.size());
  const RefractionConstants constants(o.config.n_refraction);
  const auto& height = result.fields.height;
  const auto& image = result.fields.image;

  write_ppm(o.out / "restored.ppm", refraction::to_raster(refraction::render_clean(image, grid), grid));
  const auto seq = refraction::sequence_distortion(height, grid, times, constants);
  const auto recon = refraction::render_distorted(image, grid, seq.distortion);
  for (std::size_t i = 0; i < frames.size(); ++i) {
    write_ppm(o.out / indexed_name("recon_", i, ".ppm"), refraction::to_raster(recon, grid, i));
    write_f32r(o.out / indexed_name("d_pred_", i, ".f32r"), refraction::to_raster(seq.distortion, grid, i));
    write_f32r(o.out / indexed_name("h_pred_", i, ".f32r"), refraction::to_raster(seq.heights, grid, i));
  }
  write_text(o.out / "loss.log", result.log.to_text());
  write_text(o.out / "config.txt", format_config(o.config));
  make_dir(o.out / "weights");
  fields::save_height_field(height, o.out / "weights");
  fields::save_image_field(image, o.out / "weights");
  return result.log;
}

metrics::EvalReport run_evaluate(const EvaluateOptions& o) {
  metrics::EvalReport report;
  const Raster pred = read_ppm(o.pred), gt = read_ppm(o.gt);
  report.psnr = metrics::psnr(pred, gt);
  report.ssim = metrics::ssim(pred, gt);
  if (o.height_pred && o.height_gt) {
    const auto hp = read_rasters(*o.height_pred, "h_"), hg = read_rasters(*o.height_gt, "h_");
    if (!hp.empty() && !hg.empty()) report.height = metrics::height_errors(hp, hg);
  }
  if (o.d_pred && o.d_gt) {
    const auto dp = read_rasters(*o.d_pred, "d_"), dg = read_rasters(*o.d_gt, "d_");
    if (!dp.empty() && !dg.empty()) report.d_corr = metrics::distortion_correlation(dp, dg);
  }
  return report;
}

}  // namespace wf::app
