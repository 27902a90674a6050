// End-to-end acceptance run: one PASS/FAIL line per criterion, exit status 1
// if any criterion fails. Takes about 12 minutes on one core.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <map>
#include <random>
#include <string>
#include <unistd.h>

#include "oracles.hpp"
#include "wavefield/app/allocator.hpp"
#include "wavefield/app/formats.hpp"
#include "wavefield/app/pipeline.hpp"
#include "wavefield/diff/ops.hpp"
#include "wavefield/metrics.hpp"
#include "wavefield/refraction.hpp"
#include "wavefield/training.hpp"
#include "wavefield/wavesim.hpp"

using namespace wf;
namespace fs = std::filesystem;
using diff::Tensor;
using fields::HeightField;
using fields::ImageField;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Check {
  bool ok = true;
  std::string detail;

  void require(bool cond, const std::string& what) {
    detail += (detail.empty() ? "" : "; ") + what + (cond ? "" : " [failed]");
    ok = ok && cond;
  }
};

std::string fmt(const char* format, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, format, a, b, c);
  return buf;
}

const RefractionConstants kWater(1.33);
constexpr std::size_t kSize = 64;
constexpr double kAmplitude = 0.05;

// The 64x64 ripple fixture. The default bandwidth of 8 puts Fourier
// frequencies well past the 32-cycle Nyquist limit of a 64-pixel frame, where
// the image field can reproduce each frame's distortion by itself; 3 keeps the
// encoding inside the band the frames can resolve.
training::TrainConfig fixture_config() {
  training::TrainConfig c;
  c.height_hidden = 64;
  c.image_hidden = 64;
  c.fourier_m = 64;
  c.fourier_bandwidth = 3.0;
  c.lr_stage1 = 1e-3;
  c.lr_stage2 = 1e-3;
  c.iters_stage1 = 150;
  c.iters_stage2 = 400;
  return c;
}

wavesim::WaveParams ripple(double amplitude = kAmplitude) {
  wavesim::WaveParams p;
  p.type = wavesim::WaveType::ripple;
  p.amplitude = amplitude;
  return p;
}

struct Fit {
  double psnr = 0.0;
  double ssim = 0.0;
  std::optional<double> d_corr;
  double height_rmse = 0.0;
  double mean_abs_d = 0.0;
  double mae = 0.0;
  double first_stage2_loss = 0.0;
  double last_stage2_loss = 0.0;
  double stage1_mean_abs_d = 0.0;
  double seconds = 0.0;
  bool finite = true;
};

// Scores a trained pair against the simulated ground truth.
void score(const training::FieldPair& fields, const wavesim::SimulatedSequence& seq, const Raster& scene, Fit& out) {
  const Grid g(scene.width, scene.height);
  const std::size_t t = seq.frames.size();
  const auto restored = refraction::to_raster(refraction::render_clean(fields.image, g), g);
  out.psnr = metrics::psnr(restored, scene);
  out.ssim = metrics::ssim(restored, scene);
  out.mae = 0.0;
  for (std::size_t i = 0; i < scene.data.size(); ++i) out.mae += std::abs(restored.data[i] - scene.data[i]);
  out.mae /= static_cast<double>(scene.data.size());

  const auto sd = refraction::sequence_distortion(fields.height, g, normalized_times(t), kWater);
  std::vector<Raster> d, h;
  for (std::size_t f = 0; f < t; ++f) {
    d.push_back(refraction::to_raster(sd.distortion, g, f));
    h.push_back(refraction::to_raster(sd.heights, g, f));
  }
  out.d_corr = metrics::median(metrics::distortion_correlation(d, seq.distortions));
  out.height_rmse = metrics::height_errors(h, seq.heights).rmse;
  out.mean_abs_d = 0.0;
  for (double v : sd.distortion.values()) out.mean_abs_d += std::abs(v);
  out.mean_abs_d /= static_cast<double>(sd.distortion.numel());
}

double mean_abs_distortion(const HeightField& height, const Grid& g, std::size_t t) {
  const auto sd = refraction::sequence_distortion(height, g, normalized_times(t), kWater);
  double s = 0.0;
  for (double v : sd.distortion.values()) s += std::abs(v);
  return s / static_cast<double>(sd.distortion.numel());
}

Fit fit(const wavesim::SimulatedSequence& seq, const Raster& scene, const training::TrainConfig& config) {
  Fit out;
  const auto start = Clock::now();
  const auto result = training::train(seq.frames, config);
  out.seconds = seconds_since(start);
  score(result.fields, seq, scene, out);
  if (result.after_stage1) {
    out.stage1_mean_abs_d = mean_abs_distortion(result.after_stage1->height, Grid(scene.width, scene.height),
                                                seq.frames.size());
  }
  bool first = true;
  for (const auto& e : result.log.entries) {
    out.finite = out.finite && std::isfinite(e.loss);
    if (e.stage != 2) continue;
    if (first) out.first_stage2_loss = e.loss;
    first = false;
    out.last_stage2_loss = e.loss;
  }
  return out;
}

Check gradient_fidelity() {
  Check c;
  const auto start = Clock::now();
  std::mt19937_64 rng(1);
  fields::HeightFieldOptions ho;
  ho.hidden = 64;
  const auto h = HeightField::create(2, ho);
  const auto pts = oracle::uniform(rng, 300);
  const Tensor x = Tensor::from({100, 3}, pts);
  const Tensor grad = h.spatial_gradient(x);
  const double step = 1e-5;
  double worst = 0.0;
  for (std::size_t i = 0; i < 100; ++i)
    for (std::size_t k = 0; k < 2; ++k) {
      std::vector<double> up(pts.begin() + 3 * i, pts.begin() + 3 * i + 3), down = up;
      up[k] += step;
      down[k] -= step;
      const double fd =
          (h.eval(Tensor::from({1, 3}, up)).item() - h.eval(Tensor::from({1, 3}, down)).item()) / (2 * step);
      worst = std::max(worst, oracle::relative_error(grad.at(2 * i + k), fd));
    }
  c.require(worst < 1e-6, fmt("spatial gradient vs FD worst rel err %.2e", worst));

  fields::HeightFieldOptions sh;
  sh.hidden = 12;
  fields::ImageFieldOptions si;
  si.hidden = 12;
  si.fourier_frequencies = 6;
  si.fourier_bandwidth = 2.0;
  const auto hs = HeightField::create(3, sh);
  const auto img = ImageField::create(4, si);
  std::vector<Raster> frames;
  for (int i = 0; i < 2; ++i) frames.push_back(oracle::random_raster(rng, 8, 8, 3));
  const training::Observations obs(frames);
  auto loss = [&] { return training::main_loss(hs, img, obs, kWater); };
  diff::backward(loss());
  auto value = [&] { return loss().item(); };
  double worst_loss = 0.0;
  for (const auto& p : hs.net().parameters("height"))
    worst_loss = std::max(worst_loss, oracle::fd_check(p.tensor, value, 1e-6, 1000, 1e-4));
  for (const auto& p : img.net().parameters("image"))
    worst_loss = std::max(worst_loss, oracle::fd_check(p.tensor, value, 1e-6, 20, 1e-4));
  c.require(worst_loss < 1e-4, fmt("main_loss parameter gradients vs FD worst rel err %.2e", worst_loss));
  const double s = seconds_since(start);
  c.require(s < 10.0, fmt("%.1f s", s));
  return c;
}

HeightField affine_height(double offset, double scale, std::vector<double> w, double b) {
  std::vector<fields::SirenLayer> layers;
  layers.push_back({Tensor::from({1, 3}, std::move(w), true), Tensor::from({1}, {b}, true), 30.0, false});
  return HeightField(fields::SirenNet(std::move(layers)), offset, scale);
}

Check physics_identities() {
  Check c;
  const Grid g(9, 8);
  const auto times = normalized_times(4);

  const auto flat = affine_height(1.3, 0.1, {0.0, 0.0, 0.7}, 0.2);
  const auto fd = refraction::sequence_distortion(flat, g, times, kWater);
  double worst_flat = 0.0;
  for (double v : fd.distortion.values())
    worst_flat = std::max(worst_flat, std::abs(v));
  c.require(worst_flat == 0.0, fmt("constant field max|d| = %g", worst_flat));

  const auto ramp = affine_height(1.0, 0.1, {1.0, 0.0, 0.0}, 0.0);
  const auto rd = refraction::sequence_distortion(ramp, Grid(8, 8), normalized_times(2), kWater);
  double worst_ramp = 0.0;
  for (std::size_t i = 0; i < rd.distortion.numel() / 2; ++i) {
    worst_ramp = std::max(worst_ramp, std::abs(rd.distortion.at(2 * i) - 0.024812030075187969));
    worst_ramp = std::max(worst_ramp, std::abs(rd.distortion.at(2 * i + 1)));
  }
  c.require(worst_ramp <= 1e-12, fmt("linear ramp vs 0.024812... max err %.1e", worst_ramp));

  fields::HeightFieldOptions ho;
  ho.hidden = 16;
  ho.offset = 0.0;
  const auto h = HeightField::create(5, ho);
  auto flipped = h.clone();
  auto& head = flipped.net().layers().back();
  for (double& v : head.weight.mutable_values()) v = -v;
  for (double& v : head.bias.mutable_values()) v = -v;
  fields::ImageFieldOptions io;
  io.hidden = 16;
  io.fourier_frequencies = 8;
  io.fourier_bandwidth = 2.0;
  const auto img = ImageField::create(6, io);
  const Tensor ra =
      refraction::render_distorted(img, g, refraction::sequence_distortion(h, g, times, kWater).distortion);
  const Tensor rb =
      refraction::render_distorted(img, g, refraction::sequence_distortion(flipped, g, times, kWater).distortion);
  const double flip = oracle::max_abs_diff(ra.values(), rb.values());
  c.require(flip <= 1e-12, fmt("sign-flip gauge frame diff %.1e", flip));
  return c;
}

Check zero_amplitude() {
  Check c;
  const auto scene = wavesim::test_pattern(kSize, kSize);
  const auto seq = wavesim::simulate_sequence(scene, ripple(0.0), 10);
  auto config = fixture_config();
  config.iters_stage2 = 50;
  const auto f = fit(seq, scene, config);
  c.require(f.stage1_mean_abs_d <= 1e-3, fmt("stage-1 mean|d| %.2e", f.stage1_mean_abs_d));
  c.require(f.mae <= 0.02, fmt("restored MAE %.4f", f.mae));
  c.require(f.seconds < 120.0, fmt("%.0f s", f.seconds));
  return c;
}

struct RippleBaselines {
  double distorted = 0.0;
  double temporal_mean = 0.0;
};

RippleBaselines baselines(const wavesim::SimulatedSequence& seq, const Raster& scene) {
  RippleBaselines b;
  Raster mean(scene.width, scene.height, 3);
  const double t = static_cast<double>(seq.frames.size());
  for (const auto& f : seq.frames) {
    b.distorted += metrics::psnr(f, scene) / t;
    for (std::size_t i = 0; i < f.data.size(); ++i) mean.data[i] += f.data[i] / t;
  }
  b.temporal_mean = metrics::psnr(mean, scene);
  return b;
}

Check ripple_restoration(const Fit& f, const RippleBaselines& b) {
  Check c;
  c.require(f.psnr >= b.distorted + 1.0, fmt("restored %.2f dB vs distorted-frame mean %.2f dB", f.psnr, b.distorted));
  c.require(f.psnr >= b.temporal_mean + 0.5, fmt("vs temporal mean %.2f dB", b.temporal_mean));
  c.require(f.seconds <= 600.0, fmt("%.0f s", f.seconds));
  c.detail += fmt(" (ssim %.4f)", f.ssim);
  return c;
}

Check surface_recovery(const Fit& f) {
  Check c;
  const double r = f.d_corr.value_or(-2.0);
  c.require(f.d_corr.has_value() && r >= 0.8, fmt("median d correlation %.3f", r));
  c.require(f.height_rmse <= 0.5 * kAmplitude, fmt("height RMSE %.4f (limit %.3f)", f.height_rmse, 0.5 * kAmplitude));
  return c;
}

Check loss_modes(const Fit& l1, const Fit& ndir3) {
  Check c;
  c.require(l1.finite && l1.last_stage2_loss <= 0.5 * l1.first_stage2_loss,
            fmt("l1 stage-2 loss %.4f -> %.4f", l1.first_stage2_loss, l1.last_stage2_loss));
  c.require(ndir3.finite && ndir3.last_stage2_loss <= 0.5 * ndir3.first_stage2_loss,
            fmt("ndir3 stage-2 loss %.4f -> %.4f", ndir3.first_stage2_loss, ndir3.last_stage2_loss));
  c.detail += fmt(" (psnr l1 %.2f dB, ndir3 %.2f dB)", l1.psnr, ndir3.psnr);
  return c;
}

Check sequence_length(const Fit& t10, const Fit& t5) {
  Check c;
  c.require(t10.psnr >= t5.psnr, fmt("T=10 %.2f dB vs T=5 %.2f dB", t10.psnr, t5.psnr));
  return c;
}

Check metric_oracles() {
  Check c;
  std::mt19937_64 rng(7);
  Raster a(16, 16, 3);
  a.data = oracle::uniform(rng, a.data.size(), 0.0, 0.9);
  Raster b = a;
  for (double& v : b.data) v += 0.1;
  const double p = metrics::psnr(a, b);
  c.require(std::abs(p - 20.0) <= 1e-6, fmt("psnr uniform 0.1 = %.9f", p));

  const auto x = oracle::random_raster(rng, 16, 16, 3);
  const auto y = oracle::random_raster(rng, 16, 16, 3);
  const double self = metrics::ssim(x, x);
  c.require(std::abs(self - 1.0) <= 1e-9, fmt("ssim(a,a) - 1 = %.1e", self - 1.0));
  const double sd = std::abs(metrics::ssim(x, y) - oracle::ssim_loop(x, y));
  c.require(sd <= 1e-8, fmt("ssim vs window loop %.1e", sd));

  std::vector<Raster> hp, hg, dp, dg;
  for (int f = 0; f < 3; ++f) {
    Raster g(6, 5, 1), q(6, 5, 1), e(6, 5, 2), o(6, 5, 2);
    g.data = oracle::uniform(rng, 30, 0.9, 1.1);
    q.data = oracle::uniform(rng, 30, -0.2, 0.2);
    e.data = oracle::uniform(rng, 60, -0.1, 0.1);
    o.data = oracle::uniform(rng, 60, -0.1, 0.1);
    for (std::size_t i = 0; i < 60; ++i) o.data[i] += e.data[i];
    hg.push_back(g);
    hp.push_back(q);
    dg.push_back(e);
    dp.push_back(o);
  }
  const auto he = metrics::height_errors(hp, hg);
  const auto ref = oracle::height_errors_loop(hp, hg);
  const double hd = std::max(std::abs(he.rmse - ref[0]), std::abs(he.abs_rel - ref[1]));
  c.require(hd <= 1e-12, fmt("height errors vs loop %.1e", hd));

  double mp[2] = {0, 0}, mg[2] = {0, 0};
  for (int f = 0; f < 3; ++f)
    for (std::size_t i = 0; i < 60; ++i) {
      mp[i % 2] += dp[f].data[i] / 90.0;
      mg[i % 2] += dg[f].data[i] / 90.0;
    }
  const auto r = metrics::distortion_correlation(dp, dg);
  double rd = 0.0;
  for (int f = 0; f < 3; ++f) {
    std::vector<double> u, v;
    for (std::size_t i = 0; i < 60; ++i) {
      u.push_back(dp[f].data[i] - mp[i % 2]);
      v.push_back(dg[f].data[i] - mg[i % 2]);
    }
    rd = std::max(rd, r[f] ? std::abs(*r[f] - oracle::pearson(u, v)) : 1.0);
  }
  c.require(rd <= 1e-12, fmt("distortion correlation vs Pearson loop %.1e", rd));
  return c;
}

std::map<std::string, std::string> read_tree(const fs::path& root) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (!e.is_regular_file()) continue;
    std::ifstream in(e.path(), std::ios::binary);
    files[fs::relative(e.path(), root).string()] = {std::istreambuf_iterator<char>(in), {}};
  }
  return files;
}

Check determinism() {
  Check c;
  const fs::path root = fs::temp_directory_path() / ("wavefield_acceptance_" + std::to_string(::getpid()));
  fs::remove_all(root);
  fs::create_directories(root);
  app::write_ppm(root / "scene.ppm", wavesim::test_pattern(24, 24));

  for (const char* run : {"a", "b"}) {
    const fs::path dir = root / run;
    app::SimulateOptions so;
    so.image = root / "scene.ppm";
    so.out = dir / "data";
    so.wave = ripple();
    so.frames = 4;
    app::run_simulate(so);

    app::RestoreOptions ro;
    ro.frames = dir / "data";
    ro.out = dir / "results";
    ro.config = fixture_config();
    ro.config.frames = 4;
    ro.config.height_hidden = 16;
    ro.config.image_hidden = 16;
    ro.config.fourier_m = 16;
    ro.config.iters_stage1 = 20;
    ro.config.iters_stage2 = 30;
    app::run_restore(ro);

    app::EvaluateOptions eo;
    eo.pred = dir / "results/restored.ppm";
    eo.gt = dir / "data/gt.ppm";
    eo.height_pred = dir / "results";
    eo.height_gt = dir / "data";
    eo.d_pred = dir / "results";
    eo.d_gt = dir / "data";
    std::ofstream(dir / "report.txt", std::ios::binary) << app::run_evaluate(eo).to_text();
  }
  const auto a = read_tree(root / "a"), b = read_tree(root / "b");
  std::size_t differing = a.size() == b.size() ? 0 : 1;
  for (const auto& [name, bytes] : a) {
    const auto it = b.find(name);
    if (it == b.end() || it->second != bytes) ++differing;
  }
  c.require(differing == 0 && a.size() > 10,
            fmt("%.0f artifacts compared, %.0f differ", static_cast<double>(a.size()), static_cast<double>(differing)));
  fs::remove_all(root);
  return c;
}

}  // namespace

int main() {
  app::retain_freed_memory();
  bool all = true;
  auto report = [&](int id, const char* name, const Check& c) {
    std::printf("%s criterion %d (%s): %s\n", c.ok ? "PASS" : "FAIL", id, name, c.detail.c_str());
    std::fflush(stdout);
    all = all && c.ok;
  };
  auto guarded = [&](int id, const char* name, const std::function<Check()>& body) {
    try {
      report(id, name, body());
    } catch (const std::exception& e) {
      Check c;
      c.require(false, std::string("exception: ") + e.what());
      report(id, name, c);
    }
  };

  guarded(1, "gradient fidelity", gradient_fidelity);
  guarded(2, "physics identities", physics_identities);
  guarded(3, "zero-amplitude end to end", zero_amplitude);

  const auto scene = wavesim::test_pattern(kSize, kSize);
  const auto seq10 = wavesim::simulate_sequence(scene, ripple(), 10);
  const auto base = baselines(seq10, scene);
  std::optional<Fit> l1;
  try {
    l1 = fit(seq10, scene, fixture_config());
  } catch (const std::exception& e) {
    std::printf("ripple fixture run failed: %s\n", e.what());
  }
  auto needs_l1 = [&](const std::function<Check()>& body) {
    return [&, body] {
      if (!l1) {
        Check c;
        c.require(false, "ripple fixture run failed");
        return c;
      }
      return body();
    };
  };
  guarded(4, "ripple restoration", needs_l1([&] { return ripple_restoration(*l1, base); }));
  guarded(5, "surface recovery", needs_l1([&] { return surface_recovery(*l1); }));
  guarded(6, "loss-mode ablation", needs_l1([&] {
            auto config = fixture_config();
            config.loss_mode = training::LossMode::ndir3;
            return loss_modes(*l1, fit(seq10, scene, config));
          }));
  guarded(7, "sequence length", needs_l1([&] {
            const auto seq5 = wavesim::simulate_sequence(scene, ripple(), 5);
            auto config = fixture_config();
            config.frames = 5;
            return sequence_length(*l1, fit(seq5, scene, config));
          }));
  guarded(8, "metric oracles", metric_oracles);
  guarded(9, "determinism", determinism);
  return all ? 0 : 1;
}
