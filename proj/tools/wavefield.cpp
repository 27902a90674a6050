// wavefield: simulate distorted sequences, restore them, evaluate results.
//
// Exit codes: 0 success, 1 usage, 2 bad input, 3 numerical failure.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>

#include "wavefield/app/allocator.hpp"
#include "wavefield/app/config.hpp"
#include "wavefield/app/formats.hpp"
#include "wavefield/app/pipeline.hpp"
#include "wavefield/errors.hpp"

namespace {

constexpr int kUsage = 1;
constexpr int kInput = 2;
constexpr int kNumerical = 3;

}  // namespace

int main(int argc, char** argv) {
  using namespace wf;
  app::retain_freed_memory();

  CLI::App cli{"Neural-field restoration of images seen through a wavy water surface"};
  cli.require_subcommand(1);

  app::SimulateOptions sim;
  std::string wave_name = "ripple";
  auto* simulate = cli.add_subcommand("simulate", "Render a distorted sequence from a clean image");
  simulate->add_option("--image", sim.image, "Clean scene (PPM P6)")->required()->check(CLI::ExistingFile);
  simulate->add_option("--wave", wave_name, "gaussian | ripple | ocean")
      ->check(CLI::IsMember({"gaussian", "ripple", "ocean"}));
  simulate->add_option("--frames", sim.frames, "Number of frames")->check(CLI::PositiveNumber);
  simulate->add_option("--seed", sim.wave.seed, "Seed for ocean and gaussian waves");
  simulate->add_option("--out", sim.out, "Output directory")->required();
  simulate->add_option("--base-height", sim.wave.base_height, "Mean water depth");
  simulate->add_option("--amplitude", sim.wave.amplitude, "Wave amplitude");
  simulate->add_option("--wavelength", sim.wave.wavelength, "Wavelength");
  simulate->add_option("--speed", sim.wave.speed, "Angular speed");
  simulate->add_option("--damping", sim.wave.damping, "Ripple radial damping");
  simulate->add_option("--center-x", sim.wave.center_x, "Ripple center x1");
  simulate->add_option("--center-y", sim.wave.center_y, "Ripple center x2");
  simulate->add_option("--components", sim.wave.components, "Ocean components");
  simulate->add_option("--blobs", sim.wave.blobs, "Gaussian blobs");
  simulate->add_option("--sigma", sim.wave.sigma, "Gaussian blob width");
  simulate->add_option("--drift", sim.wave.drift, "Gaussian blob drift speed");
  simulate->add_option("--n-refraction", sim.n_refraction, "Refraction index of water");

  app::RestoreOptions restore_opts;
  std::string config_path;
  bool verbose = false;
  auto* restore = cli.add_subcommand("restore", "Fit height and image fields to a frame directory");
  restore->add_option("--frames", restore_opts.frames, "Directory with frame_###.ppm")->required();
  restore->add_option("--out", restore_opts.out, "Output directory")->required();
  restore->add_option("--config", config_path, "key = value configuration file")->check(CLI::ExistingFile);
  restore->add_flag("--verbose", verbose, "Print the loss every 50 iterations");

  app::EvaluateOptions eval_opts;
  std::string height_pred, height_gt, d_pred, d_gt, report_path;
  auto* evaluate = cli.add_subcommand("evaluate", "Compare a restored image (and optional fields) with ground truth");
  evaluate->add_option("--pred", eval_opts.pred, "Restored image (PPM)")->required()->check(CLI::ExistingFile);
  evaluate->add_option("--gt", eval_opts.gt, "Ground-truth image (PPM)")->required()->check(CLI::ExistingFile);
  evaluate->add_option("--height-pred", height_pred, "Predicted heights: .f32r file or directory");
  evaluate->add_option("--height-gt", height_gt, "Ground-truth heights: .f32r file or directory");
  evaluate->add_option("--d-pred", d_pred, "Predicted distortions: .f32r file or directory");
  evaluate->add_option("--d-gt", d_gt, "Ground-truth distortions: .f32r file or directory");
  evaluate->add_option("--out", report_path, "Report file (default: stdout)");

  std::size_t pattern_width = 64, pattern_height = 64;
  std::string pattern_out;
  auto* pattern = cli.add_subcommand("pattern", "Write the built-in test scene");
  pattern->add_option("--width", pattern_width, "Width in pixels")->check(CLI::PositiveNumber);
  pattern->add_option("--height", pattern_height, "Height in pixels")->check(CLI::PositiveNumber);
  pattern->add_option("--out", pattern_out, "Output PPM")->required();

  try {
    cli.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = cli.exit(e);
    return code == 0 ? 0 : kUsage;
  }

  try {
    if (*simulate) {
      sim.wave.type = *wavesim::parse_wave_type(wave_name);
      const auto result = app::run_simulate(sim);
      for (const auto& w : result.warnings) std::cerr << "warning: " << w << "\n";
    } else if (*restore) {
      if (!config_path.empty()) restore_opts.config = app::load_config(config_path);
      if (verbose) {
        restore_opts.progress = [](const training::LogEntry& e) {
          if (e.iteration % 50 == 0) {
            std::fprintf(stderr, "stage %d iter %zu loss %.6g (%.1f s)\n", e.stage, e.iteration, e.loss,
                         e.elapsed_seconds);
          }
        };
      }
      app::run_restore(restore_opts);
    } else if (*evaluate) {
      if (!height_pred.empty()) eval_opts.height_pred = height_pred;
      if (!height_gt.empty()) eval_opts.height_gt = height_gt;
      if (!d_pred.empty()) eval_opts.d_pred = d_pred;
      if (!d_gt.empty()) eval_opts.d_gt = d_gt;
      const std::string text = app::run_evaluate(eval_opts).to_text();
      if (report_path.empty()) {
        std::cout << text;
      } else {
        std::ofstream out(report_path, std::ios::binary);
        out << text;
        if (!out) throw InputError("cannot write " + report_path);
      }
    } else if (*pattern) {
      app::write_ppm(pattern_out, wavesim::test_pattern(pattern_width, pattern_height));
    }
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInput;
  }
  return 0;
}
