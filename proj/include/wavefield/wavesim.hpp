#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "wavefield/raster.hpp"

namespace wf::wavesim {

// ---------------------------------------------------------------------------
// Raster sampling

/// Bilinear footprint of one normalized coordinate on a W x H raster.
/// Coordinates outside [-1,1] clamp to the border; coordinates within 1e-9
/// pixels of a pixel centre snap onto it so centres reproduce exactly.
struct BilinearFootprint {
  std::size_t col0 = 0, col1 = 0, row0 = 0, row1 = 0;
  double fx = 0.0, fy = 0.0;
  /// d fx / d x1 and d fy / d x2; zero where the coordinate is clamped.
  double dfx_dx1 = 0.0, dfy_dx2 = 0.0;
};

BilinearFootprint bilinear_footprint(std::size_t width, std::size_t height, double x1, double x2);

/// Interpolates every channel of `raster` at normalized coords (n x 2,
/// interleaved x1, x2). Result is n x channels.
std::vector<double> bilinear_sample(const Raster& raster, std::span<const double> coords);

// ---------------------------------------------------------------------------
// Ground-truth surfaces

enum class WaveType { gaussian, ripple, ocean };

std::string to_string(WaveType type);
std::optional<WaveType> parse_wave_type(const std::string& name);

/// Parameters of a synthetic surface. Lengths are in normalized image units,
/// time in normalized frame time t in [-1,1].
///  ripple:   h = h_base + A sin(2 pi r / lambda - omega t) exp(-beta r), r = |x - c|
///  ocean:    h = h_base + sum_i (A/K) sin(k_i . x - omega_i t + phi_i),
///            |k_i| = 2 pi / lambda_i, omega_i = omega sqrt(|k_i| lambda / 2 pi)
///  gaussian: h = h_base + sum_j A exp(-|x - c_j(t)|^2 / (2 sigma^2)),
///            c_j(t) = c_j + drift * t * (cos a_j, sin a_j)
/// Directions, phases, wavelength jitter and blob placement are drawn from `seed`.
struct WaveParams {
  WaveType type = WaveType::ripple;
  double base_height = 1.0;
  double amplitude = 0.05;
  double wavelength = 0.8;
  double speed = 3.0;
  double damping = 1.0;
  double center_x = 0.0;
  double center_y = 0.0;
  std::size_t components = 6;
  std::size_t blobs = 4;
  double sigma = 0.25;
  double drift = 0.3;
  std::uint64_t seed = 0;
};

void validate(const WaveParams& params);

class WaveSurface {
 public:
  explicit WaveSurface(const WaveParams& params);

  double height(double x1, double x2, double t) const;
  /// Exact analytic (dh/dx1, dh/dx2). The ripple cone tip returns 0.
  std::array<double, 2> gradient(double x1, double x2, double t) const;

  const WaveParams& params() const { return params_; }

 private:
  struct Component {
    double kx, ky, omega, phase, amplitude;
  };
  struct Blob {
    double cx, cy, vx, vy;
  };

  WaveParams params_;
  std::vector<Component> components_;
  std::vector<Blob> blobs_;
};

double gt_height(const WaveParams& params, double x1, double x2, double t);
std::array<double, 2> gt_gradient(const WaveParams& params, double x1, double x2, double t);

// ---------------------------------------------------------------------------
// Sequence synthesis

struct SimulatedSequence {
  std::vector<double> times;
  std::vector<Raster> frames;        // W x H x 3
  std::vector<Raster> distortions;   // W x H x 2, normalized units
  std::vector<Raster> heights;       // W x H x 1
  double mean_height = 0.0;          // h0 over all pixels and frames
  double max_distortion = 0.0;       // max |d| over the sequence
  std::vector<std::string> warnings;
};

/// Largest |d| tolerated before the small-slope assumption is flagged.
inline constexpr double kDistortionWarning = 0.5;

/// Renders `frames` distorted views of `scene`: d = (1 - 1/n) h0 grad h and
/// frame(x) = bilinear(scene, x + d(x, t)), with h0 the mean height over the
/// pixel grid and all frame times.
SimulatedSequence simulate_sequence(const Raster& scene, const WaveParams& params, std::size_t frames,
                                    double refraction_index = 1.33);

/// Smooth, textured RGB scene for fixtures and demos.
Raster test_pattern(std::size_t width, std::size_t height);

}  // namespace wf::wavesim
