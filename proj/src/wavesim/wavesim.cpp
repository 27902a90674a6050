#include "wavefield/wavesim.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "wavefield/errors.hpp"
#include "wavefield/grid.hpp"

namespace wf::wavesim {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kSnap = 1e-9;

// Position along one axis in pixel units plus its clamped footprint.
void axis_footprint(std::size_t n, double x, std::size_t& i0, std::size_t& i1, double& frac, double& slope) {
  if (n == 1) {
    i0 = i1 = 0;
    frac = 0.0;
    slope = 0.0;
    return;
  }
  const double span = static_cast<double>(n - 1);
  double u = (x + 1.0) * 0.5 * span;
  slope = 0.5 * span;
  if (u <= 0.0) {
    u = 0.0;
    slope = 0.0;
  } else if (u >= span) {
    u = span;
    slope = 0.0;
  }
  const double nearest = std::round(u);
  if (std::abs(u - nearest) < kSnap) u = nearest;
  const auto base = std::min(static_cast<std::size_t>(std::floor(u)), n - 2);
  i0 = base;
  i1 = base + 1;
  frac = u - static_cast<double>(base);
}

}  // namespace

BilinearFootprint bilinear_footprint(std::size_t width, std::size_t height, double x1, double x2) {
  BilinearFootprint f;
  axis_footprint(width, x1, f.col0, f.col1, f.fx, f.dfx_dx1);
  axis_footprint(height, x2, f.row0, f.row1, f.fy, f.dfy_dx2);
  return f;
}

std::vector<double> bilinear_sample(const Raster& raster, std::span<const double> coords) {
  if (coords.size() % 2 != 0) throw DimensionError("bilinear_sample: coordinates must be (x1, x2) pairs");
  const std::size_t n = coords.size() / 2, ch = raster.channels;
  std::vector<double> out(n * ch);
  for (std::size_t i = 0; i < n; ++i) {
    const auto f = bilinear_footprint(raster.width, raster.height, coords[2 * i], coords[2 * i + 1]);
    for (std::size_t c = 0; c < ch; ++c) {
      const double top = (1.0 - f.fx) * raster.at(f.row0, f.col0, c) + f.fx * raster.at(f.row0, f.col1, c);
      const double bottom = (1.0 - f.fx) * raster.at(f.row1, f.col0, c) + f.fx * raster.at(f.row1, f.col1, c);
      out[i * ch + c] = (1.0 - f.fy) * top + f.fy * bottom;
    }
  }
  return out;
}

std::string to_string(WaveType type) {
  switch (type) {
    case WaveType::gaussian: return "gaussian";
    case WaveType::ripple: return "ripple";
    case WaveType::ocean: return "ocean";
  }
  return "unknown";
}

std::optional<WaveType> parse_wave_type(const std::string& name) {
  if (name == "gaussian") return WaveType::gaussian;
  if (name == "ripple") return WaveType::ripple;
  if (name == "ocean") return WaveType::ocean;
  return std::nullopt;
}

void validate(const WaveParams& p) {
  if (!(p.amplitude >= 0.0) || !(p.wavelength > 0.0) || !(p.speed >= 0.0) || !(p.damping >= 0.0)) {
    throw DomainError("wave parameters: amplitude, speed, damping must be >= 0 and wavelength > 0");
  }
  if (!(p.base_height > 0.0)) throw DomainError("wave parameters: base height must be positive");
  if (p.type == WaveType::ocean && p.components == 0) throw DomainError("ocean waves need at least one component");
  if (p.type == WaveType::gaussian && (p.blobs == 0 || !(p.sigma > 0.0))) {
    throw DomainError("gaussian waves need at least one blob and sigma > 0");
  }
}

WaveSurface::WaveSurface(const WaveParams& params) : params_(params) {
  validate(params_);
  std::mt19937_64 rng(params_.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  if (params_.type == WaveType::ocean) {
    const double k_ref = kTwoPi / params_.wavelength;
    for (std::size_t i = 0; i < params_.components; ++i) {
      const double direction = kTwoPi * unit(rng);
      const double wavelength = params_.wavelength * (0.6 + 0.8 * unit(rng));
      const double phase = kTwoPi * unit(rng);
      const double k = kTwoPi / wavelength;
      components_.push_back({k * std::cos(direction), k * std::sin(direction), params_.speed * std::sqrt(k / k_ref),
                             phase, params_.amplitude / static_cast<double>(params_.components)});
    }
  } else if (params_.type == WaveType::gaussian) {
    for (std::size_t j = 0; j < params_.blobs; ++j) {
      const double cx = -0.6 + 1.2 * unit(rng);
      const double cy = -0.6 + 1.2 * unit(rng);
      const double heading = kTwoPi * unit(rng);
      blobs_.push_back({cx, cy, params_.drift * std::cos(heading), params_.drift * std::sin(heading)});
    }
  }
}

double WaveSurface::height(double x1, double x2, double t) const {
  const auto& p = params_;
  double h = p.base_height;
  switch (p.type) {
    case WaveType::ripple: {
      const double r = std::hypot(x1 - p.center_x, x2 - p.center_y);
      h += p.amplitude * std::sin(kTwoPi * r / p.wavelength - p.speed * t) * std::exp(-p.damping * r);
      break;
    }
    case WaveType::ocean:
      for (const auto& c : components_) h += c.amplitude * std::sin(c.kx * x1 + c.ky * x2 - c.omega * t + c.phase);
      break;
    case WaveType::gaussian: {
      const double inv = 1.0 / (2.0 * p.sigma * p.sigma);
      for (const auto& b : blobs_) {
        const double dx = x1 - (b.cx + b.vx * t), dy = x2 - (b.cy + b.vy * t);
        h += p.amplitude * std::exp(-(dx * dx + dy * dy) * inv);
      }
      break;
    }
  }
  return h;
}

std::array<double, 2> WaveSurface::gradient(double x1, double x2, double t) const {
  const auto& p = params_;
  std::array<double, 2> g{0.0, 0.0};
  switch (p.type) {
    case WaveType::ripple: {
      const double dx = x1 - p.center_x, dy = x2 - p.center_y;
      const double r = std::hypot(dx, dy);
      if (r == 0.0) return g;
      const double k = kTwoPi / p.wavelength;
      const double arg = k * r - p.speed * t;
      const double decay = std::exp(-p.damping * r);
      const double dh_dr = p.amplitude * decay * (k * std::cos(arg) - p.damping * std::sin(arg));
      g = {dh_dr * dx / r, dh_dr * dy / r};
      break;
    }
    case WaveType::ocean:
      for (const auto& c : components_) {
        const double s = c.amplitude * std::cos(c.kx * x1 + c.ky * x2 - c.omega * t + c.phase);
        g[0] += s * c.kx;
        g[1] += s * c.ky;
      }
      break;
    case WaveType::gaussian: {
      const double inv = 1.0 / (2.0 * p.sigma * p.sigma);
      for (const auto& b : blobs_) {
        const double dx = x1 - (b.cx + b.vx * t), dy = x2 - (b.cy + b.vy * t);
        const double e = p.amplitude * std::exp(-(dx * dx + dy * dy) * inv);
        g[0] -= e * dx / (p.sigma * p.sigma);
        g[1] -= e * dy / (p.sigma * p.sigma);
      }
      break;
    }
  }
  return g;
}

double gt_height(const WaveParams& params, double x1, double x2, double t) {
  return WaveSurface(params).height(x1, x2, t);
}

std::array<double, 2> gt_gradient(const WaveParams& params, double x1, double x2, double t) {
  return WaveSurface(params).gradient(x1, x2, t);
}

SimulatedSequence simulate_sequence(const Raster& scene, const WaveParams& params, std::size_t frames,
                                    double refraction_index) {
  if (frames == 0) throw DomainError("simulate_sequence: need at least one frame");
  if (scene.width == 0 || scene.height == 0 || scene.channels == 0) {
    throw InputError("simulate_sequence: empty scene");
  }
  const WaveSurface surface(params);
  const RefractionConstants constants(refraction_index);
  const Grid grid(scene.width, scene.height);
  const std::size_t w = scene.width, h = scene.height;

  SimulatedSequence seq;
  seq.times = normalized_times(frames);

  double total = 0.0;
  for (double t : seq.times) {
    Raster hr(w, h, 1);
    for (std::size_t r = 0; r < h; ++r)
      for (std::size_t c = 0; c < w; ++c) {
        hr.at(r, c) = surface.height(grid.x1(c), grid.x2(r), t);
        total += hr.at(r, c);
      }
    seq.heights.push_back(std::move(hr));
  }
  seq.mean_height = total / static_cast<double>(w * h * frames);
  const double gain = constants.factor() * seq.mean_height;

  for (std::size_t f = 0; f < frames; ++f) {
    const double t = seq.times[f];
    Raster d(w, h, 2);
    std::vector<double> sample_at(2 * w * h);
    for (std::size_t r = 0; r < h; ++r) {
      for (std::size_t c = 0; c < w; ++c) {
        const auto g = surface.gradient(grid.x1(c), grid.x2(r), t);
        d.at(r, c, 0) = gain * g[0];
        d.at(r, c, 1) = gain * g[1];
        seq.max_distortion = std::max(seq.max_distortion, std::hypot(d.at(r, c, 0), d.at(r, c, 1)));
        const std::size_t p = r * w + c;
        sample_at[2 * p] = grid.x1(c) + d.at(r, c, 0);
        sample_at[2 * p + 1] = grid.x2(r) + d.at(r, c, 1);
      }
    }
    Raster frame(w, h, scene.channels);
    frame.data = bilinear_sample(scene, sample_at);
    seq.frames.push_back(std::move(frame));
    seq.distortions.push_back(std::move(d));
  }

  if (seq.max_distortion > kDistortionWarning) {
    std::ostringstream msg;
    msg << "max distortion " << seq.max_distortion << " exceeds " << kDistortionWarning
        << " normalized units; the small-slope refraction model is unreliable";
    seq.warnings.push_back(msg.str());
  }
  if (params.amplitude > 0.2 * params.base_height) {
    seq.warnings.push_back("amplitude is not small relative to the base height");
  }
  return seq;
}

Raster test_pattern(std::size_t width, std::size_t height) {
  const Grid grid(width, height);
  Raster img(width, height, 3);
  for (std::size_t r = 0; r < height; ++r) {
    for (std::size_t c = 0; c < width; ++c) {
      const double x = grid.x1(c), y = grid.x2(r);
      const double rings = std::sin(kTwoPi * 2.5 * std::hypot(x + 0.3, y - 0.2));
      const double stripes = std::sin(kTwoPi * 2.0 * (0.8 * x + 0.6 * y));
      const double grating = std::sin(kTwoPi * 1.5 * x) * std::cos(kTwoPi * 1.75 * y);
      const double blob = std::exp(-((x - 0.45) * (x - 0.45) + (y + 0.4) * (y + 0.4)) / 0.05);
      img.at(r, c, 0) = std::clamp(0.5 + 0.25 * rings + 0.15 * grating + 0.1 * blob, 0.0, 1.0);
      img.at(r, c, 1) = std::clamp(0.5 + 0.3 * stripes - 0.1 * blob, 0.0, 1.0);
      img.at(r, c, 2) = std::clamp(0.45 + 0.2 * grating - 0.15 * rings + 0.2 * blob, 0.0, 1.0);
    }
  }
  return img;
}

}  // namespace wf::wavesim
