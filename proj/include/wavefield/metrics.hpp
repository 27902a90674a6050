#pragma once

#include <optional>
#include <string>
#include <vector>

#include "wavefield/raster.hpp"

namespace wf::metrics {

inline constexpr double kPsnrCap = 100.0;

/// 10 log10(1 / MSE) over every sample, capped at 100 dB.
double psnr(const Raster& a, const Raster& b);

/// Rec. 601 luma of an RGB raster; single-channel input is returned as is.
Raster luma(const Raster& image);

/// Mean SSIM over all valid 11x11 windows (Gaussian weights, sigma 1.5) on luma,
/// dynamic range 1.
double ssim(const Raster& a, const Raster& b);

/// Centers pred on gt's mean over the whole sequence, flipping its sign first
/// when the centered correlation with gt is negative.
std::vector<Raster> gauge_align(const std::vector<Raster>& pred, const std::vector<Raster>& gt);

struct HeightErrors {
  double rmse = 0.0;
  double abs_rel = 0.0;
};

/// Aligns pred with gauge_align, then compares against gt (which must be > 0).
HeightErrors height_errors(const std::vector<Raster>& pred, const std::vector<Raster>& gt);

/// Per-frame Pearson r between two distortion sequences, pooling pixels and
/// components, after removing each sequence's per-component mean. nullopt
/// where either frame is constant.
std::vector<std::optional<double>> distortion_correlation(const std::vector<Raster>& pred,
                                                          const std::vector<Raster>& gt);

/// Median of the defined entries; nullopt if none are defined.
std::optional<double> median(const std::vector<std::optional<double>>& values);

struct EvalReport {
  double psnr = 0.0;
  double ssim = 0.0;
  std::optional<HeightErrors> height;
  std::vector<std::optional<double>> d_corr;

  std::string to_text() const;
};

}  // namespace wf::metrics
