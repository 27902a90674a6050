#include "wavefield/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "wavefield/errors.hpp"

namespace wf::metrics {

namespace {

constexpr std::size_t kWindow = 11;
constexpr double kSigma = 1.5;
constexpr double kC1 = 0.01 * 0.01;
constexpr double kC2 = 0.03 * 0.03;

void require_same_shape(const Raster& a, const Raster& b, const char* what) {
  if (!a.same_shape(b)) {
    throw InputError(std::string(what) + ": shape mismatch " + std::to_string(a.width) + "x" +
                     std::to_string(a.height) + "x" + std::to_string(a.channels) + " vs " + std::to_string(b.width) +
                     "x" + std::to_string(b.height) + "x" + std::to_string(b.channels));
  }
}

void require_same_sequence(const std::vector<Raster>& a, const std::vector<Raster>& b, const char* what) {
  if (a.size() != b.size()) {
    throw InputError(std::string(what) + ": " + std::to_string(a.size()) + " frames vs " + std::to_string(b.size()));
  }
  if (a.empty()) throw InputError(std::string(what) + ": empty sequence");
  for (std::size_t i = 0; i < a.size(); ++i) require_same_shape(a[i], b[i], what);
}

std::vector<double> gaussian_taps() {
  std::vector<double> w(kWindow);
  const double c = static_cast<double>(kWindow / 2);
  double sum = 0.0;
  for (std::size_t i = 0; i < kWindow; ++i) {
    const double x = static_cast<double>(i) - c;
    w[i] = std::exp(-x * x / (2.0 * kSigma * kSigma));
    sum += w[i];
  }
  for (double& v : w) v /= sum;
  return w;
}

// Valid-mode separable filter of a single-channel image; output is
// (W - 10) x (H - 10), row-major.
std::vector<double> filter_valid(const std::vector<double>& img, std::size_t w, std::size_t h,
                                 const std::vector<double>& taps) {
  const std::size_t ow = w - kWindow + 1, oh = h - kWindow + 1;
  std::vector<double> horiz(h * ow, 0.0);
  for (std::size_t r = 0; r < h; ++r)
    for (std::size_t c = 0; c < ow; ++c) {
      double s = 0.0;
      for (std::size_t k = 0; k < kWindow; ++k) s += taps[k] * img[r * w + c + k];
      horiz[r * ow + c] = s;
    }
  std::vector<double> out(oh * ow, 0.0);
  for (std::size_t r = 0; r < oh; ++r)
    for (std::size_t c = 0; c < ow; ++c) {
      double s = 0.0;
      for (std::size_t k = 0; k < kWindow; ++k) s += taps[k] * horiz[(r + k) * ow + c];
      out[r * ow + c] = s;
    }
  return out;
}

double sequence_mean(const std::vector<Raster>& seq) {
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& r : seq) {
    for (double v : r.data) sum += v;
    n += r.data.size();
  }
  return sum / static_cast<double>(n);
}

}  // namespace

double psnr(const Raster& a, const Raster& b) {
  require_same_shape(a, b, "psnr");
  if (a.data.empty()) throw InputError("psnr: empty image");
  double sum = 0.0;
  for (std::size_t i = 0; i < a.data.size(); ++i) {
    const double d = a.data[i] - b.data[i];
    sum += d * d;
  }
  const double mse = sum / static_cast<double>(a.data.size());
  if (mse < 1e-10) return kPsnrCap;
  return std::min(kPsnrCap, 10.0 * std::log10(1.0 / mse));
}

Raster luma(const Raster& image) {
  if (image.channels == 1) return image;
  if (image.channels != 3) throw InputError("luma: expected 1 or 3 channels, got " + std::to_string(image.channels));
  Raster y(image.width, image.height, 1);
  for (std::size_t p = 0; p < image.pixel_count(); ++p) {
    y.data[p] = 0.299 * image.data[3 * p] + 0.587 * image.data[3 * p + 1] + 0.114 * image.data[3 * p + 2];
  }
  return y;
}

double ssim(const Raster& a, const Raster& b) {
  require_same_shape(a, b, "ssim");
  if (a.width < kWindow || a.height < kWindow) {
    throw InputError("ssim: image " + std::to_string(a.width) + "x" + std::to_string(a.height) +
                     " is smaller than the 11x11 window");
  }
  const Raster ya = luma(a), yb = luma(b);
  const std::size_t w = a.width, h = a.height, n = w * h;
  std::vector<double> aa(n), bb(n), ab(n);
  for (std::size_t i = 0; i < n; ++i) {
    aa[i] = ya.data[i] * ya.data[i];
    bb[i] = yb.data[i] * yb.data[i];
    ab[i] = ya.data[i] * yb.data[i];
  }
  const auto taps = gaussian_taps();
  const auto mu_a = filter_valid(ya.data, w, h, taps);
  const auto mu_b = filter_valid(yb.data, w, h, taps);
  const auto e_aa = filter_valid(aa, w, h, taps);
  const auto e_bb = filter_valid(bb, w, h, taps);
  const auto e_ab = filter_valid(ab, w, h, taps);
  double total = 0.0;
  for (std::size_t i = 0; i < mu_a.size(); ++i) {
    const double va = e_aa[i] - mu_a[i] * mu_a[i];
    const double vb = e_bb[i] - mu_b[i] * mu_b[i];
    const double cov = e_ab[i] - mu_a[i] * mu_b[i];
    const double num = (2.0 * mu_a[i] * mu_b[i] + kC1) * (2.0 * cov + kC2);
    const double den = (mu_a[i] * mu_a[i] + mu_b[i] * mu_b[i] + kC1) * (va + vb + kC2);
    total += num / den;
  }
  return total / static_cast<double>(mu_a.size());
}

std::vector<Raster> gauge_align(const std::vector<Raster>& pred, const std::vector<Raster>& gt) {
  require_same_sequence(pred, gt, "gauge_align");
  const double mp = sequence_mean(pred), mg = sequence_mean(gt);
  double cross = 0.0;
  for (std::size_t f = 0; f < pred.size(); ++f)
    for (std::size_t i = 0; i < pred[f].data.size(); ++i) cross += (pred[f].data[i] - mp) * (gt[f].data[i] - mg);
  const double sign = cross < 0.0 ? -1.0 : 1.0;
  std::vector<Raster> out = pred;
  for (auto& r : out)
    for (double& v : r.data) v = sign * (v - mp) + mg;
  return out;
}

HeightErrors height_errors(const std::vector<Raster>& pred, const std::vector<Raster>& gt) {
  require_same_sequence(pred, gt, "height_errors");
  for (const auto& r : gt)
    for (double v : r.data)
      if (!(v > 0.0)) throw InputError("height_errors: ground-truth height must be positive everywhere");
  const auto aligned = gauge_align(pred, gt);
  double sq = 0.0, rel = 0.0;
  std::size_t n = 0;
  for (std::size_t f = 0; f < gt.size(); ++f)
    for (std::size_t i = 0; i < gt[f].data.size(); ++i) {
      const double d = aligned[f].data[i] - gt[f].data[i];
      sq += d * d;
      rel += std::abs(d) / gt[f].data[i];
      ++n;
    }
  return {std::sqrt(sq / static_cast<double>(n)), rel / static_cast<double>(n)};
}

std::vector<std::optional<double>> distortion_correlation(const std::vector<Raster>& pred,
                                                          const std::vector<Raster>& gt) {
  require_same_sequence(pred, gt, "distortion_correlation");
  const std::size_t ch = gt.front().channels;
  for (std::size_t f = 0; f < gt.size(); ++f) {
    if (gt[f].channels != ch) throw InputError("distortion_correlation: channel count changes between frames");
  }
  auto channel_means = [ch](const std::vector<Raster>& seq) {
    std::vector<double> mean(ch, 0.0);
    std::size_t count = 0;
    for (const auto& r : seq) {
      for (std::size_t p = 0; p < r.pixel_count(); ++p)
        for (std::size_t c = 0; c < ch; ++c) mean[c] += r.data[p * ch + c];
      count += r.pixel_count();
    }
    for (double& m : mean) m /= static_cast<double>(count);
    return mean;
  };
  const auto mp = channel_means(pred), mg = channel_means(gt);
  auto constant = [](const Raster& r) {
    return std::all_of(r.data.begin(), r.data.end(), [&](double v) { return v == r.data.front(); });
  };
  std::vector<std::optional<double>> out;
  for (std::size_t f = 0; f < gt.size(); ++f) {
    if (constant(pred[f]) || constant(gt[f])) {
      out.emplace_back(std::nullopt);
      continue;
    }
    const std::size_t n = gt[f].data.size();
    std::vector<double> p(n), q(n);
    double sp = 0.0, sq = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      p[i] = pred[f].data[i] - mp[i % ch];
      q[i] = gt[f].data[i] - mg[i % ch];
      sp += p[i];
      sq += q[i];
    }
    sp /= static_cast<double>(n);
    sq /= static_cast<double>(n);
    double pq = 0.0, pp = 0.0, qq = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      pq += (p[i] - sp) * (q[i] - sq);
      pp += (p[i] - sp) * (p[i] - sp);
      qq += (q[i] - sq) * (q[i] - sq);
    }
    out.emplace_back(pp > 0.0 && qq > 0.0 ? std::optional<double>(pq / std::sqrt(pp * qq)) : std::nullopt);
  }
  return out;
}

std::optional<double> median(const std::vector<std::optional<double>>& values) {
  std::vector<double> v;
  for (const auto& x : values)
    if (x) v.push_back(*x);
  if (v.empty()) return std::nullopt;
  std::sort(v.begin(), v.end());
  const std::size_t mid = v.size() / 2;
  return v.size() % 2 == 1 ? v[mid] : 0.5 * (v[mid - 1] + v[mid]);
}

std::string EvalReport::to_text() const {
  std::string out;
  out += "# ssim is computed on Rec. 601 luma with an 11x11 Gaussian window (sigma 1.5)\n";
  out += "# lpips is not computed\n";
  char line[128];
  auto put = [&](const char* key, double value) {
    std::snprintf(line, sizeof line, "%s = %.10g\n", key, value);
    out += line;
  };
  put("psnr", psnr);
  put("ssim", ssim);
  if (height) {
    put("height_rmse", height->rmse);
    put("height_abs_rel", height->abs_rel);
  }
  if (!d_corr.empty()) {
    const auto m = median(d_corr);
    if (m) {
      put("d_corr_median", *m);
    } else {
      out += "d_corr_median = undefined\n";
    }
    std::string frames = "d_corr_frames =";
    for (const auto& r : d_corr) {
      if (r) {
        std::snprintf(line, sizeof line, " %.10g", *r);
        frames += line;
      } else {
        frames += " undefined";
      }
    }
    out += frames + "\n";
  }
  return out;
}

}  // namespace wf::metrics
