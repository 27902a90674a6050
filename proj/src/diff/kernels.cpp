#include "kernels.hpp"

#include <Eigen/Core>
#include <algorithm>
#include <vector>
#include <cmath>
#if defined(__AVX512F__)
#include <immintrin.h>
#endif

#if defined(__AVX512F__) && defined(WAVEFIELD_HAVE_MVEC)
// glibc's vector math library, 8 doubles per call.
extern "C" __m512d _ZGVeN8v_sin(__m512d);
extern "C" __m512d _ZGVeN8v_cos(__m512d);
#define WAVEFIELD_VECTOR_TRIG 1
#endif

namespace wf::diff::kernels {

namespace {
using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ConstMap = Eigen::Map<const RowMat>;
using MutMap = Eigen::Map<RowMat>;
}  // namespace

namespace {

// Each output entry is an fma chain over p = 0..k-1, whatever the blocking, so
// the block kernel and the edge loop produce identical bits.
#if defined(__AVX512F__)
// Named accumulators keep the 6x16 tile in registers.
inline void gemm_tile_6x16(const double* a, const double* b, double* out, std::size_t k, std::size_t n,
                           std::size_t row, std::size_t col) {
  const double* a0 = a + row * k;
  const double *a1 = a0 + k, *a2 = a1 + k, *a3 = a2 + k, *a4 = a3 + k, *a5 = a4 + k;
  __m512d c00 = _mm512_setzero_pd(), c01 = _mm512_setzero_pd(), c10 = _mm512_setzero_pd(),
          c11 = _mm512_setzero_pd(), c20 = _mm512_setzero_pd(), c21 = _mm512_setzero_pd(),
          c30 = _mm512_setzero_pd(), c31 = _mm512_setzero_pd(), c40 = _mm512_setzero_pd(),
          c41 = _mm512_setzero_pd(), c50 = _mm512_setzero_pd(), c51 = _mm512_setzero_pd();
  for (std::size_t p = 0; p < k; ++p) {
    const double* b_row = b + p * n + col;
    const __m512d b0 = _mm512_loadu_pd(b_row), b1 = _mm512_loadu_pd(b_row + 8);
    __m512d s = _mm512_set1_pd(a0[p]);
    c00 = _mm512_fmadd_pd(s, b0, c00);
    c01 = _mm512_fmadd_pd(s, b1, c01);
    s = _mm512_set1_pd(a1[p]);
    c10 = _mm512_fmadd_pd(s, b0, c10);
    c11 = _mm512_fmadd_pd(s, b1, c11);
    s = _mm512_set1_pd(a2[p]);
    c20 = _mm512_fmadd_pd(s, b0, c20);
    c21 = _mm512_fmadd_pd(s, b1, c21);
    s = _mm512_set1_pd(a3[p]);
    c30 = _mm512_fmadd_pd(s, b0, c30);
    c31 = _mm512_fmadd_pd(s, b1, c31);
    s = _mm512_set1_pd(a4[p]);
    c40 = _mm512_fmadd_pd(s, b0, c40);
    c41 = _mm512_fmadd_pd(s, b1, c41);
    s = _mm512_set1_pd(a5[p]);
    c50 = _mm512_fmadd_pd(s, b0, c50);
    c51 = _mm512_fmadd_pd(s, b1, c51);
  }
  double* o = out + row * n + col;
  _mm512_storeu_pd(o, c00);
  _mm512_storeu_pd(o + 8, c01);
  _mm512_storeu_pd(o + n, c10);
  _mm512_storeu_pd(o + n + 8, c11);
  _mm512_storeu_pd(o + 2 * n, c20);
  _mm512_storeu_pd(o + 2 * n + 8, c21);
  _mm512_storeu_pd(o + 3 * n, c30);
  _mm512_storeu_pd(o + 3 * n + 8, c31);
  _mm512_storeu_pd(o + 4 * n, c40);
  _mm512_storeu_pd(o + 4 * n + 8, c41);
  _mm512_storeu_pd(o + 5 * n, c50);
  _mm512_storeu_pd(o + 5 * n + 8, c51);
}

inline void gemm_tile_1x16(const double* a, const double* b, double* out, std::size_t k, std::size_t n,
                           std::size_t row, std::size_t col) {
  const double* a0 = a + row * k;
  __m512d c0 = _mm512_setzero_pd(), c1 = _mm512_setzero_pd();
  for (std::size_t p = 0; p < k; ++p) {
    const double* b_row = b + p * n + col;
    const __m512d s = _mm512_set1_pd(a0[p]);
    c0 = _mm512_fmadd_pd(s, _mm512_loadu_pd(b_row), c0);
    c1 = _mm512_fmadd_pd(s, _mm512_loadu_pd(b_row + 8), c1);
  }
  _mm512_storeu_pd(out + row * n + col, c0);
  _mm512_storeu_pd(out + row * n + col + 8, c1);
}
#else
template <std::size_t MR>
inline void gemm_tile(const double* a, const double* b, double* out, std::size_t k, std::size_t n,
                      std::size_t row, std::size_t col) {
  constexpr std::size_t NR = 16;
  double acc[MR][NR] = {};
  for (std::size_t p = 0; p < k; ++p) {
    const double* b_row = b + p * n + col;
    for (std::size_t r = 0; r < MR; ++r) {
      const double coeff = a[(row + r) * k + p];
      for (std::size_t j = 0; j < NR; ++j) acc[r][j] = std::fma(coeff, b_row[j], acc[r][j]);
    }
  }
  for (std::size_t r = 0; r < MR; ++r)
    for (std::size_t j = 0; j < NR; ++j) out[(row + r) * n + col + j] = acc[r][j];
}

inline void gemm_tile_6x16(const double* a, const double* b, double* out, std::size_t k, std::size_t n,
                           std::size_t row, std::size_t col) {
  gemm_tile<6>(a, b, out, k, n, row, col);
}

inline void gemm_tile_1x16(const double* a, const double* b, double* out, std::size_t k, std::size_t n,
                           std::size_t row, std::size_t col) {
  gemm_tile<1>(a, b, out, k, n, row, col);
}
#endif

inline void gemm_edge(const double* a, const double* b, double* out, std::size_t k, std::size_t n,
                      std::size_t row, std::size_t col) {
  double acc = 0.0;
  for (std::size_t p = 0; p < k; ++p) acc = std::fma(a[row * k + p], b[p * n + col], acc);
  out[row * n + col] = acc;
}

}  // namespace

void gemm_rows(const double* a, const double* b, double* out, std::size_t m, std::size_t k,
               std::size_t n) {
  constexpr std::size_t MR = 6, NR = 16;
  const std::size_t m_main = m - m % MR, n_main = n - n % NR;
  for (std::size_t i = 0; i < m_main; i += MR) {
    for (std::size_t j = 0; j < n_main; j += NR) gemm_tile_6x16(a, b, out, k, n, i, j);
    for (std::size_t r = i; r < i + MR; ++r)
      for (std::size_t j = n_main; j < n; ++j) gemm_edge(a, b, out, k, n, r, j);
  }
  for (std::size_t i = m_main; i < m; ++i) {
    for (std::size_t j = 0; j < n_main; j += NR) gemm_tile_1x16(a, b, out, k, n, i, j);
    for (std::size_t j = n_main; j < n; ++j) gemm_edge(a, b, out, k, n, i, j);
  }
}

void dense_forward(const double* x, const double* w, const double* bias, double* y, std::size_t m,
                   std::size_t in, std::size_t out) {
  std::vector<double> wt(in * out);
  for (std::size_t o = 0; o < out; ++o)
    for (std::size_t i = 0; i < in; ++i) wt[i * out + o] = w[o * in + i];
  gemm_rows(x, wt.data(), y, m, in, out);
  if (bias) {
    for (std::size_t r = 0; r < m; ++r) {
      double* row = y + r * out;
      for (std::size_t o = 0; o < out; ++o) row[o] += bias[o];
    }
  }
}

void accumulate_column_sums(const double* g, double* sums, std::size_t m, std::size_t n) {
  for (std::size_t r = 0; r < m; ++r)
    for (std::size_t c = 0; c < n; ++c) sums[c] += g[r * n + c];
}

void sin_cos(const double* x, double freq, double* s, double* c, std::size_t n) {
#if defined(WAVEFIELD_VECTOR_TRIG)
  const __m512d f = _mm512_set1_pd(freq);
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    const __m512d arg = _mm512_mul_pd(f, _mm512_loadu_pd(x + i));
    _mm512_storeu_pd(s + i, _ZGVeN8v_sin(arg));
    if (c) _mm512_storeu_pd(c + i, _ZGVeN8v_cos(arg));
  }
  if (i < n) {
    // The tail goes through the same vector routine so every element gets
    // the same bits wherever it sits.
    const auto rest = static_cast<unsigned>(n - i);
    const __mmask8 mask = static_cast<__mmask8>((1u << rest) - 1u);
    const __m512d arg = _mm512_mul_pd(f, _mm512_maskz_loadu_pd(mask, x + i));
    _mm512_mask_storeu_pd(s + i, mask, _ZGVeN8v_sin(arg));
    if (c) _mm512_mask_storeu_pd(c + i, mask, _ZGVeN8v_cos(arg));
  }
#else
  for (std::size_t i = 0; i < n; ++i) {
    const double arg = freq * x[i];
    s[i] = std::sin(arg);
    if (c) c[i] = std::cos(arg);
  }
#endif
}

// Reverse-pass products go through Eigen; single-threaded Eigen GEMM is
// deterministic, and batch invariance only matters for forward values.
void accumulate_grad_lhs(const double* grad_out, const double* b, double* grad_a, std::size_t m,
                         std::size_t k, std::size_t n) {
  const auto mi = static_cast<Eigen::Index>(m), ki = static_cast<Eigen::Index>(k),
             ni = static_cast<Eigen::Index>(n);
  MutMap(grad_a, mi, ki).noalias() += ConstMap(grad_out, mi, ni) * ConstMap(b, ki, ni).transpose();
}

void accumulate_grad_rhs(const double* a, const double* grad_out, double* grad_b, std::size_t m,
                         std::size_t k, std::size_t n) {
  const auto mi = static_cast<Eigen::Index>(m), ki = static_cast<Eigen::Index>(k),
             ni = static_cast<Eigen::Index>(n);
  MutMap(grad_b, ki, ni).noalias() += ConstMap(a, mi, ki).transpose() * ConstMap(grad_out, mi, ni);
}

void accumulate_grad_input(const double* grad_y, const double* w, double* grad_x, std::size_t m,
                           std::size_t in, std::size_t out) {
  const auto mi = static_cast<Eigen::Index>(m), ii = static_cast<Eigen::Index>(in),
             oi = static_cast<Eigen::Index>(out);
  MutMap(grad_x, mi, ii).noalias() += ConstMap(grad_y, mi, oi) * ConstMap(w, oi, ii);
}

void accumulate_grad_weight(const double* grad_y, const double* x, double* grad_w, std::size_t m,
                            std::size_t in, std::size_t out) {
  const auto mi = static_cast<Eigen::Index>(m), ii = static_cast<Eigen::Index>(in),
             oi = static_cast<Eigen::Index>(out);
  MutMap(grad_w, oi, ii).noalias() += ConstMap(grad_y, mi, oi).transpose() * ConstMap(x, mi, ii);
}

}  // namespace wf::diff::kernels
