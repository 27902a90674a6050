#pragma once

#include <cstddef>

namespace wf::diff::kernels {

// out[m,n] = a[m,k] * b[k,n], all row-major. Every output entry is summed in
// increasing k regardless of m, so results do not depend on the batch size.
void gemm_rows(const double* a, const double* b, double* out, std::size_t m, std::size_t k,
               std::size_t n);

// y[m,out] = x[m,in] * w[out,in]^T + bias[out] (bias may be null), row by row
// through gemm_rows, so it is batch-invariant too.
void dense_forward(const double* x, const double* w, const double* bias, double* y, std::size_t m,
                   std::size_t in, std::size_t out);

// sums[n] += column sums of g[m,n]
void accumulate_column_sums(const double* g, double* sums, std::size_t m, std::size_t n);

// s[i] = sin(freq * x[i]) and, when c is not null, c[i] = cos(freq * x[i]).
// Results depend only on x[i], never on n or on i.
void sin_cos(const double* x, double freq, double* s, double* c, std::size_t n);

// grad_a[m,k] += grad_out[m,n] * b[k,n]^T
void accumulate_grad_lhs(const double* grad_out, const double* b, double* grad_a, std::size_t m,
                         std::size_t k, std::size_t n);

// grad_b[k,n] += a[m,k]^T * grad_out[m,n]
void accumulate_grad_rhs(const double* a, const double* grad_out, double* grad_b, std::size_t m,
                         std::size_t k, std::size_t n);

// grad_x[m,in] += grad_y[m,out] * w[out,in]
void accumulate_grad_input(const double* grad_y, const double* w, double* grad_x, std::size_t m,
                           std::size_t in, std::size_t out);

// grad_w[out,in] += grad_y[m,out]^T * x[m,in]
void accumulate_grad_weight(const double* grad_y, const double* x, double* grad_w, std::size_t m,
                            std::size_t in, std::size_t out);

}  // namespace wf::diff::kernels
