#pragma once

// Discrete Fourier machinery shared by the translation and scale filters.
//
// Scaling convention: the forward transform is unnormalized and the inverse
// carries the 1/N factor, so idft2(dft2(t)) == t and
//   sum |dft2(t)|^2 == N * sum |t|^2        (Parseval, N = rows * cols).
// Under this convention idft2(conj(dft2(a)) .* dft2(b)) is the circular
// cross-correlation r(s) = sum_t a(t) b(t + s).

#include "racf/tensor.hpp"

namespace racf {

using ComplexMatrix = Eigen::MatrixXcd;

/// Per-channel 2-D DFT. Rejects non-finite input.
SpectralTensor dft2(const FeatureTensor& t);

/// Inverse of dft2. The imaginary part of every entry must be below 1e-6
/// (relative to the largest real magnitude, floored at 1) and is discarded.
FeatureTensor idft2(const SpectralTensor& s);

/// Single-channel variants.
ComplexMatrix dft2(const Eigen::MatrixXd& m);
ComplexMatrix dft2(const ComplexMatrix& m);
ComplexMatrix idft2_complex(const ComplexMatrix& m);
Eigen::MatrixXd idft2_real(const ComplexMatrix& m, double* max_imag = nullptr);

/// 1-D transforms along each row of `m` (rows are independent signals).
ComplexMatrix dft_rows(const Eigen::MatrixXd& m);
ComplexMatrix idft_rows_complex(const ComplexMatrix& m);
Eigen::VectorXcd dft(const Eigen::VectorXd& v);
Eigen::VectorXd idft_real(const Eigen::VectorXcd& v, double* max_imag = nullptr);

/// sum_d conj(a^d) .* b^d
ComplexMatrix conj_product_sum(const SpectralTensor& a, const SpectralTensor& b);

struct LabelMap {
  Eigen::MatrixXd data;  ///< rows = height
  Index peak_row = 0;
  Index peak_col = 0;
};

/// Gaussian response label with its peak at (0, 0) and circular wrap:
/// y(r, c) = exp(-(dr^2 + dc^2) / (2 sigma^2)), with dr, dc the wrapped offsets.
LabelMap gaussian_label(Index width, Index height, double sigma);

/// Separable raised cosine 0.5 (1 - cos(2 pi k / (K - 1))); a length-1 axis is 1.
FeatureTensor hann_window(Index width, Index height);

/// Offset of the M-support inside the N-support along one axis.
inline Index support_offset(Index full, Index support) { return (full - support) / 2; }

/// Embeds `f` (M_h x M_w) into a zero N_h x N_w tensor at the centered offset.
FeatureTensor pad_filter(const FeatureTensor& f, Index full_width, Index full_height);

/// Extracts the centered M_h x M_w region; the adjoint of pad_filter.
FeatureTensor crop_filter(const FeatureTensor& g, Index support_width, Index support_height);

/// Wrapped signed index: maps [0, n) onto [-(n-1)/2, n/2].
inline Index wrap_index(Index i, Index n) { return i > (n - 1) / 2 ? i - n : i; }

}  // namespace racf
