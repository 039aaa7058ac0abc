#include "racf/spectral.hpp"

#include <unsupported/Eigen/FFT>

#include <cmath>
#include <numbers>

namespace racf {

namespace {

Eigen::FFT<double>& fft_engine() {
  // Eigen::FFT caches twiddle tables per length; one engine per thread.
  thread_local Eigen::FFT<double> engine;
  return engine;
}

void fft1(Eigen::VectorXcd& out, const Eigen::VectorXcd& in, bool inverse) {
  if (in.size() == 1) {
    out = in;
    return;
  }
  if (inverse)
    fft_engine().inv(out, in);
  else
    fft_engine().fwd(out, in);
}

void transform_columns(ComplexMatrix& m, bool inverse) {
  Eigen::VectorXcd in(m.rows()), out(m.rows());
  for (Index c = 0; c < m.cols(); ++c) {
    in = m.col(c);
    fft1(out, in, inverse);
    m.col(c) = out;
  }
}

void transform_rows(ComplexMatrix& m, bool inverse) {
  Eigen::VectorXcd in(m.cols()), out(m.cols());
  for (Index r = 0; r < m.rows(); ++r) {
    in = m.row(r).transpose();
    fft1(out, in, inverse);
    m.row(r) = out.transpose();
  }
}

}  // namespace

ComplexMatrix dft2(const ComplexMatrix& m) {
  if (m.rows() < 1 || m.cols() < 1) throw std::invalid_argument("dft2: empty input");
  if (!m.allFinite()) throw std::domain_error("dft2: non-finite input");
  ComplexMatrix out = m;
  transform_columns(out, false);
  transform_rows(out, false);
  return out;
}

ComplexMatrix dft2(const Eigen::MatrixXd& m) { return dft2(ComplexMatrix(m.cast<Complex>())); }

ComplexMatrix idft2_complex(const ComplexMatrix& m) {
  if (m.rows() < 1 || m.cols() < 1) throw std::invalid_argument("idft2: empty input");
  ComplexMatrix out = m;
  transform_columns(out, true);
  transform_rows(out, true);
  return out;
}

Eigen::MatrixXd idft2_real(const ComplexMatrix& m, double* max_imag) {
  const ComplexMatrix c = idft2_complex(m);
  const double imag = c.imag().cwiseAbs().maxCoeff();
  const double scale = std::max(1.0, c.real().cwiseAbs().maxCoeff());
  if (max_imag) *max_imag = imag;
  if (!(imag <= 1e-6 * scale)) throw std::domain_error("idft2: spectrum is not Hermitian (imaginary residue " + std::to_string(imag) + ")");
  return c.real();
}

SpectralTensor dft2(const FeatureTensor& t) {
  if (t.rows() < 1 || t.cols() < 1) throw std::invalid_argument("dft2: width and height must be >= 1");
  SpectralTensor out;
  for (Index d = 0; d < t.channels(); ++d) out.push_back(dft2(t[d]));
  return out;
}

FeatureTensor idft2(const SpectralTensor& s) {
  FeatureTensor out;
  for (Index d = 0; d < s.channels(); ++d) out.push_back(idft2_real(s[d]));
  return out;
}

ComplexMatrix dft_rows(const Eigen::MatrixXd& m) {
  if (!m.allFinite()) throw std::domain_error("dft_rows: non-finite input");
  ComplexMatrix out = m.cast<Complex>();
  transform_rows(out, false);
  return out;
}

ComplexMatrix idft_rows_complex(const ComplexMatrix& m) {
  ComplexMatrix out = m;
  transform_rows(out, true);
  return out;
}

Eigen::VectorXcd dft(const Eigen::VectorXd& v) {
  Eigen::VectorXcd in = v.cast<Complex>(), out(v.size());
  fft1(out, in, false);
  return out;
}

Eigen::VectorXd idft_real(const Eigen::VectorXcd& v, double* max_imag) {
  Eigen::VectorXcd in = v, out(v.size());
  fft1(out, in, true);
  if (max_imag) *max_imag = out.imag().cwiseAbs().maxCoeff();
  return out.real();
}

ComplexMatrix conj_product_sum(const SpectralTensor& a, const SpectralTensor& b) {
  a.check_shape(b, "conj_product_sum");
  ComplexMatrix out = ComplexMatrix::Zero(a.rows(), a.cols());
  for (Index d = 0; d < a.channels(); ++d) out += a[d].conjugate().cwiseProduct(b[d]);
  return out;
}

LabelMap gaussian_label(Index width, Index height, double sigma) {
  if (!(sigma > 0.0)) throw std::invalid_argument("gaussian_label: sigma must be positive");
  if (width < 1 || height < 1) throw std::invalid_argument("gaussian_label: empty grid");
  LabelMap label;
  label.data.resize(height, width);
  const double inv = 1.0 / (2.0 * sigma * sigma);
  for (Index c = 0; c < width; ++c) {
    const double dc = static_cast<double>(wrap_index(c, width));
    for (Index r = 0; r < height; ++r) {
      const double dr = static_cast<double>(wrap_index(r, height));
      label.data(r, c) = std::exp(-(dr * dr + dc * dc) * inv);
    }
  }
  return label;
}

FeatureTensor hann_window(Index width, Index height) {
  if (width < 1 || height < 1) throw std::invalid_argument("hann_window: empty grid");
  auto axis = [](Index k) {
    Eigen::VectorXd v(k);
    if (k == 1) {
      v[0] = 1.0;
      return v;
    }
    for (Index i = 0; i < k; ++i)
      v[i] = 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(k - 1)));
    return v;
  };
  FeatureTensor out;
  out.push_back(axis(height) * axis(width).transpose());
  return out;
}

FeatureTensor pad_filter(const FeatureTensor& f, Index full_width, Index full_height) {
  if (f.cols() > full_width || f.rows() > full_height)
    throw std::invalid_argument("pad_filter: support exceeds target extent");
  const Index r0 = support_offset(full_height, f.rows());
  const Index c0 = support_offset(full_width, f.cols());
  FeatureTensor out(full_height, full_width, f.channels());
  for (Index d = 0; d < f.channels(); ++d) out[d].block(r0, c0, f.rows(), f.cols()) = f[d];
  return out;
}

FeatureTensor crop_filter(const FeatureTensor& g, Index support_width, Index support_height) {
  if (support_width > g.cols() || support_height > g.rows() || support_width < 1 || support_height < 1)
    throw std::invalid_argument("crop_filter: invalid support");
  const Index r0 = support_offset(g.rows(), support_height);
  const Index c0 = support_offset(g.cols(), support_width);
  FeatureTensor out;
  for (Index d = 0; d < g.channels(); ++d) out.push_back(g[d].block(r0, c0, support_height, support_width));
  return out;
}

}  // namespace racf
