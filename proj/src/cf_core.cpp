#include "racf/cf_core.hpp"

#include <algorithm>
#include <cmath>

namespace racf {

void CoreConfig::validate() const {
  if (eta < 0 || theta < 0 || tau < 0 || lambda < 0) throw std::invalid_argument("CoreConfig: penalty weights must be >= 0");
  if (!(mu0 > 0) || beta < 1 || mu_max < mu0) throw std::invalid_argument("CoreConfig: need mu0 > 0, beta >= 1, mu_max >= mu0");
  if (admm_iters < 1) throw std::invalid_argument("CoreConfig: admm_iters must be >= 1");
  if (alpha < 0 || alpha > 1) throw std::invalid_argument("CoreConfig: alpha must lie in [0, 1]");
}

FilterState make_filter_state(Index full_width, Index full_height, Index channels, Index support_width,
                              Index support_height) {
  if (support_width < 1 || support_height < 1 || support_width > full_width || support_height > full_height)
    throw std::invalid_argument("make_filter_state: support must fit inside the full extent");
  FilterState s;
  s.support_width = support_width;
  s.support_height = support_height;
  s.f = FeatureTensor(support_height, support_width, channels);
  s.g_hat = SpectralTensor(full_height, full_width, channels);
  s.zeta_hat = SpectralTensor(full_height, full_width, channels);
  return s;
}

SpectralTensor compute_residue(const SpectralTensor& x_hat, const SpectralTensor& x_hat_prev) {
  x_hat.check_shape(x_hat_prev, "compute_residue");
  return x_hat - x_hat_prev;
}

FeatureTensor solve_f(const SpectralTensor& g_hat, const SpectralTensor& zeta_hat, const FeatureTensor& f_prev,
                      const SpatialWeight& w, double mu, const CoreConfig& cfg) {
  g_hat.check_shape(zeta_hat, "solve_f");
  if (!(mu > 0)) throw std::invalid_argument("solve_f: mu must be positive");
  const FeatureTensor g = idft2(g_hat);
  const FeatureTensor zeta = idft2(zeta_hat);
  const Index mh = w.rows(), mw = w.cols();
  const bool temporal = !f_prev.empty();
  if (temporal && (f_prev.rows() != mh || f_prev.cols() != mw || f_prev.channels() != g.channels()))
    throw std::invalid_argument("solve_f: f_prev shape mismatch");
  const double tau = temporal ? cfg.tau : 0.0;
  const Eigen::ArrayXXd denom = (mu + cfg.lambda + tau) + cfg.theta * w.array().square();
  const Index r0 = support_offset(g.rows(), mh), c0 = support_offset(g.cols(), mw);
  FeatureTensor f(mh, mw, g.channels());
  for (Index d = 0; d < g.channels(); ++d) {
    Eigen::ArrayXXd num = mu * g[d].block(r0, c0, mh, mw).array() + zeta[d].block(r0, c0, mh, mw).array();
    if (temporal) num += tau * f_prev[d].array();
    f[d] = (num / denom).matrix();
  }
  return f;
}

Eigen::VectorXcd a1_inverse_apply(const Eigen::VectorXcd& delta, const Eigen::VectorXcd& v, double mu, double eta) {
  const double dd = delta.squaredNorm();
  const Complex proj = delta.dot(v);  // delta^H v
  return (v - (eta * proj / (mu + eta * dd)) * delta) / mu;
}

Eigen::VectorXcd solve_g_bin(const Eigen::VectorXcd& x, const Eigen::VectorXcd& delta, const Eigen::VectorXcd& f,
                             const Eigen::VectorXcd& zeta, Complex y, double mu, double eta) {
  const Eigen::VectorXcd ax = a1_inverse_apply(delta, x, mu, eta);
  const Eigen::VectorXcd af = a1_inverse_apply(delta, f, mu, eta);
  const Eigen::VectorXcd az = a1_inverse_apply(delta, zeta, mu, eta);
  const double s = x.dot(ax).real();  // x^H A1^{-1} x >= 0
  const Complex omega = (y - mu * x.dot(af) + x.dot(az)) / (1.0 + s);
  return omega * ax + mu * af - az;
}

SpectralTensor solve_g(const SpectralTensor& x_hat, const SpectralTensor& residue_hat, const SpectralTensor& f_hat,
                       const SpectralTensor& zeta_hat, const ComplexMatrix& y_hat, double mu, double eta) {
  x_hat.check_shape(f_hat, "solve_g");
  x_hat.check_shape(zeta_hat, "solve_g");
  const bool has_residue = !residue_hat.empty();
  if (has_residue) x_hat.check_shape(residue_hat, "solve_g");
  if (y_hat.rows() != x_hat.rows() || y_hat.cols() != x_hat.cols()) throw std::invalid_argument("solve_g: label shape mismatch");
  if (!(mu > 0)) throw std::invalid_argument("solve_g: mu must be positive");

  const Index D = x_hat.channels();
  SpectralTensor g(x_hat.rows(), x_hat.cols(), D);
  Eigen::VectorXcd x(D), delta = Eigen::VectorXcd::Zero(D), f(D), z(D);
  for (Index c = 0; c < x_hat.cols(); ++c) {
    for (Index r = 0; r < x_hat.rows(); ++r) {
      for (Index d = 0; d < D; ++d) {
        x[d] = x_hat[d](r, c);
        f[d] = f_hat[d](r, c);
        z[d] = zeta_hat[d](r, c);
        if (has_residue) delta[d] = residue_hat[d](r, c);
      }
      Eigen::VectorXcd gb;
      if (has_residue && eta > 0) {
        gb = solve_g_bin(x, delta, f, z, y_hat(r, c), mu, eta);
      } else {
        // A1 = mu I: one Sherman-Morrison step.
        const double s = x.squaredNorm() / mu;
        const Complex omega = (y_hat(r, c) - x.dot(f) + x.dot(z) / mu) / (1.0 + s);
        gb = omega * x / mu + f - z / mu;
      }
      for (Index d = 0; d < D; ++d) g[d](r, c) = gb[d];
    }
  }
  return g;
}

SpectralTensor update_lagrangian(const SpectralTensor& zeta_hat, const SpectralTensor& g_hat,
                                 const SpectralTensor& f_hat, double mu) {
  zeta_hat.check_shape(g_hat, "update_lagrangian");
  zeta_hat.check_shape(f_hat, "update_lagrangian");
  SpectralTensor out = zeta_hat;
  for (Index d = 0; d < out.channels(); ++d) out[d] += mu * (g_hat[d] - f_hat[d]);
  return out;
}

SpectralTensor update_appearance(const SpectralTensor& x_model_hat, const SpectralTensor& x_hat_new, double alpha) {
  if (alpha < 0 || alpha > 1) throw std::invalid_argument("update_appearance: alpha must lie in [0, 1]");
  x_model_hat.check_shape(x_hat_new, "update_appearance");
  SpectralTensor out = x_model_hat;
  for (Index d = 0; d < out.channels(); ++d) out[d] = (1.0 - alpha) * x_model_hat[d] + alpha * x_hat_new[d];
  return out;
}

FilterState admm_train(const TrainingSample& sample, FilterState state, const SpatialWeight& w, const CoreConfig& cfg,
                       const AdmmObserver& observer) {
  cfg.validate();
  const Index N_w = sample.data_hat.cols(), N_h = sample.data_hat.rows(), D = sample.data_hat.channels();
  if (state.f.channels() != D || state.g_hat.rows() != N_h || state.g_hat.cols() != N_w)
    throw std::invalid_argument("admm_train: state does not match the sample");
  if (w.rows() != state.support_height || w.cols() != state.support_width)
    throw std::invalid_argument("admm_train: spatial weight does not match the filter support");

  // The filter entering this frame anchors the temporal term.
  FeatureTensor anchor;
  if (state.initialized()) anchor = state.f;

  SpectralTensor f_hat = dft2(pad_filter(state.f, N_w, N_h));
  const double bins = static_cast<double>(N_w * N_h);
  double mu = cfg.mu0 * bins;
  for (int it = 0; it < cfg.admm_iters; ++it) {
    state.g_hat = solve_g(sample.data_hat, sample.residue_hat, f_hat, state.zeta_hat, sample.label_hat, mu, cfg.eta);
    state.f = solve_f(state.g_hat, state.zeta_hat, anchor, w, mu, cfg);
    f_hat = dft2(pad_filter(state.f, N_w, N_h));
    state.zeta_hat = update_lagrangian(state.zeta_hat, state.g_hat, f_hat, mu);
    if (observer) observer(AdmmIterate{it, mu, &state.f, &state.g_hat, &f_hat, &state.zeta_hat});
    mu = std::min(cfg.mu_max * bins, cfg.beta * mu);
  }
  state.f_prev = std::move(anchor);
  return state;
}

void learn_frame(FilterState& state, const SpectralTensor& x_hat, const ComplexMatrix& y_hat, const SpatialWeight& w,
                 const CoreConfig& cfg) {
  TrainingSample sample;
  sample.label_hat = y_hat;
  if (!state.initialized()) {
    state.x_model_hat = x_hat;
  } else {
    sample.residue_hat = compute_residue(x_hat, state.prev_features_hat);
    state.x_model_hat = update_appearance(state.x_model_hat, x_hat, cfg.alpha);
  }
  sample.data_hat = state.x_model_hat;
  state = admm_train(sample, std::move(state), w, cfg);
  state.prev_features_hat = x_hat;
  ++state.frames_learned;
}

Localization localize(const SpectralTensor& g_hat, const SpectralTensor& z_hat) {
  g_hat.check_shape(z_hat, "localize");
  Localization loc;
  const ComplexMatrix spectrum = conj_product_sum(z_hat, g_hat);
  const ComplexMatrix full = idft2_complex(spectrum);
  loc.max_imag = full.imag().cwiseAbs().maxCoeff();
  auto& R = loc.response;
  R.data = full.real();
  R.peak_value = R.data.maxCoeff(&R.peak_row, &R.peak_col);
  if (!(R.data.cwiseAbs().maxCoeff() > 0.0) || !R.data.allFinite()) {
    loc.degenerate = true;
    return loc;
  }
  const Index H = R.data.rows(), W = R.data.cols();
  auto refine = [](double left, double mid, double right) {
    const double den = left - 2.0 * mid + right;
    if (!(den < 0.0)) return 0.0;
    return std::clamp(0.5 * (left - right) / den, -0.5, 0.5);
  };
  double sub_r = 0.0, sub_c = 0.0;
  if (H >= 3)
    sub_r = refine(R.data((R.peak_row + H - 1) % H, R.peak_col), R.peak_value, R.data((R.peak_row + 1) % H, R.peak_col));
  if (W >= 3)
    sub_c = refine(R.data(R.peak_row, (R.peak_col + W - 1) % W), R.peak_value, R.data(R.peak_row, (R.peak_col + 1) % W));
  loc.dy = -(static_cast<double>(wrap_index(R.peak_row, H)) + sub_r);
  loc.dx = -(static_cast<double>(wrap_index(R.peak_col, W)) + sub_c);
  return loc;
}

}  // namespace racf
