#include "racf/scale_filter.hpp"

#include "racf/features.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace racf {

void ScaleFilterConfig::validate() const {
  if (num_scales < 1 || num_scales % 2 == 0) throw std::invalid_argument("scale filter: num_scales must be odd and >= 1");
  if (!(step > 1.0)) throw std::invalid_argument("scale filter: step must exceed 1");
  if (!(sigma_factor > 0) || !(lambda > 0)) throw std::invalid_argument("scale filter: sigma_factor and lambda must be positive");
  if (learning_rate < 0 || learning_rate > 1) throw std::invalid_argument("scale filter: learning_rate must lie in [0, 1]");
  if (cell < 1 || !(max_template_area >= static_cast<double>(4 * cell * cell)))
    throw std::invalid_argument("scale filter: template area too small for the cell size");
  if (!(min_side >= 1.0)) throw std::invalid_argument("scale filter: min_side must be >= 1");
}

ScaleFilterState make_scale_filter(double base_width, double base_height, const ScaleFilterConfig& cfg) {
  cfg.validate();
  if (!(base_width > 0 && base_height > 0)) throw std::invalid_argument("make_scale_filter: degenerate base size");
  const int S = cfg.num_scales;
  const double centre = 0.5 * (S - 1);
  ScaleFilterState st;
  st.base_width = base_width;
  st.base_height = base_height;
  st.scale_factors.resize(S);
  Eigen::VectorXd label(S);
  const double sigma = cfg.sigma_factor * S;
  for (int i = 0; i < S; ++i) {
    const double off = i - centre;
    st.scale_factors[i] = std::pow(cfg.step, off);
    label[i] = std::exp(-0.5 * off * off / (sigma * sigma));
  }
  st.label_hat = dft(label);
  st.window = hann_window(S, 1)[0].row(0).transpose();

  double f = std::sqrt(cfg.max_template_area / (base_width * base_height));
  f = std::min(f, 1.0);
  const double min_px = 2.0 * static_cast<double>(cfg.cell);
  st.template_width = std::max<Index>(static_cast<Index>(std::floor(base_width * f)), static_cast<Index>(min_px));
  st.template_height = std::max<Index>(static_cast<Index>(std::floor(base_height * f)), static_cast<Index>(min_px));
  return st;
}

Eigen::MatrixXd scale_sample(const Image& frame, double cx, double cy, const ScaleFilterState& state,
                             const ScaleFilterConfig& cfg) {
  const Index S = state.scale_factors.size();
  Eigen::MatrixXd out;
  for (Index i = 0; i < S; ++i) {
    const double k = state.scale_factors[i] * state.current_scale;
    const double sw = std::max(1.0, k * state.base_width);
    const double sh = std::max(1.0, k * state.base_height);
    const Image patch = sample_patch(frame, cx, cy, sw, sh, state.template_width, state.template_height);
    const FeatureTensor hog = extract_hog(patch, cfg.cell);
    const Index per = hog.rows() * hog.cols();
    if (i == 0) out.resize(per * hog.channels(), S);
    for (Index d = 0; d < hog.channels(); ++d)
      out.col(i).segment(d * per, per) = Eigen::Map<const Eigen::VectorXd>(hog[d].data(), per);
  }
  if (S > 1) {
    // Remove each row's mean and linear trend over the scale axis.
    Eigen::RowVectorXd t(S);
    for (Index i = 0; i < S; ++i) t[i] = static_cast<double>(i) - 0.5 * static_cast<double>(S - 1);
    out.colwise() -= out.rowwise().mean();
    const Eigen::VectorXd slope = out * t.transpose() / t.squaredNorm();
    out -= slope * t;
  }
  out *= state.window.asDiagonal();
  return out;
}

void ssf_update(ScaleFilterState& state, const Eigen::MatrixXd& sample, double lr) {
  if (lr < 0 || lr > 1) throw std::invalid_argument("ssf_update: lr must lie in [0, 1]");
  const Index S = state.scale_factors.size();
  if (sample.cols() != S) throw std::invalid_argument("ssf_update: sample must have one column per scale");
  const ComplexMatrix x_hat = dft_rows(sample);
  const Eigen::RowVectorXcd y_conj = state.label_hat.conjugate().transpose();
  const ComplexMatrix num = x_hat.array().rowwise() * y_conj.array();
  const Eigen::VectorXd den = x_hat.cwiseAbs2().colwise().sum().transpose();
  if (!state.trained || state.numerator.rows() != sample.rows()) {
    state.numerator = ComplexMatrix::Zero(sample.rows(), S);
    state.denominator = Eigen::VectorXd::Zero(S);
  }
  state.numerator = (1.0 - lr) * state.numerator + lr * num;
  state.denominator = (1.0 - lr) * state.denominator + lr * den;
  state.trained = true;
}

ScaleEstimate ssf_estimate(const ScaleFilterState& state, const Eigen::MatrixXd& sample, const ScaleFilterConfig& cfg) {
  if (!state.trained) throw std::logic_error("ssf_estimate: scale filter not trained");
  const Index S = state.scale_factors.size();
  if (sample.cols() != S || sample.rows() != state.numerator.rows())
    throw std::invalid_argument("ssf_estimate: sample shape does not match the filter");
  ScaleEstimate est;
  est.scale = state.current_scale;
  const ComplexMatrix z_hat = dft_rows(sample);
  const Eigen::VectorXcd spec = (state.numerator.conjugate().cwiseProduct(z_hat)).colwise().sum().transpose();
  const Eigen::VectorXcd resp_hat = spec.array() / (state.denominator.array() + cfg.lambda);
  est.response = idft_real(resp_hat);
  if (!est.response.allFinite()) {
    est.degenerate = true;
    return est;
  }
  Index peak = 0;
  est.confidence = est.response.maxCoeff(&peak);
  const double lo = est.response.minCoeff();
  if (!(est.confidence - lo > 1e-12 * std::max(1.0, std::abs(est.confidence)))) {
    est.degenerate = S > 1;
    return est;
  }
  double sub = 0.0;
  if (peak > 0 && peak < S - 1) {
    const double l = est.response[peak - 1], m = est.response[peak], r = est.response[peak + 1];
    const double den = l - 2.0 * m + r;
    if (den < 0.0) sub = std::clamp(0.5 * (l - r) / den, -0.5, 0.5);
  }
  const double offset = static_cast<double>(peak) + sub - 0.5 * static_cast<double>(S - 1);
  est.multiplier = std::pow(cfg.step, offset);
  est.scale = state.current_scale * est.multiplier;
  return est;
}

double clamp_scale(double scale, const ScaleFilterState& state, double frame_width, double frame_height,
                   const ScaleFilterConfig& cfg) {
  const double lo = std::max(cfg.min_side / state.base_width, cfg.min_side / state.base_height);
  const double hi = std::min(frame_width / state.base_width, frame_height / state.base_height);
  if (lo > hi) return lo;
  return std::clamp(scale, lo, hi);
}

}  // namespace racf
