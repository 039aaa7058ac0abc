#pragma once

// Residue-aware correlation filter learned by ADMM.
//
// The filter f (support M_h x M_w, D channels) minimizes
//
//   1/2 ||y - sum_d x^d * P f^d||^2 + eta/2 ||sum_d delta^d * P f^d||^2
//     + theta/2 sum_d ||w . f^d||^2 + tau/2 sum_d ||f^d - f_prev^d||^2
//     + lambda/2 sum_d ||f^d||^2
//
// where * is circular cross-correlation on the N-support, P zero-pads to the
// N-support and delta = x_k - x_{k-1}. The splitting variable g_hat = F P f
// lives in the frequency domain; with the unnormalized DFT of spectral.hpp the
// per-bin g update, the dot-division f update and the multiplier update
// zeta_hat += mu (g_hat - f_hat) are exact minimizers / ascent steps for the
// augmented Lagrangian
//
//   1/N [ 1/2 ||y_hat - X g_hat||^2 + eta/2 ||Delta g_hat||^2
//         + Re zeta_hat^H (g_hat - f_hat) + mu/2 ||g_hat - f_hat||^2 ]
//     + theta/2 ||W f||^2 + tau/2 ||f - f_prev||^2 + lambda/2 ||f||^2.
//
// CoreConfig's mu0 / mu_max count per transform bin: the penalty handed to the
// subproblem solvers is mu * N, the scale at which BACF-style filters apply
// their penalty to the unnormalized transform.

#include "racf/features.hpp"
#include "racf/spectral.hpp"

#include <functional>

namespace racf {

struct CoreConfig {
  double eta = 1.0;      ///< residue penalty
  double theta = 0.5;    ///< spatial (bowl) penalty
  double tau = 0.01;     ///< temporal penalty
  double lambda = 0.55;  ///< ridge penalty
  double mu0 = 1.0;
  double beta = 10.0;
  double mu_max = 1e3;
  int admm_iters = 2;
  double alpha = 0.02;  ///< appearance-model learning rate

  void validate() const;
};

struct FilterState {
  Index support_width = 0;   ///< M_w
  Index support_height = 0;  ///< M_h
  FeatureTensor f;           ///< current filter, M support
  SpectralTensor g_hat;      ///< splitting variable, N support
  SpectralTensor zeta_hat;   ///< Lagrange multiplier, N support
  SpectralTensor x_model_hat;
  FeatureTensor f_prev;  ///< filter of the previous frame (empty before the first update)
  SpectralTensor prev_features_hat;
  int frames_learned = 0;

  bool initialized() const { return frames_learned > 0; }
};

/// Zero-filled state for an N-support of `full_width x full_height` with D channels.
FilterState make_filter_state(Index full_width, Index full_height, Index channels, Index support_width,
                              Index support_height);

SpectralTensor compute_residue(const SpectralTensor& x_hat, const SpectralTensor& x_hat_prev);

/// Dot-division filter update (mu g + zeta + tau f_prev) / (mu + lambda + tau + theta w^2),
/// with g and zeta the cropped inverse transforms of g_hat and zeta_hat.
/// An empty `f_prev` drops the temporal term.
FeatureTensor solve_f(const SpectralTensor& g_hat, const SpectralTensor& zeta_hat, const FeatureTensor& f_prev,
                      const SpatialWeight& w, double mu, const CoreConfig& cfg);

/// (mu I + eta delta delta^H)^{-1} v in O(D).
Eigen::VectorXcd a1_inverse_apply(const Eigen::VectorXcd& delta, const Eigen::VectorXcd& v, double mu, double eta);

/// Per-bin minimizer of
///   1/2 |y - x^H g|^2 + eta/2 |delta^H g|^2 + Re zeta^H (g - f) + mu/2 |g - f|^2,
/// i.e. (mu I + eta delta delta^H + x x^H)^{-1} (y x + mu f - zeta), via two
/// Sherman-Morrison steps.
Eigen::VectorXcd solve_g_bin(const Eigen::VectorXcd& x, const Eigen::VectorXcd& delta, const Eigen::VectorXcd& f,
                             const Eigen::VectorXcd& zeta, Complex y, double mu, double eta);

/// solve_g_bin over all N bins. An empty `residue_hat` means delta = 0.
SpectralTensor solve_g(const SpectralTensor& x_hat, const SpectralTensor& residue_hat, const SpectralTensor& f_hat,
                       const SpectralTensor& zeta_hat, const ComplexMatrix& y_hat, double mu, double eta);

SpectralTensor update_lagrangian(const SpectralTensor& zeta_hat, const SpectralTensor& g_hat,
                                 const SpectralTensor& f_hat, double mu);

SpectralTensor update_appearance(const SpectralTensor& x_model_hat, const SpectralTensor& x_hat_new, double alpha);

/// Inputs of one ADMM solve.
struct TrainingSample {
  SpectralTensor data_hat;     ///< x_hat entering the data term (the appearance model)
  SpectralTensor residue_hat;  ///< delta_hat; empty means zero
  ComplexMatrix label_hat;     ///< y_hat
};

/// State after one ADMM round, handed to an optional observer.
struct AdmmIterate {
  int iteration = 0;
  double mu = 0.0;  ///< penalty used in this round (already multiplied by N)
  const FeatureTensor* f = nullptr;
  const SpectralTensor* g_hat = nullptr;
  const SpectralTensor* f_hat = nullptr;
  const SpectralTensor* zeta_hat = nullptr;
};
using AdmmObserver = std::function<void(const AdmmIterate&)>;

/// cfg.admm_iters rounds of {g update, f update, multiplier update, mu <- min(mu_max, beta mu)},
/// warm-started from state.f / state.zeta_hat. The entry filter becomes f_prev
/// (the temporal anchor); before the first learned frame the temporal term is dropped.
FilterState admm_train(const TrainingSample& sample, FilterState state, const SpatialWeight& w, const CoreConfig& cfg,
                       const AdmmObserver& observer = {});

/// Frame-level learning: residue against the previous sample, appearance blend,
/// then admm_train on the model. The first call cold-starts (zero residue,
/// model = sample, zero multiplier).
void learn_frame(FilterState& state, const SpectralTensor& x_hat, const ComplexMatrix& y_hat, const SpatialWeight& w,
                 const CoreConfig& cfg);

struct ResponseMap {
  Eigen::MatrixXd data;
  Index peak_row = 0;
  Index peak_col = 0;
  double peak_value = 0.0;
};

struct Localization {
  ResponseMap response;
  /// Target displacement in cells (x = columns, y = rows). A target that moved
  /// by +d produces a response peak at -d; the displacement reported is +d.
  double dx = 0.0;
  double dy = 0.0;
  bool degenerate = false;
  double max_imag = 0.0;  ///< imaginary residue discarded by the inverse transform
};

/// Response R = idft2(sum_d conj(z_hat^d) .* g_hat^d), its wrapped integer
/// peak and a parabolic sub-cell refinement along each axis.
Localization localize(const SpectralTensor& g_hat, const SpectralTensor& z_hat);

}  // namespace racf
