#include <doctest.h>

#include "oracles.hpp"
#include "racf/cf_core.hpp"

#include <random>

using namespace racf;

namespace {

double max_abs(const SpectralTensor& a, const SpectralTensor& b) { return (a - b).max_abs(); }
double max_abs(const FeatureTensor& a, const FeatureTensor& b) { return (a - b).max_abs(); }

SpectralTensor random_spectrum(Index h, Index w, Index d, std::mt19937_64& rng) {
  return dft2(oracle::random_tensor(h, w, d, rng));
}

// Solves A v = b with A = mu I + eta delta delta^H by dense inversion.
Eigen::VectorXcd dense_a1_solve(const Eigen::VectorXcd& delta, const Eigen::VectorXcd& v, double mu, double eta) {
  const Index D = delta.size();
  const Eigen::MatrixXcd A = mu * Eigen::MatrixXcd::Identity(D, D) + eta * delta * delta.adjoint();
  return A.inverse() * v;
}

Eigen::VectorXcd dense_g_solve(const Eigen::VectorXcd& x, const Eigen::VectorXcd& delta, const Eigen::VectorXcd& f,
                               const Eigen::VectorXcd& zeta, Complex y, double mu, double eta) {
  const Index D = x.size();
  const Eigen::MatrixXcd A =
      mu * Eigen::MatrixXcd::Identity(D, D) + eta * delta * delta.adjoint() + x * x.adjoint();
  return A.fullPivLu().solve(y * x + mu * f - zeta);
}

}  // namespace

TEST_CASE("compute_residue") {
  std::mt19937_64 rng(1);
  const FeatureTensor a = oracle::random_tensor(6, 5, 2, rng), b = oracle::random_tensor(6, 5, 2, rng);
  const SpectralTensor ah = dft2(a), bh = dft2(b);
  CHECK(compute_residue(ah, ah).max_abs() == 0.0);
  CHECK(max_abs(compute_residue(ah, SpectralTensor(6, 5, 2)), ah) == 0.0);
  CHECK(max_abs(compute_residue(ah, bh), dft2(a - b)) < 1e-9);
  CHECK_THROWS(compute_residue(ah, SpectralTensor(5, 5, 2)));
}

TEST_CASE("solve_f closed forms") {
  std::mt19937_64 rng(2);
  CoreConfig cfg;
  cfg.theta = 0.0;
  cfg.tau = 0.0;
  const Index N = 8, M = 4;
  const SpatialWeight w = make_spatial_weight(M, M, 2, 2, 1.5);
  const SpectralTensor g_hat = random_spectrum(N, N, 2, rng);
  const SpectralTensor zero(N, N, 2);
  const double mu = 3.0;
  const FeatureTensor f = solve_f(g_hat, zero, FeatureTensor(), w, mu, cfg);
  const FeatureTensor g = crop_filter(idft2(g_hat), M, M);
  CHECK(max_abs(f, g * (mu / (mu + cfg.lambda))) < 1e-12);

  // Unit spatial g: every cell of f equals 1 / 1.56.
  CoreConfig c2;
  c2.theta = 0.0;
  c2.lambda = 0.55;
  c2.tau = 0.01;
  FeatureTensor ones(N, N, 1);
  ones[0].setOnes();
  const FeatureTensor f1 = solve_f(dft2(ones), SpectralTensor(N, N, 1), FeatureTensor(M, M, 1),
                                   make_spatial_weight(M, M, 2, 2, 1.5), 1.0, c2);
  CHECK(std::abs(f1[0].minCoeff() - 1.0 / 1.56) < 1e-12);
  CHECK(std::abs(f1[0].maxCoeff() - 1.0 / 1.56) < 1e-12);
  CHECK(f1[0](0, 0) == doctest::Approx(0.641).epsilon(1e-3));
  CHECK_THROWS(solve_f(g_hat, zero, FeatureTensor(), w, 0.0, cfg));
}

TEST_CASE("solve_f minimizes the filter subproblem (dense quadratic oracle)") {
  std::mt19937_64 rng(3);
  CoreConfig cfg;
  cfg.theta = 0.7;
  cfg.tau = 0.2;
  cfg.lambda = 0.4;
  const Index N = 8, M = 5, D = 2;
  const double mu = 1.7;
  const SpatialWeight w = make_spatial_weight(M, M, 3, 2, 1.5);
  const SpectralTensor g_hat = random_spectrum(N, N, D, rng), zeta_hat = random_spectrum(N, N, D, rng);
  const FeatureTensor f_prev = oracle::random_tensor(M, M, D, rng);
  const FeatureTensor g = oracle::naive_idft2_real(g_hat), zeta = oracle::naive_idft2_real(zeta_hat);

  // Spatial form of the subproblem: penalties plus zeta^T (g - P f) + mu/2 ||g - P f||^2.
  auto J = [&](const Eigen::VectorXd& v) {
    FeatureTensor f(M, M, D);
    for (Index i = 0; i < v.size(); ++i) f[i / (M * M)](i % M, (i / M) % M) = v[i];
    const FeatureTensor pf = pad_filter(f, N, N);
    double e = 0.0;
    for (Index d = 0; d < D; ++d) {
      e += 0.5 * cfg.theta * w.cwiseProduct(f[d]).squaredNorm();
      e += 0.5 * cfg.tau * (f[d] - f_prev[d]).squaredNorm();
      e += 0.5 * cfg.lambda * f[d].squaredNorm();
      e += zeta[d].cwiseProduct(g[d] - pf[d]).sum();
      e += 0.5 * mu * (g[d] - pf[d]).squaredNorm();
    }
    return e;
  };
  const Index n = M * M * D;
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(n);
  const double j0 = J(zero);
  Eigen::MatrixXd Hs(n, n);
  Eigen::VectorXd b(n), ji(n);
  for (Index i = 0; i < n; ++i) ji[i] = J(Eigen::VectorXd::Unit(n, i));
  for (Index i = 0; i < n; ++i) {
    b[i] = 0.5 * (ji[i] - J(-Eigen::VectorXd::Unit(n, i)));
    for (Index j = i; j < n; ++j) {
      Hs(i, j) = J(Eigen::VectorXd::Unit(n, i) + Eigen::VectorXd::Unit(n, j)) - ji[i] - ji[j] + j0;
      Hs(j, i) = Hs(i, j);
    }
  }
  const Eigen::VectorXd opt = Hs.ldlt().solve(-b);
  const FeatureTensor f = solve_f(g_hat, zeta_hat, f_prev, w, mu, cfg);
  double err = 0.0;
  for (Index i = 0; i < n; ++i) err = std::max(err, std::abs(f[i / (M * M)](i % M, (i / M) % M) - opt[i]));
  CHECK(err < 1e-8);
}

TEST_CASE("a1_inverse_apply") {
  std::mt19937_64 rng(4);
  const Eigen::VectorXcd v = oracle::random_cvec(5, rng);
  CHECK((a1_inverse_apply(Eigen::VectorXcd::Zero(5), v, 2.0, 1.0) - v / 2.0).norm() < 1e-14);
  const Eigen::VectorXcd delta = oracle::random_cvec(5, rng);
  const double mu = 1.3, eta = 0.8;
  CHECK((a1_inverse_apply(delta, delta, mu, eta) - delta / (mu + eta * delta.squaredNorm())).norm() < 1e-12);
  for (int k = 0; k < 50; ++k) {
    const Eigen::VectorXcd dd = oracle::random_cvec(6, rng), vv = oracle::random_cvec(6, rng);
    CHECK((a1_inverse_apply(dd, vv, mu, eta) - dense_a1_solve(dd, vv, mu, eta)).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("solve_g_bin") {
  std::mt19937_64 rng(5);
  SUBCASE("no data term: consensus") {
    const Eigen::VectorXcd f = oracle::random_cvec(4, rng);
    const Eigen::VectorXcd z = Eigen::VectorXcd::Zero(4);
    CHECK((solve_g_bin(z, z, f, z, Complex(0.3, 0.1), 2.0, 1.0) - f).norm() < 1e-14);
  }
  SUBCASE("scalar channel without residue") {
    for (int k = 0; k < 20; ++k) {
      const Eigen::VectorXcd x = oracle::random_cvec(1, rng), f = oracle::random_cvec(1, rng),
                             z = oracle::random_cvec(1, rng), y = oracle::random_cvec(1, rng);
      const double mu = 0.5 + k;
      const Complex expect = (y[0] * x[0] + mu * f[0] - z[0]) / (mu + std::norm(x[0]));
      CHECK(std::abs(solve_g_bin(x, Eigen::VectorXcd::Zero(1), f, z, y[0], mu, 1.0)[0] - expect) < 1e-12);
    }
  }
  SUBCASE("dense oracle, D = 8") {
    for (int k = 0; k < 50; ++k) {
      const Eigen::VectorXcd x = oracle::random_cvec(8, rng), d = oracle::random_cvec(8, rng),
                             f = oracle::random_cvec(8, rng), z = oracle::random_cvec(8, rng);
      const Complex y = oracle::random_cvec(1, rng)[0];
      const double mu = 0.3 + 0.1 * k, eta = 0.5;
      CHECK((solve_g_bin(x, d, f, z, y, mu, eta) - dense_g_solve(x, d, f, z, y, mu, eta)).cwiseAbs().maxCoeff() <
            1e-8);
    }
  }
}

TEST_CASE("solve_g_bin fidelity over 1000 random bins") {
  std::mt19937_64 rng(6);
  std::uniform_int_distribution<int> dim(1, 16);
  std::uniform_real_distribution<double> u(0.05, 5.0);
  double worst = 0.0;
  for (int k = 0; k < 1000; ++k) {
    const Index D = dim(rng);
    const Eigen::VectorXcd x = oracle::random_cvec(D, rng), d = oracle::random_cvec(D, rng),
                           f = oracle::random_cvec(D, rng), z = oracle::random_cvec(D, rng);
    const Complex y = oracle::random_cvec(1, rng)[0];
    const double mu = u(rng), eta = u(rng);
    worst = std::max(worst,
                     (solve_g_bin(x, d, f, z, y, mu, eta) - dense_g_solve(x, d, f, z, y, mu, eta)).cwiseAbs().maxCoeff());
  }
  CHECK(worst < 1e-8);
}

TEST_CASE("solve_g matches solve_g_bin per bin, with and without residue") {
  std::mt19937_64 rng(7);
  const Index H = 4, W = 5, D = 3;
  const SpectralTensor x = random_spectrum(H, W, D, rng), r = random_spectrum(H, W, D, rng),
                       f = random_spectrum(H, W, D, rng), z = random_spectrum(H, W, D, rng);
  const ComplexMatrix y = dft2(oracle::random_tensor(H, W, 1, rng)[0]);
  const double mu = 2.5, eta = 0.7;
  for (const bool residue : {true, false}) {
    const SpectralTensor g = solve_g(x, residue ? r : SpectralTensor(), f, z, y, mu, eta);
    for (Index row = 0; row < H; ++row)
      for (Index col = 0; col < W; ++col) {
        Eigen::VectorXcd xv(D), rv = Eigen::VectorXcd::Zero(D), fv(D), zv(D), gv(D);
        for (Index d = 0; d < D; ++d) {
          xv[d] = x[d](row, col);
          if (residue) rv[d] = r[d](row, col);
          fv[d] = f[d](row, col);
          zv[d] = z[d](row, col);
          gv[d] = g[d](row, col);
        }
        CHECK((gv - dense_g_solve(xv, rv, fv, zv, y(row, col), mu, eta)).cwiseAbs().maxCoeff() < 1e-9);
      }
  }
}

TEST_CASE("update_lagrangian") {
  std::mt19937_64 rng(8);
  const SpectralTensor z = random_spectrum(5, 4, 2, rng), g = random_spectrum(5, 4, 2, rng),
                       f = random_spectrum(5, 4, 2, rng);
  CHECK(max_abs(update_lagrangian(z, g, g, 3.0), z) == 0.0);
  CHECK(max_abs(update_lagrangian(z, g, f, 0.0), z) == 0.0);
  const SpectralTensor out = update_lagrangian(z, g, f, 1.5);
  for (Index d = 0; d < 2; ++d)
    for (Index c = 0; c < 4; ++c)
      for (Index r = 0; r < 5; ++r) {
        const Complex expect(z[d](r, c).real() + 1.5 * (g[d](r, c).real() - f[d](r, c).real()),
                             z[d](r, c).imag() + 1.5 * (g[d](r, c).imag() - f[d](r, c).imag()));
        CHECK(std::abs(out[d](r, c) - expect) < 1e-12);
      }
}

TEST_CASE("update_appearance") {
  std::mt19937_64 rng(9);
  const SpectralTensor a = random_spectrum(4, 4, 2, rng), b = random_spectrum(4, 4, 2, rng);
  CHECK(max_abs(update_appearance(a, b, 0.0), a) == 0.0);
  CHECK(max_abs(update_appearance(a, b, 1.0), b) == 0.0);
  const SpectralTensor m = update_appearance(a, b, 0.5);
  for (Index d = 0; d < 2; ++d) CHECK((m[d] - 0.5 * (a[d] + b[d])).cwiseAbs().maxCoeff() < 1e-12);
  CHECK_THROWS(update_appearance(a, b, 1.5));
}

TEST_CASE("admm_train without residue, spatial or temporal terms is the background-aware filter") {
  std::mt19937_64 rng(10);
  CoreConfig cfg;
  cfg.eta = cfg.theta = cfg.tau = 0.0;
  const Index N = 12, M = 6, D = 2;
  const FeatureTensor x = oracle::random_tensor(N, N, D, rng);
  const ComplexMatrix y = dft2(gaussian_label(N, N, 1.0).data);
  TrainingSample s{dft2(x), SpectralTensor(), y};
  const SpatialWeight w = make_spatial_weight(M, M, M, M, 1.5);
  for (const int iters : {1, 2, 4}) {
    cfg.admm_iters = iters;
    const FilterState out = admm_train(s, make_filter_state(N, N, D, M, M), w, cfg);
    const FeatureTensor ref = oracle::bacf_reference(s.data_hat, y, M, M, cfg);
    CHECK(max_abs(out.f, ref) < 1e-7 * std::max(1.0, ref.max_abs()));
  }

  // The training patch answers with its peak at the label peak.
  cfg.admm_iters = 2;
  const FilterState out = admm_train(s, make_filter_state(N, N, D, M, M), w, cfg);
  const Localization loc = localize(dft2(pad_filter(out.f, N, N)), s.data_hat);
  CHECK(loc.response.peak_row == 0);
  CHECK(loc.response.peak_col == 0);
}

TEST_CASE("a zero residue makes eta irrelevant") {
  std::mt19937_64 rng(11);
  const Index N = 16, M = 8, D = 3;
  const FeatureTensor x = oracle::random_tensor(N, N, D, rng);
  const ComplexMatrix y = dft2(gaussian_label(N, N, 1.5).data);
  TrainingSample s{dft2(x), compute_residue(dft2(x), dft2(x)), y};
  const SpatialWeight w = make_spatial_weight(M, M, M, M, 1.5);
  CoreConfig with_eta, no_eta;
  with_eta.eta = 3.0;
  no_eta.eta = 0.0;
  FilterState start = make_filter_state(N, N, D, M, M);
  start.f = oracle::random_tensor(M, M, D, rng, 0.1);
  start.frames_learned = 1;
  const FilterState a = admm_train(s, start, w, with_eta), b = admm_train(s, start, w, no_eta);
  CHECK(max_abs(a.f, b.f) < 1e-8);
  CHECK(max_abs(a.zeta_hat, b.zeta_hat) < 1e-8 * std::max(1.0, a.zeta_hat.max_abs()));
}

TEST_CASE("admm_train keeps the entry filter as the temporal anchor") {
  std::mt19937_64 rng(12);
  CoreConfig cfg;
  oracle::WarmProblem p = oracle::warm_problem(rng, cfg, 16, 8, 2, 3);
  const FeatureTensor entry = p.state.f;
  const FilterState out = admm_train(p.sample, p.state, p.w, cfg);
  CHECK(max_abs(out.f_prev, entry) == 0.0);
  CHECK(max_abs(out.f, entry) > 0.0);

  const FilterState cold = admm_train(p.sample, make_filter_state(16, 16, 2, 8, 8), p.w, cfg);
  CHECK(cold.f_prev.empty());
}

TEST_CASE("two ADMM rounds land within 1% of the converged objective") {
  std::mt19937_64 rng(13);
  CoreConfig cfg;
  for (int trial = 0; trial < 5; ++trial) {
    const oracle::WarmProblem p = oracle::warm_problem(rng, cfg);
    auto objective_after = [&](int iters) {
      CoreConfig c = cfg;
      c.admm_iters = iters;
      const FilterState out = admm_train(p.sample, p.state, p.w, c);
      return oracle::objective(p.x, p.residue, p.label, out.f, p.state.f, p.w, c);
    };
    const double e2 = objective_after(2), e25 = objective_after(25);
    CHECK(std::abs(e2 - e25) <= 0.01 * std::abs(e25));
  }
}

TEST_CASE("frozen penalty: the augmented Lagrangian does not increase") {
  std::mt19937_64 rng(14);
  CoreConfig cfg;
  for (int trial = 0; trial < 3; ++trial) {
    const oracle::WarmProblem p = oracle::warm_problem(rng, cfg);
    CoreConfig c = cfg;
    c.beta = 1.0;
    c.mu_max = c.mu0;
    c.admm_iters = 8;
    const double N = static_cast<double>(p.sample.data_hat.rows() * p.sample.data_hat.cols());
    const FeatureTensor anchor = p.state.f;
    double prev = oracle::augmented_lagrangian(p.sample.data_hat, p.sample.residue_hat, p.sample.label_hat, p.state.f,
                                               dft2(pad_filter(p.state.f, 24, 24)), p.state.zeta_hat, anchor, p.w, c,
                                               c.mu0 * N);
    int increases = 0;
    admm_train(p.sample, p.state, p.w, c, [&](const AdmmIterate& it) {
      const double L = oracle::augmented_lagrangian(p.sample.data_hat, p.sample.residue_hat, p.sample.label_hat, *it.f,
                                                    *it.g_hat, *it.zeta_hat, anchor, p.w, c, it.mu);
      if (L > prev + 1e-9) ++increases;
      prev = L;
    });
    CHECK(increases == 0);
  }
}

TEST_CASE("primal residual trends down across ADMM rounds") {
  std::mt19937_64 rng(15);
  CoreConfig cfg;
  cfg.admm_iters = 6;
  int steps = 0, down = 0;
  for (int trial = 0; trial < 20; ++trial) {
    const oracle::WarmProblem p = oracle::warm_problem(rng, CoreConfig{}, 16, 8, 3, 3);
    double prev = -1.0;
    admm_train(p.sample, p.state, p.w, cfg, [&](const AdmmIterate& it) {
      const double r = (*it.g_hat - *it.f_hat).max_abs();
      if (prev >= 0.0) {
        ++steps;
        if (r <= prev) ++down;
      }
      prev = r;
    });
  }
  CHECK(static_cast<double>(down) >= 0.95 * steps);
}

TEST_CASE("learn_frame cold start and residue bookkeeping") {
  std::mt19937_64 rng(16);
  const Index N = 12, M = 6, D = 2;
  CoreConfig cfg;
  const ComplexMatrix y = dft2(gaussian_label(N, N, 1.0).data);
  const SpatialWeight w = make_spatial_weight(M, M, M, M, 1.5);
  FilterState s = make_filter_state(N, N, D, M, M);
  const SpectralTensor x1 = random_spectrum(N, N, D, rng), x2 = random_spectrum(N, N, D, rng);
  learn_frame(s, x1, y, w, cfg);
  CHECK(s.frames_learned == 1);
  CHECK(max_abs(s.x_model_hat, x1) == 0.0);
  CHECK(max_abs(s.prev_features_hat, x1) == 0.0);
  learn_frame(s, x2, y, w, cfg);
  CHECK(s.frames_learned == 2);
  CHECK(max_abs(s.x_model_hat, update_appearance(x1, x2, cfg.alpha)) < 1e-12);
  CHECK(max_abs(s.prev_features_hat, x2) == 0.0);
}

TEST_CASE("localize") {
  std::mt19937_64 rng(17);
  const Index N = 16, M = 8, D = 4;

  SUBCASE("self response peaks at the origin") {
    const FeatureTensor x = oracle::random_tensor(N, N, D, rng);
    FilterState s = make_filter_state(N, N, D, M, M);
    learn_frame(s, dft2(x), dft2(gaussian_label(N, N, 1.0).data), make_spatial_weight(M, M, M, M, 1.5), CoreConfig{});
    const Localization loc = localize(s.g_hat, dft2(x));
    CHECK(std::abs(loc.dx) < 0.5);
    CHECK(std::abs(loc.dy) < 0.5);
    CHECK_FALSE(loc.degenerate);
  }

  SUBCASE("a shifted sample moves the peak by the shift") {
    const FeatureTensor x = oracle::random_tensor(N, N, D, rng);
    FilterState s = make_filter_state(N, N, D, M, M);
    learn_frame(s, dft2(x), dft2(gaussian_label(N, N, 1.0).data), make_spatial_weight(M, M, M, M, 1.5), CoreConfig{});
    FeatureTensor z(N, N, D);
    for (Index d = 0; d < D; ++d)
      for (Index c = 0; c < N; ++c)
        for (Index r = 0; r < N; ++r) z[d]((r + 1) % N, (c + 3) % N) = x[d](r, c);
    const Localization base = localize(s.g_hat, dft2(x));
    const Localization loc = localize(s.g_hat, dft2(z));
    CHECK(wrap_index(loc.response.peak_col, N) == wrap_index(base.response.peak_col, N) - 3);
    CHECK(wrap_index(loc.response.peak_row, N) == wrap_index(base.response.peak_row, N) - 1);
    CHECK(loc.dx == doctest::Approx(base.dx + 3.0).epsilon(1e-9));
    CHECK(loc.dy == doctest::Approx(base.dy + 1.0).epsilon(1e-9));
  }

  SUBCASE("response equals the direct circular cross-correlation") {
    for (int k = 0; k < 3; ++k) {
      const FeatureTensor f = oracle::random_tensor(M, M, D, rng), z = oracle::random_tensor(N, N, D, rng);
      const FeatureTensor pf = pad_filter(f, N, N);
      const Localization loc = localize(dft2(pf), dft2(z));
      CHECK((loc.response.data - oracle::circular_xcorr(z, pf)).cwiseAbs().maxCoeff() < 1e-6);
      CHECK(loc.max_imag < 1e-6);
      CHECK(loc.response.peak_value == loc.response.data.maxCoeff());
    }
  }

  SUBCASE("all-zero response is flagged") {
    const Localization loc = localize(SpectralTensor(N, N, D), random_spectrum(N, N, D, rng));
    CHECK(loc.degenerate);
    CHECK(loc.dx == 0.0);
    CHECK(loc.dy == 0.0);
  }
}
