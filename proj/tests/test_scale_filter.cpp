#include <doctest.h>

#include "racf/scale_filter.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace racf;

namespace {

// A scene that is a pure function of (p - centre) / size, so rendering it at
// size s and at size a^k s is an exact zoom about the centre.
Image zoom_scene(double size, Index w = 160, Index h = 160) {
  Image img(h, w, 3);
  const double cx = 0.5 * static_cast<double>(w), cy = 0.5 * static_cast<double>(h);
  for (Index c = 0; c < w; ++c)
    for (Index r = 0; r < h; ++r) {
      const double u = (static_cast<double>(c) + 0.5 - cx) / size, v = (static_cast<double>(r) + 0.5 - cy) / size;
      const double rr = std::sqrt(u * u + v * v), tp = 2.0 * std::numbers::pi;
      const double val = 128 + 40 * std::sin(tp * (1.7 * u + 0.6 * v)) + 35 * std::cos(tp * (0.4 * u - 2.3 * v)) +
                         30 * std::sin(tp * 3.1 * rr);
      img[0](r, c) = val;
      img[1](r, c) = 0.8 * val + 20;
      img[2](r, c) = 255 - val;
    }
  return img;
}

ScaleFilterState trained_on(const Image& frame, double size, const ScaleFilterConfig& cfg) {
  ScaleFilterState st = make_scale_filter(size, size, cfg);
  ssf_update(st, scale_sample(frame, 80, 80, st, cfg), 1.0);
  return st;
}

}  // namespace

TEST_CASE("scale factors are geometric and symmetric") {
  ScaleFilterConfig cfg;
  const ScaleFilterState st = make_scale_filter(40, 30, cfg);
  REQUIRE(st.scale_factors.size() == 33);
  CHECK(st.scale_factors[16] == 1.0);
  for (Index i = 0; i < 33; ++i) {
    CHECK(st.scale_factors[i] * st.scale_factors[32 - i] == doctest::Approx(1.0));
    if (i > 0) CHECK(st.scale_factors[i] / st.scale_factors[i - 1] == doctest::Approx(1.02));
  }
  CHECK(static_cast<double>(st.template_width * st.template_height) <= 512.0);
  cfg.num_scales = 4;
  CHECK_THROWS(make_scale_filter(40, 30, cfg));
}

TEST_CASE("scale_sample is deterministic and flat on a uniform frame") {
  ScaleFilterConfig cfg;
  const Image scene = zoom_scene(40);
  const ScaleFilterState st = make_scale_filter(40, 40, cfg);
  const Eigen::MatrixXd a = scale_sample(scene, 80, 80, st, cfg), b = scale_sample(scene, 80, 80, st, cfg);
  CHECK(a.cols() == 33);
  CHECK((a - b).cwiseAbs().maxCoeff() == 0.0);

  Image flat(120, 120, 3);
  for (Index d = 0; d < 3; ++d) flat[d].setConstant(90.0);
  const Eigen::MatrixXd u = scale_sample(flat, 60, 60, st, cfg);
  for (Index i = 1; i < u.cols(); ++i) CHECK((u.col(i) - u.col(0)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("ssf_update learning-rate cases") {
  ScaleFilterConfig cfg;
  const Image scene = zoom_scene(40);
  ScaleFilterState st = make_scale_filter(40, 40, cfg);
  const Eigen::MatrixXd x = scale_sample(scene, 80, 80, st, cfg);
  ssf_update(st, x, 1.0);
  const ComplexMatrix x_hat = dft_rows(x);
  for (Index i = 0; i < x.cols(); ++i) {
    CHECK((st.numerator.col(i) - std::conj(st.label_hat[i]) * x_hat.col(i)).cwiseAbs().maxCoeff() == 0.0);
    CHECK(st.denominator[i] == doctest::Approx(x_hat.col(i).squaredNorm()));
  }
  CHECK(st.denominator.minCoeff() >= 0.0);

  const ScaleFilterState once = st;
  const Eigen::MatrixXd other = scale_sample(zoom_scene(45), 80, 80, st, cfg);
  ScaleFilterState frozen = st;
  ssf_update(frozen, other, 0.0);
  CHECK((frozen.numerator - once.numerator).cwiseAbs().maxCoeff() == 0.0);
  CHECK((frozen.denominator - once.denominator).cwiseAbs().maxCoeff() == 0.0);

  // The state trained on x is a fixed point of further updates with x.
  ScaleFilterState twice = st;
  ssf_update(twice, x, 0.3);
  CHECK((twice.numerator - once.numerator).cwiseAbs().maxCoeff() < 1e-9 * once.numerator.cwiseAbs().maxCoeff());
  CHECK((twice.denominator - once.denominator).cwiseAbs().maxCoeff() < 1e-9 * once.denominator.maxCoeff());
  CHECK_THROWS(ssf_update(twice, x, 1.5));
}

TEST_CASE("ssf_estimate on the training sample holds the scale") {
  ScaleFilterConfig cfg;
  const Image scene = zoom_scene(40);
  const ScaleFilterState st = trained_on(scene, 40, cfg);
  const ScaleEstimate est = ssf_estimate(st, scale_sample(scene, 80, 80, st, cfg), cfg);
  Index peak = 0;
  est.response.maxCoeff(&peak);
  CHECK(peak == 16);
  CHECK(std::abs(std::log(est.multiplier) / std::log(cfg.step)) < 0.5);
  CHECK_FALSE(est.degenerate);
}

TEST_CASE("synthetic zoom by three steps moves the peak by three bins") {
  ScaleFilterConfig cfg;
  const ScaleFilterState st = trained_on(zoom_scene(40), 40, cfg);
  const Image zoomed = zoom_scene(40 * std::pow(cfg.step, 3));
  const ScaleEstimate est = ssf_estimate(st, scale_sample(zoomed, 80, 80, st, cfg), cfg);
  Index peak = 0;
  est.response.maxCoeff(&peak);
  CHECK(peak == 16 + 3);
}

TEST_CASE("synthetic zoom by two steps is estimated within half a step") {
  ScaleFilterConfig cfg;
  for (const double size : {36.0, 40.0, 48.0}) {
    const ScaleFilterState st = trained_on(zoom_scene(size), size, cfg);
    for (const int k : {-2, 2}) {
      const Image zoomed = zoom_scene(size * std::pow(cfg.step, k));
      const ScaleEstimate est = ssf_estimate(st, scale_sample(zoomed, 80, 80, st, cfg), cfg);
      CHECK(std::abs(std::log(est.multiplier) / std::log(cfg.step) - k) <= 0.5);
    }
  }
}

TEST_CASE("ssf_estimate flags a uniform frame and holds the scale") {
  ScaleFilterConfig cfg;
  ScaleFilterState st = trained_on(zoom_scene(40), 40, cfg);
  st.current_scale = 1.3;
  Image flat(160, 160, 3);
  for (Index d = 0; d < 3; ++d) flat[d].setConstant(200.0);
  const ScaleEstimate est = ssf_estimate(st, scale_sample(flat, 80, 80, st, cfg), cfg);
  CHECK(est.degenerate);
  CHECK(est.multiplier == 1.0);
  CHECK(est.scale == 1.3);
}

TEST_CASE("estimated multiplier stays inside the factor range") {
  ScaleFilterConfig cfg;
  const ScaleFilterState st = trained_on(zoom_scene(40), 40, cfg);
  std::mt19937_64 rng(4);
  std::normal_distribution<double> n(0.0, 1.0);
  const double lo = std::pow(cfg.step, -16.0), hi = std::pow(cfg.step, 16.0);
  for (int k = 0; k < 30; ++k) {
    Eigen::MatrixXd z(st.numerator.rows(), 33);
    for (Index i = 0; i < z.size(); ++i) z.data()[i] = n(rng);
    const ScaleEstimate est = ssf_estimate(st, z, cfg);
    CHECK(est.multiplier >= lo * (1 - 1e-12));
    CHECK(est.multiplier <= hi * (1 + 1e-12));
  }
}

TEST_CASE("a single scale is the identity on scale") {
  ScaleFilterConfig cfg;
  cfg.num_scales = 1;
  const Image scene = zoom_scene(40);
  ScaleFilterState st = trained_on(scene, 40, cfg);
  st.current_scale = 0.8;
  const ScaleEstimate est = ssf_estimate(st, scale_sample(zoom_scene(50), 80, 80, st, cfg), cfg);
  CHECK(est.multiplier == 1.0);
  CHECK(est.scale == 0.8);
  CHECK_FALSE(est.degenerate);
}

TEST_CASE("clamp_scale keeps the target between min_side and the frame") {
  ScaleFilterConfig cfg;
  const ScaleFilterState st = make_scale_filter(20, 10, cfg);
  CHECK(clamp_scale(1.0, st, 320, 240, cfg) == 1.0);
  CHECK(clamp_scale(0.1, st, 320, 240, cfg) == doctest::Approx(0.4));
  CHECK(clamp_scale(100.0, st, 320, 240, cfg) == doctest::Approx(16.0));
  CHECK_THROWS(ssf_estimate(make_scale_filter(20, 10, cfg), Eigen::MatrixXd::Zero(4, 33), cfg));
}
