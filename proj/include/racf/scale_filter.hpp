#pragma once

// One-dimensional discriminative scale filter over a geometric pyramid of
// patches (DSST style). Column i of a sample holds the flattened HOG of the
// patch at factor step^(i - (S - 1) / 2), so index offsets from the centre
// read directly as powers of the step. Each feature row has its mean and
// linear trend over the scale axis removed before the Hann taper.

#include "racf/geometry.hpp"
#include "racf/spectral.hpp"

namespace racf {

struct ScaleFilterConfig {
  int num_scales = 33;           ///< S, odd
  double step = 1.02;            ///< a
  double sigma_factor = 1.0 / 16.0;  ///< label sigma = sigma_factor * S
  double lambda = 0.01;
  double learning_rate = 0.025;
  double max_template_area = 512.0;  ///< px^2 of the resized template
  Index cell = 4;
  double min_side = 4.0;  ///< px

  void validate() const;
};

struct ScaleFilterState {
  Eigen::MatrixXcd numerator;    ///< d_s x S
  Eigen::VectorXd denominator;   ///< S
  Eigen::VectorXd scale_factors;  ///< S, geometric, symmetric about 1
  Eigen::VectorXcd label_hat;    ///< S
  Eigen::VectorXd window;        ///< S, Hann taper over scales
  double current_scale = 1.0;
  double base_width = 0.0;   ///< px
  double base_height = 0.0;  ///< px
  Index template_width = 0;  ///< px
  Index template_height = 0;
  bool trained = false;
};

/// Untrained state for a target of `base_width x base_height` px.
ScaleFilterState make_scale_filter(double base_width, double base_height, const ScaleFilterConfig& cfg);

/// d_s x S sample: one flattened HOG column per scale factor, detrended per row and windowed.
Eigen::MatrixXd scale_sample(const Image& frame, double cx, double cy, const ScaleFilterState& state,
                             const ScaleFilterConfig& cfg);

/// numerator <- (1 - lr) numerator + lr conj(y_hat) . x_hat
/// denominator <- (1 - lr) denominator + lr sum_rows |x_hat|^2
void ssf_update(ScaleFilterState& state, const Eigen::MatrixXd& sample, double lr);

struct ScaleEstimate {
  double multiplier = 1.0;  ///< relative to the current scale
  double scale = 1.0;       ///< current_scale * multiplier, before clamping
  double confidence = 0.0;  ///< peak response value
  bool degenerate = false;  ///< flat or non-finite response; multiplier held at 1
  Eigen::VectorXd response;
};

/// Response idft(sum_rows conj(numerator) . x_hat / (denominator + lambda)),
/// peak with parabolic sub-bin refinement.
ScaleEstimate ssf_estimate(const ScaleFilterState& state, const Eigen::MatrixXd& sample, const ScaleFilterConfig& cfg);

/// Limits `scale` so the target stays between min_side and the frame extent.
double clamp_scale(double scale, const ScaleFilterState& state, double frame_width, double frame_height,
                   const ScaleFilterConfig& cfg);

}  // namespace racf
