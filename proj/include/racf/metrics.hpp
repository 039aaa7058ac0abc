#pragma once

// One-pass evaluation metrics. Precision counts center errors <= t for
// t = 0..50 px; success counts overlaps > t for t = 0, 0.05, ..., 1; the AUC
// is the mean of the success curve. Frames whose ground truth is not a valid
// box (NaN rows, nonpositive sizes) are excluded from every denominator.

#include "racf/geometry.hpp"

#include <functional>
#include <string>
#include <vector>

namespace racf {

struct Curve {
  std::vector<double> thresholds;
  std::vector<double> values;
};

Curve precision_curve(const std::vector<double>& errors);
Curve success_curve(const std::vector<double>& overlaps);
double auc(const Curve& success);
/// Value of the precision curve at 20 px.
double precision_at_20(const Curve& precision);

double center_error(const BoundingBox& a, const BoundingBox& b);

struct EvalResult {
  std::string sequence;
  std::vector<BoundingBox> boxes;  ///< tracker output, one per frame
  std::vector<double> errors;      ///< per frame; NaN where the ground truth is excluded
  std::vector<double> overlaps;
  Curve precision;
  Curve success;
  double precision20 = 0.0;
  double auc = 0.0;
  double mean_overlap = 0.0;
  double mean_error = 0.0;
  double fps = 0.0;  ///< frames 2..K
  int evaluated_frames = 0;
};

/// Scores `predicted` against `truth` (same length).
EvalResult evaluate(const std::string& name, const std::vector<BoundingBox>& predicted,
                    const std::vector<BoundingBox>& truth);

struct TrackerConfig;

/// Initializes on the first ground-truth box, tracks every frame without
/// re-initialization and scores the result. `frame(i)` supplies frame i.
EvalResult run_ope(const TrackerConfig& cfg, const std::string& name, std::size_t frame_count,
                   const std::function<Image(std::size_t)>& frame, const std::vector<BoundingBox>& truth);

}  // namespace racf
