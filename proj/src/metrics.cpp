#include "racf/metrics.hpp"

#include "racf/tracker.hpp"

#include <chrono>
#include <cmath>
#include <limits>

namespace racf {

namespace {

std::vector<double> finite_only(const std::vector<double>& v, const char* who) {
  std::vector<double> out;
  for (double x : v)
    if (std::isfinite(x)) out.push_back(x);
  if (out.empty()) throw std::invalid_argument(std::string(who) + ": no frames to score");
  return out;
}

}  // namespace

Curve precision_curve(const std::vector<double>& errors) {
  const auto e = finite_only(errors, "precision_curve");
  Curve c;
  for (int t = 0; t <= 50; ++t) {
    std::size_t hit = 0;
    for (double x : e) hit += x <= t ? 1 : 0;
    c.thresholds.push_back(t);
    c.values.push_back(static_cast<double>(hit) / static_cast<double>(e.size()));
  }
  return c;
}

Curve success_curve(const std::vector<double>& overlaps) {
  const auto o = finite_only(overlaps, "success_curve");
  Curve c;
  for (int i = 0; i <= 20; ++i) {
    const double t = i / 20.0;
    std::size_t hit = 0;
    for (double x : o) hit += x > t ? 1 : 0;
    c.thresholds.push_back(t);
    c.values.push_back(static_cast<double>(hit) / static_cast<double>(o.size()));
  }
  return c;
}

double auc(const Curve& success) {
  if (success.values.empty()) throw std::invalid_argument("auc: empty curve");
  double s = 0.0;
  for (double v : success.values) s += v;
  return s / static_cast<double>(success.values.size());
}

double precision_at_20(const Curve& precision) {
  for (std::size_t i = 0; i < precision.thresholds.size(); ++i)
    if (precision.thresholds[i] == 20.0) return precision.values[i];
  throw std::invalid_argument("precision_at_20: curve has no 20 px threshold");
}

double center_error(const BoundingBox& a, const BoundingBox& b) { return std::hypot(a.cx() - b.cx(), a.cy() - b.cy()); }

EvalResult evaluate(const std::string& name, const std::vector<BoundingBox>& predicted,
                    const std::vector<BoundingBox>& truth) {
  if (predicted.size() != truth.size()) throw std::invalid_argument("evaluate: prediction and ground-truth counts differ");
  EvalResult r;
  r.sequence = name;
  r.boxes = predicted;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  double sum_o = 0.0, sum_e = 0.0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (!truth[i].valid() || !predicted[i].valid()) {
      r.errors.push_back(nan);
      r.overlaps.push_back(nan);
      continue;
    }
    r.errors.push_back(center_error(predicted[i], truth[i]));
    r.overlaps.push_back(iou(predicted[i], truth[i]));
    sum_e += r.errors.back();
    sum_o += r.overlaps.back();
    ++r.evaluated_frames;
  }
  r.precision = precision_curve(r.errors);
  r.success = success_curve(r.overlaps);
  r.precision20 = precision_at_20(r.precision);
  r.auc = auc(r.success);
  r.mean_error = sum_e / r.evaluated_frames;
  r.mean_overlap = sum_o / r.evaluated_frames;
  return r;
}

EvalResult run_ope(const TrackerConfig& cfg, const std::string& name, std::size_t frame_count,
                   const std::function<Image(std::size_t)>& frame, const std::vector<BoundingBox>& truth) {
  if (frame_count == 0 || truth.size() != frame_count) throw std::invalid_argument("run_ope: frame and ground-truth counts differ");
  if (!truth[0].valid()) throw std::invalid_argument("run_ope: first ground-truth box is not valid");
  std::vector<BoundingBox> boxes;
  boxes.reserve(frame_count);
  TrackState state = tracker_init(frame(0), truth[0], cfg);
  boxes.push_back(truth[0]);
  using clock = std::chrono::steady_clock;
  double secs = 0.0;  // tracking time only, frame decoding excluded
  for (std::size_t i = 1; i < frame_count; ++i) {
    const Image img = frame(i);
    const auto t0 = clock::now();
    boxes.push_back(track_frame(state, img, cfg));
    secs += std::chrono::duration<double>(clock::now() - t0).count();
  }
  EvalResult r = evaluate(name, boxes, truth);
  r.fps = frame_count > 1 && secs > 0 ? static_cast<double>(frame_count - 1) / secs : 0.0;
  return r;
}

}  // namespace racf
