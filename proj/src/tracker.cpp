#include "racf/tracker.hpp"

#include "racf/features.hpp"

#include <algorithm>
#include <cmath>

namespace racf {

void FeatureConfig::validate() const {
  if (cell < 1) throw std::invalid_argument("features: cell must be >= 1");
  if (!(padding >= 1)) throw std::invalid_argument("features: padding must be >= 1");
  if (!(rho > 0) || !(label_sigma_factor > 0)) throw std::invalid_argument("features: rho and label_sigma_factor must be positive");
  if (min_cells < 4 || max_cells < min_cells) throw std::invalid_argument("features: need 4 <= min_cells <= max_cells");
}

void TrackerConfig::validate() const {
  core.validate();
  refine.validate();
  scale.validate();
  features.validate();
  if (refine_every < 1) throw std::invalid_argument("tracker: refine_every must be >= 1");
}

const std::vector<std::string>& variant_names() {
  static const std::vector<std::string> names = {"racf", "racf_minus", "racf_minus_minus", "bacf_equiv"};
  return names;
}

TrackerConfig make_variant(const std::string& name) {
  TrackerConfig cfg;
  if (name == "racf") return cfg;
  cfg.enable_refine = false;
  if (name == "racf_minus") return cfg;
  cfg.enable_spatial_temporal = false;
  cfg.core.theta = 0.0;
  cfg.core.tau = 0.0;
  if (name == "racf_minus_minus") return cfg;
  cfg.core.eta = 0.0;
  if (name == "bacf_equiv") return cfg;
  throw std::invalid_argument("unknown variant '" + name + "'");
}

CoreConfig effective_core(const TrackerConfig& cfg) {
  CoreConfig c = cfg.core;
  if (!cfg.enable_spatial_temporal) {
    c.theta = 0.0;
    c.tau = 0.0;
  }
  return c;
}

FeatureTensor search_features(const Image& frame, const TrackState& state, double cx, double cy, double scale,
                              const TrackerConfig& cfg) {
  const Index px = state.grid * cfg.features.cell;
  const double side = state.window_side * scale;
  const Image patch = sample_patch(frame, cx, cy, side, side, px, px);
  return compose_features(patch, cfg.features.cell, cfg.features.use_cn);
}

namespace {

void clamp_center(TrackState& s, const Image& frame, bool* clamped) {
  const double W = static_cast<double>(frame.cols()), H = static_cast<double>(frame.rows());
  const double cx = std::clamp(s.cx, 0.0, W), cy = std::clamp(s.cy, 0.0, H);
  if (clamped) *clamped = cx != s.cx || cy != s.cy;
  s.cx = cx;
  s.cy = cy;
}

void set_size(TrackState& s, double w, double h) {
  s.width = w;
  s.height = h;
  s.scale.current_scale = std::sqrt((w * h) / (s.init_width * s.init_height));
  s.scale.base_width = w / s.scale.current_scale;
  s.scale.base_height = h / s.scale.current_scale;
}

void learn(TrackState& s, const Image& frame, const TrackerConfig& cfg, double lr) {
  const FeatureTensor x = search_features(frame, s, s.cx, s.cy, s.scale.current_scale, cfg);
  learn_frame(s.filter, dft2(x), s.label_hat, s.weight, effective_core(cfg));
  if (cfg.enable_scale) ssf_update(s.scale, scale_sample(frame, s.cx, s.cy, s.scale, cfg.scale), lr);
}

}  // namespace

TrackState tracker_init(const Image& frame, const BoundingBox& box, const TrackerConfig& cfg) {
  cfg.validate();
  if (frame.empty()) throw std::invalid_argument("tracker_init: empty frame");
  if (!box.valid()) throw std::invalid_argument("tracker_init: degenerate box");
  const double W = static_cast<double>(frame.cols()), H = static_cast<double>(frame.rows());
  if (box.cx() < 0 || box.cy() < 0 || box.cx() > W || box.cy() > H)
    throw std::invalid_argument("tracker_init: box centre outside the frame");

  TrackState s;
  s.cx = box.cx();
  s.cy = box.cy();
  s.width = box.w;
  s.height = box.h;
  s.init_width = box.w;
  s.init_height = box.h;

  const auto& fc = cfg.features;
  s.window_side = std::max(std::sqrt(fc.padding * box.w * box.h), 1.25 * std::max(box.w, box.h));
  Index n = static_cast<Index>(std::lround(s.window_side / static_cast<double>(fc.cell)));
  n = std::clamp(n, fc.min_cells, fc.max_cells);
  n += n % 2;
  s.grid = n;
  s.cell_px = s.window_side / static_cast<double>(n);
  const Index mw = std::clamp<Index>(std::lround(box.w / s.cell_px), 1, n - 2);
  const Index mh = std::clamp<Index>(std::lround(box.h / s.cell_px), 1, n - 2);
  s.weight = make_spatial_weight(mw, mh, static_cast<double>(mw), static_cast<double>(mh), fc.rho);
  const double sigma = std::sqrt(static_cast<double>(mw * mh)) * fc.label_sigma_factor;
  s.label_hat = dft2(gaussian_label(n, n, sigma).data);

  const Index channels = (fc.use_cn && frame.channels() == 3) ? kHogChannels + kColorNameChannels : kHogChannels;
  s.filter = make_filter_state(n, n, channels, mw, mh);
  s.scale = make_scale_filter(box.w, box.h, cfg.scale);
  learn(s, frame, cfg, 1.0);
  return s;
}

BoundingBox track_frame(TrackState& s, const Image& frame, const TrackerConfig& cfg, TrackDiagnostics* diag) {
  if (!s.filter.initialized()) throw std::logic_error("track_frame: tracker not initialized");
  TrackDiagnostics d;
  const double W = static_cast<double>(frame.cols()), H = static_cast<double>(frame.rows());

  // Translation.
  const double scale = s.scale.current_scale;
  const FeatureTensor z = search_features(frame, s, s.cx, s.cy, scale, cfg);
  const Localization loc = localize(s.filter.g_hat, dft2(z));
  d.peak = loc.response.peak_value;
  d.response_degenerate = loc.degenerate;
  d.dx_cells = loc.dx;
  d.dy_cells = loc.dy;
  if (!loc.degenerate) {
    s.cx += loc.dx * s.cell_px * scale;
    s.cy += loc.dy * s.cell_px * scale;
  }
  clamp_center(s, frame, &d.center_clamped);

  // Crude scale.
  double s1w = s.width, s1h = s.height;
  if (cfg.enable_scale) {
    const ScaleEstimate est = ssf_estimate(s.scale, scale_sample(frame, s.cx, s.cy, s.scale, cfg.scale), cfg.scale);
    d.scale_degenerate = est.degenerate;
    const double k = clamp_scale(est.scale, s.scale, W, H, cfg.scale);
    s1w = s.scale.base_width * k;
    s1h = s.scale.base_height * k;
  }
  d.s1_width = s1w;
  d.s1_height = s1h;

  // Refinement.
  double sw = s1w, sh = s1h;
  if (cfg.enable_refine && (s.frame_index + 1) % cfg.refine_every == 0) {
    RefineConfig rc = cfg.refine;
    rc.delta_s = std::min(rc.delta_s, 0.49 * std::min(s1w, s1h));
    rc.seed = cfg.refine.seed + static_cast<std::uint64_t>(s.frame_index + 1);
    const RefineResult r = refine_scale(frame, s.cx, s.cy, s1w, s1h, rc);
    d.refined = true;
    d.refine_reliable = r.reliable;
    d.used_segmentation = r.used_grabcut;
    d.refine_iou = r.iou;
    sw = std::clamp(r.width, cfg.scale.min_side, W);
    sh = std::clamp(r.height, cfg.scale.min_side, H);
  }
  set_size(s, sw, sh);

  // Model updates at the new position and size.
  learn(s, frame, cfg, cfg.scale.learning_rate);
  ++s.frame_index;
  if (diag) *diag = d;
  return current_box(s);
}

}  // namespace racf
