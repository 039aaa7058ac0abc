#include <doctest.h>

#include "racf/metrics.hpp"
#include "racf/synth.hpp"
#include "racf/tracker.hpp"

#include <cmath>

using namespace racf;

namespace {

SynthSpec spec(const std::string& kind, int frames, double speed = 3.0) {
  SynthSpec s;
  s.kind = kind;
  s.frames = frames;
  s.speed = speed;
  s.seed = 3;
  return s;
}

double center_distance(const BoundingBox& a, const BoundingBox& b) { return std::hypot(a.cx() - b.cx(), a.cy() - b.cy()); }

}  // namespace

TEST_CASE("variants map to the documented component switches") {
  const TrackerConfig racf = make_variant("racf");
  CHECK(racf.enable_refine);
  CHECK(racf.enable_spatial_temporal);
  CHECK(racf.core.eta == 1.0);
  CHECK(racf.core.theta == 0.5);
  CHECK(racf.core.tau == 0.01);
  CHECK(racf.core.lambda == 0.55);
  CHECK(racf.core.admm_iters == 2);
  CHECK(racf.features.rho == 1.5);
  CHECK(racf.refine.s_g == 52.0);
  CHECK(racf.refine.delta_s == 12.0);
  CHECK(racf.refine.sigma_iou == 0.5);

  const TrackerConfig minus = make_variant("racf_minus");
  CHECK_FALSE(minus.enable_refine);
  CHECK(effective_core(minus).theta == 0.5);

  const TrackerConfig mm = make_variant("racf_minus_minus");
  CHECK_FALSE(mm.enable_refine);
  const CoreConfig core = effective_core(mm);
  CHECK(core.theta == 0.0);
  CHECK(core.tau == 0.0);
  CHECK(core.eta == 1.0);
  CHECK(core.lambda == 0.55);

  const CoreConfig bacf = effective_core(make_variant("bacf_equiv"));
  CHECK(bacf.eta == 0.0);
  CHECK(bacf.theta == 0.0);
  CHECK(bacf.tau == 0.0);
  CHECK_THROWS(make_variant("unknown"));
  CHECK(variant_names().size() == 4);
}

TEST_CASE("initialisation: size, self response and determinism") {
  const SynthSpec s = spec("translate", 2);
  const Image frame = synth_frame(s, 0);
  const BoundingBox gt = synth_truth(s)[0];
  const TrackerConfig cfg = make_variant("racf");
  const TrackState a = tracker_init(frame, gt, cfg);
  CHECK(a.width == gt.w);
  CHECK(a.height == gt.h);
  CHECK(a.cx == gt.cx());
  CHECK(a.cy == gt.cy());

  const Localization loc = localize(a.filter.g_hat, dft2(search_features(frame, a, a.cx, a.cy, 1.0, cfg)));
  CHECK(std::abs(loc.dx) < 0.5);
  CHECK(std::abs(loc.dy) < 0.5);

  const TrackState b = tracker_init(frame, gt, cfg);
  CHECK((a.filter.f - b.filter.f).max_abs() == 0.0);
  CHECK((a.filter.g_hat - b.filter.g_hat).max_abs() == 0.0);
  CHECK((a.scale.numerator - b.scale.numerator).cwiseAbs().maxCoeff() == 0.0);

  CHECK_THROWS(tracker_init(frame, {10, 10, 0, 5}, cfg));
}

TEST_CASE("track_frame is reproducible from a snapshot") {
  const SynthSpec s = spec("zoom", 3);
  const TrackerConfig cfg = make_variant("racf");
  TrackState st = tracker_init(synth_frame(s, 0), synth_truth(s)[0], cfg);
  track_frame(st, synth_frame(s, 1), cfg);
  const TrackState snapshot = st;
  TrackState again = snapshot;
  const Image f2 = synth_frame(s, 2);
  const BoundingBox a = track_frame(st, f2, cfg), b = track_frame(again, f2, cfg);
  CHECK(a == b);
  CHECK((st.filter.f - again.filter.f).max_abs() == 0.0);
  CHECK(st.frame_index == snapshot.frame_index + 1);
}

TEST_CASE("refinement never moves the centre") {
  const SynthSpec s = spec("translate", 6);
  TrackerConfig on = make_variant("racf");
  on.refine.rule = RefineRule::prose_reading;
  TrackerConfig off = on;
  off.enable_refine = false;
  TrackState st = tracker_init(synth_frame(s, 0), synth_truth(s)[0], on);
  for (int k = 1; k < s.frames; ++k) {
    TrackState alt = st;
    TrackDiagnostics d;
    const BoundingBox a = track_frame(st, synth_frame(s, k), on, &d);
    const BoundingBox b = track_frame(alt, synth_frame(s, k), off);
    CHECK(d.refined);
    CHECK(a.cx() == doctest::Approx(b.cx()).epsilon(1e-12));
    CHECK(a.cy() == doctest::Approx(b.cy()).epsilon(1e-12));
    CHECK(st.cx == alt.cx);
    CHECK(st.cy == alt.cy);
  }
}

TEST_CASE("static scene: drift below 1 px over 50 frames") {
  const SynthSpec s = spec("static", 50);
  const auto truth = synth_truth(s);
  const TrackerConfig cfg = make_variant("racf");
  TrackState st = tracker_init(synth_frame(s, 0), truth[0], cfg);
  double worst = 0.0;
  for (int k = 1; k < s.frames; ++k) worst = std::max(worst, center_distance(track_frame(st, synth_frame(s, k), cfg), truth[0]));
  CHECK(worst < 1.0);
}

TEST_CASE("target moving 2 px per frame: per-frame centre error below 2 px") {
  const SynthSpec s = spec("translate", 40, 2.0);
  const auto truth = synth_truth(s);
  const TrackerConfig cfg = make_variant("racf");
  TrackState st = tracker_init(synth_frame(s, 0), truth[0], cfg);
  double worst = 0.0;
  for (int k = 1; k < s.frames; ++k)
    worst = std::max(worst, center_distance(track_frame(st, synth_frame(s, k), cfg), truth[static_cast<std::size_t>(k)]));
  CHECK(worst < 2.0);
}

TEST_CASE("without refinement the aspect ratio is constant") {
  SynthSpec s = spec("zoom", 30);
  s.target = 36;
  const auto truth = synth_truth(s);
  const TrackerConfig cfg = make_variant("racf_minus");
  const BoundingBox init{truth[0].x - 4, truth[0].y, truth[0].w + 8, truth[0].h};  // 44 x 36
  TrackState st = tracker_init(synth_frame(s, 0), init, cfg);
  const double aspect = init.w / init.h;
  bool scale_changed = false;
  for (int k = 1; k < s.frames; ++k) {
    const BoundingBox b = track_frame(st, synth_frame(s, k), cfg);
    CHECK(b.w / b.h == doctest::Approx(aspect).epsilon(1e-12));
    scale_changed = scale_changed || b.w != init.w;
  }
  CHECK(scale_changed);
}

TEST_CASE("zooming target: the box follows the scale") {
  const SynthSpec s = spec("zoom", 40);
  const auto truth = synth_truth(s);
  const TrackerConfig cfg = make_variant("racf");
  TrackState st = tracker_init(synth_frame(s, 0), truth[0], cfg);
  BoundingBox last;
  for (int k = 1; k < s.frames; ++k) last = track_frame(st, synth_frame(s, k), cfg);
  CHECK(iou(last, truth.back()) > 0.7);
}
