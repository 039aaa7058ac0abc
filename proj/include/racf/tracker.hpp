#pragma once

// Per-frame pipeline: translation by the residue-aware filter, crude scale by
// the 1-D scale filter, optional segmentation refinement, then model updates
// on features re-extracted at the new position and size.

#include "racf/cf_core.hpp"
#include "racf/geometry.hpp"
#include "racf/scale_filter.hpp"
#include "racf/segmentation.hpp"

#include <string>
#include <vector>

namespace racf {

struct FeatureConfig {
  Index cell = 4;      ///< px per HOG cell in the search template
  bool use_cn = true;  ///< append colour names for colour frames
  double padding = 4.0;  ///< search-region area / target area
  double rho = 1.5;      ///< spatial-weight bowl steepness
  double label_sigma_factor = 1.0 / 16.0;
  Index min_cells = 16;  ///< search grid side bounds, in cells
  Index max_cells = 50;

  void validate() const;
};

struct TrackerConfig {
  CoreConfig core;
  RefineConfig refine;
  ScaleFilterConfig scale;
  FeatureConfig features;
  bool enable_refine = true;
  bool enable_spatial_temporal = true;  ///< false zeroes theta and tau
  bool enable_scale = true;
  int refine_every = 1;  ///< refinement cadence in frames

  void validate() const;
};

/// Presets: racf (all components), racf_minus (no refinement),
/// racf_minus_minus (no refinement, theta = tau = 0), bacf_equiv
/// (eta = theta = tau = 0, no refinement).
TrackerConfig make_variant(const std::string& name);
const std::vector<std::string>& variant_names();

/// Core parameters actually handed to the solver.
CoreConfig effective_core(const TrackerConfig& cfg);

struct TrackState {
  double cx = 0.0;  ///< p*, px
  double cy = 0.0;
  double width = 0.0;  ///< s*, px
  double height = 0.0;
  int frame_index = 0;

  FilterState filter;
  ScaleFilterState scale;

  double init_width = 0.0;
  double init_height = 0.0;
  double window_side = 0.0;  ///< search-region side at scale 1, px
  Index grid = 0;            ///< N cells per side
  double cell_px = 0.0;      ///< frame px per cell at scale 1
  SpatialWeight weight;
  ComplexMatrix label_hat;
};

struct TrackDiagnostics {
  double peak = 0.0;
  double dx_cells = 0.0;
  double dy_cells = 0.0;
  bool response_degenerate = false;
  bool scale_degenerate = false;
  bool refined = false;         ///< refinement ran this frame
  bool refine_reliable = false;
  bool used_segmentation = false;
  double refine_iou = 0.0;
  double s1_width = 0.0;
  double s1_height = 0.0;
  bool center_clamped = false;
};

/// Extracts windowed features of the search region around (cx, cy) at `scale`.
FeatureTensor search_features(const Image& frame, const TrackState& state, double cx, double cy, double scale,
                              const TrackerConfig& cfg);

TrackState tracker_init(const Image& frame, const BoundingBox& box, const TrackerConfig& cfg);

BoundingBox track_frame(TrackState& state, const Image& frame, const TrackerConfig& cfg,
                        TrackDiagnostics* diag = nullptr);

inline BoundingBox current_box(const TrackState& s) { return BoundingBox::centered(s.cx, s.cy, s.width, s.height); }

}  // namespace racf
