#pragma once

// GrabCut from a bounding box, and the box-refinement protocol built on it.
//
// The colour models are K-component Gaussian mixtures. Each GrabCut round
// takes one MAP-EM step for both mixtures under a fixed inverse-Wishart-like
// covariance prior, then relabels the unknown pixels by an exact min-cut of
//   sum_i -log p(z_i | model of label_i) + sum_{i~j} [l_i != l_j] V_ij
//   + covariance prior,
// so the recorded energy cannot increase from one round to the next.

#include "racf/geometry.hpp"

#include <cstdint>
#include <vector>

namespace racf {

using Color = Eigen::Vector3d;
using ColorSamples = Eigen::Matrix<double, Eigen::Dynamic, 3>;
using SegMask = Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic>;  ///< 1 = foreground

inline constexpr std::uint8_t kTrimapBackground = 0;
inline constexpr std::uint8_t kTrimapUnknown = 1;

struct Trimap {
  Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic> labels;

  Index width() const { return labels.cols(); }
  Index height() const { return labels.rows(); }
};

/// Pixels whose centre lies inside `box` are unknown, the rest definite background.
Trimap make_trimap(Index width, Index height, const BoundingBox& box);

struct GaussianComponent {
  double weight = 0.0;
  Color mean = Color::Zero();
  Eigen::Matrix3d cov = Eigen::Matrix3d::Identity();
  Eigen::Matrix3d inv = Eigen::Matrix3d::Identity();
  double log_det = 0.0;

  void set_covariance(const Eigen::Matrix3d& c);
};

struct GmmModel {
  std::vector<GaussianComponent> components;
  bool merged = false;  ///< fewer distinct colours than requested components

  Index size() const { return static_cast<Index>(components.size()); }
};

/// k-means++ seeded k-means, then per-cluster weight, mean and covariance + eps I.
GmmModel fit_gmm(const ColorSamples& pixels, int K, double eps = 1e-3, std::uint64_t seed = 0);

/// -log sum_k w_k N(color; mu_k, Sigma_k), via log-sum-exp.
double gmm_neg_log_likelihood(const GmmModel& model, const Color& color);

/// One MAP-EM step; see the file comment. `prior_strength` is the pseudo-count
/// of the eps I covariance prior.
GmmModel gmm_em_step(const GmmModel& model, const ColorSamples& pixels, double eps, double prior_strength);

/// c/2 sum_k (log det Sigma_k + eps tr Sigma_k^{-1}), the negative log prior.
double gmm_prior_energy(const GmmModel& model, double eps, double prior_strength);

enum class RefineRule { as_written, prose_reading };

struct RefineConfig {
  double s_g = 52.0;      ///< side of the resized segmentation input, px
  double delta_s = 12.0;  ///< inner-box enlargement, px
  double sigma_iou = 0.5;
  int grabcut_iters = 5;
  int gmm_components = 5;
  double gamma = 50.0;
  double cov_eps = 1e-3;
  double prior_strength = 1.0;
  RefineRule rule = RefineRule::as_written;
  std::uint64_t seed = 0;

  void validate() const;
};

struct GrabCutResult {
  SegMask mask;
  bool reliable = true;
  std::vector<double> energy;  ///< after the initial fit, then after every round
  GmmModel fg;
  GmmModel bg;
  double beta = 0.0;
  int rounds = 0;
};

/// Contrast parameter 1 / (2 mean |c_i - c_j|^2) over 8-connected pairs; 0 for a flat image.
double neighbor_beta(const Image& image);

/// Total energy of a labelling under fixed mixtures (data + smoothness + prior).
double grabcut_energy(const Image& image, const SegMask& mask, const GmmModel& fg, const GmmModel& bg, double beta,
                      const RefineConfig& cfg);

GrabCutResult grabcut(const Image& image, const BoundingBox& init_box, const RefineConfig& cfg);

/// Tight box around the largest 4-connected foreground component.
BoundingBox mask_to_bbox(const SegMask& mask);

/// Refinement rule: as written keeps s1 when IoU > sigma and takes s2
/// otherwise; the prose reading does the opposite.
bool keep_crude_scale(double iou_value, double sigma, RefineRule rule);

struct RefineResult {
  double width = 0.0;  ///< s*, px
  double height = 0.0;
  bool used_grabcut = false;  ///< s* came from the segmentation
  bool reliable = false;
  double iou = 0.0;
  double seg_width = 0.0;  ///< s2, px (0 when unavailable)
  double seg_height = 0.0;
};

/// Segments an extended crop of 1.5 s1 around (cx, cy) and picks between s1
/// and the segmented size. Requires delta_s < 0.5 min(s1).
RefineResult refine_scale(const Image& frame, double cx, double cy, double s1_width, double s1_height,
                          const RefineConfig& cfg);

}  // namespace racf
