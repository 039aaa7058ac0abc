#include "racf/segmentation.hpp"

#include "racf/maxflow.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

namespace racf {

namespace {

constexpr double kLog2Pi = 1.8378770664093453;  // log(2 pi)

Color pixel(const Image& img, Index r, Index c) {
  if (img.channels() == 1) return Color::Constant(img[0](r, c));
  return Color(img[0](r, c), img[1](r, c), img[2](r, c));
}

void check_colour_image(const Image& img, const char* who) {
  if (img.empty() || (img.channels() != 1 && img.channels() != 3))
    throw std::invalid_argument(std::string(who) + ": expected a non-empty 1- or 3-channel image");
}

double log_density(const GaussianComponent& g, const Color& z) {
  const Color d = z - g.mean;
  return -0.5 * (3.0 * kLog2Pi + g.log_det + d.dot(g.inv * d));
}

struct Neighbor {
  Index dr, dc;
  double dist;
};
constexpr Neighbor kForward[4] = {{0, 1, 1.0}, {1, 0, 1.0}, {1, 1, std::numbers::sqrt2}, {1, -1, std::numbers::sqrt2}};

template <typename F>
void for_each_pair(Index H, Index W, F&& f) {
  for (Index r = 0; r < H; ++r)
    for (Index c = 0; c < W; ++c)
      for (const auto& n : kForward) {
        const Index r2 = r + n.dr, c2 = c + n.dc;
        if (r2 < 0 || r2 >= H || c2 < 0 || c2 >= W) continue;
        f(r, c, r2, c2, n.dist);
      }
}

ColorSamples gather(const Image& img, const SegMask& mask, std::uint8_t value) {
  const Index n = (mask.array() == value).count();
  ColorSamples out(n, 3);
  Index k = 0;
  for (Index c = 0; c < img.cols(); ++c)
    for (Index r = 0; r < img.rows(); ++r)
      if (mask(r, c) == value) out.row(k++) = pixel(img, r, c).transpose();
  return out;
}

}  // namespace

Trimap make_trimap(Index width, Index height, const BoundingBox& box) {
  if (width < 1 || height < 1) throw std::invalid_argument("make_trimap: empty extent");
  Trimap t;
  t.labels.setConstant(height, width, kTrimapBackground);
  for (Index r = 0; r < height; ++r)
    for (Index c = 0; c < width; ++c) {
      const double px = static_cast<double>(c) + 0.5, py = static_cast<double>(r) + 0.5;
      if (px >= box.x && px < box.x + box.w && py >= box.y && py < box.y + box.h) t.labels(r, c) = kTrimapUnknown;
    }
  return t;
}

void GaussianComponent::set_covariance(const Eigen::Matrix3d& c) {
  const Eigen::LLT<Eigen::Matrix3d> llt(c);
  if (llt.info() != Eigen::Success) throw std::domain_error("GaussianComponent: covariance is not positive definite");
  cov = c;
  inv = llt.solve(Eigen::Matrix3d::Identity());
  log_det = 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
}

GmmModel fit_gmm(const ColorSamples& pixels, int K, double eps, std::uint64_t seed) {
  const Index n = pixels.rows();
  if (K < 1) throw std::invalid_argument("fit_gmm: K must be >= 1");
  if (n < K) throw std::invalid_argument("fit_gmm: fewer samples than components");
  if (!(eps > 0)) throw std::invalid_argument("fit_gmm: eps must be positive");

  std::mt19937_64 rng(seed);
  std::vector<Color> centers;
  centers.push_back(pixels.row(std::uniform_int_distribution<Index>(0, n - 1)(rng)).transpose());
  Eigen::VectorXd d2(n);
  for (Index i = 0; i < n; ++i) d2[i] = (pixels.row(i).transpose() - centers[0]).squaredNorm();
  GmmModel model;
  while (static_cast<int>(centers.size()) < K) {
    const double total = d2.sum();
    if (!(total > 0)) {
      model.merged = true;
      break;
    }
    double pick = std::uniform_real_distribution<double>(0.0, total)(rng);
    Index chosen = n - 1;
    for (Index i = 0; i < n; ++i) {
      pick -= d2[i];
      if (pick < 0 && d2[i] > 0) {
        chosen = i;
        break;
      }
    }
    while (d2[chosen] <= 0) --chosen;
    centers.push_back(pixels.row(chosen).transpose());
    for (Index i = 0; i < n; ++i) d2[i] = std::min(d2[i], (pixels.row(i).transpose() - centers.back()).squaredNorm());
  }

  const int k_eff = static_cast<int>(centers.size());
  std::vector<int> assign(n, -1);
  for (int iter = 0; iter < 50; ++iter) {
    bool changed = false;
    for (Index i = 0; i < n; ++i) {
      int best = 0;
      double bd = std::numeric_limits<double>::infinity();
      for (int k = 0; k < k_eff; ++k) {
        const double d = (pixels.row(i).transpose() - centers[k]).squaredNorm();
        if (d < bd) {
          bd = d;
          best = k;
        }
      }
      if (assign[i] != best) {
        assign[i] = best;
        changed = true;
      }
    }
    if (!changed) break;
    std::vector<Color> sum(k_eff, Color::Zero());
    std::vector<Index> cnt(k_eff, 0);
    for (Index i = 0; i < n; ++i) {
      sum[assign[i]] += pixels.row(i).transpose();
      ++cnt[assign[i]];
    }
    for (int k = 0; k < k_eff; ++k)
      if (cnt[k] > 0) centers[k] = sum[k] / static_cast<double>(cnt[k]);
  }

  for (int k = 0; k < k_eff; ++k) {
    Index cnt = 0;
    Color mean = Color::Zero();
    for (Index i = 0; i < n; ++i)
      if (assign[i] == k) {
        mean += pixels.row(i).transpose();
        ++cnt;
      }
    if (cnt == 0) continue;
    mean /= static_cast<double>(cnt);
    Eigen::Matrix3d scatter = Eigen::Matrix3d::Zero();
    for (Index i = 0; i < n; ++i)
      if (assign[i] == k) {
        const Color d = pixels.row(i).transpose() - mean;
        scatter += d * d.transpose();
      }
    GaussianComponent g;
    g.weight = static_cast<double>(cnt) / static_cast<double>(n);
    g.mean = mean;
    g.set_covariance(scatter / static_cast<double>(cnt) + eps * Eigen::Matrix3d::Identity());
    model.components.push_back(g);
  }
  if (static_cast<int>(model.components.size()) < K) model.merged = true;
  return model;
}

double gmm_neg_log_likelihood(const GmmModel& model, const Color& color) {
  double best = -std::numeric_limits<double>::infinity();
  std::vector<double> terms;
  terms.reserve(model.components.size());
  for (const auto& g : model.components) {
    if (!(g.weight > 0)) continue;
    terms.push_back(std::log(g.weight) + log_density(g, color));
    best = std::max(best, terms.back());
  }
  if (terms.empty()) throw std::invalid_argument("gmm_neg_log_likelihood: model has no weighted component");
  double s = 0.0;
  for (double t : terms) s += std::exp(t - best);
  return -(best + std::log(s));
}

GmmModel gmm_em_step(const GmmModel& model, const ColorSamples& pixels, double eps, double prior_strength) {
  const Index n = pixels.rows();
  const Index K = model.size();
  if (n == 0) throw std::invalid_argument("gmm_em_step: no samples");
  Eigen::MatrixXd resp = Eigen::MatrixXd::Zero(n, K);
  for (Index i = 0; i < n; ++i) {
    const Color z = pixels.row(i).transpose();
    double best = -std::numeric_limits<double>::infinity();
    for (Index k = 0; k < K; ++k) {
      const auto& g = model.components[k];
      resp(i, k) = g.weight > 0 ? std::log(g.weight) + log_density(g, z) : -std::numeric_limits<double>::infinity();
      best = std::max(best, resp(i, k));
    }
    resp.row(i) = (resp.row(i).array() - best).exp();
    resp.row(i) /= resp.row(i).sum();
  }
  GmmModel out = model;
  for (Index k = 0; k < K; ++k) {
    auto& g = out.components[k];
    const double nk = resp.col(k).sum();
    g.weight = nk / static_cast<double>(n);
    if (nk > 0) g.mean = (pixels.transpose() * resp.col(k)) / nk;
    Eigen::Matrix3d scatter = Eigen::Matrix3d::Zero();
    for (Index i = 0; i < n; ++i) {
      if (resp(i, k) == 0.0) continue;
      const Color d = pixels.row(i).transpose() - g.mean;
      scatter += resp(i, k) * d * d.transpose();
    }
    g.set_covariance((scatter + prior_strength * eps * Eigen::Matrix3d::Identity()) / (nk + prior_strength));
  }
  return out;
}

double gmm_prior_energy(const GmmModel& model, double eps, double prior_strength) {
  double e = 0.0;
  for (const auto& g : model.components) e += g.log_det + eps * g.inv.trace();
  return 0.5 * prior_strength * e;
}

void RefineConfig::validate() const {
  if (!(s_g >= 8)) throw std::invalid_argument("RefineConfig: s_g must be >= 8");
  if (!(delta_s >= 0)) throw std::invalid_argument("RefineConfig: delta_s must be >= 0");
  if (!(sigma_iou >= 0 && sigma_iou <= 1)) throw std::invalid_argument("RefineConfig: sigma_iou must lie in [0, 1]");
  if (grabcut_iters < 1 || gmm_components < 1) throw std::invalid_argument("RefineConfig: grabcut_iters and gmm_components must be >= 1");
  if (!(gamma >= 0) || !(cov_eps > 0) || !(prior_strength > 0))
    throw std::invalid_argument("RefineConfig: need gamma >= 0, cov_eps > 0, prior_strength > 0");
}

double neighbor_beta(const Image& image) {
  check_colour_image(image, "neighbor_beta");
  double sum = 0.0;
  Index count = 0;
  for_each_pair(image.rows(), image.cols(), [&](Index r, Index c, Index r2, Index c2, double) {
    sum += (pixel(image, r, c) - pixel(image, r2, c2)).squaredNorm();
    ++count;
  });
  if (count == 0 || !(sum > 0)) return 0.0;
  return 1.0 / (2.0 * sum / static_cast<double>(count));
}

double grabcut_energy(const Image& image, const SegMask& mask, const GmmModel& fg, const GmmModel& bg, double beta,
                      const RefineConfig& cfg) {
  double e = 0.0;
  for (Index c = 0; c < image.cols(); ++c)
    for (Index r = 0; r < image.rows(); ++r) e += gmm_neg_log_likelihood(mask(r, c) ? fg : bg, pixel(image, r, c));
  for_each_pair(image.rows(), image.cols(), [&](Index r, Index c, Index r2, Index c2, double dist) {
    if (mask(r, c) == mask(r2, c2)) return;
    e += cfg.gamma * std::exp(-beta * (pixel(image, r, c) - pixel(image, r2, c2)).squaredNorm()) / dist;
  });
  e += gmm_prior_energy(fg, cfg.cov_eps, cfg.prior_strength) + gmm_prior_energy(bg, cfg.cov_eps, cfg.prior_strength);
  return e;
}

GrabCutResult grabcut(const Image& image, const BoundingBox& init_box, const RefineConfig& cfg) {
  cfg.validate();
  check_colour_image(image, "grabcut");
  const Index H = image.rows(), W = image.cols();
  if (!init_box.valid() || init_box.x < 0 || init_box.y < 0 || init_box.x + init_box.w > static_cast<double>(W) ||
      init_box.y + init_box.h > static_cast<double>(H))
    throw std::invalid_argument("grabcut: box must lie inside the image");
  const Trimap trimap = make_trimap(W, H, init_box);
  const Index unknown = (trimap.labels.array() == kTrimapUnknown).count();
  if (unknown == 0 || unknown == H * W) throw std::invalid_argument("grabcut: box must leave both unknown and background pixels");

  GrabCutResult res;
  res.mask = trimap.labels;  // unknown pixels start as foreground
  res.beta = neighbor_beta(image);
  const ColorSamples fg0 = gather(image, res.mask, 1), bg0 = gather(image, res.mask, 0);
  res.fg = fit_gmm(fg0, std::min<int>(cfg.gmm_components, static_cast<int>(fg0.rows())), cfg.cov_eps, cfg.seed);
  res.bg = fit_gmm(bg0, std::min<int>(cfg.gmm_components, static_cast<int>(bg0.rows())), cfg.cov_eps, cfg.seed + 1);
  res.energy.push_back(grabcut_energy(image, res.mask, res.fg, res.bg, res.beta, cfg));

  for (int it = 0; it < cfg.grabcut_iters; ++it) {
    const GmmModel fg = gmm_em_step(res.fg, gather(image, res.mask, 1), cfg.cov_eps, cfg.prior_strength);
    const GmmModel bg = gmm_em_step(res.bg, gather(image, res.mask, 0), cfg.cov_eps, cfg.prior_strength);

    MaxFlowGraph graph(static_cast<int>(H * W), static_cast<int>(4 * H * W));
    auto id = [W](Index r, Index c) { return static_cast<int>(r * W + c); };
    for (Index r = 0; r < H; ++r)
      for (Index c = 0; c < W; ++c) {
        if (trimap.labels(r, c) == kTrimapBackground) {
          graph.add_tweights(id(r, c), 0.0, MaxFlowGraph::kInfinity);
          continue;
        }
        const Color z = pixel(image, r, c);
        const double cost_fg = gmm_neg_log_likelihood(fg, z), cost_bg = gmm_neg_log_likelihood(bg, z);
        const double base = std::min(cost_fg, cost_bg);
        // Source side = foreground: cutting the sink link pays the foreground cost.
        graph.add_tweights(id(r, c), cost_bg - base, cost_fg - base);
      }
    for_each_pair(H, W, [&](Index r, Index c, Index r2, Index c2, double dist) {
      const double v = cfg.gamma * std::exp(-res.beta * (pixel(image, r, c) - pixel(image, r2, c2)).squaredNorm()) / dist;
      if (v > 0) graph.add_edge(id(r, c), id(r2, c2), v, v);
    });
    graph.max_flow();

    SegMask next = SegMask::Zero(H, W);
    for (Index r = 0; r < H; ++r)
      for (Index c = 0; c < W; ++c)
        if (trimap.labels(r, c) == kTrimapUnknown && graph.in_source_segment(id(r, c))) next(r, c) = 1;
    if ((next.array() != 0).count() == 0) {
      res.reliable = false;
      return res;
    }
    res.mask = std::move(next);
    res.fg = fg;
    res.bg = bg;
    res.energy.push_back(grabcut_energy(image, res.mask, res.fg, res.bg, res.beta, cfg));
    ++res.rounds;
  }
  return res;
}

BoundingBox mask_to_bbox(const SegMask& mask) {
  const Index H = mask.rows(), W = mask.cols();
  Eigen::Matrix<int, Eigen::Dynamic, Eigen::Dynamic> label = Eigen::Matrix<int, Eigen::Dynamic, Eigen::Dynamic>::Constant(H, W, -1);
  std::vector<std::pair<Index, Index>> stack;
  Index best_size = 0;
  BoundingBox best;
  for (Index r = 0; r < H; ++r)
    for (Index c = 0; c < W; ++c) {
      if (!mask(r, c) || label(r, c) >= 0) continue;
      Index size = 0, r0 = r, r1 = r, c0 = c, c1 = c;
      label(r, c) = 1;
      stack.assign(1, {r, c});
      while (!stack.empty()) {
        const auto [pr, pc] = stack.back();
        stack.pop_back();
        ++size;
        r0 = std::min(r0, pr);
        r1 = std::max(r1, pr);
        c0 = std::min(c0, pc);
        c1 = std::max(c1, pc);
        const Index nr[4] = {pr - 1, pr + 1, pr, pr}, nc[4] = {pc, pc, pc - 1, pc + 1};
        for (int k = 0; k < 4; ++k) {
          if (nr[k] < 0 || nr[k] >= H || nc[k] < 0 || nc[k] >= W) continue;
          if (!mask(nr[k], nc[k]) || label(nr[k], nc[k]) >= 0) continue;
          label(nr[k], nc[k]) = 1;
          stack.push_back({nr[k], nc[k]});
        }
      }
      if (size > best_size) {
        best_size = size;
        best = {static_cast<double>(c0), static_cast<double>(r0), static_cast<double>(c1 - c0 + 1), static_cast<double>(r1 - r0 + 1)};
      }
    }
  if (best_size == 0) throw std::invalid_argument("mask_to_bbox: no foreground");
  return best;
}

bool keep_crude_scale(double iou_value, double sigma, RefineRule rule) {
  const bool above = iou_value > sigma;
  return rule == RefineRule::as_written ? above : !above;
}

RefineResult refine_scale(const Image& frame, double cx, double cy, double s1_width, double s1_height,
                          const RefineConfig& cfg) {
  cfg.validate();
  if (!(s1_width > 0 && s1_height > 0)) throw std::invalid_argument("refine_scale: degenerate s1");
  if (!(cfg.delta_s < 0.5 * std::min(s1_width, s1_height)))
    throw std::invalid_argument("refine_scale: delta_s must be below half the smaller side of s1");
  RefineResult out;
  out.width = s1_width;
  out.height = s1_height;

  const Index sg = static_cast<Index>(std::lround(cfg.s_g));
  const double ext_w = 1.5 * s1_width, ext_h = 1.5 * s1_height;
  const Image crop = sample_patch(frame, cx, cy, ext_w, ext_h, sg, sg);
  auto inner = [&](double side) {
    const double v = std::round(2.0 / 3.0 * (1.0 + cfg.delta_s / side) * cfg.s_g);
    return std::clamp(v, 1.0, static_cast<double>(sg - 2));
  };
  const double bw = inner(s1_width), bh = inner(s1_height);
  const BoundingBox box{0.5 * (static_cast<double>(sg) - bw), 0.5 * (static_cast<double>(sg) - bh), bw, bh};

  const GrabCutResult gc = grabcut(crop, box, cfg);
  out.reliable = gc.reliable;
  if (!gc.reliable) return out;
  const BoundingBox seg = mask_to_bbox(gc.mask);
  out.seg_width = seg.w * ext_w / static_cast<double>(sg);
  out.seg_height = seg.h * ext_h / static_cast<double>(sg);
  if (out.seg_width < 2.0 || out.seg_height < 2.0) return out;
  out.iou = concentric_iou(s1_width, s1_height, out.seg_width, out.seg_height);
  if (!keep_crude_scale(out.iou, cfg.sigma_iou, cfg.rule)) {
    out.width = out.seg_width;
    out.height = out.seg_height;
    out.used_grabcut = true;
  }
  return out;
}

}  // namespace racf
