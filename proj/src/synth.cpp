#include "racf/synth.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <random>

namespace racf {

namespace {

constexpr int kTexCells = 4;
using Color3 = std::array<double, 3>;

struct Scene {
  Image background;
  std::array<Color3, kTexCells * kTexCells> cells;
};

Scene build_scene(const SynthSpec& spec) {
  std::mt19937_64 rng(spec.seed * 0x9E3779B97F4A7C15ULL + 1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Scene sc;
  // Coarse random colour lattice, bilinearly upsampled.
  const Index step = 16;
  const Index gw = spec.width / step + 2, gh = spec.height / step + 2;
  Image coarse(gh, gw, 3);
  for (Index c = 0; c < gw; ++c)
    for (Index r = 0; r < gh; ++r) {
      coarse[0](r, c) = 20.0 + 70.0 * u(rng);
      coarse[1](r, c) = 80.0 + 90.0 * u(rng);
      coarse[2](r, c) = 90.0 + 110.0 * u(rng);
    }
  sc.background = Image(spec.height, spec.width, 3);
  for (Index c = 0; c < spec.width; ++c)
    for (Index r = 0; r < spec.height; ++r) {
      const double fx = static_cast<double>(c) / step, fy = static_cast<double>(r) / step;
      const Index x0 = static_cast<Index>(fx), y0 = static_cast<Index>(fy);
      const double ax = fx - x0, ay = fy - y0;
      for (Index d = 0; d < 3; ++d)
        sc.background[d](r, c) = (1 - ay) * ((1 - ax) * coarse[d](y0, x0) + ax * coarse[d](y0, x0 + 1)) +
                                 ay * ((1 - ax) * coarse[d](y0 + 1, x0) + ax * coarse[d](y0 + 1, x0 + 1));
    }
  for (auto& cell : sc.cells) cell = {170.0 + 85.0 * u(rng), 40.0 + 160.0 * u(rng), 80.0 * u(rng)};
  return sc;
}

double overlap_1d(double a0, double a1, double b0, double b1) { return std::max(0.0, std::min(a1, b1) - std::max(a0, b0)); }

}  // namespace

void SynthSpec::validate() const {
  if (kind != "translate" && kind != "zoom" && kind != "static") throw std::invalid_argument("synth: kind must be translate, zoom or static");
  if (frames < 1 || width < 16 || height < 16) throw std::invalid_argument("synth: need frames >= 1 and a frame of at least 16x16");
  if (!(target >= 4) || target > static_cast<double>(std::min(width, height)))
    throw std::invalid_argument("synth: target side must lie in [4, frame side]");
  if (!(speed >= 0) || !(rate > 0) || !(noise >= 0)) throw std::invalid_argument("synth: bad speed, rate or noise");
}

std::vector<BoundingBox> synth_truth(const SynthSpec& spec) {
  spec.validate();
  const double W = static_cast<double>(spec.width), H = static_cast<double>(spec.height);
  std::vector<BoundingBox> out;
  if (spec.kind == "zoom") {
    for (int k = 0; k < spec.frames; ++k) {
      const double side = spec.target * std::pow(spec.rate, k);
      if (side > std::min(W, H)) throw std::invalid_argument("synth: zoomed target outgrows the frame");
      out.push_back(BoundingBox::centered(0.5 * W, 0.5 * H, side, side));
    }
    return out;
  }
  std::mt19937_64 rng(spec.seed * 0xD1B54A32D192ED03ULL + 7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double half = 0.5 * spec.target;
  double cx = half + (W - 2 * half) * (0.3 + 0.4 * u(rng));
  double cy = half + (H - 2 * half) * (0.3 + 0.4 * u(rng));
  const double angle = 2.0 * std::numbers::pi * u(rng);
  double vx = spec.kind == "translate" ? spec.speed * std::cos(angle) : 0.0;
  double vy = spec.kind == "translate" ? spec.speed * std::sin(angle) : 0.0;
  for (int k = 0; k < spec.frames; ++k) {
    out.push_back(BoundingBox::centered(cx, cy, spec.target, spec.target));
    cx += vx;
    cy += vy;
    // Reflect off the frame so the square stays fully visible.
    if (cx < half) { cx = 2 * half - cx; vx = -vx; }
    if (cx > W - half) { cx = 2 * (W - half) - cx; vx = -vx; }
    if (cy < half) { cy = 2 * half - cy; vy = -vy; }
    if (cy > H - half) { cy = 2 * (H - half) - cy; vy = -vy; }
  }
  return out;
}

namespace {

Image render(const SynthSpec& spec, const Scene& sc, const BoundingBox& box, int index) {
  Image img = sc.background;
  const Index c0 = std::max<Index>(0, static_cast<Index>(std::floor(box.x)));
  const Index c1 = std::min<Index>(spec.width - 1, static_cast<Index>(std::ceil(box.x + box.w)));
  const Index r0 = std::max<Index>(0, static_cast<Index>(std::floor(box.y)));
  const Index r1 = std::min<Index>(spec.height - 1, static_cast<Index>(std::ceil(box.y + box.h)));
  for (Index c = c0; c <= c1; ++c)
    for (Index r = r0; r <= r1; ++r) {
      const double cov = overlap_1d(c, c + 1.0, box.x, box.x + box.w) * overlap_1d(r, r + 1.0, box.y, box.y + box.h);
      if (cov <= 0) continue;
      const double u = std::clamp((c + 0.5 - box.x) / box.w, 0.0, 0.999999);
      const double v = std::clamp((r + 0.5 - box.y) / box.h, 0.0, 0.999999);
      const auto& col = sc.cells[static_cast<int>(v * kTexCells) * kTexCells + static_cast<int>(u * kTexCells)];
      for (Index d = 0; d < 3; ++d) img[d](r, c) = (1 - cov) * img[d](r, c) + cov * col[d];
    }
  std::mt19937_64 rng(spec.seed * 0x94D049BB133111EBULL + static_cast<std::uint64_t>(index) * 0xBF58476D1CE4E5B9ULL + 3);
  std::normal_distribution<double> n(0.0, spec.noise > 0 ? spec.noise : 1.0);
  for (Index d = 0; d < 3; ++d)
    for (Index c = 0; c < spec.width; ++c)
      for (Index r = 0; r < spec.height; ++r) {
        const double v = img[d](r, c) + (spec.noise > 0 ? n(rng) : 0.0);
        img[d](r, c) = std::clamp(std::round(v), 0.0, 255.0);
      }
  return img;
}

}  // namespace

Image synth_frame(const SynthSpec& spec, int index) {
  const auto truth = synth_truth(spec);
  if (index < 0 || index >= spec.frames) throw std::out_of_range("synth_frame: index out of range");
  return render(spec, build_scene(spec), truth[index], index);
}

SynthSequence make_synthetic(const SynthSpec& spec) {
  SynthSequence seq;
  seq.truth = synth_truth(spec);
  const Scene sc = build_scene(spec);
  for (int k = 0; k < spec.frames; ++k) seq.frames.push_back(render(spec, sc, seq.truth[k], k));
  return seq;
}

}  // namespace racf
