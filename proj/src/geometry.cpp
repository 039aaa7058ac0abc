#include "racf/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace racf {

double iou(const BoundingBox& a, const BoundingBox& b) {
  if (!(a.w > 0 && a.h > 0 && b.w > 0 && b.h > 0)) throw std::invalid_argument("iou: boxes need positive extent");
  // Offsets are taken before adding the extents so equal corners give an exact overlap.
  const double ix = std::max(0.0, std::min({a.w, b.w, (a.x - b.x) + a.w, (b.x - a.x) + b.w}));
  const double iy = std::max(0.0, std::min({a.h, b.h, (a.y - b.y) + a.h, (b.y - a.y) + b.h}));
  const double inter = ix * iy;
  return std::min(1.0, inter / (a.area() + b.area() - inter));
}

double concentric_iou(double w1, double h1, double w2, double h2) {
  return iou(BoundingBox::centered(0, 0, w1, h1), BoundingBox::centered(0, 0, w2, h2));
}

BoundingBox parse_box(const std::string& text) {
  std::string s = text;
  std::replace(s.begin(), s.end(), ',', ' ');
  std::istringstream in(s);
  BoundingBox b;
  if (!(in >> b.x >> b.y >> b.w >> b.h)) throw std::invalid_argument("box must be x,y,w,h: '" + text + "'");
  std::string rest;
  if (in >> rest) throw std::invalid_argument("box must be x,y,w,h: '" + text + "'");
  return b;
}

Image sample_patch(const Image& img, double cx, double cy, double src_w, double src_h, Index out_w, Index out_h) {
  if (img.empty()) throw std::invalid_argument("sample_patch: empty image");
  if (out_w < 1 || out_h < 1 || !(src_w > 0) || !(src_h > 0)) throw std::invalid_argument("sample_patch: degenerate window");
  const Index W = img.cols(), H = img.rows();
  const double sx = src_w / static_cast<double>(out_w);
  const double sy = src_h / static_cast<double>(out_h);
  const double x0 = cx - 0.5 * src_w;
  const double y0 = cy - 0.5 * src_h;

  // Precomputed taps per output column / row.
  std::vector<Index> c0(out_w), c1(out_w), r0(out_h), r1(out_h);
  std::vector<double> fx(out_w), fy(out_h);
  auto taps = [](double p, Index n, Index& a, Index& b, double& f) {
    const double fl = std::floor(p);
    f = p - fl;
    const Index i = static_cast<Index>(fl);
    a = std::clamp<Index>(i, 0, n - 1);
    b = std::clamp<Index>(i + 1, 0, n - 1);
  };
  for (Index j = 0; j < out_w; ++j) taps(x0 + (static_cast<double>(j) + 0.5) * sx - 0.5, W, c0[j], c1[j], fx[j]);
  for (Index i = 0; i < out_h; ++i) taps(y0 + (static_cast<double>(i) + 0.5) * sy - 0.5, H, r0[i], r1[i], fy[i]);

  Image out(out_h, out_w, img.channels());
  for (Index d = 0; d < img.channels(); ++d) {
    const auto& src = img[d];
    auto& dst = out[d];
    for (Index j = 0; j < out_w; ++j) {
      for (Index i = 0; i < out_h; ++i) {
        const double top = (1.0 - fx[j]) * src(r0[i], c0[j]) + fx[j] * src(r0[i], c1[j]);
        const double bot = (1.0 - fx[j]) * src(r1[i], c0[j]) + fx[j] * src(r1[i], c1[j]);
        dst(i, j) = (1.0 - fy[i]) * top + fy[i] * bot;
      }
    }
  }
  return out;
}

Image resize_bilinear(const Image& img, Index out_w, Index out_h) {
  return sample_patch(img, 0.5 * static_cast<double>(img.cols()), 0.5 * static_cast<double>(img.rows()),
                      static_cast<double>(img.cols()), static_cast<double>(img.rows()), out_w, out_h);
}

Eigen::MatrixXd to_gray(const Image& img) {
  if (img.channels() == 1) return img[0];
  if (img.channels() != 3) throw std::invalid_argument("to_gray: expected 1 or 3 channels");
  return 0.299 * img[0] + 0.587 * img[1] + 0.114 * img[2];
}

}  // namespace racf
