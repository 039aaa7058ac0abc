#pragma once

#include "racf/tensor.hpp"

#include <cmath>
#include <string>

namespace racf {

/// Axis-aligned box in continuous pixel coordinates; (x, y) is the top-left
/// corner with pixel i covering [i, i + 1).
struct BoundingBox {
  double x = 0.0;
  double y = 0.0;
  double w = 0.0;
  double h = 0.0;

  double cx() const { return x + 0.5 * w; }
  double cy() const { return y + 0.5 * h; }
  double area() const { return w * h; }
  bool valid() const { return std::isfinite(x) && std::isfinite(y) && std::isfinite(w) && std::isfinite(h) && w > 0 && h > 0; }

  static BoundingBox centered(double cx, double cy, double w, double h) { return {cx - 0.5 * w, cy - 0.5 * h, w, h}; }
  bool operator==(const BoundingBox&) const = default;
};

/// Intersection over union; both boxes must have positive extent.
double iou(const BoundingBox& a, const BoundingBox& b);

/// IoU of two sizes placed on a common center.
double concentric_iou(double w1, double h1, double w2, double h2);

/// Parses "x,y,w,h".
BoundingBox parse_box(const std::string& text);

/// Bilinear resampling of the source window centered at (cx, cy) with extent
/// (src_w, src_h) onto an out_w x out_h grid. Samples outside the image
/// replicate the edge pixels.
Image sample_patch(const Image& img, double cx, double cy, double src_w, double src_h, Index out_w, Index out_h);

/// Bilinear resize of a whole image.
Image resize_bilinear(const Image& img, Index out_w, Index out_h);

/// Luminance (0.299 R + 0.587 G + 0.114 B); a gray image is returned as is.
Eigen::MatrixXd to_gray(const Image& img);

}  // namespace racf
