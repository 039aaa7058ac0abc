#include "racf/image_io.hpp"

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>

#include <algorithm>
#include <cmath>

namespace racf {

Image read_image(const std::string& path) {
  const cv::Mat m = cv::imread(path, cv::IMREAD_UNCHANGED);
  if (m.empty()) throw std::runtime_error("cannot read image '" + path + "'");
  cv::Mat m8;
  if (m.depth() == CV_16U) m.convertTo(m8, CV_8U, 1.0 / 257.0);
  else m8 = m;
  if (m8.depth() != CV_8U) throw std::runtime_error("unsupported pixel depth in '" + path + "'");
  const Index H = m8.rows, W = m8.cols;
  if (m8.channels() == 1) {
    Image out(H, W, 1);
    for (int r = 0; r < m8.rows; ++r)
      for (int c = 0; c < m8.cols; ++c) out[0](r, c) = m8.at<std::uint8_t>(r, c);
    return out;
  }
  if (m8.channels() != 3 && m8.channels() != 4) throw std::runtime_error("unsupported channel count in '" + path + "'");
  Image out(H, W, 3);
  const int stride = m8.channels();
  for (int r = 0; r < m8.rows; ++r) {
    const std::uint8_t* row = m8.ptr<std::uint8_t>(r);
    for (int c = 0; c < m8.cols; ++c) {
      // OpenCV stores BGR(A).
      out[0](r, c) = row[c * stride + 2];
      out[1](r, c) = row[c * stride + 1];
      out[2](r, c) = row[c * stride + 0];
    }
  }
  return out;
}

void write_image(const std::string& path, const Image& img) {
  if (img.empty() || (img.channels() != 1 && img.channels() != 3)) throw std::invalid_argument("write_image: need 1 or 3 channels");
  const int H = static_cast<int>(img.rows()), W = static_cast<int>(img.cols());
  auto q = [](double v) { return static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L)); };
  cv::Mat m(H, W, img.channels() == 1 ? CV_8UC1 : CV_8UC3);
  for (int r = 0; r < H; ++r) {
    std::uint8_t* row = m.ptr<std::uint8_t>(r);
    for (int c = 0; c < W; ++c) {
      if (img.channels() == 1) {
        row[c] = q(img[0](r, c));
      } else {
        row[3 * c + 0] = q(img[2](r, c));
        row[3 * c + 1] = q(img[1](r, c));
        row[3 * c + 2] = q(img[0](r, c));
      }
    }
  }
  if (!cv::imwrite(path, m)) throw std::runtime_error("cannot write image '" + path + "'");
}

void write_mask(const std::string& path, const SegMask& mask) {
  Image img(mask.rows(), mask.cols(), 1);
  img[0] = mask.cast<double>() * 255.0;
  img[0] = img[0].cwiseMin(255.0);
  write_image(path, img);
}

SegMask mask_from_image(const Image& img) {
  const Eigen::MatrixXd g = to_gray(img);
  return (g.array() >= 128.0).cast<std::uint8_t>().matrix();
}

Image draw_box(const Image& img, const BoundingBox& box, double r, double g, double b) {
  Image out = img;
  if (out.channels() == 1) out = Image(std::vector<Eigen::MatrixXd>{img[0], img[0], img[0]});
  const Index H = out.rows(), W = out.cols();
  const double col[3] = {r, g, b};
  const Index x0 = std::lround(box.x), y0 = std::lround(box.y);
  const Index x1 = std::lround(box.x + box.w) - 1, y1 = std::lround(box.y + box.h) - 1;
  auto put = [&](Index y, Index x) {
    if (x < 0 || y < 0 || x >= W || y >= H) return;
    for (Index d = 0; d < 3; ++d) out[d](y, x) = col[d];
  };
  for (Index x = x0; x <= x1; ++x) {
    put(y0, x);
    put(y1, x);
  }
  for (Index y = y0; y <= y1; ++y) {
    put(y, x0);
    put(y, x1);
  }
  return out;
}

}  // namespace racf
