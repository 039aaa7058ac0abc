#pragma once

#include <Eigen/Dense>

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace racf {

using Index = Eigen::Index;
using Complex = std::complex<double>;

/// Dense multi-channel 2-D array: one Eigen matrix per channel, each
/// `rows x cols` (rows = height, cols = width). Indexing is (row, col, channel).
template <typename Scalar>
class MultiChannel {
 public:
  using Channel = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

  MultiChannel() = default;
  MultiChannel(Index rows, Index cols, Index channels)
      : rows_(rows), cols_(cols), data_(static_cast<size_t>(channels), Channel::Zero(rows, cols)) {
    if (rows < 0 || cols < 0 || channels < 0) throw std::invalid_argument("MultiChannel: negative extent");
  }
  explicit MultiChannel(std::vector<Channel> channels) : data_(std::move(channels)) {
    if (!data_.empty()) {
      rows_ = data_.front().rows();
      cols_ = data_.front().cols();
      for (const auto& c : data_)
        if (c.rows() != rows_ || c.cols() != cols_)
          throw std::invalid_argument("MultiChannel: channel extents differ");
    }
  }

  Index rows() const { return rows_; }
  Index cols() const { return cols_; }
  Index height() const { return rows_; }
  Index width() const { return cols_; }
  Index channels() const { return static_cast<Index>(data_.size()); }
  Index size() const { return rows_ * cols_ * channels(); }
  bool empty() const { return size() == 0; }

  Channel& operator[](Index d) { return data_[static_cast<size_t>(d)]; }
  const Channel& operator[](Index d) const { return data_[static_cast<size_t>(d)]; }

  Scalar& operator()(Index r, Index c, Index d) { return data_[static_cast<size_t>(d)](r, c); }
  const Scalar& operator()(Index r, Index c, Index d) const { return data_[static_cast<size_t>(d)](r, c); }

  /// Gathers the D-vector at one spatial bin.
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> at(Index r, Index c) const {
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> v(channels());
    for (Index d = 0; d < channels(); ++d) v[d] = data_[static_cast<size_t>(d)](r, c);
    return v;
  }

  void push_back(Channel c) {
    if (data_.empty()) {
      rows_ = c.rows();
      cols_ = c.cols();
    } else if (c.rows() != rows_ || c.cols() != cols_) {
      throw std::invalid_argument("MultiChannel: channel extents differ");
    }
    data_.push_back(std::move(c));
  }

  bool same_shape(const MultiChannel& o) const {
    return rows_ == o.rows_ && cols_ == o.cols_ && channels() == o.channels();
  }

  MultiChannel& operator+=(const MultiChannel& o) {
    check_shape(o, "operator+=");
    for (size_t d = 0; d < data_.size(); ++d) data_[d] += o.data_[d];
    return *this;
  }
  MultiChannel& operator-=(const MultiChannel& o) {
    check_shape(o, "operator-=");
    for (size_t d = 0; d < data_.size(); ++d) data_[d] -= o.data_[d];
    return *this;
  }
  MultiChannel& operator*=(Scalar s) {
    for (auto& c : data_) c *= s;
    return *this;
  }
  friend MultiChannel operator+(MultiChannel a, const MultiChannel& b) { return a += b; }
  friend MultiChannel operator-(MultiChannel a, const MultiChannel& b) { return a -= b; }
  friend MultiChannel operator*(MultiChannel a, Scalar s) { return a *= s; }
  friend MultiChannel operator*(Scalar s, MultiChannel a) { return a *= s; }

  /// Largest absolute entry; 0 for an empty tensor.
  double max_abs() const {
    double m = 0.0;
    for (const auto& c : data_)
      if (c.size() > 0) m = std::max(m, static_cast<double>(c.cwiseAbs().maxCoeff()));
    return m;
  }

  double squared_norm() const {
    double s = 0.0;
    for (const auto& c : data_) s += static_cast<double>(c.cwiseAbs2().sum());
    return s;
  }

  bool all_finite() const {
    for (const auto& c : data_)
      if (!c.allFinite()) return false;
    return true;
  }

  void check_shape(const MultiChannel& o, const char* where) const {
    if (!same_shape(o)) throw std::invalid_argument(std::string(where) + ": shape mismatch");
  }

 private:
  Index rows_ = 0;
  Index cols_ = 0;
  std::vector<Channel> data_;
};

using FeatureTensor = MultiChannel<double>;
using SpectralTensor = MultiChannel<Complex>;

/// 1 or 3 channel image, intensities in [0, 255]. Channel order is R, G, B.
using Image = MultiChannel<double>;

}  // namespace racf
