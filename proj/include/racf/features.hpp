#pragma once

#include "racf/tensor.hpp"

#include <array>
#include <string>

namespace racf {

inline constexpr Index kHogChannels = 31;
inline constexpr Index kColorNameChannels = 10;

/// RGB -> color-name probability table, 32768 rows (one per 5-bit RGB bin).
///
/// Row index = (R >> 3) + (G >> 3) * 32 + (B >> 3) * 1024. On disk the table is
/// the 8-byte magic "RACFCN01", little-endian uint32 rows and cols, then
/// rows * cols little-endian float64 values in row-major order.
class ColorNameTable {
 public:
  using Table = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  static constexpr Index kRows = 32768;

  explicit ColorNameTable(Table table);

  /// Table generated from color prototypes (see names()); every row is a
  /// probability vector.
  static const ColorNameTable& builtin();
  static ColorNameTable load(const std::string& path);
  void save(const std::string& path) const;

  static Index row_index(int r, int g, int b) { return (r >> 3) + (g >> 3) * 32 + (b >> 3) * 1024; }
  static const std::array<const char*, kColorNameChannels>& names();

  Index channels() const { return table_.cols(); }
  auto row(Index i) const { return table_.row(i); }
  const Table& table() const { return table_; }

 private:
  Table table_;
};

/// 31-channel FHOG-style cell descriptor (18 contrast-sensitive orientations,
/// 9 contrast-insensitive, 4 texture energies), floor(w / cell) x floor(h / cell).
FeatureTensor extract_hog(const Image& patch, Index cell);

/// Cell-averaged color-name probabilities. A gray patch is broadcast to RGB.
FeatureTensor extract_cn(const Image& patch, Index cell, const ColorNameTable& table = ColorNameTable::builtin());

/// HOG (+ color names for a 3-channel patch when `use_cn`), windowed by a Hann taper.
FeatureTensor compose_features(const Image& patch, Index cell, bool use_cn,
                               const ColorNameTable& table = ColorNameTable::builtin());

using SpatialWeight = Eigen::MatrixXd;

/// Quadratic bowl 1 + rho ((2u / target_w)^2 + (2v / target_h)^2), with (u, v)
/// the integer offsets from cell (h / 2, w / 2).
SpatialWeight make_spatial_weight(Index width, Index height, double target_width, double target_height, double rho);

}  // namespace racf
