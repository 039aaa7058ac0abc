#include "racf/features.hpp"

#include "racf/spectral.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <numbers>

namespace racf {

namespace {

constexpr char kMagic[8] = {'R', 'A', 'C', 'F', 'C', 'N', '0', '1'};

struct Lab {
  double l, a, b;
};

double srgb_to_linear(double c) {
  c /= 255.0;
  return c <= 0.04045 ? c / 12.92 : std::pow((c + 0.055) / 1.055, 2.4);
}

Lab to_lab(double r, double g, double b) {
  const double R = srgb_to_linear(r), G = srgb_to_linear(g), B = srgb_to_linear(b);
  // D65 reference white
  const double x = (0.4124 * R + 0.3576 * G + 0.1805 * B) / 0.95047;
  const double y = (0.2126 * R + 0.7152 * G + 0.0722 * B) / 1.0;
  const double z = (0.0193 * R + 0.1192 * G + 0.9505 * B) / 1.08883;
  auto f = [](double t) { return t > 216.0 / 24389.0 ? std::cbrt(t) : (24389.0 / 27.0 * t + 16.0) / 116.0; };
  const double fx = f(x), fy = f(y), fz = f(z);
  return {116.0 * fy - 16.0, 500.0 * (fx - fy), 200.0 * (fy - fz)};
}

struct Prototype {
  const char* name;
  double r, g, b;
};

constexpr std::array<Prototype, kColorNameChannels> kPrototypes{{
    {"black", 0, 0, 0},
    {"blue", 0, 0, 255},
    {"grey", 128, 128, 128},
    {"green", 0, 170, 0},
    {"orange", 255, 140, 0},
    {"pink", 255, 160, 200},
    {"purple", 128, 0, 160},
    {"red", 230, 0, 0},
    {"white", 255, 255, 255},
    {"yellow", 255, 240, 0},
}};

// Soft assignment width in CIELAB units.
constexpr double kLabSigma = 22.0;

ColorNameTable::Table make_builtin_table() {
  ColorNameTable::Table t(ColorNameTable::kRows, kColorNameChannels);
  std::array<Lab, kColorNameChannels> protos{};
  for (size_t j = 0; j < kPrototypes.size(); ++j) protos[j] = to_lab(kPrototypes[j].r, kPrototypes[j].g, kPrototypes[j].b);
  for (int bb = 0; bb < 32; ++bb)
    for (int gb = 0; gb < 32; ++gb)
      for (int rb = 0; rb < 32; ++rb) {
        const Lab c = to_lab(rb * 8 + 4, gb * 8 + 4, bb * 8 + 4);
        const Index row = rb + gb * 32 + bb * 1024;
        std::array<double, kColorNameChannels> d2{};
        double dmin = INFINITY;
        for (size_t j = 0; j < protos.size(); ++j) {
          const double dl = c.l - protos[j].l, da = c.a - protos[j].a, db = c.b - protos[j].b;
          d2[j] = dl * dl + da * da + db * db;
          dmin = std::min(dmin, d2[j]);
        }
        double sum = 0.0;
        for (size_t j = 0; j < protos.size(); ++j) {
          const double p = std::exp(-(d2[j] - dmin) / (2.0 * kLabSigma * kLabSigma));
          t(row, static_cast<Index>(j)) = p;
          sum += p;
        }
        t.row(row) /= sum;
      }
  return t;
}

template <typename T>
void write_le(std::ostream& out, T v) {
  static_assert(std::endian::native == std::endian::little, "big-endian hosts unsupported");
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_le(std::istream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  return v;
}

// Gradient magnitude and angle in [0, 2 pi); for color input the channel with
// the largest magnitude wins.
void gradients(const Image& patch, Eigen::MatrixXd& mag, Eigen::MatrixXd& ang) {
  const Index H = patch.rows(), W = patch.cols();
  mag = Eigen::MatrixXd::Zero(H, W);
  ang = Eigen::MatrixXd::Zero(H, W);
  for (Index d = 0; d < patch.channels(); ++d) {
    const auto& I = patch[d];
    for (Index c = 0; c < W; ++c) {
      const Index cl = std::max<Index>(c - 1, 0), cr = std::min<Index>(c + 1, W - 1);
      const double sx = (cr - cl) > 0 ? 1.0 / static_cast<double>(cr - cl) : 0.0;
      for (Index r = 0; r < H; ++r) {
        const Index ru = std::max<Index>(r - 1, 0), rd = std::min<Index>(r + 1, H - 1);
        const double sy = (rd - ru) > 0 ? 1.0 / static_cast<double>(rd - ru) : 0.0;
        const double dx = (I(r, cr) - I(r, cl)) * sx / 255.0;
        const double dy = (I(rd, c) - I(ru, c)) * sy / 255.0;
        const double m = std::sqrt(dx * dx + dy * dy);
        if (m > mag(r, c)) {
          mag(r, c) = m;
          double a = std::atan2(dy, dx);
          if (a < 0) a += 2.0 * std::numbers::pi;
          ang(r, c) = a;
        }
      }
    }
  }
}

}  // namespace

ColorNameTable::ColorNameTable(Table table) : table_(std::move(table)) {
  if (table_.rows() != kRows || table_.cols() < 1) throw std::invalid_argument("ColorNameTable: expected 32768 rows");
}

const ColorNameTable& ColorNameTable::builtin() {
  static const ColorNameTable table(make_builtin_table());
  return table;
}

const std::array<const char*, kColorNameChannels>& ColorNameTable::names() {
  static const std::array<const char*, kColorNameChannels> n = [] {
    std::array<const char*, kColorNameChannels> out{};
    for (size_t i = 0; i < kPrototypes.size(); ++i) out[i] = kPrototypes[i].name;
    return out;
  }();
  return n;
}

ColorNameTable ColorNameTable::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open color-name table: " + path);
  char magic[8];
  in.read(magic, 8);
  if (!in || std::memcmp(magic, kMagic, 8) != 0) throw std::runtime_error("bad color-name table header: " + path);
  const auto rows = read_le<std::uint32_t>(in);
  const auto cols = read_le<std::uint32_t>(in);
  if (rows != kRows || cols == 0 || cols > 64) throw std::runtime_error("bad color-name table extents: " + path);
  Table t(rows, cols);
  for (Index i = 0; i < t.size(); ++i) t.data()[i] = read_le<double>(in);
  if (!in) throw std::runtime_error("truncated color-name table: " + path);
  return ColorNameTable(std::move(t));
}

void ColorNameTable::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write color-name table: " + path);
  out.write(kMagic, 8);
  write_le<std::uint32_t>(out, static_cast<std::uint32_t>(table_.rows()));
  write_le<std::uint32_t>(out, static_cast<std::uint32_t>(table_.cols()));
  for (Index i = 0; i < table_.size(); ++i) write_le<double>(out, table_.data()[i]);
}

FeatureTensor extract_hog(const Image& patch, Index cell) {
  if (cell < 1) throw std::invalid_argument("extract_hog: cell must be positive");
  if (patch.channels() != 1 && patch.channels() != 3) throw std::invalid_argument("extract_hog: expected 1 or 3 channels");
  if (patch.rows() < cell || patch.cols() < cell) throw std::invalid_argument("extract_hog: patch smaller than one cell");
  constexpr int kBins = 18;
  const Index ch = patch.rows() / cell, cw = patch.cols() / cell;

  Eigen::MatrixXd mag, ang;
  gradients(patch, mag, ang);

  // Orientation histograms with bilinear spatial and linear orientation voting.
  std::vector<Eigen::MatrixXd> hist(kBins, Eigen::MatrixXd::Zero(ch, cw));
  const double inv_cell = 1.0 / static_cast<double>(cell);
  const double bin_width = 2.0 * std::numbers::pi / kBins;
  for (Index c = 0; c < cw * cell; ++c) {
    const double px = (static_cast<double>(c) + 0.5) * inv_cell - 0.5;
    const Index x0 = static_cast<Index>(std::floor(px));
    const double wx1 = px - static_cast<double>(x0), wx0 = 1.0 - wx1;
    for (Index r = 0; r < ch * cell; ++r) {
      const double m = mag(r, c);
      if (m == 0.0) continue;
      const double py = (static_cast<double>(r) + 0.5) * inv_cell - 0.5;
      const Index y0 = static_cast<Index>(std::floor(py));
      const double wy1 = py - static_cast<double>(y0), wy0 = 1.0 - wy1;
      const double o = ang(r, c) / bin_width;
      const int b0 = static_cast<int>(std::floor(o)) % kBins;
      const int b1 = (b0 + 1) % kBins;
      const double wo1 = o - std::floor(o), wo0 = 1.0 - wo1;
      auto vote = [&](Index y, Index x, double w) {
        if (y < 0 || x < 0 || y >= ch || x >= cw || w <= 0.0) return;
        hist[b0](y, x) += m * w * wo0;
        hist[b1](y, x) += m * w * wo1;
      };
      vote(y0, x0, wy0 * wx0);
      vote(y0, x0 + 1, wy0 * wx1);
      vote(y0 + 1, x0, wy1 * wx0);
      vote(y0 + 1, x0 + 1, wy1 * wx1);
    }
  }

  Eigen::MatrixXd energy = Eigen::MatrixXd::Zero(ch, cw);
  for (int o = 0; o < kBins / 2; ++o) energy += (hist[o] + hist[o + kBins / 2]).cwiseAbs2();

  auto e_at = [&](Index y, Index x) {
    return energy(std::clamp<Index>(y, 0, ch - 1), std::clamp<Index>(x, 0, cw - 1));
  };
  constexpr double kEps = 1e-4;
  constexpr double kClip = 0.2;
  FeatureTensor out(ch, cw, kHogChannels);
  for (Index x = 0; x < cw; ++x) {
    for (Index y = 0; y < ch; ++y) {
      std::array<double, 4> n{};
      int k = 0;
      for (Index dy = -1; dy <= 0; ++dy)
        for (Index dx = -1; dx <= 0; ++dx) {
          const double e = e_at(y + dy, x + dx) + e_at(y + dy + 1, x + dx) + e_at(y + dy, x + dx + 1) + e_at(y + dy + 1, x + dx + 1);
          n[k++] = 1.0 / std::sqrt(e + kEps);
        }
      std::array<double, 4> texture{};
      for (int o = 0; o < kBins; ++o) {
        double s = 0.0;
        for (int i = 0; i < 4; ++i) {
          const double v = std::min(hist[o](y, x) * n[i], kClip);
          s += v;
          texture[i] += v;
        }
        out(y, x, o) = 0.5 * s;
      }
      for (int o = 0; o < kBins / 2; ++o) {
        double s = 0.0;
        for (int i = 0; i < 4; ++i) s += std::min((hist[o](y, x) + hist[o + kBins / 2](y, x)) * n[i], kClip);
        out(y, x, kBins + o) = 0.5 * s;
      }
      for (int i = 0; i < 4; ++i) out(y, x, kBins + kBins / 2 + i) = 0.2357 * texture[i];
    }
  }
  return out;
}

FeatureTensor extract_cn(const Image& patch, Index cell, const ColorNameTable& table) {
  if (cell < 1) throw std::invalid_argument("extract_cn: cell must be positive");
  if (patch.channels() != 1 && patch.channels() != 3) throw std::invalid_argument("extract_cn: expected 1 or 3 channels");
  if (patch.rows() < cell || patch.cols() < cell) throw std::invalid_argument("extract_cn: patch smaller than one cell");
  const Index ch = patch.rows() / cell, cw = patch.cols() / cell;
  const Index D = table.channels();
  const bool gray = patch.channels() == 1;
  auto quant = [](double v) { return static_cast<int>(std::clamp(v, 0.0, 255.0)); };
  FeatureTensor out(ch, cw, D);
  const double inv_area = 1.0 / static_cast<double>(cell * cell);
  Eigen::RowVectorXd acc(D);
  for (Index x = 0; x < cw; ++x)
    for (Index y = 0; y < ch; ++y) {
      acc.setZero();
      for (Index c = x * cell; c < (x + 1) * cell; ++c)
        for (Index r = y * cell; r < (y + 1) * cell; ++r) {
          const int R = quant(patch(r, c, 0));
          const int G = gray ? R : quant(patch(r, c, 1));
          const int B = gray ? R : quant(patch(r, c, 2));
          acc += table.row(ColorNameTable::row_index(R, G, B));
        }
      for (Index d = 0; d < D; ++d) out(y, x, d) = acc[d] * inv_area;
    }
  return out;
}

FeatureTensor compose_features(const Image& patch, Index cell, bool use_cn, const ColorNameTable& table) {
  FeatureTensor feats = extract_hog(patch, cell);
  if (use_cn && patch.channels() == 3) {
    FeatureTensor cn = extract_cn(patch, cell, table);
    for (Index d = 0; d < cn.channels(); ++d) feats.push_back(std::move(cn[d]));
  }
  const FeatureTensor window = hann_window(feats.cols(), feats.rows());
  for (Index d = 0; d < feats.channels(); ++d) feats[d].array() *= window[0].array();
  return feats;
}

SpatialWeight make_spatial_weight(Index width, Index height, double target_width, double target_height, double rho) {
  if (width < 1 || height < 1 || !(target_width > 0) || !(target_height > 0))
    throw std::invalid_argument("make_spatial_weight: dimensions must be positive");
  if (!(rho > 0)) throw std::invalid_argument("make_spatial_weight: rho must be positive");
  SpatialWeight w(height, width);
  for (Index c = 0; c < width; ++c) {
    const double u = 2.0 * static_cast<double>(c - width / 2) / target_width;
    for (Index r = 0; r < height; ++r) {
      const double v = 2.0 * static_cast<double>(r - height / 2) / target_height;
      w(r, c) = 1.0 + rho * (u * u + v * v);
    }
  }
  return w;
}

}  // namespace racf
