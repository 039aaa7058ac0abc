#pragma once

// Sequence directories (OTB / UAV123 layout) and report writing.
//
//   <seq>/img/0001.jpg ...            frames, sorted by file name
//   <seq>/groundtruth_rect.txt        x,y,w,h per frame, 1-based corners,
//                                     comma, tab or space separated; NaN rows allowed
//   <seq>/attributes.txt              optional tags

#include "racf/metrics.hpp"
#include "racf/tracker.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace racf {

class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Sequence {
  std::string name;
  std::filesystem::path dir;
  std::vector<std::filesystem::path> frames;
  std::vector<BoundingBox> truth;  ///< 0-based corners
  std::vector<std::string> attributes;
};

/// Parses ground-truth text; converts 1-based corners to 0-based.
std::vector<BoundingBox> parse_groundtruth(const std::string& text, const std::string& origin);
std::string format_boxes(const std::vector<BoundingBox>& boxes);  ///< 1-based x,y,w,h lines

Sequence load_sequence(const std::filesystem::path& dir);

/// Sequence directories directly under `root`, sorted by name, optionally
/// restricted to `names`. A name absent from the dataset is a DataError.
std::vector<std::filesystem::path> find_sequences(const std::filesystem::path& root, const std::vector<std::string>& names);

/// One-pass evaluation of a loaded sequence. When `overlay_dir` is non-empty,
/// every frame is written there with the predicted (red) and true (green) boxes.
EvalResult run_sequence(const TrackerConfig& cfg, const Sequence& seq, const std::filesystem::path& overlay_dir = {});

/// Runs the sequences on up to `jobs` threads; results keep the input order.
std::vector<EvalResult> run_sequences(const TrackerConfig& cfg, const std::vector<Sequence>& seqs, int jobs,
                                      const std::filesystem::path& overlay_root = {});

/// Per-sequence JSON report; timing is kept out so reports are reproducible.
std::string report_json(const EvalResult& r, const std::string& config_hash, const std::string& variant,
                        const std::vector<std::string>& attributes = {});
/// Header plus one row per sequence.
std::string aggregate_csv(const std::vector<EvalResult>& results);
/// Mean precision@20 / AUC over sequences.
std::string summary_json(const std::vector<EvalResult>& results, const std::string& config_hash, const std::string& variant);
std::string timing_csv(const std::vector<EvalResult>& results);

void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace racf
