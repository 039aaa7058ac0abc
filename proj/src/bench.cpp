#include "racf/bench.hpp"

#include "racf/image_io.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

namespace racf {

namespace fs = std::filesystem;

namespace {

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw DataError("cannot read '" + p.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bool is_image(const fs::path& p) {
  std::string ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return ext == ".jpg" || ext == ".jpeg" || ext == ".png" || ext == ".bmp" || ext == ".ppm" || ext == ".pgm";
}

nlohmann::json curve_json(const Curve& c) { return {{"thresholds", c.thresholds}, {"values", c.values}}; }

std::string fmt(double v) {
  std::ostringstream ss;
  ss.precision(17);
  ss << v;
  return ss.str();
}

}  // namespace

std::vector<BoundingBox> parse_groundtruth(const std::string& text, const std::string& origin) {
  std::vector<BoundingBox> out;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    for (char& c : line)
      if (c == ',' || c == '\t' || c == ';' || c == '\r') c = ' ';
    if (line.find_first_not_of(' ') == std::string::npos) continue;
    std::istringstream ls(line);
    std::vector<double> v;
    std::string tok;
    while (ls >> tok) {
      char* end = nullptr;
      const double x = std::strtod(tok.c_str(), &end);
      if (end == tok.c_str() || *end != '\0') throw DataError(origin + ":" + std::to_string(lineno) + ": bad number '" + tok + "'");
      v.push_back(x);
    }
    if (v.size() != 4) throw DataError(origin + ":" + std::to_string(lineno) + ": expected x,y,w,h");
    out.push_back({v[0] - 1.0, v[1] - 1.0, v[2], v[3]});
  }
  return out;
}

std::string format_boxes(const std::vector<BoundingBox>& boxes) {
  std::string out;
  for (const auto& b : boxes) out += fmt(b.x + 1.0) + "," + fmt(b.y + 1.0) + "," + fmt(b.w) + "," + fmt(b.h) + "\n";
  return out;
}

Sequence load_sequence(const fs::path& dir) {
  Sequence s;
  s.dir = dir;
  s.name = dir.filename().string();
  if (s.name.empty()) s.name = dir.parent_path().filename().string();
  const fs::path img = dir / "img", gt = dir / "groundtruth_rect.txt";
  if (!fs::is_directory(img)) throw DataError("'" + dir.string() + "': missing img/ directory");
  if (!fs::is_regular_file(gt)) throw DataError("'" + dir.string() + "': missing groundtruth_rect.txt");
  for (const auto& e : fs::directory_iterator(img))
    if (e.is_regular_file() && is_image(e.path())) s.frames.push_back(e.path());
  std::sort(s.frames.begin(), s.frames.end());
  s.truth = parse_groundtruth(read_file(gt), gt.string());
  if (s.frames.empty()) throw DataError("'" + img.string() + "': no frames");
  if (s.frames.size() != s.truth.size())
    throw DataError("'" + dir.string() + "': " + std::to_string(s.frames.size()) + " frames but " +
                    std::to_string(s.truth.size()) + " ground-truth rows");
  if (!s.truth[0].valid()) throw DataError(gt.string() + ":1: first box must be valid");
  const fs::path att = dir / "attributes.txt";
  if (fs::is_regular_file(att)) {
    std::string t = read_file(att);
    for (char& c : t)
      if (c == ',' || c == '\n' || c == '\r' || c == '\t') c = ' ';
    std::istringstream ts(t);
    std::string tag;
    while (ts >> tag) s.attributes.push_back(tag);
  }
  return s;
}

std::vector<fs::path> find_sequences(const fs::path& root, const std::vector<std::string>& names) {
  if (!fs::is_directory(root)) throw DataError("dataset root '" + root.string() + "' is not a directory");
  std::vector<fs::path> out;
  if (!names.empty()) {
    for (const auto& n : names) {
      const fs::path p = root / n;
      if (!fs::is_directory(p)) throw DataError("unknown sequence '" + n + "' under '" + root.string() + "'");
      out.push_back(p);
    }
    return out;
  }
  for (const auto& e : fs::directory_iterator(root))
    if (e.is_directory() && fs::is_directory(e.path() / "img") && fs::is_regular_file(e.path() / "groundtruth_rect.txt"))
      out.push_back(e.path());
  std::sort(out.begin(), out.end());
  if (out.empty()) throw DataError("no sequences under '" + root.string() + "'");
  return out;
}

EvalResult run_sequence(const TrackerConfig& cfg, const Sequence& seq, const fs::path& overlay_dir) {
  auto loader = [&](std::size_t i) {
    try {
      return read_image(seq.frames[i].string());
    } catch (const std::runtime_error& e) {
      throw DataError(e.what());
    }
  };
  EvalResult r = run_ope(cfg, seq.name, seq.frames.size(), loader, seq.truth);
  if (!overlay_dir.empty()) {
    fs::create_directories(overlay_dir);
    for (std::size_t i = 0; i < seq.frames.size(); ++i) {
      Image img = loader(i);
      if (seq.truth[i].valid()) img = draw_box(img, seq.truth[i], 0, 255, 0);
      img = draw_box(img, r.boxes[i], 255, 0, 0);
      char name[32];
      std::snprintf(name, sizeof name, "%04zu.png", i + 1);
      write_image((overlay_dir / name).string(), img);
    }
  }
  return r;
}

std::vector<EvalResult> run_sequences(const TrackerConfig& cfg, const std::vector<Sequence>& seqs, int jobs,
                                      const fs::path& overlay_root) {
  std::vector<EvalResult> results(seqs.size());
  std::vector<std::exception_ptr> errors(seqs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < seqs.size(); i = next++) {
      try {
        results[i] = run_sequence(cfg, seqs[i], overlay_root.empty() ? fs::path{} : overlay_root / seqs[i].name);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t n = std::clamp<std::size_t>(static_cast<std::size_t>(std::max(jobs, 1)), 1, std::max<std::size_t>(seqs.size(), 1));
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < n; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  return results;
}

std::string report_json(const EvalResult& r, const std::string& config_hash, const std::string& variant,
                        const std::vector<std::string>& attributes) {
  nlohmann::json j;
  j["sequence"] = r.sequence;
  j["config_hash"] = config_hash;
  j["variant"] = variant;
  j["frames"] = r.boxes.size();
  j["evaluated_frames"] = r.evaluated_frames;
  j["precision_curve"] = curve_json(r.precision);
  j["success_curve"] = curve_json(r.success);
  j["precision_at_20"] = r.precision20;
  j["auc"] = r.auc;
  j["mean_overlap"] = r.mean_overlap;
  j["mean_center_error"] = r.mean_error;
  j["attributes"] = attributes;
  j["fps_report"] = "timing.csv";
  return j.dump(2) + "\n";
}

std::string aggregate_csv(const std::vector<EvalResult>& results) {
  std::string out = "sequence,frames,evaluated_frames,precision_at_20,auc,mean_overlap,mean_center_error\n";
  for (const auto& r : results)
    out += r.sequence + "," + std::to_string(r.boxes.size()) + "," + std::to_string(r.evaluated_frames) + "," +
           fmt(r.precision20) + "," + fmt(r.auc) + "," + fmt(r.mean_overlap) + "," + fmt(r.mean_error) + "\n";
  return out;
}

std::string summary_json(const std::vector<EvalResult>& results, const std::string& config_hash, const std::string& variant) {
  double p = 0.0, a = 0.0;
  for (const auto& r : results) {
    p += r.precision20;
    a += r.auc;
  }
  const double n = results.empty() ? 1.0 : static_cast<double>(results.size());
  nlohmann::json j;
  j["config_hash"] = config_hash;
  j["variant"] = variant;
  j["sequences"] = results.size();
  j["mean_precision_at_20"] = p / n;
  j["mean_auc"] = a / n;
  return j.dump(2) + "\n";
}

std::string timing_csv(const std::vector<EvalResult>& results) {
  std::string out = "sequence,fps\n";
  for (const auto& r : results) out += r.sequence + "," + fmt(r.fps) + "\n";
  return out;
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  out << text;
}

}  // namespace racf
