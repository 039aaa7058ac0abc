#include "commands.hpp"

#include "racf/bench.hpp"
#include "racf/config.hpp"
#include "racf/image_io.hpp"
#include "racf/synth.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <iostream>

namespace racf::cli {

namespace fs = std::filesystem;

namespace {

struct Common {
  std::string config;
  std::string variant = "racf";
  std::uint64_t seed = 0;
  std::string out;
};

void add_common(CLI::App* app, Common& c) {
  app->add_option("--config", c.config, "key = value tracker configuration");
  app->add_option("--variant", c.variant, "racf | racf_minus | racf_minus_minus | bacf_equiv");
  app->add_option("--seed", c.seed, "seed for segmentation initialisation");
  app->add_option("--out", c.out, "output directory")->required();
}

TrackerConfig build_config(const Common& c, const CLI::App* app) {
  TrackerConfig cfg;
  try {
    cfg = make_variant(c.variant);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (!c.config.empty()) apply_config_file(cfg, c.config);
  if (app->count("--seed")) cfg.refine.seed = c.seed;
  return cfg;
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : s) {
    if (ch == ',') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

void write_reports(const fs::path& out, const std::vector<EvalResult>& results, const std::vector<Sequence>& seqs,
                   const std::string& hash, const std::string& variant) {
  for (std::size_t i = 0; i < results.size(); ++i) {
    write_text(out / (results[i].sequence + ".json"), report_json(results[i], hash, variant, seqs[i].attributes));
    write_text(out / (results[i].sequence + ".txt"), format_boxes(results[i].boxes));
  }
  write_text(out / "timing.csv", timing_csv(results));
}

int cmd_track(const Common& c, const CLI::App* app, const std::string& dataset, const std::string& seq, bool overlay) {
  const TrackerConfig cfg = build_config(c, app);
  fs::path dir = dataset.empty() ? fs::path(seq) : fs::path(dataset) / seq;
  if (!fs::is_directory(dir)) throw DataError("unknown sequence '" + seq + "'");
  const Sequence s = load_sequence(dir);
  const fs::path out(c.out);
  const EvalResult r = run_sequence(cfg, s, overlay ? out / "overlay" / s.name : fs::path{});
  write_reports(out, {r}, {s}, config_hash(cfg), c.variant);
  std::printf("%s: %zu frames, precision@20 %.4f, AUC %.4f, %.1f fps\n", s.name.c_str(), r.boxes.size(), r.precision20,
              r.auc, r.fps);
  return kOk;
}

int cmd_eval(const Common& c, const CLI::App* app, const std::string& dataset, const std::string& seqs, int jobs,
             bool overlay) {
  const TrackerConfig cfg = build_config(c, app);
  if (jobs < 1) throw ConfigError("--jobs must be >= 1");
  std::vector<Sequence> loaded;
  for (const auto& p : find_sequences(dataset, split_list(seqs))) loaded.push_back(load_sequence(p));
  const fs::path out(c.out);
  const auto results = run_sequences(cfg, loaded, jobs, overlay ? out / "overlay" : fs::path{});
  const std::string hash = config_hash(cfg);
  write_reports(out, results, loaded, hash, c.variant);
  write_text(out / "results.csv", aggregate_csv(results));
  write_text(out / "summary.json", summary_json(results, hash, c.variant));
  for (const auto& r : results)
    std::printf("%-24s precision@20 %.4f  AUC %.4f  %.1f fps\n", r.sequence.c_str(), r.precision20, r.auc, r.fps);
  return kOk;
}

int cmd_segment(const Common& c, const CLI::App* app, const std::string& image, const std::string& box_text) {
  const TrackerConfig cfg = build_config(c, app);
  BoundingBox box;
  try {
    box = parse_box(box_text);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  Image img;
  try {
    img = read_image(image);
  } catch (const std::runtime_error& e) {
    throw DataError(e.what());
  }
  if (!box.valid() || box.x < 0 || box.y < 0 || box.x + box.w > static_cast<double>(img.cols()) ||
      box.y + box.h > static_cast<double>(img.rows()))
    throw DataError("box " + box_text + " does not lie inside the " + std::to_string(img.cols()) + "x" +
                    std::to_string(img.rows()) + " image");
  const GrabCutResult gc = grabcut(img, box, cfg.refine);
  const BoundingBox b = mask_to_bbox(gc.mask);
  const fs::path out(c.out);
  fs::create_directories(out);
  write_mask((out / "mask.png").string(), gc.mask);
  char line[128];
  std::snprintf(line, sizeof line, "%g,%g,%g,%g\n%s\n", b.x, b.y, b.w, b.h, gc.reliable ? "reliable" : "unreliable");
  write_text(out / "box.txt", line);
  std::printf("%s", line);
  return kOk;
}

int cmd_synth(const SynthSpec& spec, const std::string& out_dir) {
  const fs::path out(out_dir);
  const SynthSequence seq = make_synthetic(spec);
  fs::create_directories(out / "img");
  for (std::size_t i = 0; i < seq.frames.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "%04zu.png", i + 1);
    write_image((out / "img" / name).string(), seq.frames[i]);
  }
  write_text(out / "groundtruth_rect.txt", format_boxes(seq.truth));
  std::printf("wrote %zu frames to %s\n", seq.frames.size(), out.string().c_str());
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args) {
  CLI::App app{"Correlation-filter tracking toolkit"};
  app.require_subcommand(1);

  Common track_c, eval_c, seg_c;
  std::string dataset, seq, seqs, image, box;
  int jobs = 1;
  bool overlay = false;

  auto* track = app.add_subcommand("track", "track one sequence");
  add_common(track, track_c);
  track->add_option("--dataset", dataset, "dataset root");
  track->add_option("--seq", seq, "sequence name under --dataset, or a sequence directory")->required();
  track->add_flag("--overlay", overlay, "write frames with boxes drawn");

  auto* eval = app.add_subcommand("eval", "one-pass evaluation over a dataset");
  add_common(eval, eval_c);
  eval->add_option("--dataset", dataset, "dataset root")->required();
  eval->add_option("--seq", seqs, "comma-separated sequence names (default: all)");
  eval->add_option("--jobs", jobs, "worker threads");
  eval->add_flag("--overlay", overlay, "write frames with boxes drawn");

  auto* segment = app.add_subcommand("segment", "GrabCut one image from a box");
  add_common(segment, seg_c);
  segment->add_option("image", image, "input image")->required();
  segment->add_option("--box", box, "x,y,w,h in 0-based pixels")->required();

  SynthSpec spec;
  std::string synth_out;
  auto* synth = app.add_subcommand("synth", "generate a synthetic sequence");
  synth->add_option("--kind", spec.kind, "translate | zoom | static");
  synth->add_option("--frames", spec.frames);
  synth->add_option("--width", spec.width);
  synth->add_option("--height", spec.height);
  synth->add_option("--target", spec.target, "initial square side, px");
  synth->add_option("--speed", spec.speed, "px per frame");
  synth->add_option("--rate", spec.rate, "zoom factor per frame");
  synth->add_option("--noise", spec.noise, "pixel noise sigma");
  synth->add_option("--seed", spec.seed);
  synth->add_option("--out", synth_out, "output sequence directory")->required();

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*track) return cmd_track(track_c, track, dataset, seq, overlay);
    if (*eval) return cmd_eval(eval_c, eval, dataset, seqs, jobs, overlay);
    if (*segment) return cmd_segment(seg_c, segment, image, box);
    if (*synth) {
      try {
        spec.validate();
      } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
      }
      return cmd_synth(spec, synth_out);
    }
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kDataError;
  } catch (const std::exception& e) {
    std::cerr << "runtime error: " << e.what() << "\n";
    return kRuntimeError;
  }
  return kUsage;
}

}  // namespace racf::cli
