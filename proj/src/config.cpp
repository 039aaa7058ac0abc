#include "racf/config.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace racf {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& v) {
  double out = 0.0;
  const auto r = std::from_chars(v.data(), v.data() + v.size(), out);
  if (r.ec != std::errc() || r.ptr != v.data() + v.size()) throw ConfigError("'" + key + "': not a number: '" + v + "'");
  return out;
}

long long parse_int(const std::string& key, const std::string& v) {
  long long out = 0;
  const auto r = std::from_chars(v.data(), v.data() + v.size(), out);
  if (r.ec != std::errc() || r.ptr != v.data() + v.size()) throw ConfigError("'" + key + "': not an integer: '" + v + "'");
  return out;
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "on") return true;
  if (v == "false" || v == "0" || v == "off") return false;
  throw ConfigError("'" + key + "': not a boolean: '" + v + "'");
}

std::string fmt_double(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

struct Field {
  std::function<void(TrackerConfig&, const std::string&, const std::string&)> set;
  std::function<std::string(const TrackerConfig&)> get;
};

template <typename T>
Field real(T TrackerConfig::*part, double T::*member) {
  return {[=](TrackerConfig& c, const std::string& k, const std::string& v) { (c.*part).*member = parse_double(k, v); },
          [=](const TrackerConfig& c) { return fmt_double((c.*part).*member); }};
}

template <typename T, typename I>
Field integer(T TrackerConfig::*part, I T::*member) {
  return {[=](TrackerConfig& c, const std::string& k, const std::string& v) { (c.*part).*member = static_cast<I>(parse_int(k, v)); },
          [=](const TrackerConfig& c) { return std::to_string((c.*part).*member); }};
}

Field flag(bool TrackerConfig::*member) {
  return {[=](TrackerConfig& c, const std::string& k, const std::string& v) { c.*member = parse_bool(k, v); },
          [=](const TrackerConfig& c) { return std::string(c.*member ? "true" : "false"); }};
}

const std::map<std::string, Field>& fields() {
  using C = TrackerConfig;
  static const std::map<std::string, Field> table = {
      {"eta", real(&C::core, &CoreConfig::eta)},
      {"theta", real(&C::core, &CoreConfig::theta)},
      {"tau", real(&C::core, &CoreConfig::tau)},
      {"lambda", real(&C::core, &CoreConfig::lambda)},
      {"mu0", real(&C::core, &CoreConfig::mu0)},
      {"beta", real(&C::core, &CoreConfig::beta)},
      {"mu_max", real(&C::core, &CoreConfig::mu_max)},
      {"admm_iters", integer(&C::core, &CoreConfig::admm_iters)},
      {"alpha", real(&C::core, &CoreConfig::alpha)},
      {"cell", integer(&C::features, &FeatureConfig::cell)},
      {"use_cn", {[](C& c, const std::string& k, const std::string& v) { c.features.use_cn = parse_bool(k, v); },
                  [](const C& c) { return std::string(c.features.use_cn ? "true" : "false"); }}},
      {"padding", real(&C::features, &FeatureConfig::padding)},
      {"rho", real(&C::features, &FeatureConfig::rho)},
      {"label_sigma_factor", real(&C::features, &FeatureConfig::label_sigma_factor)},
      {"min_cells", integer(&C::features, &FeatureConfig::min_cells)},
      {"max_cells", integer(&C::features, &FeatureConfig::max_cells)},
      {"scale_count", integer(&C::scale, &ScaleFilterConfig::num_scales)},
      {"scale_step", real(&C::scale, &ScaleFilterConfig::step)},
      {"scale_sigma_factor", real(&C::scale, &ScaleFilterConfig::sigma_factor)},
      {"scale_lambda", real(&C::scale, &ScaleFilterConfig::lambda)},
      {"scale_lr", real(&C::scale, &ScaleFilterConfig::learning_rate)},
      {"scale_template_area", real(&C::scale, &ScaleFilterConfig::max_template_area)},
      {"scale_cell", integer(&C::scale, &ScaleFilterConfig::cell)},
      {"min_side", real(&C::scale, &ScaleFilterConfig::min_side)},
      {"s_g", real(&C::refine, &RefineConfig::s_g)},
      {"delta_s", real(&C::refine, &RefineConfig::delta_s)},
      {"sigma_iou", real(&C::refine, &RefineConfig::sigma_iou)},
      {"grabcut_iters", integer(&C::refine, &RefineConfig::grabcut_iters)},
      {"gmm_components", integer(&C::refine, &RefineConfig::gmm_components)},
      {"gamma", real(&C::refine, &RefineConfig::gamma)},
      {"cov_eps", real(&C::refine, &RefineConfig::cov_eps)},
      {"gmm_prior_strength", real(&C::refine, &RefineConfig::prior_strength)},
      {"refine_seed", integer(&C::refine, &RefineConfig::seed)},
      {"refine_rule",
       {[](C& c, const std::string& k, const std::string& v) {
          if (v == "as_written") c.refine.rule = RefineRule::as_written;
          else if (v == "prose_reading") c.refine.rule = RefineRule::prose_reading;
          else throw ConfigError("'" + k + "': expected as_written or prose_reading, got '" + v + "'");
        },
        [](const C& c) { return std::string(c.refine.rule == RefineRule::as_written ? "as_written" : "prose_reading"); }}},
      {"enable_refine", flag(&C::enable_refine)},
      {"enable_spatial_temporal", flag(&C::enable_spatial_temporal)},
      {"enable_scale", flag(&C::enable_scale)},
      {"refine_every",
       {[](C& c, const std::string& k, const std::string& v) { c.refine_every = static_cast<int>(parse_int(k, v)); },
        [](const C& c) { return std::to_string(c.refine_every); }}},
  };
  return table;
}

}  // namespace

void set_config_value(TrackerConfig& cfg, const std::string& key, const std::string& value) {
  const auto& t = fields();
  const auto it = t.find(key);
  if (it == t.end()) throw ConfigError("unknown key '" + key + "'");
  it->second.set(cfg, key, value);
}

void apply_config_text(TrackerConfig& cfg, const std::string& text, const std::string& origin) {
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string s = trim(line);
    if (s.empty() || s[0] == '#') continue;
    const auto eq = s.find('=');
    const std::string where = origin + ":" + std::to_string(lineno) + ": ";
    if (eq == std::string::npos) throw ConfigError(where + "expected key = value");
    try {
      set_config_value(cfg, trim(s.substr(0, eq)), trim(s.substr(eq + 1)));
    } catch (const ConfigError& e) {
      throw ConfigError(where + e.what());
    }
  }
  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(origin + ": " + e.what());
  }
}

void apply_config_file(TrackerConfig& cfg, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  apply_config_text(cfg, ss.str(), path);
}

std::vector<std::string> config_keys() {
  std::vector<std::string> out;
  for (const auto& [k, _] : fields()) out.push_back(k);
  return out;
}

std::string canonical_config(const TrackerConfig& cfg) {
  std::string out;
  for (const auto& [k, f] : fields()) out += k + "=" + f.get(cfg) + "\n";
  return out;
}

std::uint64_t fnv1a64(const std::string& text) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string config_hash(const TrackerConfig& cfg) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(canonical_config(cfg))));
  return buf;
}

}  // namespace racf
