#pragma once

// Flat `key = value` tracker configuration. Lines starting with '#' and blank
// lines are ignored; unknown keys and malformed values are errors.

#include "racf/tracker.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace racf {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Applies the assignments in `text` on top of `cfg`. `origin` names the
/// source in diagnostics.
void apply_config_text(TrackerConfig& cfg, const std::string& text, const std::string& origin = "config");
void apply_config_file(TrackerConfig& cfg, const std::string& path);

/// Sets one key; throws ConfigError for unknown keys or bad values.
void set_config_value(TrackerConfig& cfg, const std::string& key, const std::string& value);

std::vector<std::string> config_keys();

/// Every key in sorted order, one `key=value` line each, values printed round-trip exact.
std::string canonical_config(const TrackerConfig& cfg);

/// 64-bit FNV-1a of canonical_config, as 16 hex digits.
std::string config_hash(const TrackerConfig& cfg);
std::uint64_t fnv1a64(const std::string& text);

}  // namespace racf
