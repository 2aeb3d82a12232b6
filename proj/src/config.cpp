#include "parafuzz/config.h"

#include <charconv>
#include <fstream>
#include <sstream>

namespace parafuzz {

namespace {

double to_double(std::string_view key, std::string_view value) {
  std::istringstream in{std::string(value)};
  double v;
  if (!(in >> v) || !(in >> std::ws).eof())
    throw ConfigError(std::string(key) + ": expected a number, got '" + std::string(value) + "'");
  return v;
}

bool to_bool(std::string_view key, std::string_view value) {
  if (value == "true" || value == "1" || value == "on" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "off" || value == "no") return false;
  throw ConfigError(std::string(key) + ": expected true/false");
}

void check(bool ok, const char* key, const char* bounds) {
  if (!ok) throw ConfigError(std::string(key) + ": out of bounds, expected " + bounds);
}

}  // namespace

Pipeline Config::pipeline() const {
  VariableSet vars = variables_path.empty() ? VariableSet{} : load_variables(variables_path);
  return Pipeline{features, endpoint, ParalinguisticFilter(std::move(vars), filter)};
}

void Config::set(std::string_view key, std::string_view value) {
  const auto num = [&] { return to_double(key, value); };
  if (key == "fuzzy.variables") {
    variables_path = std::string(value);
  } else if (key == "framing.window_ms") {
    features.framing.window_ms = num();
  } else if (key == "framing.hop_ms") {
    features.framing.hop_ms = num();
  } else if (key == "features.hf_cutoff_hz") {
    features.hf_cutoff_hz = num();
  } else if (key == "endpoint.open_db") {
    endpoint.open_threshold_db = num();
  } else if (key == "endpoint.close_db") {
    endpoint.close_threshold_db = num();
  } else if (key == "endpoint.min_gap_ms") {
    endpoint.min_gap_ms = num();
  } else if (key == "endpoint.min_segment_ms") {
    endpoint.min_segment_ms = num();
  } else if (key == "recognizer.ambiguity") {
    recognizer.ambiguity_epsilon = num();
  } else if (key == "recognizer.confirmation") {
    recognizer.confirmation_margin = num();
  } else if (key == "recognizer.min_score") {
    recognizer.confirmation_min_score = num();
  } else if (key == "recognizer.oov") {
    recognizer.oov_threshold = num();
  } else if (key == "dtw.band") {
    if (value == "auto") {
      recognizer.band.reset();
    } else if (value == "unbounded") {
      recognizer.band = BandConstraint::unbounded();
    } else {
      std::size_t w = 0;
      const auto* end = value.data() + value.size();
      const auto [ptr, ec] = std::from_chars(value.data(), end, w);
      if (ec != std::errc() || ptr != end)
        throw ConfigError("dtw.band: expected auto, unbounded or a frame count");
      recognizer.band = BandConstraint::width(w);
    }
  } else if (key == "filter.enabled") {
    recognizer.filter_enabled = to_bool(key, value);
  } else if (key == "filter.target_accent_ratio") {
    filter.target_accent_ratio = num();
  } else if (key == "filter.voiced_floor_db") {
    filter.voiced_floor_db = num();
  } else {
    throw ConfigError("unknown config key '" + std::string(key) + "'");
  }
}

void Config::validate() const {
  const auto& f = features.framing;
  check(f.window_ms > 0 && f.window_ms <= 200, "framing.window_ms", "(0, 200]");
  check(f.hop_ms > 0 && f.hop_ms <= f.window_ms, "framing.hop_ms", "(0, window_ms]");
  check(features.hf_cutoff_hz > 0, "features.hf_cutoff_hz", "> 0");
  check(endpoint.open_threshold_db >= -80 && endpoint.open_threshold_db <= 0, "endpoint.open_db",
        "[-80, 0]");
  check(endpoint.close_threshold_db >= -80 && endpoint.close_threshold_db <= 0,
        "endpoint.close_db", "[-80, 0]");
  check(endpoint.open_threshold_db >= endpoint.close_threshold_db, "endpoint.open_db",
        ">= endpoint.close_db");
  check(endpoint.min_gap_ms >= 0, "endpoint.min_gap_ms", ">= 0");
  check(endpoint.min_segment_ms >= 0, "endpoint.min_segment_ms", ">= 0");
  const auto unit = [](double v) { return v >= 0.0 && v <= 1.0; };
  check(unit(recognizer.ambiguity_epsilon), "recognizer.ambiguity", "[0, 1]");
  check(unit(recognizer.confirmation_margin), "recognizer.confirmation", "[0, 1]");
  check(unit(recognizer.confirmation_min_score), "recognizer.min_score", "[0, 1]");
  check(unit(recognizer.oov_threshold), "recognizer.oov", "[0, 1]");
  check(unit(filter.target_accent_ratio), "filter.target_accent_ratio", "[0, 1]");
  check(filter.voiced_floor_db >= -80 && filter.voiced_floor_db <= 0, "filter.voiced_floor_db",
        "[-80, 0]");
}

Config parse_config(std::string_view text) {
  Config c;
  for (const auto& [k, v] : parse_key_values(text)) c.set(k, v);
  c.validate();
  return c;
}

Config load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

}  // namespace parafuzz
