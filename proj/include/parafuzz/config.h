#pragma once

#include <string>
#include <string_view>

#include "parafuzz/kv.h"
#include "parafuzz/recognizer.h"

namespace parafuzz {

/// Flat `section.key = value` settings. Unknown keys and out-of-range values
/// raise ConfigError.
///
///   fuzzy.variables            path to variable definitions (optional)
///   framing.window_ms          25      (0, 200]
///   framing.hop_ms             10      (0, window_ms]
///   features.hf_cutoff_hz      2000    > 0
///   endpoint.open_db           -45     [-80, 0], >= close_db
///   endpoint.close_db          -55     [-80, 0]
///   endpoint.min_gap_ms        200     >= 0
///   endpoint.min_segment_ms    80      >= 0
///   recognizer.ambiguity       0.01    [0, 1]
///   recognizer.confirmation    0.1     [0, 1]
///   recognizer.min_score       0.5     [0, 1]
///   recognizer.oov             0.2     [0, 1]
///   dtw.band                   auto | unbounded | <half width>
///   filter.enabled             true
///   filter.target_accent_ratio 0.45    [0, 1]
///   filter.voiced_floor_db     -60     [-80, 0]
struct Config {
  std::string variables_path;
  FeatureOptions features;
  EndpointOptions endpoint;
  RecognizerConfig recognizer;
  FilterOptions filter;

  Pipeline pipeline() const;
  void set(std::string_view key, std::string_view value);
  void validate() const;
};

Config parse_config(std::string_view text);
Config load_config(const std::string& path);

}  // namespace parafuzz
