#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "parafuzz/config.h"
#include "parafuzz/synth.h"

namespace parafuzz::app {

enum ExitCode : int { kOk = 0, kError = 1, kOutOfVocabulary = 2 };

enum class Format { kTable, kRecords };

struct Io {
  std::ostream& out;
  std::ostream& err;
  std::istream& in;
};

struct Context {
  Config config;
  Format format = Format::kTable;
  std::uint64_t seed = 7;
  bool verbose = false;
};

struct EnrollArgs {
  std::optional<std::string> lexicon_dir;
  std::string word;
  std::vector<std::string> audio;
  std::string store_path;
};

struct AnalyzeArgs {
  std::string input;
  std::optional<std::string> store_path;
};

struct FilterArgs {
  std::string input;
  std::optional<std::string> store_path;
  /// Normalized feature dump destination.
  std::optional<std::string> features_path;
  /// Raw (unfiltered) feature dump destination.
  std::optional<std::string> raw_features_path;
};

struct RecognizeArgs {
  std::string input;
  std::string store_path;
  bool interactive = false;
  bool no_filter = false;
};

struct SynthArgs {
  std::optional<std::string> spec_path;
  std::string out_dir;
  std::string grid = "default";
  bool homophones = false;
};

struct EvalArgs {
  std::string store_path;
  std::string manifest_path;
  bool with_filter = true;
};

int cmd_enroll(const EnrollArgs& args, const Context& ctx, Io io);
int cmd_analyze(const AnalyzeArgs& args, const Context& ctx, Io io);
int cmd_filter(const FilterArgs& args, const Context& ctx, Io io);
int cmd_recognize(const RecognizeArgs& args, const Context& ctx, Io io);
int cmd_synth(const SynthArgs& args, const Context& ctx, Io io);
int cmd_eval(const EvalArgs& args, const Context& ctx, Io io);

/// Lexicon word specs from JSON: [{"label", "seed", "segments": [{"duration_ms",
/// "band_profile": [8], "amplitude"}]}]. Throws SynthError naming the field.
std::vector<WordSpec> parse_lexicon(const std::string& json_text);

struct ManifestRow {
  std::string filename;
  std::string label;
  PerturbationSpec perturbation;
};

/// Tab-separated: filename, label, stretch, gain_db, tilt, with a header row.
std::vector<ManifestRow> read_manifest(const std::string& path);
void write_manifest(std::ostream& out, const std::vector<ManifestRow>& rows);

struct AxisTally {
  std::size_t total = 0;
  std::size_t correct = 0;
  double accuracy() const { return total ? static_cast<double>(correct) / total : 0.0; }
};

struct EvalReport {
  bool with_filter = true;
  AxisTally overall;
  std::map<double, AxisTally> by_stretch, by_gain, by_tilt;
  std::vector<std::string> missing;
};

/// Scores every manifest clip (paths relative to the manifest directory).
EvalReport run_eval(const TemplateStore& store, const std::string& manifest_path,
                    const Pipeline& pipeline, RecognizerConfig config);

}  // namespace parafuzz::app
