#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "parafuzz/audio.h"
#include "parafuzz/dtw.h"
#include "parafuzz/features.h"
#include "parafuzz/filter.h"

namespace parafuzz {

class RecognizerError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Front end shared by enrollment and recognition: framing, features,
/// endpointing and the paralinguistic filter.
struct Pipeline {
  FeatureOptions features;
  EndpointOptions endpoint;
  ParalinguisticFilter filter;

  /// Filter configured for the band layout of the given sample rate.
  ParalinguisticFilter filter_for(int sample_rate) const;
  std::vector<Segment> segments(const AudioClip& clip) const;
};

/// An enrolled exemplar. `raw_frames` is the unfiltered endpointed segment;
/// `frames` is its normalization against the current lexicon reference.
struct Template {
  std::string word;
  FrameSequence frames;
  std::size_t duration_frames = 0;
  std::string source;
  FrameSequence raw_frames;
};

/// Enrolled templates plus the lexicon reference point (mean raw duration and
/// mean raw segment energy) every template is normalized toward.
class TemplateStore {
 public:
  static constexpr int kSchemaVersion = 1;

  const std::vector<Template>& templates() const { return templates_; }
  bool empty() const { return templates_.empty(); }
  std::size_t size() const { return templates_.size(); }

  double mean_duration_frames() const { return mean_duration_; }
  double mean_energy_db() const { return mean_energy_; }
  SegmentReference reference() const { return {mean_duration_, mean_energy_}; }

  /// Sorted unique word labels.
  std::vector<std::string> words() const;
  bool contains(const std::string& word) const;

  /// Appends a raw template, recomputes the lexicon reference, and
  /// re-normalizes every template against it.
  void add(std::string word, FrameSequence raw_frames, std::string source,
           const ParalinguisticFilter& filter);

  /// Rebuilds from persisted templates as-is (no re-normalization).
  static TemplateStore restore(std::vector<Template> templates, double mean_duration_frames,
                               double mean_energy_db);

 private:
  std::vector<Template> templates_;
  double mean_duration_ = 0.0;
  double mean_energy_ = 0.0;
};

std::string normalize_label(std::string word);

/// Each clip must endpoint to exactly one segment.
void enroll(const std::string& word, const std::vector<AudioClip>& clips, TemplateStore& store,
            const Pipeline& pipeline, const std::string& source = "");

/// exp(-dtw_distance): the geometric mean of per-step similarities exp(-c).
double match_score(const FrameSequence& segment_frames, const FrameSequence& template_frames,
                   std::optional<BandConstraint> band = std::nullopt);

struct RecognizerConfig {
  double ambiguity_epsilon = 0.01;
  double confirmation_margin = 0.1;
  double confirmation_min_score = 0.5;
  double oov_threshold = 0.2;
  bool filter_enabled = true;
  /// Empty selects BandConstraint::automatic per alignment.
  std::optional<BandConstraint> band;
};

struct Hypothesis {
  std::string word;
  double score = 0.0;

  bool operator==(const Hypothesis&) const = default;
};

struct RecognitionResult {
  std::size_t segment_id = 0;
  std::size_t start_frame = 0;
  std::size_t end_frame = 0;
  std::vector<Hypothesis> hypotheses;
  double confidence = 0.0;
  bool ambiguous = false;
  bool needs_confirmation = false;
  bool out_of_vocabulary = false;
  /// Side channel of the first filtering pass; absent with the filter off.
  std::optional<ParalinguisticRecord> record;

  const Hypothesis& top() const { return hypotheses.front(); }
};

/// Ranks per-word scores (max over that word's templates) and sets flags.
RecognitionResult rank(std::vector<Hypothesis> per_template, const RecognizerConfig& config);

std::vector<RecognitionResult> recognize(const AudioClip& clip, const TemplateStore& store,
                                         const Pipeline& pipeline,
                                         const RecognizerConfig& config = {});

/// Recognition of already endpointed segments (clip sample rate given for the
/// filter's band layout).
std::vector<RecognitionResult> recognize_segments(const std::vector<Segment>& segments,
                                                  int sample_rate, const TemplateStore& store,
                                                  const Pipeline& pipeline,
                                                  const RecognizerConfig& config = {});

enum class Answer { kYes, kNo };

struct TranscriptEntry {
  std::size_t segment_id = 0;
  std::string word;  // empty when rejected
  /// "auto", "confirmed", "user" or "rejected".
  std::string origin;
  std::string note;
};

/// Transcript entry for a result that did not need confirmation.
TranscriptEntry accept(const RecognitionResult& result);

/// Resolves a flagged result with the speaker's answer. Throws
/// RecognizerError if the result was neither ambiguous nor flagged.
TranscriptEntry confirm(const RecognitionResult& result, Answer answer,
                        const std::optional<std::string>& correction,
                        const TemplateStore& store);

}  // namespace parafuzz
