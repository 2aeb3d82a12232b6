#include "parafuzz/recognizer.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <set>

namespace parafuzz {

ParalinguisticFilter Pipeline::filter_for(int sample_rate) const {
  FilterOptions opts = filter.options();
  opts.hf_band_fraction = band_hf_fractions(features.framing.window_samples(sample_rate),
                                            sample_rate, features.hf_cutoff_hz);
  return ParalinguisticFilter(filter.variables(), opts);
}

std::vector<Segment> Pipeline::segments(const AudioClip& clip) const {
  return endpoint_segments(extract_features(clip, features), endpoint, features.framing.hop_ms);
}

std::string normalize_label(std::string word) {
  std::transform(word.begin(), word.end(), word.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return word;
}

std::vector<std::string> TemplateStore::words() const {
  std::set<std::string> s;
  for (const auto& t : templates_) s.insert(t.word);
  return {s.begin(), s.end()};
}

bool TemplateStore::contains(const std::string& word) const {
  const auto w = normalize_label(word);
  return std::any_of(templates_.begin(), templates_.end(),
                     [&](const Template& t) { return t.word == w; });
}

void TemplateStore::add(std::string word, FrameSequence raw_frames, std::string source,
                        const ParalinguisticFilter& filter) {
  if (raw_frames.empty()) throw RecognizerError("template has no frames");
  Template t;
  t.word = normalize_label(std::move(word));
  if (t.word.empty()) throw RecognizerError("template word must not be empty");
  t.raw_frames = std::move(raw_frames);
  t.source = std::move(source);
  templates_.push_back(std::move(t));

  double dur = 0.0, energy = 0.0;
  for (const auto& tp : templates_) {
    dur += static_cast<double>(tp.raw_frames.size());
    energy += mean_log_energy(tp.raw_frames);
  }
  mean_duration_ = dur / static_cast<double>(templates_.size());
  mean_energy_ = energy / static_cast<double>(templates_.size());

  for (auto& tp : templates_) {
    tp.frames = filter.filter_segment(tp.raw_frames, reference()).frames;
    tp.duration_frames = tp.frames.size();
  }
}

TemplateStore TemplateStore::restore(std::vector<Template> templates, double mean_duration_frames,
                                     double mean_energy_db) {
  TemplateStore store;
  store.templates_ = std::move(templates);
  store.mean_duration_ = mean_duration_frames;
  store.mean_energy_ = mean_energy_db;
  return store;
}

void enroll(const std::string& word, const std::vector<AudioClip>& clips, TemplateStore& store,
            const Pipeline& pipeline, const std::string& source) {
  for (const auto& clip : clips) {
    auto segs = pipeline.segments(clip);
    if (segs.size() != 1)
      throw RecognizerError("enrollment requires one isolated word (found " +
                            std::to_string(segs.size()) + " segments)");
    store.add(word, std::move(segs.front().frames), source, pipeline.filter_for(clip.sample_rate));
  }
}

double match_score(const FrameSequence& segment_frames, const FrameSequence& template_frames,
                   std::optional<BandConstraint> band) {
  const auto b = band.value_or(
      BandConstraint::automatic(segment_frames.size(), template_frames.size()));
  return std::exp(-dtw_distance(segment_frames, template_frames, b));
}

RecognitionResult rank(std::vector<Hypothesis> per_template, const RecognizerConfig& config) {
  std::map<std::string, double> best;
  for (const auto& h : per_template) {
    auto [it, inserted] = best.emplace(h.word, h.score);
    if (!inserted) it->second = std::max(it->second, h.score);
  }

  RecognitionResult r;
  for (const auto& [word, score] : best) r.hypotheses.push_back({word, score});
  std::stable_sort(r.hypotheses.begin(), r.hypotheses.end(),
                   [](const Hypothesis& a, const Hypothesis& b) {
                     if (a.score != b.score) return a.score > b.score;
                     return a.word < b.word;
                   });
  if (r.hypotheses.empty()) return r;

  const double top = r.hypotheses[0].score;
  r.confidence = r.hypotheses.size() > 1 ? top - r.hypotheses[1].score : 1.0;
  r.ambiguous = r.hypotheses.size() > 1 && r.confidence <= config.ambiguity_epsilon;
  r.needs_confirmation =
      r.confidence < config.confirmation_margin || top < config.confirmation_min_score;
  r.out_of_vocabulary = top < config.oov_threshold;
  return r;
}

std::vector<RecognitionResult> recognize_segments(const std::vector<Segment>& segments,
                                                  int sample_rate, const TemplateStore& store,
                                                  const Pipeline& pipeline,
                                                  const RecognizerConfig& config) {
  if (store.empty()) throw RecognizerError("no templates");
  const auto& templates = store.templates();
  const auto filter = pipeline.filter_for(sample_rate);

  const auto score_all = [&](const FrameSequence& frames, bool use_raw) {
    std::vector<Hypothesis> out;
    out.reserve(templates.size());
    for (const auto& t : templates)
      out.push_back({t.word, match_score(frames, use_raw ? t.raw_frames : t.frames, config.band)});
    return out;
  };

  std::vector<RecognitionResult> results;
  for (std::size_t i = 0; i < segments.size(); ++i) {
    const auto& seg = segments[i];
    std::vector<Hypothesis> scores;
    std::optional<ParalinguisticRecord> record;
    if (!config.filter_enabled) {
      scores = score_all(seg.frames, true);
    } else {
      // First pass against the lexicon reference.
      auto first = filter.filter_segment(seg.frames, store.reference(), i);
      scores = score_all(first.frames, false);
      record = first.record;

      // Second pass: speed reference taken from the best-matching template.
      std::size_t best = 0;
      for (std::size_t k = 1; k < scores.size(); ++k)
        if (scores[k].score > scores[best].score) best = k;
      SegmentReference ref = store.reference();
      ref.duration_frames = static_cast<double>(templates[best].duration_frames);
      const auto second = filter.filter_segment(seg.frames, ref, i);
      const auto rescored = score_all(second.frames, false);
      for (std::size_t k = 0; k < scores.size(); ++k)
        scores[k].score = std::max(scores[k].score, rescored[k].score);
    }

    auto r = rank(std::move(scores), config);
    r.segment_id = i;
    r.start_frame = seg.start_frame;
    r.end_frame = seg.end_frame;
    r.record = std::move(record);
    results.push_back(std::move(r));
  }
  return results;
}

std::vector<RecognitionResult> recognize(const AudioClip& clip, const TemplateStore& store,
                                         const Pipeline& pipeline,
                                         const RecognizerConfig& config) {
  if (store.empty()) throw RecognizerError("no templates");
  return recognize_segments(pipeline.segments(clip), clip.sample_rate, store, pipeline, config);
}

TranscriptEntry accept(const RecognitionResult& result) {
  TranscriptEntry e;
  e.segment_id = result.segment_id;
  if (result.hypotheses.empty()) {
    e.origin = "rejected";
    e.note = "no hypotheses";
    return e;
  }
  e.word = result.top().word;
  e.origin = "auto";
  return e;
}

TranscriptEntry confirm(const RecognitionResult& result, Answer answer,
                        const std::optional<std::string>& correction,
                        const TemplateStore& store) {
  if (!result.needs_confirmation && !result.ambiguous)
    throw RecognizerError("result does not require confirmation");
  TranscriptEntry e;
  e.segment_id = result.segment_id;
  if (answer == Answer::kYes) {
    if (result.hypotheses.empty()) throw RecognizerError("no hypothesis to confirm");
    e.word = result.top().word;
    e.origin = "confirmed";
    return e;
  }
  if (correction && !correction->empty()) {
    e.word = normalize_label(*correction);
    e.origin = "user";
    if (!store.contains(e.word)) e.note = "out_of_lexicon";
    return e;
  }
  e.origin = "rejected";
  return e;
}

}  // namespace parafuzz
