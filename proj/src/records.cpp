#include "parafuzz/records.h"

#include <fstream>
#include <ostream>

namespace parafuzz {

namespace {

Json axis_json(const AxisProfile& a, std::initializer_list<const char*> labels) {
  Json degrees = Json::object();
  std::size_t i = 0;
  for (const char* l : labels) degrees[l] = a.degrees.at(i++);
  return {{"crisp", a.crisp}, {"degrees", degrees}};
}

AxisProfile axis_from(const Json& j, std::initializer_list<const char*> labels) {
  AxisProfile a;
  a.crisp = j.at("crisp").get<double>();
  for (const char* l : labels) a.degrees.push_back(j.at("degrees").at(l).get<double>());
  return a;
}

// Matrix form of a frame: [log_energy, hf_ratio, band0..band7].
Json frame_row(const FeatureFrame& f) {
  Json row = Json::array({f.log_energy, f.hf_ratio});
  for (double b : f.band_energies) row.push_back(b);
  return row;
}

FeatureFrame frame_from_row(const Json& row) {
  if (!row.is_array() || row.size() != 2 + kNumBands)
    throw std::runtime_error("frame row must hold 10 numbers");
  FeatureFrame f;
  f.log_energy = row[0].get<double>();
  f.hf_ratio = row[1].get<double>();
  for (std::size_t b = 0; b < kNumBands; ++b) f.band_energies[b] = row[2 + b].get<double>();
  return f;
}

Json matrix(const FrameSequence& frames) {
  Json m = Json::array();
  for (const auto& f : frames) m.push_back(frame_row(f));
  return m;
}

FrameSequence from_matrix(const Json& m) {
  FrameSequence out;
  for (const auto& row : m) out.push_back(frame_from_row(row));
  return out;
}

}  // namespace

Json to_json(const FeatureFrame& f) {
  return {{"log_energy", f.log_energy},
          {"hf_ratio", f.hf_ratio},
          {"bands", std::vector<double>(f.band_energies.begin(), f.band_energies.end())}};
}

FeatureFrame frame_from_json(const Json& j) {
  FeatureFrame f;
  f.log_energy = j.at("log_energy").get<double>();
  f.hf_ratio = j.at("hf_ratio").get<double>();
  const auto bands = j.at("bands").get<std::vector<double>>();
  if (bands.size() != kNumBands) throw std::runtime_error("frame needs 8 band energies");
  std::copy(bands.begin(), bands.end(), f.band_energies.begin());
  return f;
}

Json to_json(const ParalinguisticProfile& p) {
  return {{"accent", axis_json(p.accent, {"soft", "sharp"})},
          {"speed", axis_json(p.speed, {"slow", "normal", "fast"})},
          {"emphasis", axis_json(p.emphasis, {"light", "medium", "heavy"})}};
}

ParalinguisticProfile profile_from_json(const Json& j) {
  ParalinguisticProfile p;
  p.accent = axis_from(j.at("accent"), {"soft", "sharp"});
  p.speed = axis_from(j.at("speed"), {"slow", "normal", "fast"});
  p.emphasis = axis_from(j.at("emphasis"), {"light", "medium", "heavy"});
  return p;
}

Json to_json(const ParalinguisticRecord& r) {
  return {{"segment", r.segment_id},
          {"start_frame", r.start_frame},
          {"input_frames", r.input_frames},
          {"output_frames", r.output_frames},
          {"reference_duration_frames", r.reference_duration_frames},
          {"reference_energy_db", r.reference_energy_db},
          {"before", to_json(r.before)},
          {"weights",
           {{"speed", r.weights.speed},
            {"emphasis", r.weights.emphasis},
            {"accent", r.weights.accent}}},
          {"corrections",
           {{"resample_factor", r.corrections.resample_factor},
            {"gain_shift_db", r.corrections.gain_shift_db},
            {"tilt_slope_db", r.corrections.tilt_slope_db},
            {"target_accent_ratio", r.corrections.target_accent_ratio}}},
          {"after", to_json(r.after)}};
}

ParalinguisticRecord record_from_json(const Json& j) {
  ParalinguisticRecord r;
  r.segment_id = j.at("segment").get<std::size_t>();
  r.start_frame = j.at("start_frame").get<std::size_t>();
  r.input_frames = j.at("input_frames").get<std::size_t>();
  r.output_frames = j.at("output_frames").get<std::size_t>();
  r.reference_duration_frames = j.at("reference_duration_frames").get<double>();
  r.reference_energy_db = j.at("reference_energy_db").get<double>();
  r.before = profile_from_json(j.at("before"));
  const auto& w = j.at("weights");
  r.weights = {w.at("speed").get<double>(), w.at("emphasis").get<double>(),
               w.at("accent").get<double>()};
  const auto& c = j.at("corrections");
  r.corrections.resample_factor = c.at("resample_factor").get<double>();
  r.corrections.gain_shift_db = c.at("gain_shift_db").get<double>();
  r.corrections.tilt_slope_db = c.at("tilt_slope_db").get<double>();
  r.corrections.target_accent_ratio = c.at("target_accent_ratio").get<double>();
  r.after = profile_from_json(j.at("after"));
  return r;
}

Json to_json(const RecognitionResult& r) {
  Json hyps = Json::array();
  for (const auto& h : r.hypotheses) hyps.push_back({{"word", h.word}, {"score", h.score}});
  Json j{{"segment", r.segment_id},
         {"start_frame", r.start_frame},
         {"end_frame", r.end_frame},
         {"hypotheses", hyps},
         {"confidence", r.confidence},
         {"ambiguous", r.ambiguous},
         {"needs_confirmation", r.needs_confirmation},
         {"out_of_vocabulary", r.out_of_vocabulary}};
  if (r.record) j["paralinguistic"] = to_json(*r.record);
  return j;
}

RecognitionResult result_from_json(const Json& j) {
  RecognitionResult r;
  r.segment_id = j.at("segment").get<std::size_t>();
  r.start_frame = j.at("start_frame").get<std::size_t>();
  r.end_frame = j.at("end_frame").get<std::size_t>();
  for (const auto& h : j.at("hypotheses"))
    r.hypotheses.push_back({h.at("word").get<std::string>(), h.at("score").get<double>()});
  r.confidence = j.at("confidence").get<double>();
  r.ambiguous = j.at("ambiguous").get<bool>();
  r.needs_confirmation = j.at("needs_confirmation").get<bool>();
  r.out_of_vocabulary = j.at("out_of_vocabulary").get<bool>();
  if (j.contains("paralinguistic")) r.record = record_from_json(j.at("paralinguistic"));
  return r;
}

Json to_json(const TranscriptEntry& e) {
  Json j{{"segment", e.segment_id}, {"origin", e.origin}};
  j["word"] = e.word.empty() ? Json(nullptr) : Json(e.word);
  if (!e.note.empty()) j["note"] = e.note;
  return j;
}

std::string to_line(const Json& j) { return j.dump(); }

void write_feature_dump(std::ostream& out, const FrameSequence& frames, std::size_t first_index) {
  for (std::size_t i = 0; i < frames.size(); ++i) {
    Json j = to_json(frames[i]);
    j["frame"] = first_index + i;
    out << j.dump() << '\n';
  }
}

Json store_to_json(const TemplateStore& store) {
  Json templates = Json::array();
  for (const auto& t : store.templates()) {
    templates.push_back({{"word", t.word},
                         {"duration_frames", t.duration_frames},
                         {"source", t.source},
                         {"frames", matrix(t.frames)},
                         {"raw_frames", matrix(t.raw_frames)}});
  }
  return {{"schema_version", TemplateStore::kSchemaVersion},
          {"frame_layout", {"log_energy", "hf_ratio", "band0", "band1", "band2", "band3",
                            "band4", "band5", "band6", "band7"}},
          {"mean_duration_frames", store.mean_duration_frames()},
          {"mean_energy_db", store.mean_energy_db()},
          {"templates", templates}};
}

TemplateStore store_from_json(const Json& j) {
  const int version = j.at("schema_version").get<int>();
  if (version != TemplateStore::kSchemaVersion)
    throw std::runtime_error("unsupported store schema version " + std::to_string(version));
  std::vector<Template> templates;
  for (const auto& tj : j.at("templates")) {
    Template t;
    t.word = tj.at("word").get<std::string>();
    t.duration_frames = tj.at("duration_frames").get<std::size_t>();
    t.source = tj.at("source").get<std::string>();
    t.frames = from_matrix(tj.at("frames"));
    t.raw_frames = from_matrix(tj.at("raw_frames"));
    if (t.frames.size() != t.duration_frames)
      throw std::runtime_error("template '" + t.word + "': duration does not match frames");
    templates.push_back(std::move(t));
  }
  return TemplateStore::restore(std::move(templates), j.at("mean_duration_frames").get<double>(),
                                j.at("mean_energy_db").get<double>());
}

void save_store(const std::string& path, const TemplateStore& store) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write store '" + path + "'");
  out << store_to_json(store).dump(1) << '\n';
}

TemplateStore load_store(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open store '" + path + "'");
  Json j;
  try {
    in >> j;
  } catch (const Json::parse_error& e) {
    throw std::runtime_error("store '" + path + "': " + e.what());
  }
  return store_from_json(j);
}

}  // namespace parafuzz
