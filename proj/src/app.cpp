#include "parafuzz/app.h"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "parafuzz/log.h"
#include "parafuzz/records.h"

namespace parafuzz::app {

namespace fs = std::filesystem;

namespace {

std::string fixed(double v, int precision = 4) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(precision) << v;
  return s.str();
}

std::string word_from_filename(const fs::path& p) {
  std::string stem = p.stem().string();
  if (const auto dd = stem.find("__"); dd != std::string::npos) return stem.substr(0, dd);
  if (const auto us = stem.rfind('_'); us != std::string::npos && us + 1 < stem.size() &&
                                       std::all_of(stem.begin() + static_cast<long>(us) + 1,
                                                   stem.end(), ::isdigit))
    return stem.substr(0, us);
  return stem;
}

std::vector<std::string> wav_files(const std::string& dir) {
  std::vector<std::string> out;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.is_regular_file() && e.path().extension() == ".wav") out.push_back(e.path().string());
  std::sort(out.begin(), out.end());
  return out;
}

void print_axis(std::ostream& out, const char* name, const AxisProfile& a,
                const std::vector<const char*>& labels) {
  out << "  " << std::left << std::setw(9) << name << std::right << " crisp " << std::setw(9)
      << fixed(a.crisp) << " ";
  for (std::size_t i = 0; i < labels.size(); ++i)
    out << " " << labels[i] << "=" << fixed(a.degrees[i], 3);
  out << '\n';
}

void print_profile(std::ostream& out, const ParalinguisticProfile& p) {
  print_axis(out, "accent", p.accent, {"soft", "sharp"});
  print_axis(out, "speed", p.speed, {"slow", "normal", "fast"});
  print_axis(out, "emphasis", p.emphasis, {"light", "medium", "heavy"});
}

Json analysis_record(const ParalinguisticRecord& r) {
  return {{"segment", r.segment_id},
          {"start_frame", r.start_frame},
          {"frames", r.input_frames},
          {"reference_duration_frames", r.reference_duration_frames},
          {"reference_energy_db", r.reference_energy_db},
          {"profile", to_json(r.before)},
          {"weights",
           {{"speed", r.weights.speed},
            {"emphasis", r.weights.emphasis},
            {"accent", r.weights.accent}}}};
}

struct Analysis {
  AudioClip clip;
  FilteredUtterance filtered;
};

Analysis analyze_input(const std::string& input, const std::optional<std::string>& store_path,
                       const Context& ctx) {
  const Pipeline pipeline = ctx.config.pipeline();
  Analysis a;
  a.clip = load_audio(input);
  const auto segments = pipeline.segments(a.clip);
  UtteranceReference ref;
  if (store_path && fs::exists(*store_path)) {
    const auto store = load_store(*store_path);
    if (!store.empty()) {
      ref.duration_frames = store.mean_duration_frames();
      ref.energy_db = store.mean_energy_db();
    }
  } else {
    warn(store_path ? "store '" + *store_path + "' not found; using self-referenced duration"
                    : std::string("no store given; using self-referenced duration"));
  }
  a.filtered = pipeline.filter_for(a.clip.sample_rate).filter_utterance(segments, ref);
  return a;
}

void write_file(const std::string& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << body;
}

void print_result(std::ostream& out, const RecognitionResult& r) {
  out << "segment " << r.segment_id << " [frames " << r.start_frame << "-" << r.end_frame << ")";
  if (r.hypotheses.empty()) {
    out << " no hypotheses\n";
    return;
  }
  out << " -> " << r.top().word << " score " << fixed(r.top().score) << " confidence "
      << fixed(r.confidence);
  if (r.ambiguous) out << " AMBIGUOUS";
  if (r.needs_confirmation) out << " CONFIRM";
  if (r.out_of_vocabulary) out << " OOV";
  out << '\n';
  for (std::size_t i = 0; i < std::min<std::size_t>(r.hypotheses.size(), 5); ++i)
    out << "  " << (i + 1) << ". " << std::left << std::setw(12) << r.hypotheses[i].word
        << std::right << fixed(r.hypotheses[i].score) << '\n';
}

TranscriptEntry prompt(const RecognitionResult& r, const TemplateStore& store, Io io) {
  io.err << "confirm segment " << r.segment_id << ": heard '" << r.top().word << "'";
  if (r.ambiguous && r.hypotheses.size() > 1) {
    io.err << " (ambiguous with";
    for (std::size_t i = 1; i < r.hypotheses.size() &&
                            r.top().score - r.hypotheses[i].score <= r.confidence + 1e-12;
         ++i)
      io.err << " '" << r.hypotheses[i].word << "'";
    io.err << ")";
  }
  io.err << ". Correct? [y/n]: " << std::flush;
  std::string line;
  std::getline(io.in, line);
  if (!line.empty() && (line[0] == 'y' || line[0] == 'Y'))
    return confirm(r, Answer::kYes, std::nullopt, store);
  io.err << "correct word (blank to reject): " << std::flush;
  std::string correction;
  std::getline(io.in, correction);
  correction.erase(0, correction.find_first_not_of(" \t\r"));
  correction.erase(correction.find_last_not_of(" \t\r") + 1);
  return confirm(r, Answer::kNo,
                 correction.empty() ? std::nullopt : std::optional<std::string>(correction),
                 store);
}

}  // namespace

std::vector<WordSpec> parse_lexicon(const std::string& json_text) {
  Json j;
  try {
    j = Json::parse(json_text);
  } catch (const Json::parse_error& e) {
    throw SynthError(std::string("spec: ") + e.what());
  }
  if (!j.is_array()) throw SynthError("spec: expected an array of words");
  std::vector<WordSpec> out;
  for (std::size_t w = 0; w < j.size(); ++w) {
    const std::string at = "words[" + std::to_string(w) + "].";
    const auto& wj = j[w];
    WordSpec spec;
    try {
      spec.label = wj.at("label").get<std::string>();
      spec.seed = wj.value("seed", std::uint64_t{w});
      spec.sample_rate = wj.value("sample_rate", 16000);
      const auto& segs = wj.at("segments");
      for (std::size_t s = 0; s < segs.size(); ++s) {
        SynthSegment seg;
        seg.duration_ms = segs[s].at("duration_ms").get<double>();
        seg.amplitude = segs[s].at("amplitude").get<double>();
        const auto profile = segs[s].at("band_profile").get<std::vector<double>>();
        if (profile.size() != kNumBands)
          throw SynthError(at + "segments[" + std::to_string(s) + "].band_profile: expected 8 values");
        std::copy(profile.begin(), profile.end(), seg.band_profile.begin());
        spec.segments.push_back(seg);
      }
    } catch (const Json::exception& e) {
      throw SynthError(at + e.what());
    }
    try {
      validate(spec);
    } catch (const SynthError& e) {
      throw SynthError(at + e.what());
    }
    out.push_back(std::move(spec));
  }
  if (out.empty()) throw SynthError("spec: no words");
  return out;
}

std::vector<ManifestRow> read_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open manifest '" + path + "'");
  std::vector<ManifestRow> rows;
  std::string line;
  bool header = true;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (header) {
      header = false;
      if (line.rfind("filename", 0) == 0) continue;
    }
    std::istringstream fields(line);
    ManifestRow row;
    std::string stretch, gain, tilt;
    if (!std::getline(fields, row.filename, '\t') || !std::getline(fields, row.label, '\t') ||
        !std::getline(fields, stretch, '\t') || !std::getline(fields, gain, '\t') ||
        !std::getline(fields, tilt, '\t'))
      throw std::runtime_error("manifest line " + std::to_string(line_no) + ": expected 5 fields");
    try {
      row.perturbation = {std::stod(stretch), std::stod(gain), std::stod(tilt)};
    } catch (const std::exception&) {
      throw std::runtime_error("manifest line " + std::to_string(line_no) + ": bad number");
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_manifest(std::ostream& out, const std::vector<ManifestRow>& rows) {
  out << "filename\tlabel\tstretch\tgain_db\ttilt\n";
  for (const auto& r : rows)
    out << r.filename << '\t' << r.label << '\t' << r.perturbation.stretch << '\t'
        << r.perturbation.gain_db << '\t' << r.perturbation.tilt_db_per_band << '\n';
}

EvalReport run_eval(const TemplateStore& store, const std::string& manifest_path,
                    const Pipeline& pipeline, RecognizerConfig config) {
  const auto rows = read_manifest(manifest_path);
  if (rows.empty()) throw std::runtime_error("manifest '" + manifest_path + "' is empty");
  const fs::path base = fs::path(manifest_path).parent_path();

  EvalReport report;
  report.with_filter = config.filter_enabled;
  for (const auto& row : rows) {
    const fs::path clip_path = base / row.filename;
    if (!fs::exists(clip_path)) {
      report.missing.push_back(clip_path.string());
      continue;
    }
    const auto clip = load_audio(clip_path.string());
    const auto results = recognize(clip, store, pipeline, config);
    const bool correct = !results.empty() && !results.front().hypotheses.empty() &&
                         results.front().top().word == normalize_label(row.label);
    for (auto* tally : {&report.overall, &report.by_stretch[row.perturbation.stretch],
                        &report.by_gain[row.perturbation.gain_db],
                        &report.by_tilt[row.perturbation.tilt_db_per_band]}) {
      ++tally->total;
      if (correct) ++tally->correct;
    }
  }
  return report;
}

int cmd_enroll(const EnrollArgs& args, const Context& ctx, Io io) {
  const Pipeline pipeline = ctx.config.pipeline();
  std::vector<std::pair<std::string, std::string>> jobs;  // (word, file)
  if (args.lexicon_dir) {
    if (!fs::is_directory(*args.lexicon_dir)) {
      io.err << "error: lexicon directory '" << *args.lexicon_dir << "' not found\n";
      return kError;
    }
    for (const auto& f : wav_files(*args.lexicon_dir)) jobs.emplace_back(word_from_filename(f), f);
  } else {
    if (args.word.empty() || args.audio.empty()) {
      io.err << "error: enroll needs --lexicon or --word with --audio\n";
      return kError;
    }
    for (const auto& f : args.audio) jobs.emplace_back(args.word, f);
  }

  TemplateStore store;
  if (fs::exists(args.store_path)) store = load_store(args.store_path);

  bool failed = false;
  for (const auto& [word, file] : jobs) {
    try {
      enroll(word, {load_audio(file)}, store, pipeline, fs::path(file).filename().string());
      if (ctx.verbose) io.err << "enrolled '" << word << "' from " << file << '\n';
    } catch (const std::exception& e) {
      io.err << "error: " << file << ": " << e.what() << '\n';
      failed = true;
    }
  }
  if (!store.empty()) save_store(args.store_path, store);

  std::map<std::string, std::size_t> counts;
  for (const auto& t : store.templates()) ++counts[t.word];
  if (ctx.format == Format::kRecords) {
    Json words = Json::object();
    for (const auto& [w, c] : counts) words[w] = c;
    io.out << to_line({{"store", args.store_path},
                       {"words", counts.size()},
                       {"templates", store.size()},
                       {"mean_duration_frames", store.mean_duration_frames()},
                       {"per_word", words}})
           << '\n';
  } else {
    io.out << "store " << args.store_path << ": " << counts.size() << " words, " << store.size()
           << " templates, mean duration " << fixed(store.mean_duration_frames(), 1)
           << " frames\n";
    for (const auto& [w, c] : counts) io.out << "  " << w << ": " << c << '\n';
  }
  return failed ? kError : kOk;
}

int cmd_analyze(const AnalyzeArgs& args, const Context& ctx, Io io) {
  const auto a = analyze_input(args.input, args.store_path, ctx);
  const auto& recs = a.filtered.records;
  if (recs.empty()) {
    if (ctx.format == Format::kTable) io.out << "0 segments\n";
    return kOk;
  }
  for (const auto& r : recs) {
    if (ctx.format == Format::kRecords) {
      io.out << to_line(analysis_record(r)) << '\n';
      continue;
    }
    io.out << "segment " << r.segment_id << " frames " << r.start_frame << "+" << r.input_frames
           << " (reference " << fixed(r.reference_duration_frames, 1) << " frames, "
           << fixed(r.reference_energy_db, 2) << " dB)\n";
    print_profile(io.out, r.before);
    io.out << "  weights   speed=" << fixed(r.weights.speed, 3)
           << " emphasis=" << fixed(r.weights.emphasis, 3)
           << " accent=" << fixed(r.weights.accent, 3) << '\n';
  }
  return kOk;
}

int cmd_filter(const FilterArgs& args, const Context& ctx, Io io) {
  const auto a = analyze_input(args.input, args.store_path, ctx);
  const auto& f = a.filtered;
  if (args.features_path) {
    std::ostringstream dump;
    for (const auto& s : f.normalized) write_feature_dump(dump, s.frames, s.start_frame);
    write_file(*args.features_path, dump.str());
  }
  if (args.raw_features_path) {
    std::ostringstream dump;
    for (const auto& s : f.original) write_feature_dump(dump, s.frames, s.start_frame);
    write_file(*args.raw_features_path, dump.str());
  }
  if (f.records.empty() && ctx.format == Format::kTable) io.out << "0 segments\n";
  for (const auto& r : f.records) {
    if (ctx.format == Format::kRecords) {
      io.out << to_line(to_json(r)) << '\n';
      continue;
    }
    io.out << "segment " << r.segment_id << ": " << r.input_frames << " -> " << r.output_frames
           << " frames, resample x" << fixed(r.corrections.resample_factor) << ", gain "
           << fixed(-r.corrections.gain_shift_db, 2) << " dB, tilt "
           << fixed(r.corrections.tilt_slope_db, 2) << " dB\n";
    io.out << " before:\n";
    print_profile(io.out, r.before);
    io.out << " after:\n";
    print_profile(io.out, r.after);
  }
  return kOk;
}

int cmd_recognize(const RecognizeArgs& args, const Context& ctx, Io io) {
  if (!fs::exists(args.store_path)) {
    io.err << "error: store '" << args.store_path << "' not found\n";
    return kError;
  }
  const auto store = load_store(args.store_path);
  const Pipeline pipeline = ctx.config.pipeline();
  RecognizerConfig rc = ctx.config.recognizer;
  if (args.no_filter) rc.filter_enabled = false;

  const auto results = recognize(load_audio(args.input), store, pipeline, rc);
  bool oov = false;
  for (const auto& r : results) {
    oov = oov || r.out_of_vocabulary;
    if (ctx.format == Format::kRecords)
      io.out << to_line(to_json(r)) << '\n';
    else
      print_result(io.out, r);
  }
  if (results.empty() && ctx.format == Format::kTable) io.out << "0 segments\n";

  if (args.interactive) {
    for (const auto& r : results) {
      if (r.hypotheses.empty()) continue;
      const auto entry =
          (r.needs_confirmation || r.ambiguous) ? prompt(r, store, io) : accept(r);
      if (ctx.format == Format::kRecords) {
        Json j = to_json(entry);
        j["type"] = "transcript";
        io.out << to_line(j) << '\n';
      } else {
        io.out << "transcript segment " << entry.segment_id << ": "
               << (entry.word.empty() ? "<rejected>" : entry.word) << " (" << entry.origin
               << (entry.note.empty() ? "" : ", " + entry.note) << ")\n";
      }
    }
    return kOk;
  }
  return oov ? kOutOfVocabulary : kOk;
}

int cmd_synth(const SynthArgs& args, const Context& ctx, Io io) {
  std::vector<WordSpec> lexicon;
  PerturbationGrid grid;
  try {
    if (args.spec_path) {
      std::ifstream in(*args.spec_path);
      if (!in) throw SynthError("spec: cannot open '" + *args.spec_path + "'");
      std::stringstream buf;
      buf << in.rdbuf();
      lexicon = parse_lexicon(buf.str());
    } else {
      lexicon = default_lexicon();
    }
    if (args.homophones)
      for (auto& w : homophone_pair()) lexicon.push_back(w);
    grid = parse_grid(args.grid);
  } catch (const SynthError& e) {
    io.err << "error: " << e.what() << '\n';
    return kError;
  }

  const fs::path out(args.out_dir);
  fs::create_directories(out / "enroll");
  fs::create_directories(out / "corpus");

  std::vector<ManifestRow> rows;
  const auto corpus = build_eval_corpus(lexicon, grid, ctx.seed);
  for (const auto& e : corpus.enrollment) save_wav((out / "enroll" / e.filename).string(), e.clip);
  for (const auto& item : corpus.items) {
    save_wav((out / "corpus" / item.filename).string(), item.clip);
    rows.push_back({"corpus/" + item.filename, item.label, item.perturbation});
  }
  std::ostringstream manifest;
  write_manifest(manifest, rows);
  write_file((out / "manifest.tsv").string(), manifest.str());

  if (ctx.format == Format::kRecords) {
    io.out << to_line({{"out", args.out_dir},
                       {"words", lexicon.size()},
                       {"enrollment_clips", corpus.enrollment.size()},
                       {"clips", corpus.items.size()},
                       {"seed", ctx.seed}})
           << '\n';
  } else {
    io.out << "wrote " << corpus.enrollment.size() << " enrollment clips and "
           << corpus.items.size() << " corpus clips to " << args.out_dir << " (seed " << ctx.seed
           << ")\n";
  }
  return kOk;
}

int cmd_eval(const EvalArgs& args, const Context& ctx, Io io) {
  if (!fs::exists(args.store_path)) {
    io.err << "error: store '" << args.store_path << "' not found\n";
    return kError;
  }
  const auto store = load_store(args.store_path);
  RecognizerConfig rc = ctx.config.recognizer;
  rc.filter_enabled = args.with_filter;

  EvalReport report;
  try {
    report = run_eval(store, args.manifest_path, ctx.config.pipeline(), rc);
  } catch (const std::exception& e) {
    io.err << "error: " << e.what() << '\n';
    return kError;
  }
  if (!report.missing.empty()) {
    for (const auto& m : report.missing) io.err << "error: missing clip " << m << '\n';
    return kError;
  }

  const auto axis_json = [](const std::map<double, AxisTally>& m) {
    Json a = Json::array();
    for (const auto& [value, t] : m)
      a.push_back({{"value", value}, {"total", t.total}, {"correct", t.correct},
                   {"accuracy", t.accuracy()}});
    return a;
  };
  if (ctx.format == Format::kRecords) {
    io.out << to_line({{"filter", report.with_filter},
                       {"total", report.overall.total},
                       {"correct", report.overall.correct},
                       {"accuracy", report.overall.accuracy()},
                       {"stretch", axis_json(report.by_stretch)},
                       {"gain_db", axis_json(report.by_gain)},
                       {"tilt", axis_json(report.by_tilt)}})
           << '\n';
    return kOk;
  }

  io.out << "filter " << (report.with_filter ? "on" : "off") << ": accuracy "
         << fixed(report.overall.accuracy()) << " (" << report.overall.correct << "/"
         << report.overall.total << ")\n";
  const auto table = [&](const char* name, const std::map<double, AxisTally>& m) {
    io.out << name << '\n';
    for (const auto& [value, t] : m)
      io.out << "  " << std::setw(8) << value << "  " << fixed(t.accuracy()) << "  ("
             << t.correct << "/" << t.total << ")\n";
  };
  table("stretch", report.by_stretch);
  table("gain_db", report.by_gain);
  table("tilt", report.by_tilt);
  return kOk;
}

}  // namespace parafuzz::app
