#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include "parafuzz/app.h"
#include "parafuzz/audio.h"
#include "parafuzz/records.h"

using namespace parafuzz;
using namespace parafuzz::app;
namespace fs = std::filesystem;

namespace {

struct CmdRun {
  int code = 0;
  std::string out, err;
};

template <typename Args, typename Fn>
CmdRun run(Fn fn, const Args& args, const Context& ctx = {}, const std::string& input = "") {
  std::ostringstream out, err;
  std::istringstream in(input);
  CmdRun r;
  r.code = fn(args, ctx, Io{out, err, in});
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// Captures std::cerr, where warnings go.
class CerrCapture {
 public:
  CerrCapture() : old_(std::cerr.rdbuf(buf_.rdbuf())) {}
  ~CerrCapture() { std::cerr.rdbuf(old_); }
  std::string str() const { return buf_.str(); }

 private:
  std::ostringstream buf_;
  std::streambuf* old_;
};

// One neutral corpus with homophones plus an enrolled store, shared by the suite.
class CliTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir_ = new fs::path(fs::temp_directory_path() / ("parafuzz_cli_" + std::to_string(::getpid())));
    fs::remove_all(*dir_);
    SynthArgs s;
    s.out_dir = (*dir_ / "data").string();
    s.grid = "stretch=1,1.25;gain=0,6;tilt=0";
    s.homophones = true;
    ASSERT_EQ(run(cmd_synth, s).code, kOk);
    EnrollArgs e;
    e.lexicon_dir = (*dir_ / "data" / "enroll").string();
    e.store_path = store().string();
    ASSERT_EQ(run(cmd_enroll, e).code, kOk);
  }
  static void TearDownTestSuite() {
    fs::remove_all(*dir_);
    delete dir_;
  }
  static fs::path data() { return *dir_ / "data"; }
  static fs::path store() { return *dir_ / "store.json"; }
  static fs::path clip(const std::string& name) { return data() / "corpus" / name; }

  static fs::path* dir_;
};

fs::path* CliTest::dir_ = nullptr;

}  // namespace

TEST_F(CliTest, SynthLayout) {
  EXPECT_TRUE(fs::exists(data() / "enroll" / "one.wav"));
  EXPECT_TRUE(fs::exists(data() / "enroll" / "tale.wav"));
  const auto rows = read_manifest((data() / "manifest.tsv").string());
  EXPECT_EQ(rows.size(), 12u * 4u);
  for (const auto& r : rows) EXPECT_TRUE(fs::exists(data() / r.filename)) << r.filename;
  EXPECT_EQ(slurp(data() / "manifest.tsv").substr(0, 36), "filename\tlabel\tstretch\tgain_db\ttilt\n");
}

TEST_F(CliTest, SynthIsByteDeterministic) {
  SynthArgs s;
  s.out_dir = (*dir_ / "again").string();
  s.grid = "stretch=1,1.25;gain=0,6;tilt=0";
  s.homophones = true;
  const auto r = run(cmd_synth, s);
  ASSERT_EQ(r.code, kOk);
  EXPECT_NE(r.out.find("wrote 12 enrollment clips and 48 corpus clips"), std::string::npos);
  EXPECT_EQ(slurp(*dir_ / "again" / "manifest.tsv"), slurp(data() / "manifest.tsv"));
  for (const auto& row : read_manifest((data() / "manifest.tsv").string()))
    ASSERT_EQ(slurp(*dir_ / "again" / row.filename), slurp(data() / row.filename));

  Context other;
  other.seed = 8;
  s.out_dir = (*dir_ / "seed8").string();
  ASSERT_EQ(run(cmd_synth, s, other).code, kOk);
  EXPECT_NE(slurp(*dir_ / "seed8" / "enroll" / "one.wav"), slurp(data() / "enroll" / "one.wav"));
}

TEST_F(CliTest, SynthRejectsBadSpec) {
  const auto spec = *dir_ / "bad.json";
  std::ofstream(spec) << R"([{"label": "a", "segments": [{"duration_ms": 200, "amplitude": 2,
      "band_profile": [0,0,0,0,0,0,0,0]}]}])";
  SynthArgs s;
  s.out_dir = (*dir_ / "bad").string();
  s.spec_path = spec.string();
  auto r = run(cmd_synth, s);
  EXPECT_EQ(r.code, kError);
  EXPECT_NE(r.err.find("words[0].segments[0].amplitude"), std::string::npos) << r.err;

  std::ofstream(spec) << R"([{"label": "a", "segments": [{"duration_ms": 200, "amplitude": 1}]}])";
  r = run(cmd_synth, s);
  EXPECT_EQ(r.code, kError);
  EXPECT_NE(r.err.find("words[0]."), std::string::npos);
  EXPECT_NE(r.err.find("band_profile"), std::string::npos) << r.err;

  s.spec_path.reset();
  s.grid = "stretch=9";
  r = run(cmd_synth, s);
  EXPECT_EQ(r.code, kError);
  EXPECT_NE(r.err.find("stretch 9 outside"), std::string::npos);
}

TEST(ParseLexicon, RoundTripsFields) {
  const auto lex = parse_lexicon(R"([{"label": "hi", "seed": 5, "segments": [
      {"duration_ms": 150, "amplitude": 0.5, "band_profile": [0,-6,-12,-18,-24,-30,-36,-42]}]}])");
  ASSERT_EQ(lex.size(), 1u);
  EXPECT_EQ(lex[0].label, "hi");
  EXPECT_EQ(lex[0].seed, 5u);
  EXPECT_EQ(lex[0].segments[0].band_profile[3], -18.0);
  EXPECT_THROW(parse_lexicon("{}"), SynthError);
  EXPECT_THROW(parse_lexicon("[]"), SynthError);
  EXPECT_THROW(parse_lexicon("[{"), SynthError);
}

TEST_F(CliTest, EnrollSummaryAndAppend) {
  const auto copy = *dir_ / "store_copy.json";
  fs::copy_file(store(), copy, fs::copy_options::overwrite_existing);
  EnrollArgs e;
  e.word = "One";
  e.audio = {clip("one__s1.25_g0_t0.wav").string()};
  e.store_path = copy.string();
  auto r = run(cmd_enroll, e);
  EXPECT_EQ(r.code, kOk);
  EXPECT_NE(r.out.find("12 words, 13 templates"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("  one: 2"), std::string::npos);

  Context rec;
  rec.format = Format::kRecords;
  e.audio = {(*dir_ / "missing.wav").string(), clip("two__s1_g0_t0.wav").string()};
  e.word = "two";
  r = run(cmd_enroll, e, rec);
  EXPECT_EQ(r.code, kError);
  EXPECT_NE(r.err.find("missing.wav"), std::string::npos) << r.err;
  const auto j = Json::parse(r.out);
  EXPECT_EQ(j.at("templates"), 14);
  EXPECT_EQ(j.at("per_word").at("two"), 2);
  EXPECT_EQ(load_store(copy.string()).size(), 14u);
}

TEST_F(CliTest, EnrollArgumentErrors) {
  EnrollArgs e;
  e.store_path = (*dir_ / "nothing.json").string();
  EXPECT_EQ(run(cmd_enroll, e).code, kError);
  e.lexicon_dir = (*dir_ / "no_such_dir").string();
  const auto r = run(cmd_enroll, e);
  EXPECT_EQ(r.code, kError);
  EXPECT_NE(r.err.find("not found"), std::string::npos);
}

TEST_F(CliTest, AnalyzeSilenceAndWarnings) {
  const auto silent = *dir_ / "silence.wav";
  AudioClip quiet;
  quiet.samples.assign(16000, 0.0);
  save_wav(silent.string(), quiet);
  AnalyzeArgs a;
  a.input = silent.string();
  std::string warned;
  CmdRun r;
  {
    CerrCapture cap;
    r = run(cmd_analyze, a);
    warned = cap.str();
  }
  EXPECT_EQ(r.code, kOk);
  EXPECT_EQ(r.out, "0 segments\n");
  EXPECT_NE(warned.find("no store given"), std::string::npos);

  a.input = clip("one__s1_g0_t0.wav").string();
  a.store_path = store().string();
  {
    CerrCapture cap;
    r = run(cmd_analyze, a);
    warned = cap.str();
  }
  EXPECT_EQ(r.code, kOk);
  EXPECT_TRUE(warned.empty()) << warned;
  EXPECT_NE(r.out.find("segment 0"), std::string::npos);
  EXPECT_NE(r.out.find("weights"), std::string::npos);

  Context rec;
  rec.format = Format::kRecords;
  r = run(cmd_analyze, a, rec);
  const auto j = Json::parse(r.out);
  EXPECT_EQ(j.at("segment"), 0);
  const auto& speed = j.at("profile").at("speed").at("degrees");
  EXPECT_NEAR(speed.at("slow").get<double>() + speed.at("normal").get<double>() +
                  speed.at("fast").get<double>(),
              1.0, 1e-9);
}

TEST_F(CliTest, FilterDumps) {
  Context rec;
  rec.format = Format::kRecords;
  FilterArgs f;
  f.store_path = store().string();
  f.input = clip("three__s1_g0_t0.wav").string();
  const auto neutral = record_from_json(Json::parse(run(cmd_filter, f, rec).out));

  f.input = clip("three__s1.25_g6_t0.wav").string();
  f.features_path = (*dir_ / "norm.jsonl").string();
  f.raw_features_path = (*dir_ / "raw.jsonl").string();
  const auto r = run(cmd_filter, f, rec);
  ASSERT_EQ(r.code, kOk);
  const auto record = record_from_json(Json::parse(r.out));
  // Louder and longer than the neutral rendering: more level removed, never stretched.
  EXPECT_GT(record.input_frames, neutral.input_frames);
  EXPECT_LE(record.corrections.resample_factor, 1.0);
  EXPECT_GT(record.corrections.gain_shift_db, neutral.corrections.gain_shift_db);

  std::size_t raw_lines = 0, norm_lines = 0;
  std::string line;
  std::ifstream raw(*f.raw_features_path), norm(*f.features_path);
  while (std::getline(raw, line)) {
    frame_from_json(Json::parse(line));
    ++raw_lines;
  }
  while (std::getline(norm, line)) {
    frame_from_json(Json::parse(line));
    ++norm_lines;
  }
  EXPECT_EQ(raw_lines, record.input_frames);
  EXPECT_EQ(norm_lines, record.output_frames);
}

TEST_F(CliTest, RecognizeExitCodes) {
  RecognizeArgs a;
  a.input = clip("four__s1.25_g6_t0.wav").string();
  a.store_path = (*dir_ / "absent.json").string();
  EXPECT_EQ(run(cmd_recognize, a).code, kError);

  a.store_path = store().string();
  auto r = run(cmd_recognize, a);
  EXPECT_EQ(r.code, kOk);
  EXPECT_NE(r.out.find("-> four"), std::string::npos) << r.out;

  Context rec;
  rec.format = Format::kRecords;
  a.no_filter = true;
  r = run(cmd_recognize, a, rec);
  EXPECT_EQ(r.code, kOk);
  const auto res = result_from_json(Json::parse(r.out));
  EXPECT_FALSE(res.record.has_value());

  // A lone 7.5 kHz whistle resembles nothing in the lexicon.
  AudioClip whistle;
  for (int i = 0; i < 8000; ++i) {
    const double env = (i < 1600 || i >= 6400) ? 0.0 : 1.0;
    whistle.samples.push_back(0.3 * env * std::sin(2 * M_PI * 7500.0 * i / 16000.0));
  }
  const auto path = *dir_ / "whistle.wav";
  save_wav(path.string(), whistle);
  a.input = path.string();
  a.no_filter = false;
  r = run(cmd_recognize, a);
  EXPECT_EQ(r.code, kOutOfVocabulary) << r.out;
  EXPECT_NE(r.out.find("OOV"), std::string::npos);
}

TEST_F(CliTest, InteractiveHomophoneConfirmation) {
  RecognizeArgs a;
  a.input = clip("tail__s1.25_g6_t0.wav").string();
  a.store_path = store().string();
  a.interactive = true;

  auto r = run(cmd_recognize, a, {}, "n\ntale\n");
  EXPECT_EQ(r.code, kOk);
  EXPECT_NE(r.err.find("heard 'tail' (ambiguous with 'tale'). Correct? [y/n]: "), std::string::npos)
      << r.err;
  EXPECT_NE(r.err.find("correct word (blank to reject): "), std::string::npos);
  EXPECT_NE(r.out.find("transcript segment 0: tale (user)"), std::string::npos) << r.out;

  r = run(cmd_recognize, a, {}, "y\n");
  EXPECT_NE(r.out.find("transcript segment 0: tail (confirmed)"), std::string::npos);
  EXPECT_EQ(r.err.find("correct word"), std::string::npos);

  r = run(cmd_recognize, a, {}, "n\n\n");
  EXPECT_NE(r.out.find("<rejected> (rejected)"), std::string::npos);

  Context rec;
  rec.format = Format::kRecords;
  r = run(cmd_recognize, a, rec, "n\nbanana\n");
  std::istringstream lines(r.out);
  std::string line, last;
  while (std::getline(lines, line)) last = line;
  const auto j = Json::parse(last);
  EXPECT_EQ(j.at("type"), "transcript");
  EXPECT_EQ(j.at("word"), "banana");
  EXPECT_EQ(j.at("note"), "out_of_lexicon");

  a.input = clip("five__s1_g0_t0.wav").string();
  r = run(cmd_recognize, a);
  EXPECT_TRUE(r.err.empty()) << r.err;
  EXPECT_NE(r.out.find("transcript segment 0: five (auto)"), std::string::npos);
}

TEST_F(CliTest, EvalReports) {
  EvalArgs e;
  e.store_path = store().string();
  e.manifest_path = (data() / "manifest.tsv").string();
  auto r = run(cmd_eval, e);
  EXPECT_EQ(r.code, kOk);
  EXPECT_EQ(r.out.rfind("filter on: accuracy ", 0), 0u) << r.out;

  // Neutral clips alone are recognized perfectly (homophone "tale" rows lose
  // the tie-break, so keep the ten distinct words).
  const auto subset = data() / "neutral.tsv";
  std::vector<ManifestRow> rows;
  for (const auto& row : read_manifest(e.manifest_path))
    if (row.perturbation.is_identity() && row.label != "tail" && row.label != "tale")
      rows.push_back(row);
  {
    std::ofstream out(subset);
    write_manifest(out, rows);
  }
  Context rec;
  rec.format = Format::kRecords;
  e.manifest_path = subset.string();
  r = run(cmd_eval, e, rec);
  ASSERT_EQ(r.code, kOk);
  auto j = Json::parse(r.out);
  EXPECT_EQ(j.at("total"), 10);
  EXPECT_EQ(j.at("accuracy"), 1.0);
  EXPECT_EQ(j.at("filter"), true);

  e.with_filter = false;
  j = Json::parse(run(cmd_eval, e, rec).out);
  EXPECT_EQ(j.at("filter"), false);
  EXPECT_EQ(j.at("accuracy"), 1.0);
}

TEST_F(CliTest, EvalErrors) {
  EvalArgs e;
  e.store_path = (*dir_ / "absent.json").string();
  e.manifest_path = (data() / "manifest.tsv").string();
  EXPECT_EQ(run(cmd_eval, e).code, kError);

  e.store_path = store().string();
  const auto empty = data() / "empty.tsv";
  {
    std::ofstream out(empty);
    write_manifest(out, {});
  }
  e.manifest_path = empty.string();
  auto r = run(cmd_eval, e);
  EXPECT_EQ(r.code, kError);
  EXPECT_NE(r.err.find("empty"), std::string::npos);

  const auto gap = data() / "gap.tsv";
  {
    std::ofstream out(gap);
    write_manifest(out, {{"corpus/nope.wav", "one", {}}});
  }
  e.manifest_path = gap.string();
  r = run(cmd_eval, e);
  EXPECT_EQ(r.code, kError);
  EXPECT_NE(r.err.find("error: missing clip "), std::string::npos) << r.err;
  EXPECT_NE(r.err.find("corpus/nope.wav"), std::string::npos) << r.err;
}
