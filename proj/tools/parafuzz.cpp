#include <CLI11.hpp>

#include <iostream>

#include "parafuzz/app.h"

using namespace parafuzz;

int main(int argc, char** argv) {
  CLI::App cli{"Isolated-word recognizer with fuzzy paralinguistic normalization"};
  cli.require_subcommand(1);
  cli.set_version_flag("--version", "parafuzz 0.1.0");

  std::string config_path;
  std::string format = "table";
  std::uint64_t seed = 7;
  bool verbose = false;
  cli.add_option("--config", config_path, "key=value configuration file");
  cli.add_option("--format", format, "output format")
      ->check(CLI::IsMember({"table", "records"}));
  cli.add_option("--seed", seed, "corpus seed");
  cli.add_flag("--verbose", verbose, "extra diagnostics on stderr");

  app::EnrollArgs enroll;
  auto* enroll_cmd = cli.add_subcommand("enroll", "add templates to a store");
  enroll_cmd->add_option("--lexicon", enroll.lexicon_dir,
                         "directory of <word>.wav or <word>_<n>.wav clips");
  enroll_cmd->add_option("--word", enroll.word, "word label for --audio clips");
  enroll_cmd->add_option("--audio", enroll.audio, "clips of one word")->expected(1, -1);
  enroll_cmd->add_option("--store", enroll.store_path, "template store")->required();

  app::AnalyzeArgs analyze;
  auto* analyze_cmd = cli.add_subcommand("analyze", "paralinguistic profile per segment");
  analyze_cmd->add_option("input", analyze.input, "audio clip")->required();
  analyze_cmd->add_option("--store", analyze.store_path, "lexicon reference store");

  app::FilterArgs filter;
  auto* filter_cmd = cli.add_subcommand("filter", "normalize features and emit side-channel records");
  filter_cmd->add_option("input", filter.input, "audio clip")->required();
  filter_cmd->add_option("--store", filter.store_path, "lexicon reference store");
  filter_cmd->add_option("--features", filter.features_path, "normalized feature dump (JSON Lines)");
  filter_cmd->add_option("--raw-features", filter.raw_features_path,
                         "unfiltered feature dump (JSON Lines)");

  app::RecognizeArgs recog;
  auto* recog_cmd = cli.add_subcommand("recognize", "recognize the words in a clip");
  recog_cmd->add_option("input", recog.input, "audio clip")->required();
  recog_cmd->add_option("--store", recog.store_path, "template store")->required();
  recog_cmd->add_flag("--interactive", recog.interactive, "confirm flagged words on stdin");
  recog_cmd->add_flag("--no-filter", recog.no_filter, "match raw features");

  app::SynthArgs synth;
  auto* synth_cmd = cli.add_subcommand("synth", "render a synthetic lexicon and evaluation corpus");
  synth_cmd->add_option("--out", synth.out_dir, "output directory")->required();
  synth_cmd->add_option("--spec", synth.spec_path, "lexicon JSON (default: digits)");
  synth_cmd->add_option("--grid", synth.grid, "default | stretch=a,b;gain=c,d;tilt=e,f");
  synth_cmd->add_flag("--homophones", synth.homophones, "append the tail/tale pair");

  app::EvalArgs eval;
  auto* eval_cmd = cli.add_subcommand("eval", "accuracy over a manifest");
  eval_cmd->add_option("--store", eval.store_path, "template store")->required();
  eval_cmd->add_option("--corpus,--manifest", eval.manifest_path, "corpus manifest.tsv")
      ->required();
  eval_cmd->add_flag("--with-filter,!--no-filter", eval.with_filter,
                     "normalize before matching (default) or match raw features");

  CLI11_PARSE(cli, argc, argv);

  app::Context ctx;
  ctx.format = format == "records" ? app::Format::kRecords : app::Format::kTable;
  ctx.seed = seed;
  ctx.verbose = verbose;
  app::Io io{std::cout, std::cerr, std::cin};
  try {
    if (!config_path.empty()) ctx.config = load_config(config_path);
    if (*enroll_cmd) return app::cmd_enroll(enroll, ctx, io);
    if (*analyze_cmd) return app::cmd_analyze(analyze, ctx, io);
    if (*filter_cmd) return app::cmd_filter(filter, ctx, io);
    if (*recog_cmd) return app::cmd_recognize(recog, ctx, io);
    if (*synth_cmd) return app::cmd_synth(synth, ctx, io);
    if (*eval_cmd) return app::cmd_eval(eval, ctx, io);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return app::kError;
  }
  return app::kError;
}
