// priordis: command line driver for the prior-disambiguation pipeline.
//
// Exit codes: 0 success, 1 runtime failure, 2 configuration error,
// 3 missing artifact.

#include <fmt/format.h>

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "priordis/config.hpp"
#include "priordis/error.hpp"
#include "priordis/pipeline.hpp"
#include "priordis/synthetic.hpp"

namespace fs = std::filesystem;
using namespace priordis;

namespace {

constexpr int kExitFailure = 1;
constexpr int kExitConfig = 2;
constexpr int kExitMissing = 3;

PipelineConfig load_config(const std::string& path, std::optional<std::uint64_t> seed) {
  if (path.empty()) throw ConfigError("--config is required for this command");
  auto cfg = PipelineConfig::load(path);
  if (seed) cfg.set_seed(*seed);
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Verb matrices with prior sense disambiguation"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  unsigned jobs = 1;
  std::optional<std::uint64_t> seed;
  bool force = false;
  app.add_option("--config", config_path, "Pipeline config file");
  app.add_option("--jobs", jobs, "Worker threads for per-verb work")->check(CLI::PositiveNumber);
  app.add_option("--seed", seed, "Override the config seed");
  app.add_flag("--force", force, "Accept artifacts produced under another config hash");

  auto* build_space = app.add_subcommand("build-space", "Build the word space");
  auto* build_holistic = app.add_subcommand("build-holistic", "Build holistic phrase vectors");

  std::vector<std::string> verbs;
  auto* induce = app.add_subcommand("induce-senses", "Cluster verb contexts into senses");
  induce->add_option("--verb", verbs, "Restrict to these verbs");

  std::string train_mode;
  auto* train = app.add_subcommand("train", "Train verb matrices");
  train->add_option("--mode", train_mode, "ambiguous or per_sense")
      ->required()
      ->check(CLI::IsMember({"ambiguous", "per_sense"}));
  train->add_option("--verb", verbs, "Restrict to these verbs");

  std::string model_name;
  std::string phrases_path;
  std::string out_path;
  auto* compose = app.add_subcommand("compose", "Compose phrase vectors with one model");
  compose->add_option("--model", model_name, "verbs_only, additive, multiplicative, ambiguous, disambiguated, holistic")
      ->required();
  compose->add_option("--phrases", phrases_path, "File of `verb object` lines (default: similarity dataset)");
  compose->add_option("--out", out_path, "Output TSV (default: artifacts/reports/composed_<model>.tsv)");

  std::string task;
  auto* evaluate = app.add_subcommand("evaluate", "Run an evaluation task");
  evaluate->add_option("--task", task, "supervised or similarity")
      ->required()
      ->check(CLI::IsMember({"supervised", "similarity"}));

  SyntheticSpec spec;
  std::string synth_out;
  auto* synth = app.add_subcommand("synth", "Generate a planted-sense corpus and datasets");
  synth->add_option("--out", synth_out, "Output directory")->required();
  synth->add_option("--verbs", spec.verbs, "Number of verbs");
  synth->add_option("--senses", spec.senses_per_verb, "Senses per verb");
  synth->add_option("--objects", spec.objects_per_sense, "Training objects per sense");
  synth->add_option("--test-objects", spec.test_objects_per_sense, "Held-out objects per sense");
  synth->add_option("--context-words", spec.context_words, "Context words per sense");
  synth->add_option("--disjointness", spec.disjointness, "Sense context disjointness in [0, 1]");
  synth->add_option("--noise", spec.noise, "Noise level of the holistic profiles");
  synth->add_flag("--shared-map", spec.shared_map, "All senses of a verb share one map");
  synth->add_option("--phrase-occurrences", spec.phrase_occurrences, "Occurrences per phrase");
  synth->add_option("--test-phrase-occurrences", spec.test_phrase_occurrences, "Occurrences per held-out phrase");
  synth->add_option("--noun-sentences", spec.noun_sentences, "Sentences per object noun");
  synth->add_option("--pairs", spec.similarity_pairs, "Similarity pairs");
  synth->add_option("--cross-verb-share", spec.cross_verb_share, "Fraction of pairs with two different verbs");
  synth->add_option("--shared-features", spec.shared_features, "Feature words shared by all objects");
  synth->add_option("--active-features", spec.active_features, "Shared features per object");
  synth->add_option("--topic-features", spec.topic_features, "Topic features per sense class");
  synth->add_option("--topic-weight", spec.topic_weight, "Weight of the topic features");
  synth->add_option("--general-words", spec.general_words, "Verb-independent context words");
  synth->add_option("--general-share", spec.general_share, "Probability mass of the general words");
  synth->add_option("--map-fan-in", spec.map_fan_in, "Nonzeros per row of each sense map");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    CommandOptions opts;
    opts.jobs = jobs;
    opts.force = force;
    opts.verbs = verbs;

    if (synth->parsed()) {
      if (seed) spec.seed = *seed;
      const auto data = generate_synthetic(spec);
      write_synthetic(data, synth_out, synthetic_pipeline_config(spec));
      fmt::print("wrote {} sentences, {} relations to {}\n", data.corpus.size(), data.relations.size(), synth_out);
      return 0;
    }

    const auto cfg = load_config(config_path, seed);
    if (build_space->parsed()) {
      cmd_build_space(cfg, opts);
    } else if (build_holistic->parsed()) {
      cmd_build_holistic(cfg, opts);
    } else if (induce->parsed()) {
      cmd_induce_senses(cfg, opts);
    } else if (train->parsed()) {
      cmd_train(cfg, train_mode == "ambiguous" ? TrainTarget::Ambiguous : TrainTarget::PerSense, opts);
    } else if (compose->parsed()) {
      cmd_compose(cfg, parse_model_kind(model_name), phrases_path, out_path, opts);
    } else if (evaluate->parsed()) {
      cmd_evaluate(cfg, task == "supervised" ? EvalTask::Supervised : EvalTask::Similarity, opts);
    }
    return 0;
  } catch (const ConfigError& e) {
    fmt::print(stderr, "priordis: config error: {}\n", e.what());
    return kExitConfig;
  } catch (const MissingArtifactError& e) {
    fmt::print(stderr, "priordis: {}\n", e.what());
    return kExitMissing;
  } catch (const std::exception& e) {
    fmt::print(stderr, "priordis: error: {}\n", e.what());
    return kExitFailure;
  }
}
