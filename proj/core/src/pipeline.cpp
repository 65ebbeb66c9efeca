#include "priordis/pipeline.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>
#include "priordis/error.hpp"
#include "priordis/parallel.hpp"
#include "priordis/weighting.hpp"

namespace priordis {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

// ---- in-memory stages -------------------------------------------------------

WordSpaceResult build_word_space(const Corpus& corpus, const StopList& stop, const PipelineConfig& cfg) {
  WordSpaceResult r;
  r.space = build_semantic_space(corpus, cfg.space, stop, &r.vocabulary);
  return r;
}

HolisticPhraseSpace build_holistic_space(const Corpus& corpus, const std::vector<RelationOccurrence>& relations,
                                         const Vocabulary& vocabulary, const PipelineConfig& cfg) {
  HolisticConfig h = cfg.holistic;
  h.weighting = {cfg.space.pmi_log_base, cfg.space.clip_negative_lmi};
  const auto inventory = collect_phrases(relations, corpus, h.min_phrase_count);
  if (inventory.empty())
    throw EmptyInputError(fmt::format("no verb-object phrase occurs at least {} times", h.min_phrase_count));
  return build_holistic_vectors(corpus, inventory, vocabulary, h);
}

std::set<PhraseKey> held_out_phrases(const std::vector<PhraseSimEntry>& similarity) {
  std::set<PhraseKey> out;
  for (const auto& e : similarity) {
    out.insert(e.first);
    out.insert(e.second);
  }
  return out;
}

std::vector<std::string> training_objects(const std::string& verb, const SemanticSpace& words,
                                          const HolisticPhraseSpace& holistic,
                                          const std::set<PhraseKey>& held_out) {
  std::vector<std::string> out;
  for (const auto& key : holistic.space.keys()) {
    const auto phrase = parse_phrase_key(key);
    if (phrase.verb != verb || held_out.contains(phrase)) continue;
    if (words.contains(term_key(phrase.object, Pos::Noun))) out.push_back(phrase.object);
  }
  std::sort(out.begin(), out.end());
  return out;
}

SenseInventory induce_verb_senses(const std::string& verb, const std::vector<std::string>& objects,
                                  const Corpus& corpus, const std::vector<RelationOccurrence>& relations,
                                  const SemanticSpace& words, const ClusterConfig& cfg) {
  const std::set<std::string> allowed(objects.begin(), objects.end());
  std::vector<VerbOccurrence> occurrences;
  for (std::size_t i = 0; i < relations.size(); ++i) {
    const auto& r = relations[i];
    if (r.verb != verb || !allowed.contains(r.object)) continue;
    validate_relation(r, corpus);
    if (auto ctx = context_vector(corpus.sentence(r.sentence), r.verb_position, words, i))
      occurrences.push_back({r.object, std::move(ctx->vector)});
  }
  if (occurrences.empty()) throw EmptyInputError("no usable contexts for verb " + verb);
  return build_sense_inventory(verb, occurrences, cfg);
}

TrainingSet verb_training_set(const std::string& verb, const std::vector<std::string>& objects,
                              const SemanticSpace& words, const HolisticPhraseSpace& holistic) {
  if (objects.empty()) throw EmptyInputError("no training objects for verb " + verb);
  TrainingSet ts;
  ts.x.resize(static_cast<Eigen::Index>(objects.size()), words.dim());
  ts.y.resize(static_cast<Eigen::Index>(objects.size()), holistic.space.dim());
  for (std::size_t i = 0; i < objects.size(); ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    ts.x.row(r) = words.vector(term_key(objects[i], Pos::Noun)).transpose();
    ts.y.row(r) = holistic.vector({verb, objects[i]}).transpose();
  }
  ts.objects = objects;
  return ts;
}

VerbMatrix train_ambiguous(const std::string& verb, const std::vector<std::string>& objects,
                           const SemanticSpace& words, const HolisticPhraseSpace& holistic,
                           const RegressionConfig& reg) {
  return train_gd(verb_training_set(verb, objects, words, holistic), reg, verb);
}

SenseModel train_per_sense(const std::string& verb, const SenseInventory& inventory,
                           const std::vector<std::string>& objects, const SemanticSpace& words,
                           const HolisticPhraseSpace& holistic, const RegressionConfig& reg) {
  if (inventory.senses.empty()) throw EmptyInputError("sense inventory of " + verb + " is empty");
  SenseModel model{inventory, {}};
  std::vector<std::vector<std::string>> by_sense(inventory.senses.size());
  if (inventory.senses.size() == 1) {
    by_sense[0] = objects;
  } else {
    for (const auto& o : objects) {
      const auto s = inventory.sense_of(o);
      const int id = s ? *s : assign_object(words.vector(term_key(o, Pos::Noun)), inventory).sense;
      by_sense[static_cast<std::size_t>(id)].push_back(o);
    }
  }
  for (std::size_t s = 0; s < by_sense.size(); ++s) {
    if (by_sense[s].empty())
      throw EmptyInputError(fmt::format("sense {} of {} has no training objects", s, verb));
    model.matrices.push_back(
        train_gd(verb_training_set(verb, by_sense[s], words, holistic), reg, verb, static_cast<int>(s)));
  }
  return model;
}

PermutationOptions permutation_options(const PipelineConfig& cfg) {
  PermutationOptions p;
  p.resamples = cfg.permutations;
  p.seed = cfg.seed;
  return p;
}

SupervisedOptions supervised_options(const PipelineConfig& cfg, unsigned jobs) {
  SupervisedOptions o;
  o.folds = cfg.folds;
  o.seed = cfg.seed;
  o.jobs = jobs;
  o.permutation = permutation_options(cfg);
  return o;
}

namespace {

std::vector<std::string> dataset_verbs(const std::vector<PhraseSimEntry>& dataset) {
  std::set<std::string> verbs;
  for (const auto& e : dataset) {
    verbs.insert(e.first.verb);
    verbs.insert(e.second.verb);
  }
  return {verbs.begin(), verbs.end()};
}

struct VerbModels {
  SenseInventory inventory;
  VerbMatrix ambiguous;
  SenseModel senses;
};

}  // namespace

SimilarityRun run_similarity_pipeline(const Corpus& corpus, const std::vector<RelationOccurrence>& relations,
                                      const std::vector<PhraseSimEntry>& dataset,
                                      std::shared_ptr<const SemanticSpace> words,
                                      std::shared_ptr<const HolisticPhraseSpace> holistic,
                                      const PipelineConfig& cfg, unsigned jobs) {
  const auto held_out = held_out_phrases(dataset);
  const auto verbs = dataset_verbs(dataset);
  const auto hash = cfg.hash();
  auto trained = parallel_map<VerbModels>(verbs.size(), jobs, [&](std::size_t i) {
    const auto& verb = verbs[i];
    const auto objects = training_objects(verb, *words, *holistic, held_out);
    if (objects.empty()) throw EmptyInputError("no training objects for verb " + verb);
    VerbModels m;
    m.inventory = induce_verb_senses(verb, objects, corpus, relations, *words, cfg.cluster);
    m.inventory.config_hash = hash;
    m.ambiguous = train_ambiguous(verb, objects, *words, *holistic, cfg.regression);
    m.senses = train_per_sense(verb, m.inventory, objects, *words, *holistic, cfg.regression);
    return m;
  });

  auto res = std::make_shared<CompositionResources>();
  res->words = std::move(words);
  res->holistic = std::move(holistic);
  SimilarityRun run;
  for (std::size_t i = 0; i < verbs.size(); ++i) {
    res->ambiguous[verbs[i]] = std::move(trained[i].ambiguous);
    res->senses[verbs[i]] = std::move(trained[i].senses);
    run.inventories[verbs[i]] = std::move(trained[i].inventory);
  }
  std::shared_ptr<const CompositionResources> shared = res;
  std::vector<CompositionModel> models;
  for (const auto kind : all_model_kinds()) models.emplace_back(kind, shared);
  run.report = run_similarity_task(dataset, models, permutation_options(cfg));
  run.report.human_agreement = cfg.human_agreement;
  run.report.config_hash = hash;
  return run;
}

// ---- artifact store -----------------------------------------------------------

ArtifactStore::ArtifactStore(fs::path root, std::string config_hash, bool force)
    : root_(std::move(root)), hash_(std::move(config_hash)), force_(force) {}

fs::path ArtifactStore::ambiguous_matrix(const std::string& verb) const {
  return root_ / "matrices" / (verb + ".amb.tsv");
}

fs::path ArtifactStore::sense_matrix(const std::string& verb, int sense) const {
  return root_ / "matrices" / fmt::format("{}.s{}.tsv", verb, sense);
}

void ArtifactStore::check_hash(const std::string& found, const fs::path& artifact) const {
  if (found == hash_ || force_) return;
  throw ConfigError(fmt::format(
      "{} was produced under config {} but the current config is {}; rerun that stage or pass --force",
      artifact.string(), found.empty() ? "(none)" : found, hash_));
}

namespace {

void require_artifact(const fs::path& path) {
  if (!fs::exists(path)) throw MissingArtifactError("missing artifact: " + path.string());
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const fs::path& path, const std::string& text) {
  std::error_code ec;
  fs::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << text;
}

}  // namespace

SemanticSpace ArtifactStore::load_word_space() const {
  require_artifact(word_space());
  std::string hash;
  auto space = SemanticSpace::load(word_space(), &hash);
  check_hash(hash, word_space());
  return space;
}

HolisticPhraseSpace ArtifactStore::load_holistic_space() const {
  require_artifact(holistic_space());
  std::string hash;
  HolisticPhraseSpace h;
  h.space = SemanticSpace::load(holistic_space(), &hash);
  check_hash(hash, holistic_space());
  h.frequency.assign(h.space.size(), 0);
  if (fs::exists(holistic_manifest())) {
    const auto manifest = Json::parse(read_text(holistic_manifest()));
    const auto& freq = manifest.at("frequency");
    for (std::size_t i = 0; i < h.space.size(); ++i)
      if (freq.contains(h.space.keys()[i])) h.frequency[i] = freq.at(h.space.keys()[i]).get<std::uint64_t>();
    h.zero_context = manifest.at("zero_context").get<std::vector<std::string>>();
  }
  return h;
}

SenseInventory ArtifactStore::load_senses(const std::string& verb) const {
  require_artifact(senses(verb));
  auto inv = load_inventory(senses(verb));
  check_hash(inv.config_hash, senses(verb));
  return inv;
}

VerbMatrix ArtifactStore::load_matrix(const fs::path& path) const {
  require_artifact(path);
  std::string hash;
  auto vm = priordis::load_matrix(path, &hash);
  check_hash(hash, path);
  return vm;
}

std::shared_ptr<CompositionResources> ArtifactStore::load_resources(const std::vector<ModelKind>& kinds,
                                                                    const std::vector<std::string>& verbs) const {
  const auto wants = [&](ModelKind k) { return std::find(kinds.begin(), kinds.end(), k) != kinds.end(); };
  std::vector<std::string> missing;
  const auto note = [&](const fs::path& p) {
    if (fs::exists(p)) return true;
    missing.push_back(fs::relative(p, root_).string());
    return false;
  };

  auto res = std::make_shared<CompositionResources>();
  if (note(word_space())) res->words = std::make_shared<SemanticSpace>(load_word_space());
  if (wants(ModelKind::HolisticLookup) && note(holistic_space()))
    res->holistic = std::make_shared<HolisticPhraseSpace>(load_holistic_space());
  for (const auto& verb : verbs) {
    if (wants(ModelKind::AmbiguousMatrix) && note(ambiguous_matrix(verb)))
      res->ambiguous[verb] = load_matrix(ambiguous_matrix(verb));
    if (wants(ModelKind::DisambiguatedMatrix) && note(senses(verb))) {
      SenseModel model{load_senses(verb), {}};
      bool complete = true;
      for (const auto& s : model.inventory.senses) {
        if (note(sense_matrix(verb, s.id))) model.matrices.push_back(load_matrix(sense_matrix(verb, s.id)));
        else complete = false;
      }
      if (complete) res->senses[verb] = std::move(model);
    }
  }
  if (!missing.empty()) {
    std::string list;
    for (const auto& m : missing) list += (list.empty() ? "" : ", ") + m;
    throw MissingArtifactError(fmt::format("missing artifacts in {}: {}", root_.string(), list));
  }
  return res;
}

// ---- subcommands ----------------------------------------------------------------

namespace {

void require_input(const fs::path& path, const char* key) {
  if (path.empty()) throw ConfigError(fmt::format("config key '{}' is required for this command", key));
  if (!fs::exists(path)) throw ConfigError(fmt::format("{} '{}' does not exist", key, path.string()));
}

StopList load_stop(const PipelineConfig& cfg) {
  if (cfg.stoplist.empty()) return {};
  require_input(cfg.stoplist, "stoplist");
  return load_stop_list(cfg.stoplist);
}

Corpus load_corpus(const PipelineConfig& cfg) {
  require_input(cfg.corpus, "corpus");
  return Corpus::load(cfg.corpus);
}

std::vector<RelationOccurrence> load_rel(const PipelineConfig& cfg) {
  require_input(cfg.relations, "relations");
  return load_relations(cfg.relations);
}

std::set<PhraseKey> load_held_out(const PipelineConfig& cfg) {
  if (cfg.similarity_dataset.empty()) return {};
  require_input(cfg.similarity_dataset, "similarity_dataset");
  return held_out_phrases(load_phrase_sim_dataset(cfg.similarity_dataset));
}

ArtifactStore open_store(const PipelineConfig& cfg, const CommandOptions& opts) {
  std::error_code ec;
  fs::create_directories(cfg.artifacts, ec);
  if (ec || !fs::is_directory(cfg.artifacts))
    throw ConfigError(fmt::format("artifact directory '{}' is not writable", cfg.artifacts.string()));
  return ArtifactStore(cfg.artifacts, cfg.hash(), opts.force);
}

// Verbs named by flags or config, else every verb of the holistic space.
std::vector<std::string> select_verbs(const PipelineConfig& cfg, const CommandOptions& opts,
                                      const HolisticPhraseSpace& holistic,
                                      const std::vector<RelationOccurrence>* relations) {
  std::set<std::string> known;
  for (const auto& key : holistic.space.keys()) known.insert(parse_phrase_key(key).verb);
  const auto& requested = !opts.verbs.empty() ? opts.verbs : cfg.verbs;
  if (requested.empty()) return {known.begin(), known.end()};
  std::set<std::string> in_relations;
  if (relations)
    for (const auto& r : *relations) in_relations.insert(r.verb);
  for (const auto& v : requested) {
    if (relations && !in_relations.contains(v))
      throw ConfigError(fmt::format("verb '{}' does not occur in the relations file", v));
    if (!known.contains(v))
      throw ConfigError(fmt::format("verb '{}' has no phrase above the frequency cut-off", v));
  }
  return requested;
}

}  // namespace

void cmd_build_space(const PipelineConfig& cfg, const CommandOptions& opts) {
  const auto store = open_store(cfg, opts);
  const auto corpus = load_corpus(cfg);
  const auto stop = load_stop(cfg);
  const auto result = build_word_space(corpus, stop, cfg);
  result.space.save(store.word_space(), store.config_hash());

  Json manifest;
  manifest["config_hash"] = store.config_hash();
  manifest["window"] = cfg.space.window;
  manifest["basis_size"] = cfg.space.basis_size;
  manifest["top_exclusions"] = cfg.space.top_exclusions;
  manifest["min_occurrences"] = cfg.space.min_occurrences;
  manifest["svd_dim"] = cfg.space.svd_dim;
  manifest["weighting"] = "lmi";
  manifest["clip_negative_lmi"] = cfg.space.clip_negative_lmi;
  manifest["sentences"] = corpus.size();
  manifest["tokens"] = corpus.token_count();
  manifest["targets"] = result.vocabulary.targets().size();
  manifest["basis"] = result.vocabulary.basis().size();
  manifest["dim"] = result.space.dim();
  write_text(store.word_manifest(), manifest.dump(2) + "\n");
}

void cmd_build_holistic(const PipelineConfig& cfg, const CommandOptions& opts) {
  const auto store = open_store(cfg, opts);
  const auto corpus = load_corpus(cfg);
  const auto stop = load_stop(cfg);
  const auto relations = load_rel(cfg);
  const auto vocabulary = build_vocabulary(corpus, cfg.space, stop);
  const auto holistic = build_holistic_space(corpus, relations, vocabulary, cfg);
  holistic.space.save(store.holistic_space(), store.config_hash());

  Json manifest;
  manifest["config_hash"] = store.config_hash();
  manifest["window"] = cfg.holistic.window;
  manifest["min_phrase_count"] = cfg.holistic.min_phrase_count;
  manifest["svd_dim"] = cfg.holistic.svd_dim;
  manifest["phrases"] = holistic.space.size();
  Json freq = Json::object();
  for (std::size_t i = 0; i < holistic.space.size(); ++i) freq[holistic.space.keys()[i]] = holistic.frequency[i];
  manifest["frequency"] = freq;
  manifest["zero_context"] = holistic.zero_context;
  write_text(store.holistic_manifest(), manifest.dump(2) + "\n");
}

void cmd_induce_senses(const PipelineConfig& cfg, const CommandOptions& opts) {
  const auto store = open_store(cfg, opts);
  const auto corpus = load_corpus(cfg);
  const auto relations = load_rel(cfg);
  const auto held_out = load_held_out(cfg);
  const auto words = store.load_word_space();
  const auto holistic = store.load_holistic_space();
  const auto verbs = select_verbs(cfg, opts, holistic, &relations);

  const auto inventories = parallel_map<SenseInventory>(verbs.size(), opts.jobs, [&](std::size_t i) {
    const auto objects = training_objects(verbs[i], words, holistic, held_out);
    auto inv = induce_verb_senses(verbs[i], objects, corpus, relations, words, cfg.cluster);
    inv.config_hash = store.config_hash();
    return inv;
  });
  for (const auto& inv : inventories) {
    fs::create_directories(store.senses(inv.verb).parent_path());
    save_inventory(store.senses(inv.verb), inv);
  }
}

void cmd_train(const PipelineConfig& cfg, TrainTarget target, const CommandOptions& opts) {
  const auto store = open_store(cfg, opts);
  const auto relations = load_rel(cfg);
  const auto held_out = load_held_out(cfg);
  const auto words = store.load_word_space();
  const auto holistic = store.load_holistic_space();
  const auto verbs = select_verbs(cfg, opts, holistic, &relations);
  fs::create_directories(store.root() / "matrices");

  if (target == TrainTarget::Ambiguous) {
    const auto matrices = parallel_map<VerbMatrix>(verbs.size(), opts.jobs, [&](std::size_t i) {
      return train_ambiguous(verbs[i], training_objects(verbs[i], words, holistic, held_out), words, holistic,
                             cfg.regression);
    });
    for (const auto& m : matrices) save_matrix(store.ambiguous_matrix(m.verb), m, store.config_hash());
    return;
  }

  std::vector<std::string> missing;
  for (const auto& v : verbs)
    if (!fs::exists(store.senses(v))) missing.push_back(fs::relative(store.senses(v), store.root()).string());
  if (!missing.empty()) {
    std::string list;
    for (const auto& m : missing) list += (list.empty() ? "" : ", ") + m;
    throw MissingArtifactError("missing sense inventories (run induce-senses): " + list);
  }
  const auto models = parallel_map<SenseModel>(verbs.size(), opts.jobs, [&](std::size_t i) {
    return train_per_sense(verbs[i], store.load_senses(verbs[i]),
                           training_objects(verbs[i], words, holistic, held_out), words, holistic,
                           cfg.regression);
  });
  for (std::size_t i = 0; i < verbs.size(); ++i)
    for (const auto& m : models[i].matrices)
      save_matrix(store.sense_matrix(verbs[i], *m.sense), m, store.config_hash());
}

void cmd_compose(const PipelineConfig& cfg, ModelKind model, const fs::path& phrases, const fs::path& out,
                 const CommandOptions& opts) {
  const auto store = open_store(cfg, opts);
  std::vector<PhraseKey> keys;
  if (!phrases.empty()) {
    if (!fs::exists(phrases)) throw ConfigError("phrase file '" + phrases.string() + "' does not exist");
    std::ifstream in(phrases);
    std::string verb;
    std::string object;
    while (in >> verb >> object) keys.push_back({verb, object});
  } else {
    require_input(cfg.similarity_dataset, "similarity_dataset");
    for (const auto& key : held_out_phrases(load_phrase_sim_dataset(cfg.similarity_dataset))) keys.push_back(key);
  }
  if (keys.empty()) throw EmptyInputError("no phrases to compose");

  std::set<std::string> verbs;
  for (const auto& k : keys) verbs.insert(k.verb);
  const auto resources = store.load_resources({model}, {verbs.begin(), verbs.end()});
  const CompositionModel composer(model, resources);

  std::vector<std::string> names;
  std::vector<Eigen::VectorXd> rows;
  for (const auto& k : keys) {
    names.push_back(k.str());
    rows.push_back(composer.compose(k.verb, k.object));
  }
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i) m.row(static_cast<Eigen::Index>(i)) = rows[i].transpose();
  const auto target = out.empty() ? store.report(fmt::format("composed_{}.tsv", to_string(model))) : out;
  fs::create_directories(fs::absolute(target).parent_path());
  SemanticSpace(std::move(names), std::move(m)).save(target, store.config_hash());
}

void cmd_evaluate(const PipelineConfig& cfg, EvalTask task, const CommandOptions& opts) {
  const auto store = open_store(cfg, opts);
  if (task == EvalTask::Supervised) {
    require_input(cfg.supervised_dataset, "supervised_dataset");
    const auto datasets = load_sense_dataset(cfg.supervised_dataset);
    const auto words = store.load_word_space();
    const auto holistic = store.load_holistic_space();
    auto report = run_supervised_task(datasets, words, holistic, cfg.regression, supervised_options(cfg, opts.jobs));
    report.config_hash = store.config_hash();
    write_text(store.report("supervised.json"), supervised_report_json(report));
    write_text(store.report("supervised.tsv"), supervised_report_tsv(report));
    return;
  }
  require_input(cfg.similarity_dataset, "similarity_dataset");
  const auto dataset = load_phrase_sim_dataset(cfg.similarity_dataset);
  const auto verbs = dataset_verbs(dataset);
  std::shared_ptr<const CompositionResources> resources = store.load_resources(all_model_kinds(), verbs);
  std::vector<CompositionModel> models;
  for (const auto kind : all_model_kinds()) models.emplace_back(kind, resources);
  auto report = run_similarity_task(dataset, models, permutation_options(cfg));
  report.human_agreement = cfg.human_agreement;
  report.config_hash = store.config_hash();
  write_text(store.report("similarity.json"), similarity_report_json(report));
  write_text(store.report("similarity.tsv"), similarity_report_tsv(report));
}

}  // namespace priordis
