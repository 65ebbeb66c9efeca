#include "priordis/evaluation.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <random>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>
#include "priordis/error.hpp"
#include "priordis/parallel.hpp"
#include "priordis/space.hpp"

namespace priordis {

void SenseAnnotatedDataset::validate() const {
  std::set<std::string> first(sense1.begin(), sense1.end());
  for (const auto& o : sense2)
    if (first.contains(o)) throw FormatError("object '" + o + "' is listed under both senses of '" + verb + "'");
}

std::vector<SenseAnnotatedDataset> read_sense_dataset(std::istream& in) {
  std::vector<SenseAnnotatedDataset> out;
  std::map<std::string, std::size_t> index;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream fields(line);
    std::string verb, sense, object;
    if (!(std::getline(fields, verb, '\t') && std::getline(fields, sense, '\t') && std::getline(fields, object)))
      throw FormatError("expected verb<TAB>sense_id<TAB>object", lineno);
    if (sense != "1" && sense != "2") throw FormatError("sense id must be 1 or 2", lineno);
    auto [it, fresh] = index.emplace(verb, out.size());
    if (fresh) out.push_back(SenseAnnotatedDataset{verb, {}, {}});
    auto& ds = out[it->second];
    (sense == "1" ? ds.sense1 : ds.sense2).push_back(object);
  }
  for (const auto& ds : out) ds.validate();
  return out;
}

std::vector<SenseAnnotatedDataset> load_sense_dataset(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw MissingArtifactError("cannot open sense-annotated dataset " + path.string());
  return read_sense_dataset(in);
}

std::vector<Fold> crossval_folds(const SenseAnnotatedDataset& dataset, int folds, std::uint64_t seed) {
  if (folds < 2) throw ConfigError("cross-validation needs at least 2 folds");
  dataset.validate();
  const auto k = static_cast<std::size_t>(folds);
  std::vector<Fold> out(k);
  std::mt19937_64 rng(seed);
  const std::vector<std::string>* senses[2] = {&dataset.sense1, &dataset.sense2};
  for (int s = 0; s < 2; ++s) {
    auto objects = *senses[s];
    if (objects.size() < k)
      throw Error(fmt::format("sense {} of '{}' has {} objects, fewer than {} folds", s + 1, dataset.verb,
                              objects.size(), folds));
    std::shuffle(objects.begin(), objects.end(), rng);
    const std::size_t n = objects.size();
    for (std::size_t f = 0; f < k; ++f) {
      const std::size_t lo = f * n / k, hi = (f + 1) * n / k;
      for (std::size_t i = 0; i < n; ++i) {
        auto& dst = (i >= lo && i < hi) ? out[f].test[s] : out[f].train[s];
        dst.push_back(objects[i]);
      }
    }
  }
  return out;
}

MetricSet summarize(const std::vector<std::size_t>& ranks, const std::vector<double>& cosines) {
  MetricSet m;
  m.count = ranks.size();
  if (ranks.empty()) return m;
  m.accuracy = accuracy(ranks);
  m.mrr = mrr(ranks);
  m.avg_cosine = mean(cosines);
  return m;
}

namespace {

struct PhraseVectors {
  Eigen::VectorXd noun;
  Eigen::VectorXd holistic;
};

TrainingSet make_training_set(const std::string& verb, const std::vector<std::string>& objects,
                              const std::map<PhraseKey, PhraseVectors>& vectors) {
  TrainingSet ts;
  const auto& first = vectors.at(PhraseKey{verb, objects.front()});
  ts.x.resize(static_cast<Eigen::Index>(objects.size()), first.noun.size());
  ts.y.resize(static_cast<Eigen::Index>(objects.size()), first.holistic.size());
  for (std::size_t i = 0; i < objects.size(); ++i) {
    const auto& pv = vectors.at(PhraseKey{verb, objects[i]});
    ts.x.row(static_cast<Eigen::Index>(i)) = pv.noun.transpose();
    ts.y.row(static_cast<Eigen::Index>(i)) = pv.holistic.transpose();
    ts.objects.push_back(objects[i]);
  }
  return ts;
}

struct FoldMatrices {
  VerbMatrix ambiguous;
  VerbMatrix sense[2];
};

}  // namespace

SupervisedReport run_supervised_task(const std::vector<SenseAnnotatedDataset>& datasets,
                                     const SemanticSpace& words, const HolisticPhraseSpace& holistic,
                                     const RegressionConfig& reg, const SupervisedOptions& opts) {
  if (datasets.empty()) throw EmptyInputError("sense-annotated dataset is empty");
  reg.validate();

  // Every (verb, object, sense) in dataset order; the candidate pool.
  struct Phrase {
    std::size_t verb;
    int sense;
    PhraseKey key;
  };
  std::vector<Phrase> phrases;
  std::map<PhraseKey, PhraseVectors> vectors;
  std::vector<std::string> missing;
  for (std::size_t v = 0; v < datasets.size(); ++v) {
    const auto& ds = datasets[v];
    ds.validate();
    for (int s = 0; s < 2; ++s) {
      for (const auto& obj : s == 0 ? ds.sense1 : ds.sense2) {
        PhraseKey key{ds.verb, obj};
        const auto noun_row = words.find(term_key(obj, Pos::Noun));
        const auto hol_row = holistic.space.find(key.str());
        if (!noun_row) missing.push_back("word '" + term_key(obj, Pos::Noun) + "'");
        if (!hol_row) missing.push_back("holistic '" + key.str() + "'");
        if (noun_row && hol_row) vectors[key] = PhraseVectors{words.row(*noun_row), holistic.space.row(*hol_row)};
        phrases.push_back(Phrase{v, s, key});
      }
    }
  }
  if (!missing.empty()) {
    std::string list;
    for (std::size_t i = 0; i < missing.size() && i < 20; ++i) list += (i ? ", " : "") + missing[i];
    if (missing.size() > 20) list += fmt::format(" ... ({} in total)", missing.size());
    throw MissingArtifactError("missing vectors for the supervised task: " + list);
  }

  std::vector<std::vector<Fold>> folds;
  for (const auto& ds : datasets) folds.push_back(crossval_folds(ds, opts.folds, opts.seed));
  const std::size_t nfolds = static_cast<std::size_t>(opts.folds);
  const std::size_t nverbs = datasets.size();

  auto trained = parallel_map<FoldMatrices>(nfolds * nverbs, opts.jobs, [&](std::size_t task) {
    const std::size_t f = task / nverbs, v = task % nverbs;
    const auto& fold = folds[v][f];
    const auto& verb = datasets[v].verb;
    std::vector<std::string> both = fold.train[0];
    both.insert(both.end(), fold.train[1].begin(), fold.train[1].end());
    FoldMatrices fm;
    fm.ambiguous = train_gd(make_training_set(verb, both, vectors), reg, verb);
    for (int s = 0; s < 2; ++s)
      fm.sense[s] = train_gd(make_training_set(verb, fold.train[s], vectors), reg, verb, s + 1);
    return fm;
  });

  SupervisedReport report;
  report.pool_size = phrases.size();
  std::vector<std::vector<std::size_t>> verb_ranks[2];
  std::vector<std::vector<double>> verb_cos[2];
  for (int m = 0; m < 2; ++m) {
    verb_ranks[m].resize(nverbs);
    verb_cos[m].resize(nverbs);
  }
  std::vector<std::size_t> all_ranks[2];

  for (std::size_t f = 0; f < nfolds; ++f) {
    // Composite pool under this fold's matrices: [model][phrase].
    std::vector<Eigen::VectorXd> pool[2];
    for (const auto& p : phrases) {
      const auto& fm = trained[f * nverbs + p.verb];
      const auto& x = vectors.at(p.key).noun;
      pool[0].push_back(apply_verb(fm.ambiguous, x));
      pool[1].push_back(apply_verb(fm.sense[p.sense], x));
    }
    std::vector<std::size_t> fold_ranks[2];
    std::vector<double> fold_cos[2];
    for (std::size_t i = 0; i < phrases.size(); ++i) {
      const auto& p = phrases[i];
      const auto& test = folds[p.verb][f].test[p.sense];
      if (std::find(test.begin(), test.end(), p.key.object) == test.end()) continue;
      const auto& h = vectors.at(p.key).holistic;
      for (int m = 0; m < 2; ++m) {
        std::vector<double> scores;
        scores.reserve(pool[m].size());
        for (const auto& c : pool[m]) scores.push_back(cosine(h, c));
        const std::size_t rank = rank_from_scores(scores, i);
        const double cos = scores[i];
        verb_ranks[m][p.verb].push_back(rank);
        verb_cos[m][p.verb].push_back(cos);
        fold_ranks[m].push_back(rank);
        fold_cos[m].push_back(cos);
        all_ranks[m].push_back(rank);
      }
      report.ambiguous_cosines.push_back(fold_cos[0].back());
      report.disambiguated_cosines.push_back(fold_cos[1].back());
    }
    report.folds.push_back(SupervisedFoldResult{static_cast<int>(f), summarize(fold_ranks[0], fold_cos[0]),
                                                summarize(fold_ranks[1], fold_cos[1])});
  }

  for (std::size_t v = 0; v < nverbs; ++v) {
    SupervisedVerbResult vr;
    vr.verb = datasets[v].verb;
    vr.ambiguous = summarize(verb_ranks[0][v], verb_cos[0][v]);
    vr.disambiguated = summarize(verb_ranks[1][v], verb_cos[1][v]);
    if (verb_cos[0][v].size() >= 6)
      vr.p_value = paired_significance(verb_cos[1][v], verb_cos[0][v], opts.permutation);
    report.verbs.push_back(std::move(vr));
  }
  report.ambiguous = summarize(all_ranks[0], report.ambiguous_cosines);
  report.disambiguated = summarize(all_ranks[1], report.disambiguated_cosines);
  if (report.ambiguous_cosines.size() >= 6)
    report.p_value = paired_significance(report.disambiguated_cosines, report.ambiguous_cosines, opts.permutation);
  return report;
}

std::vector<PhraseSimEntry> read_phrase_sim_dataset(std::istream& in) {
  std::vector<PhraseSimEntry> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream fields(line);
    PhraseSimEntry e;
    if (!(std::getline(fields, e.first.verb, '\t') && std::getline(fields, e.first.object, '\t') &&
          std::getline(fields, e.second.verb, '\t') && std::getline(fields, e.second.object, '\t') &&
          fields >> e.score))
      throw FormatError("expected verb1<TAB>obj1<TAB>verb2<TAB>obj2<TAB>score", lineno);
    if (e.first.verb.empty() || e.first.object.empty() || e.second.verb.empty() || e.second.object.empty())
      throw FormatError("empty phrase in similarity dataset", lineno);
    out.push_back(std::move(e));
  }
  return out;
}

std::vector<PhraseSimEntry> load_phrase_sim_dataset(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw MissingArtifactError("cannot open phrase-similarity dataset " + path.string());
  return read_phrase_sim_dataset(in);
}

const SimilarityModelResult* SimilarityReport::find(ModelKind kind) const {
  for (const auto& m : models)
    if (m.model == kind) return &m;
  return nullptr;
}

double paired_rho_significance(const std::vector<double>& scores_a, const std::vector<double>& scores_b,
                               const std::vector<double>& gold, const PermutationOptions& opts) {
  if (scores_a.size() != scores_b.size() || scores_a.size() != gold.size())
    throw ShapeError("paired correlation test on lists of different lengths");
  if (gold.size() < 6) throw UndefinedStatisticError("paired correlation test needs at least 6 pairs");
  const auto ra = average_ranks(scores_a);
  const auto rb = average_ranks(scores_b);
  const double observed = std::abs(spearman_rho(ra, gold) - spearman_rho(rb, gold));
  const double slack = 1e-12 * std::max(1.0, observed);
  std::mt19937_64 rng(opts.seed);
  std::vector<double> xa(ra), xb(rb);
  std::size_t extreme = 0;
  for (std::size_t r = 0; r < opts.resamples; ++r) {
    std::uint64_t bits = 0;
    for (std::size_t i = 0; i < gold.size(); ++i) {
      if (i % 64 == 0) bits = rng();
      const bool swap = bits & 1U;
      bits >>= 1;
      xa[i] = swap ? rb[i] : ra[i];
      xb[i] = swap ? ra[i] : rb[i];
    }
    double diff = 0.0;
    try {
      diff = std::abs(spearman_rho(xa, gold) - spearman_rho(xb, gold));
    } catch (const UndefinedStatisticError&) {
      diff = 0.0;
    }
    if (diff >= observed - slack) ++extreme;
  }
  return static_cast<double>(extreme + 1) / static_cast<double>(opts.resamples + 1);
}

SimilarityReport run_similarity_task(const std::vector<PhraseSimEntry>& dataset,
                                     const std::vector<CompositionModel>& models,
                                     const PermutationOptions& permutation) {
  if (dataset.empty()) throw EmptyInputError("phrase-similarity dataset is empty");
  SimilarityReport report;
  for (const auto& model : models) {
    SimilarityModelResult res;
    res.model = model.kind();
    std::vector<double> cos, gold;
    for (const auto& e : dataset) {
      try {
        const auto sim = pair_similarity(model, e.first, e.second);
        res.cosines.emplace_back(sim.cosine);
        if (sim.degenerate) ++res.degenerate;
        cos.push_back(sim.cosine);
        gold.push_back(e.score);
      } catch (const LookupError&) {
        res.cosines.emplace_back(std::nullopt);
        ++res.skipped;
      }
    }
    res.scored = cos.size();
    if (res.scored < 2)
      throw UndefinedStatisticError(fmt::format("model {} scored only {} pairs", to_string(res.model), res.scored));
    res.rho = spearman_rho(cos, gold);
    report.models.push_back(std::move(res));
  }

  const auto* amb = report.find(ModelKind::AmbiguousMatrix);
  const auto* dis = report.find(ModelKind::DisambiguatedMatrix);
  if (amb && dis) {
    std::vector<double> a, b, gold;
    for (std::size_t i = 0; i < dataset.size(); ++i) {
      if (amb->cosines[i] && dis->cosines[i]) {
        a.push_back(*dis->cosines[i]);
        b.push_back(*amb->cosines[i]);
        gold.push_back(dataset[i].score);
      }
    }
    if (gold.size() >= 6) report.p_value = paired_rho_significance(a, b, gold, permutation);
  }
  return report;
}

namespace {

using ojson = nlohmann::ordered_json;

ojson metric_json(const MetricSet& m) {
  return ojson{{"accuracy", m.accuracy}, {"mrr", m.mrr}, {"avg_cosine", m.avg_cosine}, {"count", m.count}};
}

ojson optional_json(const std::optional<double>& v) { return v ? ojson(*v) : ojson(nullptr); }

}  // namespace

std::string supervised_report_json(const SupervisedReport& r) {
  ojson j;
  j["task"] = "supervised";
  j["config_hash"] = r.config_hash;
  j["pool_size"] = r.pool_size;
  j["overall"] = {{"ambiguous", metric_json(r.ambiguous)},
                  {"disambiguated", metric_json(r.disambiguated)},
                  {"p_value_avg_cosine", optional_json(r.p_value)}};
  j["verbs"] = ojson::array();
  for (const auto& v : r.verbs)
    j["verbs"].push_back({{"verb", v.verb},
                          {"ambiguous", metric_json(v.ambiguous)},
                          {"disambiguated", metric_json(v.disambiguated)},
                          {"p_value_avg_cosine", optional_json(v.p_value)}});
  j["folds"] = ojson::array();
  for (const auto& f : r.folds)
    j["folds"].push_back({{"fold", f.fold},
                          {"ambiguous", metric_json(f.ambiguous)},
                          {"disambiguated", metric_json(f.disambiguated)}});
  return j.dump(2) + "\n";
}

std::string supervised_report_tsv(const SupervisedReport& r) {
  std::string out = "verb\taccuracy_amb\taccuracy_dis\tmrr_amb\tmrr_dis\tavgsim_amb\tavgsim_dis\n";
  const auto row = [&](const std::string& name, const MetricSet& a, const MetricSet& d) {
    out += fmt::format("{}\t{:.4f}\t{:.4f}\t{:.4f}\t{:.4f}\t{:.4f}\t{:.4f}\n", name, a.accuracy, d.accuracy, a.mrr,
                       d.mrr, a.avg_cosine, d.avg_cosine);
  };
  for (const auto& v : r.verbs) row(v.verb, v.ambiguous, v.disambiguated);
  row("ALL", r.ambiguous, r.disambiguated);
  return out;
}

std::string similarity_report_json(const SimilarityReport& r) {
  ojson j;
  j["task"] = "similarity";
  j["config_hash"] = r.config_hash;
  j["models"] = ojson::array();
  for (const auto& m : r.models)
    j["models"].push_back({{"model", to_string(m.model)},
                           {"spearman_rho", m.rho},
                           {"scored", m.scored},
                           {"skipped", m.skipped},
                           {"degenerate", m.degenerate}});
  j["p_value_disambiguated_vs_ambiguous"] = optional_json(r.p_value);
  j["human_agreement"] = optional_json(r.human_agreement);
  return j.dump(2) + "\n";
}

std::string similarity_report_tsv(const SimilarityReport& r) {
  std::string out = "model\tspearman_rho\n";
  for (const auto& m : r.models) out += fmt::format("{}\t{:.4f}\n", to_string(m.model), m.rho);
  if (r.human_agreement) out += fmt::format("human_agreement\t{:.4f}\n", *r.human_agreement);
  return out;
}

}  // namespace priordis
