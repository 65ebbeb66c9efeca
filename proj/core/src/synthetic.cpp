#include "priordis/synthetic.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <set>

#include "priordis/error.hpp"
#include "priordis/metrics.hpp"
#include "priordis/space.hpp"

namespace priordis {

namespace {

const std::vector<std::string> kFillers{"the", "a", "of"};

struct ObjectClass {
  int verb = 0;
  int sense = 0;
  std::vector<std::string> objects;  // training first, then test
};

struct Draft {
  Sentence tokens;
  bool phrase = false;
  std::string verb;
  std::string object;
  std::size_t verb_pos = 0;
  std::size_t object_pos = 0;
};

std::size_t draw(std::mt19937_64& rng, const Eigen::VectorXd& weights) {
  std::discrete_distribution<std::size_t> dist(weights.data(), weights.data() + weights.size());
  return dist(rng);
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
}

}  // namespace

void SyntheticSpec::validate() const {
  const auto need = [](bool ok, const char* what) {
    if (!ok) throw ConfigError(std::string("synthetic spec: ") + what);
  };
  need(verbs >= 1, "verbs must be >= 1");
  need(senses_per_verb >= 1, "senses_per_verb must be >= 1");
  need(objects_per_sense >= 4, "objects_per_sense must be >= 4");
  need(test_objects_per_sense >= 0, "test_objects_per_sense must be >= 0");
  need(active_features >= 1 && active_features <= shared_features, "need 1 <= active_features <= shared_features");
  need(topic_features >= 0 && topic_weight >= 0.0, "topic features and weight must be non-negative");
  need(context_words >= 1, "context_words must be >= 1");
  need(map_fan_in >= 1 && map_fan_in <= shared_features, "need 1 <= map_fan_in <= shared_features");
  need(disjointness >= 0.0 && disjointness <= 1.0, "disjointness must lie in [0, 1]");
  need(noise >= 0.0, "noise must be >= 0");
  need(noun_sentences >= 1 && noun_sentence_features >= 1, "noun sentences need at least one feature token");
  need(phrase_occurrences >= 1 && test_phrase_occurrences >= 1 && phrase_context >= 1,
       "phrases need occurrences and context");
  need(object_gap >= 0, "object_gap must be >= 0");
  need(similarity_pairs >= 0, "similarity_pairs must be >= 0");
  need(general_words >= 0, "general_words must be >= 0");
  need(general_share >= 0.0 && general_share < 1.0, "general_share must lie in [0, 1)");
  need(cross_verb_share >= 0.0 && cross_verb_share <= 1.0, "cross_verb_share must lie in [0, 1]");
  const long long test_phrases = 1LL * verbs * senses_per_verb * test_objects_per_sense;
  need(similarity_pairs == 0 || test_phrases >= 2, "similarity pairs need at least two test phrases");
  need(similarity_pairs <= test_phrases * (test_phrases - 1) / 2, "more similarity pairs than distinct test phrase pairs");
}

SyntheticData generate_synthetic(const SyntheticSpec& spec) {
  spec.validate();
  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> weight(0.5, 1.5);
  std::normal_distribution<double> gauss(0.0, 1.0);

  const int n_classes = spec.verbs * spec.senses_per_verb;
  const int n_features = spec.shared_features + n_classes * spec.topic_features;
  const int block = spec.context_words;
  const int shift = spec.shared_map ? 0 : static_cast<int>(std::lround(spec.disjointness * block));
  const int verb_span = block + (spec.senses_per_verb - 1) * shift;
  const int n_context = spec.verbs * verb_span;

  const auto feature_key = [](int f) { return fmt::format("feat{:03}", f); };
  const auto context_key = [](int c) { return fmt::format("ctx{:03}", c); };
  const auto verb_key = [](int v) { return fmt::format("verb{}", v); };

  // Object names are handed out in random order so ids carry no label.
  const int per_class = spec.objects_per_sense + spec.test_objects_per_sense;
  std::vector<int> ids(static_cast<std::size_t>(n_classes * per_class));
  std::iota(ids.begin(), ids.end(), 0);
  std::shuffle(ids.begin(), ids.end(), rng);

  const auto random_map = [&](int rows) {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(rows, spec.shared_features);
    std::vector<int> cols(static_cast<std::size_t>(spec.shared_features));
    std::iota(cols.begin(), cols.end(), 0);
    for (int r = 0; r < rows; ++r) {
      std::shuffle(cols.begin(), cols.end(), rng);
      for (int k = 0; k < spec.map_fan_in; ++k) m(r, cols[k]) = weight(rng);
    }
    return m;
  };
  // Mean-one profile M x plus clipped noise.
  const auto profile = [&](const Eigen::MatrixXd& m, const Eigen::VectorXd& x) {
    Eigen::VectorXd base = m * x;
    const double mean = base.mean();
    base = mean > 0.0 ? Eigen::VectorXd(base / mean) : Eigen::VectorXd::Ones(base.size());
    Eigen::VectorXd h = base;
    for (Eigen::Index i = 0; i < h.size(); ++i) h(i) = std::max(0.0, base(i) + spec.noise * gauss(rng));
    return h.sum() > 0.0 ? h : base;
  };

  std::vector<ObjectClass> classes;
  std::vector<Eigen::MatrixXd> maps;
  for (int v = 0; v < spec.verbs; ++v) {
    for (int s = 0; s < spec.senses_per_verb; ++s) {
      ObjectClass c{v, s, {}};
      for (int i = 0; i < per_class; ++i)
        c.objects.push_back(fmt::format("obj{:03}", ids[classes.size() * per_class + i]));
      classes.push_back(std::move(c));

      auto m = random_map(block);
      maps.push_back(spec.shared_map && s > 0 ? maps[maps.size() - static_cast<std::size_t>(s)] : m);
    }
  }
  const Eigen::MatrixXd general_map = random_map(spec.general_words);

  SyntheticData data;
  std::vector<Draft> drafts;
  std::vector<int> shared(static_cast<std::size_t>(spec.shared_features));
  std::iota(shared.begin(), shared.end(), 0);

  for (std::size_t ci = 0; ci < classes.size(); ++ci) {
    const auto& cls = classes[ci];
    const int block_start = cls.verb * verb_span + (spec.shared_map ? 0 : cls.sense * shift);
    const std::string verb = verb_key(cls.verb);
    for (std::size_t oi = 0; oi < cls.objects.size(); ++oi) {
      const auto& object = cls.objects[oi];
      Eigen::VectorXd x = Eigen::VectorXd::Zero(n_features);
      std::shuffle(shared.begin(), shared.end(), rng);
      for (int k = 0; k < spec.active_features; ++k) x(shared[k]) = weight(rng);
      for (int k = 0; k < spec.topic_features; ++k)
        x(spec.shared_features + static_cast<int>(ci) * spec.topic_features + k) = spec.topic_weight * weight(rng);

      const Eigen::VectorXd h = profile(maps[ci], x.head(spec.shared_features));
      Eigen::VectorXd planted = Eigen::VectorXd::Zero(n_context + spec.general_words);
      const double sense_share = spec.general_words > 0 ? 1.0 - spec.general_share : 1.0;
      planted.segment(block_start, block) = sense_share * h / h.sum();
      if (spec.general_words > 0) {
        const Eigen::VectorXd g = profile(general_map, x.head(spec.shared_features));
        planted.tail(spec.general_words) = spec.general_share * g / g.sum();
      }
      data.planted[{verb, object}] = planted;

      const bool test = oi >= static_cast<std::size_t>(spec.objects_per_sense);
      data.labels.push_back({verb, object, cls.sense, test});

      for (int i = 0; i < spec.noun_sentences; ++i) {
        Draft d;
        const int left = spec.noun_sentence_features / 2;
        for (int k = 0; k < spec.noun_sentence_features; ++k) {
          if (k == left) d.tokens.push_back({object, Pos::Noun});
          d.tokens.push_back({feature_key(static_cast<int>(draw(rng, x))), Pos::Adjective});
        }
        if (left == spec.noun_sentence_features) d.tokens.push_back({object, Pos::Noun});
        drafts.push_back(std::move(d));
      }
      std::uniform_int_distribution<std::size_t> filler(0, kFillers.size() - 1);
      const int occurrences = test ? spec.test_phrase_occurrences : spec.phrase_occurrences;
      for (int i = 0; i < occurrences; ++i) {
        Draft d;
        d.phrase = true;
        d.verb = verb;
        d.object = object;
        for (int k = 0; k < spec.phrase_context; ++k)
          d.tokens.push_back({context_key(static_cast<int>(draw(rng, planted))), Pos::Noun});
        d.verb_pos = d.tokens.size();
        d.tokens.push_back({verb, Pos::Verb});
        for (int k = 0; k < spec.object_gap; ++k) d.tokens.push_back({kFillers[filler(rng)], Pos::Other});
        d.object_pos = d.tokens.size();
        d.tokens.push_back({object, Pos::Noun});
        drafts.push_back(std::move(d));
      }
    }
  }

  std::shuffle(drafts.begin(), drafts.end(), rng);
  std::vector<Sentence> sentences;
  sentences.reserve(drafts.size());
  for (auto& d : drafts) {
    if (d.phrase)
      data.relations.push_back({d.verb, d.object, sentences.size(), d.verb_pos, d.object_pos});
    sentences.push_back(std::move(d.tokens));
  }
  data.corpus = Corpus(std::move(sentences));
  data.stop = StopList(kFillers.begin(), kFillers.end());

  if (spec.senses_per_verb >= 2) {
    for (int v = 0; v < spec.verbs; ++v) {
      SenseAnnotatedDataset ds;
      ds.verb = verb_key(v);
      const auto& c1 = classes[static_cast<std::size_t>(v * spec.senses_per_verb)];
      const auto& c2 = classes[static_cast<std::size_t>(v * spec.senses_per_verb + 1)];
      ds.sense1.assign(c1.objects.begin(), c1.objects.begin() + spec.objects_per_sense);
      ds.sense2.assign(c2.objects.begin(), c2.objects.begin() + spec.objects_per_sense);
      data.supervised.push_back(std::move(ds));
    }
  }

  // Half the pairs share a verb, the rest cross verbs (when there are several).
  std::vector<std::vector<PhraseKey>> test_by_verb(static_cast<std::size_t>(spec.verbs));
  for (const auto& l : data.labels)
    if (l.test) test_by_verb[static_cast<std::size_t>(std::stoi(l.verb.substr(4)))].push_back({l.verb, l.object});
  std::vector<PhraseKey> all_test;
  for (const auto& v : test_by_verb) all_test.insert(all_test.end(), v.begin(), v.end());
  std::set<std::pair<PhraseKey, PhraseKey>> seen;
  const bool can_same = spec.senses_per_verb * spec.test_objects_per_sense >= 2;
  const bool can_cross = spec.verbs > 1;
  std::bernoulli_distribution same_verb(can_same && can_cross ? 1.0 - spec.cross_verb_share : (can_same ? 1.0 : 0.0));
  const auto pick = [&](const std::vector<PhraseKey>& pool) {
    return pool[std::uniform_int_distribution<std::size_t>(0, pool.size() - 1)(rng)];
  };
  std::uniform_int_distribution<int> any_verb(0, spec.verbs - 1);
  for (long attempts = 0; static_cast<int>(data.similarity.size()) < spec.similarity_pairs; ++attempts) {
    if (attempts > 1000L * spec.similarity_pairs + 100000)
      throw ConfigError("synthetic spec: could not draw enough distinct similarity pairs");
    const bool same = same_verb(rng);
    const auto& pool = same ? test_by_verb[static_cast<std::size_t>(any_verb(rng))] : all_test;
    PhraseKey a = pick(pool);
    PhraseKey b = pick(pool);
    if (a == b || (a.verb == b.verb) != same) continue;
    if (b < a) std::swap(a, b);
    if (!seen.insert({a, b}).second) continue;
    data.similarity.push_back({a, b, cosine(data.planted.at(a), data.planted.at(b))});
  }
  return data;
}

PipelineConfig synthetic_pipeline_config(const SyntheticSpec& spec) {
  PipelineConfig cfg;
  cfg.set_seed(spec.seed);
  cfg.space.window = 5;
  cfg.space.basis_size = 100000;
  cfg.space.top_exclusions = 0;
  cfg.space.min_occurrences = 5;
  cfg.space.svd_dim = 100;
  cfg.holistic.window = 5;
  cfg.holistic.min_phrase_count = std::min(spec.phrase_occurrences, spec.test_phrase_occurrences);
  cfg.holistic.svd_dim = 100;
  cfg.regression.lambda = 0.3;
  cfg.regression.auto_step = true;
  cfg.regression.max_iters = 5000;
  cfg.regression.tol = 1e-9;
  cfg.folds = 4;
  cfg.permutations = 10000;
  return cfg;
}

void write_synthetic(const SyntheticData& data, const std::filesystem::path& dir, const PipelineConfig& cfg) {
  std::filesystem::create_directories(dir);

  std::string corpus;
  for (const auto& sentence : data.corpus.sentences()) {
    for (std::size_t i = 0; i < sentence.size(); ++i) corpus += (i ? " " : "") + sentence[i].key();
    corpus += '\n';
  }
  write_file(dir / "corpus.txt", corpus);

  std::string relations;
  for (const auto& r : data.relations)
    relations += fmt::format("{}\t{}\t{}\t{}\t{}\n", r.verb, r.object, r.sentence, r.verb_position, r.object_position);
  write_file(dir / "relations.tsv", relations);

  std::string stop;
  for (const auto& w : data.stop) stop += w + '\n';
  write_file(dir / "stoplist.txt", stop);

  std::string supervised;
  for (const auto& ds : data.supervised) {
    for (const auto& o : ds.sense1) supervised += fmt::format("{}\t1\t{}\n", ds.verb, o);
    for (const auto& o : ds.sense2) supervised += fmt::format("{}\t2\t{}\n", ds.verb, o);
  }
  write_file(dir / "supervised.tsv", supervised);

  std::string similarity;
  for (const auto& e : data.similarity)
    similarity += fmt::format("{}\t{}\t{}\t{}\t{}\n", e.first.verb, e.first.object, e.second.verb,
                              e.second.object, format_double(e.score));
  write_file(dir / "similarity.tsv", similarity);

  std::string labels;
  for (const auto& l : data.labels)
    labels += fmt::format("{}\t{}\t{}\t{}\n", l.verb, l.object, l.sense + 1, l.test ? "test" : "train");
  write_file(dir / "labels.tsv", labels);

  PipelineConfig out = cfg;
  out.corpus = "corpus.txt";
  out.stoplist = "stoplist.txt";
  out.relations = "relations.tsv";
  out.supervised_dataset = data.supervised.empty() ? "" : "supervised.tsv";
  out.similarity_dataset = data.similarity.empty() ? "" : "similarity.tsv";
  out.artifacts = "artifacts";
  write_file(dir / "pipeline.cfg", out.to_text());
}

}  // namespace priordis
