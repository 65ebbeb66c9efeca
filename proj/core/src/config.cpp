#include "priordis/config.hpp"

#include <fmt/format.h>

#include <charconv>
#include <fstream>
#include <functional>
#include <istream>
#include <map>
#include <numbers>
#include <sstream>

#include "priordis/error.hpp"
#include "priordis/hash.hpp"
#include "priordis/space.hpp"

namespace priordis {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
  T out{};
  const auto* end = value.data() + value.size();
  const auto res = std::from_chars(value.data(), end, out);
  if (res.ec != std::errc() || res.ptr != end)
    throw ConfigError(fmt::format("{}: '{}' is not a valid number", key, value));
  return out;
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  throw ConfigError(fmt::format("{}: expected true or false, got '{}'", key, value));
}

double parse_log_base(const std::string& value) {
  if (value == "e") return std::numbers::e;
  if (value == "2") return 2.0;
  if (value == "10") return 10.0;
  throw ConfigError("space.pmi_log_base must be e, 2 or 10");
}

std::string log_base_name(double b) {
  if (b == 2.0) return "2";
  if (b == 10.0) return "10";
  return "e";
}

}  // namespace

PipelineConfig PipelineConfig::parse(std::istream& in, const std::filesystem::path& base_dir) {
  PipelineConfig c;
  const auto path = [&](const std::string& v) {
    std::filesystem::path p(v);
    return p.is_absolute() || base_dir.empty() ? p : base_dir / p;
  };
  using Setter = std::function<void(const std::string&, const std::string&)>;
  const std::map<std::string, Setter> setters{
      {"corpus", [&](auto&, auto& v) { c.corpus = path(v); }},
      {"stoplist", [&](auto&, auto& v) { c.stoplist = path(v); }},
      {"relations", [&](auto&, auto& v) { c.relations = path(v); }},
      {"supervised_dataset", [&](auto&, auto& v) { c.supervised_dataset = path(v); }},
      {"similarity_dataset", [&](auto&, auto& v) { c.similarity_dataset = path(v); }},
      {"wordsim_dataset", [&](auto&, auto& v) { c.wordsim_dataset = path(v); }},
      {"artifacts", [&](auto&, auto& v) { c.artifacts = path(v); }},
      {"seed", [&](auto& k, auto& v) { c.seed = parse_number<std::uint64_t>(k, v); }},
      {"verbs",
       [&](auto&, auto& v) {
         c.verbs.clear();
         std::istringstream list(v);
         std::string verb;
         while (std::getline(list, verb, ','))
           if (auto t = trim(verb); !t.empty()) c.verbs.push_back(t);
       }},
      {"space.window", [&](auto& k, auto& v) { c.space.window = parse_number<int>(k, v); }},
      {"space.basis_size", [&](auto& k, auto& v) { c.space.basis_size = parse_number<int>(k, v); }},
      {"space.top_exclusions", [&](auto& k, auto& v) { c.space.top_exclusions = parse_number<int>(k, v); }},
      {"space.min_occurrences", [&](auto& k, auto& v) { c.space.min_occurrences = parse_number<int>(k, v); }},
      {"space.svd_dim", [&](auto& k, auto& v) { c.space.svd_dim = parse_number<int>(k, v); }},
      {"space.pmi_log_base", [&](auto&, auto& v) { c.space.pmi_log_base = parse_log_base(v); }},
      {"space.clip_negative_lmi", [&](auto& k, auto& v) { c.space.clip_negative_lmi = parse_bool(k, v); }},
      {"holistic.window", [&](auto& k, auto& v) { c.holistic.window = parse_number<int>(k, v); }},
      {"holistic.min_phrase_count", [&](auto& k, auto& v) { c.holistic.min_phrase_count = parse_number<int>(k, v); }},
      {"holistic.svd_dim", [&](auto& k, auto& v) { c.holistic.svd_dim = parse_number<int>(k, v); }},
      {"regression.lambda", [&](auto& k, auto& v) { c.regression.lambda = parse_number<double>(k, v); }},
      {"regression.learning_rate",
       [&](auto& k, auto& v) {
         c.regression.auto_step = v == "auto";
         if (!c.regression.auto_step) c.regression.learning_rate = parse_number<double>(k, v);
       }},
      {"regression.max_iters", [&](auto& k, auto& v) { c.regression.max_iters = parse_number<int>(k, v); }},
      {"regression.tol", [&](auto& k, auto& v) { c.regression.tol = parse_number<double>(k, v); }},
      {"regression.init",
       [&](auto& k, auto& v) {
         if (v == "zero") c.regression.init = InitScheme::Zero;
         else if (v == "gaussian") c.regression.init = InitScheme::Gaussian;
         else throw ConfigError(k + ": expected zero or gaussian");
       }},
      {"regression.init_sigma", [&](auto& k, auto& v) { c.regression.init_sigma = parse_number<double>(k, v); }},
      {"regression.mode",
       [&](auto& k, auto& v) {
         if (v == "full_batch") c.regression.mode = TrainMode::FullBatch;
         else if (v == "stochastic") c.regression.mode = TrainMode::Stochastic;
         else throw ConfigError(k + ": expected full_batch or stochastic");
       }},
      {"cluster.distance", [&](auto&, auto& v) { c.cluster.distance = parse_distance(v); }},
      {"cluster.k_min", [&](auto& k, auto& v) { c.cluster.k_min = parse_number<int>(k, v); }},
      {"cluster.k_max", [&](auto& k, auto& v) { c.cluster.k_max = parse_number<int>(k, v); }},
      {"cluster.min_exemplars", [&](auto& k, auto& v) { c.cluster.min_exemplars = parse_number<int>(k, v); }},
      {"eval.folds", [&](auto& k, auto& v) { c.folds = parse_number<int>(k, v); }},
      {"eval.permutations", [&](auto& k, auto& v) { c.permutations = parse_number<std::size_t>(k, v); }},
      {"eval.human_agreement", [&](auto& k, auto& v) { c.human_agreement = parse_number<double>(k, v); }},
  };

  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(fmt::format("config line {}: expected key = value", lineno));
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));
    const auto it = setters.find(key);
    if (it == setters.end()) throw ConfigError(fmt::format("config line {}: unknown key '{}'", lineno, key));
    if (value.empty()) throw ConfigError(fmt::format("config line {}: empty value for '{}'", lineno, key));
    it->second(key, value);
  }
  c.regression.seed = c.seed;
  c.validate();
  return c;
}

PipelineConfig PipelineConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  return parse(in, std::filesystem::absolute(path).parent_path());
}

void PipelineConfig::validate() const {
  space.validate();
  regression.validate();
  cluster.validate();
  if (holistic.window <= 0) throw ConfigError("holistic.window must be positive");
  if (holistic.min_phrase_count < 1) throw ConfigError("holistic.min_phrase_count must be >= 1");
  if (holistic.svd_dim <= 0) throw ConfigError("holistic.svd_dim must be positive");
  if (folds < 2) throw ConfigError("eval.folds must be >= 2");
  if (permutations < 1) throw ConfigError("eval.permutations must be >= 1");
}

void PipelineConfig::set_seed(std::uint64_t s) {
  seed = s;
  regression.seed = s;
}

std::string PipelineConfig::canonical() const {
  std::string verbs_list;
  for (const auto& v : verbs) verbs_list += (verbs_list.empty() ? "" : ",") + v;
  return fmt::format(
      "seed={}\nverbs={}\nspace.window={}\nspace.basis_size={}\nspace.top_exclusions={}\n"
      "space.min_occurrences={}\nspace.svd_dim={}\nspace.pmi_log_base={}\nspace.clip_negative_lmi={}\n"
      "holistic.window={}\nholistic.min_phrase_count={}\nholistic.svd_dim={}\nregression={}\n"
      "cluster={}\neval.folds={}\neval.permutations={}\n",
      seed, verbs_list, space.window, space.basis_size, space.top_exclusions, space.min_occurrences,
      space.svd_dim, log_base_name(space.pmi_log_base), space.clip_negative_lmi, holistic.window,
      holistic.min_phrase_count, holistic.svd_dim, regression.canonical(),
      cluster.canonical(), folds, permutations);
}

std::string PipelineConfig::hash() const { return hex_hash(canonical()); }

std::string PipelineConfig::to_text() const {
  std::string out;
  const auto put = [&](const std::string& k, const std::string& v) { out += k + " = " + v + "\n"; };
  const auto put_path = [&](const std::string& k, const std::filesystem::path& p) {
    if (!p.empty()) put(k, p.string());
  };
  put_path("corpus", corpus);
  put_path("stoplist", stoplist);
  put_path("relations", relations);
  put_path("supervised_dataset", supervised_dataset);
  put_path("similarity_dataset", similarity_dataset);
  put_path("wordsim_dataset", wordsim_dataset);
  put_path("artifacts", artifacts);
  put("seed", std::to_string(seed));
  if (!verbs.empty()) {
    std::string list;
    for (const auto& v : verbs) list += (list.empty() ? "" : ",") + v;
    put("verbs", list);
  }
  put("space.window", std::to_string(space.window));
  put("space.basis_size", std::to_string(space.basis_size));
  put("space.top_exclusions", std::to_string(space.top_exclusions));
  put("space.min_occurrences", std::to_string(space.min_occurrences));
  put("space.svd_dim", std::to_string(space.svd_dim));
  put("space.pmi_log_base", log_base_name(space.pmi_log_base));
  put("space.clip_negative_lmi", space.clip_negative_lmi ? "true" : "false");
  put("holistic.window", std::to_string(holistic.window));
  put("holistic.min_phrase_count", std::to_string(holistic.min_phrase_count));
  put("holistic.svd_dim", std::to_string(holistic.svd_dim));
  put("regression.lambda", format_double(regression.lambda));
  put("regression.learning_rate", regression.auto_step ? "auto" : format_double(regression.learning_rate));
  put("regression.max_iters", std::to_string(regression.max_iters));
  put("regression.tol", format_double(regression.tol));
  put("regression.init", regression.init == InitScheme::Zero ? "zero" : "gaussian");
  put("regression.init_sigma", format_double(regression.init_sigma));
  put("regression.mode", regression.mode == TrainMode::FullBatch ? "full_batch" : "stochastic");
  put("cluster.distance", to_string(cluster.distance));
  put("cluster.k_min", std::to_string(cluster.k_min));
  put("cluster.k_max", std::to_string(cluster.k_max));
  put("cluster.min_exemplars", std::to_string(cluster.min_exemplars));
  put("eval.folds", std::to_string(folds));
  put("eval.permutations", std::to_string(permutations));
  if (human_agreement) put("eval.human_agreement", format_double(*human_agreement));
  return out;
}

}  // namespace priordis
