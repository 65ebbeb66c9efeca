#include "priordis/senses.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>
#include "priordis/error.hpp"
#include "priordis/metrics.hpp"

namespace priordis {

std::optional<ContextVector> context_vector(const Sentence& sentence, std::size_t target_position,
                                            const SemanticSpace& space, std::size_t occurrence) {
  if (target_position >= sentence.size()) throw Error("target position outside the sentence");
  ContextVector cv;
  cv.occurrence = occurrence;
  cv.vector = Eigen::VectorXd::Zero(space.dim());
  for (std::size_t i = 0; i < sentence.size(); ++i) {
    if (i == target_position) continue;
    if (const auto row = space.find(sentence[i].key())) {
      cv.vector += space.row(*row);
      ++cv.contributors;
    }
  }
  if (cv.contributors == 0) return std::nullopt;
  cv.vector /= static_cast<double>(cv.contributors);
  return cv;
}

std::optional<int> SenseInventory::sense_of(const std::string& object) const {
  for (const auto& s : senses)
    if (std::binary_search(s.objects.begin(), s.objects.end(), object)) return s.id;
  return std::nullopt;
}

Assignment assign_object(const Eigen::Ref<const Eigen::VectorXd>& object_vector, const SenseInventory& inventory) {
  if (inventory.senses.empty()) throw Error("sense inventory for '" + inventory.verb + "' is empty");
  if (inventory.senses.size() == 1) return Assignment{inventory.senses.front().id, false};
  if (object_vector.norm() == 0.0) return Assignment{inventory.dominant, true};
  int best = inventory.senses.front().id;
  double best_cos = -2.0;
  for (const auto& s : inventory.senses) {
    const double c = cosine(object_vector, s.centroid);
    if (c > best_cos) {
      best_cos = c;
      best = s.id;
    }
  }
  return Assignment{best, false};
}

namespace {

// Largest by `count`, ties to the lowest index.
template <typename Counts>
std::size_t argmax_lowest(const Counts& counts) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < counts.size(); ++i)
    if (counts[i] > counts[best]) best = i;
  return best;
}

}  // namespace

SenseInventory build_sense_inventory(const std::string& verb, std::span<const VerbOccurrence> occurrences,
                                     const ClusterConfig& cfg) {
  cfg.validate();
  if (occurrences.empty()) throw EmptyInputError("no usable occurrences for verb '" + verb + "'");

  std::vector<Eigen::VectorXd> vectors;
  vectors.reserve(occurrences.size());
  for (const auto& o : occurrences) vectors.push_back(o.context);
  const auto dendro = hac_cluster(vectors, cfg);
  const auto labels = select_partition(dendro, vectors, cfg);
  const std::size_t k = static_cast<std::size_t>(*std::max_element(labels.begin(), labels.end())) + 1;

  std::vector<std::size_t> cluster_occ(k, 0);
  for (int l : labels) ++cluster_occ[static_cast<std::size_t>(l)];
  const std::size_t provisional_dominant = argmax_lowest(cluster_occ);

  // Object -> per-cluster occurrence counts; the object joins its majority cluster.
  std::map<std::string, std::vector<std::size_t>> votes;
  for (std::size_t i = 0; i < occurrences.size(); ++i) {
    auto& v = votes.try_emplace(occurrences[i].object, k, 0).first->second;
    ++v[static_cast<std::size_t>(labels[i])];
  }
  std::vector<std::vector<std::string>> cluster_objects(k);
  for (const auto& [object, v] : votes) {
    const std::size_t top = *std::max_element(v.begin(), v.end());
    std::size_t chosen = k;
    if (v[provisional_dominant] == top) chosen = provisional_dominant;
    for (std::size_t c = 0; c < k && chosen == k; ++c)
      if (v[c] == top) chosen = c;
    cluster_objects[chosen].push_back(object);
  }

  // Dominant sense by exemplar count; clusters below min_exemplars fold into it.
  std::vector<std::size_t> exemplar_count(k);
  for (std::size_t c = 0; c < k; ++c) exemplar_count[c] = cluster_objects[c].size();
  const std::size_t dominant = argmax_lowest(exemplar_count);
  std::vector<std::size_t> target(k);
  for (std::size_t c = 0; c < k; ++c) {
    const bool small = exemplar_count[c] < static_cast<std::size_t>(cfg.min_exemplars);
    target[c] = (c != dominant && small) ? dominant : c;
  }
  // A dominant cluster that is itself too small means every cluster is: keep one sense.
  const bool collapse = exemplar_count[dominant] < static_cast<std::size_t>(cfg.min_exemplars);
  if (collapse) std::fill(target.begin(), target.end(), dominant);

  // Renumber surviving clusters in their original order.
  std::map<std::size_t, int> sense_id;
  for (std::size_t c = 0; c < k; ++c)
    if (target[c] == c) sense_id.emplace(c, static_cast<int>(sense_id.size()));

  SenseInventory inv;
  inv.verb = verb;
  inv.senses.resize(sense_id.size());
  const Eigen::Index dim = occurrences.front().context.size();
  for (auto& [c, id] : sense_id) {
    inv.senses[static_cast<std::size_t>(id)].id = id;
    inv.senses[static_cast<std::size_t>(id)].centroid = Eigen::VectorXd::Zero(dim);
  }
  for (std::size_t i = 0; i < occurrences.size(); ++i) {
    auto& s = inv.senses[static_cast<std::size_t>(sense_id.at(target[static_cast<std::size_t>(labels[i])]))];
    s.centroid += occurrences[i].context;
    ++s.occurrences;
  }
  for (std::size_t c = 0; c < k; ++c) {
    auto& s = inv.senses[static_cast<std::size_t>(sense_id.at(target[c]))];
    s.objects.insert(s.objects.end(), cluster_objects[c].begin(), cluster_objects[c].end());
  }
  for (auto& s : inv.senses) {
    if (s.occurrences) s.centroid /= static_cast<double>(s.occurrences);
    std::sort(s.objects.begin(), s.objects.end());
  }
  std::vector<std::size_t> final_counts;
  for (const auto& s : inv.senses) final_counts.push_back(s.exemplars());
  inv.dominant = static_cast<int>(argmax_lowest(final_counts));
  return inv;
}

std::string inventory_to_json(const SenseInventory& inv) {
  nlohmann::ordered_json j;
  j["verb"] = inv.verb;
  j["senses"] = nlohmann::ordered_json::array();
  for (const auto& s : inv.senses) {
    nlohmann::ordered_json js;
    js["id"] = s.id;
    js["size"] = s.exemplars();
    js["occurrences"] = s.occurrences;
    js["centroid"] = std::vector<double>(s.centroid.data(), s.centroid.data() + s.centroid.size());
    js["objects"] = s.objects;
    j["senses"].push_back(std::move(js));
  }
  j["dominant"] = inv.dominant;
  j["config_hash"] = inv.config_hash;
  return j.dump(1);
}

SenseInventory inventory_from_json(const std::string& text) {
  try {
    const auto j = nlohmann::json::parse(text);
    SenseInventory inv;
    inv.verb = j.at("verb").get<std::string>();
    for (const auto& js : j.at("senses")) {
      Sense s;
      s.id = js.at("id").get<int>();
      const auto c = js.at("centroid").get<std::vector<double>>();
      s.centroid = Eigen::Map<const Eigen::VectorXd>(c.data(), static_cast<Eigen::Index>(c.size()));
      s.objects = js.at("objects").get<std::vector<std::string>>();
      std::sort(s.objects.begin(), s.objects.end());
      s.occurrences = js.value("occurrences", std::size_t{0});
      if (s.id != static_cast<int>(inv.senses.size())) throw FormatError("sense ids must be 0..k-1 in order");
      inv.senses.push_back(std::move(s));
    }
    inv.dominant = j.at("dominant").get<int>();
    inv.config_hash = j.value("config_hash", std::string{});
    if (inv.senses.empty() || inv.dominant < 0 || inv.dominant >= static_cast<int>(inv.senses.size()))
      throw FormatError("sense inventory has no senses or an invalid dominant id");
    return inv;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed sense inventory: ") + e.what());
  }
}

void save_inventory(const std::filesystem::path& path, const SenseInventory& inv) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << inventory_to_json(inv) << '\n';
}

SenseInventory load_inventory(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw MissingArtifactError("cannot open sense inventory " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return inventory_from_json(buf.str());
}

}  // namespace priordis
