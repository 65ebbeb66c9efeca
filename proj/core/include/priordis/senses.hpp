#pragma once

// Unsupervised verb sense induction: sentence context vectors are clustered,
// the partition with the best variance ratio becomes the sense set, objects
// are attached to their majority cluster, and undersized senses are folded
// into the dominant one.

#include <Eigen/Dense>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "priordis/clustering.hpp"
#include "priordis/corpus.hpp"
#include "priordis/space.hpp"

namespace priordis {

struct ContextVector {
  std::size_t occurrence = 0;
  Eigen::VectorXd vector;
  std::size_t contributors = 0;
};

// Mean of the space vectors of every token of `sentence` except the one at
// `target_position`; tokens outside the space are skipped. Returns nullopt
// when nothing contributes (the occurrence is dropped).
std::optional<ContextVector> context_vector(const Sentence& sentence, std::size_t target_position,
                                            const SemanticSpace& space, std::size_t occurrence = 0);

struct Sense {
  int id = 0;
  Eigen::VectorXd centroid;
  std::vector<std::string> objects;  // sorted
  std::size_t occurrences = 0;

  std::size_t exemplars() const noexcept { return objects.size(); }
};

struct SenseInventory {
  std::string verb;
  std::vector<Sense> senses;  // senses[i].id == i
  int dominant = 0;
  std::string config_hash;

  const Sense& sense(int id) const { return senses.at(static_cast<std::size_t>(id)); }
  // Sense of a training object, if it was attached to one.
  std::optional<int> sense_of(const std::string& object) const;
};

struct Assignment {
  int sense = 0;
  bool zero_vector = false;  // fell back to the dominant sense
};

// Sense whose centroid has the highest cosine with the object vector; ties go
// to the lowest id. A zero vector goes to the dominant sense.
Assignment assign_object(const Eigen::Ref<const Eigen::VectorXd>& object_vector, const SenseInventory& inventory);

// One verb occurrence: its object lemma and sentence context vector.
struct VerbOccurrence {
  std::string object;
  Eigen::VectorXd context;
};

// Throws EmptyInputError when there are no occurrences.
SenseInventory build_sense_inventory(const std::string& verb, std::span<const VerbOccurrence> occurrences,
                                     const ClusterConfig& cfg);

// JSON: {verb, senses:[{id, size, centroid, objects}], dominant, config_hash}.
std::string inventory_to_json(const SenseInventory& inv);
SenseInventory inventory_from_json(const std::string& text);
void save_inventory(const std::filesystem::path& path, const SenseInventory& inv);
SenseInventory load_inventory(const std::filesystem::path& path);

}  // namespace priordis
