#pragma once

// Verb-object phrase occurrences and their holistic (non-compositional)
// distributional vectors, the regression targets.

#include <compare>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "priordis/corpus.hpp"
#include "priordis/space.hpp"
#include "priordis/weighting.hpp"

namespace priordis {

struct RelationOccurrence {
  std::string verb;
  std::string object;
  std::size_t sentence = 0;
  std::size_t verb_position = 0;
  std::size_t object_position = 0;
};

// TSV `verb<TAB>object<TAB>sentence_index<TAB>verb_pos<TAB>object_pos`, 0-based.
std::vector<RelationOccurrence> read_relations(std::istream& in);
std::vector<RelationOccurrence> load_relations(const std::filesystem::path& path);

struct PhraseKey {
  std::string verb;
  std::string object;

  // `verb object`, the key used in holistic space files.
  std::string str() const { return verb + ' ' + object; }
  auto operator<=>(const PhraseKey&) const = default;
};

PhraseKey parse_phrase_key(const std::string& key);

struct PhraseInventory {
  std::map<PhraseKey, std::vector<RelationOccurrence>> phrases;

  std::size_t size() const noexcept { return phrases.size(); }
  bool empty() const noexcept { return phrases.empty(); }
};

// Throws FormatError when an occurrence points outside the corpus or at
// tokens that are not `verb|V` / `object|N`.
void validate_relation(const RelationOccurrence& rel, const Corpus& corpus);

// Keeps the (verb, object) keys that occur at least `min_phrase_count` times.
PhraseInventory collect_phrases(const std::vector<RelationOccurrence>& relations,
                                const Corpus& corpus, int min_phrase_count = 100);

// Basis positions within `window` of the verb or of the object; each position
// is counted once, and the verb and object positions themselves are excluded.
std::vector<std::size_t> phrase_context_positions(const Sentence& sentence,
                                                  const RelationOccurrence& occ, int window);

struct HolisticConfig {
  int window = 5;
  int min_phrase_count = 100;
  int svd_dim = 300;
  WeightingOptions weighting;
};

struct HolisticPhraseSpace {
  SemanticSpace space;                  // keys are PhraseKey::str()
  std::vector<std::uint64_t> frequency; // aligned with space.keys()
  std::vector<std::string> zero_context; // phrases with no basis context at all

  bool contains(const PhraseKey& key) const { return space.contains(key.str()); }
  Eigen::VectorXd vector(const PhraseKey& key) const { return space.vector(key.str()); }
};

CooccurrenceMatrix count_phrase_contexts(const Corpus& corpus, const PhraseInventory& inventory,
                                         const Vocabulary& basis, int window);

// Counts, then LMI, unit rows and an SVD of the phrase matrix's own.
HolisticPhraseSpace build_holistic_vectors(const Corpus& corpus, const PhraseInventory& inventory,
                                           const Vocabulary& basis, const HolisticConfig& cfg);

}  // namespace priordis
