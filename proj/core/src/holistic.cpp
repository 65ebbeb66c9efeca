#include "priordis/holistic.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <sstream>

#include "priordis/error.hpp"

namespace priordis {

std::vector<RelationOccurrence> read_relations(std::istream& in) {
  std::vector<RelationOccurrence> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream fields(line);
    RelationOccurrence r;
    long long s = -1, v = -1, o = -1;
    if (!(std::getline(fields, r.verb, '\t') && std::getline(fields, r.object, '\t') && fields >> s >> v >> o))
      throw FormatError("expected verb<TAB>object<TAB>sentence<TAB>verb_pos<TAB>object_pos", lineno);
    if (s < 0 || v < 0 || o < 0) throw FormatError("negative index in relation", lineno);
    r.sentence = static_cast<std::size_t>(s);
    r.verb_position = static_cast<std::size_t>(v);
    r.object_position = static_cast<std::size_t>(o);
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<RelationOccurrence> load_relations(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw MissingArtifactError("cannot open relation file " + path.string());
  return read_relations(in);
}

PhraseKey parse_phrase_key(const std::string& key) {
  const auto sp = key.find(' ');
  if (sp == std::string::npos || sp == 0 || sp + 1 == key.size())
    throw FormatError("phrase key '" + key + "' is not 'verb object'");
  return PhraseKey{key.substr(0, sp), key.substr(sp + 1)};
}

void validate_relation(const RelationOccurrence& rel, const Corpus& corpus) {
  if (rel.sentence >= corpus.size())
    throw FormatError("relation " + rel.verb + "/" + rel.object + " refers to sentence " +
                      std::to_string(rel.sentence) + " but the corpus has " +
                      std::to_string(corpus.size()));
  const auto& s = corpus.sentence(rel.sentence);
  if (rel.verb_position >= s.size() || rel.object_position >= s.size() ||
      rel.verb_position == rel.object_position)
    throw FormatError("relation " + rel.verb + "/" + rel.object + " has invalid positions in sentence " +
                      std::to_string(rel.sentence));
  const auto& v = s[rel.verb_position];
  const auto& o = s[rel.object_position];
  if (v.lemma != rel.verb || v.pos != Pos::Verb || o.lemma != rel.object || o.pos != Pos::Noun)
    throw FormatError("relation " + rel.verb + "/" + rel.object + " does not match the tokens " +
                      v.key() + " / " + o.key() + " of sentence " + std::to_string(rel.sentence));
}

PhraseInventory collect_phrases(const std::vector<RelationOccurrence>& relations,
                                const Corpus& corpus, int min_phrase_count) {
  std::map<PhraseKey, std::vector<RelationOccurrence>> all;
  for (const auto& rel : relations) {
    validate_relation(rel, corpus);
    all[PhraseKey{rel.verb, rel.object}].push_back(rel);
  }
  PhraseInventory inv;
  for (auto& [key, occs] : all) {
    if (occs.size() >= static_cast<std::size_t>(std::max(min_phrase_count, 0)))
      inv.phrases.emplace(key, std::move(occs));
  }
  return inv;
}

std::vector<std::size_t> phrase_context_positions(const Sentence& sentence,
                                                  const RelationOccurrence& occ, int window) {
  const std::size_t n = sentence.size();
  const auto w = static_cast<std::size_t>(window);
  std::vector<std::size_t> out;
  for (std::size_t j = 0; j < n; ++j) {
    if (j == occ.verb_position || j == occ.object_position) continue;
    const auto near = [&](std::size_t anchor) { return (j > anchor ? j - anchor : anchor - j) <= w; };
    if (near(occ.verb_position) || near(occ.object_position)) out.push_back(j);
  }
  return out;
}

CooccurrenceMatrix count_phrase_contexts(const Corpus& corpus, const PhraseInventory& inventory,
                                         const Vocabulary& basis, int window) {
  CooccurrenceMatrix counts(inventory.size(), basis.basis().size());
  std::size_t row = 0;
  for (const auto& [key, occs] : inventory.phrases) {
    for (const auto& occ : occs) {
      const auto& sentence = corpus.sentence(occ.sentence);
      for (auto j : phrase_context_positions(sentence, occ, window)) {
        if (auto c = basis.basis_index(sentence[j].key())) counts.add(row, *c);
      }
    }
    ++row;
  }
  return counts;
}

HolisticPhraseSpace build_holistic_vectors(const Corpus& corpus, const PhraseInventory& inventory,
                                           const Vocabulary& basis, const HolisticConfig& cfg) {
  if (inventory.empty()) throw EmptyInputError("phrase inventory is empty");
  if (cfg.window <= 0 || cfg.svd_dim <= 0) throw ConfigError("holistic window and svd_dim must be positive");
  const auto counts = count_phrase_contexts(corpus, inventory, basis, cfg.window);

  HolisticPhraseSpace out;
  std::vector<std::string> keys;
  std::size_t row = 0;
  for (const auto& [key, occs] : inventory.phrases) {
    keys.push_back(key.str());
    out.frequency.push_back(occs.size());
    if (counts.row(row).empty()) out.zero_context.push_back(key.str());
    ++row;
  }
  out.space = weigh_and_reduce(counts, std::move(keys), cfg.weighting, cfg.svd_dim);
  return out;
}

}  // namespace priordis
