#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "priordis/space.hpp"

namespace priordis {

struct WordPair {
  std::string first;
  std::string second;
  double score = 0.0;
};

// TSV `word1<TAB>word2<TAB>score`.
std::vector<WordPair> read_word_pairs(std::istream& in);
std::vector<WordPair> load_word_pairs(const std::filesystem::path& path);

struct WordSimResult {
  double spearman = 0.0;
  double pearson = 0.0;
  std::size_t scored = 0;
  std::size_t skipped = 0;
};

// Words may be given as `lemma|POS` or as a bare lemma, in which case the
// first of N, V, J, R present in the space is used. Pairs with a missing word
// are skipped and counted. Throws UndefinedStatisticError with < 2 scorable pairs.
WordSimResult evaluate_wordsim(const SemanticSpace& space, const std::vector<WordPair>& pairs);

}  // namespace priordis
