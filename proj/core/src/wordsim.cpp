#include "priordis/wordsim.hpp"

#include <fstream>
#include <istream>
#include <optional>
#include <sstream>

#include "priordis/corpus.hpp"
#include "priordis/error.hpp"
#include "priordis/metrics.hpp"

namespace priordis {

std::vector<WordPair> read_word_pairs(std::istream& in) {
  std::vector<WordPair> pairs;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream fields(line);
    WordPair p;
    if (!(std::getline(fields, p.first, '\t') && std::getline(fields, p.second, '\t') && fields >> p.score))
      throw FormatError("expected word1<TAB>word2<TAB>score", lineno);
    pairs.push_back(std::move(p));
  }
  return pairs;
}

std::vector<WordPair> load_word_pairs(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw MissingArtifactError("cannot open word-similarity dataset " + path.string());
  return read_word_pairs(in);
}

namespace {

std::optional<std::size_t> resolve(const SemanticSpace& space, const std::string& word) {
  if (word.find('|') != std::string::npos) return space.find(word);
  for (Pos pos : {Pos::Noun, Pos::Verb, Pos::Adjective, Pos::Adverb}) {
    if (auto i = space.find(term_key(word, pos))) return i;
  }
  return std::nullopt;
}

}  // namespace

WordSimResult evaluate_wordsim(const SemanticSpace& space, const std::vector<WordPair>& pairs) {
  WordSimResult res;
  std::vector<double> model, human;
  for (const auto& p : pairs) {
    const auto a = resolve(space, p.first);
    const auto b = resolve(space, p.second);
    if (!a || !b) {
      ++res.skipped;
      continue;
    }
    model.push_back(cosine(space.row(*a), space.row(*b)));
    human.push_back(p.score);
  }
  res.scored = model.size();
  if (res.scored < 2)
    throw UndefinedStatisticError("fewer than 2 scorable word pairs (" + std::to_string(res.skipped) + " skipped)");
  res.spearman = spearman_rho(model, human);
  res.pearson = pearson_r(model, human);
  return res;
}

}  // namespace priordis
