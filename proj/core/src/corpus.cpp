#include "priordis/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <sstream>

#include "priordis/error.hpp"

namespace priordis {

std::optional<Pos> parse_pos(char c) {
  switch (c) {
    case 'N': return Pos::Noun;
    case 'V': return Pos::Verb;
    case 'J': return Pos::Adjective;
    case 'R': return Pos::Adverb;
    case 'O': return Pos::Other;
    default: return std::nullopt;
  }
}

std::string term_key(std::string_view lemma, Pos pos) {
  std::string key;
  key.reserve(lemma.size() + 2);
  key.append(lemma);
  key.push_back('|');
  key.push_back(static_cast<char>(pos));
  return key;
}

std::string Token::key() const { return term_key(lemma, pos); }

Token parse_token(std::string_view text, std::size_t line) {
  const auto bar = text.rfind('|');
  if (bar == std::string_view::npos || bar == 0 || bar + 2 != text.size())
    throw FormatError("malformed token '" + std::string(text) + "', expected lemma|POS", line);
  const auto pos = parse_pos(text.back());
  if (!pos) throw FormatError("unknown POS tag in token '" + std::string(text) + "'", line);
  return Token{std::string(text.substr(0, bar)), *pos};
}

Corpus Corpus::read(std::istream& in) {
  std::vector<Sentence> sentences;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    Sentence sentence;
    std::istringstream fields(line);
    std::string tok;
    while (fields >> tok) sentence.push_back(parse_token(tok, lineno));
    // Blank lines are kept as empty sentences so sentence indices match line numbers.
    sentences.push_back(std::move(sentence));
  }
  if (in.bad()) throw Error("I/O error while reading corpus");
  return Corpus(std::move(sentences));
}

Corpus Corpus::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw MissingArtifactError("cannot open corpus file " + path.string());
  return read(in);
}

std::size_t Corpus::token_count() const {
  std::size_t n = 0;
  for (const auto& s : sentences_) n += s.size();
  return n;
}

StopList read_stop_list(std::istream& in) {
  StopList stop;
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream fields(line);
    std::string lemma;
    if (fields >> lemma) stop.insert(lemma);
  }
  return stop;
}

StopList load_stop_list(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw MissingArtifactError("cannot open stop list " + path.string());
  return read_stop_list(in);
}

void SpaceConfig::validate() const {
  if (window <= 0) throw ConfigError("space.window must be positive");
  if (basis_size <= 0) throw ConfigError("space.basis_size must be positive");
  if (top_exclusions < 0) throw ConfigError("space.top_exclusions must be non-negative");
  if (min_occurrences <= 0) throw ConfigError("space.min_occurrences must be positive");
  if (svd_dim <= 0) throw ConfigError("space.svd_dim must be positive");
  if (svd_dim > basis_size) throw ConfigError("space.svd_dim must not exceed space.basis_size");
  if (!(pmi_log_base > 1.0)) throw ConfigError("space.pmi_log_base must be greater than 1");
}

Vocabulary::Vocabulary(std::vector<std::string> targets, std::vector<std::string> basis)
    : targets_(std::move(targets)), basis_(std::move(basis)) {
  for (std::size_t i = 0; i < targets_.size(); ++i) {
    if (!target_ix_.emplace(targets_[i], i).second)
      throw Error("duplicate target word " + targets_[i]);
  }
  for (std::size_t i = 0; i < basis_.size(); ++i) {
    if (!basis_ix_.emplace(basis_[i], i).second) throw Error("duplicate basis word " + basis_[i]);
  }
}

std::optional<std::size_t> Vocabulary::target_index(const std::string& key) const {
  const auto it = target_ix_.find(key);
  if (it == target_ix_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::size_t> Vocabulary::basis_index(const std::string& key) const {
  const auto it = basis_ix_.find(key);
  if (it == basis_ix_.end()) return std::nullopt;
  return it->second;
}

std::map<std::string, std::uint64_t> term_frequencies(const Corpus& corpus) {
  std::map<std::string, std::uint64_t> freq;
  for (const auto& sentence : corpus.sentences())
    for (const auto& tok : sentence) ++freq[tok.key()];
  return freq;
}

Vocabulary build_vocabulary(const Corpus& corpus, const SpaceConfig& cfg, const StopList& stop) {
  if (corpus.empty()) throw EmptyInputError("empty corpus: no tokens to build a vocabulary from");
  const auto freq = term_frequencies(corpus);

  // std::map iterates keys in lexicographic order, so a stable sort by
  // descending frequency leaves ties in key order.
  std::vector<std::pair<std::string, std::uint64_t>> content;
  std::vector<std::string> targets;
  for (const auto& [key, n] : freq) {
    if (n >= static_cast<std::uint64_t>(cfg.min_occurrences)) targets.push_back(key);
    const Pos pos = static_cast<Pos>(key.back());
    if (is_content(pos)) content.emplace_back(key, n);
  }
  std::stable_sort(content.begin(), content.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });

  std::vector<std::string> basis;
  const auto skip = std::min<std::size_t>(static_cast<std::size_t>(cfg.top_exclusions), content.size());
  for (std::size_t i = skip; i < content.size(); ++i) {
    if (basis.size() == static_cast<std::size_t>(cfg.basis_size)) break;
    const auto& key = content[i].first;
    if (stop.contains(key.substr(0, key.size() - 2))) continue;
    basis.push_back(key);
  }
  return Vocabulary(std::move(targets), std::move(basis));
}

void CooccurrenceMatrix::add(std::size_t row, std::size_t col, std::uint64_t n) {
  if (row >= rows_ || col >= cols_) throw ShapeError("co-occurrence cell out of range");
  if (n) cells_[row][col] += n;
}

std::uint64_t CooccurrenceMatrix::at(std::size_t row, std::size_t col) const {
  if (row >= rows_ || col >= cols_) throw ShapeError("co-occurrence cell out of range");
  const auto& r = cells_[row];
  const auto it = r.find(col);
  return it == r.end() ? 0 : it->second;
}

std::uint64_t CooccurrenceMatrix::total() const {
  std::uint64_t t = 0;
  for (const auto& r : cells_)
    for (const auto& [c, n] : r) t += n;
  return t;
}

std::size_t CooccurrenceMatrix::nonzeros() const {
  std::size_t nz = 0;
  for (const auto& r : cells_) nz += r.size();
  return nz;
}

void CooccurrenceMatrix::merge(const CooccurrenceMatrix& other) {
  if (other.rows_ != rows_ || other.cols_ != cols_)
    throw ShapeError("cannot merge co-occurrence matrices of different shape");
  for (std::size_t r = 0; r < rows_; ++r)
    for (const auto& [c, n] : other.cells_[r]) cells_[r][c] += n;
}

CooccurrenceMatrix count_cooccurrences(const Corpus& corpus, const Vocabulary& vocab,
                                       const SpaceConfig& cfg) {
  return count_cooccurrences(corpus, vocab, cfg, 0, corpus.size());
}

CooccurrenceMatrix count_cooccurrences(const Corpus& corpus, const Vocabulary& vocab,
                                       const SpaceConfig& cfg, std::size_t begin,
                                       std::size_t end) {
  CooccurrenceMatrix counts(vocab.targets().size(), vocab.basis().size());
  const auto window = static_cast<std::size_t>(cfg.window);
  std::vector<std::optional<std::size_t>> target_of, basis_of;
  end = std::min(end, corpus.size());
  for (std::size_t s = begin; s < end; ++s) {
    const auto& sentence = corpus.sentence(s);
    const std::size_t n = sentence.size();
    target_of.assign(n, std::nullopt);
    basis_of.assign(n, std::nullopt);
    for (std::size_t i = 0; i < n; ++i) {
      const auto key = sentence[i].key();
      target_of[i] = vocab.target_index(key);
      basis_of[i] = vocab.basis_index(key);
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (!target_of[i]) continue;
      const std::size_t lo = i >= window ? i - window : 0;
      const std::size_t hi = std::min(n - 1, i + window);
      for (std::size_t j = lo; j <= hi; ++j) {
        if (j != i && basis_of[j]) counts.add(*target_of[i], *basis_of[j]);
      }
    }
  }
  return counts;
}

}  // namespace priordis
