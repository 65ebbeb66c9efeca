#pragma once

// Tokenized corpus ingestion, vocabulary selection and windowed co-occurrence
// counting. Corpus format: one sentence per line, space-separated tokens of
// the form `lemma|POS` with POS in {N, V, J, R, O}.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <numbers>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace priordis {

enum class Pos : char { Noun = 'N', Verb = 'V', Adjective = 'J', Adverb = 'R', Other = 'O' };

inline bool is_content(Pos pos) { return pos != Pos::Other; }
std::optional<Pos> parse_pos(char c);

struct Token {
  std::string lemma;
  Pos pos = Pos::Other;

  // Canonical `lemma|P` form used as the key in every space.
  std::string key() const;
  bool operator==(const Token&) const = default;
};

std::string term_key(std::string_view lemma, Pos pos);

// Throws FormatError (with `line`) when the token is not `lemma|POS`.
Token parse_token(std::string_view text, std::size_t line = 0);

using Sentence = std::vector<Token>;

class Corpus {
 public:
  Corpus() = default;
  explicit Corpus(std::vector<Sentence> sentences) : sentences_(std::move(sentences)) {}

  static Corpus read(std::istream& in);
  static Corpus load(const std::filesystem::path& path);

  const std::vector<Sentence>& sentences() const noexcept { return sentences_; }
  const Sentence& sentence(std::size_t i) const { return sentences_.at(i); }
  std::size_t size() const noexcept { return sentences_.size(); }
  std::size_t token_count() const;
  bool empty() const noexcept { return token_count() == 0; }

 private:
  std::vector<Sentence> sentences_;
};

using StopList = std::set<std::string>;

StopList read_stop_list(std::istream& in);
StopList load_stop_list(const std::filesystem::path& path);

struct SpaceConfig {
  int window = 5;
  int basis_size = 2000;
  int top_exclusions = 50;
  int min_occurrences = 100;
  int svd_dim = 300;
  // Rescales LMI uniformly; never changes a cosine.
  double pmi_log_base = std::numbers::e;
  bool clip_negative_lmi = false;

  // Throws ConfigError on a violated invariant.
  void validate() const;
};

// Ordered target and basis word lists with key -> index maps.
class Vocabulary {
 public:
  Vocabulary() = default;
  Vocabulary(std::vector<std::string> targets, std::vector<std::string> basis);

  const std::vector<std::string>& targets() const noexcept { return targets_; }
  const std::vector<std::string>& basis() const noexcept { return basis_; }
  std::optional<std::size_t> target_index(const std::string& key) const;
  std::optional<std::size_t> basis_index(const std::string& key) const;

 private:
  std::vector<std::string> targets_;
  std::vector<std::string> basis_;
  std::unordered_map<std::string, std::size_t> target_ix_;
  std::unordered_map<std::string, std::size_t> basis_ix_;
};

// Frequency of each `lemma|POS` key over the whole corpus.
std::map<std::string, std::uint64_t> term_frequencies(const Corpus& corpus);

// Targets: every term with frequency >= min_occurrences. Basis: content terms
// not in the stop list, after dropping the `top_exclusions` most frequent
// content terms, truncated to `basis_size`. Ties in frequency are resolved by
// lexicographic key order. Throws EmptyInputError on an empty corpus.
Vocabulary build_vocabulary(const Corpus& corpus, const SpaceConfig& cfg,
                            const StopList& stop = {});

// Sparse non-negative integer counts, rows = targets, cols = basis.
class CooccurrenceMatrix {
 public:
  CooccurrenceMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), cells_(rows) {}

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  void add(std::size_t row, std::size_t col, std::uint64_t n = 1);
  std::uint64_t at(std::size_t row, std::size_t col) const;
  std::uint64_t total() const;
  std::size_t nonzeros() const;

  // Adds another partial matrix of identical shape (order-independent).
  void merge(const CooccurrenceMatrix& other);

  const std::map<std::size_t, std::uint64_t>& row(std::size_t r) const { return cells_.at(r); }

  bool operator==(const CooccurrenceMatrix&) const = default;

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<std::map<std::size_t, std::uint64_t>> cells_;
};

// cell(t, c) = number of times basis word c occurs within `cfg.window`
// positions of an occurrence of target t in the same sentence.
CooccurrenceMatrix count_cooccurrences(const Corpus& corpus, const Vocabulary& vocab,
                                       const SpaceConfig& cfg);

// Counts only sentences [begin, end); partial results merge by addition.
CooccurrenceMatrix count_cooccurrences(const Corpus& corpus, const Vocabulary& vocab,
                                       const SpaceConfig& cfg, std::size_t begin,
                                       std::size_t end);

}  // namespace priordis
