#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace priordis {

struct SpaceProvenance {
  bool weighted = false;
  bool normalized = false;
  std::optional<int> reduced_to;
};

// Dense row vectors keyed by string. Word spaces use `lemma|POS` keys,
// holistic phrase spaces use `verb object`.
class SemanticSpace {
 public:
  using Provenance = SpaceProvenance;

  SemanticSpace() = default;
  SemanticSpace(std::vector<std::string> keys, Eigen::MatrixXd vectors, Provenance provenance = {});

  std::size_t size() const noexcept { return keys_.size(); }
  Eigen::Index dim() const noexcept { return vectors_.cols(); }
  const std::vector<std::string>& keys() const noexcept { return keys_; }
  const Eigen::MatrixXd& matrix() const noexcept { return vectors_; }
  const Provenance& provenance() const noexcept { return provenance_; }

  std::optional<std::size_t> find(const std::string& key) const;
  bool contains(const std::string& key) const { return find(key).has_value(); }

  // Throws LookupError when the key is absent.
  Eigen::VectorXd vector(const std::string& key) const;
  Eigen::VectorXd row(std::size_t i) const { return vectors_.row(static_cast<Eigen::Index>(i)).transpose(); }

  // TSV: `#dim <d>`, optional `#config <hash>`, then `key<TAB>v1<TAB>...<TAB>vd`
  // with 17 significant digits.
  void write(std::ostream& out, const std::string& config_hash = {}) const;
  void save(const std::filesystem::path& path, const std::string& config_hash = {}) const;
  static SemanticSpace read(std::istream& in, std::string* config_hash = nullptr);
  static SemanticSpace load(const std::filesystem::path& path, std::string* config_hash = nullptr);

 private:
  std::vector<std::string> keys_;
  Eigen::MatrixXd vectors_;
  Provenance provenance_;
  std::unordered_map<std::string, std::size_t> index_;
};

// Shortest decimal form that parses back to the same double.
std::string format_double(double v);

}  // namespace priordis
