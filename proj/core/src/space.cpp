#include "priordis/space.hpp"

#include <fmt/format.h>

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "priordis/error.hpp"

namespace priordis {

std::string format_double(double v) { return fmt::format("{}", v); }

SemanticSpace::SemanticSpace(std::vector<std::string> keys, Eigen::MatrixXd vectors,
                             Provenance provenance)
    : keys_(std::move(keys)), vectors_(std::move(vectors)), provenance_(provenance) {
  if (static_cast<Eigen::Index>(keys_.size()) != vectors_.rows())
    throw ShapeError("space key count does not match the number of rows");
  for (std::size_t i = 0; i < keys_.size(); ++i) {
    if (!index_.emplace(keys_[i], i).second) throw Error("duplicate space key " + keys_[i]);
  }
}

std::optional<std::size_t> SemanticSpace::find(const std::string& key) const {
  const auto it = index_.find(key);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

Eigen::VectorXd SemanticSpace::vector(const std::string& key) const {
  const auto i = find(key);
  if (!i) throw LookupError("'" + key + "' is not in the space");
  return row(*i);
}

void SemanticSpace::write(std::ostream& out, const std::string& config_hash) const {
  out << "#dim " << dim() << '\n';
  if (!config_hash.empty()) out << "#config " << config_hash << '\n';
  for (std::size_t i = 0; i < keys_.size(); ++i) {
    out << keys_[i];
    for (Eigen::Index j = 0; j < vectors_.cols(); ++j)
      out << '\t' << format_double(vectors_(static_cast<Eigen::Index>(i), j));
    out << '\n';
  }
}

void SemanticSpace::save(const std::filesystem::path& path, const std::string& config_hash) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  write(out, config_hash);
}

namespace {

double parse_double(std::string_view s, std::size_t line) {
  double v = 0.0;
  const auto* end = s.data() + s.size();
  const auto res = std::from_chars(s.data(), end, v);
  if (res.ec != std::errc() || res.ptr != end)
    throw FormatError("invalid number '" + std::string(s) + "'", line);
  return v;
}

}  // namespace

SemanticSpace SemanticSpace::read(std::istream& in, std::string* config_hash) {
  std::string line;
  std::size_t lineno = 0;
  long dim = -1;
  std::vector<std::string> keys;
  std::vector<double> values;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    if (line.rfind("#dim ", 0) == 0) {
      dim = std::stol(line.substr(5));
      if (dim <= 0) throw FormatError("non-positive dimension", lineno);
      continue;
    }
    if (line.rfind("#config ", 0) == 0) {
      if (config_hash) *config_hash = line.substr(8);
      continue;
    }
    if (line[0] == '#') continue;
    if (dim < 0) throw FormatError("space file lacks a #dim header", lineno);
    std::size_t start = 0;
    auto tab = line.find('\t');
    if (tab == std::string::npos) throw FormatError("space row without values", lineno);
    keys.push_back(line.substr(0, tab));
    long count = 0;
    start = tab + 1;
    while (true) {
      tab = line.find('\t', start);
      const auto field = std::string_view(line).substr(start, tab == std::string::npos ? std::string::npos : tab - start);
      values.push_back(parse_double(field, lineno));
      ++count;
      if (tab == std::string::npos) break;
      start = tab + 1;
    }
    if (count != dim)
      throw FormatError("row has " + std::to_string(count) + " values, expected " + std::to_string(dim), lineno);
  }
  if (dim < 0) throw FormatError("space file lacks a #dim header");
  Eigen::MatrixXd m(static_cast<Eigen::Index>(keys.size()), dim);
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < dim; ++j) m(i, j) = values[static_cast<std::size_t>(i * dim + j)];
  return SemanticSpace(std::move(keys), std::move(m));
}

SemanticSpace SemanticSpace::load(const std::filesystem::path& path, std::string* config_hash) {
  std::ifstream in(path);
  if (!in) throw MissingArtifactError("cannot open space file " + path.string());
  return read(in, config_hash);
}

}  // namespace priordis
