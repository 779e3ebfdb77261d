#include "gradreg/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace gradreg {

namespace {

struct SparseRow {
  double label;
  std::vector<std::pair<Index, double>> entries;
};

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\v' || c == '\f'; }

double parse_double(std::string_view tok, std::size_t line, std::size_t col, const char* what) {
  double v = 0.0;
  // from_chars rejects a leading '+', which LIBSVM files commonly use for labels.
  std::string_view body = tok;
  if (!body.empty() && body.front() == '+') body.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(body.data(), body.data() + body.size(), v);
  if (ec != std::errc() || ptr != body.data() + body.size() || body.empty()) {
    throw ParseError(std::string("invalid ") + what + " '" + std::string(tok) + "'", line, col);
  }
  return v;
}

SparseRow parse_line(std::string_view text, std::size_t line) {
  SparseRow row{};
  std::size_t pos = 0;
  bool have_label = false;
  while (pos < text.size()) {
    while (pos < text.size() && is_space(text[pos])) ++pos;
    if (pos >= text.size() || text[pos] == '#') break;
    const std::size_t start = pos;
    while (pos < text.size() && !is_space(text[pos])) ++pos;
    const std::string_view tok = text.substr(start, pos - start);
    const std::size_t col = start + 1;
    if (!have_label) {
      const double label = parse_double(tok, line, col, "label");
      if (label == 1.0) {
        row.label = 1.0;
      } else if (label == -1.0 || label == 0.0) {
        row.label = -1.0;
      } else {
        throw InvalidInput("label " + std::string(tok) + " not in {-1, +1, 0, 1} (line " +
                           std::to_string(line) + ")");
      }
      have_label = true;
      continue;
    }
    const std::size_t colon = tok.find(':');
    if (colon == std::string_view::npos) throw ParseError("expected idx:val", line, col);
    const std::string_view idx_tok = tok.substr(0, colon);
    long long idx = 0;
    const auto [ptr, ec] = std::from_chars(idx_tok.data(), idx_tok.data() + idx_tok.size(), idx);
    if (ec != std::errc() || ptr != idx_tok.data() + idx_tok.size() || idx_tok.empty()) {
      throw ParseError("invalid feature index '" + std::string(idx_tok) + "'", line, col);
    }
    if (idx < 1) throw ParseError("feature index must be >= 1", line, col);
    const double val = parse_double(tok.substr(colon + 1), line, col + colon + 1, "feature value");
    if (!std::isfinite(val)) throw ParseError("non-finite feature value", line, col + colon + 1);
    row.entries.emplace_back(static_cast<Index>(idx), val);
  }
  if (!have_label) throw ParseError("missing label", line, 1);
  return row;
}

}  // namespace

LabeledDataset parse_libsvm(std::istream& in, Index min_dim) {
  std::vector<SparseRow> rows;
  Index dim = min_dim;
  std::string text;
  std::size_t line = 0;
  while (std::getline(in, text)) {
    ++line;
    if (std::all_of(text.begin(), text.end(), is_space)) continue;
    SparseRow row = parse_line(text, line);
    for (const auto& [idx, val] : row.entries) dim = std::max(dim, idx);
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw InvalidInput("LIBSVM input contains no samples");

  LabeledDataset data;
  data.features = Matrix::Zero(static_cast<Index>(rows.size()), dim);
  data.labels.resize(static_cast<Index>(rows.size()));
  for (Index i = 0; i < static_cast<Index>(rows.size()); ++i) {
    data.labels(i) = rows[i].label;
    for (const auto& [idx, val] : rows[i].entries) data.features(i, idx - 1) = val;
  }
  return data;
}

LabeledDataset load_libsvm(const std::filesystem::path& path, Index min_dim) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open dataset " + path.string());
  return parse_libsvm(in, min_dim);
}

LabeledDataset synthetic_classification(Index samples, Index dim, std::uint64_t seed,
                                        double flip_probability) {
  if (samples <= 0 || dim <= 0) throw InvalidInput("synthetic_classification: empty shape");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  LabeledDataset data;
  data.features.resize(samples, dim);
  data.labels.resize(samples);
  Vector w(dim);
  for (Index j = 0; j < dim; ++j) w(j) = normal(rng);
  w *= 2.0 / w.norm();
  const double scale = 1.0 / std::sqrt(static_cast<double>(dim));
  for (Index i = 0; i < samples; ++i) {
    for (Index j = 0; j < dim; ++j) data.features(i, j) = scale * normal(rng);
    double label = data.features.row(i).dot(w) >= 0.0 ? 1.0 : -1.0;
    if (unif(rng) < flip_probability) label = -label;
    data.labels(i) = label;
  }
  return data;
}

}  // namespace gradreg
