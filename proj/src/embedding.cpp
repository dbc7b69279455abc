#include "kgrank/embedding.hpp"

#include <algorithm>
#include <cmath>

namespace kgrank {

double cosine(std::span<const float> a, std::span<const float> b) {
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    dot += static_cast<double>(a[i]) * b[i];
    na += static_cast<double>(a[i]) * a[i];
    nb += static_cast<double>(b[i]) * b[i];
  }
  if (na == 0.0 || nb == 0.0) return 0.0;
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

std::optional<double> cosine(const EmbeddingSpace& space, std::string_view a,
                             std::string_view b) {
  auto ia = space.find(a);
  auto ib = space.find(b);
  if (!ia || !ib) return std::nullopt;
  return cosine(space.row(*ia), space.row(*ib));
}

std::optional<std::vector<std::pair<std::string, double>>> nearest(
    const EmbeddingSpace& space, std::string_view token, size_t n) {
  auto id = space.find(token);
  if (!id) return std::nullopt;

  std::vector<std::pair<uint32_t, double>> scored;
  scored.reserve(space.size() > 0 ? space.size() - 1 : 0);
  auto query = space.row(*id);
  for (uint32_t i = 0; i < space.size(); ++i) {
    if (i == *id) continue;
    scored.emplace_back(i, cosine(query, space.row(i)));
  }
  size_t take = std::min(n, scored.size());
  std::partial_sort(scored.begin(), scored.begin() + take, scored.end(),
                    [](const auto& a, const auto& b) {
                      if (a.second != b.second) return a.second > b.second;
                      return a.first < b.first;
                    });
  std::vector<std::pair<std::string, double>> out;
  out.reserve(take);
  for (size_t i = 0; i < take; ++i) {
    out.emplace_back(space.vocab().name(scored[i].first), scored[i].second);
  }
  return out;
}

void save_word2vec_text(const EmbeddingSpace& space, const std::string& path) {
  std::ofstream out = open_output(path);
  out << space.size() << ' ' << space.dim() << '\n';
  for (uint32_t i = 0; i < space.size(); ++i) {
    const std::string& token = space.vocab().name(i);
    if (contains_whitespace(token)) {
      throw ValidationError("token contains whitespace, not exportable: '" +
                            token + "'");
    }
    out << token;
    for (float v : space.row(i)) out << ' ' << format_g(v, 9);
    out << '\n';
  }
  if (!out) throw IoError("write failed: " + path);
}

EmbeddingSpace load_word2vec_text(const std::string& path) {
  std::ifstream in = open_input(path);
  std::string line;
  if (!std::getline(in, line)) throw ValidationError(path + ": empty file");
  auto header = split_ws(strip_cr(line));
  if (header.size() != 2) {
    throw ValidationError(path + " line 1: expected '<vocab> <dim>' header");
  }
  uint64_t count = 0, dim = 0;
  try {
    count = std::stoull(std::string(header[0]));
    dim = std::stoull(std::string(header[1]));
  } catch (const std::exception&) {
    throw ValidationError(path + " line 1: non-numeric header");
  }
  if (dim == 0) throw ValidationError(path + ": dimension must be positive");

  Vocab vocab;
  std::vector<float> rows;
  rows.reserve(count * dim);
  uint64_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view sv = strip_cr(line);
    if (sv.empty()) continue;
    auto fields = split_ws(sv);
    if (fields.size() != dim + 1) {
      throw ValidationError(path + " line " + std::to_string(lineno) +
                            ": expected token + " + std::to_string(dim) +
                            " components, got " +
                            std::to_string(fields.size() ? fields.size() - 1 : 0));
    }
    uint32_t before = vocab.size();
    uint32_t id = vocab.intern(fields[0]);
    if (id != before) {
      throw ValidationError(path + " line " + std::to_string(lineno) +
                            ": duplicate token '" + std::string(fields[0]) + "'");
    }
    for (size_t j = 1; j < fields.size(); ++j) {
      try {
        rows.push_back(std::stof(std::string(fields[j])));
      } catch (const std::exception&) {
        throw ValidationError(path + " line " + std::to_string(lineno) +
                              ": bad float '" + std::string(fields[j]) + "'");
      }
    }
    if (!std::isfinite(rows.back())) {
      throw ValidationError(path + " line " + std::to_string(lineno) +
                            ": non-finite component");
    }
  }
  if (vocab.size() != count) {
    throw ValidationError(path + ": header declares " + std::to_string(count) +
                          " rows, found " + std::to_string(vocab.size()));
  }
  return EmbeddingSpace(std::move(vocab), static_cast<uint32_t>(dim),
                        std::move(rows));
}

}  // namespace kgrank
