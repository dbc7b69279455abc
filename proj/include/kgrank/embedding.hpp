#pragma once

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "kgrank/common.hpp"

namespace kgrank {

// Token -> dense vector table. `input` holds matrix V, where the final
// per-token vectors live; `output` holds the context matrix U while a model
// is being trained. Spaces loaded from disk carry V only.
class EmbeddingSpace {
 public:
  EmbeddingSpace() = default;
  EmbeddingSpace(Vocab vocab, uint32_t dim, bool with_output = false)
      : vocab_(std::move(vocab)), dim_(dim) {
    input_.assign(static_cast<size_t>(vocab_.size()) * dim_, 0.0f);
    if (with_output) output_.assign(input_.size(), 0.0f);
  }
  EmbeddingSpace(Vocab vocab, uint32_t dim, std::vector<float> input)
      : vocab_(std::move(vocab)), dim_(dim), input_(std::move(input)) {
    if (input_.size() != static_cast<size_t>(vocab_.size()) * dim_) {
      throw std::logic_error("EmbeddingSpace: data size mismatch");
    }
  }

  const Vocab& vocab() const { return vocab_; }
  uint32_t dim() const { return dim_; }
  uint32_t size() const { return vocab_.size(); }
  bool has_output() const { return !output_.empty(); }

  std::span<float> row(uint32_t i) {
    return {input_.data() + static_cast<size_t>(i) * dim_, dim_};
  }
  std::span<const float> row(uint32_t i) const {
    return {input_.data() + static_cast<size_t>(i) * dim_, dim_};
  }
  std::span<float> out_row(uint32_t i) {
    return {output_.data() + static_cast<size_t>(i) * dim_, dim_};
  }
  std::span<const float> out_row(uint32_t i) const {
    return {output_.data() + static_cast<size_t>(i) * dim_, dim_};
  }

  std::optional<uint32_t> find(std::string_view token) const {
    return vocab_.find(token);
  }

  std::optional<std::span<const float>> vector_of(std::string_view token) const {
    auto id = vocab_.find(token);
    if (!id) return std::nullopt;
    return row(*id);
  }

  void drop_output() {
    output_.clear();
    output_.shrink_to_fit();
  }

  const std::vector<float>& raw_input() const { return input_; }

 private:
  Vocab vocab_;
  uint32_t dim_ = 0;
  std::vector<float> input_;
  std::vector<float> output_;
};

// Cosine over raw vectors; a zero-norm side yields 0.
double cosine(std::span<const float> a, std::span<const float> b);

// Missing token -> empty optional (typed outcome, callers decide policy).
std::optional<double> cosine(const EmbeddingSpace& space, std::string_view a,
                             std::string_view b);

// Top-n neighbours by cosine, descending, ties broken by token index.
// Returns nullopt when `token` has no vector.
std::optional<std::vector<std::pair<std::string, double>>> nearest(
    const EmbeddingSpace& space, std::string_view token, size_t n);

// word2vec text format: header "|vocab| dim", then one token per line
// followed by its components. Components are printed with 9 significant
// digits, which round-trips float32 exactly.
void save_word2vec_text(const EmbeddingSpace& space, const std::string& path);
EmbeddingSpace load_word2vec_text(const std::string& path);

}  // namespace kgrank
