#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "kgrank/kg.hpp"
#include "kgrank/sgns.hpp"  // stable_sigmoid / softplus

namespace kgrank {

struct ComplexConfig {
  uint32_t dimension = 100;  // complex dimension d (2d real parameters/row)
  uint32_t epochs = 100;
  uint32_t batch_size = 8;
  uint32_t negatives_per_positive = 6;
  float learning_rate = 0.2f;
  float l2_weight = 0.0f;  // sparse L2 on touched rows
  // Corruption split over head/relation/tail; tail takes the remainder.
  double corrupt_head = 0.4;
  double corrupt_relation = 0.2;
  uint64_t seed = 42;
};

struct ComplexEmbeddingSpace {
  Vocab entities;
  Vocab relations;
  uint32_t dim = 0;
  // Row-major |vocab| x dim blocks, real and imaginary parts separate.
  std::vector<float> entity_re, entity_im;
  std::vector<float> relation_re, relation_im;

  std::span<const float> ent_re(uint32_t i) const {
    return {entity_re.data() + static_cast<size_t>(i) * dim, dim};
  }
  std::span<const float> ent_im(uint32_t i) const {
    return {entity_im.data() + static_cast<size_t>(i) * dim, dim};
  }
  std::span<const float> rel_re(uint32_t i) const {
    return {relation_re.data() + static_cast<size_t>(i) * dim, dim};
  }
  std::span<const float> rel_im(uint32_t i) const {
    return {relation_im.data() + static_cast<size_t>(i) * dim, dim};
  }
};

// Kernels shared by the trainer and the float64 gradient checks.
namespace complex_math {

// Re(<h, r, conj(t)>), expanded over the component blocks.
template <typename T>
T score(const T* h_re, const T* h_im, const T* r_re, const T* r_im,
        const T* t_re, const T* t_im, size_t d) {
  T s = 0;
  for (size_t j = 0; j < d; ++j) {
    s += h_re[j] * r_re[j] * t_re[j];
    s += h_im[j] * r_re[j] * t_im[j];
    s += h_re[j] * r_im[j] * t_im[j];
    s -= h_im[j] * r_im[j] * t_re[j];
  }
  return s;
}

// dS/d(component) for all six blocks; accumulated with `weight`.
template <typename T>
void score_grad(const T* h_re, const T* h_im, const T* r_re, const T* r_im,
                const T* t_re, const T* t_im, size_t d, T weight, T* g_h_re,
                T* g_h_im, T* g_r_re, T* g_r_im, T* g_t_re, T* g_t_im) {
  for (size_t j = 0; j < d; ++j) {
    g_h_re[j] += weight * (r_re[j] * t_re[j] + r_im[j] * t_im[j]);
    g_h_im[j] += weight * (r_re[j] * t_im[j] - r_im[j] * t_re[j]);
    g_r_re[j] += weight * (h_re[j] * t_re[j] + h_im[j] * t_im[j]);
    g_r_im[j] += weight * (h_re[j] * t_im[j] - h_im[j] * t_re[j]);
    g_t_re[j] += weight * (h_re[j] * r_re[j] - h_im[j] * r_im[j]);
    g_t_im[j] += weight * (h_im[j] * r_re[j] + h_re[j] * r_im[j]);
  }
}

// Binary cross-entropy after sigmoid; label is 1 for positives, 0 for
// corrupted samples. d_score receives dL/dS.
template <typename T>
T bce_loss_grad(T score, T label, T* d_score) {
  T p = sgns_math::stable_sigmoid(score);
  *d_score = p - label;
  // -[y log p + (1-y) log(1-p)] in the overflow-safe softplus form
  return label > T(0.5) ? sgns_math::softplus(-score)
                        : sgns_math::softplus(score);
}

}  // namespace complex_math

double score_triple(const ComplexEmbeddingSpace& space, uint32_t head,
                    uint32_t relation, uint32_t tail);
// Missing id -> empty optional.
std::optional<double> score_triple(const ComplexEmbeddingSpace& space,
                                   const std::string& head,
                                   const std::string& relation,
                                   const std::string& tail);

struct ComplexEpochLoss {
  uint32_t epoch = 0;
  double mean_loss = 0.0;
  uint64_t samples = 0;
};

// Mini-batch SGD on sigmoid cross-entropy with negative sampling; negatives
// corrupt exactly one of head/relation/tail, drawn uniformly over the
// respective vocabulary (resampled when the draw equals the original).
ComplexEmbeddingSpace train_complex(const KnowledgeGraph& kg,
                                    const ComplexConfig& cfg,
                                    std::vector<ComplexEpochLoss>* loss_log = nullptr);

// Known-true triples, used to filter other valid completions out of a
// ranking.
class KnownTriples {
 public:
  void add(uint32_t h, uint32_t r, uint32_t t) {
    triples_.insert(key(h, r, t));
    tails_[pair_key(h, r)].insert(t);
    heads_[pair_key(t, r)].insert(h);
  }
  void add_all(const std::vector<Triple>& ts) {
    for (const Triple& t : ts) add(t.head, t.relation, t.tail);
  }
  bool contains(uint32_t h, uint32_t r, uint32_t t) const {
    return triples_.count(key(h, r, t)) > 0;
  }
  const std::unordered_set<uint32_t>* tails_of(uint32_t h, uint32_t r) const {
    auto it = tails_.find(pair_key(h, r));
    return it == tails_.end() ? nullptr : &it->second;
  }
  const std::unordered_set<uint32_t>* heads_of(uint32_t t, uint32_t r) const {
    auto it = heads_.find(pair_key(t, r));
    return it == heads_.end() ? nullptr : &it->second;
  }

 private:
  static uint64_t key(uint32_t a, uint32_t b, uint32_t c) {
    return (static_cast<uint64_t>(a) << 42) ^ (static_cast<uint64_t>(b) << 21) ^ c;
  }
  static uint64_t pair_key(uint32_t a, uint32_t b) {
    return (static_cast<uint64_t>(a) << 32) | b;
  }
  std::unordered_set<uint64_t> triples_;
  std::unordered_map<uint64_t, std::unordered_set<uint32_t>> tails_;
  std::unordered_map<uint64_t, std::unordered_set<uint32_t>> heads_;
};

enum class RankDirection { tail, head };

struct RankResult {
  Triple triple;
  uint32_t raw_rank = 0;
  uint32_t filtered_rank = 0;  // <= raw_rank
  double raw_rr = 0.0;
  double filtered_rr = 0.0;
};

// Ranks every entity as the missing head/tail; ties broken by entity index
// ascending. The filtered rank ignores other known-true completions.
RankResult rank_entities(
    const ComplexEmbeddingSpace& space, uint32_t head, uint32_t relation,
    uint32_t true_entity, RankDirection direction, const KnownTriples& filter,
    std::vector<std::pair<uint32_t, double>>* ranked_out = nullptr);

struct LinkPredictionSummary {
  double mrr_raw = 0.0;
  double mrr_filtered = 0.0;
  double hits_at_1 = 0.0;
  double hits_at_10 = 0.0;
  size_t queries = 0;
};

// Tail-direction ranking over a set of test triples.
LinkPredictionSummary evaluate_link_prediction(
    const ComplexEmbeddingSpace& space, const std::vector<Triple>& test,
    const KnownTriples& filter, std::vector<RankResult>* per_triple = nullptr);

// Writes <prefix>.entities.w2v and <prefix>.relations.w2v in word2vec text
// form with 2d columns per row: d real parts then d imaginary parts. The
// 2d concatenation is what re-ranking consumes for cosine.
void save_complex_space(const ComplexEmbeddingSpace& space,
                        const std::string& prefix);

// The entity table as a plain 2d-dimensional EmbeddingSpace.
EmbeddingSpace complex_entity_vectors(const ComplexEmbeddingSpace& space);

}  // namespace kgrank
