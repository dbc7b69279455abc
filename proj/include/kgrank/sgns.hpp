#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "kgrank/embedding.hpp"
#include "kgrank/walks.hpp"

namespace kgrank {

struct SgnsConfig {
  uint32_t dimension = 200;
  uint32_t window = 5;      // context window c, fixed (no random shrink)
  uint32_t negatives = 5;   // noise samples per positive pair
  uint32_t epochs = 5;
  float learning_rate = 0.025f;  // decays linearly to 1e-4 * initial
  uint32_t min_count = 0;
  double subsample_threshold = 0.0;  // 0 disables subsampling
  uint64_t seed = 42;
  uint32_t workers = 1;
  // Trains the literal softmax objective instead of negative sampling.
  // Tractable only for tiny vocabularies.
  bool full_softmax = false;
};

struct EpochLoss {
  uint32_t epoch = 0;
  double mean_loss = 0.0;
  uint64_t pairs = 0;
};

// Loss/gradient kernels shared by the float trainer and the float64
// finite-difference checks. Gradients are accumulated (+=) into the g_*
// buffers.
namespace sgns_math {

template <typename T>
T stable_sigmoid(T x) {
  if (x >= 0) {
    T e = std::exp(-x);
    return T(1) / (T(1) + e);
  }
  T e = std::exp(x);
  return e / (T(1) + e);
}

template <typename T>
T softplus(T x) {  // log(1 + e^x), overflow-safe
  if (x > T(30)) return x;
  if (x < T(-30)) return std::exp(x);
  return std::log1p(std::exp(x));
}

template <typename T>
T dot(const T* a, const T* b, size_t dim) {
  T s = 0;
  for (size_t i = 0; i < dim; ++i) s += a[i] * b[i];
  return s;
}

// Negative-sampling loss for one positive pair (center v, context u_pos)
// plus k noise rows: -log s(v.u+) - sum_i log s(-v.u-_i).
template <typename T>
T pair_loss_grad(const T* v, const T* u_pos, const T* const* u_neg, size_t k,
                 size_t dim, T* g_v, T* g_u_pos, T* const* g_u_neg) {
  T s_pos = dot(v, u_pos, dim);
  T loss = softplus(-s_pos);
  T coef = stable_sigmoid(s_pos) - T(1);
  for (size_t i = 0; i < dim; ++i) {
    g_v[i] += coef * u_pos[i];
    g_u_pos[i] += coef * v[i];
  }
  for (size_t n = 0; n < k; ++n) {
    T s_neg = dot(v, u_neg[n], dim);
    loss += softplus(s_neg);
    T c = stable_sigmoid(s_neg);
    for (size_t i = 0; i < dim; ++i) {
      g_v[i] += c * u_neg[n][i];
      g_u_neg[n][i] += c * v[i];
    }
  }
  return loss;
}

// Full-softmax loss for one pair: -(v.u_t - log sum_w exp(v.u_w)).
// u_table is row-major vocab x dim; g_u_table likewise.
template <typename T>
T softmax_loss_grad(const T* v, const T* u_table, size_t vocab, size_t dim,
                    size_t target, T* g_v, T* g_u_table) {
  std::vector<T> scores(vocab);
  T max_s = -std::numeric_limits<T>::infinity();
  for (size_t w = 0; w < vocab; ++w) {
    scores[w] = dot(v, u_table + w * dim, dim);
    if (scores[w] > max_s) max_s = scores[w];
  }
  T sum = 0;
  for (size_t w = 0; w < vocab; ++w) sum += std::exp(scores[w] - max_s);
  T lse = max_s + std::log(sum);
  for (size_t w = 0; w < vocab; ++w) {
    T p = std::exp(scores[w] - lse);
    T c = p - (w == target ? T(1) : T(0));
    const T* u = u_table + w * dim;
    T* gu = g_u_table + w * dim;
    for (size_t i = 0; i < dim; ++i) {
      g_v[i] += c * u[i];
      gu[i] += c * v[i];
    }
  }
  return lse - scores[target];
}

}  // namespace sgns_math

// Trains skip-gram embeddings over the corpus sequences. Single-worker runs
// are bit-reproducible under a fixed seed; multi-worker runs share the
// matrices lock-free and only promise statistical accuracy.
EmbeddingSpace train_skipgram(const WalkCorpus& corpus, const SgnsConfig& cfg,
                              std::vector<EpochLoss>* loss_log = nullptr);

}  // namespace kgrank
