#include "kgrank/sgns.hpp"

#include <algorithm>
#include <atomic>
#include <cstring>
#include <thread>

namespace kgrank {

namespace {

struct TrainData {
  Vocab vocab;  // surviving tokens, first-appearance order
  std::vector<std::vector<uint32_t>> sentences;  // remapped to surviving ids
  std::vector<uint64_t> counts;
  uint64_t total_tokens = 0;
  std::vector<double> noise_cdf;   // cumulative unigram^0.75 weights
  std::vector<double> keep_prob;   // subsampling; 1.0 when disabled
};

TrainData prepare(const WalkCorpus& corpus, const SgnsConfig& cfg) {
  std::vector<uint64_t> raw_counts(corpus.tokens.size(), 0);
  for (const auto& s : corpus.sequences) {
    for (uint32_t t : s) ++raw_counts[t];
  }

  TrainData td;
  std::vector<uint32_t> remap(corpus.tokens.size(), UINT32_MAX);
  for (uint32_t i = 0; i < corpus.tokens.size(); ++i) {
    if (raw_counts[i] >= cfg.min_count) {
      remap[i] = td.vocab.intern(corpus.tokens.name(i));
      td.counts.push_back(raw_counts[i]);
    }
  }
  if (td.vocab.empty()) {
    throw ValidationError("vocabulary is empty after min_count filtering");
  }

  for (const auto& s : corpus.sequences) {
    std::vector<uint32_t> mapped;
    mapped.reserve(s.size());
    for (uint32_t t : s) {
      if (remap[t] != UINT32_MAX) mapped.push_back(remap[t]);
    }
    td.total_tokens += mapped.size();
    td.sentences.push_back(std::move(mapped));
  }
  if (td.total_tokens == 0) {
    throw ValidationError("corpus is empty after min_count filtering");
  }

  td.noise_cdf.resize(td.vocab.size());
  double acc = 0.0;
  for (uint32_t i = 0; i < td.vocab.size(); ++i) {
    acc += std::pow(static_cast<double>(td.counts[i]), 0.75);
    td.noise_cdf[i] = acc;
  }

  td.keep_prob.assign(td.vocab.size(), 1.0);
  if (cfg.subsample_threshold > 0.0) {
    for (uint32_t i = 0; i < td.vocab.size(); ++i) {
      double f = static_cast<double>(td.counts[i]) / td.total_tokens;
      if (f > 0.0) {
        double p = (std::sqrt(f / cfg.subsample_threshold) + 1.0) *
                   (cfg.subsample_threshold / f);
        td.keep_prob[i] = std::min(1.0, p);
      }
    }
  }
  return td;
}

uint32_t sample_noise(const std::vector<double>& cdf, Rng& rng) {
  double x = rng.next_real() * cdf.back();
  auto it = std::upper_bound(cdf.begin(), cdf.end(), x);
  if (it == cdf.end()) --it;
  return static_cast<uint32_t>(it - cdf.begin());
}

}  // namespace

EmbeddingSpace train_skipgram(const WalkCorpus& corpus, const SgnsConfig& cfg,
                              std::vector<EpochLoss>* loss_log) {
  if (cfg.dimension < 1) throw ValidationError("dimension must be >= 1");
  if (cfg.window < 1) throw ValidationError("window must be >= 1");
  if (cfg.epochs < 1) throw ValidationError("epochs must be >= 1");
  if (!(cfg.learning_rate > 0)) throw ValidationError("learning rate must be > 0");

  TrainData td = prepare(corpus, cfg);
  if (cfg.full_softmax && td.vocab.size() > 4096) {
    throw ValidationError("full_softmax is only supported for tiny vocabularies");
  }

  const uint32_t dim = cfg.dimension;
  EmbeddingSpace space(td.vocab, dim, /*with_output=*/true);
  Rng init_rng(mix_seed(cfg.seed, 0x111717ULL));
  for (uint32_t i = 0; i < space.size(); ++i) {
    auto row = space.row(i);
    for (uint32_t j = 0; j < dim; ++j) {
      row[j] = static_cast<float>((init_rng.next_real() - 0.5) / dim);
    }
  }

  const uint64_t total_planned = td.total_tokens * cfg.epochs;
  std::atomic<uint64_t> processed{0};
  const float min_alpha = cfg.learning_rate * 1e-4f;
  const uint32_t workers = std::max(1u, cfg.workers);

  float* V = space.row(0).data();
  float* U = space.out_row(0).data();

  for (uint32_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::vector<double> worker_loss(workers, 0.0);
    std::vector<uint64_t> worker_pairs(workers, 0);

    auto run_worker = [&](uint32_t w) {
      Rng rng(mix_seed(cfg.seed, 0x9000ULL + epoch * 0x101ULL + w));
      std::vector<float> g_v(dim), g_u(dim);
      std::vector<float> g_neg(static_cast<size_t>(cfg.negatives) * dim);
      std::vector<const float*> neg_rows(cfg.negatives);
      std::vector<float*> g_neg_rows(cfg.negatives);
      std::vector<uint32_t> neg_ids(cfg.negatives);
      std::vector<float> g_table;  // full-softmax scratch
      if (cfg.full_softmax) g_table.assign(space.raw_input().size(), 0.0f);
      std::vector<uint32_t> sent;

      double loss_sum = 0.0;
      uint64_t pair_count = 0;

      for (size_t si = w; si < td.sentences.size(); si += workers) {
        const auto& src = td.sentences[si];
        sent.clear();
        for (uint32_t tok : src) {
          if (td.keep_prob[tok] >= 1.0 || rng.next_real() < td.keep_prob[tok]) {
            sent.push_back(tok);
          }
        }
        for (size_t t = 0; t < sent.size(); ++t) {
          uint64_t done = processed.fetch_add(1, std::memory_order_relaxed);
          float alpha = std::max(
              min_alpha,
              cfg.learning_rate *
                  (1.0f - static_cast<float>(done) / total_planned));
          size_t lo = t >= cfg.window ? t - cfg.window : 0;
          size_t hi = std::min(sent.size() - 1, t + cfg.window);
          uint32_t center = sent[t];
          float* v = V + static_cast<size_t>(center) * dim;
          for (size_t j = lo; j <= hi; ++j) {
            if (j == t) continue;
            uint32_t ctx = sent[j];
            ++pair_count;
            std::memset(g_v.data(), 0, dim * sizeof(float));

            if (cfg.full_softmax) {
              std::memset(g_table.data(), 0, g_table.size() * sizeof(float));
              loss_sum += sgns_math::softmax_loss_grad<float>(
                  v, U, space.size(), dim, ctx, g_v.data(), g_table.data());
              for (size_t p = 0; p < g_table.size(); ++p) {
                U[p] -= alpha * g_table[p];
              }
            } else {
              size_t k = 0;
              for (uint32_t n = 0; n < cfg.negatives; ++n) {
                uint32_t cand = sample_noise(td.noise_cdf, rng);
                if (cand == ctx) continue;  // word2vec skips the true target
                neg_ids[k] = cand;
                neg_rows[k] = U + static_cast<size_t>(cand) * dim;
                g_neg_rows[k] = g_neg.data() + k * dim;
                ++k;
              }
              std::memset(g_u.data(), 0, dim * sizeof(float));
              std::memset(g_neg.data(), 0, k * dim * sizeof(float));
              loss_sum += sgns_math::pair_loss_grad<float>(
                  v, U + static_cast<size_t>(ctx) * dim, neg_rows.data(), k,
                  dim, g_v.data(), g_u.data(), g_neg_rows.data());
              float* u_pos = U + static_cast<size_t>(ctx) * dim;
              for (uint32_t i2 = 0; i2 < dim; ++i2) u_pos[i2] -= alpha * g_u[i2];
              for (size_t n = 0; n < k; ++n) {
                float* u_neg = U + static_cast<size_t>(neg_ids[n]) * dim;
                const float* gn = g_neg.data() + n * dim;
                for (uint32_t i2 = 0; i2 < dim; ++i2) u_neg[i2] -= alpha * gn[i2];
              }
            }
            for (uint32_t i2 = 0; i2 < dim; ++i2) v[i2] -= alpha * g_v[i2];
          }
        }
      }
      worker_loss[w] = loss_sum;
      worker_pairs[w] = pair_count;
    };

    if (workers == 1) {
      run_worker(0);
    } else {
      std::vector<std::thread> pool;
      pool.reserve(workers);
      for (uint32_t w = 0; w < workers; ++w) pool.emplace_back(run_worker, w);
      for (auto& th : pool) th.join();
    }

    if (loss_log) {
      double loss = 0.0;
      uint64_t pairs = 0;
      for (uint32_t w = 0; w < workers; ++w) {
        loss += worker_loss[w];
        pairs += worker_pairs[w];
      }
      loss_log->push_back({epoch + 1, pairs ? loss / pairs : 0.0, pairs});
    }
  }
  return space;
}

}  // namespace kgrank
