#include "kgrank/complex_kge.hpp"

#include <algorithm>
#include <map>

namespace kgrank {

double score_triple(const ComplexEmbeddingSpace& space, uint32_t head,
                    uint32_t relation, uint32_t tail) {
  const size_t d = space.dim;
  return complex_math::score<float>(
      space.entity_re.data() + head * d, space.entity_im.data() + head * d,
      space.relation_re.data() + relation * d,
      space.relation_im.data() + relation * d,
      space.entity_re.data() + tail * d, space.entity_im.data() + tail * d, d);
}

std::optional<double> score_triple(const ComplexEmbeddingSpace& space,
                                   const std::string& head,
                                   const std::string& relation,
                                   const std::string& tail) {
  auto h = space.entities.find(head);
  auto r = space.relations.find(relation);
  auto t = space.entities.find(tail);
  if (!h || !r || !t) return std::nullopt;
  return score_triple(space, *h, *r, *t);
}

namespace {

struct SparseGrad {
  // row id -> gradient block, ordered so application is deterministic
  std::map<uint32_t, std::vector<float>> rows;

  float* at(uint32_t row, uint32_t d) {
    auto it = rows.find(row);
    if (it == rows.end()) {
      it = rows.emplace(row, std::vector<float>(d, 0.0f)).first;
    }
    return it->second.data();
  }
};

// Adagrad keeps the trilinear cold start from stalling: with the small
// normal(0, 0.1/sqrt(d)) init, raw gradients start around d * sigma^3 and
// plain SGD barely moves.
void apply(std::vector<float>& table, std::vector<float>& accum,
           const SparseGrad& grad, uint32_t d, float lr, float l2,
           float inv_batch) {
  for (const auto& [row, g] : grad.rows) {
    float* dst = table.data() + static_cast<size_t>(row) * d;
    float* acc = accum.data() + static_cast<size_t>(row) * d;
    for (uint32_t j = 0; j < d; ++j) {
      float step = g[j] * inv_batch;
      if (l2 > 0.0f) step += 2.0f * l2 * dst[j];
      acc[j] += step * step;
      dst[j] -= lr * step / (std::sqrt(acc[j]) + 1e-8f);
    }
  }
}

}  // namespace

ComplexEmbeddingSpace train_complex(const KnowledgeGraph& kg,
                                    const ComplexConfig& cfg,
                                    std::vector<ComplexEpochLoss>* loss_log) {
  if (kg.edges.empty()) throw ValidationError("graph has no triples");
  if (cfg.dimension < 1) throw ValidationError("dimension must be >= 1");
  if (cfg.epochs < 1) throw ValidationError("epochs must be >= 1");
  if (cfg.batch_size < 1) throw ValidationError("batch_size must be >= 1");
  if (!(cfg.learning_rate > 0)) throw ValidationError("learning rate must be > 0");
  if (cfg.corrupt_head < 0 || cfg.corrupt_relation < 0 ||
      cfg.corrupt_head + cfg.corrupt_relation > 1.0) {
    throw ValidationError("corruption probabilities must be >= 0 and sum <= 1");
  }

  const uint32_t d = cfg.dimension;
  const uint32_t ne = kg.entities.size();
  const uint32_t nr = kg.relations.size();

  ComplexEmbeddingSpace space;
  space.entities = kg.entities;
  space.relations = kg.relations;
  space.dim = d;
  space.entity_re.resize(static_cast<size_t>(ne) * d);
  space.entity_im.resize(static_cast<size_t>(ne) * d);
  space.relation_re.resize(static_cast<size_t>(nr) * d);
  space.relation_im.resize(static_cast<size_t>(nr) * d);

  Rng rng(mix_seed(cfg.seed, 0xC03152ULL));
  const double init_sigma = 0.1 / std::sqrt(static_cast<double>(d));
  for (float* table : {&space.entity_re[0], &space.entity_im[0]}) {
    for (size_t i = 0; i < static_cast<size_t>(ne) * d; ++i) {
      table[i] = static_cast<float>(rng.next_normal(0.0, init_sigma));
    }
  }
  for (float* table : {&space.relation_re[0], &space.relation_im[0]}) {
    for (size_t i = 0; i < static_cast<size_t>(nr) * d; ++i) {
      table[i] = static_cast<float>(rng.next_normal(0.0, init_sigma));
    }
  }

  std::vector<float> acc_ent_re(space.entity_re.size(), 0.0f);
  std::vector<float> acc_ent_im(space.entity_im.size(), 0.0f);
  std::vector<float> acc_rel_re(space.relation_re.size(), 0.0f);
  std::vector<float> acc_rel_im(space.relation_im.size(), 0.0f);

  std::vector<uint32_t> order(kg.edges.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<uint32_t>(i);

  struct Sample {
    uint32_t h, r, t;
    float label;
  };

  for (uint32_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    // Fisher-Yates with our own index draws, deterministic under the seed.
    for (size_t i = order.size(); i > 1; --i) {
      std::swap(order[i - 1], order[rng.next_index(i)]);
    }

    double epoch_loss = 0.0;
    uint64_t epoch_samples = 0;

    for (size_t start = 0; start < order.size(); start += cfg.batch_size) {
      size_t end = std::min(order.size(), start + cfg.batch_size);
      std::vector<Sample> batch;
      batch.reserve((end - start) * (1 + cfg.negatives_per_positive));
      for (size_t i = start; i < end; ++i) {
        const Triple& pos = kg.edges[order[i]];
        batch.push_back({pos.head, pos.relation, pos.tail, 1.0f});
        for (uint32_t n = 0; n < cfg.negatives_per_positive; ++n) {
          Sample neg{pos.head, pos.relation, pos.tail, 0.0f};
          double u = rng.next_real();
          if (u < cfg.corrupt_head) {
            if (ne > 1) {
              do {
                neg.h = static_cast<uint32_t>(rng.next_index(ne));
              } while (neg.h == pos.head);
            }
          } else if (u < cfg.corrupt_head + cfg.corrupt_relation) {
            if (nr > 1) {
              do {
                neg.r = static_cast<uint32_t>(rng.next_index(nr));
              } while (neg.r == pos.relation);
            }
          } else {
            if (ne > 1) {
              do {
                neg.t = static_cast<uint32_t>(rng.next_index(ne));
              } while (neg.t == pos.tail);
            }
          }
          batch.push_back(neg);
        }
      }

      SparseGrad g_ent_re, g_ent_im, g_rel_re, g_rel_im;
      double batch_loss = 0.0;
      for (const Sample& s : batch) {
        float score = static_cast<float>(score_triple(space, s.h, s.r, s.t));
        float d_score = 0.0f;
        batch_loss += complex_math::bce_loss_grad(score, s.label, &d_score);
        complex_math::score_grad<float>(
            space.entity_re.data() + static_cast<size_t>(s.h) * d,
            space.entity_im.data() + static_cast<size_t>(s.h) * d,
            space.relation_re.data() + static_cast<size_t>(s.r) * d,
            space.relation_im.data() + static_cast<size_t>(s.r) * d,
            space.entity_re.data() + static_cast<size_t>(s.t) * d,
            space.entity_im.data() + static_cast<size_t>(s.t) * d, d, d_score,
            g_ent_re.at(s.h, d), g_ent_im.at(s.h, d), g_rel_re.at(s.r, d),
            g_rel_im.at(s.r, d), g_ent_re.at(s.t, d), g_ent_im.at(s.t, d));
      }

      // Mean reduction, then one synchronized application per batch.
      float inv = 1.0f / static_cast<float>(batch.size());
      apply(space.entity_re, acc_ent_re, g_ent_re, d, cfg.learning_rate,
            cfg.l2_weight, inv);
      apply(space.entity_im, acc_ent_im, g_ent_im, d, cfg.learning_rate,
            cfg.l2_weight, inv);
      apply(space.relation_re, acc_rel_re, g_rel_re, d, cfg.learning_rate,
            cfg.l2_weight, inv);
      apply(space.relation_im, acc_rel_im, g_rel_im, d, cfg.learning_rate,
            cfg.l2_weight, inv);

      epoch_loss += batch_loss;
      epoch_samples += batch.size();
    }

    if (loss_log) {
      loss_log->push_back(
          {epoch + 1, epoch_samples ? epoch_loss / epoch_samples : 0.0,
           epoch_samples});
    }
  }
  return space;
}

RankResult rank_entities(const ComplexEmbeddingSpace& space, uint32_t head,
                         uint32_t relation, uint32_t true_entity,
                         RankDirection direction, const KnownTriples& filter,
                         std::vector<std::pair<uint32_t, double>>* ranked_out) {
  const uint32_t ne = space.entities.size();
  std::vector<double> scores(ne);
  for (uint32_t e = 0; e < ne; ++e) {
    scores[e] = direction == RankDirection::tail
                    ? score_triple(space, head, relation, e)
                    : score_triple(space, e, relation, head);
  }
  double true_score = scores[true_entity];

  const std::unordered_set<uint32_t>* known =
      direction == RankDirection::tail ? filter.tails_of(head, relation)
                                       : filter.heads_of(head, relation);

  auto beats = [&](uint32_t e) {
    return scores[e] > true_score ||
           (scores[e] == true_score && e < true_entity);
  };

  uint32_t raw = 1, filtered = 1;
  for (uint32_t e = 0; e < ne; ++e) {
    if (e == true_entity || !beats(e)) continue;
    ++raw;
    if (!(known && known->count(e))) ++filtered;
  }

  if (ranked_out) {
    ranked_out->clear();
    ranked_out->reserve(ne);
    for (uint32_t e = 0; e < ne; ++e) ranked_out->emplace_back(e, scores[e]);
    std::sort(ranked_out->begin(), ranked_out->end(),
              [](const auto& a, const auto& b) {
                if (a.second != b.second) return a.second > b.second;
                return a.first < b.first;
              });
  }

  RankResult res;
  res.triple = direction == RankDirection::tail
                   ? Triple{head, relation, true_entity}
                   : Triple{true_entity, relation, head};
  res.raw_rank = raw;
  res.filtered_rank = filtered;
  res.raw_rr = 1.0 / raw;
  res.filtered_rr = 1.0 / filtered;
  return res;
}

LinkPredictionSummary evaluate_link_prediction(
    const ComplexEmbeddingSpace& space, const std::vector<Triple>& test,
    const KnownTriples& filter, std::vector<RankResult>* per_triple) {
  LinkPredictionSummary s;
  for (const Triple& t : test) {
    RankResult r = rank_entities(space, t.head, t.relation, t.tail,
                                 RankDirection::tail, filter);
    s.mrr_raw += r.raw_rr;
    s.mrr_filtered += r.filtered_rr;
    s.hits_at_1 += r.filtered_rank <= 1;
    s.hits_at_10 += r.filtered_rank <= 10;
    ++s.queries;
    if (per_triple) per_triple->push_back(r);
  }
  if (s.queries) {
    s.mrr_raw /= s.queries;
    s.mrr_filtered /= s.queries;
    s.hits_at_1 /= s.queries;
    s.hits_at_10 /= s.queries;
  }
  return s;
}

namespace {

void save_complex_table(const Vocab& vocab, const std::vector<float>& re,
                        const std::vector<float>& im, uint32_t d,
                        const std::string& path) {
  std::ofstream out = open_output(path);
  out << vocab.size() << ' ' << 2 * d << '\n';
  for (uint32_t i = 0; i < vocab.size(); ++i) {
    const std::string& name = vocab.name(i);
    if (contains_whitespace(name)) {
      throw ValidationError("id contains whitespace, not exportable: '" + name +
                            "'");
    }
    out << name;
    const float* r = re.data() + static_cast<size_t>(i) * d;
    const float* m = im.data() + static_cast<size_t>(i) * d;
    for (uint32_t j = 0; j < d; ++j) out << ' ' << format_g(r[j], 9);
    for (uint32_t j = 0; j < d; ++j) out << ' ' << format_g(m[j], 9);
    out << '\n';
  }
  if (!out) throw IoError("write failed: " + path);
}

}  // namespace

void save_complex_space(const ComplexEmbeddingSpace& space,
                        const std::string& prefix) {
  save_complex_table(space.entities, space.entity_re, space.entity_im,
                     space.dim, prefix + ".entities.w2v");
  save_complex_table(space.relations, space.relation_re, space.relation_im,
                     space.dim, prefix + ".relations.w2v");
}

EmbeddingSpace complex_entity_vectors(const ComplexEmbeddingSpace& space) {
  EmbeddingSpace out(space.entities, 2 * space.dim);
  for (uint32_t i = 0; i < space.entities.size(); ++i) {
    auto row = out.row(i);
    auto re = space.ent_re(i);
    auto im = space.ent_im(i);
    std::copy(re.begin(), re.end(), row.begin());
    std::copy(im.begin(), im.end(), row.begin() + space.dim);
  }
  return out;
}

}  // namespace kgrank
