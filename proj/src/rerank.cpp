#include "kgrank/rerank.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "kgrank/eval.hpp"

namespace kgrank {

double embedding_score(const EmbeddingSpace& space, const std::string& entity,
                       const Interpretation& interpretation,
                       const std::string& entity_prefix,
                       RerankDiagnostics* diag) {
  auto candidate = space.vector_of(entity_prefix + entity);
  if (!candidate) {
    if (diag) ++diag->candidates_missing_vector;
    return 0.0;
  }
  double f = 0.0;
  for (const LinkedEntity& linked : interpretation.entities) {
    auto vec = space.vector_of(entity_prefix + linked.entity);
    if (!vec) {
      if (diag) ++diag->linked_missing_vector;
      continue;
    }
    f += linked.confidence * cosine(*candidate, *vec);
  }
  return f;
}

double interpolate(double score_other, double f, double lambda) {
  if (!(lambda >= 0.0 && lambda <= 1.0)) {
    throw ValidationError("lambda must lie in [0, 1]");
  }
  return (1.0 - lambda) * score_other + lambda * f;
}

RankedRun rerank_run(const RankedRun& baseline,
                     const std::vector<QueryAnnotations>& annotations,
                     const EmbeddingSpace& space, const RerankConfig& cfg,
                     RerankDiagnostics* diag) {
  if (!(cfg.lambda >= 0.0 && cfg.lambda <= 1.0)) {
    throw ValidationError("lambda must lie in [0, 1]");
  }
  auto ann_index = index_annotations(annotations);
  if (diag) {
    for (const auto& qa : annotations) {
      if (!baseline.per_query.count(qa.query_id)) {
        ++diag->annotations_without_query;
      }
    }
  }

  RankedRun out;
  out.tag = cfg.tag.empty() ? baseline.tag + "-rr" : cfg.tag;
  out.query_order = baseline.query_order;

  for (const auto& query : baseline.query_order) {
    const auto& entries = baseline.per_query.at(query);

    std::vector<double> base(entries.size());
    for (size_t i = 0; i < entries.size(); ++i) base[i] = entries[i].score;
    if (cfg.norm == BaselineNorm::minmax && !base.empty()) {
      auto [mn, mx] = std::minmax_element(base.begin(), base.end());
      double lo = *mn, hi = *mx;
      for (double& s : base) s = hi > lo ? (s - lo) / (hi - lo) : 0.0;
    }

    const QueryAnnotations* qa = nullptr;
    auto hit = ann_index.find(query);
    if (hit != ann_index.end() && !hit->second->interpretations.empty()) {
      qa = hit->second;
    } else if (diag) {
      ++diag->queries_without_annotations;
    }

    struct Scored {
      size_t base_index;
      double total;
    };
    std::vector<Scored> scored(entries.size());
    for (size_t i = 0; i < entries.size(); ++i) {
      double total;
      bool beyond_depth = cfg.depth > 0 && entries[i].rank > cfg.depth;
      if (!qa || beyond_depth) {
        total = interpolate(base[i], 0.0, cfg.lambda);
      } else if (cfg.missing == MissingPolicy::skip_entity &&
                 !space.find(cfg.entity_prefix + entries[i].entity)) {
        if (diag) ++diag->candidates_missing_vector;
        total = base[i];
      } else {
        total = -std::numeric_limits<double>::infinity();
        for (const Interpretation& interp : qa->interpretations) {
          double f = embedding_score(space, entries[i].entity, interp,
                                     cfg.entity_prefix, diag);
          total = std::max(total, interpolate(base[i], f, cfg.lambda));
        }
      }
      scored[i] = {i, total};
    }

    std::stable_sort(scored.begin(), scored.end(),
                     [](const Scored& a, const Scored& b) {
                       if (a.total != b.total) return a.total > b.total;
                       return a.base_index < b.base_index;  // baseline rank
                     });

    std::vector<RunEntry> reranked;
    reranked.reserve(entries.size());
    for (size_t i = 0; i < scored.size(); ++i) {
      reranked.push_back({entries[scored[i].base_index].entity,
                          scored[i].total, static_cast<uint32_t>(i + 1)});
    }
    out.per_query.emplace(query, std::move(reranked));
  }
  return out;
}

std::vector<LambdaSweepRow> sweep_lambda(
    const RankedRun& baseline, const std::vector<QueryAnnotations>& annotations,
    const EmbeddingSpace& space, const Qrels& qrels,
    const std::vector<double>& grid, const RerankConfig& base_cfg) {
  if (grid.empty()) throw ValidationError("sweep_lambda: empty grid");
  std::vector<LambdaSweepRow> rows;
  rows.reserve(grid.size());
  NdcgOptions opts;
  opts.cutoffs = {10, 100};
  for (double lambda : grid) {
    RerankConfig cfg = base_cfg;
    cfg.lambda = lambda;
    RankedRun reranked = rerank_run(baseline, annotations, space, cfg);
    NdcgResult eval = ndcg_eval(reranked, qrels, opts);
    rows.push_back({lambda, eval.mean[0], eval.mean[1], false});
  }
  size_t best = 0;
  for (size_t i = 1; i < rows.size(); ++i) {
    if (rows[i].mean_ndcg10 > rows[best].mean_ndcg10 ||
        (rows[i].mean_ndcg10 == rows[best].mean_ndcg10 &&
         rows[i].mean_ndcg100 > rows[best].mean_ndcg100)) {
      best = i;
    }
  }
  rows[best].best = true;
  return rows;
}

void save_lambda_sweep(const std::vector<LambdaSweepRow>& rows,
                       const std::string& path) {
  std::ofstream out = open_output(path);
  out << "lambda,mean_ndcg@10,mean_ndcg@100,best\n";
  for (const auto& row : rows) {
    out << format_g(row.lambda, 6) << ',' << format_g(row.mean_ndcg10, 6) << ','
        << format_g(row.mean_ndcg100, 6) << ',' << (row.best ? "yes" : "no")
        << '\n';
  }
  if (!out) throw IoError("write failed: " + path);
}

}  // namespace kgrank
