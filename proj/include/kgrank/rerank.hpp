#pragma once

#include <string>
#include <vector>

#include "kgrank/annotations.hpp"
#include "kgrank/embedding.hpp"
#include "kgrank/run_file.hpp"

namespace kgrank {

enum class BaselineNorm { none, minmax };
// zero_contribution: a candidate without a vector gets F = 0 and keeps
// (1-lambda) * baseline. skip_entity: such a candidate is not re-scored at
// all and keeps its full (normalized) baseline score.
enum class MissingPolicy { zero_contribution, skip_entity };

struct RerankConfig {
  double lambda = 0.5;  // Interpolation weight, must lie in [0, 1].
  BaselineNorm norm = BaselineNorm::minmax;
  MissingPolicy missing = MissingPolicy::zero_contribution;
  // 0 reranks the full run; otherwise only the top `depth` baseline entries
  // receive an embedding score (the rest keep F = 0).
  size_t depth = 0;
  // Prepended to entity ids on vector lookup ("ENTITY/" for joint spaces).
  std::string entity_prefix;
  std::string tag;  // output run tag; empty derives "<input-tag>-rr"
};

struct RerankDiagnostics {
  uint64_t queries_without_annotations = 0;
  uint64_t annotations_without_query = 0;
  uint64_t candidates_missing_vector = 0;
  uint64_t linked_missing_vector = 0;
};

// Confidence-weighted cosine between a candidate entity and the linked
// entities of one interpretation. Linked entities without vectors
// contribute 0; a candidate without a vector scores 0.
double embedding_score(const EmbeddingSpace& space, const std::string& entity,
                       const Interpretation& interpretation,
                       const std::string& entity_prefix = "",
                       RerankDiagnostics* diag = nullptr);

// (1 - lambda) * score_other + lambda * f.
double interpolate(double score_other, double f, double lambda);

// Per candidate: max over interpretations of the interpolated score.
// Queries without annotations pass through with (1-lambda) * baseline.
// Output re-sorted by score, ties broken by baseline rank, ranks recomputed.
RankedRun rerank_run(const RankedRun& baseline,
                     const std::vector<QueryAnnotations>& annotations,
                     const EmbeddingSpace& space, const RerankConfig& cfg,
                     RerankDiagnostics* diag = nullptr);

struct LambdaSweepRow {
  double lambda = 0.0;
  double mean_ndcg10 = 0.0;
  double mean_ndcg100 = 0.0;
  bool best = false;
};

std::vector<LambdaSweepRow> sweep_lambda(
    const RankedRun& baseline, const std::vector<QueryAnnotations>& annotations,
    const EmbeddingSpace& space, const Qrels& qrels,
    const std::vector<double>& grid, const RerankConfig& base_cfg = {});

void save_lambda_sweep(const std::vector<LambdaSweepRow>& rows,
                       const std::string& path);

}  // namespace kgrank
