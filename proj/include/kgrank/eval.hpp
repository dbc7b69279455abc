#pragma once

#include <span>
#include <string>
#include <vector>

#include "kgrank/embedding.hpp"
#include "kgrank/run_file.hpp"
#include "kgrank/stats.hpp"

namespace kgrank {

struct NdcgOptions {
  std::vector<uint32_t> cutoffs = {10, 100};
  bool exponential_gain = false;  // gain 2^g - 1 instead of linear g
};

struct NdcgResult {
  std::vector<uint32_t> cutoffs;
  std::vector<std::string> query_ids;  // qrels queries, in qrels order
  // Values parallel to `cutoffs` for each query id.
  std::unordered_map<std::string, std::vector<double>> per_query;
  std::vector<double> mean;
  std::vector<std::string> zero_relevant;   // scored 0, flagged
  std::vector<std::string> run_only;        // in run but unjudged; excluded
  std::vector<std::string> missing_in_run;  // judged but not retrieved; scored 0
};

// DCG with gain(g)/log2(i+1); ideal ranking from the query's full judgment
// list sorted descending. Queries without relevant entities score 0.
NdcgResult ndcg_eval(const RankedRun& run, const Qrels& qrels,
                     const NdcgOptions& options = {});

// Core single-list form used by ndcg_eval and directly testable against a
// permutation oracle: grades in retrieved order vs. all judged grades.
double ndcg_single(std::span<const int> ranked_grades,
                   std::vector<int> all_grades, uint32_t k,
                   bool exponential_gain = false);

// Fraction of unordered vector pairs with cosine >= tau. M < 2 is an error.
double coherence(const std::vector<std::span<const float>>& vectors, double tau);

struct CoherenceRow {
  std::string query_id;
  uint32_t num_relevant = 0;  // M after dropping vectorless entities
  double co = 0.0;
};

struct CoherenceReport {
  double tau = 0.7;
  uint32_t min_rel = 10;
  std::vector<CoherenceRow> rows;
  double mean_co = 0.0;
  uint64_t missing_vectors_dropped = 0;
  std::vector<std::string> excluded_queries;  // fell below min_rel
};

// Per-query coherence over the vectors of grade >= 1 entities. Entities
// without vectors are dropped (counted); queries below min_rel after drops
// are excluded.
CoherenceReport coherence_report(const Qrels& qrels, const EmbeddingSpace& space,
                                 double tau, uint32_t min_rel,
                                 const std::string& entity_prefix = "");

void save_ndcg_report(const NdcgResult& result, const std::string& path);
void save_coherence_report(const CoherenceReport& report,
                           const std::string& path);

struct SignificanceReport {
  std::string run_a, run_b;
  std::vector<uint32_t> cutoffs;
  std::vector<TTestResult> tests;  // parallel to cutoffs
};

// Paired two-sided t-test over the shared qrels query set, one test per
// cutoff.
SignificanceReport significance(const NdcgResult& a, const NdcgResult& b,
                                const std::string& tag_a,
                                const std::string& tag_b);
void save_significance_report(const SignificanceReport& report,
                              const std::string& path, double alpha = 0.05);

}  // namespace kgrank
