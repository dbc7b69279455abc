#pragma once

#include <string>
#include <unordered_map>
#include <vector>

#include "kgrank/common.hpp"

namespace kgrank {

struct RunEntry {
  std::string entity;
  double score = 0.0;
  uint32_t rank = 0;
};

// Per-query ranked entity lists. Invariants enforced on load: ranks are
// 1..n contiguous, scores non-increasing with rank, (query, entity) unique.
struct RankedRun {
  std::string tag;
  std::vector<std::string> query_order;  // first-appearance order
  std::unordered_map<std::string, std::vector<RunEntry>> per_query;
};

// TREC 6-column format: query_id Q0 entity_id rank score tag. Scores are
// printed with 6 significant digits; write -> read -> write is byte-stable.
RankedRun load_run(const std::string& path);
void save_run(const RankedRun& run, const std::string& path);

struct Qrels {
  std::vector<std::string> query_order;
  // File-order entries per query (kept for byte-stable round trips).
  std::unordered_map<std::string, std::vector<std::pair<std::string, int>>>
      entries;
  std::unordered_map<std::string, std::unordered_map<std::string, int>> lookup;

  int grade(const std::string& query, const std::string& entity) const {
    auto q = lookup.find(query);
    if (q == lookup.end()) return 0;
    auto e = q->second.find(entity);
    return e == q->second.end() ? 0 : e->second;
  }
};

// `query_id 0 entity_id grade` with grades in {0, 1, 2}.
Qrels load_qrels(const std::string& path);
void save_qrels(const Qrels& qrels, const std::string& path);

}  // namespace kgrank
