#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "kgrank/common.hpp"
#include "kgrank/embedding.hpp"

namespace kgrank {

struct Triple {
  uint32_t head;
  uint32_t relation;
  uint32_t tail;
  bool operator==(const Triple&) const = default;
};

enum class TripleFormat { tsv, ntriples_lite };

struct LoadDiagnostics {
  uint64_t total_lines = 0;
  uint64_t comment_lines = 0;
  uint64_t malformed_lines = 0;
  uint64_t literal_tails_dropped = 0;
  uint64_t duplicate_edges_dropped = 0;
  uint64_t valid_triples = 0;
};

struct RedirectDiagnostics {
  uint64_t pairs = 0;
  uint64_t self_dropped = 0;
  uint64_t duplicate_sources = 0;
  uint64_t cycles_broken = 0;
  uint64_t dangling_targets = 0;
  uint64_t edges_rewritten = 0;
  uint64_t entities_merged = 0;
};

// Directed labeled multigraph. Immutable once built; safe to share
// read-only across workers.
struct KnowledgeGraph {
  Vocab entities;
  Vocab relations;
  std::vector<Triple> edges;
  // (relation, tail) lists indexed by head entity; rebuilt from `edges`.
  std::vector<std::vector<std::pair<uint32_t, uint32_t>>> out_adjacency;
  // Compressed old-id -> canonical-id map left behind by resolve_redirects.
  std::unordered_map<std::string, std::string> redirects;

  void rebuild_adjacency();
  uint32_t out_degree(uint32_t entity) const {
    return static_cast<uint32_t>(out_adjacency[entity].size());
  }
  // Follows the (already compressed) redirect map; identity for canonical ids.
  std::string canonical(const std::string& id) const {
    auto it = redirects.find(id);
    return it == redirects.end() ? id : it->second;
  }
};

// Reads `head<TAB>relation<TAB>tail` lines (tsv) or `<h> <r> <t> .` lines
// (ntriples-lite). '#'-prefixed lines are comments. Literal-valued tails in
// ntriples-lite are dropped and counted. Zero valid triples is a hard error.
KnowledgeGraph load_triples(const std::string& path, TripleFormat format,
                            bool dedup = false, LoadDiagnostics* diag = nullptr);

void save_triples(const KnowledgeGraph& kg, const std::string& path);

std::vector<std::pair<std::string, std::string>> load_redirect_pairs(
    const std::string& path);

// Path-compresses the redirect pairs (cycles broken by keeping the
// lexicographically smallest member as canonical), rewrites every edge
// endpoint, and rebuilds the vocabulary so no non-canonical id survives.
KnowledgeGraph resolve_redirects(
    const KnowledgeGraph& kg,
    const std::vector<std::pair<std::string, std::string>>& pairs,
    RedirectDiagnostics* diag = nullptr);

struct MissingEntityReport {
  std::vector<std::string> no_page;  // assessed, absent from the graph
  std::vector<std::string> no_emb;   // in the graph, absent from the space
};

MissingEntityReport missing_entities(const KnowledgeGraph& kg,
                                     const EmbeddingSpace& space,
                                     const std::vector<std::string>& assessed);

// CSV with columns bucket,entity_id.
void save_missing_report(const MissingEntityReport& report,
                         const std::string& path);

// One id per line; '#' comments and blank lines skipped.
std::vector<std::string> load_entity_list(const std::string& path);

}  // namespace kgrank
