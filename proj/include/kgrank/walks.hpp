#pragma once

#include <string>
#include <vector>

#include "kgrank/common.hpp"
#include "kgrank/kg.hpp"

namespace kgrank {

struct WalkConfig {
  uint32_t depth = 4;             // hop iterations
  uint32_t walks_per_entity = 100;
  uint64_t seed = 42;
  bool include_relations = true;
  // Isolated entities still emit a single [entity] sequence, so every
  // entity ends up with a vector.
  bool emit_singletons = true;
};

// Token sequences plus their vocabulary. Doubles as the generic skip-gram
// corpus type: load_corpus() reads any one-sentence-per-line text file.
struct WalkCorpus {
  Vocab tokens;
  std::vector<std::vector<uint32_t>> sequences;

  uint64_t token_count() const {
    uint64_t n = 0;
    for (const auto& s : sequences) n += s.size();
    return n;
  }
};

// Random outgoing-edge expansion from every entity. Each start entity draws
// from its own seed stream, so sharding the entity set across workers cannot
// change the output.
WalkCorpus generate_walks(const KnowledgeGraph& kg, const WalkConfig& cfg);

// One walk per line, space-separated token strings.
void save_corpus(const WalkCorpus& corpus, const std::string& path);
WalkCorpus load_corpus(const std::string& path);

}  // namespace kgrank
