#include "kgrank/walks.hpp"

namespace kgrank {

WalkCorpus generate_walks(const KnowledgeGraph& kg, const WalkConfig& cfg) {
  if (cfg.depth < 1) throw ValidationError("walk depth must be >= 1");
  if (cfg.walks_per_entity < 1) throw ValidationError("walks_per_entity must be >= 1");
  if (kg.entities.empty()) throw ValidationError("empty knowledge graph");

  WalkCorpus corpus;
  // Entity tokens first (aligned with graph indices), relation tokens after.
  for (uint32_t i = 0; i < kg.entities.size(); ++i) {
    corpus.tokens.intern(kg.entities.name(i));
  }
  std::vector<uint32_t> relation_token(kg.relations.size());
  if (cfg.include_relations) {
    for (uint32_t i = 0; i < kg.relations.size(); ++i) {
      relation_token[i] = corpus.tokens.intern(kg.relations.name(i));
    }
  }

  for (uint32_t start = 0; start < kg.entities.size(); ++start) {
    if (kg.out_degree(start) == 0) {
      if (cfg.emit_singletons) corpus.sequences.push_back({start});
      continue;
    }
    Rng rng(mix_seed(cfg.seed, start));
    for (uint32_t w = 0; w < cfg.walks_per_entity; ++w) {
      std::vector<uint32_t> walk;
      walk.reserve(cfg.include_relations ? 2 * cfg.depth + 1 : cfg.depth + 1);
      walk.push_back(start);
      uint32_t current = start;
      for (uint32_t hop = 0; hop < cfg.depth; ++hop) {
        const auto& out = kg.out_adjacency[current];
        if (out.empty()) break;  // dead end truncates the walk
        const auto& [rel, tail] = out[rng.next_index(out.size())];
        if (cfg.include_relations) walk.push_back(relation_token[rel]);
        walk.push_back(tail);
        current = tail;
      }
      corpus.sequences.push_back(std::move(walk));
    }
  }
  return corpus;
}

void save_corpus(const WalkCorpus& corpus, const std::string& path) {
  std::ofstream out = open_output(path);
  for (const auto& seq : corpus.sequences) {
    for (size_t i = 0; i < seq.size(); ++i) {
      const std::string& tok = corpus.tokens.name(seq[i]);
      if (contains_whitespace(tok)) {
        throw ValidationError("token contains whitespace, not exportable: '" +
                              tok + "'");
      }
      if (i) out << ' ';
      out << tok;
    }
    out << '\n';
  }
  if (!out) throw IoError("write failed: " + path);
}

WalkCorpus load_corpus(const std::string& path) {
  std::ifstream in = open_input(path);
  WalkCorpus corpus;
  std::string line;
  while (std::getline(in, line)) {
    std::string_view sv = strip_cr(line);
    if (sv.empty()) continue;
    auto toks = split_ws(sv);
    std::vector<uint32_t> seq;
    seq.reserve(toks.size());
    for (auto t : toks) seq.push_back(corpus.tokens.intern(t));
    corpus.sequences.push_back(std::move(seq));
  }
  if (corpus.sequences.empty()) {
    throw ValidationError("corpus is empty: " + path);
  }
  return corpus;
}

}  // namespace kgrank
