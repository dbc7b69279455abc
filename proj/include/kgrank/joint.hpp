#pragma once

#include <string>
#include <vector>

#include "kgrank/embedding.hpp"
#include "kgrank/sgns.hpp"

namespace kgrank {

struct JointAnchor {
  uint32_t entity;
  std::vector<uint32_t> context;  // word ids within +-c of the anchor token
};

struct JointCorpusDiagnostics {
  uint64_t anchor_records = 0;
  uint64_t anchors_skipped = 0;      // span outside document bounds
  uint64_t self_links_dropped = 0;
  uint64_t disambiguation_links_dropped = 0;
  uint64_t disambiguation_anchors_dropped = 0;
  uint64_t word_pairs = 0;
  uint64_t entity_pairs = 0;  // directed pairs as read (before mirroring)
  uint64_t anchor_pairs = 0;
};

// Word documents, entity link graph, and anchor occurrences over two
// disjoint namespaces.
struct JointCorpus {
  Vocab words;
  Vocab entities;
  std::vector<std::vector<uint32_t>> docs;
  std::vector<std::pair<uint32_t, uint32_t>> links;  // (entity, linked entity)
  std::vector<JointAnchor> anchors;
};

// docs: plain text, one document per line, whitespace-tokenized; documents
// are addressed by 0-based line index. links: entity<TAB>linked_entity.
// anchors: doc_id<TAB>token_offset<TAB>entity. Either of links/anchors may
// be an empty path.
//
// Entities named in `disambiguations` are kept by default; with
// include_disambiguations=false their links and anchors are filtered out of
// the corpus (counted in the diagnostics).
JointCorpus build_joint_corpus(const std::string& docs_path,
                               const std::string& links_path,
                               const std::string& anchors_path,
                               uint32_t window,
                               JointCorpusDiagnostics* diag = nullptr,
                               const std::vector<std::string>& disambiguations = {},
                               bool include_disambiguations = true);

struct JointConfig {
  SgnsConfig sgns;  // dimension, window, negatives, epochs, lr, seed
  bool use_link_graph = true;   // false drops the entity-pair stream entirely
  bool symmetric_links = true;  // also train the reversed pair
};

struct JointEpochLoss {
  uint32_t epoch = 0;
  double word_loss = 0.0;
  double entity_loss = 0.0;
  double anchor_loss = 0.0;
  uint64_t word_pairs = 0;
  uint64_t entity_pairs = 0;
  uint64_t anchor_pairs = 0;
  double total() const { return word_loss + entity_loss + anchor_loss; }
};

// One shared vector table over words followed by entities.
struct JointSpace {
  static constexpr const char* kEntityPrefix = "ENTITY/";

  Vocab words;
  Vocab entities;
  uint32_t dim = 0;
  std::vector<float> input;   // (|W| + |E|) x dim
  std::vector<float> output;

  size_t rows() const { return static_cast<size_t>(words.size()) + entities.size(); }
  std::span<const float> word_vec(uint32_t i) const {
    return {input.data() + static_cast<size_t>(i) * dim, dim};
  }
  std::span<const float> entity_vec(uint32_t i) const {
    return {input.data() + (static_cast<size_t>(words.size()) + i) * dim, dim};
  }
};

// Deterministic initialization, exposed so ablations can be compared
// against untouched rows.
JointSpace init_joint_space(const JointCorpus& corpus, const SgnsConfig& cfg);

// Trains the three pair streams (word-word, entity-entity, entity-word)
// interleaved proportionally to their sizes. Reported losses satisfy
// total = word + entity + anchor by construction.
JointSpace train_joint(const JointCorpus& corpus, const JointConfig& cfg,
                       std::vector<JointEpochLoss>* loss_log = nullptr);

// word2vec text with entity rows prefixed ENTITY/.
void save_joint_space(const JointSpace& space, const std::string& path);

}  // namespace kgrank
