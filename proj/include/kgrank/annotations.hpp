#pragma once

#include <string>
#include <unordered_map>
#include <vector>

#include "kgrank/common.hpp"

namespace kgrank {

struct LinkedEntity {
  std::string entity;
  std::string mention;       // optional, empty when absent
  double confidence = 1.0;   // s(e_q) in [0, 1]
};

// One self-consistent reading of a query: a set of linked entities with
// unique ids.
struct Interpretation {
  std::vector<LinkedEntity> entities;
};

struct QueryAnnotations {
  std::string query_id;
  std::string query_text;  // optional
  std::vector<Interpretation> interpretations;
};

struct AnnotationDiagnostics {
  uint64_t empty_interpretations_dropped = 0;
};

// JSON schema:
//   [{"query_id": str, "query": str?, "interpretations":
//       [[{"entity": str, "mention": str?, "confidence": float}]]}]
std::vector<QueryAnnotations> load_annotations(
    const std::string& path, AnnotationDiagnostics* diag = nullptr);
void save_annotations(const std::vector<QueryAnnotations>& annotations,
                      const std::string& path);

// Collapses annotations for the same query into one interpretation holding
// the entity union; duplicated entities keep their maximum confidence.
QueryAnnotations union_annotations(const std::vector<QueryAnnotations>& sources);

std::unordered_map<std::string, const QueryAnnotations*> index_annotations(
    const std::vector<QueryAnnotations>& annotations);

}  // namespace kgrank
