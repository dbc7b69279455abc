#pragma once

#include <vector>

#include "kgrank/annotations.hpp"

namespace kgrank {

// Interpretation- and entity-level precision/recall, combined into lean
// scores. All values lie in [0, 1].
struct LeanScores {
  double p_int = 0.0;
  double r_int = 0.0;
  double p_ent = 0.0;
  double r_ent = 0.0;
  double p_lean = 0.0;
  double r_lean = 0.0;
  double f_lean = 0.0;  // harmonic mean of p_lean/r_lean, 0 when both are 0
};

// Interpretation intersection counts interpretations whose entity-id sets
// are exactly equal; duplicate interpretations collapse (set semantics).
// Empty-vs-empty cases score 1 on both sides. Mentions and confidences are
// ignored. Throws on mismatched query ids.
LeanScores lean_eval(const QueryAnnotations& system,
                     const QueryAnnotations& gold);

struct MacroLeanScores {
  // Arithmetic mean of every field; f_lean is the mean of per-query F.
  LeanScores mean;
  // F recomputed from the averaged p_lean/r_lean (second convention).
  double f_lean_of_means = 0.0;
  size_t queries = 0;
};

MacroLeanScores macro_average(const std::vector<LeanScores>& per_query);

}  // namespace kgrank
