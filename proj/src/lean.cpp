#include "kgrank/lean.hpp"

#include <set>
#include <string>

namespace kgrank {

namespace {

using EntitySet = std::set<std::string>;

std::set<EntitySet> interpretation_sets(const QueryAnnotations& qa) {
  std::set<EntitySet> sets;
  for (const auto& interp : qa.interpretations) {
    if (interp.entities.empty()) continue;
    EntitySet s;
    for (const auto& e : interp.entities) s.insert(e.entity);
    sets.insert(std::move(s));
  }
  return sets;
}

EntitySet entity_union(const std::set<EntitySet>& sets) {
  EntitySet u;
  for (const auto& s : sets) u.insert(s.begin(), s.end());
  return u;
}

template <typename SetT>
size_t intersection_size(const SetT& a, const SetT& b) {
  size_t n = 0;
  for (const auto& x : a) n += b.count(x);
  return n;
}

// The four-case precision table; recall is the same table with the
// arguments swapped.
double case_precision(size_t overlap, size_t system_size, size_t gold_size) {
  if (system_size > 0) return static_cast<double>(overlap) / system_size;
  return gold_size == 0 ? 1.0 : 0.0;
}

}  // namespace

LeanScores lean_eval(const QueryAnnotations& system,
                     const QueryAnnotations& gold) {
  if (system.query_id != gold.query_id) {
    throw ValidationError("lean_eval: query_id mismatch ('" + system.query_id +
                          "' vs '" + gold.query_id + "')");
  }

  std::set<EntitySet> sys_int = interpretation_sets(system);
  std::set<EntitySet> gold_int = interpretation_sets(gold);
  EntitySet sys_ent = entity_union(sys_int);
  EntitySet gold_ent = entity_union(gold_int);

  size_t int_overlap = intersection_size(sys_int, gold_int);
  size_t ent_overlap = intersection_size(sys_ent, gold_ent);

  LeanScores s;
  s.p_int = case_precision(int_overlap, sys_int.size(), gold_int.size());
  s.r_int = case_precision(int_overlap, gold_int.size(), sys_int.size());
  s.p_ent = case_precision(ent_overlap, sys_ent.size(), gold_ent.size());
  s.r_ent = case_precision(ent_overlap, gold_ent.size(), sys_ent.size());
  s.p_lean = (s.p_int + s.p_ent) / 2.0;
  s.r_lean = (s.r_int + s.r_ent) / 2.0;
  s.f_lean = (s.p_lean + s.r_lean) > 0.0
                 ? 2.0 * s.p_lean * s.r_lean / (s.p_lean + s.r_lean)
                 : 0.0;
  return s;
}

MacroLeanScores macro_average(const std::vector<LeanScores>& per_query) {
  if (per_query.empty()) {
    throw ValidationError("macro_average: empty score list");
  }
  MacroLeanScores macro;
  macro.queries = per_query.size();
  for (const LeanScores& s : per_query) {
    macro.mean.p_int += s.p_int;
    macro.mean.r_int += s.r_int;
    macro.mean.p_ent += s.p_ent;
    macro.mean.r_ent += s.r_ent;
    macro.mean.p_lean += s.p_lean;
    macro.mean.r_lean += s.r_lean;
    macro.mean.f_lean += s.f_lean;
  }
  double n = static_cast<double>(per_query.size());
  macro.mean.p_int /= n;
  macro.mean.r_int /= n;
  macro.mean.p_ent /= n;
  macro.mean.r_ent /= n;
  macro.mean.p_lean /= n;
  macro.mean.r_lean /= n;
  macro.mean.f_lean /= n;
  macro.f_lean_of_means =
      (macro.mean.p_lean + macro.mean.r_lean) > 0.0
          ? 2.0 * macro.mean.p_lean * macro.mean.r_lean /
                (macro.mean.p_lean + macro.mean.r_lean)
          : 0.0;
  return macro;
}

}  // namespace kgrank
