#include "kgrank/kg.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <unordered_set>

namespace kgrank {

void KnowledgeGraph::rebuild_adjacency() {
  out_adjacency.assign(entities.size(), {});
  for (const Triple& t : edges) {
    out_adjacency[t.head].emplace_back(t.relation, t.tail);
  }
}

namespace {

// ntriples-lite token: strips <...>; a leading '"' marks a literal.
struct NtToken {
  std::string_view value;
  bool is_literal = false;
};

NtToken parse_nt_token(std::string_view tok) {
  NtToken out;
  if (!tok.empty() && tok.front() == '"') {
    out.is_literal = true;
    out.value = tok;
    return out;
  }
  if (tok.size() >= 2 && tok.front() == '<' && tok.back() == '>') {
    out.value = tok.substr(1, tok.size() - 2);
  } else {
    out.value = tok;
  }
  return out;
}

}  // namespace

KnowledgeGraph load_triples(const std::string& path, TripleFormat format,
                            bool dedup, LoadDiagnostics* diag) {
  std::ifstream in = open_input(path);
  KnowledgeGraph kg;
  LoadDiagnostics local;
  LoadDiagnostics& d = diag ? *diag : local;
  d = {};

  std::unordered_set<uint64_t> seen;  // dedup key: head<<42 ^ rel<<21 ^ tail limits scale
  auto edge_key = [](const Triple& t) {
    return (static_cast<uint64_t>(t.head) << 42) ^
           (static_cast<uint64_t>(t.relation) << 21) ^ t.tail;
  };

  std::string line;
  while (std::getline(in, line)) {
    ++d.total_lines;
    std::string_view sv = strip_cr(line);
    if (sv.empty()) continue;
    if (sv.front() == '#') {
      ++d.comment_lines;
      continue;
    }

    std::string_view h, r, t;
    bool literal_tail = false;
    if (format == TripleFormat::tsv) {
      auto fields = split(sv, '\t');
      if (fields.size() != 3 || fields[0].empty() || fields[1].empty() ||
          fields[2].empty()) {
        ++d.malformed_lines;
        continue;
      }
      h = fields[0];
      r = fields[1];
      t = fields[2];
    } else {
      auto toks = split_ws(sv);
      if (!toks.empty() && toks.back() == ".") toks.pop_back();
      if (toks.size() != 3) {
        ++d.malformed_lines;
        continue;
      }
      NtToken ht = parse_nt_token(toks[0]);
      NtToken rt = parse_nt_token(toks[1]);
      NtToken tt = parse_nt_token(toks[2]);
      if (ht.is_literal || rt.is_literal || ht.value.empty() ||
          rt.value.empty() || tt.value.empty()) {
        ++d.malformed_lines;
        continue;
      }
      literal_tail = tt.is_literal;
      h = ht.value;
      r = rt.value;
      t = tt.value;
    }

    if (literal_tail) {
      // Entity-graph mode keeps only entity-valued objects.
      ++d.literal_tails_dropped;
      continue;
    }

    Triple triple{kg.entities.intern(h), kg.relations.intern(r),
                  kg.entities.intern(t)};
    if (dedup && !seen.insert(edge_key(triple)).second) {
      ++d.duplicate_edges_dropped;
      continue;
    }
    kg.edges.push_back(triple);
    ++d.valid_triples;
  }

  if (kg.edges.empty()) {
    throw ValidationError("no valid triples in " + path);
  }
  kg.rebuild_adjacency();
  return kg;
}

void save_triples(const KnowledgeGraph& kg, const std::string& path) {
  std::ofstream out = open_output(path);
  for (const Triple& t : kg.edges) {
    out << kg.entities.name(t.head) << '\t' << kg.relations.name(t.relation)
        << '\t' << kg.entities.name(t.tail) << '\n';
  }
  if (!out) throw IoError("write failed: " + path);
}

std::vector<std::pair<std::string, std::string>> load_redirect_pairs(
    const std::string& path) {
  std::ifstream in = open_input(path);
  std::vector<std::pair<std::string, std::string>> pairs;
  std::string line;
  uint64_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view sv = strip_cr(line);
    if (sv.empty() || sv.front() == '#') continue;
    auto fields = split(sv, '\t');
    if (fields.size() != 2 || fields[0].empty() || fields[1].empty()) {
      throw ValidationError("redirects " + path + " line " +
                            std::to_string(lineno) + ": expected from<TAB>to");
    }
    pairs.emplace_back(std::string(fields[0]), std::string(fields[1]));
  }
  return pairs;
}

KnowledgeGraph resolve_redirects(
    const KnowledgeGraph& kg,
    const std::vector<std::pair<std::string, std::string>>& pairs,
    RedirectDiagnostics* diag) {
  RedirectDiagnostics local;
  RedirectDiagnostics& d = diag ? *diag : local;
  d = {};
  d.pairs = pairs.size();

  // First mapping wins for duplicated sources; keeps resolution total.
  std::map<std::string, std::string> raw;
  for (const auto& [from, to] : pairs) {
    if (from == to) {
      ++d.self_dropped;
      continue;
    }
    if (!raw.emplace(from, to).second) ++d.duplicate_sources;
  }

  std::unordered_map<std::string, std::string> resolved;
  for (const auto& [source, _] : raw) {
    if (resolved.count(source)) continue;
    std::vector<std::string> path;
    std::unordered_map<std::string, size_t> on_path;
    std::string cur = source;
    std::string target;
    while (true) {
      auto hit = resolved.find(cur);
      if (hit != resolved.end()) {
        target = hit->second;
        break;
      }
      auto pos = on_path.find(cur);
      if (pos != on_path.end()) {
        // Cycle: canonical is the lexicographically smallest member.
        target = *std::min_element(path.begin() + pos->second, path.end());
        ++d.cycles_broken;
        break;
      }
      auto next = raw.find(cur);
      if (next == raw.end()) {
        target = cur;  // terminal
        break;
      }
      on_path.emplace(cur, path.size());
      path.push_back(cur);
      cur = next->second;
    }
    for (const std::string& node : path) {
      if (node != target) resolved[node] = target;
    }
  }

  for (const auto& [_, target] : resolved) {
    if (!kg.entities.contains(target)) ++d.dangling_targets;
  }

  auto canonical = [&](const std::string& name) -> const std::string& {
    auto it = resolved.find(name);
    return it == resolved.end() ? name : it->second;
  };

  KnowledgeGraph out;
  out.relations = kg.relations;
  out.redirects = resolved;
  // Entity order preserved; merged ids collapse onto their canonical row.
  for (uint32_t i = 0; i < kg.entities.size(); ++i) {
    out.entities.intern(canonical(kg.entities.name(i)));
  }
  out.edges.reserve(kg.edges.size());
  for (const Triple& t : kg.edges) {
    const std::string& h = canonical(kg.entities.name(t.head));
    const std::string& tl = canonical(kg.entities.name(t.tail));
    Triple nt{*out.entities.find(h), t.relation, *out.entities.find(tl)};
    if (h != kg.entities.name(t.head) || tl != kg.entities.name(t.tail)) {
      ++d.edges_rewritten;
    }
    out.edges.push_back(nt);
  }
  d.entities_merged = kg.entities.size() - out.entities.size();
  out.rebuild_adjacency();
  return out;
}

MissingEntityReport missing_entities(const KnowledgeGraph& kg,
                                     const EmbeddingSpace& space,
                                     const std::vector<std::string>& assessed) {
  MissingEntityReport report;
  std::unordered_set<std::string> seen;
  for (const std::string& id : assessed) {
    if (!seen.insert(id).second) continue;
    if (!kg.entities.contains(id)) {
      report.no_page.push_back(id);
    } else if (!space.find(id)) {
      report.no_emb.push_back(id);
    }
  }
  return report;
}

void save_missing_report(const MissingEntityReport& report,
                         const std::string& path) {
  std::ofstream out = open_output(path);
  out << "bucket,entity_id\n";
  for (const auto& id : report.no_page) out << "no_page," << csv_field(id) << '\n';
  for (const auto& id : report.no_emb) out << "no_emb," << csv_field(id) << '\n';
  if (!out) throw IoError("write failed: " + path);
}

std::vector<std::string> load_entity_list(const std::string& path) {
  std::ifstream in = open_input(path);
  std::vector<std::string> ids;
  std::string line;
  while (std::getline(in, line)) {
    std::string_view sv = strip_cr(line);
    if (sv.empty() || sv.front() == '#') continue;
    ids.emplace_back(sv);
  }
  return ids;
}

}  // namespace kgrank
