#include <doctest.h>

#include <algorithm>
#include <set>

#include "kgrank/kg.hpp"
#include "testutil.hpp"

using namespace kgrank;
using testutil::TempDir;
using testutil::write_file;

namespace {

std::multiset<std::string> edge_strings(const KnowledgeGraph& kg) {
  std::multiset<std::string> out;
  for (const Triple& t : kg.edges) {
    out.insert(kg.entities.name(t.head) + "|" + kg.relations.name(t.relation) +
               "|" + kg.entities.name(t.tail));
  }
  return out;
}

KnowledgeGraph random_graph(uint64_t seed, uint32_t n_entities,
                            uint32_t n_relations, uint32_t n_edges) {
  TempDir dir;
  Rng rng(seed);
  std::string tsv;
  for (uint32_t i = 0; i < n_edges; ++i) {
    tsv += "e" + std::to_string(rng.next_index(n_entities)) + "\tr" +
           std::to_string(rng.next_index(n_relations)) + "\te" +
           std::to_string(rng.next_index(n_entities)) + "\n";
  }
  write_file(dir.file("g.tsv"), tsv);
  return load_triples(dir.file("g.tsv"), TripleFormat::tsv);
}

}  // namespace

TEST_CASE("load_triples counts vocabularies and edges") {
  TempDir dir;
  write_file(dir.file("g.tsv"), "a\tp\tb\nb\tp\tc\na\tq\tc\n");
  LoadDiagnostics diag;
  KnowledgeGraph kg = load_triples(dir.file("g.tsv"), TripleFormat::tsv, false, &diag);
  CHECK(kg.entities.size() == 3);
  CHECK(kg.relations.size() == 2);
  CHECK(kg.edges.size() == 3);
  CHECK(diag.valid_triples == 3);
  CHECK(diag.malformed_lines == 0);
}

TEST_CASE("load_triples rejects an empty file") {
  TempDir dir;
  write_file(dir.file("empty.tsv"), "");
  CHECK_THROWS_AS(load_triples(dir.file("empty.tsv"), TripleFormat::tsv),
                  ValidationError);
}

TEST_CASE("load_triples skips malformed lines and reports them") {
  TempDir dir;
  write_file(dir.file("g.tsv"), "a\tp\tb\nbroken line\nb\tp\tc\nc\tp\ta\n");
  LoadDiagnostics diag;
  KnowledgeGraph kg = load_triples(dir.file("g.tsv"), TripleFormat::tsv, false, &diag);
  CHECK(kg.edges.size() == 3);
  CHECK(diag.malformed_lines == 1);
}

TEST_CASE("load_triples handles comments, blank lines, CRLF") {
  TempDir dir;
  write_file(dir.file("g.tsv"), "# header\n\na\tp\tb\r\nb\tp\tc\n");
  LoadDiagnostics diag;
  KnowledgeGraph kg = load_triples(dir.file("g.tsv"), TripleFormat::tsv, false, &diag);
  CHECK(kg.edges.size() == 2);
  CHECK(diag.comment_lines == 1);
}

TEST_CASE("ntriples-lite strips brackets and drops literal tails") {
  TempDir dir;
  write_file(dir.file("g.nt"),
             "<http://x/A> <http://x/p> <http://x/B> .\n"
             "<http://x/A> <http://x/name> \"Alpha\" .\n"
             "<http://x/B> <http://x/p> <http://x/C> .\n");
  LoadDiagnostics diag;
  KnowledgeGraph kg =
      load_triples(dir.file("g.nt"), TripleFormat::ntriples_lite, false, &diag);
  CHECK(kg.edges.size() == 2);
  CHECK(diag.literal_tails_dropped == 1);
  CHECK(kg.entities.contains("http://x/A"));
}

TEST_CASE("dedup flag drops repeated edges, multigraph keeps them") {
  TempDir dir;
  write_file(dir.file("g.tsv"), "a\tp\tb\na\tp\tb\na\tp\tb\n");
  KnowledgeGraph multi = load_triples(dir.file("g.tsv"), TripleFormat::tsv);
  CHECK(multi.edges.size() == 3);
  LoadDiagnostics diag;
  KnowledgeGraph dedup =
      load_triples(dir.file("g.tsv"), TripleFormat::tsv, true, &diag);
  CHECK(dedup.edges.size() == 1);
  CHECK(diag.duplicate_edges_dropped == 2);
}

TEST_CASE("interning round-trips every id") {
  KnowledgeGraph kg = random_graph(7, 12, 3, 60);
  for (uint32_t i = 0; i < kg.entities.size(); ++i) {
    CHECK(*kg.entities.find(kg.entities.name(i)) == i);
  }
  for (uint32_t i = 0; i < kg.relations.size(); ++i) {
    CHECK(*kg.relations.find(kg.relations.name(i)) == i);
  }
}

TEST_CASE("out_adjacency matches the edge multiset") {
  KnowledgeGraph kg = random_graph(11, 8, 2, 40);
  size_t total = 0;
  for (uint32_t e = 0; e < kg.entities.size(); ++e) {
    total += kg.out_adjacency[e].size();
    for (auto [r, t] : kg.out_adjacency[e]) {
      CHECK(std::count(kg.edges.begin(), kg.edges.end(), Triple{e, r, t}) > 0);
    }
  }
  CHECK(total == kg.edges.size());
}

TEST_CASE("resolve_redirects rewrites endpoints") {
  TempDir dir;
  write_file(dir.file("g.tsv"), "a\tp\tb\n");
  KnowledgeGraph kg = load_triples(dir.file("g.tsv"), TripleFormat::tsv);
  KnowledgeGraph out = resolve_redirects(kg, {{"b", "c"}});
  CHECK(edge_strings(out) == std::multiset<std::string>{"a|p|c"});
  CHECK_FALSE(out.entities.contains("b"));
}

TEST_CASE("resolve_redirects follows chains transitively") {
  TempDir dir;
  write_file(dir.file("g.tsv"), "a\tp\tb\n");
  KnowledgeGraph kg = load_triples(dir.file("g.tsv"), TripleFormat::tsv);
  KnowledgeGraph out = resolve_redirects(kg, {{"b", "c"}, {"c", "d"}});
  CHECK(edge_strings(out) == std::multiset<std::string>{"a|p|d"});
  CHECK(out.canonical("b") == "d");
  CHECK(out.canonical("c") == "d");
}

TEST_CASE("redirect cycles break to the lexicographically smallest id") {
  TempDir dir;
  write_file(dir.file("g.tsv"), "a\tp\ty\n");
  KnowledgeGraph kg = load_triples(dir.file("g.tsv"), TripleFormat::tsv);
  RedirectDiagnostics diag;
  KnowledgeGraph out = resolve_redirects(kg, {{"x", "y"}, {"y", "x"}}, &diag);
  CHECK(diag.cycles_broken == 1);
  CHECK(out.canonical("y") == "x");
  CHECK(out.canonical("x") == "x");
  CHECK(edge_strings(out) == std::multiset<std::string>{"a|p|x"});
}

TEST_CASE("self-redirects are dropped") {
  TempDir dir;
  write_file(dir.file("g.tsv"), "a\tp\tb\n");
  KnowledgeGraph kg = load_triples(dir.file("g.tsv"), TripleFormat::tsv);
  RedirectDiagnostics diag;
  KnowledgeGraph out = resolve_redirects(kg, {{"b", "b"}}, &diag);
  CHECK(diag.self_dropped == 1);
  CHECK(out.entities.contains("b"));
}

TEST_CASE("resolve_redirects is idempotent and leaves no mapped endpoint") {
  // Random pair lists over a small id universe, including cycles.
  for (uint64_t seed = 1; seed <= 20; ++seed) {
    KnowledgeGraph kg = random_graph(seed, 10, 2, 30);
    Rng rng(seed * 977);
    std::vector<std::pair<std::string, std::string>> pairs;
    for (int i = 0; i < 8; ++i) {
      pairs.emplace_back("e" + std::to_string(rng.next_index(12)),
                         "e" + std::to_string(rng.next_index(12)));
    }
    KnowledgeGraph once = resolve_redirects(kg, pairs);
    KnowledgeGraph twice = resolve_redirects(once, pairs);
    CHECK(edge_strings(once) == edge_strings(twice));
    for (const Triple& t : once.edges) {
      CHECK(once.redirects.count(once.entities.name(t.head)) == 0);
      CHECK(once.redirects.count(once.entities.name(t.tail)) == 0);
    }
  }
}

TEST_CASE("save/load round-trips to an isomorphic graph") {
  TempDir dir;
  for (uint64_t seed : {3u, 14u, 15u}) {
    KnowledgeGraph kg = random_graph(seed, 9, 3, 50);
    save_triples(kg, dir.file("round.tsv"));
    KnowledgeGraph back = load_triples(dir.file("round.tsv"), TripleFormat::tsv);
    CHECK(edge_strings(kg) == edge_strings(back));
  }
}

TEST_CASE("missing_entities buckets assessed ids") {
  TempDir dir;
  write_file(dir.file("g.tsv"), "a\tp\tb\n");
  KnowledgeGraph kg = load_triples(dir.file("g.tsv"), TripleFormat::tsv);

  Vocab v;
  v.intern("a");
  EmbeddingSpace space(v, 4);

  MissingEntityReport report = missing_entities(kg, space, {"a", "b", "z"});
  CHECK(report.no_page == std::vector<std::string>{"z"});
  CHECK(report.no_emb == std::vector<std::string>{"b"});

  MissingEntityReport clean = missing_entities(kg, space, {"a"});
  CHECK(clean.no_page.empty());
  CHECK(clean.no_emb.empty());
}

TEST_CASE("missing report CSV format") {
  TempDir dir;
  MissingEntityReport report;
  report.no_page = {"z"};
  report.no_emb = {"b"};
  save_missing_report(report, dir.file("m.csv"));
  CHECK(testutil::read_file(dir.file("m.csv")) ==
        "bucket,entity_id\nno_page,z\nno_emb,b\n");
}
