#include <doctest.h>

#include <map>

#include "kgrank/walks.hpp"
#include "testutil.hpp"

using namespace kgrank;
using testutil::TempDir;
using testutil::write_file;

namespace {

KnowledgeGraph graph_from(const std::string& tsv) {
  TempDir dir;
  write_file(dir.file("g.tsv"), tsv);
  return load_triples(dir.file("g.tsv"), TripleFormat::tsv);
}

std::vector<std::string> tokens_of(const WalkCorpus& c,
                                   const std::vector<uint32_t>& seq) {
  std::vector<std::string> out;
  for (uint32_t t : seq) out.push_back(c.tokens.name(t));
  return out;
}

}  // namespace

TEST_CASE("chain walk is forced") {
  KnowledgeGraph kg = graph_from("a\tp\tb\nb\tp\tc\n");
  WalkConfig cfg;
  cfg.depth = 2;
  cfg.walks_per_entity = 1;
  WalkCorpus corpus = generate_walks(kg, cfg);
  // starts: a (full), b (truncates at c), c (isolated singleton)
  REQUIRE(corpus.sequences.size() == 3);
  CHECK(tokens_of(corpus, corpus.sequences[0]) ==
        std::vector<std::string>{"a", "p", "b", "p", "c"});
  CHECK(tokens_of(corpus, corpus.sequences[1]) ==
        std::vector<std::string>{"b", "p", "c"});
  CHECK(tokens_of(corpus, corpus.sequences[2]) == std::vector<std::string>{"c"});
}

TEST_CASE("isolated entity emits a singleton, or nothing when disabled") {
  KnowledgeGraph kg = graph_from("a\tp\tb\n");
  WalkConfig cfg;
  cfg.depth = 3;
  cfg.walks_per_entity = 2;
  WalkCorpus corpus = generate_walks(kg, cfg);
  // a: 2 walks, b: singleton
  CHECK(corpus.sequences.size() == 3);
  CHECK(tokens_of(corpus, corpus.sequences.back()) ==
        std::vector<std::string>{"b"});

  cfg.emit_singletons = false;
  WalkCorpus trimmed = generate_walks(kg, cfg);
  CHECK(trimmed.sequences.size() == 2);
}

TEST_CASE("star graph children appear with binomial concentration") {
  KnowledgeGraph kg = graph_from("a\tp\tb\na\tp\tc\na\tp\td\n");
  WalkConfig cfg;
  cfg.depth = 1;
  cfg.walks_per_entity = 300;
  cfg.seed = 42;
  WalkCorpus corpus = generate_walks(kg, cfg);

  std::map<std::string, int> second_entity;
  for (const auto& seq : corpus.sequences) {
    if (seq.size() == 3) ++second_entity[corpus.tokens.name(seq[2])];
  }
  CHECK(second_entity.size() == 3);
  for (const auto& [name, count] : second_entity) {
    CAPTURE(name);
    CHECK(count >= 75);
    CHECK(count <= 125);
  }
}

TEST_CASE("walks are deterministic under a fixed seed") {
  KnowledgeGraph kg =
      graph_from("a\tp\tb\nb\tp\tc\nc\tp\ta\na\tq\tc\nb\tq\ta\n");
  WalkConfig cfg;
  cfg.depth = 4;
  cfg.walks_per_entity = 50;
  cfg.seed = 9;
  WalkCorpus c1 = generate_walks(kg, cfg);
  WalkCorpus c2 = generate_walks(kg, cfg);
  REQUIRE(c1.sequences.size() == c2.sequences.size());
  CHECK(c1.sequences == c2.sequences);

  cfg.seed = 10;
  WalkCorpus c3 = generate_walks(kg, cfg);
  CHECK(c1.sequences != c3.sequences);
}

TEST_CASE("every consecutive hop of a walk is a graph edge") {
  KnowledgeGraph kg =
      graph_from("a\tp\tb\nb\tp\tc\nc\tq\ta\nc\tq\tb\na\tq\tc\n");
  WalkConfig cfg;
  cfg.depth = 5;
  cfg.walks_per_entity = 40;
  WalkCorpus corpus = generate_walks(kg, cfg);
  for (const auto& seq : corpus.sequences) {
    for (size_t i = 0; i + 2 < seq.size(); i += 2) {
      std::string h = corpus.tokens.name(seq[i]);
      std::string r = corpus.tokens.name(seq[i + 1]);
      std::string t = corpus.tokens.name(seq[i + 2]);
      Triple edge{*kg.entities.find(h), *kg.relations.find(r),
                  *kg.entities.find(t)};
      bool found = false;
      for (const Triple& e : kg.edges) found = found || e == edge;
      CHECK(found);
    }
  }
}

TEST_CASE("walk count follows the out-degree formula") {
  KnowledgeGraph kg = graph_from("a\tp\tb\nb\tp\tc\nd\tp\ta\n");
  // out-degree >= 1: a, b, d; isolated: c
  WalkConfig cfg;
  cfg.depth = 2;
  cfg.walks_per_entity = 7;
  WalkCorpus corpus = generate_walks(kg, cfg);
  CHECK(corpus.sequences.size() == 3 * 7 + 1);
}

TEST_CASE("relation tokens can be omitted") {
  KnowledgeGraph kg = graph_from("a\tp\tb\nb\tp\tc\n");
  WalkConfig cfg;
  cfg.depth = 2;
  cfg.walks_per_entity = 1;
  cfg.include_relations = false;
  WalkCorpus corpus = generate_walks(kg, cfg);
  CHECK(tokens_of(corpus, corpus.sequences[0]) ==
        std::vector<std::string>{"a", "b", "c"});
}

TEST_CASE("corpus file round-trip") {
  TempDir dir;
  KnowledgeGraph kg = graph_from("a\tp\tb\nb\tq\tc\n");
  WalkConfig cfg;
  cfg.depth = 3;
  cfg.walks_per_entity = 5;
  WalkCorpus corpus = generate_walks(kg, cfg);
  save_corpus(corpus, dir.file("walks.txt"));
  WalkCorpus loaded = load_corpus(dir.file("walks.txt"));
  save_corpus(loaded, dir.file("walks2.txt"));
  CHECK(testutil::read_file(dir.file("walks.txt")) ==
        testutil::read_file(dir.file("walks2.txt")));
}
