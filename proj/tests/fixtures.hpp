#pragma once

// Synthetic fixtures shared by the unit tests and the acceptance suite.

#include <array>
#include <string>
#include <vector>

#include "kgrank/annotations.hpp"
#include "kgrank/joint.hpp"
#include "kgrank/complex_kge.hpp"
#include "kgrank/kg.hpp"
#include "kgrank/run_file.hpp"

namespace fixtures {

struct SplitGraph {
  kgrank::KnowledgeGraph train;
  std::vector<kgrank::Triple> held_out;  // ids resolve in train vocabularies
  kgrank::KnownTriples filter;           // train + held-out
};

// Two mirrored families over five relations; 50 training triples. The ten
// held-out triples are reverse directions of symmetric relations whose
// symmetry is evidenced elsewhere in training.
inline SplitGraph kinship_toy() {
  using kgrank::Triple;
  SplitGraph g;
  auto& kg = g.train;

  std::vector<std::string> train_lines;
  std::vector<std::array<std::string, 3>> held;
  for (const char* fam_name : {"a", "b"}) {
    const std::string fam(fam_name);
    auto id = [&](const char* who) { return std::string(who) + "_" + fam; };
    auto t = [&](const std::string& h, const char* r, const std::string& tl) {
      train_lines.push_back(h + "\t" + r + "\t" + tl);
    };
    t(id("gp"), "married", id("gm"));
    t(id("dad"), "married", id("mom"));
    t(id("uncle"), "married", id("aunt"));
    t(id("aunt"), "married", id("uncle"));

    t(id("dad"), "sibling_of", id("uncle"));
    t(id("kid1"), "sibling_of", id("kid2"));
    t(id("kid2"), "sibling_of", id("kid1"));
    t(id("kid2"), "sibling_of", id("kid3"));
    t(id("kid3"), "sibling_of", id("kid1"));
    t(id("kid1"), "sibling_of", id("kid3"));
    t(id("cousin1"), "sibling_of", id("cousin2"));

    t(id("gp"), "parent_of", id("dad"));
    t(id("gm"), "parent_of", id("dad"));
    t(id("dad"), "parent_of", id("kid1"));
    t(id("dad"), "parent_of", id("kid2"));
    t(id("mom"), "parent_of", id("kid2"));
    t(id("mom"), "parent_of", id("kid3"));
    t(id("uncle"), "parent_of", id("cousin1"));
    t(id("aunt"), "parent_of", id("cousin2"));

    t(id("gp"), "member_of", id("family"));
    t(id("gm"), "member_of", id("family"));
    t(id("mom"), "member_of", id("family"));
    t(id("kid1"), "member_of", id("family"));
    t(id("cousin2"), "member_of", id("family"));

    t(id("family"), "located_in", id("town"));

    held.push_back({id("gm"), "married", id("gp")});
    held.push_back({id("mom"), "married", id("dad")});
    held.push_back({id("uncle"), "sibling_of", id("dad")});
    held.push_back({id("kid3"), "sibling_of", id("kid2")});
    held.push_back({id("cousin2"), "sibling_of", id("cousin1")});
  }

  for (const std::string& line : train_lines) {
    auto f = kgrank::split(line, '\t');
    kg.edges.push_back({kg.entities.intern(f[0]), kg.relations.intern(f[1]),
                        kg.entities.intern(f[2])});
  }
  kg.rebuild_adjacency();

  for (const auto& [h, r, tl] : held) {
    g.held_out.push_back({kg.entities.intern(h), *kg.relations.find(r),
                          kg.entities.intern(tl)});
  }
  g.filter.add_all(kg.edges);
  g.filter.add_all(g.held_out);
  return g;
}

// 20 (a_i, r, b_i) pairs with no reverse edges; used for the anti-symmetry
// margin check.
inline kgrank::KnowledgeGraph antisymmetric_toy(int pairs = 20) {
  kgrank::KnowledgeGraph kg;
  uint32_t r = kg.relations.intern("r");
  for (int i = 0; i < pairs; ++i) {
    uint32_t a = kg.entities.intern("a" + std::to_string(i));
    uint32_t b = kg.entities.intern("b" + std::to_string(i));
    kg.edges.push_back({a, r, b});
  }
  kg.rebuild_adjacency();
  return kg;
}

// Synthetic wiki with planted topic clusters. Every entity gets its own
// distinct anchor-context words (so word context alone cannot group a
// cluster), while the link graph is a clique within each cluster.
struct SyntheticWiki {
  std::string docs;     // one document per line
  std::string links;    // entity<TAB>entity
  std::string anchors;  // doc<TAB>offset<TAB>entity
  std::string qrels;    // one query per cluster, members relevant
  std::vector<std::vector<std::string>> clusters;
};

inline SyntheticWiki synthetic_wiki(int n_clusters = 4, int cluster_size = 6,
                                    int docs_per_entity = 6, int link_dup = 3) {
  SyntheticWiki w;
  int doc_id = 0;
  for (int c = 0; c < n_clusters; ++c) {
    std::vector<std::string> members;
    for (int e = 0; e < cluster_size; ++e) {
      members.push_back("E" + std::to_string(c) + "_" + std::to_string(e));
    }
    w.clusters.push_back(members);

    // Duplicated clique lines weight the link stream against the anchor
    // noise (links are a multigraph).
    for (int rep = 0; rep < link_dup; ++rep) {
      for (int i = 0; i < cluster_size; ++i) {
        for (int j = 0; j < cluster_size; ++j) {
          if (i != j) w.links += members[i] + "\t" + members[j] + "\n";
        }
      }
    }

    for (int e = 0; e < cluster_size; ++e) {
      // Per-document private words: nothing ties cluster members together
      // at the word level.
      for (int d = 0; d < docs_per_entity; ++d) {
        std::string base = "w" + std::to_string(c) + "_" + std::to_string(e) +
                           "_" + std::to_string(d);
        w.docs += base + "a " + base + "b MENTION " + base + "c " + base + "d\n";
        w.anchors += std::to_string(doc_id) + "\t2\t" + members[e] + "\n";
        ++doc_id;
      }
    }

    for (const auto& m : members) {
      w.qrels += "topic" + std::to_string(c) + " 0 " + m + " 1\n";
    }
  }
  return w;
}

// Joint-trainer settings under which the planted clusters separate at the
// tau = 0.7 threshold (checked across seeds).
inline kgrank::JointConfig wiki_joint_config(bool use_link_graph,
                                             uint64_t seed = 42) {
  kgrank::JointConfig cfg;
  cfg.sgns.dimension = 16;
  cfg.sgns.window = 2;
  cfg.sgns.epochs = 40;
  cfg.sgns.learning_rate = 0.05f;
  cfg.sgns.seed = seed;
  cfg.use_link_graph = use_link_graph;
  return cfg;
}

// A retrieval collection where relevant entities are embedding-nearest by
// construction: clusters are densely linked internally, queries are
// annotated with a cluster hub, and the baseline buries the relevant
// cluster at the bottom of each ranking.
struct SyntheticCollection {
  std::string triples;      // cluster-local edges
  std::string run;          // baseline: relevant entities ranked last
  std::string qrels;        // cluster members relevant to their query
  std::string annotations;  // JSON: query -> hub entity, confidence 1
};

inline SyntheticCollection synthetic_collection(int n_clusters = 10,
                                                int cluster_size = 20,
                                                int judged_per_query = 40) {
  SyntheticCollection c;
  auto name = [](int cl, int e) {
    return "ent" + std::to_string(cl) + "_" + std::to_string(e);
  };
  for (int cl = 0; cl < n_clusters; ++cl) {
    for (int e = 0; e < cluster_size; ++e) {
      // ring plus two chords keeps every entity well connected
      c.triples += name(cl, e) + "\trel\t" + name(cl, (e + 1) % cluster_size) + "\n";
      c.triples += name(cl, e) + "\trel\t" + name(cl, (e + 3) % cluster_size) + "\n";
      c.triples += name(cl, e) + "\trel\t" + name(cl, (e + 7) % cluster_size) + "\n";
    }
  }

  c.annotations = "[";
  for (int cl = 0; cl < n_clusters; ++cl) {
    std::string qid = "q" + std::to_string(cl);
    // Baseline run: the other clusters' entities first, own cluster last.
    int rank = 1;
    double score = 1000.0;
    auto add_run_line = [&](const std::string& entity) {
      c.run += qid + " Q0 " + entity + " " + std::to_string(rank) + " " +
               kgrank::format_g(score, 6) + " base\n";
      ++rank;
      score -= 1.0;
    };
    int other = (cl + 1) % n_clusters;
    int another = (cl + 2) % n_clusters;
    for (int e = 0; e < cluster_size; ++e) add_run_line(name(other, e));
    for (int e = 0; e < cluster_size; ++e) add_run_line(name(another, e));
    for (int e = 0; e < cluster_size; ++e) add_run_line(name(cl, e));

    // Judgments: own cluster relevant (hub highly relevant), a slice of the
    // distractors judged 0.
    c.qrels += qid + " 0 " + name(cl, 0) + " 2\n";
    for (int e = 1; e < cluster_size; ++e) {
      c.qrels += qid + " 0 " + name(cl, e) + " 1\n";
    }
    for (int e = 0; e < judged_per_query - cluster_size; ++e) {
      c.qrels += qid + " 0 " + name(other, e % cluster_size) + " 0\n";
    }

    if (cl) c.annotations += ",";
    c.annotations += "{\"query_id\":\"" + qid +
                     "\",\"interpretations\":[[{\"entity\":\"" + name(cl, 0) +
                     "\",\"confidence\":1.0}]]}";
  }
  c.annotations += "]\n";
  return c;
}

}  // namespace fixtures
