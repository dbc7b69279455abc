// kgrank: knowledge-graph embedding training and entity re-ranking toolkit.
//
// Exit codes: 0 success, 1 validation failure (bad data or contradictory
// config), 2 I/O or usage failure. Logs go to stderr; data goes to files.

#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "kgrank/annotations.hpp"
#include "kgrank/complex_kge.hpp"
#include "kgrank/eval.hpp"
#include "kgrank/joint.hpp"
#include "kgrank/kg.hpp"
#include "kgrank/lean.hpp"
#include "kgrank/rerank.hpp"
#include "kgrank/run_file.hpp"
#include "kgrank/sgns.hpp"
#include "kgrank/walks.hpp"

namespace fs = std::filesystem;
using namespace kgrank;

namespace {

std::vector<double> parse_double_list(const std::string& s) {
  std::vector<double> out;
  for (auto part : split(s, ',')) {
    if (part.empty()) continue;
    out.push_back(std::stod(std::string(part)));
  }
  return out;
}

std::vector<uint32_t> parse_uint_list(const std::string& s) {
  std::vector<uint32_t> out;
  for (auto part : split(s, ',')) {
    if (part.empty()) continue;
    out.push_back(static_cast<uint32_t>(std::stoul(std::string(part))));
  }
  return out;
}

TripleFormat parse_format(const std::string& s) {
  if (s == "tsv") return TripleFormat::tsv;
  if (s == "ntriples-lite") return TripleFormat::ntriples_lite;
  throw ValidationError("unknown triple format: " + s);
}

struct IngestArgs {
  std::string triples, format = "tsv", redirects, out_dir, assessed, embeddings;
  bool dedup = false;
};

void run_ingest(const IngestArgs& args) {
  LoadDiagnostics load_diag;
  KnowledgeGraph kg =
      load_triples(args.triples, parse_format(args.format), args.dedup, &load_diag);
  std::fprintf(stderr,
               "ingest: lines=%llu comments=%llu malformed=%llu "
               "literal_tails=%llu duplicates=%llu\n",
               (unsigned long long)load_diag.total_lines,
               (unsigned long long)load_diag.comment_lines,
               (unsigned long long)load_diag.malformed_lines,
               (unsigned long long)load_diag.literal_tails_dropped,
               (unsigned long long)load_diag.duplicate_edges_dropped);

  if (!args.redirects.empty()) {
    RedirectDiagnostics rd;
    kg = resolve_redirects(kg, load_redirect_pairs(args.redirects), &rd);
    std::fprintf(stderr,
                 "redirects: pairs=%llu self=%llu dup_sources=%llu "
                 "cycles=%llu dangling=%llu rewritten_edges=%llu merged=%llu\n",
                 (unsigned long long)rd.pairs, (unsigned long long)rd.self_dropped,
                 (unsigned long long)rd.duplicate_sources,
                 (unsigned long long)rd.cycles_broken,
                 (unsigned long long)rd.dangling_targets,
                 (unsigned long long)rd.edges_rewritten,
                 (unsigned long long)rd.entities_merged);
  }

  std::error_code ec;
  fs::create_directories(args.out_dir, ec);
  if (ec) throw IoError("cannot create output directory: " + args.out_dir);

  save_triples(kg, (fs::path(args.out_dir) / "triples.tsv").string());
  {
    std::ofstream out =
        open_output((fs::path(args.out_dir) / "redirects.tsv").string());
    std::vector<std::pair<std::string, std::string>> sorted(kg.redirects.begin(),
                                                            kg.redirects.end());
    std::sort(sorted.begin(), sorted.end());
    for (const auto& [from, to] : sorted) out << from << '\t' << to << '\n';
  }

  if (!args.assessed.empty()) {
    std::vector<std::string> assessed = load_entity_list(args.assessed);
    for (std::string& id : assessed) id = kg.canonical(id);
    EmbeddingSpace space;
    if (!args.embeddings.empty()) space = load_word2vec_text(args.embeddings);
    MissingEntityReport report = missing_entities(kg, space, assessed);
    save_missing_report(report,
                        (fs::path(args.out_dir) / "missing.csv").string());
    std::fprintf(stderr, "missing: assessed=%zu no_page=%zu no_emb=%zu\n",
                 assessed.size(), report.no_page.size(), report.no_emb.size());
  }

  std::fprintf(stderr, "graph: entities=%u relations=%u edges=%zu\n",
               kg.entities.size(), kg.relations.size(), kg.edges.size());
}

struct TrainCommonArgs {
  uint32_t dim = 200, epochs = 5, negatives = 5;
  double lr = 0.025;
  std::string out;
};

struct SgnsArgs {
  TrainCommonArgs common;
  std::string corpus, graph, graph_format = "tsv";
  uint32_t walk_depth = 4, walks = 100;
  bool no_relations = false, no_singletons = false, emit_walks = false;
  uint32_t window = 5, min_count = 0;
  double subsample = 0.0;
  bool full_softmax = false;
};

void write_sgns_losses(const std::vector<EpochLoss>& log,
                       const std::string& path) {
  std::ofstream out = open_output(path);
  out << "epoch,mean_loss,pairs\n";
  for (const auto& e : log) {
    out << e.epoch << ',' << format_g(e.mean_loss, 9) << ',' << e.pairs << '\n';
  }
}

void run_train_sgns(const SgnsArgs& args, uint64_t seed, uint32_t workers) {
  if (args.corpus.empty() == args.graph.empty()) {
    throw ValidationError("train sgns needs exactly one of --corpus or --graph");
  }
  WalkCorpus corpus;
  if (!args.graph.empty()) {
    KnowledgeGraph kg =
        load_triples(args.graph, parse_format(args.graph_format));
    WalkConfig wc;
    wc.depth = args.walk_depth;
    wc.walks_per_entity = args.walks;
    wc.seed = seed;
    wc.include_relations = !args.no_relations;
    wc.emit_singletons = !args.no_singletons;
    corpus = generate_walks(kg, wc);
    std::fprintf(stderr, "walks: sequences=%zu tokens=%llu\n",
                 corpus.sequences.size(),
                 (unsigned long long)corpus.token_count());
    if (args.emit_walks) save_corpus(corpus, args.common.out + ".walks.txt");
  } else {
    corpus = load_corpus(args.corpus);
  }

  SgnsConfig cfg;
  cfg.dimension = args.common.dim;
  cfg.window = args.window;
  cfg.negatives = args.common.negatives;
  cfg.epochs = args.common.epochs;
  cfg.learning_rate = static_cast<float>(args.common.lr);
  cfg.min_count = args.min_count;
  cfg.subsample_threshold = args.subsample;
  cfg.seed = seed;
  cfg.workers = workers;
  cfg.full_softmax = args.full_softmax;

  std::vector<EpochLoss> log;
  EmbeddingSpace space = train_skipgram(corpus, cfg, &log);
  for (const auto& e : log) {
    std::fprintf(stderr, "epoch %u: loss=%.6f pairs=%llu\n", e.epoch,
                 e.mean_loss, (unsigned long long)e.pairs);
  }
  save_word2vec_text(space, args.common.out + ".w2v");
  write_sgns_losses(log, args.common.out + ".losses.csv");
}

struct JointArgs {
  TrainCommonArgs common;
  std::string docs, links, anchors, disambiguations;
  uint32_t window = 5, min_count = 0;
  double subsample = 0.0;
  bool no_link_graph = false, no_symmetric_links = false;
  bool exclude_disambiguations = false;
};

void run_train_joint(const JointArgs& args, uint64_t seed, uint32_t workers) {
  std::vector<std::string> disambiguations;
  if (!args.disambiguations.empty()) {
    disambiguations = load_entity_list(args.disambiguations);
  }
  JointCorpusDiagnostics cd;
  JointCorpus corpus =
      build_joint_corpus(args.docs, args.links, args.anchors, args.window, &cd,
                         disambiguations, !args.exclude_disambiguations);
  std::fprintf(stderr,
               "joint corpus: docs=%zu words=%u entities=%u word_pairs=%llu "
               "links=%zu anchor_pairs=%llu anchors_skipped=%llu "
               "self_links_dropped=%llu\n",
               corpus.docs.size(), corpus.words.size(), corpus.entities.size(),
               (unsigned long long)cd.word_pairs, corpus.links.size(),
               (unsigned long long)cd.anchor_pairs,
               (unsigned long long)cd.anchors_skipped,
               (unsigned long long)cd.self_links_dropped);
  if (args.exclude_disambiguations) {
    std::fprintf(stderr,
                 "disambiguations excluded: links=%llu anchors=%llu\n",
                 (unsigned long long)cd.disambiguation_links_dropped,
                 (unsigned long long)cd.disambiguation_anchors_dropped);
  }

  JointConfig cfg;
  cfg.sgns.dimension = args.common.dim;
  cfg.sgns.window = args.window;
  cfg.sgns.negatives = args.common.negatives;
  cfg.sgns.epochs = args.common.epochs;
  cfg.sgns.learning_rate = static_cast<float>(args.common.lr);
  cfg.sgns.min_count = args.min_count;
  cfg.sgns.subsample_threshold = args.subsample;
  cfg.sgns.seed = seed;
  cfg.sgns.workers = workers;
  cfg.use_link_graph = !args.no_link_graph;
  cfg.symmetric_links = !args.no_symmetric_links;

  std::vector<JointEpochLoss> log;
  JointSpace space = train_joint(corpus, cfg, &log);
  {
    std::ofstream out = open_output(args.common.out + ".losses.csv");
    out << "epoch,word_loss,entity_loss,anchor_loss,total_loss,"
           "word_pairs,entity_pairs,anchor_pairs\n";
    for (const auto& e : log) {
      out << e.epoch << ',' << format_g(e.word_loss, 9) << ','
          << format_g(e.entity_loss, 9) << ',' << format_g(e.anchor_loss, 9)
          << ',' << format_g(e.total(), 9) << ',' << e.word_pairs << ','
          << e.entity_pairs << ',' << e.anchor_pairs << '\n';
    }
  }
  for (const auto& e : log) {
    std::fprintf(stderr, "epoch %u: total=%.6f (w=%.4f e=%.4f a=%.4f)\n",
                 e.epoch, e.total(), e.word_loss, e.entity_loss, e.anchor_loss);
  }
  save_joint_space(space, args.common.out + ".w2v");
}

struct ComplexArgs {
  TrainCommonArgs common;  // dim/epochs/negatives/lr reused
  std::string graph, graph_format = "tsv";
  uint32_t batch_size = 8, holdout = 0;
  double l2 = 0.0;
};

void run_train_complex(const ComplexArgs& args, uint64_t seed) {
  KnowledgeGraph kg = load_triples(args.graph, parse_format(args.graph_format));
  if (args.holdout >= kg.edges.size()) {
    throw ValidationError("--holdout must be smaller than the edge count");
  }

  std::vector<Triple> train = kg.edges;
  std::vector<Triple> test;
  if (args.holdout > 0) {
    Rng rng(mix_seed(seed, 0x401d017ULL));
    for (uint32_t i = 0; i < args.holdout; ++i) {
      size_t pick = rng.next_index(train.size());
      test.push_back(train[pick]);
      train.erase(train.begin() + static_cast<ptrdiff_t>(pick));
    }
  }
  KnowledgeGraph train_kg = kg;
  train_kg.edges = train;
  train_kg.rebuild_adjacency();

  ComplexConfig cfg;
  cfg.dimension = args.common.dim;
  cfg.epochs = args.common.epochs;
  cfg.batch_size = args.batch_size;
  cfg.negatives_per_positive = args.common.negatives;
  cfg.learning_rate = static_cast<float>(args.common.lr);
  cfg.l2_weight = static_cast<float>(args.l2);
  cfg.seed = seed;

  std::vector<ComplexEpochLoss> log;
  ComplexEmbeddingSpace space = train_complex(train_kg, cfg, &log);
  {
    std::ofstream out = open_output(args.common.out + ".losses.csv");
    out << "epoch,mean_loss,samples\n";
    for (const auto& e : log) {
      out << e.epoch << ',' << format_g(e.mean_loss, 9) << ',' << e.samples
          << '\n';
    }
  }
  if (!log.empty()) {
    std::fprintf(stderr, "complex: epochs=%zu first_loss=%.6f last_loss=%.6f\n",
                 log.size(), log.front().mean_loss, log.back().mean_loss);
  }

  KnownTriples filter;
  filter.add_all(kg.edges);  // train + held-out
  const std::vector<Triple>& eval_set = test.empty() ? train : test;
  std::vector<RankResult> ranks;
  LinkPredictionSummary summary =
      evaluate_link_prediction(space, eval_set, filter, &ranks);
  {
    std::ofstream out = open_output(args.common.out + ".ranks.csv");
    out << "head,relation,tail,raw_rank,filtered_rank\n";
    for (const RankResult& r : ranks) {
      out << csv_field(kg.entities.name(r.triple.head)) << ','
          << csv_field(kg.relations.name(r.triple.relation)) << ','
          << csv_field(kg.entities.name(r.triple.tail)) << ',' << r.raw_rank
          << ',' << r.filtered_rank << '\n';
    }
  }
  std::fprintf(stderr,
               "link prediction (%s, %zu queries): mrr_filtered=%.4f "
               "mrr_raw=%.4f hits@1=%.4f hits@10=%.4f\n",
               test.empty() ? "train triples" : "held-out", summary.queries,
               summary.mrr_filtered, summary.mrr_raw, summary.hits_at_1,
               summary.hits_at_10);

  save_complex_space(space, args.common.out);
}

struct RerankArgs {
  std::string run, annotations, embeddings, entity_prefix, tag, out;
  double lambda = 0.5;
  std::string norm = "minmax", missing = "zero";
  size_t depth = 0;
  std::string sweep, qrels, sweep_out;
};

RerankConfig make_rerank_config(const RerankArgs& args) {
  RerankConfig cfg;
  cfg.lambda = args.lambda;
  if (args.norm == "minmax") {
    cfg.norm = BaselineNorm::minmax;
  } else if (args.norm == "none") {
    cfg.norm = BaselineNorm::none;
  } else {
    throw ValidationError("--norm must be minmax or none");
  }
  if (args.missing == "zero") {
    cfg.missing = MissingPolicy::zero_contribution;
  } else if (args.missing == "skip") {
    cfg.missing = MissingPolicy::skip_entity;
  } else {
    throw ValidationError("--missing must be zero or skip");
  }
  cfg.depth = args.depth;
  cfg.entity_prefix = args.entity_prefix;
  cfg.tag = args.tag;
  return cfg;
}

void run_rerank(const RerankArgs& args) {
  if (args.out.empty() && args.sweep.empty()) {
    throw ValidationError("rerank needs --out and/or --lambda-sweep");
  }
  RankedRun baseline = load_run(args.run);
  std::vector<QueryAnnotations> annotations = load_annotations(args.annotations);
  EmbeddingSpace space = load_word2vec_text(args.embeddings);
  RerankConfig cfg = make_rerank_config(args);

  if (!args.out.empty()) {
    RerankDiagnostics diag;
    RankedRun reranked = rerank_run(baseline, annotations, space, cfg, &diag);
    save_run(reranked, args.out);
    std::fprintf(stderr,
                 "rerank: lambda=%g queries=%zu no_annotations=%llu "
                 "stray_annotations=%llu missing_candidates=%llu "
                 "missing_linked=%llu\n",
                 cfg.lambda, baseline.query_order.size(),
                 (unsigned long long)diag.queries_without_annotations,
                 (unsigned long long)diag.annotations_without_query,
                 (unsigned long long)diag.candidates_missing_vector,
                 (unsigned long long)diag.linked_missing_vector);
  }

  if (!args.sweep.empty()) {
    if (args.qrels.empty() || args.sweep_out.empty()) {
      throw ValidationError("--lambda-sweep needs --qrels and --sweep-out");
    }
    Qrels qrels = load_qrels(args.qrels);
    std::vector<double> grid = parse_double_list(args.sweep);
    auto rows = sweep_lambda(baseline, annotations, space, qrels, grid, cfg);
    save_lambda_sweep(rows, args.sweep_out);
    for (const auto& row : rows) {
      std::fprintf(stderr, "lambda=%g ndcg@10=%.4f ndcg@100=%.4f%s\n",
                   row.lambda, row.mean_ndcg10, row.mean_ndcg100,
                   row.best ? " (best)" : "");
    }
  }
}

struct EvalArgs {
  std::string run, qrels, k = "10,100", out, compare, sig_out;
  bool exp_gain = false;
};

void run_eval(const EvalArgs& args) {
  RankedRun run = load_run(args.run);
  Qrels qrels = load_qrels(args.qrels);
  NdcgOptions opts;
  opts.cutoffs = parse_uint_list(args.k);
  opts.exponential_gain = args.exp_gain;
  NdcgResult result = ndcg_eval(run, qrels, opts);
  save_ndcg_report(result, args.out);
  std::fprintf(stderr,
               "eval: queries=%zu zero_relevant=%zu run_only=%zu "
               "missing_in_run=%zu\n",
               result.query_ids.size(), result.zero_relevant.size(),
               result.run_only.size(), result.missing_in_run.size());
  for (size_t c = 0; c < opts.cutoffs.size(); ++c) {
    std::fprintf(stderr, "mean ndcg@%u = %.4f\n", opts.cutoffs[c],
                 result.mean[c]);
  }

  if (!args.compare.empty()) {
    if (args.sig_out.empty()) {
      throw ValidationError("--compare needs --sig-out");
    }
    RankedRun other = load_run(args.compare);
    NdcgResult other_result = ndcg_eval(other, qrels, opts);
    SignificanceReport report =
        significance(result, other_result, run.tag, other.tag);
    save_significance_report(report, args.sig_out);
    for (size_t c = 0; c < report.cutoffs.size(); ++c) {
      std::fprintf(stderr, "ndcg@%u: t=%.4f p=%.6f\n", report.cutoffs[c],
                   report.tests[c].t, report.tests[c].p);
    }
  }
}

struct LeanArgs {
  std::string system, gold, out;
};

void run_lean(const LeanArgs& args) {
  AnnotationDiagnostics sys_diag, gold_diag;
  std::vector<QueryAnnotations> system = load_annotations(args.system, &sys_diag);
  std::vector<QueryAnnotations> gold = load_annotations(args.gold, &gold_diag);
  auto sys_index = index_annotations(system);
  auto gold_index = index_annotations(gold);

  // Union of query ids: a side without the query contributes the empty
  // annotation, which is exactly what the empty/non-empty cases cover.
  std::vector<std::string> queries;
  for (const auto& qa : gold) queries.push_back(qa.query_id);
  for (const auto& qa : system) {
    if (!gold_index.count(qa.query_id)) queries.push_back(qa.query_id);
  }

  std::ofstream out = open_output(args.out);
  out << "query_id,p_int,r_int,p_ent,r_ent,p_lean,r_lean,f_lean\n";
  std::vector<LeanScores> all;
  for (const auto& query : queries) {
    QueryAnnotations empty_sys, empty_gold;
    empty_sys.query_id = query;
    empty_gold.query_id = query;
    auto s = sys_index.find(query);
    auto g = gold_index.find(query);
    LeanScores scores =
        lean_eval(s == sys_index.end() ? empty_sys : *s->second,
                  g == gold_index.end() ? empty_gold : *g->second);
    all.push_back(scores);
    out << csv_field(query) << ',' << format_g(scores.p_int, 6) << ','
        << format_g(scores.r_int, 6) << ',' << format_g(scores.p_ent, 6) << ','
        << format_g(scores.r_ent, 6) << ',' << format_g(scores.p_lean, 6)
        << ',' << format_g(scores.r_lean, 6) << ','
        << format_g(scores.f_lean, 6) << '\n';
  }
  MacroLeanScores macro = macro_average(all);
  out << "ALL," << format_g(macro.mean.p_int, 6) << ','
      << format_g(macro.mean.r_int, 6) << ',' << format_g(macro.mean.p_ent, 6)
      << ',' << format_g(macro.mean.r_ent, 6) << ','
      << format_g(macro.mean.p_lean, 6) << ',' << format_g(macro.mean.r_lean, 6)
      << ',' << format_g(macro.mean.f_lean, 6) << '\n';
  out << "ALL_f_of_mean_pr,,,,,,," << format_g(macro.f_lean_of_means, 6) << '\n';
  std::fprintf(stderr,
               "lean: queries=%zu P_lean=%.4f R_lean=%.4f F(mean)=%.4f "
               "F(of means)=%.4f\n",
               macro.queries, macro.mean.p_lean, macro.mean.r_lean,
               macro.mean.f_lean, macro.f_lean_of_means);
}

struct CoherenceArgs {
  std::string qrels, embeddings, entity_prefix, out;
  double tau = 0.7;
  uint32_t min_rel = 10;
};

void run_coherence(const CoherenceArgs& args) {
  Qrels qrels = load_qrels(args.qrels);
  EmbeddingSpace space = load_word2vec_text(args.embeddings);
  CoherenceReport report = coherence_report(qrels, space, args.tau,
                                            args.min_rel, args.entity_prefix);
  save_coherence_report(report, args.out);
  std::fprintf(stderr,
               "coherence: tau=%g min_rel=%u queries=%zu excluded=%zu "
               "missing_vectors=%llu mean=%.4f\n",
               report.tau, report.min_rel, report.rows.size(),
               report.excluded_queries.size(),
               (unsigned long long)report.missing_vectors_dropped,
               report.mean_co);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"kgrank: graph embedding training and entity re-ranking"};
  app.require_subcommand(1);
  app.set_config("--config", "", "key=value file; command-line flags win");

  uint64_t seed = 42;
  uint32_t workers = 1;
  app.add_option("--seed", seed, "seed for every stochastic step")
      ->capture_default_str();
  app.add_option("--workers", workers, "trainer worker threads")
      ->capture_default_str();

  IngestArgs ingest;
  auto* cmd_ingest = app.add_subcommand(
      "ingest", "load triples, resolve redirects, report missing entities");
  cmd_ingest->add_option("--triples", ingest.triples, "triple file")->required();
  cmd_ingest->add_option("--format", ingest.format, "tsv | ntriples-lite")
      ->capture_default_str();
  cmd_ingest->add_option("--redirects", ingest.redirects, "from<TAB>to file");
  cmd_ingest->add_flag("--dedup", ingest.dedup, "drop duplicate edges");
  cmd_ingest->add_option("--out", ingest.out_dir, "output directory")->required();
  cmd_ingest->add_option("--assessed", ingest.assessed,
                         "assessed entity id list for the missing report");
  cmd_ingest->add_option("--embeddings", ingest.embeddings,
                         "word2vec text file for the no-emb bucket");

  auto* cmd_train = app.add_subcommand("train", "train an embedding family");
  cmd_train->require_subcommand(1);

  SgnsArgs sgns;
  auto* cmd_sgns = cmd_train->add_subcommand(
      "sgns", "skip-gram with negative sampling over walks or text");
  cmd_sgns->add_option("--corpus", sgns.corpus, "token corpus, one walk per line");
  cmd_sgns->add_option("--graph", sgns.graph, "triple file to walk");
  cmd_sgns->add_option("--graph-format", sgns.graph_format, "tsv | ntriples-lite")
      ->capture_default_str();
  cmd_sgns->add_option("--walk-depth", sgns.walk_depth, "hops per walk")
      ->capture_default_str();
  cmd_sgns->add_option("--walks", sgns.walks, "walks per entity")
      ->capture_default_str();
  cmd_sgns->add_flag("--no-relations", sgns.no_relations,
                     "omit relation tokens from walks");
  cmd_sgns->add_flag("--no-singletons", sgns.no_singletons,
                     "skip isolated entities");
  cmd_sgns->add_flag("--emit-walks", sgns.emit_walks,
                     "also write <out>.walks.txt");
  cmd_sgns->add_option("--dim", sgns.common.dim, "vector dimension")
      ->capture_default_str();
  cmd_sgns->add_option("--window", sgns.window, "context window")
      ->capture_default_str();
  cmd_sgns->add_option("--negatives", sgns.common.negatives,
                       "noise samples per pair")
      ->capture_default_str();
  cmd_sgns->add_option("--epochs", sgns.common.epochs, "training epochs")
      ->capture_default_str();
  cmd_sgns->add_option("--lr", sgns.common.lr, "initial learning rate")
      ->capture_default_str();
  cmd_sgns->add_option("--min-count", sgns.min_count, "vocabulary floor")
      ->capture_default_str();
  cmd_sgns->add_option("--subsample", sgns.subsample,
                       "subsampling threshold, 0 disables")
      ->capture_default_str();
  cmd_sgns->add_flag("--full-softmax", sgns.full_softmax,
                     "literal softmax objective (tiny vocabularies)");
  cmd_sgns->add_option("--out", sgns.common.out, "output prefix")->required();

  JointArgs joint;
  auto* cmd_joint = cmd_train->add_subcommand(
      "joint", "joint word/entity space from docs, links, and anchors");
  cmd_joint->add_option("--docs", joint.docs, "one document per line")
      ->required();
  cmd_joint->add_option("--links", joint.links, "entity<TAB>linked_entity");
  cmd_joint->add_option("--anchors", joint.anchors,
                        "doc_id<TAB>token_offset<TAB>entity");
  cmd_joint->add_option("--disambiguations", joint.disambiguations,
                        "disambiguation-page id list");
  cmd_joint->add_flag("--exclude-disambiguations", joint.exclude_disambiguations,
                      "filter disambiguation pages out of the corpus");
  cmd_joint->add_option("--window", joint.window, "context window")
      ->capture_default_str();
  cmd_joint->add_flag("--no-link-graph", joint.no_link_graph,
                      "ablation: drop the entity-entity component");
  cmd_joint->add_flag("--no-symmetric-links", joint.no_symmetric_links,
                      "train links in the written direction only");
  cmd_joint->add_option("--dim", joint.common.dim, "vector dimension")
      ->capture_default_str();
  cmd_joint->add_option("--negatives", joint.common.negatives,
                        "noise samples per pair")
      ->capture_default_str();
  cmd_joint->add_option("--epochs", joint.common.epochs, "training epochs")
      ->capture_default_str();
  cmd_joint->add_option("--lr", joint.common.lr, "initial learning rate")
      ->capture_default_str();
  cmd_joint->add_option("--min-count", joint.min_count,
                        "drop rare words from the streams")
      ->capture_default_str();
  cmd_joint->add_option("--subsample", joint.subsample,
                        "subsampling threshold, 0 disables")
      ->capture_default_str();
  cmd_joint->add_option("--out", joint.common.out, "output prefix")->required();

  ComplexArgs complex_args;
  complex_args.common.dim = 100;
  complex_args.common.epochs = 100;
  complex_args.common.negatives = 6;
  complex_args.common.lr = 0.2;
  auto* cmd_complex = cmd_train->add_subcommand(
      "complex", "complex bilinear embeddings over triples");
  cmd_complex->add_option("--graph", complex_args.graph, "triple file")
      ->required();
  cmd_complex
      ->add_option("--graph-format", complex_args.graph_format,
                   "tsv | ntriples-lite")
      ->capture_default_str();
  cmd_complex->add_option("--dim", complex_args.common.dim, "complex dimension")
      ->capture_default_str();
  cmd_complex->add_option("--epochs", complex_args.common.epochs,
                          "training epochs")
      ->capture_default_str();
  cmd_complex->add_option("--batch-size", complex_args.batch_size, "batch size")
      ->capture_default_str();
  cmd_complex->add_option("--negatives", complex_args.common.negatives,
                          "corrupted samples per positive")
      ->capture_default_str();
  cmd_complex->add_option("--lr", complex_args.common.lr, "learning rate")
      ->capture_default_str();
  cmd_complex->add_option("--l2", complex_args.l2, "L2 weight on touched rows")
      ->capture_default_str();
  cmd_complex->add_option("--holdout", complex_args.holdout,
                          "held-out triples for link-prediction MRR")
      ->capture_default_str();
  cmd_complex->add_option("--out", complex_args.common.out, "output prefix")
      ->required();

  RerankArgs rerank_args;
  auto* cmd_rerank = app.add_subcommand(
      "rerank", "re-score a baseline run by annotation similarity");
  cmd_rerank->add_option("--run", rerank_args.run, "TREC run file")->required();
  cmd_rerank
      ->add_option("--annotations", rerank_args.annotations, "annotations JSON")
      ->required();
  cmd_rerank
      ->add_option("--embeddings", rerank_args.embeddings, "word2vec text file")
      ->required();
  cmd_rerank->add_option("--entity-prefix", rerank_args.entity_prefix,
                         "vector lookup prefix, e.g. ENTITY/");
  cmd_rerank->add_option("--lambda", rerank_args.lambda,
                         "interpolation weight in [0,1]")
      ->capture_default_str();
  cmd_rerank->add_option("--norm", rerank_args.norm, "minmax | none")
      ->capture_default_str();
  cmd_rerank->add_option("--missing", rerank_args.missing, "zero | skip")
      ->capture_default_str();
  cmd_rerank->add_option("--depth", rerank_args.depth,
                         "re-score only the top K baseline entries (0 = all)")
      ->capture_default_str();
  cmd_rerank->add_option("--tag", rerank_args.tag, "output run tag");
  cmd_rerank->add_option("--out", rerank_args.out, "output run file");
  cmd_rerank->add_option("--lambda-sweep", rerank_args.sweep,
                         "comma-separated grid, e.g. 0,0.3,1");
  cmd_rerank->add_option("--qrels", rerank_args.qrels, "qrels for the sweep");
  cmd_rerank->add_option("--sweep-out", rerank_args.sweep_out,
                         "sweep table output CSV");

  EvalArgs eval_args;
  auto* cmd_eval = app.add_subcommand("eval", "NDCG@k plus significance");
  cmd_eval->add_option("--run", eval_args.run, "TREC run file")->required();
  cmd_eval->add_option("--qrels", eval_args.qrels, "qrels file")->required();
  cmd_eval->add_option("--k", eval_args.k, "comma-separated cutoffs")
      ->capture_default_str();
  cmd_eval->add_flag("--exp-gain", eval_args.exp_gain,
                     "gain 2^g - 1 instead of linear");
  cmd_eval->add_option("--out", eval_args.out, "per-query CSV")->required();
  cmd_eval->add_option("--compare", eval_args.compare,
                       "second run for a paired t-test");
  cmd_eval->add_option("--sig-out", eval_args.sig_out,
                       "significance report CSV");

  LeanArgs lean_args;
  auto* cmd_lean = app.add_subcommand("lean", "lean precision/recall");
  cmd_lean->add_option("--system", lean_args.system, "system annotations JSON")
      ->required();
  cmd_lean->add_option("--gold", lean_args.gold, "gold annotations JSON")
      ->required();
  cmd_lean->add_option("--out", lean_args.out, "per-query CSV")->required();

  CoherenceArgs coherence_args;
  auto* cmd_coherence =
      app.add_subcommand("coherence", "per-query relevant-set coherence");
  cmd_coherence->add_option("--qrels", coherence_args.qrels, "qrels file")
      ->required();
  cmd_coherence
      ->add_option("--embeddings", coherence_args.embeddings,
                   "word2vec text file")
      ->required();
  cmd_coherence->add_option("--entity-prefix", coherence_args.entity_prefix,
                            "vector lookup prefix");
  cmd_coherence->add_option("--tau", coherence_args.tau, "similarity threshold")
      ->capture_default_str();
  cmd_coherence->add_option("--min-rel", coherence_args.min_rel,
                            "minimum relevant entities per query")
      ->capture_default_str();
  cmd_coherence->add_option("--out", coherence_args.out, "report CSV")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;  // usage errors count as I/O-level failures
  }

  try {
    if (app.got_subcommand(cmd_ingest)) {
      run_ingest(ingest);
    } else if (app.got_subcommand(cmd_train)) {
      if (cmd_train->got_subcommand(cmd_sgns)) {
        run_train_sgns(sgns, seed, workers);
      } else if (cmd_train->got_subcommand(cmd_joint)) {
        run_train_joint(joint, seed, workers);
      } else {
        run_train_complex(complex_args, seed);
      }
    } else if (app.got_subcommand(cmd_rerank)) {
      run_rerank(rerank_args);
    } else if (app.got_subcommand(cmd_eval)) {
      run_eval(eval_args);
    } else if (app.got_subcommand(cmd_lean)) {
      run_lean(lean_args);
    } else if (app.got_subcommand(cmd_coherence)) {
      run_coherence(coherence_args);
    }
  } catch (const IoError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const ValidationError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
