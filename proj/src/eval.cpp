#include "kgrank/eval.hpp"

#include <algorithm>
#include <cmath>

namespace kgrank {

namespace {

double gain(int grade, bool exponential) {
  return exponential ? std::exp2(static_cast<double>(grade)) - 1.0
                     : static_cast<double>(grade);
}

double dcg(std::span<const int> grades, uint32_t k, bool exponential) {
  double sum = 0.0;
  size_t n = std::min<size_t>(k, grades.size());
  for (size_t i = 0; i < n; ++i) {
    sum += gain(grades[i], exponential) / std::log2(static_cast<double>(i) + 2.0);
  }
  return sum;
}

}  // namespace

double ndcg_single(std::span<const int> ranked_grades, std::vector<int> all_grades,
                   uint32_t k, bool exponential_gain) {
  if (k < 1) throw ValidationError("ndcg: k must be >= 1");
  std::sort(all_grades.begin(), all_grades.end(), std::greater<int>());
  double ideal = dcg(all_grades, k, exponential_gain);
  if (ideal == 0.0) return 0.0;
  return dcg(ranked_grades, k, exponential_gain) / ideal;
}

NdcgResult ndcg_eval(const RankedRun& run, const Qrels& qrels,
                     const NdcgOptions& options) {
  if (options.cutoffs.empty()) throw ValidationError("ndcg: no cutoffs given");
  NdcgResult res;
  res.cutoffs = options.cutoffs;
  res.mean.assign(options.cutoffs.size(), 0.0);

  for (const auto& query : run.query_order) {
    if (!qrels.lookup.count(query)) res.run_only.push_back(query);
  }

  for (const auto& query : qrels.query_order) {
    const auto& judgments = qrels.lookup.at(query);
    std::vector<int> all_grades;
    all_grades.reserve(judgments.size());
    bool any_relevant = false;
    for (const auto& [_, g] : judgments) {
      all_grades.push_back(g);
      if (g > 0) any_relevant = true;
    }

    std::vector<int> ranked_grades;
    auto it = run.per_query.find(query);
    if (it == run.per_query.end()) {
      res.missing_in_run.push_back(query);
    } else {
      ranked_grades.reserve(it->second.size());
      for (const RunEntry& e : it->second) {
        ranked_grades.push_back(qrels.grade(query, e.entity));
      }
    }
    if (!any_relevant) res.zero_relevant.push_back(query);

    std::vector<double> values;
    values.reserve(options.cutoffs.size());
    for (size_t c = 0; c < options.cutoffs.size(); ++c) {
      double v = ndcg_single(ranked_grades, all_grades, options.cutoffs[c],
                             options.exponential_gain);
      values.push_back(v);
      res.mean[c] += v;
    }
    res.per_query.emplace(query, std::move(values));
    res.query_ids.push_back(query);
  }

  if (!res.query_ids.empty()) {
    for (double& m : res.mean) m /= static_cast<double>(res.query_ids.size());
  }
  return res;
}

double coherence(const std::vector<std::span<const float>>& vectors, double tau) {
  size_t m = vectors.size();
  if (m < 2) {
    throw ValidationError("coherence: need at least 2 vectors, got " +
                          std::to_string(m));
  }
  uint64_t hits = 0;
  for (size_t i = 0; i < m; ++i) {
    for (size_t j = i + 1; j < m; ++j) {
      if (cosine(vectors[i], vectors[j]) >= tau) ++hits;
    }
  }
  return static_cast<double>(hits) /
         (static_cast<double>(m) * (m - 1) / 2.0);
}

CoherenceReport coherence_report(const Qrels& qrels, const EmbeddingSpace& space,
                                 double tau, uint32_t min_rel,
                                 const std::string& entity_prefix) {
  CoherenceReport report;
  report.tau = tau;
  report.min_rel = min_rel;
  uint32_t floor = std::max(min_rel, 2u);  // a pair is the minimum

  double co_sum = 0.0;
  for (const auto& query : qrels.query_order) {
    std::vector<std::span<const float>> vectors;
    for (const auto& [entity, grade] : qrels.entries.at(query)) {
      if (grade < 1) continue;
      auto vec = space.vector_of(entity_prefix + entity);
      if (!vec) {
        ++report.missing_vectors_dropped;
        continue;
      }
      vectors.push_back(*vec);
    }
    if (vectors.size() < floor) {
      report.excluded_queries.push_back(query);
      continue;
    }
    CoherenceRow row;
    row.query_id = query;
    row.num_relevant = static_cast<uint32_t>(vectors.size());
    row.co = coherence(vectors, tau);
    co_sum += row.co;
    report.rows.push_back(std::move(row));
  }
  if (!report.rows.empty()) {
    report.mean_co = co_sum / static_cast<double>(report.rows.size());
  }
  return report;
}

void save_ndcg_report(const NdcgResult& result, const std::string& path) {
  std::ofstream out = open_output(path);
  out << "query_id";
  for (uint32_t k : result.cutoffs) out << ",ndcg@" << k;
  out << '\n';
  for (const auto& query : result.query_ids) {
    out << csv_field(query);
    for (double v : result.per_query.at(query)) out << ',' << format_g(v, 6);
    out << '\n';
  }
  out << "ALL";
  for (double v : result.mean) out << ',' << format_g(v, 6);
  out << '\n';
  if (!out) throw IoError("write failed: " + path);
}

void save_coherence_report(const CoherenceReport& report,
                           const std::string& path) {
  std::ofstream out = open_output(path);
  out << "query_id,num_relevant,coherence,tau\n";
  for (const auto& row : report.rows) {
    out << csv_field(row.query_id) << ',' << row.num_relevant << ','
        << format_g(row.co, 6) << ',' << format_g(report.tau, 6) << '\n';
  }
  out << "ALL," << report.rows.size() << ',' << format_g(report.mean_co, 6)
      << ',' << format_g(report.tau, 6) << '\n';
  if (!out) throw IoError("write failed: " + path);
}

SignificanceReport significance(const NdcgResult& a, const NdcgResult& b,
                                const std::string& tag_a,
                                const std::string& tag_b) {
  if (a.cutoffs != b.cutoffs) {
    throw ValidationError("significance: cutoff lists differ");
  }
  SignificanceReport report;
  report.run_a = tag_a;
  report.run_b = tag_b;
  report.cutoffs = a.cutoffs;

  // Shared query set, in a's order.
  std::vector<std::string> shared;
  for (const auto& q : a.query_ids) {
    if (b.per_query.count(q)) shared.push_back(q);
  }
  if (shared.size() < 2) {
    throw ValidationError("significance: fewer than 2 shared queries");
  }
  for (size_t c = 0; c < a.cutoffs.size(); ++c) {
    std::vector<double> va, vb;
    va.reserve(shared.size());
    vb.reserve(shared.size());
    for (const auto& q : shared) {
      va.push_back(a.per_query.at(q)[c]);
      vb.push_back(b.per_query.at(q)[c]);
    }
    report.tests.push_back(paired_ttest(va, vb));
  }
  return report;
}

void save_significance_report(const SignificanceReport& report,
                              const std::string& path, double alpha) {
  std::ofstream out = open_output(path);
  out << "run_a,run_b,metric,t,p,significant,flags\n";
  for (size_t c = 0; c < report.cutoffs.size(); ++c) {
    const TTestResult& t = report.tests[c];
    std::string flags;
    if (t.all_zero_diffs) flags = "all_zero_diffs";
    if (t.zero_variance) flags = "zero_variance";
    out << csv_field(report.run_a) << ',' << csv_field(report.run_b)
        << ",ndcg@" << report.cutoffs[c] << ',' << format_g(t.t, 6) << ','
        << format_g(t.p, 6) << ',' << (t.p < alpha ? "yes" : "no") << ','
        << flags << '\n';
  }
  if (!out) throw IoError("write failed: " + path);
}

}  // namespace kgrank
