#include "kgrank/run_file.hpp"

#include <unordered_set>

namespace kgrank {

namespace {

[[noreturn]] void fail_line(const std::string& path, uint64_t lineno,
                            const std::string& what) {
  throw ValidationError(path + " line " + std::to_string(lineno) + ": " + what);
}

}  // namespace

RankedRun load_run(const std::string& path) {
  std::ifstream in = open_input(path);
  RankedRun run;
  std::unordered_set<std::string> seen_pairs;
  std::string line;
  uint64_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view sv = strip_cr(line);
    if (sv.empty() || sv.front() == '#') continue;
    auto f = split_ws(sv);
    if (f.size() != 6) fail_line(path, lineno, "expected 6 columns");
    if (f[1] != "Q0") fail_line(path, lineno, "second column must be Q0");

    RunEntry entry;
    entry.entity = std::string(f[2]);
    try {
      entry.rank = static_cast<uint32_t>(std::stoul(std::string(f[3])));
      entry.score = std::stod(std::string(f[4]));
    } catch (const std::exception&) {
      fail_line(path, lineno, "bad rank or score");
    }
    std::string query(f[0]);
    std::string key = query + '\x1f' + entry.entity;
    if (!seen_pairs.insert(key).second) {
      fail_line(path, lineno, "duplicate (query, entity) pair");
    }
    if (run.tag.empty()) run.tag = std::string(f[5]);

    auto [it, inserted] = run.per_query.try_emplace(query);
    if (inserted) run.query_order.push_back(query);
    auto& entries = it->second;
    if (entry.rank != entries.size() + 1) {
      fail_line(path, lineno, "ranks must be contiguous from 1 per query");
    }
    if (!entries.empty() && entry.score > entries.back().score) {
      fail_line(path, lineno, "scores must be non-increasing with rank");
    }
    entries.push_back(std::move(entry));
  }
  if (run.per_query.empty()) {
    throw ValidationError(path + ": run file has no entries");
  }
  return run;
}

void save_run(const RankedRun& run, const std::string& path) {
  std::ofstream out = open_output(path);
  for (const auto& query : run.query_order) {
    for (const RunEntry& e : run.per_query.at(query)) {
      out << query << " Q0 " << e.entity << ' ' << e.rank << ' '
          << format_g(e.score, 6) << ' ' << run.tag << '\n';
    }
  }
  if (!out) throw IoError("write failed: " + path);
}

Qrels load_qrels(const std::string& path) {
  std::ifstream in = open_input(path);
  Qrels qrels;
  std::string line;
  uint64_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view sv = strip_cr(line);
    if (sv.empty() || sv.front() == '#') continue;
    auto f = split_ws(sv);
    if (f.size() != 4) fail_line(path, lineno, "expected 4 columns");
    int grade = 0;
    try {
      grade = std::stoi(std::string(f[3]));
    } catch (const std::exception&) {
      fail_line(path, lineno, "bad grade");
    }
    if (grade < 0 || grade > 2) {
      fail_line(path, lineno, "grade must be 0, 1, or 2");
    }
    std::string query(f[0]);
    std::string entity(f[2]);
    auto [it, inserted] = qrels.lookup.try_emplace(query);
    if (inserted) qrels.query_order.push_back(query);
    if (!it->second.emplace(entity, grade).second) {
      fail_line(path, lineno, "duplicate (query, entity) judgment");
    }
    qrels.entries[query].emplace_back(std::move(entity), grade);
  }
  if (qrels.lookup.empty()) {
    throw ValidationError(path + ": qrels file has no entries");
  }
  return qrels;
}

void save_qrels(const Qrels& qrels, const std::string& path) {
  std::ofstream out = open_output(path);
  for (const auto& query : qrels.query_order) {
    for (const auto& [entity, grade] : qrels.entries.at(query)) {
      out << query << " 0 " << entity << ' ' << grade << '\n';
    }
  }
  if (!out) throw IoError("write failed: " + path);
}

}  // namespace kgrank
