#include "kgrank/joint.hpp"

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <cstring>
#include <thread>
#include <unordered_set>

namespace kgrank {

JointCorpus build_joint_corpus(const std::string& docs_path,
                               const std::string& links_path,
                               const std::string& anchors_path,
                               uint32_t window,
                               JointCorpusDiagnostics* diag,
                               const std::vector<std::string>& disambiguations,
                               bool include_disambiguations) {
  if (window < 1) throw ValidationError("window must be >= 1");
  JointCorpusDiagnostics local;
  JointCorpusDiagnostics& d = diag ? *diag : local;
  d = {};

  std::unordered_set<std::string> excluded;
  if (!include_disambiguations) {
    excluded.insert(disambiguations.begin(), disambiguations.end());
  }

  JointCorpus corpus;
  {
    std::ifstream in = open_input(docs_path);
    std::string line;
    while (std::getline(in, line)) {
      std::vector<uint32_t> doc;
      for (auto tok : split_ws(strip_cr(line))) {
        doc.push_back(corpus.words.intern(tok));
      }
      corpus.docs.push_back(std::move(doc));
    }
  }

  if (!links_path.empty()) {
    std::ifstream in = open_input(links_path);
    std::string line;
    uint64_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      std::string_view sv = strip_cr(line);
      if (sv.empty() || sv.front() == '#') continue;
      auto f = split(sv, '\t');
      if (f.size() != 2 || f[0].empty() || f[1].empty()) {
        throw ValidationError(links_path + " line " + std::to_string(lineno) +
                              ": expected entity<TAB>linked_entity");
      }
      if (excluded.count(std::string(f[0])) || excluded.count(std::string(f[1]))) {
        ++d.disambiguation_links_dropped;
        continue;
      }
      uint32_t a = corpus.entities.intern(f[0]);
      uint32_t b = corpus.entities.intern(f[1]);
      if (a == b) {
        ++d.self_links_dropped;
        continue;
      }
      corpus.links.emplace_back(a, b);
    }
  }

  if (!anchors_path.empty()) {
    std::ifstream in = open_input(anchors_path);
    std::string line;
    uint64_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      std::string_view sv = strip_cr(line);
      if (sv.empty() || sv.front() == '#') continue;
      auto f = split(sv, '\t');
      if (f.size() != 3 || f[2].empty()) {
        throw ValidationError(anchors_path + " line " + std::to_string(lineno) +
                              ": expected doc_id<TAB>token_offset<TAB>entity");
      }
      ++d.anchor_records;
      uint64_t doc_id = 0, offset = 0;
      try {
        doc_id = std::stoull(std::string(f[0]));
        offset = std::stoull(std::string(f[1]));
      } catch (const std::exception&) {
        throw ValidationError(anchors_path + " line " + std::to_string(lineno) +
                              ": doc_id and token_offset must be integers");
      }
      if (excluded.count(std::string(f[2]))) {
        ++d.disambiguation_anchors_dropped;
        continue;
      }
      if (doc_id >= corpus.docs.size() ||
          offset >= corpus.docs[doc_id].size()) {
        ++d.anchors_skipped;
        continue;
      }
      JointAnchor anchor;
      anchor.entity = corpus.entities.intern(f[2]);
      const auto& doc = corpus.docs[doc_id];
      size_t lo = offset >= window ? offset - window : 0;
      size_t hi = std::min(doc.size() - 1, offset + window);
      for (size_t i = lo; i <= hi; ++i) {
        if (i != offset) anchor.context.push_back(doc[i]);
      }
      d.anchor_pairs += anchor.context.size();
      corpus.anchors.push_back(std::move(anchor));
    }
  }

  d.entity_pairs = corpus.links.size();
  for (const auto& doc : corpus.docs) {
    for (size_t t = 0; t < doc.size(); ++t) {
      size_t lo = t >= window ? t - window : 0;
      size_t hi = std::min(doc.size() - 1, t + window);
      for (size_t j = lo; j <= hi; ++j) {
        if (j != t) ++d.word_pairs;
      }
    }
  }
  return corpus;
}

JointSpace init_joint_space(const JointCorpus& corpus, const SgnsConfig& cfg) {
  JointSpace space;
  space.words = corpus.words;
  space.entities = corpus.entities;
  space.dim = cfg.dimension;
  size_t rows = space.rows();
  space.input.resize(rows * cfg.dimension);
  space.output.assign(rows * cfg.dimension, 0.0f);
  Rng rng(mix_seed(cfg.seed, 0x111717ULL));
  for (size_t i = 0; i < space.input.size(); ++i) {
    space.input[i] =
        static_cast<float>((rng.next_real() - 0.5) / cfg.dimension);
  }
  return space;
}

namespace {

enum Stream { kWord = 0, kEntity = 1, kAnchor = 2 };

// One training event: center row predicts target row under a namespace
// noise table.
struct Pair {
  uint32_t center_row;
  uint32_t target_row;
  bool target_is_entity;
};

// Streaming cursors; each epoch resets them. Word windows use cfg.window.
struct WordCursor {
  const std::vector<std::vector<uint32_t>>* docs;
  uint32_t window;
  size_t doc = 0, t = 0, j = 0;

  void rewind() {
    doc = 0;
    t = 0;
    j = 0;
    skip();
  }
  void skip() {  // advance past empty docs / exhausted positions
    while (doc < docs->size()) {
      const auto& dd = (*docs)[doc];
      if (t >= dd.size()) {
        ++doc;
        t = 0;
        j = 0;
        continue;
      }
      size_t lo = t >= window ? t - window : 0;
      if (j < lo) j = lo;
      if (j == t) ++j;
      size_t hi = std::min(dd.size() - 1, t + window);
      if (j > hi) {
        ++t;
        j = 0;
        continue;
      }
      return;
    }
  }
  bool next(Pair* out) {
    if (doc >= docs->size()) return false;
    const auto& dd = (*docs)[doc];
    out->center_row = dd[t];
    out->target_row = dd[j];
    out->target_is_entity = false;
    ++j;
    skip();
    return true;
  }
};

struct LinkCursor {
  const std::vector<std::pair<uint32_t, uint32_t>>* links;
  bool symmetric;
  uint32_t word_rows;
  size_t i = 0;
  int direction = 0;

  void rewind() {
    i = 0;
    direction = 0;
  }
  bool next(Pair* out) {
    if (i >= links->size()) return false;
    auto [a, b] = (*links)[i];
    if (direction == 1) std::swap(a, b);
    out->center_row = word_rows + a;
    out->target_row = word_rows + b;
    out->target_is_entity = true;
    if (symmetric && direction == 0) {
      direction = 1;
    } else {
      direction = 0;
      ++i;
    }
    return true;
  }
};

struct AnchorCursor {
  const std::vector<JointAnchor>* anchors;
  uint32_t word_rows;
  size_t i = 0, j = 0;

  void rewind() {
    i = 0;
    j = 0;
    skip();
  }
  void skip() {
    while (i < anchors->size() && j >= (*anchors)[i].context.size()) {
      ++i;
      j = 0;
    }
  }
  bool next(Pair* out) {
    if (i >= anchors->size()) return false;
    out->center_row = word_rows + (*anchors)[i].entity;
    out->target_row = (*anchors)[i].context[j];
    out->target_is_entity = false;
    ++j;
    skip();
    return true;
  }
};

std::vector<double> make_cdf(const std::vector<uint64_t>& counts) {
  std::vector<double> cdf(counts.size());
  double acc = 0.0;
  for (size_t i = 0; i < counts.size(); ++i) {
    acc += std::pow(static_cast<double>(counts[i]), 0.75);
    cdf[i] = acc;
  }
  return cdf;
}

uint32_t draw(const std::vector<double>& cdf, Rng& rng) {
  double x = rng.next_real() * cdf.back();
  auto it = std::upper_bound(cdf.begin(), cdf.end(), x);
  if (it == cdf.end()) --it;
  return static_cast<uint32_t>(it - cdf.begin());
}

}  // namespace

JointSpace train_joint(const JointCorpus& corpus, const JointConfig& cfg,
                       std::vector<JointEpochLoss>* loss_log) {
  const SgnsConfig& sc = cfg.sgns;
  if (sc.dimension < 1) throw ValidationError("dimension must be >= 1");
  if (sc.window < 1) throw ValidationError("window must be >= 1");
  if (sc.epochs < 1) throw ValidationError("epochs must be >= 1");

  // min_count drops rare word tokens from the doc and anchor streams; their
  // rows stay at initialization. Entities are never filtered (coverage
  // matters more than frequency for re-ranking).
  const std::vector<std::vector<uint32_t>>* base_docs = &corpus.docs;
  const std::vector<JointAnchor>* base_anchors = &corpus.anchors;
  std::vector<std::vector<uint32_t>> filtered_docs;
  std::vector<JointAnchor> filtered_anchors;
  if (sc.min_count > 0) {
    std::vector<uint64_t> counts_raw(corpus.words.size(), 0);
    for (const auto& doc : corpus.docs) {
      for (uint32_t w : doc) ++counts_raw[w];
    }
    filtered_docs.reserve(corpus.docs.size());
    for (const auto& doc : corpus.docs) {
      std::vector<uint32_t> kept;
      kept.reserve(doc.size());
      for (uint32_t w : doc) {
        if (counts_raw[w] >= sc.min_count) kept.push_back(w);
      }
      filtered_docs.push_back(std::move(kept));
    }
    filtered_anchors.reserve(corpus.anchors.size());
    for (const auto& a : corpus.anchors) {
      JointAnchor fa;
      fa.entity = a.entity;
      for (uint32_t w : a.context) {
        if (counts_raw[w] >= sc.min_count) fa.context.push_back(w);
      }
      filtered_anchors.push_back(std::move(fa));
    }
    base_docs = &filtered_docs;
    base_anchors = &filtered_anchors;
  }

  JointCorpusDiagnostics counts;
  {
    // Stream sizes for scheduling (word pairs recomputed below per epoch
    // when subsampling rewrites the docs).
    for (const auto& doc : *base_docs) {
      for (size_t t = 0; t < doc.size(); ++t) {
        size_t lo = t >= sc.window ? t - sc.window : 0;
        size_t hi = std::min(doc.size() - 1, t + sc.window);
        for (size_t j = lo; j <= hi; ++j) {
          if (j != t) ++counts.word_pairs;
        }
      }
    }
    counts.entity_pairs = corpus.links.size() * (cfg.symmetric_links ? 2 : 1);
    for (const auto& a : *base_anchors) counts.anchor_pairs += a.context.size();
  }
  uint64_t base_total =
      counts.word_pairs +
      (cfg.use_link_graph ? counts.entity_pairs : 0) + counts.anchor_pairs;
  if (base_total == 0) {
    throw ValidationError("joint corpus has no word or entity pairs");
  }

  JointSpace space = init_joint_space(corpus, sc);
  const uint32_t dim = sc.dimension;
  const uint32_t word_rows = corpus.words.size();
  float* V = space.input.data();
  float* U = space.output.data();

  // Per-namespace noise: words by corpus frequency, entities by how often
  // they appear as a link target (uniform fallback when there are none).
  std::vector<uint64_t> word_counts(corpus.words.size(), 0);
  for (const auto& doc : *base_docs) {
    for (uint32_t w : doc) ++word_counts[w];
  }
  std::vector<uint64_t> entity_counts(corpus.entities.size(), 0);
  for (const auto& [a, b] : corpus.links) {
    ++entity_counts[b];
    if (cfg.symmetric_links) ++entity_counts[a];
  }
  bool any_entity_count = false;
  for (uint64_t c : entity_counts) any_entity_count |= c > 0;
  if (!any_entity_count) {
    entity_counts.assign(corpus.entities.size(), 1);
  }
  std::vector<double> word_cdf =
      corpus.words.size() ? make_cdf(word_counts) : std::vector<double>{};
  std::vector<double> entity_cdf =
      corpus.entities.size() ? make_cdf(entity_counts) : std::vector<double>{};

  // Subsampling keep probabilities over words.
  std::vector<double> keep(corpus.words.size(), 1.0);
  uint64_t total_words = 0;
  for (uint64_t c : word_counts) total_words += c;
  if (sc.subsample_threshold > 0.0 && total_words > 0) {
    for (size_t w = 0; w < keep.size(); ++w) {
      double f = static_cast<double>(word_counts[w]) / total_words;
      if (f > 0.0) {
        double p = (std::sqrt(f / sc.subsample_threshold) + 1.0) *
                   (sc.subsample_threshold / f);
        keep[w] = std::min(1.0, p);
      }
    }
  }

  const uint64_t planned = base_total * sc.epochs;
  std::atomic<uint64_t> processed{0};
  const float min_alpha = sc.learning_rate * 1e-4f;
  const uint32_t workers = std::max(1u, sc.workers);

  struct Scratch {
    std::vector<float> g_v, g_u, g_neg;
    std::vector<const float*> neg_rows;
    std::vector<float*> g_neg_rows;
    std::vector<uint32_t> neg_ids;
    Scratch(uint32_t dim, uint32_t negatives)
        : g_v(dim),
          g_u(dim),
          g_neg(static_cast<size_t>(negatives) * dim),
          neg_rows(negatives),
          g_neg_rows(negatives),
          neg_ids(negatives) {}
  };

  // One training event; shared by the streaming single-worker path and the
  // sharded multi-worker path (which tolerates races on V/U).
  auto train_pair = [&](const Pair& pair, Rng& rng, Scratch& scratch,
                        JointEpochLoss& el) {
    uint64_t done = processed.fetch_add(1, std::memory_order_relaxed);
    float alpha = std::max(
        min_alpha,
        sc.learning_rate * (1.0f - static_cast<float>(done) / planned));

    const std::vector<double>& cdf =
        pair.target_is_entity ? entity_cdf : word_cdf;
    uint32_t ns_offset = pair.target_is_entity ? word_rows : 0;

    size_t k = 0;
    for (uint32_t n = 0; n < sc.negatives; ++n) {
      uint32_t cand = ns_offset + draw(cdf, rng);
      if (cand == pair.target_row) continue;
      scratch.neg_ids[k] = cand;
      scratch.neg_rows[k] = U + static_cast<size_t>(cand) * dim;
      scratch.g_neg_rows[k] = scratch.g_neg.data() + k * dim;
      ++k;
    }
    float* v = V + static_cast<size_t>(pair.center_row) * dim;
    float* u_pos = U + static_cast<size_t>(pair.target_row) * dim;
    std::memset(scratch.g_v.data(), 0, dim * sizeof(float));
    std::memset(scratch.g_u.data(), 0, dim * sizeof(float));
    std::memset(scratch.g_neg.data(), 0, k * dim * sizeof(float));
    double loss = sgns_math::pair_loss_grad<float>(
        v, u_pos, scratch.neg_rows.data(), k, dim, scratch.g_v.data(),
        scratch.g_u.data(), scratch.g_neg_rows.data());
    for (uint32_t i = 0; i < dim; ++i) v[i] -= alpha * scratch.g_v[i];
    for (uint32_t i = 0; i < dim; ++i) u_pos[i] -= alpha * scratch.g_u[i];
    for (size_t n = 0; n < k; ++n) {
      float* u_neg = U + static_cast<size_t>(scratch.neg_ids[n]) * dim;
      const float* gn = scratch.g_neg.data() + n * dim;
      for (uint32_t i = 0; i < dim; ++i) u_neg[i] -= alpha * gn[i];
    }

    if (pair.target_is_entity) {
      el.entity_loss += loss;
      ++el.entity_pairs;
    } else if (pair.center_row < word_rows) {
      el.word_loss += loss;
      ++el.word_pairs;
    } else {
      el.anchor_loss += loss;
      ++el.anchor_pairs;
    }
  };

  std::vector<std::vector<uint32_t>> epoch_docs;

  for (uint32_t epoch = 0; epoch < sc.epochs; ++epoch) {
    Rng rng(mix_seed(sc.seed, 0x9000ULL + epoch));

    const std::vector<std::vector<uint32_t>>* docs = base_docs;
    if (sc.subsample_threshold > 0.0) {
      epoch_docs.clear();
      epoch_docs.reserve(base_docs->size());
      for (const auto& doc : *base_docs) {
        std::vector<uint32_t> kept;
        kept.reserve(doc.size());
        for (uint32_t w : doc) {
          if (keep[w] >= 1.0 || rng.next_real() < keep[w]) kept.push_back(w);
        }
        epoch_docs.push_back(std::move(kept));
      }
      docs = &epoch_docs;
    }

    WordCursor wc{docs, sc.window};
    LinkCursor lc{&corpus.links, cfg.symmetric_links, word_rows};
    AnchorCursor ac{base_anchors, word_rows};
    wc.rewind();
    lc.rewind();
    ac.rewind();

    uint64_t n_word = 0;
    for (const auto& doc : *docs) {
      for (size_t t = 0; t < doc.size(); ++t) {
        size_t lo = t >= sc.window ? t - sc.window : 0;
        size_t hi = std::min(doc.size() - 1, t + sc.window);
        n_word += (hi - lo + 1) - 1;
      }
    }
    uint64_t n_entity = cfg.use_link_graph ? counts.entity_pairs : 0;
    uint64_t n_anchor = counts.anchor_pairs;
    uint64_t sizes[3] = {n_word, n_entity, n_anchor};
    uint64_t total = n_word + n_entity + n_anchor;

    JointEpochLoss el;
    el.epoch = epoch + 1;

    // Weighted round-robin keeps the three streams interleaved in
    // proportion to their sizes.
    int64_t acc[3] = {0, 0, 0};
    auto next_scheduled = [&](Pair* pair) {
      int chosen = -1;
      int64_t best = INT64_MIN;
      for (int s2 = 0; s2 < 3; ++s2) {
        acc[s2] += static_cast<int64_t>(sizes[s2]);
        if (sizes[s2] > 0 && acc[s2] > best) {
          best = acc[s2];
          chosen = s2;
        }
      }
      bool got = false;
      while (!got) {  // a drained stream falls through to the next
        if (chosen == kWord) got = wc.next(pair);
        if (chosen == kEntity && !got) got = lc.next(pair);
        if (chosen == kAnchor && !got) got = ac.next(pair);
        if (!got) chosen = (chosen + 1) % 3;
      }
      acc[chosen] -= static_cast<int64_t>(total);
    };

    if (workers == 1) {
      Scratch scratch(dim, sc.negatives);
      for (uint64_t step = 0; step < total; ++step) {
        Pair pair{};
        next_scheduled(&pair);
        train_pair(pair, rng, scratch, el);
      }
    } else {
      // Materialize the schedule and stripe it across lock-free workers.
      std::vector<Pair> schedule(total);
      for (uint64_t step = 0; step < total; ++step) {
        next_scheduled(&schedule[step]);
      }
      std::vector<JointEpochLoss> worker_loss(workers);
      std::vector<std::thread> pool;
      pool.reserve(workers);
      for (uint32_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w]() {
          Rng wrng(mix_seed(sc.seed, 0xA000ULL + epoch * 131ULL + w));
          Scratch scratch(dim, sc.negatives);
          for (uint64_t i = w; i < schedule.size(); i += workers) {
            train_pair(schedule[i], wrng, scratch, worker_loss[w]);
          }
        });
      }
      for (auto& th : pool) th.join();
      for (const JointEpochLoss& wl : worker_loss) {
        el.word_loss += wl.word_loss;
        el.entity_loss += wl.entity_loss;
        el.anchor_loss += wl.anchor_loss;
        el.word_pairs += wl.word_pairs;
        el.entity_pairs += wl.entity_pairs;
        el.anchor_pairs += wl.anchor_pairs;
      }
    }
    if (loss_log) loss_log->push_back(el);
  }
  return space;
}

void save_joint_space(const JointSpace& space, const std::string& path) {
  std::ofstream out = open_output(path);
  out << space.rows() << ' ' << space.dim << '\n';
  auto write_row = [&](const std::string& name, std::span<const float> row) {
    if (contains_whitespace(name)) {
      throw ValidationError("token contains whitespace, not exportable: '" +
                            name + "'");
    }
    out << name;
    for (float v : row) out << ' ' << format_g(v, 9);
    out << '\n';
  };
  for (uint32_t i = 0; i < space.words.size(); ++i) {
    write_row(space.words.name(i), space.word_vec(i));
  }
  for (uint32_t i = 0; i < space.entities.size(); ++i) {
    write_row(JointSpace::kEntityPrefix + space.entities.name(i),
              space.entity_vec(i));
  }
  if (!out) throw IoError("write failed: " + path);
}

}  // namespace kgrank
