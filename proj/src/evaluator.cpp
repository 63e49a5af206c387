#include "frameparse/evaluator.hpp"

#include <algorithm>
#include <cstdio>
#include <future>
#include <set>
#include <stdexcept>

#include "frameparse/error.hpp"

namespace frameparse {

namespace {

bool dummy_only(const Subframe& s) { return s.roles.size() == 1 && s.roles[0] == "DUMMY"; }

std::optional<Span> collect(const Frame& f, std::vector<Constituent>& out) {
  if (f.is_leaf()) return f.span;
  std::optional<Span> span;
  for (const auto& sub : f.subs) {
    if (dummy_only(sub)) continue;
    auto s = collect(sub.child, out);
    if (!s) continue;
    span = span ? Span{std::min(span->start, s->start), std::max(span->end, s->end)} : *s;
  }
  if (span && span->width() > 0) out.push_back(Constituent{*span, f.synt});
  return span;
}

void collect_tags(const Frame& f, std::map<int, Concept>& out) {
  if (!f.is_leaf()) {
    for (const auto& sub : f.subs) collect_tags(sub.child, out);
    return;
  }
  if (!f.span) return;
  for (int t = f.span->start; t < f.span->end; ++t) out.insert_or_assign(t, f.synt);
}

bool crosses(const Span& a, const Span& b) {
  bool overlap = a.start < b.end && b.start < a.end;
  return overlap && !a.contains(b) && !b.contains(a);
}

// Size of the multiset intersection of two sorted sequences under `key`.
template <typename Key>
std::size_t common(const std::vector<Constituent>& a, const std::vector<Constituent>& b, Key key) {
  std::vector<decltype(key(a.front()))> ka, kb;
  for (const auto& c : a) ka.push_back(key(c));
  for (const auto& c : b) kb.push_back(key(c));
  std::sort(ka.begin(), ka.end());
  std::sort(kb.begin(), kb.end());
  std::size_t n = 0, i = 0, j = 0;
  while (i < ka.size() && j < kb.size()) {
    if (ka[i] < kb[j]) {
      ++i;
    } else if (kb[j] < ka[i]) {
      ++j;
    } else {
      ++n, ++i, ++j;
    }
  }
  return n;
}

std::size_t crossing_count(const std::vector<Constituent>& system, const std::vector<Constituent>& gold) {
  std::size_t n = 0;
  for (const auto& c : system)
    n += std::any_of(gold.begin(), gold.end(), [&](const Constituent& g) { return crosses(c.span, g.span); });
  return n;
}

double ratio(std::size_t num, std::size_t den, std::size_t other) {
  if (den == 0) return other == 0 ? 1.0 : 0.0;
  return static_cast<double>(num) / static_cast<double>(den);
}

double ratio(std::size_t num, std::size_t den) { return ratio(num, den, 0); }

std::string fmt(const char* pattern, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, pattern, v);
  return buf;
}

}  // namespace

std::vector<Constituent> constituents(const Frame& tree) {
  std::vector<Constituent> out;
  collect(tree, out);
  std::sort(out.begin(), out.end());
  return out;
}

std::map<int, Concept> leaf_tags(const Frame& tree) {
  std::map<int, Concept> out;
  collect_tags(tree, out);
  return out;
}

PairCounts& PairCounts::operator+=(const PairCounts& o) {
  system += o.system;
  gold += o.gold;
  matched += o.matched;
  labeled += o.labeled;
  crossings += o.crossings;
  words += o.words;
  tags_correct += o.tags_correct;
  return *this;
}

PairCounts score_pair(const Frame& system, const Frame& gold) {
  auto st = leaf_tags(system), gt = leaf_tags(gold);
  bool same_tokens = st.size() == gt.size() &&
                     std::equal(st.begin(), st.end(), gt.begin(), [](const auto& a, const auto& b) { return a.first == b.first; });
  if (!same_tokens) throw Error(ErrorCode::TokenMismatch, "system and gold trees cover different tokens");
  auto sc = constituents(system), gc = constituents(gold);
  PairCounts c;
  c.system = sc.size();
  c.gold = gc.size();
  c.matched = common(sc, gc, [](const Constituent& x) { return x.span; });
  c.labeled = common(sc, gc, [](const Constituent& x) { return x; });
  c.crossings = crossing_count(sc, gc);
  c.words = gt.size();
  for (const auto& [t, cat] : gt) c.tags_correct += st.at(t) == cat;
  return c;
}

PairCounts score_partial(const ParseState& state, const Frame& gold) {
  std::vector<Constituent> sc;
  std::map<int, Concept> st;
  auto take = [&](const Frame& f) {
    auto cs = constituents(f);
    sc.insert(sc.end(), cs.begin(), cs.end());
    collect_tags(f, st);
  };
  for (const auto& f : state.stack) take(f);
  for (const auto& item : state.input)
    if (const auto* f = std::get_if<Frame>(&item)) take(*f);
  std::sort(sc.begin(), sc.end());

  auto gc = constituents(gold);
  auto gt = leaf_tags(gold);
  PairCounts c;
  c.system = sc.size();
  c.gold = gc.size();
  c.crossings = crossing_count(sc, gc);
  c.words = gt.size();
  for (const auto& [t, cat] : gt) {
    auto it = st.find(t);
    c.tags_correct += it != st.end() && it->second == cat;
  }
  return c;
}

SentenceResult score_sentence(const AssistedOutcome& outcome, const Frame& gold) {
  SentenceResult r;
  bool complete = outcome.free.status == ParseStatus::Complete;
  r.counts = complete ? score_pair(*outcome.free.tree, gold) : score_partial(outcome.free.final_state, gold);
  r.steps = outcome.logged.size();
  r.matched_steps = outcome.matches();
  r.op_seq = r.matched_steps == r.steps && outcome.predicted.size() == outcome.logged.size();
  r.loop = outcome.free.status == ParseStatus::EndlessLoop;
  const auto& c = r.counts;
  r.str_and_l = complete && c.labeled == c.system && c.labeled == c.gold && c.tags_correct == c.words;
  return r;
}

MetricsReport score_corpus(const std::vector<SentenceResult>& results) {
  MetricsReport m;
  PairCounts total;
  std::size_t steps = 0, matched = 0, op_seq = 0, str_l = 0, crossings = 0;
  std::array<std::size_t, 5> buckets{};
  for (const auto& r : results) {
    total += r.counts;
    steps += r.steps;
    matched += r.matched_steps;
    op_seq += r.op_seq;
    str_l += r.str_and_l;
    m.loops += r.loop;
    crossings += r.counts.crossings;
    for (std::size_t b = 0; b < buckets.size(); ++b) buckets[b] += r.counts.crossings <= b;
  }
  std::size_t n = results.size();
  m.sentence_count = n;
  m.precision = ratio(total.matched, total.system, total.gold);
  m.recall = ratio(total.matched, total.gold, total.system);
  m.labeled_precision = ratio(total.labeled, total.system, total.gold);
  m.labeled_recall = ratio(total.labeled, total.gold, total.system);
  m.tagging = ratio(total.tags_correct, total.words);
  m.crossings_per_sentence = n ? static_cast<double>(crossings) / static_cast<double>(n) : 0.0;
  for (std::size_t b = 0; b < buckets.size(); ++b) m.crossing_buckets[b] = ratio(buckets[b], n);
  m.ops = ratio(matched, steps);
  m.op_seq = ratio(op_seq, n);
  m.str_and_l = ratio(str_l, n);
  return m;
}

MetricsReport average_reports(const std::vector<MetricsReport>& reports) {
  MetricsReport m;
  if (reports.empty()) return m;
  double k = static_cast<double>(reports.size());
  for (const auto& r : reports) {
    m.precision += r.precision / k;
    m.recall += r.recall / k;
    m.labeled_precision += r.labeled_precision / k;
    m.labeled_recall += r.labeled_recall / k;
    m.tagging += r.tagging / k;
    m.crossings_per_sentence += r.crossings_per_sentence / k;
    for (std::size_t b = 0; b < m.crossing_buckets.size(); ++b) m.crossing_buckets[b] += r.crossing_buckets[b] / k;
    m.ops += r.ops / k;
    m.op_seq += r.op_seq / k;
    m.str_and_l += r.str_and_l / k;
    m.training_accuracy += r.training_accuracy / k;
    m.loops += r.loops;
    m.sentence_count += r.sentence_count;
  }
  return m;
}

std::vector<std::vector<std::size_t>> cv_blocks(std::size_t n, std::size_t k) {
  std::vector<std::vector<std::size_t>> blocks(k);
  std::size_t next = 0;
  for (std::size_t b = 0; b < k; ++b) {
    std::size_t size = n / k + (b < n % k ? 1 : 0);
    for (std::size_t i = 0; i < size; ++i) blocks[b].push_back(next++);
  }
  return blocks;
}

CVResult cross_validate(const std::vector<ActionLog>& corpus, const CVConfig& cfg, const FeatureSet& features,
                        const ResourceBundle& bundle, Variant variant, const std::vector<GroupSpec>& groups) {
  if (cfg.k < 2) throw Error(ErrorCode::ConfigError, "cross-validation needs k >= 2");
  if (corpus.size() < cfg.k)
    throw Error(ErrorCode::ConfigError, "corpus of " + std::to_string(corpus.size()) + " sentences is smaller than k");
  auto blocks = cv_blocks(corpus.size(), cfg.k);
  for (std::size_t f = 0; f < cfg.k; ++f) {
    std::size_t pool = corpus.size() - blocks[f].size();
    for (auto size : cfg.train_sizes)
      if (size == 0 || size > pool)
        throw Error(ErrorCode::ConfigError, "train size " + std::to_string(size) + " outside the fold pool of " +
                                                std::to_string(pool));
  }

  std::vector<Frame> gold;
  std::vector<std::vector<ParseExample>> examples;
  gold.reserve(corpus.size());
  examples.reserve(corpus.size());
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    gold.push_back(replay(corpus[i], bundle).tree);
    auto ex = extract_examples({corpus[i]}, features, bundle);
    for (auto& e : ex) e.sentence = i;
    examples.push_back(std::move(ex));
  }

  auto run_fold = [&](std::size_t f) {
    std::vector<std::size_t> pool;
    for (std::size_t b = 0; b < cfg.k; ++b)
      if (b != f) pool.insert(pool.end(), blocks[b].begin(), blocks[b].end());
    std::vector<FoldResult> out;
    for (auto size : cfg.train_sizes) {
      FoldResult r;
      r.fold = f;
      r.train_size = size;
      r.test_ids = blocks[f];
      r.train_ids.assign(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(size));
      std::set<std::size_t> test(r.test_ids.begin(), r.test_ids.end());
      for (auto id : r.train_ids)
        if (test.count(id)) throw std::logic_error("training sentence " + std::to_string(id) + " is in the test block");

      std::vector<ParseExample> train;
      for (auto id : r.train_ids) train.insert(train.end(), examples[id].begin(), examples[id].end());
      Model model = train_model(variant, features, train, groups);
      for (auto id : r.test_ids)
        r.sentences.push_back(
            score_sentence(assisted_parse(corpus[id], model.structure, features, bundle, cfg.limits), gold[id]));
      r.report = score_corpus(r.sentences);
      r.report.training_accuracy = model.stats.training_accuracy;
      out.push_back(std::move(r));
    }
    return out;
  };

  CVResult result;
  result.variant = variant;
  result.config = cfg;
  std::vector<std::vector<FoldResult>> per_fold(cfg.k);
  if (cfg.parallel) {
    std::vector<std::future<std::vector<FoldResult>>> tasks;
    for (std::size_t f = 0; f < cfg.k; ++f) tasks.push_back(std::async(std::launch::async, run_fold, f));
    for (std::size_t f = 0; f < cfg.k; ++f) per_fold[f] = tasks[f].get();
  } else {
    for (std::size_t f = 0; f < cfg.k; ++f) per_fold[f] = run_fold(f);
  }
  for (auto& fold : per_fold)
    for (auto& r : fold) result.folds.push_back(std::move(r));

  for (auto size : cfg.train_sizes) {
    std::vector<MetricsReport> reports;
    for (const auto& r : result.folds)
      if (r.train_size == size) reports.push_back(r.report);
    result.averages[size] = average_reports(reports);
  }
  return result;
}

namespace {

struct Row {
  const char* label;
  std::string (*cell)(const MetricsReport&);
};

std::string pct(double v) { return fmt("%.1f%%", 100.0 * v); }

const Row kRows[] = {
    {"Prec.", [](const MetricsReport& m) { return pct(m.precision); }},
    {"Recall", [](const MetricsReport& m) { return pct(m.recall); }},
    {"L. pr.", [](const MetricsReport& m) { return pct(m.labeled_precision); }},
    {"L. rec.", [](const MetricsReport& m) { return pct(m.labeled_recall); }},
    {"Tagging", [](const MetricsReport& m) { return pct(m.tagging); }},
    {"Cr/snt", [](const MetricsReport& m) { return fmt("%.2f", m.crossings_per_sentence); }},
    {"0 cr", [](const MetricsReport& m) { return pct(m.crossing_buckets[0]); }},
    {"<=1 cr", [](const MetricsReport& m) { return pct(m.crossing_buckets[1]); }},
    {"<=2 cr", [](const MetricsReport& m) { return pct(m.crossing_buckets[2]); }},
    {"<=3 cr", [](const MetricsReport& m) { return pct(m.crossing_buckets[3]); }},
    {"<=4 cr", [](const MetricsReport& m) { return pct(m.crossing_buckets[4]); }},
    {"Ops", [](const MetricsReport& m) { return pct(m.ops); }},
    {"OpSeq", [](const MetricsReport& m) { return pct(m.op_seq); }},
    {"Str&L", [](const MetricsReport& m) { return pct(m.str_and_l); }},
    {"Loops", [](const MetricsReport& m) { return std::to_string(m.loops); }},
    {"Tr. acc.", [](const MetricsReport& m) { return pct(m.training_accuracy); }},
};

std::string pad_left(const std::string& s, std::size_t w) { return s.size() >= w ? s : std::string(w - s.size(), ' ') + s; }
std::string pad_right(const std::string& s, std::size_t w) { return s.size() >= w ? s : s + std::string(w - s.size(), ' '); }

std::string tsv_fields(const MetricsReport& m) {
  std::string out;
  auto add = [&](double v) { out += "\t" + fmt("%.6f", v); };
  add(m.precision);
  add(m.recall);
  add(m.labeled_precision);
  add(m.labeled_recall);
  add(m.tagging);
  add(m.crossings_per_sentence);
  for (double b : m.crossing_buckets) add(b);
  add(m.ops);
  add(m.op_seq);
  add(m.str_and_l);
  out += "\t" + std::to_string(m.loops) + "\t" + std::to_string(m.sentence_count);
  add(m.training_accuracy);
  return out;
}

}  // namespace

std::string format_report_table(const CVResult& r) {
  std::string out = "Decision structure: " + std::string(to_string(r.variant)) + "   folds: " +
                    std::to_string(r.config.k) + "   seed: " + std::to_string(r.config.seed) + "\n";
  const std::size_t label_w = 20, col_w = 9;
  out += pad_right("Training sentences", label_w);
  for (auto size : r.config.train_sizes) out += pad_left(std::to_string(size), col_w);
  out += "\n";
  for (const auto& row : kRows) {
    out += pad_right(row.label, label_w);
    for (auto size : r.config.train_sizes) out += pad_left(row.cell(r.averages.at(size)), col_w);
    out += "\n";
  }
  return out;
}

std::string format_report_tsv(const CVResult& r) {
  std::string out =
      "variant\tfold\ttrain_size\tprecision\trecall\tlabeled_precision\tlabeled_recall\ttagging\tcrossings_per_"
      "sentence\tcr0\tcr1\tcr2\tcr3\tcr4\tops\topseq\tstr_and_l\tloops\tsentences\ttraining_accuracy\n";
  std::string variant(to_string(r.variant));
  for (const auto& f : r.folds)
    out += variant + "\t" + std::to_string(f.fold) + "\t" + std::to_string(f.train_size) + tsv_fields(f.report) + "\n";
  for (auto size : r.config.train_sizes)
    out += variant + "\tmean\t" + std::to_string(size) + tsv_fields(r.averages.at(size)) + "\n";
  return out;
}

}  // namespace frameparse
