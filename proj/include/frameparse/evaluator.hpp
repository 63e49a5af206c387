#pragma once

// Bracket scoring, operation metrics and k-fold cross-validation.

#include <array>
#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "frameparse/engine.hpp"

namespace frameparse {

struct Constituent {
  Span span;
  Concept label{"S-NP"};

  friend bool operator==(const Constituent&, const Constituent&) = default;
  friend auto operator<=>(const Constituent& a, const Constituent& b) {
    if (auto c = a.span <=> b.span; c != 0) return c;
    return a.label <=> b.label;
  }
};

// Sorted multiset of non-leaf constituents. DUMMY-role subtrees are skipped
// and do not widen their parent's span; empty categories never count.
std::vector<Constituent> constituents(const Frame& tree);

// Token index -> leaf category, over every word-level frame.
std::map<int, Concept> leaf_tags(const Frame& tree);

struct PairCounts {
  std::size_t system = 0;   // system brackets
  std::size_t gold = 0;     // gold brackets
  std::size_t matched = 0;  // span matches
  std::size_t labeled = 0;  // span + label matches
  std::size_t crossings = 0;
  std::size_t words = 0;
  std::size_t tags_correct = 0;

  PairCounts& operator+=(const PairCounts& o);
};

// Throws Error(TokenMismatch) when the trees cover different tokens.
PairCounts score_pair(const Frame& system, const Frame& gold);

// Scoring for a parse that did not complete: bracket and tag counts from the
// frames left on the stack and input, with no bracket credited as matched.
PairCounts score_partial(const ParseState& state, const Frame& gold);

struct SentenceResult {
  PairCounts counts;
  std::size_t steps = 0;
  std::size_t matched_steps = 0;
  bool op_seq = false;
  bool str_and_l = false;
  bool loop = false;
};

SentenceResult score_sentence(const AssistedOutcome& outcome, const Frame& gold);

struct MetricsReport {
  double precision = 0, recall = 0, labeled_precision = 0, labeled_recall = 0, tagging = 0;
  double crossings_per_sentence = 0;
  std::array<double, 5> crossing_buckets{};  // 0, <=1, <=2, <=3, <=4
  double ops = 0, op_seq = 0, str_and_l = 0;
  std::size_t loops = 0;
  std::size_t sentence_count = 0;
  double training_accuracy = 0;
};

MetricsReport score_corpus(const std::vector<SentenceResult>& results);

// Ratios averaged arithmetically, loops and sentences summed.
MetricsReport average_reports(const std::vector<MetricsReport>& reports);

struct CVConfig {
  std::size_t k = 5;
  std::vector<std::size_t> train_sizes{4, 8, 16};
  Limits limits;
  bool parallel = true;
  long long seed = 0;  // recorded only
};

struct FoldResult {
  std::size_t fold = 0;
  std::size_t train_size = 0;
  std::vector<std::size_t> train_ids;
  std::vector<std::size_t> test_ids;
  std::vector<SentenceResult> sentences;  // test block order
  MetricsReport report;
};

struct CVResult {
  Variant variant = Variant::Tree;
  CVConfig config;
  std::vector<FoldResult> folds;                  // fold-major, train sizes in config order
  std::map<std::size_t, MetricsReport> averages;  // by train size
};

// Contiguous blocks in corpus order; the first (n mod k) blocks get one extra.
std::vector<std::vector<std::size_t>> cv_blocks(std::size_t n, std::size_t k);

// Throws Error(ConfigError) for k < 2, |corpus| < k or a train size larger
// than a fold's pool.
CVResult cross_validate(const std::vector<ActionLog>& corpus, const CVConfig& cfg, const FeatureSet& features,
                        const ResourceBundle& bundle, Variant variant, const std::vector<GroupSpec>& groups);

std::string format_report_table(const CVResult& r);
std::string format_report_tsv(const CVResult& r);

}  // namespace frameparse
