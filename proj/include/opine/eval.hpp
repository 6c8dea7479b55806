#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "opine/corpus.hpp"

namespace opine {

/// Top-fraction selection with the mean ground truth of the selection.
/// Averages skip selected posts without ground truth; if none carries it the
/// average is NaN.
struct RankingResult {
  std::vector<std::string> selected_ids;  // score order, ties by ascending id
  double avg_mpp = 0.0;
  double avg_ml = 0.0;
  double fraction = 0.0;
};

// Sorts by score descending (ties by ascending id) and selects the top
// ceil(fraction * N). Scores must cover every post.
RankingResult rank_top_fraction(const std::map<std::string, double>& scores,
                                const PostCollection& posts, double fraction);

enum class LabelConvention {
  HigherIs1,  // label 1 means post1 scores higher
  HigherIs0,
};

struct PairScores {
  double mpp = 0.0;
  double ml = 0.0;
};

struct PairwiseReport {
  double mpp_accuracy = 0.0;
  double ml_accuracy = 0.0;
  std::size_t n_pairs = 0;
};

// Predicts each pair from the score order (exact ties predict 0) and reports
// the fraction matching the labels, per metric. Scores must cover every post
// in every pair.
PairwiseReport pairwise_accuracy(
    const PairCollection& pairs,
    const std::map<std::string, PairScores>& scores,
    LabelConvention convention);

// Deterministic shuffle under the seed; ceil(ratio * N) pairs go to val.
// Both splits preserve the input order of their members.
std::pair<PairCollection, PairCollection> split_holdout(
    const PairCollection& pairs, double ratio, std::uint64_t seed);

// Distinct posts appearing in any pair, first occurrence wins, in order of
// first appearance.
PostCollection pool_pairs_posts(const PairCollection& pairs);

// Pools the pairs' posts and applies rank_top_fraction. Scores must cover
// the pooled ids.
RankingResult rank_pairwise_pool(const PairCollection& pairs,
                                 const std::map<std::string, double>& scores,
                                 double fraction);

}  // namespace opine
