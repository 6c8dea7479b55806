#include "opine/eval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "opine/error.hpp"
#include "opine/util.hpp"

namespace opine {

RankingResult rank_top_fraction(const std::map<std::string, double>& scores,
                                const PostCollection& posts, double fraction) {
  if (posts.empty()) {
    throw Error(ErrorKind::Validation, "cannot rank an empty pool");
  }
  if (!(fraction > 0.0) || fraction > 1.0) {
    throw Error(ErrorKind::Config, "fraction must be in (0, 1]");
  }
  for (const auto& post : posts.posts()) {
    if (scores.find(post.id) == scores.end()) {
      throw Error(ErrorKind::Validation, "missing score for post: " + post.id);
    }
  }

  std::vector<const Post*> order;
  order.reserve(posts.size());
  for (const auto& post : posts.posts()) order.push_back(&post);
  std::sort(order.begin(), order.end(), [&](const Post* a, const Post* b) {
    const double sa = scores.at(a->id);
    const double sb = scores.at(b->id);
    if (sa != sb) return sa > sb;
    return a->id < b->id;
  });

  const auto k = static_cast<std::size_t>(
      std::ceil(fraction * static_cast<double>(posts.size())));
  RankingResult result;
  result.fraction = fraction;
  double mpp_sum = 0.0, ml_sum = 0.0;
  std::size_t mpp_n = 0, ml_n = 0;
  for (std::size_t i = 0; i < k && i < order.size(); ++i) {
    const Post& post = *order[i];
    result.selected_ids.push_back(post.id);
    if (post.mpp) {
      mpp_sum += *post.mpp;
      ++mpp_n;
    } else {
      warn("selected post has no mpp ground truth: " + post.id);
    }
    if (post.ml) {
      ml_sum += *post.ml;
      ++ml_n;
    } else {
      warn("selected post has no ml ground truth: " + post.id);
    }
  }
  result.avg_mpp = mpp_n > 0 ? mpp_sum / static_cast<double>(mpp_n)
                             : std::numeric_limits<double>::quiet_NaN();
  result.avg_ml = ml_n > 0 ? ml_sum / static_cast<double>(ml_n)
                           : std::numeric_limits<double>::quiet_NaN();
  return result;
}

PairwiseReport pairwise_accuracy(
    const PairCollection& pairs,
    const std::map<std::string, PairScores>& scores,
    LabelConvention convention) {
  const auto lookup = [&](const std::string& id) -> const PairScores& {
    auto it = scores.find(id);
    if (it == scores.end()) {
      throw Error(ErrorKind::Validation, "missing score for post: " + id);
    }
    return it->second;
  };

  // Exact score ties predict 0 under either convention.
  const auto predict = [&](double s1, double s2) {
    int higher_first = 0;
    if (s1 > s2) {
      higher_first = 1;
    } else if (s1 < s2) {
      higher_first = -1;
    }
    if (higher_first == 0) return 0;
    const bool first_wins = higher_first > 0;
    return (convention == LabelConvention::HigherIs1) == first_wins ? 1 : 0;
  };

  PairwiseReport report;
  report.n_pairs = pairs.size();
  std::size_t mpp_correct = 0, ml_correct = 0;
  for (const auto& pair : pairs) {
    const PairScores& s1 = lookup(pair.post1.id);
    const PairScores& s2 = lookup(pair.post2.id);
    if (predict(s1.mpp, s2.mpp) == pair.mpp_label) ++mpp_correct;
    if (predict(s1.ml, s2.ml) == pair.ml_label) ++ml_correct;
  }
  if (report.n_pairs > 0) {
    report.mpp_accuracy =
        static_cast<double>(mpp_correct) / static_cast<double>(report.n_pairs);
    report.ml_accuracy =
        static_cast<double>(ml_correct) / static_cast<double>(report.n_pairs);
  }
  return report;
}

std::pair<PairCollection, PairCollection> split_holdout(
    const PairCollection& pairs, double ratio, std::uint64_t seed) {
  if (!(ratio > 0.0) || !(ratio < 1.0)) {
    throw Error(ErrorKind::Config, "split ratio must be in (0, 1)");
  }
  std::vector<std::size_t> indices(pairs.size());
  std::iota(indices.begin(), indices.end(), 0);
  Rng rng(seed);
  rng.shuffle(indices);

  const auto n_val = static_cast<std::size_t>(
      std::ceil(ratio * static_cast<double>(pairs.size())));
  std::vector<bool> in_val(pairs.size(), false);
  for (std::size_t i = 0; i < n_val && i < indices.size(); ++i) {
    in_val[indices[i]] = true;
  }

  PairCollection train, val;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    (in_val[i] ? val : train).push_back(pairs[i]);
  }
  return {std::move(train), std::move(val)};
}

PostCollection pool_pairs_posts(const PairCollection& pairs) {
  PostCollection pool;
  const auto consider = [&](const Post& post) {
    if (pool.find(post.id) == nullptr) pool.add(post);
  };
  for (const auto& pair : pairs) {
    consider(pair.post1);
    consider(pair.post2);
  }
  return pool;
}

RankingResult rank_pairwise_pool(const PairCollection& pairs,
                                 const std::map<std::string, double>& scores,
                                 double fraction) {
  return rank_top_fraction(scores, pool_pairs_posts(pairs), fraction);
}

}  // namespace opine
