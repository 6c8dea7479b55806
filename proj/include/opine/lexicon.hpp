#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "opine/corpus.hpp"

namespace opine {

enum class Polarity { Positive, Negative, Neutral };

struct LexiconEntry {
  double weight = 0.0;
  Polarity polarity = Polarity::Neutral;
};

/// A term -> weight map with a polarity partition. Weights are taken verbatim
/// from files; rescaling, when any, happens in the feature layer.
class Lexicon {
 public:
  Lexicon() = default;
  explicit Lexicon(std::string name) : name_(std::move(name)) {}

  // TSV columns: term, optional weight, optional polarity (P/N).
  // One-column files load as weight 1.0, NEUTRAL (count-only lists);
  // two-column files derive polarity from the weight's sign.
  static Lexicon load_tsv(const std::string& path, bool has_header);

  // NEUTRAL entries save without a polarity column, so a nonzero-weight
  // NEUTRAL entry reloads with sign-derived polarity.
  void save_tsv(const std::string& path) const;

  void add(std::string term, double weight, Polarity polarity);
  void add(std::string term, double weight);  // polarity from sign

  const std::string& name() const { return name_; }
  void set_name(std::string name) { name_ = std::move(name); }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  const LexiconEntry* find(std::string_view term) const;
  const std::map<std::string, LexiconEntry>& entries() const { return entries_; }

 private:
  std::string name_;
  std::map<std::string, LexiconEntry> entries_;  // ordered for stable output
};

/// Token-level counts over exactly two document classes, with the add-alpha
/// smoothed probability estimates the PMI weights are built from:
///   p(w,c) = (count(w,c) + a) / (N + a*|V|*2)
///   p(w)   = sum_c p(w,c)
///   p(c)   = (class_total(c) + a*|V|) / (N + a*|V|*2)
class ClassCorpusStats {
 public:
  ClassCorpusStats(std::array<std::string, 2> classes, double alpha);

  void add_token(const std::string& term, std::size_t class_index);

  const std::array<std::string, 2>& classes() const { return classes_; }
  std::size_t class_index(std::string_view name) const;  // throws Config
  double alpha() const { return alpha_; }
  std::int64_t total_tokens() const { return class_totals_[0] + class_totals_[1]; }
  std::int64_t class_total(std::size_t c) const { return class_totals_[c]; }
  std::size_t vocab_size() const { return counts_.size(); }
  std::int64_t count(std::string_view term, std::size_t c) const;

  double p_joint(std::string_view term, std::size_t c) const;
  double p_term(std::string_view term) const;
  double p_class(std::size_t c) const;

  const std::map<std::string, std::array<std::int64_t, 2>>& counts() const {
    return counts_;
  }

 private:
  std::array<std::string, 2> classes_;
  double alpha_;
  std::map<std::string, std::array<std::int64_t, 2>> counts_;
  std::array<std::int64_t, 2> class_totals_{0, 0};
};

// Token-level counts over a two-class corpus. Throws Config unless the docs
// carry exactly two distinct classes.
ClassCorpusStats collect_stats(const std::vector<ClassedPost>& docs, double alpha);

// Per-term PMI difference between the two classes:
//   weight(w) = log2(p(w,pos) / (p(w) p(pos))) - log2(p(w,neg) / (p(w) p(neg)))
// Realizes both the expert-likeness score (analyst vs amateur) and the market
// sentiment score (bullish vs bearish). Throws Numeric when a smoothed joint
// probability is zero (alpha = 0 and the term missing from a class).
Lexicon induce_pmi_lexicon(const ClassCorpusStats& stats,
                           const std::string& pos_class,
                           const std::string& neg_class);

enum class MatchMode {
  CountPositive,     // token occurrences with POSITIVE polarity
  CountNegative,     // token occurrences with NEGATIVE polarity
  CountAll,          // occurrences of any lexicon term
  SumWeights,        // sum of weight(w) * count(w)
  SumSignedWeights,  // positive-term sum minus negative-term sum
};

// Occurrence counting is multiset-based; `presence_only` collapses repeated
// occurrences of a term to one.
double match_tokens(std::span<const Token> tokens, const Lexicon& lexicon,
                    MatchMode mode, bool presence_only = false);

double match_lexicon(const Post& post, const Lexicon& lexicon, MatchMode mode,
                     bool presence_only = false);

}  // namespace opine
