#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>

#include "opine/corpus.hpp"
#include "opine/lexicon.hpp"

namespace opine {

/// Seed word lists whose per-word weights get re-estimated without labels.
struct SeedLexicon {
  std::set<std::string> positive_terms;
  std::set<std::string> negative_terms;

  // Takes the POSITIVE/NEGATIVE partition of an existing lexicon.
  static SeedLexicon from_lexicon(const Lexicon& lexicon);

  void validate() const;  // throws Validation unless disjoint and non-empty
};

enum class CountModel { Multinomial, Dcm };

// MULTINOMIAL keeps raw counts; DCM damps repetition as log2(1 + raw),
// so 0 -> 0 and 1 -> 1.
double effective_count(std::int64_t raw, CountModel model);

/// Leave-one-out cross-moments of each term against the aggregate seed
/// counts, averaged over documents:
///   m_w+ = (1/D) sum_d (c_d(w)/n_d) * (s_d^{+,-w}/n_d)
/// where s_d^{+,-w} is the summed effective count of positive seed terms in
/// d excluding w itself. Lengths n_d are raw token counts.
struct MomentStats {
  std::map<std::string, double> pos_moments;
  std::map<std::string, double> neg_moments;
  double seed_pos_mass = 0.0;  // sum_d s_d^+
  double seed_neg_mass = 0.0;  // sum_d s_d^-
  double total_length = 0.0;   // sum_d n_d
  std::size_t n_docs = 0;
};

// Empty documents are skipped; a corpus with no non-empty documents throws.
// Documents with zero seed occurrences are retained and contribute zeros.
// `field` picks which language's tokens the estimator reads.
MomentStats compute_moments(const PostCollection& docs, const SeedLexicon& seed,
                            CountModel model,
                            TextField field = TextField::Primary);

enum class VocabularyMode { SeedOnly, Full };

struct FittedLexicon {
  Lexicon base;  // weights are fitted probabilities, polarity from sign(r_w)
  CountModel model = CountModel::Multinomial;
  std::map<std::string, double> diagnostics;  // term -> raw moment difference
};

/// Fits per-word predictive weights: r_w = m_w+ - m_w-, polarity = sign(r_w)
/// (zero-evidence terms are dropped), then within each polarity
///   w_hat = |r_w| / sum |r_v| * M_polarity
/// where M_polarity is that polarity's empirical seed mass share of the
/// corpus. Throws when every r_w is zero (degenerate fit).
FittedLexicon fit_bayesian_lexicon(const PostCollection& docs,
                                   const SeedLexicon& seed, CountModel model,
                                   VocabularyMode vocabulary,
                                   TextField field = TextField::Primary);

}  // namespace opine
