#include "opine/bayeslex.hpp"

#include <cmath>
#include <unordered_map>

#include "opine/error.hpp"

namespace opine {

SeedLexicon SeedLexicon::from_lexicon(const Lexicon& lexicon) {
  SeedLexicon seed;
  for (const auto& [term, entry] : lexicon.entries()) {
    if (entry.polarity == Polarity::Positive) {
      seed.positive_terms.insert(term);
    } else if (entry.polarity == Polarity::Negative) {
      seed.negative_terms.insert(term);
    }
  }
  seed.validate();
  return seed;
}

void SeedLexicon::validate() const {
  if (positive_terms.empty() || negative_terms.empty()) {
    throw Error(ErrorKind::Validation,
                "seed lexicon needs non-empty positive and negative lists");
  }
  for (const auto& term : positive_terms) {
    if (negative_terms.count(term)) {
      throw Error(ErrorKind::Validation,
                  "seed term in both polarities: " + term);
    }
  }
}

double effective_count(std::int64_t raw, CountModel model) {
  if (raw < 0) {
    throw Error(ErrorKind::Validation, "negative raw count");
  }
  if (model == CountModel::Multinomial) return static_cast<double>(raw);
  return std::log2(1.0 + static_cast<double>(raw));
}

MomentStats compute_moments(const PostCollection& docs, const SeedLexicon& seed,
                            CountModel model, TextField field) {
  MomentStats stats;
  std::unordered_map<std::string, double> pos_acc;
  std::unordered_map<std::string, double> neg_acc;

  for (const auto& post : docs.posts()) {
    const auto tokens = tokens_for(post, field);
    if (tokens.empty()) continue;
    const double n = static_cast<double>(tokens.size());

    std::unordered_map<std::string, std::int64_t> raw;
    for (const auto& token : tokens) raw[token.surface] += 1;

    double seed_pos = 0.0;
    double seed_neg = 0.0;
    std::unordered_map<std::string, double> eff;
    eff.reserve(raw.size());
    for (const auto& [term, count] : raw) {
      const double c = effective_count(count, model);
      eff.emplace(term, c);
      if (seed.positive_terms.count(term)) seed_pos += c;
      if (seed.negative_terms.count(term)) seed_neg += c;
    }

    for (const auto& [term, c] : eff) {
      const bool in_pos = seed.positive_terms.count(term) > 0;
      const bool in_neg = seed.negative_terms.count(term) > 0;
      const double anchor_pos = seed_pos - (in_pos ? c : 0.0);
      const double anchor_neg = seed_neg - (in_neg ? c : 0.0);
      if (anchor_pos != 0.0) pos_acc[term] += (c / n) * (anchor_pos / n);
      if (anchor_neg != 0.0) neg_acc[term] += (c / n) * (anchor_neg / n);
      // Make sure every vocabulary term is represented, even all-zero ones.
      pos_acc.try_emplace(term, 0.0);
      neg_acc.try_emplace(term, 0.0);
    }

    stats.seed_pos_mass += seed_pos;
    stats.seed_neg_mass += seed_neg;
    stats.total_length += n;
    stats.n_docs += 1;
  }

  if (stats.n_docs == 0) {
    throw Error(ErrorKind::Validation,
                "cannot estimate moments over an empty corpus");
  }

  const double d = static_cast<double>(stats.n_docs);
  for (const auto& [term, value] : pos_acc) stats.pos_moments[term] = value / d;
  for (const auto& [term, value] : neg_acc) stats.neg_moments[term] = value / d;
  return stats;
}

FittedLexicon fit_bayesian_lexicon(const PostCollection& docs,
                                   const SeedLexicon& seed, CountModel model,
                                   VocabularyMode vocabulary, TextField field) {
  seed.validate();
  const MomentStats stats = compute_moments(docs, seed, model, field);

  const auto in_vocabulary = [&](const std::string& term) {
    if (vocabulary == VocabularyMode::Full) return true;
    return seed.positive_terms.count(term) > 0 ||
           seed.negative_terms.count(term) > 0;
  };

  FittedLexicon fitted;
  fitted.model = model;
  fitted.base.set_name(model == CountModel::Dcm ? "fitted:dcm"
                                                : "fitted:multinomial");

  double pos_norm = 0.0;
  double neg_norm = 0.0;
  for (const auto& [term, m_pos] : stats.pos_moments) {
    if (!in_vocabulary(term)) continue;
    const double r = m_pos - stats.neg_moments.at(term);
    fitted.diagnostics[term] = r;
    if (r > 0) {
      pos_norm += r;
    } else if (r < 0) {
      neg_norm += -r;
    }
  }
  if (pos_norm == 0.0 && neg_norm == 0.0) {
    throw Error(ErrorKind::Numeric,
                "degenerate fit: no term carries moment evidence");
  }

  const double pos_share = stats.seed_pos_mass / stats.total_length;
  const double neg_share = stats.seed_neg_mass / stats.total_length;

  for (const auto& [term, r] : fitted.diagnostics) {
    if (r > 0) {
      fitted.base.add(term, r / pos_norm * pos_share, Polarity::Positive);
    } else if (r < 0) {
      fitted.base.add(term, -r / neg_norm * neg_share, Polarity::Negative);
    }
    // r == 0: dropped, zero evidence.
  }
  return fitted;
}

}  // namespace opine
