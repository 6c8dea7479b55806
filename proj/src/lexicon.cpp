#include "opine/lexicon.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <unordered_map>

#include "opine/error.hpp"
#include "opine/util.hpp"

namespace opine {

Lexicon Lexicon::load_tsv(const std::string& path, bool has_header) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorKind::Io, "cannot open lexicon file: " + path);
  }
  Lexicon lexicon(path);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line_no == 1 && has_header) continue;
    if (trim(line).empty()) continue;
    auto cols = split_tsv(line);
    const std::string term = trim(cols[0]);
    if (term.empty()) {
      throw Error(ErrorKind::Parse,
                  path + ":" + std::to_string(line_no) + ": empty term");
    }
    double weight = 1.0;
    if (cols.size() >= 2) {
      try {
        weight = std::stod(trim(cols[1]));
      } catch (const std::exception&) {
        throw Error(ErrorKind::Parse, path + ":" + std::to_string(line_no) +
                                          ": bad weight: " + cols[1]);
      }
      if (!std::isfinite(weight)) {
        throw Error(ErrorKind::Validation,
                    path + ":" + std::to_string(line_no) + ": non-finite weight");
      }
    }
    if (cols.size() >= 3 && !trim(cols[2]).empty()) {
      const std::string p = trim(cols[2]);
      Polarity polarity;
      if (p == "P") {
        polarity = Polarity::Positive;
      } else if (p == "N") {
        polarity = Polarity::Negative;
      } else {
        throw Error(ErrorKind::Parse, path + ":" + std::to_string(line_no) +
                                          ": polarity must be P or N, got " + p);
      }
      lexicon.add(term, weight, polarity);
    } else if (cols.size() >= 2) {
      lexicon.add(term, weight);
    } else {
      lexicon.add(term, weight, Polarity::Neutral);
    }
  }
  return lexicon;
}

void Lexicon::save_tsv(const std::string& path) const {
  std::ofstream out(path);
  if (!out) {
    throw Error(ErrorKind::Io, "cannot write lexicon file: " + path);
  }
  for (const auto& [term, entry] : entries_) {
    out << term << '\t' << entry.weight;
    if (entry.polarity == Polarity::Positive) {
      out << "\tP";
    } else if (entry.polarity == Polarity::Negative) {
      out << "\tN";
    }
    out << '\n';
  }
  if (!out) {
    throw Error(ErrorKind::Io, "write failed: " + path);
  }
}

void Lexicon::add(std::string term, double weight, Polarity polarity) {
  if (!std::isfinite(weight)) {
    throw Error(ErrorKind::Validation, "non-finite weight for term: " + term);
  }
  entries_[std::move(term)] = LexiconEntry{weight, polarity};
}

void Lexicon::add(std::string term, double weight) {
  Polarity polarity = weight > 0   ? Polarity::Positive
                      : weight < 0 ? Polarity::Negative
                                   : Polarity::Neutral;
  add(std::move(term), weight, polarity);
}

const LexiconEntry* Lexicon::find(std::string_view term) const {
  auto it = entries_.find(std::string(term));
  return it == entries_.end() ? nullptr : &it->second;
}

ClassCorpusStats::ClassCorpusStats(std::array<std::string, 2> classes,
                                   double alpha)
    : classes_(std::move(classes)), alpha_(alpha) {
  if (classes_[0] == classes_[1]) {
    throw Error(ErrorKind::Config, "the two classes must be distinct");
  }
  if (alpha_ < 0) {
    throw Error(ErrorKind::Config, "smoothing alpha must be >= 0");
  }
}

void ClassCorpusStats::add_token(const std::string& term,
                                 std::size_t class_index) {
  counts_[term][class_index] += 1;
  class_totals_[class_index] += 1;
}

std::size_t ClassCorpusStats::class_index(std::string_view name) const {
  if (name == classes_[0]) return 0;
  if (name == classes_[1]) return 1;
  throw Error(ErrorKind::Config, "unknown class: " + std::string(name));
}

std::int64_t ClassCorpusStats::count(std::string_view term,
                                     std::size_t c) const {
  auto it = counts_.find(std::string(term));
  return it == counts_.end() ? 0 : it->second[c];
}

double ClassCorpusStats::p_joint(std::string_view term, std::size_t c) const {
  const double denom = static_cast<double>(total_tokens()) +
                       alpha_ * static_cast<double>(vocab_size()) * 2.0;
  return (static_cast<double>(count(term, c)) + alpha_) / denom;
}

double ClassCorpusStats::p_term(std::string_view term) const {
  return p_joint(term, 0) + p_joint(term, 1);
}

double ClassCorpusStats::p_class(std::size_t c) const {
  const double denom = static_cast<double>(total_tokens()) +
                       alpha_ * static_cast<double>(vocab_size()) * 2.0;
  return (static_cast<double>(class_totals_[c]) +
          alpha_ * static_cast<double>(vocab_size())) /
         denom;
}

ClassCorpusStats collect_stats(const std::vector<ClassedPost>& docs,
                               double alpha) {
  std::set<std::string> class_names;
  for (const auto& doc : docs) class_names.insert(doc.doc_class);
  if (class_names.size() != 2) {
    throw Error(ErrorKind::Config,
                "induction corpus must carry exactly two classes, got " +
                    std::to_string(class_names.size()));
  }
  auto it = class_names.begin();
  std::array<std::string, 2> classes{*it, *std::next(it)};
  ClassCorpusStats stats(classes, alpha);
  for (const auto& doc : docs) {
    const std::size_t c = stats.class_index(doc.doc_class);
    for (const auto& token : primary_tokens(doc.post)) {
      stats.add_token(token.surface, c);
    }
  }
  return stats;
}

Lexicon induce_pmi_lexicon(const ClassCorpusStats& stats,
                           const std::string& pos_class,
                           const std::string& neg_class) {
  const std::size_t pos = stats.class_index(pos_class);
  const std::size_t neg = stats.class_index(neg_class);
  if (pos == neg) {
    throw Error(ErrorKind::Config, "pos and neg class must differ");
  }
  Lexicon lexicon("pmi:" + pos_class + "-" + neg_class);
  for (const auto& [term, _] : stats.counts()) {
    const double joint_pos = stats.p_joint(term, pos);
    const double joint_neg = stats.p_joint(term, neg);
    if (joint_pos <= 0.0 || joint_neg <= 0.0) {
      throw Error(ErrorKind::Numeric,
                  "zero smoothed joint probability for term: " + term);
    }
    const double p_w = stats.p_term(term);
    const double pmi_pos = std::log2(joint_pos / (p_w * stats.p_class(pos)));
    const double pmi_neg = std::log2(joint_neg / (p_w * stats.p_class(neg)));
    lexicon.add(term, pmi_pos - pmi_neg);
  }
  return lexicon;
}

double match_tokens(std::span<const Token> tokens, const Lexicon& lexicon,
                    MatchMode mode, bool presence_only) {
  // Multiset counts of matched terms; presence mode caps each count at 1.
  std::unordered_map<std::string_view, std::int64_t> matched;
  for (const auto& token : tokens) {
    if (lexicon.find(token.surface) != nullptr) {
      matched[token.surface] += 1;
    }
  }
  double result = 0.0;
  for (auto& [term, count] : matched) {
    const LexiconEntry& entry = *lexicon.find(term);
    const double n = presence_only ? 1.0 : static_cast<double>(count);
    switch (mode) {
      case MatchMode::CountPositive:
        if (entry.polarity == Polarity::Positive) result += n;
        break;
      case MatchMode::CountNegative:
        if (entry.polarity == Polarity::Negative) result += n;
        break;
      case MatchMode::CountAll:
        result += n;
        break;
      case MatchMode::SumWeights:
        result += entry.weight * n;
        break;
      case MatchMode::SumSignedWeights:
        if (entry.polarity == Polarity::Positive) {
          result += entry.weight * n;
        } else if (entry.polarity == Polarity::Negative) {
          result -= entry.weight * n;
        }
        break;
    }
  }
  return result;
}

double match_lexicon(const Post& post, const Lexicon& lexicon, MatchMode mode,
                     bool presence_only) {
  const auto tokens = primary_tokens(post);
  return match_tokens(tokens, lexicon, mode, presence_only);
}

}  // namespace opine
