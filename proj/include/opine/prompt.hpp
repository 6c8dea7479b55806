#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "opine/corpus.hpp"

namespace opine {

/// Surface forms for the binary labels, e.g. {1: "more", 0: "less"}.
/// Texts must be distinct, non-empty, and free of the template delimiters
/// '#' and '.'.
class LabelVocabulary {
 public:
  LabelVocabulary() : LabelVocabulary("more", "less") {}
  LabelVocabulary(std::string text_for_1, std::string text_for_0);

  static LabelVocabulary from_json_text(const std::string& text);
  static LabelVocabulary load(const std::string& path);

  const std::string& render(int label) const;
  // -1 when the text is not a label.
  int parse(std::string_view text) const;

 private:
  std::string text_for_1_;
  std::string text_for_0_;
};

struct PromptShot {
  std::string text;
  std::int64_t token_estimate = 0;
};

struct PackedPrompt {
  std::vector<PromptShot> shots;
  std::string query;
  std::int64_t total_token_estimate = 0;
  std::int64_t budget = 0;

  // Shots joined by single newlines, query last.
  std::string text() const;
};

// One formatted labeled example:
//   post1 : <t1> post2: <t2> > maximal potential profit (MPP)| <mpp># maximal loss (ML)| <ml>.
PromptShot build_shot(const LabeledPair& pair, const LabelVocabulary& vocab,
                      TextField field = TextField::Primary);

// The shot template truncated immediately after ">".
std::string build_query(const LabeledPair& pair,
                        TextField field = TextField::Primary);

// Deterministic estimate: each CJK code point counts 1; the remaining code
// points count ceil(n / 4) together.
std::int64_t estimate_tokens(std::string_view text);

// Shuffles the shots under the seed, then greedily keeps every shot that
// still fits the budget alongside the query estimate. Throws when the query
// alone exceeds the budget. Separator newlines are not charged.
PackedPrompt pack_prompt(const std::vector<PromptShot>& shots,
                         const LabeledPair& query_pair, std::int64_t budget,
                         std::uint64_t seed,
                         TextField field = TextField::Primary);

struct ParsedLabels {
  int mpp_label = 0;
  int ml_label = 0;
};

// Reads the leftmost answer block; throws Parse when the markers are absent
// or a label text is outside the vocabulary.
ParsedLabels parse_completion(std::string_view text,
                              const LabelVocabulary& vocab);

struct T5Example {
  std::string input;   // post1 : %s post2 : %s  </s>
  std::string target;  // maximal potential profit (MPP) : %s maximal loss (ML) : %s </s>
};

// Text-to-text training pair for an external trainer.
T5Example t5_format(const LabeledPair& pair, const LabelVocabulary& vocab,
                    TextField field = TextField::Primary);

}  // namespace opine
