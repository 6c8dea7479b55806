#pragma once

#include <array>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "opine/corpus.hpp"
#include "opine/lexicon.hpp"

namespace opine {

// The thirteen reserved component names, in canonical order.
inline constexpr std::array<std::string_view, 13> kComponentNames = {
    "len",      "finprolex", "finword_pos", "finword_neg", "fls",
    "non_fls",  "not_fls",   "pos_tone",    "neg_tone",    "lm",
    "nouns",    "cards",     "verbs"};

bool is_component_name(std::string_view name);

/// Named per-post component scores. Always carries all thirteen reserved
/// components; sources that are absent contribute 0.
struct FeatureVector {
  std::map<std::string, double> components;

  FeatureVector();  // all reserved components present, zeroed
  double get(std::string_view name) const;
  void set(std::string_view name, double value);
};

class FeatureTable {
 public:
  void add(std::string id, FeatureVector fv);  // rejects duplicate ids
  const std::vector<std::pair<std::string, FeatureVector>>& rows() const {
    return rows_;
  }
  std::size_t size() const { return rows_.size(); }
  const FeatureVector* find(std::string_view id) const;

  // One flat object per line: {"id": ..., "len": ..., ...}.
  static FeatureTable load_jsonl(const std::string& path);
  void save_jsonl(const std::string& path) const;

 private:
  std::vector<std::pair<std::string, FeatureVector>> rows_;
  std::unordered_map<std::string, std::size_t> index_;
};

/// Sentence-level logits produced by an external classifier.
class ScoreTable {
 public:
  enum class ClassSet { Fls, Tone };

  struct Row {
    long long sentence_index = 0;
    std::map<std::string, double> logits;
  };

  explicit ScoreTable(ClassSet class_set) : class_set_(class_set) {}

  // JSONL rows {post_id, sentence_index, logits}; logit keys must equal the
  // class set exactly.
  static ScoreTable load_jsonl(const std::string& path, ClassSet class_set);

  static const std::vector<std::string>& class_names(ClassSet class_set);

  void add_row(const std::string& post_id, Row row);
  ClassSet class_set() const { return class_set_; }
  const std::vector<Row>* rows_for(std::string_view post_id) const;

 private:
  ClassSet class_set_;
  std::unordered_map<std::string, std::vector<Row>> rows_;
};

struct FeatureOptions {
  TextField len_text = TextField::Primary;
  TextField finprolex_text = TextField::Primary;
  TextField pos_text = TextField::Primary;
  TextField finword_text = TextField::Translated;
  TextField lm_text = TextField::Translated;
  bool presence_counts = false;       // presence-based lexicon counting
  bool finprolex_fitted = false;      // SUM_WEIGHTS instead of COUNT_ALL
  std::optional<double> finprolex_weight_threshold;  // drop entries below
  bool sum_then_normalize = false;    // sum logits once instead of per sentence
  bool lowercase_match = false;       // ASCII-lowercase finword/lm matching
  bool normalize = true;              // pool min-max normalization
  std::set<std::string> raw_components;  // skip normalization per component
  int jobs = 1;

  // Parses the documented options JSON (unknown keys rejected).
  static FeatureOptions from_json_text(const std::string& text);
};

struct FeatureResources {
  const Lexicon* finprolex = nullptr;
  const Lexicon* finword = nullptr;
  const Lexicon* lm = nullptr;
  const ScoreTable* fls = nullptr;
  const ScoreTable* tone = nullptr;
  const TagDictionary* tag_dict = nullptr;
};

double length_feature(const Post& post, TextField field = TextField::Primary);

// Per-sentence exponential normalization of the logits, averaged over the
// post's sentences; posts with no rows score 0 for every class.
std::map<std::string, double> model_score_feature(const Post& post,
                                                  const ScoreTable& table,
                                                  bool sum_then_normalize = false);

struct PosCounts {
  long long nouns = 0;
  long long cards = 0;
  long long verbs = 0;
};

PosCounts pos_features(const Post& post, const TagDictionary& dict,
                       TextField field = TextField::Primary);

// Min-max normalization over the pool; a constant pool maps to all zeros.
std::map<std::string, double> normalize_pool(
    const std::map<std::string, double>& values);

// Computes all thirteen components for every post, then normalizes each
// component over the pool. Missing resources contribute 0 with one warning.
FeatureTable build_feature_vectors(const PostCollection& pool,
                                   const FeatureResources& resources,
                                   const FeatureOptions& options);

}  // namespace opine
