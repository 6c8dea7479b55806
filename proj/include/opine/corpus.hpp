#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace opine {

enum class PosTag { Noun, Verb, Cardinal, Other };

std::string_view pos_tag_name(PosTag tag);
std::optional<PosTag> pos_tag_from_name(std::string_view name);

struct Token {
  std::string surface;
  std::optional<PosTag> pos;
};

// Half-open [begin, end) range of token indices.
struct SentenceRange {
  std::size_t begin = 0;
  std::size_t end = 0;
};

/// One opinion post. `mpp` and `ml` are fractional returns (0.2439 = 24.39%);
/// `ml` is non-positive in real data. `tokens`/`sentences` are the externally
/// segmented form when the producer supplied one.
struct Post {
  std::string id;
  std::string text_primary;
  std::optional<std::string> text_translated;
  std::optional<double> mpp;
  std::optional<double> ml;
  std::optional<std::vector<Token>> tokens;
  std::optional<std::vector<SentenceRange>> sentences;
};

class PostCollection {
 public:
  PostCollection() = default;

  // Rejects duplicate ids and empty ids.
  void add(Post post);

  const std::vector<Post>& posts() const { return posts_; }
  std::size_t size() const { return posts_.size(); }
  bool empty() const { return posts_.empty(); }
  const Post* find(std::string_view id) const;

 private:
  std::vector<Post> posts_;
  std::unordered_map<std::string, std::size_t> index_;
};

struct LabeledPair {
  Post post1;
  Post post2;
  int mpp_label = 0;  // exactly 0 or 1
  int ml_label = 0;
};

using PairCollection = std::vector<LabeledPair>;

// A post together with its document class ("analyst", "bullish", ...).
struct ClassedPost {
  Post post;
  std::string doc_class;
};

PostCollection load_posts(const std::string& path);
PairCollection load_pairs(const std::string& path);

// Loads post records that carry a class label under `class_field`.
std::vector<ClassedPost> load_classed_posts(const std::string& path,
                                            const std::string& class_field);

// Deterministic fallback segmentation: alphanumeric runs (decimal points
// between digits included) become single tokens, every CJK ideograph becomes
// its own token, whitespace and punctuation are dropped.
std::vector<Token> fallback_tokenize(std::string_view text);

class TagDictionary {
 public:
  TagDictionary() = default;

  // UTF-8 TSV with columns term, tag; tag must be NOUN or VERB.
  static TagDictionary load_tsv(const std::string& path);

  void add(std::string term, PosTag tag);
  std::optional<PosTag> lookup(std::string_view term) const;
  std::size_t size() const { return tags_.size(); }

 private:
  std::unordered_map<std::string, PosTag> tags_;
};

// Tag for a token without a supplied tag: decimal numbers are CARDINAL,
// dictionary hits are NOUN/VERB, everything else OTHER.
PosTag fallback_pos_tag(std::string_view surface, const TagDictionary& dict);

// Supplied tokens when present, otherwise the fallback segmentation of
// text_primary.
std::vector<Token> primary_tokens(const Post& post);

// Which language a feature or template reads.
enum class TextField { Primary, Translated };

// Translated falls back to the primary text when no translation is present.
const std::string& select_text(const Post& post, TextField field);

// Like select_text but throws when the requested translation is missing.
const std::string& require_text(const Post& post, TextField field);

// Primary: supplied tokens, else fallback segmentation of text_primary.
// Translated: fallback segmentation of text_translated when present,
// otherwise the primary tokens.
std::vector<Token> tokens_for(const Post& post, TextField field);

}  // namespace opine
