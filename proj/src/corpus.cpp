#include "opine/corpus.hpp"

#include <fstream>

#include <json.hpp>

#include "opine/error.hpp"
#include "opine/util.hpp"

namespace opine {

using nlohmann::json;

std::string_view pos_tag_name(PosTag tag) {
  switch (tag) {
    case PosTag::Noun: return "NOUN";
    case PosTag::Verb: return "VERB";
    case PosTag::Cardinal: return "CARDINAL";
    case PosTag::Other: return "OTHER";
  }
  return "OTHER";
}

std::optional<PosTag> pos_tag_from_name(std::string_view name) {
  if (name == "NOUN") return PosTag::Noun;
  if (name == "VERB") return PosTag::Verb;
  if (name == "CARDINAL") return PosTag::Cardinal;
  if (name == "OTHER") return PosTag::Other;
  return std::nullopt;
}

void PostCollection::add(Post post) {
  if (post.id.empty()) {
    throw Error(ErrorKind::Validation, "post id must be non-empty");
  }
  auto [it, inserted] = index_.emplace(post.id, posts_.size());
  if (!inserted) {
    throw Error(ErrorKind::Validation, "duplicate post id: " + post.id);
  }
  posts_.push_back(std::move(post));
}

const Post* PostCollection::find(std::string_view id) const {
  auto it = index_.find(std::string(id));
  return it == index_.end() ? nullptr : &posts_[it->second];
}

namespace {

std::ifstream open_or_throw(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorKind::Io, "cannot open file: " + path);
  }
  return in;
}

[[noreturn]] void line_error(const std::string& path, std::size_t line_no,
                             const std::string& what) {
  throw Error(ErrorKind::Parse,
              path + ":" + std::to_string(line_no) + ": " + what);
}

Post parse_post(const json& j, const std::string& path, std::size_t line_no) {
  if (!j.is_object()) line_error(path, line_no, "post record is not an object");
  Post post;
  try {
    post.id = j.at("id").get<std::string>();
    post.text_primary = j.value("text_primary", std::string());
    if (j.contains("text_translated") && !j["text_translated"].is_null()) {
      post.text_translated = j["text_translated"].get<std::string>();
    }
    if (j.contains("mpp") && !j["mpp"].is_null()) {
      post.mpp = j["mpp"].get<double>();
    }
    if (j.contains("ml") && !j["ml"].is_null()) {
      post.ml = j["ml"].get<double>();
    }
    if (j.contains("tokens") && !j["tokens"].is_null()) {
      std::vector<Token> tokens;
      for (const auto& t : j["tokens"]) {
        Token tok;
        tok.surface = t.get<std::string>();
        if (tok.surface.empty()) {
          line_error(path, line_no, "empty token surface");
        }
        tokens.push_back(std::move(tok));
      }
      if (j.contains("pos") && !j["pos"].is_null()) {
        const auto& pos = j["pos"];
        if (pos.size() != tokens.size()) {
          line_error(path, line_no, "pos array not aligned to tokens");
        }
        for (std::size_t i = 0; i < tokens.size(); ++i) {
          auto tag = pos_tag_from_name(pos[i].get<std::string>());
          if (!tag) {
            line_error(path, line_no,
                       "unknown POS tag: " + pos[i].get<std::string>());
          }
          tokens[i].pos = *tag;
        }
      }
      post.tokens = std::move(tokens);
    } else if (j.contains("pos") && !j["pos"].is_null()) {
      line_error(path, line_no, "pos supplied without tokens");
    }
    if (j.contains("sentences") && !j["sentences"].is_null()) {
      std::vector<SentenceRange> sentences;
      std::size_t token_count = post.tokens ? post.tokens->size() : 0;
      std::size_t prev_end = 0;
      for (const auto& r : j["sentences"]) {
        if (!r.is_array() || r.size() != 2) {
          line_error(path, line_no, "sentence range is not a [start,end) pair");
        }
        SentenceRange range{r[0].get<std::size_t>(), r[1].get<std::size_t>()};
        if (range.begin > range.end || range.end > token_count ||
            range.begin < prev_end) {
          line_error(path, line_no, "sentence ranges must be ordered, disjoint "
                                    "index ranges into tokens");
        }
        prev_end = range.end;
        sentences.push_back(range);
      }
      post.sentences = std::move(sentences);
    }
  } catch (const json::exception& e) {
    line_error(path, line_no, e.what());
  }
  return post;
}

int parse_binary_label(const json& j, const char* key, const std::string& path,
                       std::size_t line_no) {
  if (!j.contains(key)) {
    line_error(path, line_no, std::string("missing label: ") + key);
  }
  long long v = 0;
  try {
    v = j.at(key).get<long long>();
  } catch (const json::exception& e) {
    line_error(path, line_no, e.what());
  }
  if (v != 0 && v != 1) {
    throw Error(ErrorKind::Validation,
                path + ":" + std::to_string(line_no) + ": " + key +
                    " must be 0 or 1, got " + std::to_string(v));
  }
  return static_cast<int>(v);
}

// Calls fn(parsed_json, line_no) for every non-blank line.
template <typename Fn>
void for_each_jsonl(const std::string& path, Fn&& fn) {
  std::ifstream in = open_or_throw(path);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      line_error(path, line_no, e.what());
    }
    fn(j, line_no);
  }
}

}  // namespace

PostCollection load_posts(const std::string& path) {
  PostCollection collection;
  for_each_jsonl(path, [&](const json& j, std::size_t line_no) {
    collection.add(parse_post(j, path, line_no));
  });
  return collection;
}

PairCollection load_pairs(const std::string& path) {
  PairCollection pairs;
  for_each_jsonl(path, [&](const json& j, std::size_t line_no) {
    if (!j.contains("post1") || !j.contains("post2")) {
      line_error(path, line_no, "pair record needs post1 and post2");
    }
    LabeledPair pair;
    pair.post1 = parse_post(j["post1"], path, line_no);
    pair.post2 = parse_post(j["post2"], path, line_no);
    pair.mpp_label = parse_binary_label(j, "mpp_label", path, line_no);
    pair.ml_label = parse_binary_label(j, "ml_label", path, line_no);
    pairs.push_back(std::move(pair));
  });
  return pairs;
}

std::vector<ClassedPost> load_classed_posts(const std::string& path,
                                            const std::string& class_field) {
  std::vector<ClassedPost> docs;
  for_each_jsonl(path, [&](const json& j, std::size_t line_no) {
    ClassedPost doc;
    doc.post = parse_post(j, path, line_no);
    if (!j.contains(class_field) || !j[class_field].is_string()) {
      line_error(path, line_no, "missing class field: " + class_field);
    }
    doc.doc_class = j[class_field].get<std::string>();
    docs.push_back(std::move(doc));
  });
  return docs;
}

namespace {

bool is_ascii_alnum(char32_t cp) {
  return (cp >= '0' && cp <= '9') || (cp >= 'a' && cp <= 'z') ||
         (cp >= 'A' && cp <= 'Z');
}

bool is_cjk_punct_or_fullwidth(char32_t cp) {
  return (cp >= 0x3000 && cp <= 0x303F) || (cp >= 0xFF00 && cp <= 0xFFEF);
}

// Run characters: ASCII alphanumerics plus non-CJK letters above ASCII
// (accented Latin, Greek, ...). CJK punctuation and fullwidth forms separate.
bool is_run_char(char32_t cp) {
  if (cp < 0x80) return is_ascii_alnum(cp);
  return !is_cjk_ideograph(cp) && !is_cjk_punct_or_fullwidth(cp);
}

bool is_ascii_digit(char32_t cp) { return cp >= '0' && cp <= '9'; }

void append_utf8(std::string& out, char32_t cp) {
  if (cp < 0x80) {
    out += static_cast<char>(cp);
  } else if (cp < 0x800) {
    out += static_cast<char>(0xC0 | (cp >> 6));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else if (cp < 0x10000) {
    out += static_cast<char>(0xE0 | (cp >> 12));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else {
    out += static_cast<char>(0xF0 | (cp >> 18));
    out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  }
}

}  // namespace

std::vector<Token> fallback_tokenize(std::string_view text) {
  // Decode up front so we can look one code point ahead for "3.5".
  std::vector<char32_t> cps;
  std::size_t i = 0;
  while (i < text.size()) cps.push_back(utf8_next(text, i));

  std::vector<Token> tokens;
  std::string run;
  const auto flush = [&] {
    if (!run.empty()) {
      tokens.push_back(Token{run, std::nullopt});
      run.clear();
    }
  };

  for (std::size_t k = 0; k < cps.size(); ++k) {
    char32_t cp = cps[k];
    if (is_cjk_ideograph(cp)) {
      flush();
      std::string one;
      append_utf8(one, cp);
      tokens.push_back(Token{std::move(one), std::nullopt});
    } else if (is_run_char(cp)) {
      append_utf8(run, cp);
    } else if (cp == '.' && k > 0 && k + 1 < cps.size() &&
               is_ascii_digit(cps[k - 1]) && is_ascii_digit(cps[k + 1]) &&
               !run.empty()) {
      run += '.';  // decimal point inside a number
    } else {
      flush();
    }
  }
  flush();
  return tokens;
}

TagDictionary TagDictionary::load_tsv(const std::string& path) {
  std::ifstream in = open_or_throw(path);
  TagDictionary dict;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    auto cols = split_tsv(line);
    if (cols.size() != 2) {
      line_error(path, line_no, "expected columns term, tag");
    }
    auto tag = pos_tag_from_name(trim(cols[1]));
    if (!tag || (*tag != PosTag::Noun && *tag != PosTag::Verb)) {
      throw Error(ErrorKind::Validation,
                  path + ":" + std::to_string(line_no) +
                      ": tag must be NOUN or VERB, got " + cols[1]);
    }
    dict.add(trim(cols[0]), *tag);
  }
  return dict;
}

void TagDictionary::add(std::string term, PosTag tag) {
  tags_[std::move(term)] = tag;
}

std::optional<PosTag> TagDictionary::lookup(std::string_view term) const {
  auto it = tags_.find(std::string(term));
  if (it == tags_.end()) return std::nullopt;
  return it->second;
}

PosTag fallback_pos_tag(std::string_view surface, const TagDictionary& dict) {
  bool numeric = !surface.empty();
  bool seen_dot = false;
  for (std::size_t i = 0; i < surface.size(); ++i) {
    char c = surface[i];
    if (c == '.' && !seen_dot && i > 0 && i + 1 < surface.size()) {
      seen_dot = true;
      continue;
    }
    if (c < '0' || c > '9') {
      numeric = false;
      break;
    }
  }
  if (numeric) return PosTag::Cardinal;
  if (auto tag = dict.lookup(surface)) return *tag;
  return PosTag::Other;
}

std::vector<Token> primary_tokens(const Post& post) {
  if (post.tokens) return *post.tokens;
  return fallback_tokenize(post.text_primary);
}

const std::string& select_text(const Post& post, TextField field) {
  if (field == TextField::Translated && post.text_translated) {
    return *post.text_translated;
  }
  return post.text_primary;
}

const std::string& require_text(const Post& post, TextField field) {
  if (field == TextField::Translated) {
    if (!post.text_translated) {
      throw Error(ErrorKind::Validation,
                  "post " + post.id + " has no translated text");
    }
    return *post.text_translated;
  }
  return post.text_primary;
}

std::vector<Token> tokens_for(const Post& post, TextField field) {
  if (field == TextField::Translated && post.text_translated) {
    return fallback_tokenize(*post.text_translated);
  }
  return primary_tokens(post);
}

}  // namespace opine
