#include "opine/features.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <thread>

#include <json.hpp>

#include "opine/error.hpp"
#include "opine/util.hpp"

namespace opine {

using nlohmann::json;

bool is_component_name(std::string_view name) {
  return std::find(kComponentNames.begin(), kComponentNames.end(), name) !=
         kComponentNames.end();
}

FeatureVector::FeatureVector() {
  for (auto name : kComponentNames) components.emplace(std::string(name), 0.0);
}

double FeatureVector::get(std::string_view name) const {
  auto it = components.find(std::string(name));
  if (it == components.end()) {
    throw Error(ErrorKind::Config, "unknown component: " + std::string(name));
  }
  return it->second;
}

void FeatureVector::set(std::string_view name, double value) {
  if (!is_component_name(name)) {
    throw Error(ErrorKind::Config, "unknown component: " + std::string(name));
  }
  components[std::string(name)] = value;
}

void FeatureTable::add(std::string id, FeatureVector fv) {
  auto [it, inserted] = index_.emplace(id, rows_.size());
  if (!inserted) {
    throw Error(ErrorKind::Validation, "duplicate feature row id: " + id);
  }
  rows_.emplace_back(std::move(id), std::move(fv));
}

const FeatureVector* FeatureTable::find(std::string_view id) const {
  auto it = index_.find(std::string(id));
  return it == index_.end() ? nullptr : &rows_[it->second].second;
}

FeatureTable FeatureTable::load_jsonl(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorKind::Io, "cannot open features file: " + path);
  }
  FeatureTable table;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    json j;
    try {
      j = json::parse(line);
      FeatureVector fv;
      for (auto name : kComponentNames) {
        const std::string key(name);
        if (j.contains(key)) fv.set(key, j[key].get<double>());
      }
      table.add(j.at("id").get<std::string>(), std::move(fv));
    } catch (const json::exception& e) {
      throw Error(ErrorKind::Parse,
                  path + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return table;
}

void FeatureTable::save_jsonl(const std::string& path) const {
  std::ofstream out(path);
  if (!out) {
    throw Error(ErrorKind::Io, "cannot write features file: " + path);
  }
  for (const auto& [id, fv] : rows_) {
    json j;
    j["id"] = id;
    for (const auto& [name, value] : fv.components) j[name] = value;
    out << j.dump() << '\n';
  }
  if (!out) {
    throw Error(ErrorKind::Io, "write failed: " + path);
  }
}

const std::vector<std::string>& ScoreTable::class_names(ClassSet class_set) {
  static const std::vector<std::string> fls{"FLS", "NON_FLS", "NOT_FLS"};
  static const std::vector<std::string> tone{"pos_tone", "neg_tone"};
  return class_set == ClassSet::Fls ? fls : tone;
}

ScoreTable ScoreTable::load_jsonl(const std::string& path, ClassSet class_set) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorKind::Io, "cannot open score file: " + path);
  }
  ScoreTable table(class_set);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    try {
      json j = json::parse(line);
      Row row;
      row.sentence_index = j.at("sentence_index").get<long long>();
      if (row.sentence_index < 0) {
        throw Error(ErrorKind::Validation,
                    path + ":" + std::to_string(line_no) +
                        ": sentence_index must be >= 0");
      }
      for (const auto& [key, value] : j.at("logits").items()) {
        row.logits[key] = value.get<double>();
      }
      table.add_row(j.at("post_id").get<std::string>(), std::move(row));
    } catch (const json::exception& e) {
      throw Error(ErrorKind::Parse,
                  path + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return table;
}

void ScoreTable::add_row(const std::string& post_id, Row row) {
  const auto& names = class_names(class_set_);
  bool ok = row.logits.size() == names.size();
  if (ok) {
    for (const auto& name : names) ok = ok && row.logits.count(name) > 0;
  }
  if (!ok) {
    std::string keys;
    for (const auto& [key, _] : row.logits) keys += key + " ";
    throw Error(ErrorKind::Parse,
                "score row for post " + post_id +
                    " does not match the class set; got keys: " + keys);
  }
  rows_[post_id].push_back(std::move(row));
}

const std::vector<ScoreTable::Row>* ScoreTable::rows_for(
    std::string_view post_id) const {
  auto it = rows_.find(std::string(post_id));
  return it == rows_.end() ? nullptr : &it->second;
}

FeatureOptions FeatureOptions::from_json_text(const std::string& text) {
  FeatureOptions options;
  if (trim(text).empty()) return options;
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Config, std::string("bad options JSON: ") + e.what());
  }
  const auto field = [](const json& v) {
    const std::string s = v.get<std::string>();
    if (s == "primary") return TextField::Primary;
    if (s == "translated") return TextField::Translated;
    throw Error(ErrorKind::Config, "text field must be primary|translated: " + s);
  };
  for (const auto& [key, value] : j.items()) {
    if (key == "text_len") {
      options.len_text = field(value);
    } else if (key == "text_finprolex") {
      options.finprolex_text = field(value);
    } else if (key == "text_pos") {
      options.pos_text = field(value);
    } else if (key == "text_finword") {
      options.finword_text = field(value);
    } else if (key == "text_lm") {
      options.lm_text = field(value);
    } else if (key == "presence_counts") {
      options.presence_counts = value.get<bool>();
    } else if (key == "finprolex_fitted") {
      options.finprolex_fitted = value.get<bool>();
    } else if (key == "finprolex_weight_threshold") {
      options.finprolex_weight_threshold = value.get<double>();
    } else if (key == "sum_then_normalize") {
      options.sum_then_normalize = value.get<bool>();
    } else if (key == "lowercase_match") {
      options.lowercase_match = value.get<bool>();
    } else if (key == "normalize") {
      options.normalize = value.get<bool>();
    } else if (key == "raw_components") {
      for (const auto& name : value) {
        const std::string n = name.get<std::string>();
        if (!is_component_name(n)) {
          throw Error(ErrorKind::Config, "unknown component in raw_components: " + n);
        }
        options.raw_components.insert(n);
      }
    } else if (key == "jobs") {
      options.jobs = value.get<int>();
      if (options.jobs < 1) {
        throw Error(ErrorKind::Config, "jobs must be >= 1");
      }
    } else if (key == "tag_dict") {
      // resolved by the caller: the option block stays a plain path here
      value.get<std::string>();
    } else {
      throw Error(ErrorKind::Config, "unknown feature option: " + key);
    }
  }
  return options;
}

double length_feature(const Post& post, TextField field) {
  return static_cast<double>(tokens_for(post, field).size());
}

namespace {

// Exponential normalization with max subtraction.
std::map<std::string, double> simplex(const std::map<std::string, double>& logits) {
  double max_logit = -std::numeric_limits<double>::infinity();
  for (const auto& [_, v] : logits) max_logit = std::max(max_logit, v);
  std::map<std::string, double> out;
  double denom = 0.0;
  for (const auto& [key, v] : logits) {
    const double e = std::exp(v - max_logit);
    out[key] = e;
    denom += e;
  }
  for (auto& [_, v] : out) v /= denom;
  return out;
}

}  // namespace

std::map<std::string, double> model_score_feature(const Post& post,
                                                  const ScoreTable& table,
                                                  bool sum_then_normalize) {
  const auto& names = ScoreTable::class_names(table.class_set());
  std::map<std::string, double> result;
  for (const auto& name : names) result[name] = 0.0;

  const auto* rows = table.rows_for(post.id);
  if (rows == nullptr || rows->empty()) return result;

  if (sum_then_normalize) {
    std::map<std::string, double> summed;
    for (const auto& name : names) summed[name] = 0.0;
    for (const auto& row : *rows) {
      for (const auto& [key, v] : row.logits) summed[key] += v;
    }
    return simplex(summed);
  }

  for (const auto& row : *rows) {
    for (const auto& [key, v] : simplex(row.logits)) result[key] += v;
  }
  const double n = static_cast<double>(rows->size());
  for (auto& [_, v] : result) v /= n;
  return result;
}

PosCounts pos_features(const Post& post, const TagDictionary& dict,
                       TextField field) {
  PosCounts counts;
  for (const auto& token : tokens_for(post, field)) {
    const PosTag tag =
        token.pos ? *token.pos : fallback_pos_tag(token.surface, dict);
    switch (tag) {
      case PosTag::Noun: counts.nouns += 1; break;
      case PosTag::Cardinal: counts.cards += 1; break;
      case PosTag::Verb: counts.verbs += 1; break;
      case PosTag::Other: break;
    }
  }
  return counts;
}

std::map<std::string, double> normalize_pool(
    const std::map<std::string, double>& values) {
  if (values.empty()) {
    throw Error(ErrorKind::Validation, "cannot normalize an empty pool");
  }
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (const auto& [_, v] : values) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  std::map<std::string, double> out;
  if (hi == lo) {
    for (const auto& [id, _] : values) out[id] = 0.0;
    return out;
  }
  const double range = hi - lo;
  for (const auto& [id, v] : values) out[id] = (v - lo) / range;
  return out;
}

namespace {

Lexicon lowercase_copy(const Lexicon& lexicon) {
  Lexicon out(lexicon.name());
  for (const auto& [term, entry] : lexicon.entries()) {
    out.add(to_lower_ascii(term), entry.weight, entry.polarity);
  }
  return out;
}

std::vector<Token> lowercase_tokens(std::vector<Token> tokens) {
  for (auto& token : tokens) token.surface = to_lower_ascii(token.surface);
  return tokens;
}

}  // namespace

FeatureTable build_feature_vectors(const PostCollection& pool,
                                   const FeatureResources& resources,
                                   const FeatureOptions& options) {
  if (resources.finprolex == nullptr) warn("no finprolex lexicon; finprolex = 0");
  if (resources.finword == nullptr) {
    warn("no market sentiment lexicon; finword_pos/finword_neg = 0");
  }
  if (resources.lm == nullptr) warn("no fitted lm lexicon; lm = 0");
  if (resources.fls == nullptr) warn("no fls scores; fls/non_fls/not_fls = 0");
  if (resources.tone == nullptr) warn("no tone scores; pos_tone/neg_tone = 0");

  // Resolve per-run lexicon variants once.
  std::optional<Lexicon> finprolex_storage;
  const Lexicon* finprolex = resources.finprolex;
  if (finprolex != nullptr && options.finprolex_weight_threshold) {
    Lexicon filtered(finprolex->name());
    for (const auto& [term, entry] : finprolex->entries()) {
      if (entry.weight >= *options.finprolex_weight_threshold) {
        filtered.add(term, entry.weight, entry.polarity);
      }
    }
    finprolex_storage = std::move(filtered);
    finprolex = &*finprolex_storage;
  }
  std::optional<Lexicon> finword_storage;
  const Lexicon* finword = resources.finword;
  std::optional<Lexicon> lm_storage;
  const Lexicon* lm = resources.lm;
  if (options.lowercase_match) {
    if (finword != nullptr) {
      finword_storage = lowercase_copy(*finword);
      finword = &*finword_storage;
    }
    if (lm != nullptr) {
      lm_storage = lowercase_copy(*lm);
      lm = &*lm_storage;
    }
  }
  static const TagDictionary kEmptyDict;
  const TagDictionary& dict =
      resources.tag_dict != nullptr ? *resources.tag_dict : kEmptyDict;

  const auto& posts = pool.posts();
  std::vector<FeatureVector> raw(posts.size());

  const auto compute_one = [&](std::size_t i) {
    const Post& post = posts[i];
    FeatureVector fv;
    fv.set("len", length_feature(post, options.len_text));
    if (finprolex != nullptr) {
      const auto tokens = tokens_for(post, options.finprolex_text);
      const MatchMode mode = options.finprolex_fitted ? MatchMode::SumWeights
                                                      : MatchMode::CountAll;
      fv.set("finprolex",
             match_tokens(tokens, *finprolex, mode, options.presence_counts));
    }
    if (finword != nullptr) {
      auto tokens = tokens_for(post, options.finword_text);
      if (options.lowercase_match) tokens = lowercase_tokens(std::move(tokens));
      fv.set("finword_pos", match_tokens(tokens, *finword,
                                         MatchMode::CountPositive,
                                         options.presence_counts));
      fv.set("finword_neg", match_tokens(tokens, *finword,
                                         MatchMode::CountNegative,
                                         options.presence_counts));
    }
    if (resources.fls != nullptr) {
      const auto scores =
          model_score_feature(post, *resources.fls, options.sum_then_normalize);
      fv.set("fls", scores.at("FLS"));
      fv.set("non_fls", scores.at("NON_FLS"));
      fv.set("not_fls", scores.at("NOT_FLS"));
    }
    if (resources.tone != nullptr) {
      const auto scores = model_score_feature(post, *resources.tone,
                                              options.sum_then_normalize);
      fv.set("pos_tone", scores.at("pos_tone"));
      fv.set("neg_tone", scores.at("neg_tone"));
    }
    if (lm != nullptr) {
      auto tokens = tokens_for(post, options.lm_text);
      if (options.lowercase_match) tokens = lowercase_tokens(std::move(tokens));
      fv.set("lm", match_tokens(tokens, *lm, MatchMode::SumSignedWeights,
                                options.presence_counts));
    }
    const PosCounts counts = pos_features(post, dict, options.pos_text);
    fv.set("nouns", static_cast<double>(counts.nouns));
    fv.set("cards", static_cast<double>(counts.cards));
    fv.set("verbs", static_cast<double>(counts.verbs));
    raw[i] = std::move(fv);
  };

  const int jobs = std::max(1, options.jobs);
  if (jobs == 1 || posts.size() < 2) {
    for (std::size_t i = 0; i < posts.size(); ++i) compute_one(i);
  } else {
    const std::size_t n_threads =
        std::min<std::size_t>(jobs, posts.size());
    std::vector<std::thread> workers;
    workers.reserve(n_threads);
    for (std::size_t t = 0; t < n_threads; ++t) {
      workers.emplace_back([&, t] {
        for (std::size_t i = t; i < posts.size(); i += n_threads) {
          compute_one(i);
        }
      });
    }
    for (auto& w : workers) w.join();
  }

  if (options.normalize && !posts.empty()) {
    for (auto name : kComponentNames) {
      const std::string component(name);
      if (options.raw_components.count(component)) continue;
      std::map<std::string, double> values;
      for (std::size_t i = 0; i < posts.size(); ++i) {
        values[posts[i].id] = raw[i].get(component);
      }
      const auto normalized = normalize_pool(values);
      for (std::size_t i = 0; i < posts.size(); ++i) {
        raw[i].set(component, normalized.at(posts[i].id));
      }
    }
  }

  FeatureTable table;
  for (std::size_t i = 0; i < posts.size(); ++i) {
    table.add(posts[i].id, std::move(raw[i]));
  }
  return table;
}

}  // namespace opine
