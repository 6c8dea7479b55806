#include "opine/opine.h"

#include <algorithm>
#include <cstring>
#include <fstream>
#include <map>
#include <memory>
#include <string>

#include <json.hpp>

#include "opine/aggregate.hpp"
#include "opine/bayeslex.hpp"
#include "opine/client.hpp"
#include "opine/corpus.hpp"
#include "opine/error.hpp"
#include "opine/eval.hpp"
#include "opine/features.hpp"
#include "opine/lexicon.hpp"
#include "opine/prompt.hpp"
#include "opine/util.hpp"

using nlohmann::json;

struct opine_posts {
  opine::PostCollection value;
};
struct opine_pairs {
  opine::PairCollection value;
};
struct opine_lexicon {
  opine::Lexicon value;
};
struct opine_scores {
  opine::ScoreTable value;
};
struct opine_features {
  opine::FeatureTable value;
};
struct opine_spec {
  opine::AggregatorSpec value;
};

namespace {

thread_local std::string t_last_error;

opine_status status_for(opine::ErrorKind kind) {
  switch (kind) {
    case opine::ErrorKind::Io: return OPINE_ERR_IO;
    case opine::ErrorKind::Parse: return OPINE_ERR_PARSE;
    case opine::ErrorKind::Validation: return OPINE_ERR_VALIDATION;
    case opine::ErrorKind::Config: return OPINE_ERR_CONFIG;
    case opine::ErrorKind::Numeric: return OPINE_ERR_NUMERIC;
    case opine::ErrorKind::Runtime: return OPINE_ERR_RUNTIME;
  }
  return OPINE_ERR_RUNTIME;
}

opine_status fail(opine_status status, const std::string& message) {
  t_last_error = message;
  return status;
}

template <typename Fn>
opine_status guarded(Fn&& fn) {
  try {
    fn();
    t_last_error.clear();
    return OPINE_OK;
  } catch (const opine::Error& e) {
    return fail(status_for(e.kind()), e.what());
  } catch (const std::exception& e) {
    return fail(OPINE_ERR_RUNTIME, e.what());
  } catch (...) {
    return fail(OPINE_ERR_RUNTIME, "unknown error");
  }
}

opine_status require(bool ok, const char* what) {
  return ok ? OPINE_OK : fail(OPINE_ERR_ARGUMENT, what);
}

char* dup_string(const std::string& s) {
  char* out = new char[s.size() + 1];
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

opine::TargetMetric to_target(opine_target target) {
  return target == OPINE_TARGET_ML ? opine::TargetMetric::Ml
                                   : opine::TargetMetric::Mpp;
}

// Target scores for every feature row, with the optional ML sign flip.
std::map<std::string, double> score_table(const opine::FeatureTable& features,
                                          const opine::AggregatorSpec& spec,
                                          opine::TargetMetric target,
                                          bool invert_ml) {
  std::map<std::string, double> scores;
  const bool flip = invert_ml && target == opine::TargetMetric::Ml;
  for (const auto& [id, fv] : features.rows()) {
    const double s = opine::score(fv, spec, target);
    scores[id] = flip ? -s : s;
  }
  return scores;
}

json ranking_to_json(const opine::RankingResult& result) {
  json j;
  j["selected_ids"] = result.selected_ids;
  j["avg_mpp"] = result.avg_mpp;
  j["avg_ml"] = result.avg_ml;
  j["fraction"] = result.fraction;
  return j;
}

json pairwise_to_json(const opine::PairwiseReport& report) {
  json j;
  j["mpp_accuracy"] = report.mpp_accuracy;
  j["ml_accuracy"] = report.ml_accuracy;
  j["n_pairs"] = report.n_pairs;
  return j;
}

opine::LabelVocabulary vocab_from(const char* vocab_json) {
  if (vocab_json == nullptr || opine::trim(vocab_json).empty()) {
    return opine::LabelVocabulary();
  }
  return opine::LabelVocabulary::from_json_text(vocab_json);
}

opine::TextField text_field_from(const char* name) {
  if (name == nullptr || opine::trim(name).empty()) {
    return opine::TextField::Primary;
  }
  const std::string s = opine::trim(name);
  if (s == "primary") return opine::TextField::Primary;
  if (s == "translated") return opine::TextField::Translated;
  throw opine::Error(opine::ErrorKind::Config,
                     "text field must be primary|translated: " + s);
}

std::map<std::string, opine::PairScores> pair_score_table(
    const opine::FeatureTable& features, const opine::AggregatorSpec& spec,
    bool invert_ml) {
  std::map<std::string, opine::PairScores> scores;
  for (const auto& [id, fv] : features.rows()) {
    opine::PairScores s;
    s.mpp = opine::score(fv, spec, opine::TargetMetric::Mpp);
    s.ml = opine::score(fv, spec, opine::TargetMetric::Ml);
    if (invert_ml) s.ml = -s.ml;
    scores[id] = s;
  }
  return scores;
}

}  // namespace

extern "C" {

const char* opine_version(void) { return "0.1.0"; }

const char* opine_last_error(void) { return t_last_error.c_str(); }

void opine_string_free(char* s) { delete[] s; }

/* ---- corpus ---------------------------------------------------------- */

opine_status opine_posts_load(const char* path, opine_posts** out) {
  if (auto s = require(path && out, "path and out must be non-null")) return s;
  return guarded([&] {
    auto handle = std::make_unique<opine_posts>();
    handle->value = opine::load_posts(path);
    *out = handle.release();
  });
}

void opine_posts_free(opine_posts* posts) { delete posts; }

size_t opine_posts_size(const opine_posts* posts) {
  return posts ? posts->value.size() : 0;
}

opine_status opine_pairs_load(const char* path, opine_pairs** out) {
  if (auto s = require(path && out, "path and out must be non-null")) return s;
  return guarded([&] {
    auto handle = std::make_unique<opine_pairs>();
    handle->value = opine::load_pairs(path);
    *out = handle.release();
  });
}

void opine_pairs_free(opine_pairs* pairs) { delete pairs; }

size_t opine_pairs_size(const opine_pairs* pairs) {
  return pairs ? pairs->value.size() : 0;
}

opine_status opine_pairs_split(const opine_pairs* pairs, double ratio,
                               uint64_t seed, opine_pairs** train_out,
                               opine_pairs** val_out) {
  if (auto s = require(pairs && train_out && val_out,
                       "pairs, train_out, val_out must be non-null")) {
    return s;
  }
  return guarded([&] {
    auto [train, val] = opine::split_holdout(pairs->value, ratio, seed);
    auto train_handle = std::make_unique<opine_pairs>();
    train_handle->value = std::move(train);
    auto val_handle = std::make_unique<opine_pairs>();
    val_handle->value = std::move(val);
    *train_out = train_handle.release();
    *val_out = val_handle.release();
  });
}

opine_status opine_pairs_pool_posts(const opine_pairs* pairs,
                                    opine_posts** out) {
  if (auto s = require(pairs && out, "pairs and out must be non-null")) return s;
  return guarded([&] {
    auto handle = std::make_unique<opine_posts>();
    handle->value = opine::pool_pairs_posts(pairs->value);
    *out = handle.release();
  });
}

/* ---- lexicons -------------------------------------------------------- */

opine_status opine_lexicon_load(const char* path, int has_header,
                                opine_lexicon** out) {
  if (auto s = require(path && out, "path and out must be non-null")) return s;
  return guarded([&] {
    auto handle = std::make_unique<opine_lexicon>();
    handle->value = opine::Lexicon::load_tsv(path, has_header != 0);
    *out = handle.release();
  });
}

opine_status opine_lexicon_save(const opine_lexicon* lexicon,
                                const char* path) {
  if (auto s = require(lexicon && path, "lexicon and path must be non-null")) {
    return s;
  }
  return guarded([&] { lexicon->value.save_tsv(path); });
}

void opine_lexicon_free(opine_lexicon* lexicon) { delete lexicon; }

size_t opine_lexicon_size(const opine_lexicon* lexicon) {
  return lexicon ? lexicon->value.size() : 0;
}

opine_status opine_induce_lexicon(const char* docs_path,
                                  const char* class_field,
                                  const char* pos_class, const char* neg_class,
                                  double alpha, opine_lexicon** out) {
  if (auto s = require(docs_path && class_field && pos_class && neg_class && out,
                       "all arguments must be non-null")) {
    return s;
  }
  return guarded([&] {
    const auto docs = opine::load_classed_posts(docs_path, class_field);
    const auto stats = opine::collect_stats(docs, alpha);
    auto handle = std::make_unique<opine_lexicon>();
    handle->value = opine::induce_pmi_lexicon(stats, pos_class, neg_class);
    *out = handle.release();
  });
}

opine_status opine_fit_lexicon(const opine_posts* docs,
                               const opine_lexicon* seed,
                               opine_count_model model, opine_vocab_mode vocab,
                               opine_text_field text_field,
                               opine_lexicon** out) {
  if (auto s = require(docs && seed && out,
                       "docs, seed, out must be non-null")) {
    return s;
  }
  return guarded([&] {
    const auto seed_lists = opine::SeedLexicon::from_lexicon(seed->value);
    const auto fitted = opine::fit_bayesian_lexicon(
        docs->value, seed_lists,
        model == OPINE_MODEL_DCM ? opine::CountModel::Dcm
                                 : opine::CountModel::Multinomial,
        vocab == OPINE_VOCAB_FULL ? opine::VocabularyMode::Full
                                  : opine::VocabularyMode::SeedOnly,
        text_field == OPINE_TEXT_TRANSLATED ? opine::TextField::Translated
                                            : opine::TextField::Primary);
    auto handle = std::make_unique<opine_lexicon>();
    handle->value = fitted.base;
    *out = handle.release();
  });
}

/* ---- features -------------------------------------------------------- */

opine_status opine_scores_load(const char* path, opine_class_set class_set,
                               opine_scores** out) {
  if (auto s = require(path && out, "path and out must be non-null")) return s;
  return guarded([&] {
    const auto set = class_set == OPINE_CLASSES_TONE
                         ? opine::ScoreTable::ClassSet::Tone
                         : opine::ScoreTable::ClassSet::Fls;
    auto handle = std::make_unique<opine_scores>(
        opine_scores{opine::ScoreTable::load_jsonl(path, set)});
    *out = handle.release();
  });
}

void opine_scores_free(opine_scores* scores) { delete scores; }

opine_status opine_features_build(const opine_posts* posts,
                                  const opine_lexicon* finprolex,
                                  const opine_lexicon* finword,
                                  const opine_lexicon* lm,
                                  const opine_scores* fls,
                                  const opine_scores* tone,
                                  const char* options_json,
                                  opine_features** out) {
  if (auto s = require(posts && out, "posts and out must be non-null")) return s;
  return guarded([&] {
    opine::FeatureOptions options = opine::FeatureOptions::from_json_text(
        options_json ? options_json : "");
    std::optional<opine::TagDictionary> dict;
    if (options_json != nullptr) {
      // tag_dict is resolved here so the option stays a plain path.
      json j = opine::trim(options_json).empty() ? json::object()
                                                 : json::parse(options_json);
      if (j.contains("tag_dict")) {
        dict = opine::TagDictionary::load_tsv(j["tag_dict"].get<std::string>());
      }
    }
    opine::FeatureResources resources;
    resources.finprolex = finprolex ? &finprolex->value : nullptr;
    resources.finword = finword ? &finword->value : nullptr;
    resources.lm = lm ? &lm->value : nullptr;
    resources.fls = fls ? &fls->value : nullptr;
    resources.tone = tone ? &tone->value : nullptr;
    resources.tag_dict = dict ? &*dict : nullptr;
    auto handle = std::make_unique<opine_features>();
    handle->value =
        opine::build_feature_vectors(posts->value, resources, options);
    *out = handle.release();
  });
}

opine_status opine_features_save(const opine_features* features,
                                 const char* path) {
  if (auto s = require(features && path, "features and path must be non-null")) {
    return s;
  }
  return guarded([&] { features->value.save_jsonl(path); });
}

opine_status opine_features_load(const char* path, opine_features** out) {
  if (auto s = require(path && out, "path and out must be non-null")) return s;
  return guarded([&] {
    auto handle = std::make_unique<opine_features>();
    handle->value = opine::FeatureTable::load_jsonl(path);
    *out = handle.release();
  });
}

void opine_features_free(opine_features* features) { delete features; }

size_t opine_features_size(const opine_features* features) {
  return features ? features->value.size() : 0;
}

/* ---- aggregation and evaluation -------------------------------------- */

opine_status opine_spec_builtin(const char* name, opine_spec** out) {
  if (auto s = require(name && out, "name and out must be non-null")) return s;
  return guarded([&] {
    const auto& builtins = opine::builtin_specs();
    auto it = builtins.find(name);
    if (it == builtins.end()) {
      throw opine::Error(opine::ErrorKind::Config,
                         std::string("unknown builtin spec: ") + name);
    }
    auto handle = std::make_unique<opine_spec>(opine_spec{it->second});
    *out = handle.release();
  });
}

opine_status opine_spec_load(const char* path, opine_spec** out) {
  if (auto s = require(path && out, "path and out must be non-null")) return s;
  return guarded([&] {
    auto handle =
        std::make_unique<opine_spec>(opine_spec{opine::AggregatorSpec::load(path)});
    *out = handle.release();
  });
}

opine_status opine_spec_resolve(const char* name_or_path, opine_spec** out) {
  if (auto s = require(name_or_path && out, "name and out must be non-null")) {
    return s;
  }
  return guarded([&] {
    auto handle = std::make_unique<opine_spec>(
        opine_spec{opine::resolve_spec(name_or_path)});
    *out = handle.release();
  });
}

void opine_spec_free(opine_spec* spec) { delete spec; }

opine_status opine_rank_json(const opine_features* features,
                             const opine_spec* spec, opine_target target,
                             int invert_ml, char** json_out) {
  if (auto s = require(features && spec && json_out,
                       "features, spec, json_out must be non-null")) {
    return s;
  }
  return guarded([&] {
    const auto scores = score_table(features->value, spec->value,
                                    to_target(target), invert_ml != 0);
    std::vector<std::pair<std::string, double>> order(scores.begin(),
                                                      scores.end());
    std::sort(order.begin(), order.end(), [](const auto& a, const auto& b) {
      if (a.second != b.second) return a.second > b.second;
      return a.first < b.first;
    });
    json j = json::array();
    for (const auto& [id, s] : order) {
      j.push_back({{"id", id}, {"score", s}});
    }
    *json_out = dup_string(j.dump());
  });
}

opine_status opine_eval_ranking_json(const opine_posts* posts,
                                     const opine_features* features,
                                     const opine_spec* spec,
                                     opine_target target, double fraction,
                                     int invert_ml, char** json_out) {
  if (auto s = require(posts && features && spec && json_out,
                       "posts, features, spec, json_out must be non-null")) {
    return s;
  }
  return guarded([&] {
    const auto scores = score_table(features->value, spec->value,
                                    to_target(target), invert_ml != 0);
    const auto result =
        opine::rank_top_fraction(scores, posts->value, fraction);
    *json_out = dup_string(ranking_to_json(result).dump());
  });
}

opine_status opine_rank_pairwise_pool_json(const opine_pairs* pairs,
                                           const opine_features* features,
                                           const opine_spec* spec,
                                           opine_target target,
                                           double fraction, int invert_ml,
                                           char** json_out) {
  if (auto s = require(pairs && features && spec && json_out,
                       "pairs, features, spec, json_out must be non-null")) {
    return s;
  }
  return guarded([&] {
    const auto scores = score_table(features->value, spec->value,
                                    to_target(target), invert_ml != 0);
    const auto result =
        opine::rank_pairwise_pool(pairs->value, scores, fraction);
    *json_out = dup_string(ranking_to_json(result).dump());
  });
}

opine_status opine_eval_pairwise_json(const opine_pairs* pairs,
                                      const opine_features* features,
                                      const opine_spec* spec,
                                      opine_label_convention convention,
                                      int invert_ml, char** json_out) {
  if (auto s = require(pairs && features && spec && json_out,
                       "pairs, features, spec, json_out must be non-null")) {
    return s;
  }
  return guarded([&] {
    const auto scores =
        pair_score_table(features->value, spec->value, invert_ml != 0);
    const auto report = opine::pairwise_accuracy(
        pairs->value, scores,
        convention == OPINE_HIGHER_IS_0 ? opine::LabelConvention::HigherIs0
                                        : opine::LabelConvention::HigherIs1);
    *json_out = dup_string(pairwise_to_json(report).dump());
  });
}

/* ---- prompts --------------------------------------------------------- */

opine_status opine_build_prompts_json(const opine_pairs* pairs,
                                      const opine_pairs* shots_pairs,
                                      int64_t budget, uint64_t seed,
                                      const char* vocab_json,
                                      const char* text_field, char** json_out) {
  if (auto s = require(pairs && shots_pairs && json_out,
                       "pairs, shots_pairs, json_out must be non-null")) {
    return s;
  }
  return guarded([&] {
    const auto vocab = vocab_from(vocab_json);
    const auto field = text_field_from(text_field);
    std::vector<opine::PromptShot> shots;
    shots.reserve(shots_pairs->value.size());
    for (const auto& pair : shots_pairs->value) {
      shots.push_back(opine::build_shot(pair, vocab, field));
    }
    json out = json::array();
    for (std::size_t i = 0; i < pairs->value.size(); ++i) {
      const auto packed =
          opine::pack_prompt(shots, pairs->value[i], budget, seed + i, field);
      json row;
      row["id"] = std::to_string(i);
      row["prompt"] = packed.text();
      row["n_shots"] = packed.shots.size();
      row["token_estimate"] = packed.total_token_estimate;
      row["budget"] = packed.budget;
      row["mpp_label"] = pairs->value[i].mpp_label;
      row["ml_label"] = pairs->value[i].ml_label;
      out.push_back(std::move(row));
    }
    *json_out = dup_string(out.dump());
  });
}

opine_status opine_parse_completions_json(const char* completions_path,
                                          const opine_pairs* pairs,
                                          const char* vocab_json,
                                          char** json_out) {
  if (auto s = require(completions_path && pairs && json_out,
                       "completions_path, pairs, json_out must be non-null")) {
    return s;
  }
  return guarded([&] {
    const auto vocab = vocab_from(vocab_json);
    std::ifstream in(completions_path);
    if (!in) {
      throw opine::Error(opine::ErrorKind::Io,
                         std::string("cannot open completions file: ") +
                             completions_path);
    }
    // Pair index -> parsed labels; absent or unparseable rows stay empty
    // and count as incorrect.
    std::map<std::size_t, opine::ParsedLabels> parsed;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (opine::trim(line).empty()) continue;
      json j;
      std::size_t index = 0;
      std::string completion;
      try {
        j = json::parse(line);
        index = static_cast<std::size_t>(std::stoull(j.at("id").get<std::string>()));
        completion = j.at("completion").get<std::string>();
      } catch (const std::exception& e) {
        throw opine::Error(opine::ErrorKind::Parse,
                           std::string(completions_path) + ":" +
                               std::to_string(line_no) + ": " + e.what());
      }
      if (index >= pairs->value.size()) {
        throw opine::Error(opine::ErrorKind::Validation,
                           std::string(completions_path) + ":" +
                               std::to_string(line_no) +
                               ": id out of range: " + std::to_string(index));
      }
      try {
        parsed[index] = opine::parse_completion(completion, vocab);
      } catch (const opine::Error&) {
        // unparseable: leave absent, counts as incorrect on both metrics
      }
    }

    opine::PairwiseReport report;
    report.n_pairs = pairs->value.size();
    std::size_t mpp_correct = 0, ml_correct = 0;
    for (std::size_t i = 0; i < pairs->value.size(); ++i) {
      auto it = parsed.find(i);
      if (it == parsed.end()) continue;
      if (it->second.mpp_label == pairs->value[i].mpp_label) ++mpp_correct;
      if (it->second.ml_label == pairs->value[i].ml_label) ++ml_correct;
    }
    if (report.n_pairs > 0) {
      report.mpp_accuracy = static_cast<double>(mpp_correct) /
                            static_cast<double>(report.n_pairs);
      report.ml_accuracy = static_cast<double>(ml_correct) /
                           static_cast<double>(report.n_pairs);
    }
    *json_out = dup_string(pairwise_to_json(report).dump());
  });
}

opine_status opine_t5_export(const opine_pairs* pairs, const char* vocab_json,
                             const char* text_field, const char* out_path) {
  if (auto s = require(pairs && out_path, "pairs and out_path must be non-null")) {
    return s;
  }
  return guarded([&] {
    const auto vocab = vocab_from(vocab_json);
    const auto field = text_field_from(text_field);
    std::ofstream out(out_path);
    if (!out) {
      throw opine::Error(opine::ErrorKind::Io,
                         std::string("cannot write file: ") + out_path);
    }
    for (const auto& pair : pairs->value) {
      const auto example = opine::t5_format(pair, vocab, field);
      json j;
      j["input"] = example.input;
      j["target"] = example.target;
      out << j.dump() << '\n';
    }
    if (!out) {
      throw opine::Error(opine::ErrorKind::Io,
                         std::string("write failed: ") + out_path);
    }
  });
}

opine_status opine_complete(const char* model, const char* prompt,
                            int max_tokens, double temperature,
                            int max_retries, char** text_out) {
  if (auto s = require(model && prompt && text_out,
                       "model, prompt, text_out must be non-null")) {
    return s;
  }
  return guarded([&] {
    auto client = opine::CompletionClient::from_env();
    if (max_retries >= 0) client.max_retries = max_retries;
    opine::CompletionRequest request;
    request.model = model;
    request.prompt = prompt;
    request.max_tokens = max_tokens;
    request.temperature = temperature;
    *text_out = dup_string(client.complete(request));
  });
}

}  // extern "C"
