// opine — scores and ranks amateur-investor opinion posts.
//
// Thin subcommand front end over the libopine C API. The shared config file
// (--config, JSON) provides defaults; explicit flags override them. Exit
// codes: 0 success, 1 validation/usage error, 2 runtime error.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "opine/opine.h"

using nlohmann::json;

namespace {

struct CliError {
  int exit_code;
  std::string message;
};

int exit_code_for(opine_status status) {
  switch (status) {
    case OPINE_OK:
      return 0;
    case OPINE_ERR_NUMERIC:
    case OPINE_ERR_RUNTIME:
      return 2;
    default:
      return 1;
  }
}

void check(opine_status status) {
  if (status != OPINE_OK) {
    throw CliError{exit_code_for(status), opine_last_error()};
  }
}

struct FreeDeleter {
  void operator()(opine_posts* p) const { opine_posts_free(p); }
  void operator()(opine_pairs* p) const { opine_pairs_free(p); }
  void operator()(opine_lexicon* p) const { opine_lexicon_free(p); }
  void operator()(opine_scores* p) const { opine_scores_free(p); }
  void operator()(opine_features* p) const { opine_features_free(p); }
  void operator()(opine_spec* p) const { opine_spec_free(p); }
};

template <typename T>
using Handle = std::unique_ptr<T, FreeDeleter>;

std::string take_string(char* s) {
  std::string out = s ? s : "";
  opine_string_free(s);
  return out;
}

void require_file(const std::string& path, const std::string& what) {
  if (path.empty()) {
    throw CliError{1, what + " is required (flag or config)"};
  }
  if (!std::filesystem::exists(path)) {
    throw CliError{1, what + " not found: " + path};
  }
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CliError{1, "cannot read file: " + path};
  return std::string(std::istreambuf_iterator<char>(in),
                     std::istreambuf_iterator<char>());
}

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text << "\n";
    return;
  }
  std::ofstream out(out_path);
  if (!out) throw CliError{2, "cannot write output file: " + out_path};
  out << text << "\n";
}

Handle<opine_posts> load_posts(const std::string& path) {
  opine_posts* posts = nullptr;
  check(opine_posts_load(path.c_str(), &posts));
  return Handle<opine_posts>(posts);
}

Handle<opine_pairs> load_pairs(const std::string& path) {
  opine_pairs* pairs = nullptr;
  check(opine_pairs_load(path.c_str(), &pairs));
  return Handle<opine_pairs>(pairs);
}

Handle<opine_lexicon> load_lexicon(const std::string& path, bool header) {
  opine_lexicon* lexicon = nullptr;
  check(opine_lexicon_load(path.c_str(), header ? 1 : 0, &lexicon));
  return Handle<opine_lexicon>(lexicon);
}

Handle<opine_spec> resolve_spec(const std::string& name_or_path) {
  if (name_or_path.empty()) throw CliError{1, "--spec is required"};
  opine_spec* spec = nullptr;
  check(opine_spec_resolve(name_or_path.c_str(), &spec));
  return Handle<opine_spec>(spec);
}

opine_target parse_target(const std::string& name) {
  if (name == "mpp") return OPINE_TARGET_MPP;
  if (name == "ml") return OPINE_TARGET_ML;
  throw CliError{1, "--target must be mpp or ml, got: " + name};
}

// All settings a subcommand can draw from the config file.
struct Options {
  std::string config;
  std::string docs, posts, pairs, features, in, shots;
  std::string finprolex, finword, lm, fls_scores, tone_scores, tag_dict;
  std::string seed_lexicon, spec, vocab_file, out;
  std::string class_field = "class", pos_class, neg_class;
  std::string model = "multinomial", vocab_mode = "seed";
  std::string target = "mpp", label_convention = "higher-is-1";
  std::string text_field = "primary", t5_out;
  std::string feature_options;  // JSON passthrough
  double alpha = 0.5, fraction = 0.1, split_ratio = 0.0;
  long long budget = 4000;
  unsigned long long seed = 0, split_seed = 0;
  int jobs = 1;
  bool invert_ml = false, lexicon_header = false;
};

void apply_config(Options& options) {
  if (options.config.empty()) return;
  if (!std::filesystem::exists(options.config)) {
    throw CliError{1, "config file not found: " + options.config};
  }
  json cfg;
  try {
    cfg = json::parse(slurp(options.config));
  } catch (const json::exception& e) {
    throw CliError{1, std::string("bad config JSON: ") + e.what()};
  }
  const auto str = [&](const char* key, std::string& into) {
    if (cfg.contains(key)) into = cfg[key].get<std::string>();
  };
  str("docs", options.docs);
  str("posts", options.posts);
  str("pairs", options.pairs);
  str("features", options.features);
  str("in", options.in);
  str("shots", options.shots);
  str("finprolex", options.finprolex);
  str("finword", options.finword);
  str("lm", options.lm);
  str("fls_scores", options.fls_scores);
  str("tone_scores", options.tone_scores);
  str("tag_dict", options.tag_dict);
  str("seed_lexicon", options.seed_lexicon);
  str("spec", options.spec);
  str("vocab_file", options.vocab_file);
  str("out", options.out);
  str("class_field", options.class_field);
  str("pos_class", options.pos_class);
  str("neg_class", options.neg_class);
  str("model", options.model);
  str("vocab_mode", options.vocab_mode);
  str("target", options.target);
  str("label_convention", options.label_convention);
  str("text_field", options.text_field);
  if (cfg.contains("feature_options")) {
    options.feature_options = cfg["feature_options"].dump();
  }
  if (cfg.contains("alpha")) options.alpha = cfg["alpha"].get<double>();
  if (cfg.contains("fraction")) options.fraction = cfg["fraction"].get<double>();
  if (cfg.contains("split_ratio")) {
    options.split_ratio = cfg["split_ratio"].get<double>();
  }
  if (cfg.contains("budget")) options.budget = cfg["budget"].get<long long>();
  if (cfg.contains("seed")) {
    options.seed = cfg["seed"].get<unsigned long long>();
  }
  if (cfg.contains("split_seed")) {
    options.split_seed = cfg["split_seed"].get<unsigned long long>();
  }
  if (cfg.contains("jobs")) options.jobs = cfg["jobs"].get<int>();
  if (cfg.contains("invert_ml")) {
    options.invert_ml = cfg["invert_ml"].get<bool>();
  }
  if (cfg.contains("lexicon_header")) {
    options.lexicon_header = cfg["lexicon_header"].get<bool>();
  }
}

// Feature options JSON assembled from the passthrough block plus the
// flags that share its keys.
std::string build_feature_options(const Options& options) {
  json j = options.feature_options.empty()
               ? json::object()
               : json::parse(options.feature_options);
  if (!options.tag_dict.empty()) j["tag_dict"] = options.tag_dict;
  if (options.jobs > 1) j["jobs"] = options.jobs;
  return j.dump();
}

struct FeatureInputs {
  Handle<opine_lexicon> finprolex, finword, lm;
  Handle<opine_scores> fls, tone;
};

FeatureInputs load_feature_inputs(const Options& options) {
  FeatureInputs inputs;
  const auto optional_file = [](const std::string& path, const char* what) {
    if (!path.empty() && !std::filesystem::exists(path)) {
      throw CliError{1, std::string(what) + " not found: " + path};
    }
    return !path.empty();
  };
  if (optional_file(options.finprolex, "--finprolex")) {
    inputs.finprolex = load_lexicon(options.finprolex, options.lexicon_header);
  }
  if (optional_file(options.finword, "--finword")) {
    inputs.finword = load_lexicon(options.finword, options.lexicon_header);
  }
  if (optional_file(options.lm, "--lm")) {
    inputs.lm = load_lexicon(options.lm, options.lexicon_header);
  }
  if (optional_file(options.fls_scores, "--fls-scores")) {
    opine_scores* scores = nullptr;
    check(opine_scores_load(options.fls_scores.c_str(), OPINE_CLASSES_FLS,
                            &scores));
    inputs.fls.reset(scores);
  }
  if (optional_file(options.tone_scores, "--tone-scores")) {
    opine_scores* scores = nullptr;
    check(opine_scores_load(options.tone_scores.c_str(), OPINE_CLASSES_TONE,
                            &scores));
    inputs.tone.reset(scores);
  }
  if (!options.tag_dict.empty()) {
    require_file(options.tag_dict, "--tag-dict");
  }
  return inputs;
}

Handle<opine_features> build_features(const opine_posts* posts,
                                      const Options& options) {
  const FeatureInputs inputs = load_feature_inputs(options);
  const std::string feature_options = build_feature_options(options);
  opine_features* features = nullptr;
  check(opine_features_build(posts, inputs.finprolex.get(),
                             inputs.finword.get(), inputs.lm.get(),
                             inputs.fls.get(), inputs.tone.get(),
                             feature_options.c_str(), &features));
  return Handle<opine_features>(features);
}

std::string vocab_json(const Options& options) {
  if (options.vocab_file.empty()) return "";
  require_file(options.vocab_file, "--vocab");
  return slurp(options.vocab_file);
}

int run_induce(const Options& options) {
  require_file(options.docs, "--docs");
  if (options.pos_class.empty() || options.neg_class.empty()) {
    throw CliError{1, "--pos and --neg are required"};
  }
  if (options.out.empty()) throw CliError{1, "--out is required"};
  opine_lexicon* lexicon = nullptr;
  check(opine_induce_lexicon(options.docs.c_str(), options.class_field.c_str(),
                             options.pos_class.c_str(),
                             options.neg_class.c_str(), options.alpha,
                             &lexicon));
  Handle<opine_lexicon> handle(lexicon);
  check(opine_lexicon_save(handle.get(), options.out.c_str()));
  json report{{"induced_terms", opine_lexicon_size(handle.get())},
              {"out", options.out}};
  std::cout << report.dump() << "\n";
  return 0;
}

int run_fit(const Options& options) {
  require_file(options.docs, "--docs");
  require_file(options.seed_lexicon, "--seed");
  if (options.out.empty()) throw CliError{1, "--out is required"};
  const opine_count_model model = [&] {
    if (options.model == "multinomial") return OPINE_MODEL_MULTINOMIAL;
    if (options.model == "dcm") return OPINE_MODEL_DCM;
    throw CliError{1, "--model must be multinomial or dcm"};
  }();
  const opine_vocab_mode vocab = [&] {
    if (options.vocab_mode == "seed") return OPINE_VOCAB_SEED_ONLY;
    if (options.vocab_mode == "full") return OPINE_VOCAB_FULL;
    throw CliError{1, "--vocab must be seed or full"};
  }();
  const opine_text_field field = [&] {
    if (options.text_field == "primary") return OPINE_TEXT_PRIMARY;
    if (options.text_field == "translated") return OPINE_TEXT_TRANSLATED;
    throw CliError{1, "--text-field must be primary or translated"};
  }();
  auto docs = load_posts(options.docs);
  auto seed = load_lexicon(options.seed_lexicon, options.lexicon_header);
  opine_lexicon* fitted = nullptr;
  check(opine_fit_lexicon(docs.get(), seed.get(), model, vocab, field,
                          &fitted));
  Handle<opine_lexicon> handle(fitted);
  check(opine_lexicon_save(handle.get(), options.out.c_str()));
  json report{{"fitted_terms", opine_lexicon_size(handle.get())},
              {"model", options.model},
              {"out", options.out}};
  std::cout << report.dump() << "\n";
  return 0;
}

Handle<opine_posts> load_scoring_pool(const Options& options) {
  if (!options.posts.empty()) {
    require_file(options.posts, "--posts");
    return load_posts(options.posts);
  }
  if (!options.pairs.empty()) {
    require_file(options.pairs, "--pairs");
    auto pairs = load_pairs(options.pairs);
    opine_posts* pool = nullptr;
    check(opine_pairs_pool_posts(pairs.get(), &pool));
    return Handle<opine_posts>(pool);
  }
  throw CliError{1, "--posts or --pairs is required"};
}

int run_score(const Options& options) {
  if (options.out.empty()) throw CliError{1, "--out is required"};
  auto pool = load_scoring_pool(options);
  auto features = build_features(pool.get(), options);
  check(opine_features_save(features.get(), options.out.c_str()));
  json report{{"posts", opine_posts_size(pool.get())},
              {"out", options.out}};
  std::cout << report.dump() << "\n";
  return 0;
}

int run_rank(const Options& options) {
  require_file(options.features, "--features");
  auto spec = resolve_spec(options.spec);
  opine_features* features = nullptr;
  check(opine_features_load(options.features.c_str(), &features));
  Handle<opine_features> handle(features);
  char* out = nullptr;
  check(opine_rank_json(handle.get(), spec.get(), parse_target(options.target),
                        options.invert_ml ? 1 : 0, &out));
  emit(take_string(out), options.out);
  return 0;
}

int run_eval_ranking(const Options& options) {
  require_file(options.features, "--features");
  auto spec = resolve_spec(options.spec);
  opine_features* features_raw = nullptr;
  check(opine_features_load(options.features.c_str(), &features_raw));
  Handle<opine_features> features(features_raw);

  char* out = nullptr;
  if (!options.pairs.empty()) {
    require_file(options.pairs, "--pairs");
    auto pairs = load_pairs(options.pairs);
    check(opine_rank_pairwise_pool_json(
        pairs.get(), features.get(), spec.get(), parse_target(options.target),
        options.fraction, options.invert_ml ? 1 : 0, &out));
  } else {
    require_file(options.posts, "--posts");
    auto posts = load_posts(options.posts);
    check(opine_eval_ranking_json(posts.get(), features.get(), spec.get(),
                                  parse_target(options.target),
                                  options.fraction,
                                  options.invert_ml ? 1 : 0, &out));
  }
  emit(take_string(out), options.out);
  return 0;
}

int run_eval_pairwise(const Options& options) {
  require_file(options.pairs, "--pairs");
  auto spec = resolve_spec(options.spec);
  auto pairs = load_pairs(options.pairs);

  if (options.split_ratio > 0.0) {
    opine_pairs* train = nullptr;
    opine_pairs* val = nullptr;
    check(opine_pairs_split(pairs.get(), options.split_ratio,
                            options.split_seed, &train, &val));
    opine_pairs_free(train);
    pairs.reset(val);  // evaluate on the held-out split
  }

  Handle<opine_features> features;
  if (!options.features.empty()) {
    require_file(options.features, "--features");
    opine_features* raw = nullptr;
    check(opine_features_load(options.features.c_str(), &raw));
    features.reset(raw);
  } else {
    opine_posts* pool = nullptr;
    check(opine_pairs_pool_posts(pairs.get(), &pool));
    Handle<opine_posts> pool_handle(pool);
    features = build_features(pool_handle.get(), options);
  }

  const opine_label_convention convention = [&] {
    if (options.label_convention == "higher-is-1") return OPINE_HIGHER_IS_1;
    if (options.label_convention == "higher-is-0") return OPINE_HIGHER_IS_0;
    throw CliError{1, "--label-convention must be higher-is-1 or higher-is-0"};
  }();

  char* out = nullptr;
  check(opine_eval_pairwise_json(pairs.get(), features.get(), spec.get(),
                                 convention, options.invert_ml ? 1 : 0, &out));
  emit(take_string(out), options.out);
  return 0;
}

int run_build_prompts(const Options& options) {
  require_file(options.pairs, "--pairs");
  auto pairs = load_pairs(options.pairs);

  if (!options.t5_out.empty()) {
    check(opine_t5_export(pairs.get(), vocab_json(options).c_str(),
                          options.text_field.c_str(), options.t5_out.c_str()));
  }

  require_file(options.shots, "--shots");
  auto shots = load_pairs(options.shots);

  char* out = nullptr;
  check(opine_build_prompts_json(pairs.get(), shots.get(), options.budget,
                                 options.seed, vocab_json(options).c_str(),
                                 options.text_field.c_str(), &out));
  // one JSON object per line
  json rows = json::parse(take_string(out));
  std::string lines;
  for (const auto& row : rows) {
    lines += row.dump();
    lines += '\n';
  }
  if (!lines.empty()) lines.pop_back();
  emit(lines, options.out);
  return 0;
}

int run_parse_completions(const Options& options) {
  require_file(options.in, "--in");
  require_file(options.pairs, "--pairs");
  auto pairs = load_pairs(options.pairs);
  char* out = nullptr;
  check(opine_parse_completions_json(options.in.c_str(), pairs.get(),
                                     vocab_json(options).c_str(), &out));
  emit(take_string(out), options.out);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  Options options;

  CLI::App app{"opine: score and rank investor opinion posts"};
  app.set_version_flag("--version", std::string("opine ") + opine_version());
  app.add_option("--config", options.config, "JSON config with defaults");
  app.require_subcommand(0, 1);

  // Pre-scan for --config so flags can override its values.
  for (int i = 1; i + 1 < argc; ++i) {
    if (std::string(argv[i]) == "--config") options.config = argv[i + 1];
  }
  try {
    apply_config(options);
  } catch (const CliError& e) {
    std::cerr << "error: " << e.message << "\n";
    return e.exit_code;
  }

  const auto add_feature_flags = [&](CLI::App* cmd) {
    cmd->add_option("--finprolex", options.finprolex, "expert lexicon TSV");
    cmd->add_option("--finword", options.finword, "market sentiment lexicon TSV");
    cmd->add_option("--lm", options.lm, "fitted LM lexicon TSV");
    cmd->add_option("--fls-scores", options.fls_scores, "FLS logits JSONL");
    cmd->add_option("--tone-scores", options.tone_scores, "tone logits JSONL");
    cmd->add_option("--tag-dict", options.tag_dict, "POS tag dictionary TSV");
    cmd->add_option("--feature-options", options.feature_options,
                    "feature options JSON string");
    cmd->add_option("--jobs", options.jobs, "worker threads");
    cmd->add_flag("--lexicon-header", options.lexicon_header,
                  "lexicon TSVs carry a header line");
  };

  auto* induce = app.add_subcommand("induce", "induce a PMI lexicon");
  induce->add_option("--docs", options.docs, "classed post JSONL");
  induce->add_option("--class-field", options.class_field, "JSON key with the class");
  induce->add_option("--pos", options.pos_class, "positive class name");
  induce->add_option("--neg", options.neg_class, "negative class name");
  induce->add_option("--alpha", options.alpha, "add-alpha smoothing");
  induce->add_option("--out", options.out, "output lexicon TSV");

  auto* fit = app.add_subcommand("fit", "fit a seed lexicon without labels");
  fit->add_option("--docs", options.docs, "post JSONL");
  fit->add_option("--seed", options.seed_lexicon, "seed lexicon TSV");
  fit->add_option("--model", options.model, "multinomial|dcm");
  fit->add_option("--vocab", options.vocab_mode, "seed|full");
  fit->add_option("--text-field", options.text_field, "primary|translated");
  fit->add_option("--out", options.out, "output lexicon TSV");
  fit->add_flag("--lexicon-header", options.lexicon_header,
                "lexicon TSVs carry a header line");

  auto* score = app.add_subcommand("score", "compute feature vectors");
  score->add_option("--posts", options.posts, "post JSONL");
  score->add_option("--pairs", options.pairs, "pair JSONL (pooled)");
  score->add_option("--out", options.out, "output features JSONL");
  add_feature_flags(score);

  auto* rank = app.add_subcommand("rank", "score and order posts");
  rank->add_option("--features", options.features, "features JSONL");
  rank->add_option("--spec", options.spec, "base-1|bayesdcm-2|multinomial-3|file");
  rank->add_option("--target", options.target, "mpp|ml");
  rank->add_flag("--invert-ml", options.invert_ml, "negate ML scores");
  rank->add_option("--out", options.out, "output JSON");

  auto* eval_ranking = app.add_subcommand("eval-ranking",
                                          "top-fraction ranking report");
  eval_ranking->add_option("--posts", options.posts, "post JSONL");
  eval_ranking->add_option("--pairs", options.pairs, "pair JSONL (pooled)");
  eval_ranking->add_option("--features", options.features, "features JSONL");
  eval_ranking->add_option("--spec", options.spec, "aggregator spec");
  eval_ranking->add_option("--target", options.target, "mpp|ml");
  eval_ranking->add_option("--fraction", options.fraction, "top fraction");
  eval_ranking->add_flag("--invert-ml", options.invert_ml, "negate ML scores");
  eval_ranking->add_option("--out", options.out, "output JSON");

  auto* eval_pairwise = app.add_subcommand("eval-pairwise",
                                           "pairwise comparison accuracy");
  eval_pairwise->add_option("--pairs", options.pairs, "pair JSONL");
  eval_pairwise->add_option("--spec", options.spec, "aggregator spec");
  eval_pairwise->add_option("--features", options.features,
                            "precomputed features JSONL (optional)");
  eval_pairwise->add_option("--label-convention", options.label_convention,
                            "higher-is-1|higher-is-0");
  eval_pairwise->add_option("--split-ratio", options.split_ratio,
                            "evaluate on a held-out split of this ratio");
  eval_pairwise->add_option("--seed", options.split_seed, "split seed");
  eval_pairwise->add_flag("--invert-ml", options.invert_ml, "negate ML scores");
  eval_pairwise->add_option("--out", options.out, "output JSON");
  add_feature_flags(eval_pairwise);

  auto* build_prompts = app.add_subcommand("build-prompts",
                                           "pack few-shot prompts");
  build_prompts->add_option("--pairs", options.pairs, "query pair JSONL");
  build_prompts->add_option("--shots", options.shots, "labeled shot pair JSONL");
  build_prompts->add_option("--budget", options.budget, "token budget");
  build_prompts->add_option("--seed", options.seed, "shuffle seed");
  build_prompts->add_option("--vocab", options.vocab_file, "label vocabulary JSON");
  build_prompts->add_option("--text-field", options.text_field,
                            "primary|translated");
  build_prompts->add_option("--t5-out", options.t5_out,
                            "also export text-to-text training JSONL");
  build_prompts->add_option("--out", options.out, "output prompt JSONL");

  auto* parse_completions = app.add_subcommand("parse-completions",
                                               "score completions against labels");
  parse_completions->add_option("--in", options.in, "completions JSONL");
  parse_completions->add_option("--pairs", options.pairs, "pair JSONL");
  parse_completions->add_option("--vocab", options.vocab_file,
                                "label vocabulary JSON");
  parse_completions->add_option("--out", options.out, "output JSON");

  CLI11_PARSE(app, argc, argv);

  if (app.get_subcommands().empty()) {
    std::cerr << app.help() << "\n";
    return 1;
  }

  try {
    if (induce->parsed()) return run_induce(options);
    if (fit->parsed()) return run_fit(options);
    if (score->parsed()) return run_score(options);
    if (rank->parsed()) return run_rank(options);
    if (eval_ranking->parsed()) return run_eval_ranking(options);
    if (eval_pairwise->parsed()) return run_eval_pairwise(options);
    if (build_prompts->parsed()) return run_build_prompts(options);
    if (parse_completions->parsed()) return run_parse_completions(options);
  } catch (const CliError& e) {
    std::cerr << "error: " << e.message << "\n";
    return e.exit_code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  std::cerr << app.help() << "\n";
  return 1;
}
