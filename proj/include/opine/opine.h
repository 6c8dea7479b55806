/* opine — amateur-investor opinion scoring and ranking.
 *
 * C API over the C++ core. All functions return OPINE_OK (0) on success and
 * a nonzero status otherwise; opine_last_error() describes the most recent
 * failure on the calling thread. Out-parameters are untouched on failure.
 * Every handle must be released with its matching *_free function; strings
 * returned through char** out-parameters are released with
 * opine_string_free().
 */
#ifndef OPINE_H
#define OPINE_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum opine_status {
  OPINE_OK = 0,
  OPINE_ERR_IO = 1,
  OPINE_ERR_PARSE = 2,
  OPINE_ERR_VALIDATION = 3,
  OPINE_ERR_CONFIG = 4,
  OPINE_ERR_NUMERIC = 5,
  OPINE_ERR_RUNTIME = 6,
  OPINE_ERR_ARGUMENT = 7
} opine_status;

typedef struct opine_posts opine_posts;       /* post collection */
typedef struct opine_pairs opine_pairs;       /* labeled pair collection */
typedef struct opine_lexicon opine_lexicon;   /* term -> weight/polarity map */
typedef struct opine_scores opine_scores;     /* external sentence logits */
typedef struct opine_features opine_features; /* post id -> feature vector */
typedef struct opine_spec opine_spec;         /* score aggregator */

const char* opine_version(void);

/* Message for the last failure on this thread; empty string when none. */
const char* opine_last_error(void);

void opine_string_free(char* s);

/* ---- corpus ---------------------------------------------------------- */

opine_status opine_posts_load(const char* path, opine_posts** out);
void opine_posts_free(opine_posts* posts);
size_t opine_posts_size(const opine_posts* posts);

opine_status opine_pairs_load(const char* path, opine_pairs** out);
void opine_pairs_free(opine_pairs* pairs);
size_t opine_pairs_size(const opine_pairs* pairs);

/* Deterministic holdout split: ceil(ratio * n) pairs go to val. */
opine_status opine_pairs_split(const opine_pairs* pairs, double ratio,
                               uint64_t seed, opine_pairs** train_out,
                               opine_pairs** val_out);

/* Distinct posts appearing in any pair, first occurrence wins. */
opine_status opine_pairs_pool_posts(const opine_pairs* pairs,
                                    opine_posts** out);

/* ---- lexicons -------------------------------------------------------- */

opine_status opine_lexicon_load(const char* path, int has_header,
                                opine_lexicon** out);
opine_status opine_lexicon_save(const opine_lexicon* lexicon,
                                const char* path);
void opine_lexicon_free(opine_lexicon* lexicon);
size_t opine_lexicon_size(const opine_lexicon* lexicon);

/* PMI-difference lexicon induced from a two-class corpus. The docs file is
 * post-JSONL with an extra class label under class_field. */
opine_status opine_induce_lexicon(const char* docs_path,
                                  const char* class_field,
                                  const char* pos_class, const char* neg_class,
                                  double alpha, opine_lexicon** out);

typedef enum opine_count_model {
  OPINE_MODEL_MULTINOMIAL = 0,
  OPINE_MODEL_DCM = 1
} opine_count_model;

typedef enum opine_vocab_mode {
  OPINE_VOCAB_SEED_ONLY = 0,
  OPINE_VOCAB_FULL = 1
} opine_vocab_mode;

typedef enum opine_text_field {
  OPINE_TEXT_PRIMARY = 0,
  OPINE_TEXT_TRANSLATED = 1
} opine_text_field;

/* Unsupervised method-of-moments fit of a seed lexicon's per-word weights.
 * The seed's POSITIVE/NEGATIVE entries form the seed word lists; text_field
 * picks which language's tokens the estimator reads. */
opine_status opine_fit_lexicon(const opine_posts* docs,
                               const opine_lexicon* seed,
                               opine_count_model model, opine_vocab_mode vocab,
                               opine_text_field text_field,
                               opine_lexicon** out);

/* ---- features -------------------------------------------------------- */

typedef enum opine_class_set {
  OPINE_CLASSES_FLS = 0,
  OPINE_CLASSES_TONE = 1
} opine_class_set;

opine_status opine_scores_load(const char* path, opine_class_set class_set,
                               opine_scores** out);
void opine_scores_free(opine_scores* scores);

/* Builds the thirteen named components for every post and min-max
 * normalizes each over the pool. Null resources contribute zeros.
 * options_json may be NULL/empty; see the README for the documented keys. */
opine_status opine_features_build(const opine_posts* posts,
                                  const opine_lexicon* finprolex,
                                  const opine_lexicon* finword,
                                  const opine_lexicon* lm,
                                  const opine_scores* fls,
                                  const opine_scores* tone,
                                  const char* options_json,
                                  opine_features** out);

opine_status opine_features_save(const opine_features* features,
                                 const char* path);
opine_status opine_features_load(const char* path, opine_features** out);
void opine_features_free(opine_features* features);
size_t opine_features_size(const opine_features* features);

/* ---- aggregation and evaluation -------------------------------------- */

opine_status opine_spec_builtin(const char* name, opine_spec** out);
opine_status opine_spec_load(const char* path, opine_spec** out);
/* Builtin name first, config file path otherwise. */
opine_status opine_spec_resolve(const char* name_or_path, opine_spec** out);
void opine_spec_free(opine_spec* spec);

typedef enum opine_target {
  OPINE_TARGET_MPP = 0,
  OPINE_TARGET_ML = 1
} opine_target;

/* JSON array of {"id", "score"} sorted by score descending, ties by id.
 * invert_ml negates ML-target scores before ranking. */
opine_status opine_rank_json(const opine_features* features,
                             const opine_spec* spec, opine_target target,
                             int invert_ml, char** json_out);

/* Ranking report {"selected_ids", "avg_mpp", "avg_ml", "fraction"} over the
 * top ceil(fraction * n) posts by the target score. */
opine_status opine_eval_ranking_json(const opine_posts* posts,
                                     const opine_features* features,
                                     const opine_spec* spec,
                                     opine_target target, double fraction,
                                     int invert_ml, char** json_out);

/* Pools the pairs' posts and evaluates the ranking protocol over the pool.
 * features must cover the pooled ids (see opine_pairs_pool_posts). */
opine_status opine_rank_pairwise_pool_json(const opine_pairs* pairs,
                                           const opine_features* features,
                                           const opine_spec* spec,
                                           opine_target target,
                                           double fraction, int invert_ml,
                                           char** json_out);

typedef enum opine_label_convention {
  OPINE_HIGHER_IS_1 = 0,
  OPINE_HIGHER_IS_0 = 1
} opine_label_convention;

/* Pairwise comparison report {"mpp_accuracy", "ml_accuracy", "n_pairs"}.
 * features must cover every post in every pair. */
opine_status opine_eval_pairwise_json(const opine_pairs* pairs,
                                      const opine_features* features,
                                      const opine_spec* spec,
                                      opine_label_convention convention,
                                      int invert_ml, char** json_out);

/* ---- prompts --------------------------------------------------------- */

/* vocab_json maps label digits to surface forms: {"1": "more", "0": "less"}.
 * NULL/empty selects the default vocabulary. */

/* JSON array of one packed prompt per pair:
 * {"id", "prompt", "n_shots", "token_estimate", "budget",
 *  "mpp_label", "ml_label"}. Shots are built from shots_pairs, shuffled and
 * packed per pair under seed + pair index. text_field is "primary" or
 * "translated". */
opine_status opine_build_prompts_json(const opine_pairs* pairs,
                                      const opine_pairs* shots_pairs,
                                      int64_t budget, uint64_t seed,
                                      const char* vocab_json,
                                      const char* text_field, char** json_out);

/* Scores completion records {"id", "completion"} against the pairs' labels;
 * unparseable completions count as incorrect on both metrics. Returns the
 * pairwise comparison report. */
opine_status opine_parse_completions_json(const char* completions_path,
                                          const opine_pairs* pairs,
                                          const char* vocab_json,
                                          char** json_out);

/* T5-style training lines {"input", "target"}, one JSON object per pair,
 * written to out_path. */
opine_status opine_t5_export(const opine_pairs* pairs, const char* vocab_json,
                             const char* text_field, const char* out_path);

/* One-shot request against the completion endpoint named by
 * COMPLETION_API_URL / COMPLETION_API_KEY. */
opine_status opine_complete(const char* model, const char* prompt,
                            int max_tokens, double temperature,
                            int max_retries, char** text_out);

#ifdef __cplusplus
}
#endif

#endif /* OPINE_H */
