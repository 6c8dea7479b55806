#include "opine/prompt.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "opine/error.hpp"
#include "opine/util.hpp"

namespace opine {

using nlohmann::json;

namespace {

constexpr std::string_view kMppMarker = "maximal potential profit (MPP)|";
constexpr std::string_view kMlMarker = "maximal loss (ML)|";

}  // namespace

LabelVocabulary::LabelVocabulary(std::string text_for_1, std::string text_for_0)
    : text_for_1_(std::move(text_for_1)), text_for_0_(std::move(text_for_0)) {
  if (text_for_1_.empty() || text_for_0_.empty()) {
    throw Error(ErrorKind::Validation, "label texts must be non-empty");
  }
  if (text_for_1_ == text_for_0_) {
    throw Error(ErrorKind::Validation, "label texts must be distinct");
  }
  for (const auto* text : {&text_for_1_, &text_for_0_}) {
    if (text->find('#') != std::string::npos ||
        text->find('.') != std::string::npos) {
      throw Error(ErrorKind::Validation,
                  "label texts may not contain the delimiters '#' or '.'");
    }
  }
}

LabelVocabulary LabelVocabulary::from_json_text(const std::string& text) {
  try {
    json j = json::parse(text);
    return LabelVocabulary(j.at("1").get<std::string>(),
                           j.at("0").get<std::string>());
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Parse, std::string("bad vocabulary JSON: ") + e.what());
  }
}

LabelVocabulary LabelVocabulary::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorKind::Io, "cannot open vocabulary file: " + path);
  }
  std::stringstream buffer;
  buffer << in.rdbuf();
  return from_json_text(buffer.str());
}

const std::string& LabelVocabulary::render(int label) const {
  if (label != 0 && label != 1) {
    throw Error(ErrorKind::Validation, "label must be 0 or 1");
  }
  return label == 1 ? text_for_1_ : text_for_0_;
}

int LabelVocabulary::parse(std::string_view text) const {
  if (text == text_for_1_) return 1;
  if (text == text_for_0_) return 0;
  return -1;
}

std::string PackedPrompt::text() const {
  std::string out;
  for (const auto& shot : shots) {
    out += shot.text;
    out += '\n';
  }
  out += query;
  return out;
}

PromptShot build_shot(const LabeledPair& pair, const LabelVocabulary& vocab,
                      TextField field) {
  std::string text = build_query(pair, field);
  text += " ";
  text += kMppMarker;
  text += " " + vocab.render(pair.mpp_label) + "# ";
  text += kMlMarker;
  text += " " + vocab.render(pair.ml_label) + ".";
  const std::int64_t estimate = estimate_tokens(text);
  return PromptShot{std::move(text), estimate};
}

std::string build_query(const LabeledPair& pair, TextField field) {
  return "post1 : " + require_text(pair.post1, field) +
         " post2: " + require_text(pair.post2, field) + " >";
}

std::int64_t estimate_tokens(std::string_view text) {
  std::int64_t cjk = 0;
  std::int64_t other = 0;
  std::size_t i = 0;
  while (i < text.size()) {
    if (is_cjk_ideograph(utf8_next(text, i))) {
      ++cjk;
    } else {
      ++other;
    }
  }
  return cjk + (other + 3) / 4;
}

PackedPrompt pack_prompt(const std::vector<PromptShot>& shots,
                         const LabeledPair& query_pair, std::int64_t budget,
                         std::uint64_t seed, TextField field) {
  PackedPrompt packed;
  packed.budget = budget;
  packed.query = build_query(query_pair, field);
  const std::int64_t query_estimate = estimate_tokens(packed.query);
  if (query_estimate > budget) {
    throw Error(ErrorKind::Validation,
                "query alone exceeds the token budget (" +
                    std::to_string(query_estimate) + " > " +
                    std::to_string(budget) + ")");
  }

  std::vector<std::size_t> order(shots.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  Rng rng(seed);
  rng.shuffle(order);

  std::int64_t shot_total = 0;
  for (std::size_t idx : order) {
    const PromptShot& shot = shots[idx];
    if (shot_total + shot.token_estimate + query_estimate <= budget) {
      packed.shots.push_back(shot);
      shot_total += shot.token_estimate;
    }
  }
  packed.total_token_estimate = shot_total + query_estimate;
  return packed;
}

ParsedLabels parse_completion(std::string_view text,
                              const LabelVocabulary& vocab) {
  const auto fail = [&](const std::string& what) -> ParsedLabels {
    throw Error(ErrorKind::Parse, "unparseable completion: " + what);
  };

  const std::size_t mpp_at = text.find(kMppMarker);
  if (mpp_at == std::string_view::npos) return fail("MPP marker absent");
  const std::size_t mpp_from = mpp_at + kMppMarker.size();
  const std::size_t hash_at = text.find('#', mpp_from);
  if (hash_at == std::string_view::npos) return fail("'#' delimiter absent");
  const std::string mpp_text =
      trim(text.substr(mpp_from, hash_at - mpp_from));

  const std::size_t ml_at = text.find(kMlMarker, hash_at);
  if (ml_at == std::string_view::npos) return fail("ML marker absent");
  const std::size_t ml_from = ml_at + kMlMarker.size();
  const std::size_t dot_at = text.find('.', ml_from);
  if (dot_at == std::string_view::npos) return fail("terminal '.' absent");
  const std::string ml_text = trim(text.substr(ml_from, dot_at - ml_from));

  ParsedLabels labels;
  labels.mpp_label = vocab.parse(mpp_text);
  labels.ml_label = vocab.parse(ml_text);
  if (labels.mpp_label < 0) return fail("unknown MPP label: " + mpp_text);
  if (labels.ml_label < 0) return fail("unknown ML label: " + ml_text);
  return labels;
}

T5Example t5_format(const LabeledPair& pair, const LabelVocabulary& vocab,
                    TextField field) {
  T5Example example;
  example.input = "post1 : " + require_text(pair.post1, field) +
                  " post2 : " + require_text(pair.post2, field) + "  </s>";
  example.target = "maximal potential profit (MPP) : " +
                   vocab.render(pair.mpp_label) + " maximal loss (ML) : " +
                   vocab.render(pair.ml_label) + " </s>";
  return example;
}

}  // namespace opine
