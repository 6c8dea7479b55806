#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "opine/error.hpp"
#include "opine/prompt.hpp"
#include "opine/util.hpp"

using namespace opine;

TEST_CASE("build_shot fills the template exactly") {
  auto pair = testutil::make_pair("台積電會漲", "台積電會跌", 1, 0);
  auto shot = build_shot(pair, LabelVocabulary());
  CHECK(shot.text ==
        "post1 : 台積電會漲 post2: 台積電會跌 > "
        "maximal potential profit (MPP)| more# maximal loss (ML)| less.");
  CHECK(shot.token_estimate == estimate_tokens(shot.text));
  CHECK(shot.token_estimate > 0);
}

TEST_CASE("build_query truncates after '>'") {
  auto pair = testutil::make_pair("alpha", "beta", 0, 0);
  const std::string query = build_query(pair);
  CHECK(query == "post1 : alpha post2: beta >");
  CHECK(query.back() == '>');

  // the shot extends the query
  auto shot = build_shot(pair, LabelVocabulary());
  CHECK(shot.text.rfind(query, 0) == 0);
}

TEST_CASE("empty post texts keep the double spaces") {
  auto pair = testutil::make_pair("", "", 1, 1);
  CHECK(build_query(pair) == "post1 :  post2:  >");
}

TEST_CASE("field selection changes the shot text, not its shape") {
  LabeledPair pair = testutil::make_pair("中文一", "中文二", 1, 0);
  pair.post1.text_translated = "english one";
  pair.post2.text_translated = "english two";
  auto zh = build_shot(pair, LabelVocabulary(), TextField::Primary);
  auto en = build_shot(pair, LabelVocabulary(), TextField::Translated);
  CHECK(zh.text != en.text);
  CHECK(en.text ==
        "post1 : english one post2: english two > "
        "maximal potential profit (MPP)| more# maximal loss (ML)| less.");

  LabeledPair missing = testutil::make_pair("x", "y", 0, 0);
  CHECK_THROWS_AS(build_shot(missing, LabelVocabulary(), TextField::Translated),
                  Error);
}

TEST_CASE("estimate_tokens") {
  CHECK(estimate_tokens("") == 0);
  CHECK(estimate_tokens("abcd") == 1);
  CHECK(estimate_tokens("abcde") == 2);
  // 3 ideographs + 6 remaining code points
  CHECK(estimate_tokens("台積電 buy!") == 3 + 2);
  CHECK(estimate_tokens("台積電") == 3);
}

TEST_CASE("parse_completion") {
  LabelVocabulary vocab;

  SUBCASE("direct match") {
    auto labels = parse_completion(
        " maximal potential profit (MPP)| more# maximal loss (ML)| less.",
        vocab);
    CHECK(labels.mpp_label == 1);
    CHECK(labels.ml_label == 0);
  }

  SUBCASE("garbage is unparseable") {
    CHECK_THROWS_AS(parse_completion("garbage output", vocab), Error);
    CHECK_THROWS_AS(parse_completion(
                        "maximal potential profit (MPP)| maybe# maximal loss "
                        "(ML)| less.",
                        vocab),
                    Error);
    CHECK_THROWS_AS(
        parse_completion("maximal potential profit (MPP)| more no delimiters",
                         vocab),
        Error);
  }

  SUBCASE("the first complete block wins") {
    auto labels = parse_completion(
        "maximal potential profit (MPP)| less# maximal loss (ML)| more.\n"
        "maximal potential profit (MPP)| more# maximal loss (ML)| less.",
        vocab);
    CHECK(labels.mpp_label == 0);
    CHECK(labels.ml_label == 1);
  }
}

TEST_CASE("shot round trip for every label combination and vocabulary") {
  const LabelVocabulary vocabularies[] = {
      LabelVocabulary(),
      LabelVocabulary("higher", "lower"),
      LabelVocabulary("看多", "看空"),
  };
  for (const auto& vocab : vocabularies) {
    for (int mpp = 0; mpp <= 1; ++mpp) {
      for (int ml = 0; ml <= 1; ++ml) {
        auto pair = testutil::make_pair("text one", "text two", mpp, ml);
        auto shot = build_shot(pair, vocab);
        const std::string suffix = shot.text.substr(build_query(pair).size());
        auto labels = parse_completion(suffix, vocab);
        CHECK(labels.mpp_label == mpp);
        CHECK(labels.ml_label == ml);
      }
    }
  }
}

TEST_CASE("label vocabulary validation and files") {
  CHECK_THROWS_AS(LabelVocabulary("same", "same"), Error);
  CHECK_THROWS_AS(LabelVocabulary("", "less"), Error);
  CHECK_THROWS_AS(LabelVocabulary("a#b", "less"), Error);
  CHECK_THROWS_AS(LabelVocabulary("more", "l.ess"), Error);

  auto dir = testutil::make_temp_dir();
  auto path = testutil::write_file(dir / "vocab.json",
                                   R"({"1": "gains", "0": "loses"})");
  auto vocab = LabelVocabulary::load(path);
  CHECK(vocab.render(1) == "gains");
  CHECK(vocab.render(0) == "loses");
  CHECK(vocab.parse("gains") == 1);
  CHECK(vocab.parse("unknown") == -1);
}

TEST_CASE("pack_prompt") {
  auto query_pair = testutil::make_pair(std::string(791, 'a'),
                                        std::string(791, 'b'), 0, 0);
  REQUIRE(estimate_tokens(build_query(query_pair)) == 400);

  const auto shot_of = [](std::int64_t estimate) {
    // 4 ASCII characters estimate as one token
    return PromptShot{std::string(static_cast<std::size_t>(estimate) * 4, 's'),
                      estimate};
  };

  SUBCASE("no shots leaves only the query") {
    auto packed = pack_prompt({}, query_pair, 4000, 1);
    CHECK(packed.shots.empty());
    CHECK(packed.text() == build_query(query_pair));
    CHECK(packed.total_token_estimate == 400);
  }

  SUBCASE("three 1500-token shots against budget 4000 pack exactly two") {
    std::vector<PromptShot> shots{shot_of(1500), shot_of(1500), shot_of(1500)};
    auto packed = pack_prompt(shots, query_pair, 4000, 9);
    CHECK(packed.shots.size() == 2);
    CHECK(packed.total_token_estimate == 3400);
  }

  SUBCASE("greedy packing skips an oversized shot but keeps later fits") {
    std::vector<PromptShot> shots{shot_of(3000), shot_of(900), shot_of(200)};
    // Find a seed whose shuffle keeps the given order, so the 900-token shot
    // overflows after the 3000-token one and the 200-token shot still fits.
    std::uint64_t seed = 0;
    for (;; ++seed) {
      Rng probe(seed);
      std::vector<int> order{0, 1, 2};
      probe.shuffle(order);
      if (order == std::vector<int>{0, 1, 2}) break;
    }
    auto packed = pack_prompt(shots, query_pair, 4000, seed);
    REQUIRE(packed.shots.size() == 2);
    CHECK(packed.shots[0].token_estimate == 3000);
    CHECK(packed.shots[1].token_estimate == 200);
    CHECK(packed.total_token_estimate == 3600);
  }

  SUBCASE("same seed packs byte-identical prompts") {
    std::vector<PromptShot> shots;
    for (int i = 0; i < 12; ++i) {
      shots.push_back(PromptShot{"shot number " + std::to_string(i) +
                                     std::string(40 + i, 'x'),
                                 20 + i});
    }
    auto first = pack_prompt(shots, query_pair, 4000, 77);
    auto second = pack_prompt(shots, query_pair, 4000, 77);
    CHECK(first.text() == second.text());
    auto other_seed = pack_prompt(shots, query_pair, 4000, 78);
    CHECK(first.text() != other_seed.text());
  }

  SUBCASE("budget is never exceeded") {
    Rng rng(83);
    for (int round = 0; round < 200; ++round) {
      std::vector<PromptShot> shots;
      const std::size_t n = rng.bounded(20);
      for (std::size_t i = 0; i < n; ++i) {
        shots.push_back(shot_of(1 + static_cast<std::int64_t>(rng.bounded(2200))));
      }
      auto packed = pack_prompt(shots, query_pair, 4000, rng.next());
      CHECK(packed.total_token_estimate <= 4000);
    }
  }

  SUBCASE("a query exceeding the budget is an error") {
    CHECK_THROWS_AS(pack_prompt({}, query_pair, 100, 1), Error);
  }
}

TEST_CASE("t5_format emits the training templates verbatim") {
  auto pair = testutil::make_pair("first text", "second text", 1, 1);
  auto example = t5_format(pair, LabelVocabulary());
  CHECK(example.input == "post1 : first text post2 : second text  </s>");
  CHECK(example.input.substr(example.input.size() - 6) == "  </s>");
  CHECK(example.target ==
        "maximal potential profit (MPP) : more maximal loss (ML) : more </s>");
}
