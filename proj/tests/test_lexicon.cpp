#include <doctest.h>

#include <cmath>
#include <map>

#include "helpers.hpp"
#include "opine/error.hpp"
#include "opine/lexicon.hpp"
#include "opine/util.hpp"

using namespace opine;

namespace {

using TokenDoc = std::pair<std::vector<std::string>, std::string>;

std::vector<ClassedPost> to_docs(const std::vector<TokenDoc>& docs) {
  std::vector<ClassedPost> out;
  int n = 0;
  for (const auto& [tokens, doc_class] : docs) {
    ClassedPost doc;
    doc.post = testutil::make_post("d" + std::to_string(n++), tokens);
    doc.doc_class = doc_class;
    out.push_back(std::move(doc));
  }
  return out;
}

// Independent oracle: explicit probability table built from a flat tally.
std::map<std::string, double> oracle_pmi_weights(
    const std::vector<TokenDoc>& docs, const std::string& pos,
    const std::string& neg, double alpha) {
  std::map<std::string, std::map<std::string, long long>> counts;
  std::map<std::string, long long> class_totals{{pos, 0}, {neg, 0}};
  long long total = 0;
  for (const auto& [tokens, doc_class] : docs) {
    for (const auto& token : tokens) {
      counts[token][doc_class] += 1;
      class_totals[doc_class] += 1;
      ++total;
    }
  }
  const double vocab = static_cast<double>(counts.size());
  const double denom = static_cast<double>(total) + alpha * vocab * 2.0;
  std::map<std::string, double> weights;
  for (const auto& [term, by_class] : counts) {
    const auto count_in = [&](const std::string& c) {
      auto it = by_class.find(c);
      return it == by_class.end() ? 0LL : it->second;
    };
    const double p_pos = (count_in(pos) + alpha) / denom;
    const double p_neg = (count_in(neg) + alpha) / denom;
    const double p_w = p_pos + p_neg;
    const double pc_pos = (class_totals[pos] + alpha * vocab) / denom;
    const double pc_neg = (class_totals[neg] + alpha * vocab) / denom;
    weights[term] = std::log2(p_pos / (p_w * pc_pos)) -
                    std::log2(p_neg / (p_w * pc_neg));
  }
  return weights;
}

}  // namespace

TEST_CASE("collect_stats counts tokens per class") {
  auto docs = to_docs({{{"a"}, "c1"}, {{"b"}, "c2"}});
  auto stats = collect_stats(docs, 0.5);
  CHECK(stats.class_total(stats.class_index("c1")) == 1);
  CHECK(stats.class_total(stats.class_index("c2")) == 1);
  CHECK(stats.total_tokens() == 2);
}

TEST_CASE("collect_stats matches a hand tally") {
  // 4 docs, 20 tokens total
  auto docs = to_docs({{{"up", "up", "buy", "tech", "tech"}, "bullish"},
                       {{"up", "buy", "buy", "hold", "cash"}, "bullish"},
                       {{"down", "down", "sell", "cash", "up"}, "bearish"},
                       {{"sell", "sell", "tech", "down", "fear"}, "bearish"}});
  auto stats = collect_stats(docs, 0.5);
  CHECK(stats.total_tokens() == 20);
  const auto bull = stats.class_index("bullish");
  const auto bear = stats.class_index("bearish");
  CHECK(stats.count("up", bull) == 3);
  CHECK(stats.count("up", bear) == 1);
  CHECK(stats.count("sell", bull) == 0);
  CHECK(stats.count("sell", bear) == 3);
  CHECK(stats.count("tech", bull) == 2);
  CHECK(stats.count("tech", bear) == 1);
  CHECK(stats.vocab_size() == 8);
}

TEST_CASE("collect_stats requires exactly two classes") {
  CHECK_THROWS_AS(collect_stats(to_docs({{{"a"}, "only"}}), 0.5), Error);
  CHECK_THROWS_AS(
      collect_stats(to_docs({{{"a"}, "x"}, {{"b"}, "y"}, {{"c"}, "z"}}), 0.5),
      Error);
}

TEST_CASE("alpha zero records zero joint probability and induce rejects it") {
  auto docs = to_docs({{{"a", "b"}, "c1"}, {{"a"}, "c2"}});
  auto stats = collect_stats(docs, 0.0);
  CHECK(stats.p_joint("b", stats.class_index("c2")) == 0.0);
  CHECK_THROWS_WITH_AS(induce_pmi_lexicon(stats, "c1", "c2"),
                       doctest::Contains("b"), Error);
}

TEST_CASE("equal counts and equal class totals give weight exactly zero") {
  auto docs = to_docs({{{"same", "x"}, "c1"}, {{"same", "y"}, "c2"}});
  for (double alpha : {0.25, 0.5, 1.0, 2.0}) {
    auto stats = collect_stats(docs, alpha);
    auto lexicon = induce_pmi_lexicon(stats, "c1", "c2");
    CHECK(lexicon.find("same")->weight == 0.0);
    CHECK(lexicon.find("same")->polarity == Polarity::Neutral);
  }
}

TEST_CASE("class swap negates every weight exactly") {
  Rng rng(11);
  const std::vector<std::string> vocab{"a", "b", "c", "d", "e", "f"};
  std::vector<TokenDoc> docs;
  for (int d = 0; d < 12; ++d) {
    std::vector<std::string> tokens;
    const std::size_t len = 1 + rng.bounded(8);
    for (std::size_t i = 0; i < len; ++i) {
      tokens.push_back(vocab[rng.bounded(vocab.size())]);
    }
    docs.push_back({tokens, d % 2 == 0 ? "analyst" : "amateur"});
  }
  auto stats = collect_stats(to_docs(docs), 0.5);
  auto forward = induce_pmi_lexicon(stats, "analyst", "amateur");
  auto backward = induce_pmi_lexicon(stats, "amateur", "analyst");
  REQUIRE(forward.size() == backward.size());
  for (const auto& [term, entry] : forward.entries()) {
    CHECK(backward.find(term)->weight == -entry.weight);
  }
}

TEST_CASE("induced weight matches the worked probability table") {
  // term "t" appears 3x in class A and 1x in class B; 2 docs per class,
  // 5 tokens each; alpha 0.5; |V| = 6. Hand evaluation gives log2(7/3).
  std::vector<TokenDoc> docs{{{"t", "t", "a", "b", "c"}, "A"},
                             {{"t", "d", "e", "a", "b"}, "A"},
                             {{"t", "a", "b", "c", "d"}, "B"},
                             {{"a", "b", "c", "d", "e"}, "B"}};
  auto stats = collect_stats(to_docs(docs), 0.5);
  CHECK(stats.vocab_size() == 6);
  auto lexicon = induce_pmi_lexicon(stats, "A", "B");
  const double expected = 1.2223924213364479;  // log2(7/3)
  CHECK(std::abs(lexicon.find("t")->weight - expected) <=
        1e-9 * std::abs(expected));

  auto oracle = oracle_pmi_weights(docs, "A", "B", 0.5);
  for (const auto& [term, entry] : lexicon.entries()) {
    CHECK(std::abs(entry.weight - oracle.at(term)) <=
          1e-9 * std::max(1.0, std::abs(oracle.at(term))));
  }
}

TEST_CASE("random corpora match the brute-force probability table") {
  Rng rng(23);
  for (int round = 0; round < 25; ++round) {
    const std::size_t vocab_size = 3 + rng.bounded(28);
    std::vector<std::string> vocab;
    for (std::size_t v = 0; v < vocab_size; ++v) {
      vocab.push_back("w" + std::to_string(v));
    }
    std::vector<TokenDoc> docs;
    const std::size_t n_docs = 2 + rng.bounded(49);
    for (std::size_t d = 0; d < n_docs; ++d) {
      std::vector<std::string> tokens;
      const std::size_t len = 1 + rng.bounded(20);
      for (std::size_t i = 0; i < len; ++i) {
        tokens.push_back(vocab[rng.bounded(vocab.size())]);
      }
      docs.push_back({tokens, d % 2 == 0 ? "pos" : "neg"});
    }
    auto stats = collect_stats(to_docs(docs), 0.5);
    auto lexicon = induce_pmi_lexicon(stats, "pos", "neg");
    auto oracle = oracle_pmi_weights(docs, "pos", "neg", 0.5);
    REQUIRE(lexicon.size() == oracle.size());
    for (const auto& [term, entry] : lexicon.entries()) {
      CHECK(std::abs(entry.weight - oracle.at(term)) <=
            1e-9 * std::max(1.0, std::abs(oracle.at(term))));
    }
  }
}

TEST_CASE("match_lexicon modes") {
  Lexicon lm("lm-fitted");
  lm.add("good", 0.02626, Polarity::Positive);
  lm.add("decline", 0.00243, Polarity::Negative);

  SUBCASE("no matching terms scores zero in every mode") {
    auto post = testutil::make_post("p", {"nothing", "here"});
    for (auto mode : {MatchMode::CountPositive, MatchMode::CountNegative,
                      MatchMode::CountAll, MatchMode::SumWeights,
                      MatchMode::SumSignedWeights}) {
      CHECK(match_lexicon(post, lm, mode) == 0.0);
    }
  }

  SUBCASE("signed sum of fitted weights") {
    auto post = testutil::make_post("p", {"good", "good", "decline"});
    const double got = match_lexicon(post, lm, MatchMode::SumSignedWeights);
    CHECK(got == doctest::Approx(2 * 0.02626 - 0.00243).epsilon(1e-12));
    CHECK(match_lexicon(post, lm, MatchMode::CountPositive) == 2.0);
    CHECK(match_lexicon(post, lm, MatchMode::CountNegative) == 1.0);
    CHECK(match_lexicon(post, lm, MatchMode::CountAll) == 3.0);
    CHECK(match_lexicon(post, lm, MatchMode::SumWeights) ==
          doctest::Approx(2 * 0.02626 + 0.00243).epsilon(1e-12));
  }

  SUBCASE("presence-based variant collapses repeats") {
    auto post = testutil::make_post("p", {"good", "good", "decline"});
    CHECK(match_lexicon(post, lm, MatchMode::CountPositive, true) == 1.0);
    CHECK(match_lexicon(post, lm, MatchMode::CountAll, true) == 2.0);
  }
}

TEST_CASE("count modes match a brute-force scan on a large random post") {
  Rng rng(5);
  Lexicon lexicon("random");
  std::vector<std::string> terms;
  for (int i = 0; i < 50; ++i) {
    terms.push_back("t" + std::to_string(i * 3));
    lexicon.add(terms.back(), rng.unit() - 0.5);
  }
  std::vector<std::string> tokens;
  for (int i = 0; i < 1000; ++i) {
    tokens.push_back("t" + std::to_string(rng.bounded(200)));
  }
  auto post = testutil::make_post("p", tokens);

  // oracle: nested loop over tokens x terms
  double expected = 0;
  for (const auto& token : tokens) {
    for (const auto& term : terms) {
      if (token == term) expected += 1;
    }
  }
  CHECK(match_lexicon(post, lexicon, MatchMode::CountAll) == expected);

  const double pos = match_lexicon(post, lexicon, MatchMode::CountPositive);
  const double neg = match_lexicon(post, lexicon, MatchMode::CountNegative);
  CHECK(pos + neg <= match_lexicon(post, lexicon, MatchMode::CountAll));
}

TEST_CASE("lexicon TSV round trip") {
  auto dir = testutil::make_temp_dir();
  Lexicon lexicon("x");
  lexicon.add("alpha", 1.25, Polarity::Positive);
  lexicon.add("beta", -0.5, Polarity::Negative);
  lexicon.add("gamma", 0.0, Polarity::Neutral);
  const auto path = (dir / "lex.tsv").string();
  lexicon.save_tsv(path);
  auto loaded = Lexicon::load_tsv(path, false);
  REQUIRE(loaded.size() == 3);
  CHECK(loaded.find("alpha")->weight == 1.25);
  CHECK(loaded.find("alpha")->polarity == Polarity::Positive);
  CHECK(loaded.find("beta")->polarity == Polarity::Negative);
  CHECK(loaded.find("gamma")->polarity == Polarity::Neutral);

  // sign-derived polarity without an explicit column
  auto two_col = testutil::write_file(dir / "two.tsv", "up\t0.5\ndown\t-0.25\nflat\t0\n");
  auto lex2 = Lexicon::load_tsv(two_col, false);
  CHECK(lex2.find("up")->polarity == Polarity::Positive);
  CHECK(lex2.find("down")->polarity == Polarity::Negative);
  CHECK(lex2.find("flat")->polarity == Polarity::Neutral);

  // one-column count lists are neutral with weight 1
  auto one_col = testutil::write_file(dir / "one.tsv", "台積電\n好\n");
  auto lex1 = Lexicon::load_tsv(one_col, false);
  CHECK(lex1.find("台積電")->weight == 1.0);
  CHECK(lex1.find("台積電")->polarity == Polarity::Neutral);

  // header skipping
  auto with_header = testutil::write_file(dir / "hdr.tsv", "term\tweight\nup\t1\n");
  CHECK(Lexicon::load_tsv(with_header, true).size() == 1);
  CHECK_THROWS_AS(Lexicon::load_tsv(with_header, false), Error);

  CHECK_THROWS_AS(Lexicon::load_tsv((dir / "missing.tsv").string(), false), Error);
}
