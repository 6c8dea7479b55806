#include <doctest.h>

#include <array>
#include <cmath>

#include "helpers.hpp"
#include "opine/aggregate.hpp"
#include "opine/error.hpp"
#include "opine/util.hpp"

using namespace opine;

namespace {

FeatureVector fv13(const std::array<double, 13>& values) {
  FeatureVector fv;
  std::size_t i = 0;
  for (auto name : kComponentNames) fv.set(name, values[i++]);
  return fv;
}

// Order: len, finprolex, finword_pos, finword_neg, fls, non_fls, not_fls,
//        pos_tone, neg_tone, lm, nouns, cards, verbs
const std::array<std::array<double, 13>, 10> kVectors = {{
    {0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0},
    {1, 1, 1, 0, 1, 0, 0, 0, 0, 0, 0, 0, 0},
    {1, 1, 0, 2, 0, 1, 0, 0.6, 0.2, 0.1, 0.5, 0.5, 0.2},
    {1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1},
    {0.25, 0.75, 0.5, 0.25, 0.125, 0.5, 0.0625, 0.3, 0.7, 0.2, 0.4, 0.6, 0.8},
    {0.9, 0.1, 0, 1, 0.2, 0.4, 0.6, 0.8, 0.1, 0.05, 0.15, 0.25, 0.35},
    {0.5, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0},
    {0, 0, 1, 0.5, 0, 0, 0, 0, 0, 0, 0, 0, 0},
    {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1, 0.11, 0.12, 0.13},
    {1, 0, 0.33, 0.67, 0.25, 0.75, 0.5, 0.5, 0.5, 0.5, 1, 1, 1},
}};

// Expected scores per vector: {base-1 mpp, base-1 ml, bayesdcm-2 mpp,
// bayesdcm-2 ml, multinomial-3 mpp, multinomial-3 ml}. Computed by exact
// decimal evaluation of the three formulas.
const std::array<std::array<double, 6>, 10> kExpected = {{
    {0.0, 0.0, 0.0, 0.0, 0.0, 0.0},
    {4.0, 3.0, 4.0, 3.0, 2.33, 1.33},
    {2.5, 4.5, 3.8, 5.8, 1.594, 3.594},
    {3.5, 3.5, 5.5, 5.5, 2.825, 2.825},
    {1.8125, 1.5625, 1.8125, 1.5625, 1.103125, 0.853125},
    {0.8, 1.8, 1.6, 2.6, 0.698, 1.698},
    {0.5, 0.5, 0.5, 0.5, 0.25, 0.25},
    {1.0, 0.5, 1.0, 0.5, 1.0, 0.5},
    {0.7, 0.8, 1.7, 1.8, 0.813, 0.913},
    {1.455, 1.795, 2.955, 3.295, 1.36625, 1.70625},
}};

FeatureVector random_fv(Rng& rng) {
  FeatureVector fv;
  for (auto name : kComponentNames) fv.set(name, rng.unit() * 4 - 2);
  return fv;
}

}  // namespace

TEST_CASE("builtin specs transcribe the published formulas") {
  const auto& specs = builtin_specs();
  REQUIRE(specs.size() == 3);
  REQUIRE(specs.count("base-1") == 1);
  REQUIRE(specs.count("bayesdcm-2") == 1);
  REQUIRE(specs.count("multinomial-3") == 1);

  CHECK(specs.at("base-1").groups.size() == 4);
  CHECK(specs.at("bayesdcm-2").groups.size() == 6);
  CHECK(specs.at("multinomial-3").groups.size() == 5);

  // bayesdcm-2 and multinomial-3 reference the same component set
  const auto components_of = [](const AggregatorSpec& spec) {
    std::set<std::string> names;
    for (const auto& group : spec.groups) {
      for (const auto& term : group.terms) names.insert(term.component);
    }
    return names;
  };
  CHECK(components_of(specs.at("bayesdcm-2")) ==
        components_of(specs.at("multinomial-3")));
}

TEST_CASE("builtin specs reproduce hand-computed scores to 1e-12") {
  const auto& specs = builtin_specs();
  for (std::size_t i = 0; i < kVectors.size(); ++i) {
    const auto fv = fv13(kVectors[i]);
    const double got[6] = {
        score(fv, specs.at("base-1"), TargetMetric::Mpp),
        score(fv, specs.at("base-1"), TargetMetric::Ml),
        score(fv, specs.at("bayesdcm-2"), TargetMetric::Mpp),
        score(fv, specs.at("bayesdcm-2"), TargetMetric::Ml),
        score(fv, specs.at("multinomial-3"), TargetMetric::Mpp),
        score(fv, specs.at("multinomial-3"), TargetMetric::Ml),
    };
    for (int k = 0; k < 6; ++k) {
      INFO("vector ", i + 1, " column ", k);
      CHECK(std::abs(got[k] - kExpected[i][k]) <= 1e-12);
    }
  }
}

TEST_CASE("base-1 and bayesdcm-2 coincide when the extra groups are zero") {
  Rng rng(53);
  const auto& specs = builtin_specs();
  for (int round = 0; round < 100; ++round) {
    FeatureVector fv = random_fv(rng);
    for (auto name : {"pos_tone", "neg_tone", "lm", "nouns", "cards", "verbs"}) {
      fv.set(name, 0.0);
    }
    for (auto target : {TargetMetric::Mpp, TargetMetric::Ml}) {
      CHECK(score(fv, specs.at("base-1"), target) ==
            score(fv, specs.at("bayesdcm-2"), target));
    }
  }
}

TEST_CASE("scoring is linear in the feature vector") {
  Rng rng(59);
  const auto& specs = builtin_specs();
  for (int round = 0; round < 50; ++round) {
    const FeatureVector f1 = random_fv(rng);
    const FeatureVector f2 = random_fv(rng);
    const double a = rng.unit() * 4 - 2;
    const double b = rng.unit() * 4 - 2;
    FeatureVector combined;
    for (auto name : kComponentNames) {
      combined.set(name, a * f1.get(name) + b * f2.get(name));
    }
    for (const auto& [_, spec] : specs) {
      for (auto target : {TargetMetric::Mpp, TargetMetric::Ml}) {
        const double lhs = score(combined, spec, target);
        const double rhs =
            a * score(f1, spec, target) + b * score(f2, spec, target);
        CHECK(std::abs(lhs - rhs) <= 1e-9);
      }
    }
  }
}

TEST_CASE("target switch identity") {
  Rng rng(61);
  const auto& specs = builtin_specs();
  for (int round = 0; round < 200; ++round) {
    const FeatureVector fv = random_fv(rng);
    for (const auto& [_, spec] : specs) {
      const double diff = score(fv, spec, TargetMetric::Mpp) -
                          score(fv, spec, TargetMetric::Ml);
      const double expected = fv.get("finword_pos") - fv.get("finword_neg");
      CHECK(std::abs(diff - expected) <= 1e-12);
    }
  }
}

TEST_CASE("spec config file round trip and validation") {
  auto dir = testutil::make_temp_dir();
  const std::string text = R"({
    "name": "custom",
    "groups": [
      {"weight": 1.0, "terms": [{"component": "len", "coefficient": 2.0}]},
      {"weight": 0.5, "terms": [{"component": "finword_switch"}]}
    ]
  })";
  auto path = testutil::write_file(dir / "spec.json", text);
  auto spec = AggregatorSpec::load(path);
  CHECK(spec.name == "custom");
  REQUIRE(spec.groups.size() == 2);
  CHECK(spec.groups[0].terms[0].coefficient == 2.0);
  CHECK(spec.groups[1].terms[0].component == "finword_switch");

  FeatureVector fv;
  fv.set("len", 3.0);
  fv.set("finword_pos", 1.0);
  fv.set("finword_neg", 4.0);
  CHECK(score(fv, spec, TargetMetric::Mpp) == 6.5);
  CHECK(score(fv, spec, TargetMetric::Ml) == 8.0);

  auto round_tripped = AggregatorSpec::from_json_text(spec.to_json_text());
  CHECK(round_tripped.to_json_text() == spec.to_json_text());
}

TEST_CASE("unknown components fail at load time") {
  CHECK_THROWS_WITH_AS(
      AggregatorSpec::from_json_text(
          R"({"name":"bad","groups":[{"weight":1,"terms":[{"component":"bogus"}]}]})"),
      doctest::Contains("bogus"), Error);

  // mixing the switch with an explicit side is rejected
  CHECK_THROWS_AS(
      AggregatorSpec::from_json_text(
          R"({"name":"bad","groups":[{"weight":1,"terms":[
              {"component":"finword_switch"},{"component":"finword_pos"}]}]})"),
      Error);
}

TEST_CASE("builtin serialization is byte-stable") {
  const std::string first = builtin_specs().at("base-1").to_json_text();
  const std::string second = builtin_specs().at("base-1").to_json_text();
  CHECK(first == second);
  CHECK(first ==
        R"({"groups":[{"terms":[{"coefficient":1.0,"component":"len"}],"weight":1.0},)"
        R"({"terms":[{"coefficient":1.0,"component":"finprolex"}],"weight":1.0},)"
        R"({"terms":[{"coefficient":1.0,"component":"finword_switch"}],"weight":1.0},)"
        R"({"terms":[{"coefficient":1.0,"component":"fls"},{"coefficient":0.5,"component":"non_fls"},)"
        R"({"coefficient":-1.0,"component":"not_fls"}],"weight":1.0}],"name":"base-1"})");
}

TEST_CASE("resolve_spec prefers builtin names") {
  CHECK(resolve_spec("multinomial-3").name == "multinomial-3");
  CHECK_THROWS_AS(resolve_spec("no-such-spec-or-file"), Error);
}
