#include "opine/aggregate.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "opine/error.hpp"

namespace opine {

using nlohmann::json;

void AggregatorSpec::validate() const {
  if (name.empty()) {
    throw Error(ErrorKind::Config, "aggregator spec needs a name");
  }
  int switch_terms = 0;
  int finword_terms = 0;
  for (const auto& group : groups) {
    for (const auto& term : group.terms) {
      if (term.component == kFinwordSwitch) {
        ++switch_terms;
        continue;
      }
      if (!is_component_name(term.component)) {
        throw Error(ErrorKind::Config,
                    "spec " + name + ": unknown component: " + term.component);
      }
      if (term.component == "finword_pos" || term.component == "finword_neg") {
        ++finword_terms;
      }
    }
  }
  // The market sentiment count is target-switched; a spec may reference it
  // either through the switch or through exactly one explicit side.
  if (switch_terms > 0 && finword_terms > 0) {
    throw Error(ErrorKind::Config,
                "spec " + name +
                    ": finword_switch cannot be mixed with explicit "
                    "finword_pos/finword_neg terms");
  }
  if (finword_terms > 1) {
    throw Error(ErrorKind::Config,
                "spec " + name +
                    ": at most one of finword_pos/finword_neg may appear");
  }
}

AggregatorSpec AggregatorSpec::from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Config, std::string("bad spec JSON: ") + e.what());
  }
  AggregatorSpec spec;
  try {
    spec.name = j.at("name").get<std::string>();
    for (const auto& g : j.at("groups")) {
      SpecGroup group;
      group.weight = g.at("weight").get<double>();
      for (const auto& t : g.at("terms")) {
        SpecTerm term;
        term.component = t.at("component").get<std::string>();
        term.coefficient = t.value("coefficient", 1.0);
        group.terms.push_back(std::move(term));
      }
      spec.groups.push_back(std::move(group));
    }
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Config, std::string("bad spec JSON: ") + e.what());
  }
  spec.validate();
  return spec;
}

std::string AggregatorSpec::to_json_text() const {
  json j;
  j["name"] = name;
  j["groups"] = json::array();
  for (const auto& group : groups) {
    json g;
    g["weight"] = group.weight;
    g["terms"] = json::array();
    for (const auto& term : group.terms) {
      g["terms"].push_back({{"component", term.component},
                            {"coefficient", term.coefficient}});
    }
    j["groups"].push_back(std::move(g));
  }
  return j.dump();
}

AggregatorSpec AggregatorSpec::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorKind::Io, "cannot open spec file: " + path);
  }
  std::stringstream buffer;
  buffer << in.rdbuf();
  return from_json_text(buffer.str());
}

double score(const FeatureVector& fv, const AggregatorSpec& spec,
             TargetMetric target) {
  double total = 0.0;
  for (const auto& group : spec.groups) {
    double group_sum = 0.0;
    for (const auto& term : group.terms) {
      std::string_view component = term.component;
      if (component == kFinwordSwitch) {
        component = target == TargetMetric::Mpp ? "finword_pos" : "finword_neg";
      }
      group_sum += term.coefficient * fv.get(component);
    }
    total += group.weight * group_sum;
  }
  return total;
}

namespace {

SpecGroup group(double weight, std::vector<SpecTerm> terms) {
  return SpecGroup{weight, std::move(terms)};
}

std::map<std::string, AggregatorSpec> make_builtins() {
  std::map<std::string, AggregatorSpec> specs;

  const SpecGroup fls_group =
      group(1.0, {{"fls", 1.0}, {"non_fls", 0.5}, {"not_fls", -1.0}});
  const SpecGroup tone_lm_group =
      group(1.0, {{"pos_tone", 1.0}, {"neg_tone", -1.0}, {"lm", 1.0}});
  const SpecGroup pos_group =
      group(1.0, {{"nouns", 1.0}, {"cards", 1.0}, {"verbs", -1.0}});
  const SpecGroup switch_group =
      group(1.0, {{std::string(kFinwordSwitch), 1.0}});

  AggregatorSpec base1;
  base1.name = "base-1";
  base1.groups = {group(1.0, {{"len", 1.0}}), group(1.0, {{"finprolex", 1.0}}),
                  switch_group, fls_group};
  specs.emplace(base1.name, std::move(base1));

  AggregatorSpec bayesdcm2;
  bayesdcm2.name = "bayesdcm-2";
  bayesdcm2.groups = {group(1.0, {{"len", 1.0}}),
                      group(1.0, {{"finprolex", 1.0}}),
                      switch_group,
                      fls_group,
                      tone_lm_group,
                      pos_group};
  specs.emplace(bayesdcm2.name, std::move(bayesdcm2));

  // Group weights transcribed literally: 0.33, not 1/3.
  AggregatorSpec multinomial3;
  multinomial3.name = "multinomial-3";
  multinomial3.groups = {group(0.5, {{"len", 1.0}, {"finprolex", 1.0}}),
                         group(0.33, fls_group.terms),
                         group(0.33, tone_lm_group.terms),
                         group(0.33, pos_group.terms),
                         switch_group};
  specs.emplace(multinomial3.name, std::move(multinomial3));

  for (const auto& [_, spec] : specs) spec.validate();
  return specs;
}

}  // namespace

const std::map<std::string, AggregatorSpec>& builtin_specs() {
  static const std::map<std::string, AggregatorSpec> specs = make_builtins();
  return specs;
}

AggregatorSpec resolve_spec(const std::string& name_or_path) {
  const auto& builtins = builtin_specs();
  auto it = builtins.find(name_or_path);
  if (it != builtins.end()) return it->second;
  return AggregatorSpec::load(name_or_path);
}

}  // namespace opine
