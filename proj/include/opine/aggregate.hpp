#pragma once

#include <map>
#include <string>
#include <vector>

#include "opine/features.hpp"

namespace opine {

enum class TargetMetric { Mpp, Ml };

// The switch component resolves to finword_pos when scoring MPP and
// finword_neg when scoring ML.
inline constexpr std::string_view kFinwordSwitch = "finword_switch";

struct SpecTerm {
  std::string component;
  double coefficient = 1.0;
};

struct SpecGroup {
  double weight = 1.0;
  std::vector<SpecTerm> terms;
};

/// Declarative weighted sum over feature groups.
struct AggregatorSpec {
  std::string name;
  std::vector<SpecGroup> groups;

  // Unknown component names fail here, never at scoring time.
  void validate() const;

  static AggregatorSpec from_json_text(const std::string& text);
  std::string to_json_text() const;  // deterministic serialization
  static AggregatorSpec load(const std::string& path);
};

double score(const FeatureVector& fv, const AggregatorSpec& spec,
             TargetMetric target);

// The three published heuristics: base-1, bayesdcm-2, multinomial-3.
const std::map<std::string, AggregatorSpec>& builtin_specs();

// Builtin by name, else a spec config file at that path.
AggregatorSpec resolve_spec(const std::string& name_or_path);

}  // namespace opine
