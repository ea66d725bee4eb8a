#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "confokit/event_log.hpp"
#include "confokit/process_model.hpp"

namespace confokit {

enum class Perspective { control_flow, data, resource, time };

std::string to_string(Perspective p);
Perspective perspective_from_string(std::string_view text);

// Activity executed between min and max times per trace.
struct CardinalityRule {
  std::string activity;
  std::size_t min = 0;
  std::size_t max = 0;
  friend auto operator<=>(const CardinalityRule&, const CardinalityRule&) = default;
};

// Every occurrence of `first` is eventually followed by a `second`.
struct ResponseRule {
  std::string first;
  std::string second;
  friend auto operator<=>(const ResponseRule&, const ResponseRule&) = default;
};

// Every occurrence of `second` is preceded by an earlier `first`.
struct PrecedenceRule {
  std::string first;
  std::string second;
  friend auto operator<=>(const PrecedenceRule&, const PrecedenceRule&) = default;
};

// At most one of the two activities occurs in a trace (a < b lexicographically).
struct ExclusivenessRule {
  std::string a;
  std::string b;
  friend auto operator<=>(const ExclusivenessRule&, const ExclusivenessRule&) = default;
};

// User-supplied constraint on an event attribute, bound to an activity.
// Never derived from a model.
struct AttributeRule {
  std::string activity;
  std::string attribute;
  AttributeComparison::Op op = AttributeComparison::Op::eq;
  AttributeValue value;
  friend bool operator==(const AttributeRule&, const AttributeRule&) = default;
};

enum class RuleSource { derived_from_model, user_supplied };

struct Rule {
  std::variant<CardinalityRule, ResponseRule, PrecedenceRule, ExclusivenessRule, AttributeRule> kind;
  std::set<Perspective> perspective = {Perspective::control_flow};
  RuleSource source = RuleSource::derived_from_model;

  std::string describe() const;  // "cardinality(D,1,1)", "response(A,D)", ...
  friend bool operator==(const Rule&, const Rule&) = default;
};

struct RuleSet {
  std::vector<Rule> rules;
};

struct Violation {
  std::size_t rule_index = 0;
  std::string rule_text;
  std::string case_id;
  std::vector<std::size_t> evidence;  // event positions; empty for absence violations
  std::string description;
};

// Rules satisfied by every sequence of the net's enumerated language:
// per-activity cardinality bounds, response/precedence pairs, and
// exclusiveness pairs. Throws when the language enumeration is truncated.
RuleSet derive_rules(const PetriNet& net, const LanguageBounds& bounds = {});

// At most one Violation per rule.
std::vector<Violation> check_trace(const Trace& trace, const RuleSet& rules);

struct RuleFitness {
  std::map<std::string, double> per_trace;
  double log_fitness = 0.0;
};

// Trace fitness 1 - violated/|rules|; log fitness is the variant-frequency
// weighted mean (equals the plain trace mean).
RuleFitness rule_fitness(const EventLog& log, const RuleSet& rules);

std::string rules_to_json(const RuleSet& rules);
RuleSet rules_from_json(std::string_view text);

}  // namespace confokit
