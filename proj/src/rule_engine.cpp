#include "confokit/rule_engine.hpp"

#include <algorithm>

#include <json.hpp>

#include "confokit/errors.hpp"

namespace confokit {

std::string to_string(Perspective p) {
  switch (p) {
    case Perspective::control_flow: return "control-flow";
    case Perspective::data: return "data";
    case Perspective::resource: return "resource";
    case Perspective::time: return "time";
  }
  return "control-flow";
}

Perspective perspective_from_string(std::string_view text) {
  if (text == "control-flow") return Perspective::control_flow;
  if (text == "data") return Perspective::data;
  if (text == "resource") return Perspective::resource;
  if (text == "time") return Perspective::time;
  throw validation_error("unknown perspective: " + std::string(text));
}

namespace {

std::string op_to_string(AttributeComparison::Op op) {
  using Op = AttributeComparison::Op;
  switch (op) {
    case Op::eq: return "==";
    case Op::ne: return "!=";
    case Op::lt: return "<";
    case Op::le: return "<=";
    case Op::gt: return ">";
    case Op::ge: return ">=";
  }
  return "==";
}

AttributeComparison::Op op_from_string(std::string_view text) {
  using Op = AttributeComparison::Op;
  if (text == "==") return Op::eq;
  if (text == "!=") return Op::ne;
  if (text == "<") return Op::lt;
  if (text == "<=") return Op::le;
  if (text == ">") return Op::gt;
  if (text == ">=") return Op::ge;
  throw validation_error("unknown comparison operator: " + std::string(text));
}

}  // namespace

std::string Rule::describe() const {
  if (const auto* c = std::get_if<CardinalityRule>(&kind))
    return "cardinality(" + c->activity + "," + std::to_string(c->min) + "," + std::to_string(c->max) + ")";
  if (const auto* r = std::get_if<ResponseRule>(&kind)) return "response(" + r->first + "," + r->second + ")";
  if (const auto* p = std::get_if<PrecedenceRule>(&kind))
    return "precedence(" + p->first + "," + p->second + ")";
  if (const auto* e = std::get_if<ExclusivenessRule>(&kind)) return "exclusiveness(" + e->a + "," + e->b + ")";
  const auto& a = std::get<AttributeRule>(kind);
  return "attribute(" + a.activity + "," + a.attribute + op_to_string(a.op) + attr_to_string(a.value) + ")";
}

RuleSet derive_rules(const PetriNet& net, const LanguageBounds& bounds) {
  LanguageResult language = enumerate_language(net, bounds);
  if (language.truncated)
    throw argument_error("language enumeration was truncated; derive rules with larger bounds");

  const auto& sequences = language.sequences;

  // Every visible label participates; labels that never reach the final
  // marking get the bound [0,0].
  std::set<std::string> alphabet;
  for (const auto& w : sequences)
    for (const auto& a : w) alphabet.insert(a);
  for (const auto& t : net.transitions())
    if (t.label) alphabet.insert(*t.label);

  auto occurrences = [](const std::vector<std::string>& w, const std::string& a) {
    return static_cast<std::size_t>(std::count(w.begin(), w.end(), a));
  };

  RuleSet out;
  // Cardinality: min/max occurrence count over the language.
  for (const std::string& a : alphabet) {
    std::size_t min = SIZE_MAX, max = 0;
    for (const auto& w : sequences) {
      std::size_t n = occurrences(w, a);
      min = std::min(min, n);
      max = std::max(max, n);
    }
    if (sequences.empty()) min = 0;
    out.rules.push_back(Rule{CardinalityRule{a, min, max}});
  }

  auto holds_response = [](const std::vector<std::string>& w, const std::string& a, const std::string& b) {
    for (std::size_t i = 0; i < w.size(); ++i) {
      if (w[i] != a) continue;
      bool followed = false;
      for (std::size_t j = i + 1; j < w.size(); ++j)
        if (w[j] == b) {
          followed = true;
          break;
        }
      if (!followed) return false;
    }
    return true;
  };
  auto holds_precedence = [](const std::vector<std::string>& w, const std::string& a, const std::string& b) {
    for (std::size_t j = 0; j < w.size(); ++j) {
      if (w[j] != b) continue;
      bool preceded = false;
      for (std::size_t i = 0; i < j; ++i)
        if (w[i] == a) {
          preceded = true;
          break;
        }
      if (!preceded) return false;
    }
    return true;
  };
  auto occurs_somewhere = [&](const std::string& a) {
    for (const auto& w : sequences)
      if (occurrences(w, a) > 0) return true;
    return false;
  };

  for (const std::string& a : alphabet) {
    if (!occurs_somewhere(a)) continue;  // vacuous rules are not emitted
    for (const std::string& b : alphabet) {
      if (a == b) continue;
      bool response = true;
      for (const auto& w : sequences)
        if (!holds_response(w, a, b)) {
          response = false;
          break;
        }
      if (response) out.rules.push_back(Rule{ResponseRule{a, b}});
    }
  }
  for (const std::string& a : alphabet) {
    for (const std::string& b : alphabet) {
      if (a == b || !occurs_somewhere(b)) continue;
      bool precedence = true;
      for (const auto& w : sequences)
        if (!holds_precedence(w, a, b)) {
          precedence = false;
          break;
        }
      if (precedence) out.rules.push_back(Rule{PrecedenceRule{a, b}});
    }
  }
  for (auto ia = alphabet.begin(); ia != alphabet.end(); ++ia) {
    for (auto ib = std::next(ia); ib != alphabet.end(); ++ib) {
      bool never_both = true, some_a = false, some_b = false;
      for (const auto& w : sequences) {
        bool has_a = occurrences(w, *ia) > 0, has_b = occurrences(w, *ib) > 0;
        if (has_a && has_b) never_both = false;
        some_a |= has_a;
        some_b |= has_b;
      }
      if (never_both && some_a && some_b) out.rules.push_back(Rule{ExclusivenessRule{*ia, *ib}});
    }
  }
  return out;
}

namespace {

bool attr_rule_event_ok(const AttributeRule& rule, const Event& event) {
  auto it = event.attributes.find(rule.attribute);
  if (it == event.attributes.end()) return false;
  const AttributeValue& lhs = it->second;
  const AttributeValue& rhs = rule.value;
  auto numeric = [](const AttributeValue& v) { return v.index() == 1 || v.index() == 2; };
  auto as_double = [](const AttributeValue& v) {
    return v.index() == 1 ? static_cast<double>(std::get<std::int64_t>(v)) : std::get<double>(v);
  };
  int cmp;
  if (numeric(lhs) && numeric(rhs)) {
    double a = as_double(lhs), b = as_double(rhs);
    cmp = a < b ? -1 : (a > b ? 1 : 0);
  } else if (lhs.index() != rhs.index()) {
    return rule.op == AttributeComparison::Op::ne;
  } else {
    std::string a = attr_to_string(lhs), b = attr_to_string(rhs);
    cmp = a < b ? -1 : (a > b ? 1 : 0);
  }
  using Op = AttributeComparison::Op;
  switch (rule.op) {
    case Op::eq: return cmp == 0;
    case Op::ne: return cmp != 0;
    case Op::lt: return cmp < 0;
    case Op::le: return cmp <= 0;
    case Op::gt: return cmp > 0;
    case Op::ge: return cmp >= 0;
  }
  return false;
}

}  // namespace

std::vector<Violation> check_trace(const Trace& trace, const RuleSet& rules) {
  std::vector<std::string> w = activity_sequence(trace);
  std::vector<Violation> out;

  auto positions_of = [&](const std::string& a) {
    std::vector<std::size_t> positions;
    for (std::size_t i = 0; i < w.size(); ++i)
      if (w[i] == a) positions.push_back(i);
    return positions;
  };

  for (std::size_t index = 0; index < rules.rules.size(); ++index) {
    const Rule& rule = rules.rules[index];
    Violation violation;
    violation.rule_index = index;
    violation.rule_text = rule.describe();
    violation.case_id = trace.case_id;
    bool violated = false;

    if (const auto* c = std::get_if<CardinalityRule>(&rule.kind)) {
      std::vector<std::size_t> positions = positions_of(c->activity);
      if (positions.size() < c->min) {
        violated = true;
        violation.description = c->activity + " executed " + std::to_string(positions.size()) +
                                " times, at least " + std::to_string(c->min) + " required";
        violation.evidence = positions;
      } else if (positions.size() > c->max) {
        violated = true;
        violation.description = c->activity + " executed " + std::to_string(positions.size()) +
                                " times, at most " + std::to_string(c->max) + " allowed";
        violation.evidence = positions;
      }
    } else if (const auto* r = std::get_if<ResponseRule>(&rule.kind)) {
      for (std::size_t i = 0; i < w.size(); ++i) {
        if (w[i] != r->first) continue;
        bool followed = false;
        for (std::size_t j = i + 1; j < w.size(); ++j)
          if (w[j] == r->second) {
            followed = true;
            break;
          }
        if (!followed) {
          violated = true;
          violation.evidence.push_back(i);
        }
      }
      if (violated)
        violation.description = r->second + " does not follow " + r->first;
    } else if (const auto* p = std::get_if<PrecedenceRule>(&rule.kind)) {
      for (std::size_t j = 0; j < w.size(); ++j) {
        if (w[j] != p->second) continue;
        bool preceded = false;
        for (std::size_t i = 0; i < j; ++i)
          if (w[i] == p->first) {
            preceded = true;
            break;
          }
        if (!preceded) {
          violated = true;
          violation.evidence.push_back(j);
        }
      }
      if (violated)
        violation.description = p->second + " occurs without preceding " + p->first;
    } else if (const auto* e = std::get_if<ExclusivenessRule>(&rule.kind)) {
      std::vector<std::size_t> pa = positions_of(e->a), pb = positions_of(e->b);
      if (!pa.empty() && !pb.empty()) {
        violated = true;
        violation.evidence = pa;
        violation.evidence.insert(violation.evidence.end(), pb.begin(), pb.end());
        std::sort(violation.evidence.begin(), violation.evidence.end());
        violation.description = e->a + " and " + e->b + " both executed";
      }
    } else {
      const auto& a = std::get<AttributeRule>(rule.kind);
      for (std::size_t i = 0; i < trace.events.size(); ++i) {
        if (trace.events[i].activity != a.activity) continue;
        if (!attr_rule_event_ok(a, trace.events[i])) {
          violated = true;
          violation.evidence.push_back(i);
        }
      }
      if (violated)
        violation.description = "attribute constraint failed on " + a.activity;
    }

    if (violated) out.push_back(std::move(violation));
  }
  return out;
}

RuleFitness rule_fitness(const EventLog& log, const RuleSet& rules) {
  if (rules.rules.empty()) throw argument_error("rule fitness needs a non-empty rule set");
  RuleFitness out;
  double total = 0;
  for (const Trace& trace : log.traces) {
    std::size_t violated = check_trace(trace, rules).size();
    double fitness = 1.0 - static_cast<double>(violated) / static_cast<double>(rules.rules.size());
    out.per_trace[trace.case_id] = fitness;
    total += fitness;
  }
  out.log_fitness = log.traces.empty() ? 0.0 : total / static_cast<double>(log.traces.size());
  return out;
}

namespace {

nlohmann::json attr_value_to_json(const AttributeValue& value) {
  switch (value.index()) {
    case 0: return std::get<std::string>(value);
    case 1: return std::get<std::int64_t>(value);
    case 2: return std::get<double>(value);
    case 3: return std::get<bool>(value);
    default: return format_iso8601(std::get<Timestamp>(value));
  }
}

AttributeValue attr_value_from_json(const nlohmann::json& j) {
  if (j.is_boolean()) return j.get<bool>();
  if (j.is_number_integer()) return j.get<std::int64_t>();
  if (j.is_number_float()) return j.get<double>();
  std::string text = j.get<std::string>();
  if (auto ts = parse_iso8601(text)) return *ts;
  return text;
}

}  // namespace

std::string rules_to_json(const RuleSet& rules) {
  nlohmann::ordered_json list = nlohmann::ordered_json::array();
  for (const Rule& rule : rules.rules) {
    nlohmann::ordered_json item;
    nlohmann::ordered_json params;
    if (const auto* c = std::get_if<CardinalityRule>(&rule.kind)) {
      item["kind"] = "cardinality";
      params["activity"] = c->activity;
      params["min"] = c->min;
      params["max"] = c->max;
    } else if (const auto* r = std::get_if<ResponseRule>(&rule.kind)) {
      item["kind"] = "response";
      params["first"] = r->first;
      params["second"] = r->second;
    } else if (const auto* p = std::get_if<PrecedenceRule>(&rule.kind)) {
      item["kind"] = "precedence";
      params["first"] = p->first;
      params["second"] = p->second;
    } else if (const auto* e = std::get_if<ExclusivenessRule>(&rule.kind)) {
      item["kind"] = "exclusiveness";
      params["a"] = e->a;
      params["b"] = e->b;
    } else {
      const auto& a = std::get<AttributeRule>(rule.kind);
      item["kind"] = "attribute";
      params["activity"] = a.activity;
      params["attribute"] = a.attribute;
      params["op"] = op_to_string(a.op);
      params["value"] = attr_value_to_json(a.value);
    }
    item["params"] = std::move(params);
    nlohmann::ordered_json perspectives = nlohmann::ordered_json::array();
    for (Perspective p : rule.perspective) perspectives.push_back(to_string(p));
    item["perspective"] = std::move(perspectives);
    item["source"] = rule.source == RuleSource::derived_from_model ? "derived-from-model" : "user-supplied";
    list.push_back(std::move(item));
  }
  return list.dump(2) + "\n";
}

RuleSet rules_from_json(std::string_view text) {
  nlohmann::json list;
  try {
    list = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw parse_error(std::string("rule set is not valid JSON: ") + e.what(), e.byte);
  }
  RuleSet out;
  for (const auto& item : list) {
    Rule rule;
    const std::string kind = item.at("kind").get<std::string>();
    const auto& params = item.at("params");
    if (kind == "cardinality") {
      rule.kind = CardinalityRule{params.at("activity").get<std::string>(),
                                  params.at("min").get<std::size_t>(), params.at("max").get<std::size_t>()};
    } else if (kind == "response") {
      rule.kind = ResponseRule{params.at("first").get<std::string>(), params.at("second").get<std::string>()};
    } else if (kind == "precedence") {
      rule.kind =
          PrecedenceRule{params.at("first").get<std::string>(), params.at("second").get<std::string>()};
    } else if (kind == "exclusiveness") {
      rule.kind = ExclusivenessRule{params.at("a").get<std::string>(), params.at("b").get<std::string>()};
    } else if (kind == "attribute") {
      rule.kind = AttributeRule{params.at("activity").get<std::string>(),
                                params.at("attribute").get<std::string>(),
                                op_from_string(params.at("op").get<std::string>()),
                                attr_value_from_json(params.at("value"))};
    } else {
      throw validation_error("unknown rule kind: " + kind);
    }
    rule.perspective.clear();
    for (const auto& p : item.at("perspective")) rule.perspective.insert(perspective_from_string(p.get<std::string>()));
    if (rule.perspective.empty()) throw validation_error("rule perspective must be non-empty");
    rule.source = item.at("source").get<std::string>() == "user-supplied" ? RuleSource::user_supplied
                                                                          : RuleSource::derived_from_model;
    out.rules.push_back(std::move(rule));
  }
  return out;
}

}  // namespace confokit
