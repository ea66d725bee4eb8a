#include "confokit/task_analytics.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <tuple>

#include "confokit/errors.hpp"

namespace confokit {

std::string to_string(Technique technique) {
  switch (technique) {
    case Technique::rules: return "rules";
    case Technique::replay: return "replay";
    case Technique::alignment: return "alignment";
  }
  return "alignment";
}

Technique technique_from_string(std::string_view text) {
  if (text == "rules") return Technique::rules;
  if (text == "replay") return Technique::replay;
  if (text == "alignment") return Technique::alignment;
  throw argument_error("unknown technique: " + std::string(text));
}

namespace {

// Alignments are cached per variant: conformance labels, chevron rows and
// violation listings all reuse the same per-trace alignment.
std::map<std::string, Alignment> align_per_trace(const EventLog& log, const PetriNet& net) {
  std::map<std::string, Alignment> out;
  for (const auto& [variant, alignment] : align_log(net, log).per_variant)
    for (const std::string& case_id : variant.member_cases) out[case_id] = alignment;
  return out;
}

bool alignment_clean(const Alignment& alignment) {
  for (const Move& move : alignment.moves) {
    if (move.kind == Move::Kind::log) return false;
    if (move.kind == Move::Kind::model && !move.silent_transition) return false;
  }
  return true;
}

}  // namespace

ConformanceReport derive_process_conformance(const EventLog& log, const PetriNet& net,
                                             Technique technique) {
  if (log.traces.empty()) throw argument_error("cannot derive conformance of an empty log");
  ConformanceReport report;
  report.technique = technique;

  switch (technique) {
    case Technique::rules: {
      RuleSet rules = derive_rules(net);
      RuleFitness fitness = rule_fitness(log, rules);
      report.per_trace = fitness.per_trace;
      report.log_fitness = fitness.log_fitness;
      for (const Trace& trace : log.traces) {
        for (const Violation& violation : check_trace(trace, rules)) {
          ReportViolation rv;
          rv.case_id = violation.case_id;
          rv.kind = "rule";
          rv.activity = violation.rule_text;
          rv.position = violation.evidence.empty() ? -1 : static_cast<std::int64_t>(violation.evidence[0]);
          rv.detail = violation.description;
          report.violations.push_back(std::move(rv));
        }
      }
      break;
    }
    case Technique::replay: {
      LogReplay replay = replay_log(net, log);
      report.log_fitness = replay.log_fitness;
      for (const Trace& trace : log.traces) {
        const ReplayResult& result = replay.per_trace.at(trace.case_id);
        report.per_trace[trace.case_id] = replay_fitness(result);
        for (const MissingTokenDetail& detail : result.missing_detail) {
          ReportViolation rv;
          rv.case_id = trace.case_id;
          rv.kind = "missing_token";
          rv.activity = detail.attributed_activity;
          rv.position = static_cast<std::int64_t>(detail.trace_position);
          rv.detail = detail.place.empty() ? "activity unknown to the model" : "missing token in " + detail.place;
          report.violations.push_back(std::move(rv));
        }
        for (const auto& [place, count] : result.remaining_detail) {
          ReportViolation rv;
          rv.case_id = trace.case_id;
          rv.kind = "remaining_token";
          rv.activity = place;
          rv.detail = std::to_string(count) + " token(s) left in " + place;
          report.violations.push_back(std::move(rv));
        }
      }
      break;
    }
    case Technique::alignment: {
      LogAlignment aligned = align_log(net, log);
      report.log_fitness = aligned.log_fitness;
      for (const auto& [variant, alignment] : aligned.per_variant) {
        Trace representative;
        representative.case_id = variant.member_cases.front();
        for (const std::string& activity : variant.sequence)
          representative.events.push_back(Event{representative.case_id, activity, {}, {}});
        double fitness = alignment_fitness(alignment, worst_case_cost(net, representative));
        for (const std::string& case_id : variant.member_cases) {
          report.per_trace[case_id] = fitness;
          std::int64_t position = 0;
          for (const Move& move : alignment.moves) {
            if (move.kind == Move::Kind::synchronous) {
              ++position;
              continue;
            }
            if (move.kind == Move::Kind::log) {
              report.violations.push_back(
                  {case_id, "log_move", move.activity, position, "executed but not allowed here"});
              ++position;
            } else if (!move.silent_transition) {
              report.violations.push_back(
                  {case_id, "model_move", move.activity, position, "required but not executed"});
            }
          }
        }
      }
      break;
    }
  }
  return report;
}

double summarize_process_conformance(const EventLog& log, const PetriNet& net) {
  if (log.traces.empty()) throw argument_error("cannot summarize an empty log");
  auto alignments = align_per_trace(log, net);
  std::int64_t clean = 0;
  for (const Trace& trace : log.traces)
    if (alignment_clean(alignments.at(trace.case_id))) ++clean;
  return static_cast<double>(clean) / static_cast<double>(log.traces.size());
}

std::vector<ChevronRow> present_guideline_violations(const EventLog& log, const PetriNet& net) {
  auto alignments = align_per_trace(log, net);
  std::vector<ChevronRow> rows;
  rows.reserve(log.traces.size());
  for (const Trace& trace : log.traces) {
    const Alignment& alignment = alignments.at(trace.case_id);
    ChevronRow row;
    row.case_id = trace.case_id;
    for (const Move& move : alignment.moves) {
      switch (move.kind) {
        case Move::Kind::synchronous:
          row.cells.push_back({move.activity, ChevronCell::Status::conforming});
          break;
        case Move::Kind::model:
          if (!move.silent_transition)
            row.cells.push_back({move.activity, ChevronCell::Status::missing});
          break;
        case Move::Kind::log:
          row.cells.push_back({move.activity, ChevronCell::Status::wrong});
          break;
      }
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<ViolationItem> identify_guideline_violations(const EventLog& log, const PetriNet& net,
                                                         const ViolationQuery& query) {
  if (query.trace_filter && !log.attribute_schema.count(query.trace_filter->attribute))
    throw schema_error("filter references undeclared attribute: " + query.trace_filter->attribute);
  if (query.target && *query.target != "log" && *query.target != "trace" && *query.target != "event")
    throw argument_error("target must be log, trace or event");

  // Alignment violations carry the control-flow perspective only.
  if (query.perspective && *query.perspective != Perspective::control_flow) return {};

  const EventLog* scope = &log;
  EventLog filtered;
  if (query.trace_filter) {
    filtered = filter_log(log, TracePredicate{*query.trace_filter});
    scope = &filtered;
  }

  auto alignments = align_per_trace(*scope, net);
  std::vector<ViolationItem> items;
  for (const Trace& trace : scope->traces) {
    const Alignment& alignment = alignments.at(trace.case_id);
    const auto sequence = activity_sequence(trace);
    std::int64_t position = 0;
    for (const Move& move : alignment.moves) {
      bool is_violation = move.kind == Move::Kind::log ||
                          (move.kind == Move::Kind::model && !move.silent_transition);
      std::int64_t at = position;
      if (move.kind != Move::Kind::model) ++position;
      if (!is_violation) continue;
      if (query.activity && *query.activity != move.activity) continue;
      ViolationItem item;
      item.case_id = trace.case_id;
      item.position = at;
      item.kind = move.kind == Move::Kind::log ? "inserted" : "missing";
      item.activity = move.activity;
      for (std::int64_t i = std::max<std::int64_t>(0, at - 2); i < at && i < static_cast<std::int64_t>(sequence.size()); ++i)
        item.context_before.push_back(sequence[static_cast<std::size_t>(i)]);
      for (std::int64_t i = at; i < at + 2 && i < static_cast<std::int64_t>(sequence.size()); ++i)
        item.context_after.push_back(sequence[static_cast<std::size_t>(i)]);
      item.description = item.kind == "inserted"
                             ? move.activity + " executed but not allowed here"
                             : move.activity + " required but not executed";
      items.push_back(std::move(item));
    }
  }

  if (query.target && *query.target != "event") {
    // Aggregate the same set at the requested level.
    std::vector<ViolationItem> aggregated;
    if (*query.target == "log") {
      ViolationItem summary;
      summary.kind = "summary";
      summary.description = std::to_string(items.size()) + " violation(s) across " +
                            std::to_string(scope->traces.size()) + " trace(s)";
      aggregated.push_back(std::move(summary));
    } else {
      std::map<std::string, std::int64_t> per_trace;
      for (const ViolationItem& item : items) ++per_trace[item.case_id];
      for (const auto& [case_id, count] : per_trace) {
        ViolationItem summary;
        summary.case_id = case_id;
        summary.kind = "summary";
        summary.description = std::to_string(count) + " violation(s)";
        aggregated.push_back(std::move(summary));
      }
    }
    return aggregated;
  }
  return items;
}

std::vector<std::pair<std::string, double>> compare_process_conformance(
    const std::vector<NamedUnit>& units, const PetriNet& net, Technique technique) {
  if (units.size() < 2) throw argument_error("comparison needs at least two units");
  std::vector<std::pair<std::string, double>> rows;
  rows.reserve(units.size());
  for (const NamedUnit& unit : units)
    rows.emplace_back(unit.name, derive_process_conformance(unit.log, net, technique).log_fitness);
  std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  return rows;
}

std::vector<std::pair<std::string, std::int64_t>> summarize_guideline_violations(const EventLog& log,
                                                                                 const PetriNet& net) {
  std::map<std::string, std::int64_t> counts;
  for (const ViolationItem& item : identify_guideline_violations(log, net))
    ++counts[item.kind + " " + item.activity];
  std::vector<std::pair<std::string, std::int64_t>> ranked(counts.begin(), counts.end());
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  return ranked;
}

DistributionBuckets conformance_distribution(const EventLog& log, const PetriNet& net,
                                             std::size_t bins) {
  if (bins < 1) throw argument_error("need at least one bin");
  ConformanceReport report = derive_process_conformance(log, net, Technique::alignment);
  DistributionBuckets buckets;
  buckets.edges.resize(bins + 1);
  for (std::size_t i = 0; i <= bins; ++i)
    buckets.edges[i] = static_cast<double>(i) / static_cast<double>(bins);
  buckets.counts.assign(bins, 0);
  for (const auto& [case_id, fitness] : report.per_trace) {
    std::size_t bin = bins - 1;  // top bin is right-closed
    for (std::size_t i = 0; i + 1 < bins; ++i) {
      if (fitness < buckets.edges[i + 1]) {
        bin = i;
        break;
      }
    }
    ++buckets.counts[bin];
  }
  return buckets;
}

std::vector<TimeWindowPoint> conformance_over_time(const EventLog& log, const PetriNet& net,
                                                   CalendarUnit unit) {
  for (const Trace& trace : log.traces)
    if (trace.events.empty()) throw argument_error("every trace needs at least one timestamp");
  if (log.traces.empty()) return {};

  auto window_of = [unit](Timestamp ts) {
    switch (unit) {
      case CalendarUnit::day: return floor_to_day(ts);
      case CalendarUnit::week: return floor_to_week(ts);
      case CalendarUnit::month: return floor_to_month(ts);
    }
    return floor_to_day(ts);
  };
  auto next_window = [unit](Timestamp start) {
    Timestamp probe{start.millis + 86'400'000};
    switch (unit) {
      case CalendarUnit::day: return probe;
      case CalendarUnit::week: return Timestamp{start.millis + 7 * 86'400'000};
      case CalendarUnit::month: {
        std::int64_t days = start.millis / 86'400'000;
        CivilDate date = civil_from_days(days);
        int year = date.year + (date.month == 12 ? 1 : 0);
        unsigned month = date.month == 12 ? 1 : date.month + 1;
        return Timestamp{days_from_civil(year, month, 1) * 86'400'000};
      }
    }
    return probe;
  };

  std::map<std::int64_t, EventLog> windows;
  for (const Trace& trace : log.traces) {
    EventLog& bucket = windows[window_of(trace.events.front().timestamp).millis];
    bucket.attribute_schema = log.attribute_schema;
    bucket.traces.push_back(trace);
  }

  std::vector<TimeWindowPoint> series;
  Timestamp cursor{windows.begin()->first};
  Timestamp last{windows.rbegin()->first};
  while (cursor.millis <= last.millis) {
    TimeWindowPoint point;
    point.window_start = cursor;
    auto found = windows.find(cursor.millis);
    if (found != windows.end()) {
      const EventLog& bucket = found->second;
      point.trace_count = static_cast<std::int64_t>(bucket.traces.size());
      auto alignments = align_per_trace(bucket, net);
      for (const Trace& trace : bucket.traces)
        if (!alignment_clean(alignments.at(trace.case_id))) ++point.non_conformant;
      point.fitness = align_log(net, bucket).log_fitness;
    }
    series.push_back(point);
    cursor = next_window(cursor);
  }
  return series;
}

std::map<std::string, double> conformance_per_rule(const EventLog& log, const RuleSet& rules) {
  if (rules.rules.empty()) throw argument_error("rule rates need a non-empty rule set");
  if (log.traces.empty()) throw argument_error("rule rates need a non-empty log");
  std::map<std::size_t, std::int64_t> violated_traces;
  for (const Trace& trace : log.traces) {
    std::set<std::size_t> violated;
    for (const Violation& violation : check_trace(trace, rules)) violated.insert(violation.rule_index);
    for (std::size_t index : violated) ++violated_traces[index];
  }
  std::map<std::string, double> rates;
  for (std::size_t index = 0; index < rules.rules.size(); ++index) {
    std::int64_t violated = violated_traces.count(index) ? violated_traces[index] : 0;
    rates[rules.rules[index].describe()] =
        1.0 - static_cast<double>(violated) / static_cast<double>(log.traces.size());
  }
  return rates;
}

std::vector<ViolationPattern> violation_patterns(const EventLog& log, const PetriNet& net,
                                                 std::int64_t min_support) {
  if (min_support <= 0 || min_support > static_cast<std::int64_t>(log.traces.size()))
    throw argument_error("min_support must lie in [1, trace count]");

  // Per-trace violation-type sets.
  std::vector<std::set<std::string>> transactions;
  transactions.reserve(log.traces.size());
  auto alignments = align_per_trace(log, net);
  for (const Trace& trace : log.traces) {
    std::set<std::string> types;
    for (const Move& move : alignments.at(trace.case_id).moves) {
      if (move.kind == Move::Kind::log) types.insert("inserted " + move.activity);
      else if (move.kind == Move::Kind::model && !move.silent_transition)
        types.insert("missing " + move.activity);
    }
    transactions.push_back(std::move(types));
  }

  auto support_of = [&](const std::vector<std::string>& itemset) {
    std::int64_t support = 0;
    for (const auto& transaction : transactions) {
      bool contained = true;
      for (const std::string& item : itemset)
        if (!transaction.count(item)) {
          contained = false;
          break;
        }
      if (contained) ++support;
    }
    return support;
  };

  // Apriori: frequent k-itemsets seed the k+1 candidates.
  std::vector<ViolationPattern> out;
  std::set<std::string> items;
  for (const auto& transaction : transactions) items.insert(transaction.begin(), transaction.end());

  std::vector<std::vector<std::string>> frontier;
  for (const std::string& item : items) {
    std::vector<std::string> candidate{item};
    std::int64_t support = support_of(candidate);
    if (support >= min_support) {
      frontier.push_back(candidate);
      out.push_back({candidate, support});
    }
  }
  while (!frontier.empty()) {
    std::set<std::vector<std::string>> candidates;
    for (const auto& base : frontier) {
      for (const std::string& item : items) {
        if (item <= base.back()) continue;  // keep itemsets sorted, generate each once
        std::vector<std::string> candidate = base;
        candidate.push_back(item);
        candidates.insert(std::move(candidate));
      }
    }
    frontier.clear();
    for (const auto& candidate : candidates) {
      std::int64_t support = support_of(candidate);
      if (support >= min_support) {
        frontier.push_back(candidate);
        out.push_back({candidate, support});
      }
    }
  }
  std::sort(out.begin(), out.end(), [](const ViolationPattern& a, const ViolationPattern& b) {
    if (a.types.size() != b.types.size()) return a.types.size() < b.types.size();
    return a.types < b.types;
  });
  return out;
}

namespace {

// Trace-level attribute: the first event carrying it decides the value.
std::optional<AttributeValue> trace_attribute(const Trace& trace, const std::string& name) {
  for (const Event& event : trace.events) {
    auto it = event.attributes.find(name);
    if (it != event.attributes.end()) return it->second;
  }
  return std::nullopt;
}

struct Sample {
  bool conformant = false;
  std::map<std::string, AttributeValue> attributes;
};

double gini(std::int64_t conformant, std::int64_t non_conformant) {
  std::int64_t total = conformant + non_conformant;
  if (total == 0) return 0.0;
  double pc = static_cast<double>(conformant) / static_cast<double>(total);
  double pn = static_cast<double>(non_conformant) / static_cast<double>(total);
  return 1.0 - pc * pc - pn * pn;
}

struct SplitChoice {
  double weighted_impurity = 0;
  std::string attribute;
  bool numeric = false;
  double threshold = 0;
  std::string category;
};

std::unique_ptr<ReasonNode> make_leaf(const std::vector<const Sample*>& samples) {
  auto leaf = std::make_unique<ReasonNode>();
  for (const Sample* sample : samples)
    sample->conformant ? ++leaf->conformant : ++leaf->non_conformant;
  return leaf;
}

bool sample_passes(const Sample& sample, const SplitChoice& split) {
  auto it = sample.attributes.find(split.attribute);
  if (it == sample.attributes.end()) return false;
  const AttributeValue& value = it->second;
  if (split.numeric) {
    if (value.index() == 1) return static_cast<double>(std::get<std::int64_t>(value)) <= split.threshold;
    if (value.index() == 2) return std::get<double>(value) <= split.threshold;
    return false;
  }
  return attr_to_string(value) == split.category;
}

std::unique_ptr<ReasonNode> grow(const std::vector<const Sample*>& samples,
                                 const std::vector<std::string>& attributes,
                                 const ReasonTreeConfig& config, std::size_t depth) {
  std::int64_t conformant = 0, non_conformant = 0;
  for (const Sample* sample : samples) sample->conformant ? ++conformant : ++non_conformant;
  double parent_impurity = gini(conformant, non_conformant);

  if (depth >= config.max_depth || parent_impurity == 0.0 || samples.size() < 2 * config.min_leaf)
    return make_leaf(samples);

  std::optional<SplitChoice> best;
  auto consider = [&](const SplitChoice& split) {
    std::int64_t pc = 0, pn = 0, fc = 0, fn = 0;
    for (const Sample* sample : samples) {
      bool pass = sample_passes(*sample, split);
      if (pass)
        sample->conformant ? ++pc : ++pn;
      else
        sample->conformant ? ++fc : ++fn;
    }
    std::int64_t pass_total = pc + pn, fail_total = fc + fn;
    if (pass_total < static_cast<std::int64_t>(config.min_leaf) ||
        fail_total < static_cast<std::int64_t>(config.min_leaf))
      return;
    double weighted = (static_cast<double>(pass_total) * gini(pc, pn) +
                       static_cast<double>(fail_total) * gini(fc, fn)) /
                      static_cast<double>(samples.size());
    if (weighted >= parent_impurity) return;  // splits must strictly reduce impurity
    SplitChoice candidate = split;
    candidate.weighted_impurity = weighted;
    if (!best || weighted < best->weighted_impurity ||
        (weighted == best->weighted_impurity &&
         std::tie(candidate.attribute, candidate.threshold, candidate.category) <
             std::tie(best->attribute, best->threshold, best->category)))
      best = candidate;
  };

  for (const std::string& attribute : attributes) {
    std::set<double> numeric_values;
    std::set<std::string> categories;
    for (const Sample* sample : samples) {
      auto it = sample->attributes.find(attribute);
      if (it == sample->attributes.end()) continue;
      const AttributeValue& value = it->second;
      if (value.index() == 1)
        numeric_values.insert(static_cast<double>(std::get<std::int64_t>(value)));
      else if (value.index() == 2)
        numeric_values.insert(std::get<double>(value));
      else
        categories.insert(attr_to_string(value));
    }
    if (numeric_values.size() >= 2) {
      // Candidate thresholds between consecutive distinct values.
      auto it = numeric_values.begin();
      double previous = *it;
      for (++it; it != numeric_values.end(); ++it) {
        double threshold = (previous + *it) / 2.0;
        consider(SplitChoice{0, attribute, true, threshold, {}});
        previous = *it;
      }
    }
    for (const std::string& category : categories)
      consider(SplitChoice{0, attribute, false, 0, category});
  }

  if (!best) return make_leaf(samples);

  std::vector<const Sample*> pass_samples, fail_samples;
  for (const Sample* sample : samples)
    (sample_passes(*sample, *best) ? pass_samples : fail_samples).push_back(sample);

  auto node = std::make_unique<ReasonNode>();
  node->attribute = best->attribute;
  node->numeric_split = best->numeric;
  node->threshold = best->threshold;
  node->category = best->category;
  node->pass = grow(pass_samples, attributes, config, depth + 1);
  node->fail = grow(fail_samples, attributes, config, depth + 1);
  return node;
}

}  // namespace

std::int64_t ReasonNode::samples() const {
  if (is_leaf()) return conformant + non_conformant;
  return pass->samples() + fail->samples();
}

ReasonTree discover_reasons(const EventLog& log, const PetriNet& net,
                            const std::vector<std::string>& attributes,
                            const ReasonTreeConfig& config) {
  if (log.traces.size() < 2) throw argument_error("reason discovery needs at least two traces");
  for (const std::string& attribute : attributes)
    if (!log.attribute_schema.count(attribute))
      throw schema_error("undeclared attribute: " + attribute);

  auto alignments = align_per_trace(log, net);
  std::vector<Sample> samples;
  samples.reserve(log.traces.size());
  for (const Trace& trace : log.traces) {
    Sample sample;
    sample.conformant = alignment_clean(alignments.at(trace.case_id));
    for (const std::string& attribute : attributes)
      if (auto value = trace_attribute(trace, attribute)) sample.attributes[attribute] = *value;
    samples.push_back(std::move(sample));
  }

  std::vector<const Sample*> pointers;
  pointers.reserve(samples.size());
  for (const Sample& sample : samples) pointers.push_back(&sample);

  ReasonTree tree;
  tree.training_size = samples.size();
  tree.root = grow(pointers, attributes, config, 0);
  return tree;
}

OutcomeImpact impact_on_outcome(const EventLog& log, const PetriNet& net,
                                const std::string& outcome_attribute) {
  auto schema = log.attribute_schema.find(outcome_attribute);
  if (schema == log.attribute_schema.end())
    throw schema_error("undeclared attribute: " + outcome_attribute);
  if (schema->second != AttrType::integer && schema->second != AttrType::real &&
      schema->second != AttrType::boolean)
    throw schema_error("outcome attribute must be numeric or boolean: " + outcome_attribute);

  OutcomeImpact impact;
  impact.boolean_outcome = schema->second == AttrType::boolean;

  auto alignments = align_per_trace(log, net);
  double conformant_sum = 0, non_conformant_sum = 0;
  for (const Trace& trace : log.traces) {
    auto value = trace_attribute(trace, outcome_attribute);
    if (!value) continue;
    double v;
    if (value->index() == 3)
      v = std::get<bool>(*value) ? 1.0 : 0.0;
    else if (value->index() == 1)
      v = static_cast<double>(std::get<std::int64_t>(*value));
    else
      v = std::get<double>(*value);
    if (alignment_clean(alignments.at(trace.case_id))) {
      ++impact.conformant_count;
      conformant_sum += v;
    } else {
      ++impact.non_conformant_count;
      non_conformant_sum += v;
    }
  }
  if (impact.conformant_count > 0)
    impact.conformant_mean = conformant_sum / static_cast<double>(impact.conformant_count);
  if (impact.non_conformant_count > 0)
    impact.non_conformant_mean = non_conformant_sum / static_cast<double>(impact.non_conformant_count);
  if (impact.conformant_mean && impact.non_conformant_mean)
    impact.difference = *impact.conformant_mean - *impact.non_conformant_mean;
  return impact;
}

}  // namespace confokit
