#include "confokit/cli.hpp"

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "confokit/errors.hpp"
#include "confokit/reporting.hpp"

namespace confokit {

namespace {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw argument_error("cannot open file: " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

std::string now_iso8601() {
  auto now = std::chrono::system_clock::now();
  auto millis = std::chrono::duration_cast<std::chrono::milliseconds>(now.time_since_epoch()).count();
  return format_iso8601(Timestamp{millis});
}

struct CommonOptions {
  std::string log_path;
  std::string model_path;
  std::string out_path;
  std::string case_column = "case";
  std::string activity_column = "activity";
  std::string timestamp_column = "timestamp";
  std::string timestamp_format;
  bool reproducible = false;
};

EventLog load_log(const CommonOptions& options) {
  CsvMapping mapping{options.case_column, options.activity_column, options.timestamp_column,
                     options.timestamp_format};
  std::filesystem::path path = options.log_path;
  if (path.extension() == ".xes") return parse_xes_file(path);
  return parse_csv_file(path, mapping);
}

std::size_t alignment_state_budget() {
  if (const char* env = std::getenv("CONFOKIT_STATE_BUDGET")) {
    char* end = nullptr;
    unsigned long long value = std::strtoull(env, &end, 10);
    if (end && *end == '\0' && value > 0) return static_cast<std::size_t>(value);
    throw argument_error("CONFOKIT_STATE_BUDGET must be a positive integer");
  }
  return 1'000'000;
}

void deliver(const CommonOptions& options, const std::string& content, std::ostream& out) {
  if (options.out_path.empty()) {
    out << content;
    return;
  }
  write_file_atomic(options.out_path, content);
}

ReportDocument make_document(const CommonOptions& options) {
  ReportDocument document;
  document.generated_at = options.reproducible ? std::string{} : now_iso8601();
  if (!options.log_path.empty())
    document.inputs.push_back({"log", options.log_path, content_digest(read_file(options.log_path))});
  if (!options.model_path.empty())
    document.inputs.push_back(
        {"model", options.model_path, content_digest(read_file(options.model_path))});
  return document;
}

void add_common_flags(CLI::App* cmd, CommonOptions& options, bool with_log = true,
                      bool with_model = true) {
  if (with_log) cmd->add_option("--log", options.log_path, "event log (.csv or .xes)")->required();
  if (with_model) cmd->add_option("--model", options.model_path, "process model (.json)")->required();
  cmd->add_option("--out", options.out_path, "output file (stdout when omitted)");
  cmd->add_option("--case-column", options.case_column, "CSV case id column");
  cmd->add_option("--activity-column", options.activity_column, "CSV activity column");
  cmd->add_option("--timestamp-column", options.timestamp_column, "CSV timestamp column");
  cmd->add_option("--timestamp-format", options.timestamp_format,
                  "fallback timestamp pattern (e.g. \"%d.%m.%y %H:%M\")");
  cmd->add_flag("--reproducible", options.reproducible, "zero the report timestamp");
}

struct CheckQuery {
  std::string activity;
  std::string target;
};

int run_check(const CommonOptions& options, const std::string& task, const std::string& technique,
              const std::string& format, std::size_t bins, const std::string& window,
              std::int64_t min_support, const std::vector<std::string>& attributes,
              const std::string& outcome, const std::vector<std::string>& extra_logs,
              const CheckQuery& query, std::ostream& out) {
  if (format != "json" && format != "svg" && format != "dot")
    throw argument_error("format must be json, svg or dot");
  EventLog log = load_log(options);
  PetriNet net = parse_model_file(options.model_path);

  ReportDocument document = make_document(options);
  std::string rendered;  // non-empty when the task produced svg/dot directly

  if (format == "dot") {
    // Violations mapped onto the model: red transitions with counts.
    if (task != "identify_guideline_violations" && task != "summarize_guideline_violations")
      throw argument_error("dot output is available for the violation tasks only");
    std::map<std::string, std::int64_t> counts;
    for (const auto& [type, count] : summarize_guideline_violations(log, net)) {
      std::size_t space = type.find(' ');
      counts[type.substr(space + 1)] += count;
    }
    deliver(options, annotate_model_dot(net, counts), out);
    return 0;
  }

  if (task == "derive_process_conformance") {
    document.sections[task] =
        conformance_section(derive_process_conformance(log, net, technique_from_string(technique)));
  } else if (task == "summarize_process_conformance") {
    nlohmann::ordered_json section;
    section["conformant_trace_fraction"] = round6(summarize_process_conformance(log, net));
    document.sections[task] = std::move(section);
  } else if (task == "present_guideline_violations") {
    auto rows = present_guideline_violations(log, net);
    if (format == "svg")
      rendered = render_chevron_svg(rows);
    else
      document.sections[task] = chevron_section(rows);
  } else if (task == "identify_guideline_violations") {
    ViolationQuery violation_query;
    if (!query.activity.empty()) violation_query.activity = query.activity;
    if (!query.target.empty()) violation_query.target = query.target;
    document.sections[task] = violation_items_section(identify_guideline_violations(log, net, violation_query));
  } else if (task == "compare_process_conformance") {
    std::vector<NamedUnit> units;
    units.push_back({std::filesystem::path(options.log_path).stem().string(), log});
    for (const std::string& path : extra_logs) {
      CommonOptions side = options;
      side.log_path = path;
      units.push_back({std::filesystem::path(path).stem().string(), load_log(side)});
    }
    document.sections[task] =
        comparison_section(compare_process_conformance(units, net, technique_from_string(technique)));
  } else if (task == "summarize_guideline_violations") {
    document.sections[task] = violation_summary_section(summarize_guideline_violations(log, net));
  } else if (task == "conformance_distribution") {
    DistributionBuckets buckets = conformance_distribution(log, net, bins);
    if (format == "svg")
      rendered = render_histogram_svg(buckets);
    else
      document.sections[task] = distribution_section(buckets);
  } else if (task == "conformance_over_time") {
    CalendarUnit unit = CalendarUnit::day;
    if (window == "week") unit = CalendarUnit::week;
    else if (window == "month") unit = CalendarUnit::month;
    else if (window != "day") throw argument_error("window must be day, week or month");
    document.sections[task] = over_time_section(conformance_over_time(log, net, unit));
  } else if (task == "conformance_per_rule") {
    document.sections[task] = per_rule_section(conformance_per_rule(log, derive_rules(net)));
  } else if (task == "violation_patterns") {
    document.sections[task] = patterns_section(violation_patterns(log, net, min_support));
  } else if (task == "discover_reasons") {
    document.sections[task] = reason_tree_section(discover_reasons(log, net, attributes));
  } else if (task == "impact_on_outcome") {
    if (outcome.empty()) throw argument_error("impact_on_outcome needs --outcome");
    document.sections[task] = outcome_section(impact_on_outcome(log, net, outcome));
  } else {
    throw argument_error("unknown task: " + task);
  }

  deliver(options, rendered.empty() ? emit_report(document) : rendered, out);
  return 0;
}

}  // namespace

int cli_dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"conformance checking toolkit"};
  app.require_subcommand(1);

  // check
  CommonOptions check_options;
  std::string task, technique = "alignment", format = "json", window = "day", outcome;
  std::size_t bins = 4;
  std::int64_t min_support = 1;
  std::vector<std::string> attributes, extra_logs;
  CheckQuery check_query;
  CLI::App* check = app.add_subcommand("check", "run one analysis task");
  add_common_flags(check, check_options);
  check->add_option("--task", task, "analysis task name")->required();
  check->add_option("--technique", technique, "rules | replay | alignment");
  check->add_option("--format", format, "json | svg | dot");
  check->add_option("--bins", bins, "histogram bins");
  check->add_option("--window", window, "day | week | month");
  check->add_option("--min-support", min_support, "violation pattern support");
  check->add_option("--attributes", attributes, "trace attributes for reason discovery")->delimiter(',');
  check->add_option("--outcome", outcome, "outcome attribute");
  check->add_option("--compare-log", extra_logs, "additional logs for comparison");
  check->add_option("--activity", check_query.activity, "violation filter: activity");
  check->add_option("--target", check_query.target, "violation filter: log | trace | event");

  // rules derive/check
  CommonOptions rules_options;
  std::string rules_path;
  CLI::App* rules = app.add_subcommand("rules", "rule derivation and checking");
  rules->require_subcommand(1);
  CLI::App* rules_derive = rules->add_subcommand("derive", "derive rules from a model");
  add_common_flags(rules_derive, rules_options, /*with_log=*/false);
  CLI::App* rules_check = rules->add_subcommand("check", "check a log against rules");
  add_common_flags(rules_check, rules_options);
  rules_check->add_option("--rules", rules_path, "rule set JSON (derived from the model when omitted)");

  // replay
  CommonOptions replay_options;
  CLI::App* replay = app.add_subcommand("replay", "token replay of a log");
  add_common_flags(replay, replay_options);

  // align
  CommonOptions align_options;
  CLI::App* align = app.add_subcommand("align", "optimal alignments of a log");
  add_common_flags(align, align_options);

  // taxonomy validate/stats/sankey
  std::string catalog_path, sankey_order = "goal,means,characteristic,constraint_type,target,cardinality";
  CommonOptions taxonomy_options;
  CLI::App* taxonomy = app.add_subcommand("taxonomy", "task catalog analytics");
  taxonomy->require_subcommand(1);
  CLI::App* taxonomy_validate = taxonomy->add_subcommand("validate", "validate catalog descriptors");
  taxonomy_validate->add_option("--catalog", catalog_path, "catalog CSV")->required();
  taxonomy_validate->add_option("--out", taxonomy_options.out_path, "output file");
  taxonomy_validate->add_flag("--reproducible", taxonomy_options.reproducible, "zero the report timestamp");
  CLI::App* taxonomy_stats = taxonomy->add_subcommand("stats", "per-dimension marginal counts");
  taxonomy_stats->add_option("--catalog", catalog_path, "catalog CSV")->required();
  taxonomy_stats->add_option("--out", taxonomy_options.out_path, "output file");
  taxonomy_stats->add_flag("--reproducible", taxonomy_options.reproducible, "zero the report timestamp");
  CLI::App* taxonomy_sankey = taxonomy->add_subcommand("sankey", "adjacent-dimension link weights");
  taxonomy_sankey->add_option("--catalog", catalog_path, "catalog CSV")->required();
  taxonomy_sankey->add_option("--order", sankey_order, "comma-separated dimension order");
  taxonomy_sankey->add_option("--out", taxonomy_options.out_path, "output file");
  taxonomy_sankey->add_flag("--reproducible", taxonomy_options.reproducible, "zero the report timestamp");

  // depmine
  std::string sessions_path, notion = "goal", depmine_format = "dot";
  double threshold = 0.0;
  CommonOptions depmine_options;
  CLI::App* depmine = app.add_subcommand("depmine", "mine task dependencies from sessions");
  depmine->add_option("--sessions", sessions_path, "sessions CSV")->required();
  depmine->add_option("--notion", notion, "goal | goal-target");
  depmine->add_option("--threshold", threshold, "path filter threshold in [0,1]");
  depmine->add_option("--format", depmine_format, "dot | json");
  depmine->add_option("--out", depmine_options.out_path, "output file");
  depmine->add_flag("--reproducible", depmine_options.reproducible, "zero the report timestamp");

  // render
  CommonOptions render_options;
  std::string render_what, render_palette;
  std::size_t render_bins = 4;
  std::string render_sessions, render_notion = "goal";
  double render_threshold = 0.0;
  CLI::App* render = app.add_subcommand("render", "emit SVG/DOT artifacts");
  render->add_option("what", render_what, "chevron | histogram | model | dfg")->required();
  render->add_option("--log", render_options.log_path, "event log");
  render->add_option("--model", render_options.model_path, "process model");
  render->add_option("--sessions", render_sessions, "sessions CSV (dfg)");
  render->add_option("--notion", render_notion, "goal | goal-target (dfg)");
  render->add_option("--threshold", render_threshold, "path threshold (dfg)");
  render->add_option("--bins", render_bins, "histogram bins");
  render->add_option("--palette", render_palette, "conforming,missing,wrong colors");
  render->add_option("--out", render_options.out_path, "output file");
  render->add_option("--case-column", render_options.case_column, "CSV case id column");
  render->add_option("--activity-column", render_options.activity_column, "CSV activity column");
  render->add_option("--timestamp-column", render_options.timestamp_column, "CSV timestamp column");
  render->add_option("--timestamp-format", render_options.timestamp_format, "fallback timestamp pattern");

  std::vector<std::string> argv = args;
  try {
    std::vector<const char*> raw;
    raw.push_back("confokit");
    for (const std::string& a : argv) raw.push_back(a.c_str());
    app.parse(static_cast<int>(raw.size()), raw.data());
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n" << app.help();
    return 1;
  }

  try {
    if (check->parsed()) {
      return run_check(check_options, task, technique, format, bins, window, min_support, attributes,
                       outcome, extra_logs, check_query, out);
    }

    if (rules_derive->parsed()) {
      PetriNet net = parse_model_file(rules_options.model_path);
      deliver(rules_options, rules_to_json(derive_rules(net)), out);
      return 0;
    }
    if (rules_check->parsed()) {
      EventLog log = load_log(rules_options);
      PetriNet net = parse_model_file(rules_options.model_path);
      RuleSet set = rules_path.empty() ? derive_rules(net) : rules_from_json(read_file(rules_path));
      RuleFitness fitness = rule_fitness(log, set);
      ReportDocument document = make_document(rules_options);
      nlohmann::ordered_json section;
      section["log_fitness"] = round6(fitness.log_fitness);
      nlohmann::ordered_json per_trace;
      for (const auto& [case_id, value] : fitness.per_trace) per_trace[case_id] = round6(value);
      section["per_trace"] = std::move(per_trace);
      nlohmann::ordered_json violations = nlohmann::ordered_json::array();
      for (const Trace& trace : log.traces) {
        for (const Violation& violation : check_trace(trace, set)) {
          nlohmann::ordered_json item;
          item["case"] = violation.case_id;
          item["rule"] = violation.rule_text;
          item["evidence"] = violation.evidence;
          item["description"] = violation.description;
          violations.push_back(std::move(item));
        }
      }
      section["violations"] = std::move(violations);
      document.sections["rule_fitness"] = std::move(section);
      deliver(rules_options, emit_report(document), out);
      return 0;
    }

    if (replay->parsed()) {
      EventLog log = load_log(replay_options);
      PetriNet net = parse_model_file(replay_options.model_path);
      LogReplay result = replay_log(net, log);
      ReportDocument document = make_document(replay_options);
      nlohmann::ordered_json section;
      section["log_fitness"] = round6(result.log_fitness);
      nlohmann::ordered_json per_trace;
      for (const auto& [case_id, replay_result] : result.per_trace) {
        nlohmann::ordered_json item;
        item["produced"] = replay_result.produced;
        item["consumed"] = replay_result.consumed;
        item["missing"] = replay_result.missing;
        item["remaining"] = replay_result.remaining;
        item["fitness"] = round6(replay_fitness(replay_result));
        item["reached_final"] = replay_result.reached_final;
        per_trace[case_id] = std::move(item);
      }
      section["per_trace"] = std::move(per_trace);
      document.sections["replay_log"] = std::move(section);
      deliver(replay_options, emit_report(document), out);
      return 0;
    }

    if (align->parsed()) {
      EventLog log = load_log(align_options);
      PetriNet net = parse_model_file(align_options.model_path);
      std::size_t budget = alignment_state_budget();
      ReportDocument document = make_document(align_options);
      nlohmann::ordered_json section;
      double weighted = 0;
      std::size_t total = 0;
      nlohmann::ordered_json per_variant = nlohmann::ordered_json::array();
      for (const Variant& variant : variants(log)) {
        Trace representative;
        representative.case_id = variant.member_cases.front();
        for (const std::string& activity : variant.sequence)
          representative.events.push_back(Event{representative.case_id, activity, {}, {}});
        Alignment alignment = align_trace(net, representative, {}, budget);
        double fitness = alignment_fitness(alignment, worst_case_cost(net, representative));
        weighted += fitness * static_cast<double>(variant.frequency);
        total += variant.frequency;
        nlohmann::ordered_json item;
        item["variant"] = variant.sequence;
        item["frequency"] = variant.frequency;
        item["cases"] = variant.member_cases;
        item["cost"] = alignment.cost;
        item["fitness"] = round6(fitness);
        nlohmann::ordered_json moves = nlohmann::ordered_json::array();
        for (const Move& move : alignment.moves) {
          nlohmann::ordered_json m;
          m["kind"] = move.kind == Move::Kind::synchronous
                          ? "synchronous"
                          : (move.kind == Move::Kind::model ? "model" : "log");
          m["label"] = move.kind == Move::Kind::log ? move.activity
                                                    : (move.silent_transition ? move.transition : move.activity);
          if (move.silent_transition) m["silent"] = true;
          moves.push_back(std::move(m));
        }
        item["moves"] = std::move(moves);
        per_variant.push_back(std::move(item));
      }
      section["log_fitness"] = round6(weighted / static_cast<double>(total));
      section["per_variant"] = std::move(per_variant);
      document.sections["align_log"] = std::move(section);
      deliver(align_options, emit_report(document), out);
      return 0;
    }

    if (taxonomy_validate->parsed() || taxonomy_stats->parsed() || taxonomy_sankey->parsed()) {
      TaskCatalog catalog = load_catalog_file(catalog_path);
      ReportDocument document;
      document.generated_at = taxonomy_options.reproducible ? std::string{} : now_iso8601();
      document.inputs.push_back({"catalog", catalog_path, content_digest(read_file(catalog_path))});
      if (taxonomy_validate->parsed()) {
        nlohmann::ordered_json section = nlohmann::ordered_json::array();
        bool all_valid = true;
        for (std::size_t i = 0; i < catalog.entries.size(); ++i) {
          auto violations =
              validate_descriptor(catalog.entries[i].descriptor, catalog.extra_characteristics);
          if (violations.empty()) continue;
          all_valid = false;
          nlohmann::ordered_json item;
          item["entry"] = i;
          item["violations"] = violations;
          section.push_back(std::move(item));
        }
        document.sections["validate_descriptor"] = std::move(section);
        deliver(taxonomy_options, emit_report(document), out);
        return all_valid ? 0 : 1;
      }
      if (taxonomy_stats->parsed()) {
        document.sections["catalog_stats"] = marginals_section(catalog_stats(catalog));
        deliver(taxonomy_options, emit_report(document), out);
        return 0;
      }
      std::vector<Dimension> order;
      std::stringstream names(sankey_order);
      std::string name;
      while (std::getline(names, name, ',')) {
        if (name == "goal") order.push_back(Dimension::goal);
        else if (name == "means") order.push_back(Dimension::means);
        else if (name == "characteristic") order.push_back(Dimension::characteristic);
        else if (name == "constraint_type") order.push_back(Dimension::constraint_type);
        else if (name == "target") order.push_back(Dimension::target);
        else if (name == "cardinality") order.push_back(Dimension::cardinality);
        else throw argument_error("unknown dimension: " + name);
      }
      document.sections["sankey_links"] = sankey_section(sankey_links(catalog, order));
      deliver(taxonomy_options, emit_report(document), out);
      return 0;
    }

    if (depmine->parsed()) {
      std::vector<AnalysisSession> sessions = load_sessions_file(sessions_path);
      ActivityNotion activity_notion;
      if (notion == "goal") activity_notion = ActivityNotion::goal;
      else if (notion == "goal-target") activity_notion = ActivityNotion::goal_and_target;
      else throw argument_error("notion must be goal or goal-target");
      DfgModel model = discover_dfg(build_session_log(sessions, activity_notion), threshold);
      if (depmine_format == "dot") {
        deliver(depmine_options, dfg_to_dot(model), out);
      } else if (depmine_format == "json") {
        ReportDocument document;
        document.generated_at = depmine_options.reproducible ? std::string{} : now_iso8601();
        document.inputs.push_back({"sessions", sessions_path, content_digest(read_file(sessions_path))});
        document.sections["discover_dfg"] = dfg_section(model);
        deliver(depmine_options, emit_report(document), out);
      } else {
        throw argument_error("format must be dot or json");
      }
      return 0;
    }

    if (render->parsed()) {
      if (render_what == "chevron") {
        if (render_options.log_path.empty() || render_options.model_path.empty())
          throw argument_error("render chevron needs --log and --model");
        EventLog log = load_log(render_options);
        PetriNet net = parse_model_file(render_options.model_path);
        ChevronPalette palette;
        if (!render_palette.empty()) {
          std::stringstream colors(render_palette);
          std::getline(colors, palette.conforming, ',');
          std::getline(colors, palette.missing, ',');
          std::getline(colors, palette.wrong, ',');
        }
        deliver(render_options, render_chevron_svg(present_guideline_violations(log, net), palette), out);
        return 0;
      }
      if (render_what == "histogram") {
        if (render_options.log_path.empty() || render_options.model_path.empty())
          throw argument_error("render histogram needs --log and --model");
        EventLog log = load_log(render_options);
        PetriNet net = parse_model_file(render_options.model_path);
        deliver(render_options, render_histogram_svg(conformance_distribution(log, net, render_bins)), out);
        return 0;
      }
      if (render_what == "model") {
        if (render_options.model_path.empty()) throw argument_error("render model needs --model");
        PetriNet net = parse_model_file(render_options.model_path);
        std::map<std::string, std::int64_t> counts;
        if (!render_options.log_path.empty()) {
          EventLog log = load_log(render_options);
          for (const auto& [type, count] : summarize_guideline_violations(log, net)) {
            // type is "missing X" or "inserted X"; annotate by activity.
            std::size_t space = type.find(' ');
            counts[type.substr(space + 1)] += count;
          }
        }
        deliver(render_options, annotate_model_dot(net, counts), out);
        return 0;
      }
      if (render_what == "dfg") {
        if (render_sessions.empty()) throw argument_error("render dfg needs --sessions");
        std::vector<AnalysisSession> sessions = load_sessions_file(render_sessions);
        ActivityNotion activity_notion =
            render_notion == "goal-target" ? ActivityNotion::goal_and_target : ActivityNotion::goal;
        DfgModel model = discover_dfg(build_session_log(sessions, activity_notion), render_threshold);
        deliver(render_options, dfg_to_dot(model), out);
        return 0;
      }
      throw argument_error("unknown render target: " + render_what);
    }

    err << "no subcommand given\n" << app.help();
    return 1;
  } catch (const resource_error& e) {
    err << "resource error: " << e.what() << "\n";
    return 2;
  } catch (const error& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace confokit
