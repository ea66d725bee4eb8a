#include "confokit/process_model.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "confokit/errors.hpp"

namespace confokit {

PetriNet::PetriNet(std::vector<std::string> places, std::vector<TransitionDef> transitions,
                   std::vector<std::pair<std::string, std::string>> arcs, Marking initial,
                   Marking final_marking)
    : places_(std::move(places)),
      transitions_(std::move(transitions)),
      arcs_(std::move(arcs)),
      initial_(std::move(initial)),
      final_(std::move(final_marking)) {
  for (std::size_t i = 0; i < places_.size(); ++i) {
    if (!place_index_.emplace(places_[i], static_cast<int>(i)).second)
      throw validation_error("duplicate place id: " + places_[i]);
  }
  for (std::size_t i = 0; i < transitions_.size(); ++i) {
    if (place_index_.count(transitions_[i].id))
      throw validation_error("identifier used for both place and transition: " + transitions_[i].id);
    if (!transition_index_.emplace(transitions_[i].id, static_cast<int>(i)).second)
      throw validation_error("duplicate transition id: " + transitions_[i].id);
  }

  inputs_.resize(transitions_.size());
  outputs_.resize(transitions_.size());
  producers_.resize(places_.size());
  for (const auto& [from, to] : arcs_) {
    auto fp = place_index_.find(from);
    auto ft = transition_index_.find(from);
    auto tp = place_index_.find(to);
    auto tt = transition_index_.find(to);
    if (fp != place_index_.end() && tt != transition_index_.end()) {
      inputs_[static_cast<std::size_t>(tt->second)].push_back(fp->second);
    } else if (ft != transition_index_.end() && tp != place_index_.end()) {
      outputs_[static_cast<std::size_t>(ft->second)].push_back(tp->second);
      producers_[static_cast<std::size_t>(tp->second)].push_back(ft->second);
    } else if (fp == place_index_.end() && ft == transition_index_.end()) {
      throw validation_error("arc references undeclared identifier: " + from);
    } else if (tp == place_index_.end() && tt == transition_index_.end()) {
      throw validation_error("arc references undeclared identifier: " + to);
    } else {
      throw validation_error("arc must connect a place and a transition: " + from + " -> " + to);
    }
  }
  for (auto& v : inputs_) std::sort(v.begin(), v.end());
  for (auto& v : outputs_) std::sort(v.begin(), v.end());
  for (auto& v : producers_) std::sort(v.begin(), v.end());

  auto check_marking = [&](const Marking& marking, const char* which) {
    for (const auto& [place, count] : marking.tokens) {
      if (!place_index_.count(place))
        throw validation_error(std::string(which) + " marking references undeclared place: " + place);
      if (count < 0) throw validation_error(std::string(which) + " marking has negative count at " + place);
    }
  };
  check_marking(initial_, "initial");
  check_marking(final_, "final");
  if (initial_.tokens.empty()) throw validation_error("initial marking is empty");
  if (final_.tokens.empty()) throw validation_error("final marking is empty");
}

int PetriNet::place_index(const std::string& id) const {
  auto it = place_index_.find(id);
  if (it == place_index_.end()) throw validation_error("unknown place: " + id);
  return it->second;
}

int PetriNet::transition_index(const std::string& id) const {
  auto it = transition_index_.find(id);
  if (it == transition_index_.end()) throw validation_error("unknown transition: " + id);
  return it->second;
}

const std::string& PetriNet::display_name(int transition) const {
  const TransitionDef& t = transitions_[static_cast<std::size_t>(transition)];
  return t.label ? *t.label : t.id;
}

std::vector<int> PetriNet::transitions_with_label(const std::string& label) const {
  std::vector<int> out;
  for (std::size_t i = 0; i < transitions_.size(); ++i)
    if (transitions_[i].label == label) out.push_back(static_cast<int>(i));
  return out;
}

std::vector<std::int64_t> PetriNet::dense(const Marking& marking) const {
  std::vector<std::int64_t> counts(places_.size(), 0);
  for (const auto& [place, count] : marking.tokens) counts[static_cast<std::size_t>(place_index(place))] = count;
  return counts;
}

Marking PetriNet::from_dense(const std::vector<std::int64_t>& counts) const {
  Marking marking;
  for (std::size_t i = 0; i < counts.size(); ++i)
    if (counts[i] > 0) marking.tokens[places_[i]] = counts[i];
  return marking;
}

PetriNet parse_model(std::string_view json_text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw parse_error(std::string("model is not valid JSON: ") + e.what(), e.byte);
  }

  auto require = [&](const char* key) -> const nlohmann::json& {
    if (!doc.contains(key)) throw validation_error(std::string("model lacks required field: ") + key);
    return doc.at(key);
  };

  std::vector<std::string> places;
  for (const auto& p : require("places")) places.push_back(p.get<std::string>());

  std::vector<TransitionDef> transitions;
  for (const auto& t : require("transitions")) {
    TransitionDef def;
    def.id = t.at("id").get<std::string>();
    if (t.contains("label")) def.label = t.at("label").get<std::string>();
    transitions.push_back(std::move(def));
  }

  std::vector<std::pair<std::string, std::string>> arcs;
  for (const auto& a : require("arcs"))
    arcs.emplace_back(a.at("from").get<std::string>(), a.at("to").get<std::string>());

  auto read_marking = [&](const char* key) {
    Marking marking;
    for (const auto& [place, count] : require(key).items())
      marking.tokens[place] = count.get<std::int64_t>();
    return marking;
  };

  return PetriNet(std::move(places), std::move(transitions), std::move(arcs), read_marking("initial"),
                  read_marking("final"));
}

PetriNet parse_model_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw argument_error("cannot open file: " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_model(buffer.str());
}

namespace {

bool dense_enabled(const PetriNet& net, const std::vector<std::int64_t>& marking, int transition) {
  for (int place : net.inputs_of(transition))
    if (marking[static_cast<std::size_t>(place)] < 1) return false;
  return true;
}

void dense_fire(const PetriNet& net, std::vector<std::int64_t>& marking, int transition) {
  for (int place : net.inputs_of(transition)) --marking[static_cast<std::size_t>(place)];
  for (int place : net.outputs_of(transition)) ++marking[static_cast<std::size_t>(place)];
}

}  // namespace

std::set<std::string> enabled(const PetriNet& net, const Marking& marking) {
  std::vector<std::int64_t> dense = net.dense(marking);
  std::set<std::string> out;
  for (std::size_t t = 0; t < net.transition_count(); ++t)
    if (dense_enabled(net, dense, static_cast<int>(t))) out.insert(net.transitions()[t].id);
  return out;
}

Marking fire(const PetriNet& net, const Marking& marking, const std::string& transition) {
  int t = net.transition_index(transition);
  std::vector<std::int64_t> dense = net.dense(marking);
  if (!dense_enabled(net, dense, t)) {
    std::string lacking;
    for (int place : net.inputs_of(t)) {
      if (dense[static_cast<std::size_t>(place)] < 1) {
        if (!lacking.empty()) lacking += ", ";
        lacking += net.places()[static_cast<std::size_t>(place)];
      }
    }
    throw execution_error("transition " + transition + " is not enabled; lacking tokens in " + lacking);
  }
  dense_fire(net, dense, t);
  return net.from_dense(dense);
}

namespace {

struct Enumerator {
  const PetriNet& net;
  const LanguageBounds& bounds;
  std::vector<std::int64_t> final_marking;
  LanguageResult result;
  std::map<std::vector<std::int64_t>, std::size_t> visits;
  std::vector<std::string> sequence;

  void explore(std::vector<std::int64_t>& marking) {
    std::size_t& visit_count = visits[marking];
    if (visit_count >= bounds.max_marking_visits) {
      result.truncated = true;
      return;
    }
    ++visit_count;

    if (marking == final_marking) result.sequences.insert(sequence);

    for (std::size_t t = 0; t < net.transition_count(); ++t) {
      int transition = static_cast<int>(t);
      if (!dense_enabled(net, marking, transition)) continue;
      bool silent = net.is_silent(transition);
      if (!silent && sequence.size() >= bounds.max_trace_length) {
        result.truncated = true;
        continue;
      }
      dense_fire(net, marking, transition);
      if (!silent) sequence.push_back(*net.transitions()[t].label);
      explore(marking);
      if (!silent) sequence.pop_back();
      for (int place : net.outputs_of(transition)) --marking[static_cast<std::size_t>(place)];
      for (int place : net.inputs_of(transition)) ++marking[static_cast<std::size_t>(place)];
    }
    --visit_count;
  }
};

}  // namespace

LanguageResult enumerate_language(const PetriNet& net, const LanguageBounds& bounds) {
  if (bounds.max_trace_length == 0 || bounds.max_marking_visits == 0)
    throw argument_error("language bounds must be positive");
  Enumerator enumerator{net, bounds, net.dense(net.final_marking()), {}, {}, {}};
  std::vector<std::int64_t> marking = net.dense(net.initial_marking());
  enumerator.explore(marking);
  return std::move(enumerator.result);
}

}  // namespace confokit
