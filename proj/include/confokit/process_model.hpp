#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace confokit {

// Token distribution over places; only positive counts are stored.
struct Marking {
  std::map<std::string, std::int64_t> tokens;

  std::int64_t count(const std::string& place) const {
    auto it = tokens.find(place);
    return it == tokens.end() ? 0 : it->second;
  }
  friend bool operator==(const Marking&, const Marking&) = default;
};

struct TransitionDef {
  std::string id;
  std::optional<std::string> label;  // absent = silent
};

// Workflow net: unit-weight arcs, explicit initial and final markings.
// Immutable after construction; the index-based accessors back the search
// and replay engines.
class PetriNet {
 public:
  PetriNet(std::vector<std::string> places, std::vector<TransitionDef> transitions,
           std::vector<std::pair<std::string, std::string>> arcs, Marking initial, Marking final_marking);

  const std::vector<std::string>& places() const { return places_; }
  const std::vector<TransitionDef>& transitions() const { return transitions_; }
  const std::vector<std::pair<std::string, std::string>>& arcs() const { return arcs_; }
  const Marking& initial_marking() const { return initial_; }
  const Marking& final_marking() const { return final_; }

  std::size_t place_count() const { return places_.size(); }
  std::size_t transition_count() const { return transitions_.size(); }
  int place_index(const std::string& id) const;
  int transition_index(const std::string& id) const;

  const std::vector<int>& inputs_of(int transition) const { return inputs_[static_cast<std::size_t>(transition)]; }
  const std::vector<int>& outputs_of(int transition) const { return outputs_[static_cast<std::size_t>(transition)]; }
  // Transitions with an arc into the given place.
  const std::vector<int>& producers_into(int place) const { return producers_[static_cast<std::size_t>(place)]; }

  bool is_silent(int transition) const { return !transitions_[static_cast<std::size_t>(transition)].label.has_value(); }
  // Label when visible, transition id otherwise.
  const std::string& display_name(int transition) const;
  std::vector<int> transitions_with_label(const std::string& label) const;

  // Dense counterparts of Marking, indexed by place.
  std::vector<std::int64_t> dense(const Marking& marking) const;
  Marking from_dense(const std::vector<std::int64_t>& counts) const;

 private:
  std::vector<std::string> places_;
  std::vector<TransitionDef> transitions_;
  std::vector<std::pair<std::string, std::string>> arcs_;
  Marking initial_;
  Marking final_;
  std::map<std::string, int> place_index_;
  std::map<std::string, int> transition_index_;
  std::vector<std::vector<int>> inputs_;
  std::vector<std::vector<int>> outputs_;
  std::vector<std::vector<int>> producers_;
};

// JSON document: {places:[id], transitions:[{id,label?}], arcs:[{from,to}],
// initial:{place:count}, final:{place:count}}.
PetriNet parse_model(std::string_view json_text);
PetriNet parse_model_file(const std::filesystem::path& path);

// Transitions whose every input place holds at least one token.
std::set<std::string> enabled(const PetriNet& net, const Marking& marking);

// Consumes one token per input place, produces one per output place.
Marking fire(const PetriNet& net, const Marking& marking, const std::string& transition);

struct LanguageBounds {
  std::size_t max_trace_length = 50;
  std::size_t max_marking_visits = 2;
};

struct LanguageResult {
  std::set<std::vector<std::string>> sequences;  // visible projections reaching the final marking
  bool truncated = false;                        // some branch was cut by the bounds
};

LanguageResult enumerate_language(const PetriNet& net, const LanguageBounds& bounds = {});

}  // namespace confokit
