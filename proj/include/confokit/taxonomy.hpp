#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace confokit {

// One coded analysis task: six dimensions, all value sets closed. Values are
// held as text so that out-of-vocabulary descriptors can be represented and
// reported by validate_descriptor instead of failing at construction.
struct TaskDescriptor {
  std::string goal;
  std::string means;
  std::string data_characteristic;
  std::vector<std::string> constraint_type;  // non-empty subset of the four perspectives
  std::string data_target;
  std::string cardinality;

  friend bool operator==(const TaskDescriptor&, const TaskDescriptor&) = default;
};

const std::set<std::string>& goal_vocabulary();
const std::set<std::string>& means_vocabulary();           // includes the "unknown" sentinel
const std::set<std::string>& characteristic_vocabulary();  // the 14 catalog values
const std::set<std::string>& constraint_vocabulary();
const std::set<std::string>& target_vocabulary();
const std::set<std::string>& cardinality_vocabulary();

// Empty result means the descriptor is valid. Violations are data, not
// failures: one message per offending dimension.
std::vector<std::string> validate_descriptor(const TaskDescriptor& descriptor,
                                             const std::set<std::string>& extra_characteristics = {});

struct CatalogEntry {
  TaskDescriptor descriptor;
  std::int64_t count = 1;
  std::string source;
};

struct TaskCatalog {
  std::vector<CatalogEntry> entries;
  std::set<std::string> extra_characteristics;  // catalog-level vocabulary extension
};

// CSV columns: goal, means, characteristic, constraint_type (';'-joined),
// target, cardinality, count, source. Leading "#vocab: characteristic=NAME"
// comment lines extend the characteristic vocabulary for this catalog.
TaskCatalog load_catalog_csv(std::string_view text);
TaskCatalog load_catalog_file(const std::filesystem::path& path);

enum class Dimension { goal, means, characteristic, constraint_type, target, cardinality };

std::string to_string(Dimension dimension);

using Marginals = std::map<Dimension, std::map<std::string, std::int64_t>>;

// Per-dimension counts weighted by entry count; each perspective of a
// constraint subset counts once per entry.
Marginals catalog_stats(const TaskCatalog& catalog);

struct SankeyLink {
  std::size_t stage = 0;  // index of the left dimension in the given order
  std::string from;
  std::string to;
  double weight = 0;

  friend bool operator==(const SankeyLink&, const SankeyLink&) = default;
};

// Weighted links between adjacent dimensions. Constraint subsets split an
// entry's weight equally over the member perspectives.
std::vector<SankeyLink> sankey_links(const TaskCatalog& catalog, const std::vector<Dimension>& order);

// Ordered task sequence of one case study; step order is the pseudo-timestamp.
struct AnalysisSession {
  std::string session_id;
  std::vector<TaskDescriptor> steps;
};

// CSV columns: session_id, step_index, then the six descriptor columns.
std::vector<AnalysisSession> load_sessions_csv(std::string_view text);
std::vector<AnalysisSession> load_sessions_file(const std::filesystem::path& path);

}  // namespace confokit
