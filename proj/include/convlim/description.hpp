#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "convlim/convsys.hpp"
#include "convlim/projective.hpp"
#include "convlim/rational.hpp"

namespace convlim {

/// A schema violation, located by a dotted JSON path such as
/// "measures.per_interval[2].weights".
class ParseError : public std::runtime_error {
 public:
  ParseError(std::string path, const std::string& message)
      : std::runtime_error(path + ": " + message), path_(std::move(path)) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

enum class DescriptionMode { explicit_tables, semigroup };
enum class MeasureKind { idempotent, generator, per_interval };

struct ExplicitSpace {
  std::string from;
  std::string to;
  std::vector<std::string> outcomes;
  std::vector<Rational> weights;
  bool operator==(const ExplicitSpace&) const = default;
};

struct ExplicitMult {
  std::string r;
  std::string s;
  std::string t;
  std::vector<std::vector<std::string>> table;  ///< [x in Ω_{r,s}][y in Ω_{s,t}] -> label in Ω_{r,t}
  bool operator==(const ExplicitMult&) const = default;
};

struct IntervalMeasure {
  std::string from;
  std::string to;
  std::vector<Rational> weights;  ///< dense over the semigroup's elements
  bool operator==(const IntervalMeasure&) const = default;
};

struct TowerSpec {
  std::vector<std::vector<std::string>> levels;
  std::vector<CylinderEvent> events;
  bool operator==(const TowerSpec&) const = default;
};

/// A parsed description file (schema version 1).
struct SystemDescription {
  int format = 1;
  std::vector<std::string> times;
  std::optional<std::vector<long long>> positions;
  DescriptionMode mode = DescriptionMode::semigroup;

  std::vector<std::string> elements;
  std::vector<std::vector<std::string>> table;
  MeasureKind measure_kind = MeasureKind::idempotent;
  std::vector<Rational> measure;  ///< idempotent or generator, dense over elements
  std::vector<IntervalMeasure> per_interval;

  std::vector<ExplicitSpace> spaces;
  std::vector<ExplicitMult> mults;

  std::optional<TowerSpec> tower;

  bool operator==(const SystemDescription&) const = default;
};

/// Throws ParseError on any schema violation, unnormalized measure or
/// non-associative semigroup table.
SystemDescription parse_description(const nlohmann::json& doc);
SystemDescription parse_description_text(std::string_view text);
SystemDescription load_description(const std::filesystem::path& file);

nlohmann::json serialize(const SystemDescription& desc);

/// Positions used by generator measures: the explicit list, else the labels
/// themselves when all are integers, else the declaration index.
std::vector<long long> effective_positions(const std::vector<std::string>& labels,
                                           const std::optional<std::vector<long long>>& given);

/// The described system. Axioms are not checked here (see check_system);
/// throws ParseError when the data cannot form a system at all, e.g. a
/// measure declared idempotent that is not.
SystemPtr build_system(const SystemDescription& desc);

/// The tower block with every level built by the description's rule.
/// Throws ParseError when there is no tower block, the mode cannot
/// generate systems on new TimeSets, or the tower is malformed.
CylinderTower build_tower(const SystemDescription& desc);

}  // namespace convlim
