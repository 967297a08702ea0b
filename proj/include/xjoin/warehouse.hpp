#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace xjoin {

/// One descriptive attribute of a dimension node, kept as raw document text.
struct AttributeKV {
  std::string name;
  std::string value;

  friend bool operator==(const AttributeKV&, const AttributeKV&) = default;
};

struct DimensionNode {
  std::string id;
  std::vector<AttributeKV> attributes;

  friend bool operator==(const DimensionNode&, const DimensionNode&) = default;
};

struct Dimension {
  std::string name;
  std::vector<DimensionNode> nodes;

  friend bool operator==(const Dimension&, const Dimension&) = default;
};

/*
 * A measure keeps both its numeric value and the lexeme it was read from.
 * Aggregation uses `value`; serialization re-emits `lexeme` verbatim so that
 * documents round-trip byte for byte.
 */
struct Measure {
  std::string id;
  double value = 0.0;
  std::string lexeme;

  friend bool operator==(const Measure&, const Measure&) = default;
};

/// Builds a measure from a number; the lexeme is the shortest round-trip form.
Measure make_measure(std::string id, double value);

/// Parses a decimal lexeme. Returns nullopt for anything that is not a finite number.
std::optional<Measure> parse_measure(std::string id, std::string_view lexeme);

/// Shortest decimal text that parses back to exactly `value`.
std::string format_number(double value);

struct DimensionRef {
  std::string dimensionName;
  std::string nodeId;

  friend bool operator==(const DimensionRef&, const DimensionRef&) = default;
};

struct FactCell {
  std::vector<Measure> measures;
  std::vector<DimensionRef> dimensionRefs;

  friend bool operator==(const FactCell&, const FactCell&) = default;
};

struct Warehouse {
  std::vector<Dimension> dimensions;
  std::vector<FactCell> cells;

  friend bool operator==(const Warehouse&, const Warehouse&) = default;
};

/// A dimension copy embedded in an index cell: the ref plus the node's attributes.
struct IndexDimension {
  std::string dimensionName;
  std::string nodeId;
  std::vector<AttributeKV> attributes;

  friend bool operator==(const IndexDimension&, const IndexDimension&) = default;
};

struct IndexCell {
  std::vector<Measure> facts;
  std::vector<IndexDimension> dimensions;

  friend bool operator==(const IndexCell&, const IndexCell&) = default;
};

struct JoinIndex {
  std::vector<IndexCell> cells;

  friend bool operator==(const JoinIndex&, const JoinIndex&) = default;
};

enum class ViolationKind {
  EmptyName,
  DuplicateDimension,
  DuplicateNode,
  MissingMeasure,
  NonFiniteMeasure,
  MissingDimensionRef,
  DuplicateDimensionRef,
  UnknownDimension,
  UnknownNode,
};

struct Violation {
  ViolationKind kind;
  std::string locator;  // e.g. "cell[3].dimension[customers]"
  std::string message;

  friend bool operator==(const Violation&, const Violation&) = default;
};

using ValidationReport = std::vector<Violation>;

/// Structural and referential checks. An empty report means the warehouse is valid.
[[nodiscard]] ValidationReport validate(const Warehouse& warehouse);

std::string_view to_string(ViolationKind kind);

/// Thrown by operations whose precondition is a valid warehouse.
class InvalidWarehouseError : public std::runtime_error {
 public:
  explicit InvalidWarehouseError(ValidationReport report);

  const ValidationReport& report() const noexcept { return report_; }

 private:
  ValidationReport report_;
};

/// Looks up a dimension by name; nullptr when absent.
const Dimension* find_dimension(const Warehouse& warehouse, std::string_view name);

}  // namespace xjoin
