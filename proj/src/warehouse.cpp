#include "xjoin/warehouse.hpp"

#include <charconv>
#include <cmath>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>

namespace xjoin {

std::string format_number(double value) {
  char buffer[64];
  const auto [end, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
  if (ec != std::errc{}) {
    throw std::runtime_error("cannot format number");
  }
  return std::string(buffer, end);
}

Measure make_measure(std::string id, double value) {
  if (!std::isfinite(value)) {
    throw std::invalid_argument("measure '" + id + "' must be finite");
  }
  auto lexeme = format_number(value);
  return Measure{std::move(id), value, std::move(lexeme)};
}

std::optional<Measure> parse_measure(std::string id, std::string_view lexeme) {
  if (lexeme.empty()) {
    return std::nullopt;
  }
  // from_chars rejects a leading '+', XML numbers occasionally carry one.
  auto digits = lexeme;
  if (digits.front() == '+') {
    digits.remove_prefix(1);
    if (digits.empty() || digits.front() == '-' || digits.front() == '+') {
      return std::nullopt;
    }
  }
  double value = 0.0;
  const auto* first = digits.data();
  const auto* last = digits.data() + digits.size();
  const auto [ptr, ec] = std::from_chars(first, last, value, std::chars_format::general);
  if (ec != std::errc{} || ptr != last || !std::isfinite(value)) {
    return std::nullopt;
  }
  return Measure{std::move(id), value, std::string(lexeme)};
}

std::string_view to_string(ViolationKind kind) {
  switch (kind) {
    case ViolationKind::EmptyName: return "empty-name";
    case ViolationKind::DuplicateDimension: return "duplicate-dimension";
    case ViolationKind::DuplicateNode: return "duplicate-node";
    case ViolationKind::MissingMeasure: return "missing-measure";
    case ViolationKind::NonFiniteMeasure: return "non-finite-measure";
    case ViolationKind::MissingDimensionRef: return "missing-dimension-ref";
    case ViolationKind::DuplicateDimensionRef: return "duplicate-dimension-ref";
    case ViolationKind::UnknownDimension: return "unknown-dimension";
    case ViolationKind::UnknownNode: return "unknown-node";
  }
  return "unknown";
}

namespace {

std::string summarize(const ValidationReport& report) {
  std::string text = "invalid warehouse: " + std::to_string(report.size()) + " violation(s)";
  if (!report.empty()) {
    text += "; first: " + report.front().locator + ": " + report.front().message;
  }
  return text;
}

}  // namespace

InvalidWarehouseError::InvalidWarehouseError(ValidationReport report)
    : std::runtime_error(summarize(report)), report_(std::move(report)) {}

const Dimension* find_dimension(const Warehouse& warehouse, std::string_view name) {
  for (const auto& dimension : warehouse.dimensions) {
    if (dimension.name == name) {
      return &dimension;
    }
  }
  return nullptr;
}

ValidationReport validate(const Warehouse& warehouse) {
  ValidationReport report;
  auto add = [&report](ViolationKind kind, std::string locator, std::string message) {
    report.push_back(Violation{kind, std::move(locator), std::move(message)});
  };

  // Dimension name -> set of node ids, built while checking the dimension side.
  std::unordered_map<std::string_view, std::unordered_set<std::string_view>> catalog;

  for (std::size_t d = 0; d < warehouse.dimensions.size(); ++d) {
    const auto& dimension = warehouse.dimensions[d];
    const auto dimension_locator = "dimension[" + dimension.name + "]";
    if (dimension.name.empty()) {
      add(ViolationKind::EmptyName, "dimension#" + std::to_string(d), "dimension name is empty");
    }
    const auto [slot, inserted] = catalog.try_emplace(dimension.name);
    if (!inserted) {
      add(ViolationKind::DuplicateDimension, dimension_locator,
          "dimension '" + dimension.name + "' is declared more than once");
    }
    auto& ids = slot->second;
    for (std::size_t n = 0; n < dimension.nodes.size(); ++n) {
      const auto& node = dimension.nodes[n];
      const auto node_locator = dimension_locator + ".node[" + node.id + "]";
      if (node.id.empty()) {
        add(ViolationKind::EmptyName, dimension_locator + ".node#" + std::to_string(n), "node id is empty");
      } else if (!ids.insert(node.id).second) {
        add(ViolationKind::DuplicateNode, node_locator,
            "node id '" + node.id + "' is not unique in dimension '" + dimension.name + "'");
      }
      for (std::size_t a = 0; a < node.attributes.size(); ++a) {
        if (node.attributes[a].name.empty()) {
          add(ViolationKind::EmptyName, node_locator + ".attribute#" + std::to_string(a),
              "attribute name is empty");
        }
      }
    }
  }

  for (std::size_t c = 0; c < warehouse.cells.size(); ++c) {
    const auto& cell = warehouse.cells[c];
    const auto cell_locator = "cell[" + std::to_string(c) + "]";
    if (cell.measures.empty()) {
      add(ViolationKind::MissingMeasure, cell_locator, "cell has no measure");
    }
    for (std::size_t m = 0; m < cell.measures.size(); ++m) {
      const auto& measure = cell.measures[m];
      const auto measure_locator = cell_locator + ".fact[" + std::to_string(m) + "]";
      if (measure.id.empty()) {
        add(ViolationKind::EmptyName, measure_locator, "measure id is empty");
      }
      if (!std::isfinite(measure.value)) {
        add(ViolationKind::NonFiniteMeasure, measure_locator, "measure value is not finite");
      }
    }
    if (cell.dimensionRefs.empty()) {
      add(ViolationKind::MissingDimensionRef, cell_locator, "cell references no dimension");
    }
    std::unordered_set<std::string_view> seen;
    for (const auto& ref : cell.dimensionRefs) {
      const auto ref_locator = cell_locator + ".dimension[" + ref.dimensionName + "]";
      if (!seen.insert(ref.dimensionName).second) {
        add(ViolationKind::DuplicateDimensionRef, ref_locator,
            "dimension '" + ref.dimensionName + "' is referenced twice by the same cell");
        continue;
      }
      const auto it = catalog.find(ref.dimensionName);
      if (it == catalog.end()) {
        add(ViolationKind::UnknownDimension, ref_locator, "no dimension named '" + ref.dimensionName + "'");
      } else if (!it->second.contains(ref.nodeId)) {
        add(ViolationKind::UnknownNode, ref_locator,
            "dangling reference to node '" + ref.nodeId + "' of dimension '" + ref.dimensionName + "'");
      }
    }
  }
  return report;
}

}  // namespace xjoin
