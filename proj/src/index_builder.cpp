#include "xjoin/index_builder.hpp"

#include <functional>
#include <string_view>
#include <unordered_map>

namespace xjoin {

namespace {

struct NodeKey {
  std::string_view dimension;
  std::string_view node;

  friend bool operator==(const NodeKey&, const NodeKey&) = default;
};

struct NodeKeyHash {
  std::size_t operator()(const NodeKey& key) const noexcept {
    const auto h1 = std::hash<std::string_view>{}(key.dimension);
    const auto h2 = std::hash<std::string_view>{}(key.node);
    return h1 ^ (h2 + 0x9e3779b97f4a7c15ULL + (h1 << 6) + (h1 >> 2));
  }
};

}  // namespace

JoinIndex build_index(const Warehouse& warehouse) {
  if (auto report = validate(warehouse); !report.empty()) {
    throw InvalidWarehouseError(std::move(report));
  }

  std::unordered_map<NodeKey, const DimensionNode*, NodeKeyHash> nodes;
  for (const auto& dimension : warehouse.dimensions) {
    for (const auto& node : dimension.nodes) {
      nodes.emplace(NodeKey{dimension.name, node.id}, &node);
    }
  }

  JoinIndex index;
  index.cells.reserve(warehouse.cells.size());
  for (const auto& cell : warehouse.cells) {
    IndexCell& out = index.cells.emplace_back();
    out.facts = cell.measures;
    out.dimensions.reserve(cell.dimensionRefs.size());
    for (const auto& ref : cell.dimensionRefs) {
      // Validation guarantees the lookup succeeds.
      const DimensionNode* node = nodes.at(NodeKey{ref.dimensionName, ref.nodeId});
      out.dimensions.push_back(IndexDimension{ref.dimensionName, ref.nodeId, node->attributes});
    }
  }
  return index;
}

IndexStats index_stats(const JoinIndex& index) {
  IndexStats stats;
  stats.cellCount = index.cells.size();
  for (const auto& cell : index.cells) {
    ++stats.dimensionEntriesPerCell[cell.dimensions.size()];
    for (const auto& dimension : cell.dimensions) {
      ++stats.attributeCount[dimension.attributes.size()];
    }
  }
  return stats;
}

}  // namespace xjoin
