#include "xjoin/datagen.hpp"

#include <algorithm>
#include <array>
#include <random>
#include <stdexcept>
#include <string_view>

namespace xjoin {

namespace {

constexpr std::array<std::string_view, 5> kSalesDimensions = {"channels", "promotions", "customers", "products",
                                                              "times"};
constexpr std::size_t kCustomers = 2;
constexpr std::size_t kMaxPool = 16;

}  // namespace

std::string dimension_name(std::size_t dimension_count, std::size_t k) {
  if (dimension_count == kSalesDimensions.size()) {
    return std::string(kSalesDimensions[k]);
  }
  return "dim" + std::to_string(k);
}

std::string attribute_name(std::size_t k, std::size_t j) {
  return "attr" + std::to_string(k) + "_" + std::to_string(j);
}

std::string measure_name(std::size_t j) {
  switch (j) {
    case 0: return "quantity";
    case 1: return "amount";
    default: return "measure" + std::to_string(j);
  }
}

std::size_t value_pool_size(const GenSpec& spec) { return std::min(spec.nodesPerDimension, kMaxPool); }

Warehouse generate(const GenSpec& spec) {
  if (spec.cellCount > 0) {
    if (spec.dimensionCount == 0 || spec.nodesPerDimension == 0) {
      throw std::invalid_argument("cells need at least one dimension with at least one node");
    }
    if (spec.measuresPerCell == 0) {
      throw std::invalid_argument("cells need at least one measure");
    }
  }

  std::mt19937_64 engine(spec.seed);
  const auto pool = value_pool_size(spec);

  Warehouse warehouse;
  warehouse.dimensions.reserve(spec.dimensionCount);
  for (std::size_t k = 0; k < spec.dimensionCount; ++k) {
    Dimension& dimension = warehouse.dimensions.emplace_back();
    dimension.name = dimension_name(spec.dimensionCount, k);
    dimension.nodes.reserve(spec.nodesPerDimension);
    for (std::size_t n = 0; n < spec.nodesPerDimension; ++n) {
      DimensionNode& node = dimension.nodes.emplace_back();
      node.id = "dim" + std::to_string(k) + "_n" + std::to_string(n);
      node.attributes.reserve(spec.attrsPerNode);
      for (std::size_t j = 0; j < spec.attrsPerNode; ++j) {
        node.attributes.push_back(
            AttributeKV{attribute_name(k, j), "v" + std::to_string(uniform_below(engine, pool))});
      }
    }
  }

  warehouse.cells.reserve(spec.cellCount);
  for (std::size_t c = 0; c < spec.cellCount; ++c) {
    FactCell& cell = warehouse.cells.emplace_back();
    cell.dimensionRefs.reserve(spec.dimensionCount);
    for (std::size_t k = 0; k < spec.dimensionCount; ++k) {
      const auto n = uniform_below(engine, spec.nodesPerDimension);
      cell.dimensionRefs.push_back(DimensionRef{warehouse.dimensions[k].name, warehouse.dimensions[k].nodes[n].id});
    }
    cell.measures.reserve(spec.measuresPerCell);
    for (std::size_t j = 0; j < spec.measuresPerCell; ++j) {
      cell.measures.push_back(make_measure(measure_name(j), static_cast<double>(1 + uniform_below(engine, 100))));
    }
  }
  return warehouse;
}

Query sales_query(const GenSpec& spec) {
  if (spec.dimensionCount == 0 || spec.attrsPerNode == 0) {
    throw std::invalid_argument("sales query needs at least one dimension attribute");
  }
  const std::size_t k = spec.dimensionCount == kSalesDimensions.size() ? kCustomers : 0;
  const auto dimension = dimension_name(spec.dimensionCount, k);
  Query query;
  query.aggregate = Aggregate::Sum;
  query.measureId = measure_name(0);
  query.predicates.push_back(Predicate{dimension, attribute_name(k, 0), "v0"});
  for (std::size_t j = 1; j < std::min<std::size_t>(spec.attrsPerNode, 3); ++j) {
    query.groupBy.push_back(GroupKeyRef{dimension, attribute_name(k, j)});
  }
  return query;
}

}  // namespace xjoin
