#pragma once

#include <cstddef>
#include <cstdint>
#include <string>

#include "xjoin/query.hpp"
#include "xjoin/warehouse.hpp"

namespace xjoin {

struct GenSpec {
  std::size_t dimensionCount = 5;
  std::size_t nodesPerDimension = 50;
  std::size_t attrsPerNode = 10;
  std::size_t cellCount = 1000;
  std::size_t measuresPerCell = 1;
  std::uint64_t seed = 42;
};

/*
 * Synthetic star-schema warehouse, a pure function of the spec.
 *
 * Five-dimension warehouses use the names of a sales warehouse (channels,
 * promotions, customers, products, times); otherwise dimensions are dim0..dimN-1.
 * Node ids are "dimK_nJ", attribute names "attrK_J", attribute values are
 * drawn from a pool of min(nodesPerDimension, 16) values "v0".."v15".
 * Every cell references one uniformly drawn node per dimension; measures are
 * integers in [1, 100], the first one named "quantity".
 *
 * Throws std::invalid_argument when cells are requested but the spec leaves
 * them nothing to reference (no dimension, no node or no measure).
 */
[[nodiscard]] Warehouse generate(const GenSpec& spec);

std::string dimension_name(std::size_t dimension_count, std::size_t k);
std::string attribute_name(std::size_t k, std::size_t j);
std::string measure_name(std::size_t j);
std::size_t value_pool_size(const GenSpec& spec);

/*
 * The sales-style decisional query on a generated warehouse: SUM(quantity)
 * over cells whose customer has the first attribute equal to "v0", grouped by
 * the customer's next two attributes (fewer when the node has fewer).
 * Uses dim0 when the warehouse does not have the five sales dimensions.
 */
[[nodiscard]] Query sales_query(const GenSpec& spec);

/// Deterministic uniform draw in [0, bound) from a 64-bit generator, identical on every platform.
template <typename Engine>
std::uint64_t uniform_below(Engine& engine, std::uint64_t bound) {
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
  std::uint64_t draw = 0;
  do {
    draw = engine();
  } while (draw >= limit);
  return draw % bound;
}

}  // namespace xjoin
