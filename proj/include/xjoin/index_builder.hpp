#pragma once

#include <cstddef>
#include <map>

#include "xjoin/warehouse.hpp"

namespace xjoin {

/*
 * Materializes the join index: every fact cell is copied with, for each of
 * its dimension references, a full copy of the referenced node's attributes.
 * Queries over the result need no access to the dimension catalog.
 *
 * Throws InvalidWarehouseError when validate(warehouse) is not empty.
 */
[[nodiscard]] JoinIndex build_index(const Warehouse& warehouse);

struct IndexStats {
  std::size_t cellCount = 0;
  // dimension entries per cell -> number of cells
  std::map<std::size_t, std::size_t> dimensionEntriesPerCell;
  // attributes per dimension entry -> number of dimension entries
  std::map<std::size_t, std::size_t> attributeCount;

  friend bool operator==(const IndexStats&, const IndexStats&) = default;
};

[[nodiscard]] IndexStats index_stats(const JoinIndex& index);

}  // namespace xjoin
