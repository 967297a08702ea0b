#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "xjoin/warehouse.hpp"

namespace xjoin {

/// Equality condition on one attribute of a dimension node.
struct Predicate {
  std::string dimensionName;
  std::string attributeName;
  std::string value;

  friend bool operator==(const Predicate&, const Predicate&) = default;
};

/// Group-by key, qualified by the dimension that owns the attribute.
struct GroupKeyRef {
  std::string dimensionName;
  std::string attributeName;

  friend bool operator==(const GroupKeyRef&, const GroupKeyRef&) = default;
};

enum class Aggregate { Sum, Avg, Count, Min, Max };

std::string_view to_string(Aggregate aggregate);
std::optional<Aggregate> parse_aggregate(std::string_view name);

/*
 * A decisional query: conjunctive equality predicates on dimension
 * attributes, an optional multi-key grouping, and one aggregate over one
 * measure. Predicates on the same dimension must all hold on the single node
 * a cell references.
 */
struct Query {
  std::vector<Predicate> predicates;
  std::vector<GroupKeyRef> groupBy;
  Aggregate aggregate = Aggregate::Sum;
  std::string measureId;

  friend bool operator==(const Query&, const Query&) = default;
};

struct KeyPart {
  std::string dimensionName;
  std::string attributeName;
  std::string value;

  friend bool operator==(const KeyPart&, const KeyPart&) = default;
};

struct ResultRow {
  std::vector<KeyPart> key;  // one entry per group-by key, in query order
  double aggregateValue = 0.0;
  std::size_t rowCount = 0;  // contributing cells

  friend bool operator==(const ResultRow&, const ResultRow&) = default;
};

/// Instrumentation filled in by the executors.
struct ExecutionCounters {
  // Cross-document key comparisons: a fact reference's node id tested against a dimension node id.
  std::uint64_t joinComparisons = 0;
  // Abstract traversal steps: Level/dimension elements and attribute elements visited.
  std::uint64_t nodeVisits = 0;
};

/// Malformed query, or a query naming a dimension, attribute or measure that does not exist.
class QueryError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/*
 * Evaluates the query against the star schema with an explicit nested-loop
 * join: for each fact cell and each of its dimension references, the whole
 * dimension catalog is traversed (every Level, then every node and attribute
 * of the matching Level) to derive the nodes satisfying the query's
 * conditions, and the reference is probed against them.
 *
 * Precondition: validate(warehouse) is empty.
 * Rows are sorted ascending by key tuple (byte order). Cells lacking a
 * group-key dimension or attribute group under the empty string.
 */
[[nodiscard]] std::vector<ResultRow> execute_join_path(const Warehouse& warehouse, const Query& query,
                                                       ExecutionCounters* counters = nullptr);

/*
 * Evaluates the query with a single scan over the join index. Predicates and
 * group keys are read from the attributes embedded in each cell; the
 * dimension catalog is never consulted, so no join comparison happens.
 *
 * Dimensions and attributes named by the query must occur somewhere in a
 * non-empty index, otherwise QueryError is thrown.
 */
[[nodiscard]] std::vector<ResultRow> execute_index_path(const JoinIndex& index, const Query& query,
                                                        ExecutionCounters* counters = nullptr);

/// Join comparisons performed by one execution of the respective path.
std::uint64_t count_join_comparisons(const Warehouse& warehouse, const Query& query);
std::uint64_t count_join_comparisons(const JoinIndex& index, const Query& query);

/*
 * Builds a query from command-line style terms:
 *   aggregate: "(sum|avg|count|min|max):<measureId>"
 *   where:     "<dim>.<attr>=<value>", one per predicate
 *   group_by:  "<dim>.<attr>[,<dim>.<attr>...]", may be empty
 */
Query parse_query(std::string_view aggregate, const std::vector<std::string>& where, std::string_view group_by);

/// Canonical CSV rendering of a result: header line, then one line per row.
std::string format_result_csv(const Query& query, const std::vector<ResultRow>& rows);

}  // namespace xjoin
