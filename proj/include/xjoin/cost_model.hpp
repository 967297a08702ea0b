#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "xjoin/warehouse.hpp"

namespace xjoin {

/// Cardinalities driving the traversal-cost formulas.
struct CostParams {
  std::uint64_t cellCount = 0;          // |Cell|
  std::uint64_t dimensionCount = 0;     // |Dimension|
  std::uint64_t nodesPerDimension = 0;  // |d_i|
  std::uint64_t attrsPerNode = 0;       // |a_i|

  friend bool operator==(const CostParams&, const CostParams&) = default;
};

/// Exact non-negative fraction, always stored in lowest terms.
struct Rational {
  std::uint64_t numerator = 0;
  std::uint64_t denominator = 1;

  static Rational reduced(std::uint64_t numerator, std::uint64_t denominator);
  double to_double() const { return static_cast<double>(numerator) / static_cast<double>(denominator); }

  friend bool operator==(const Rational&, const Rational&) = default;
};

struct CostEstimate {
  std::uint64_t withoutIndex = 0;
  std::uint64_t withIndex = 0;
  std::optional<Rational> gain;  // empty when withIndex == 0
};

// Node visits of the nested-loop join: (|Cell| * |Dimension|) * (|Dimension| + |d_i| * |a_i|).
// Throws std::overflow_error if the result does not fit in 64 bits.
std::uint64_t cost_without_index(const CostParams& params);

// Node visits of the index scan: |Cell| * (|Dimension| + |a_i|).
std::uint64_t cost_with_index(const CostParams& params);

std::optional<Rational> gain_ratio(const CostParams& params);

CostEstimate estimate(const CostParams& params);

struct CostRow {
  CostParams params;
  CostEstimate estimate;
};

std::vector<CostRow> cost_sweep(const std::vector<CostParams>& params_list);

inline constexpr const char* kCostCsvHeader =
    "cells,dimensions,nodes_per_dim,attrs_per_node,cost_without_index,cost_with_index,gain";

/// Header plus one line per row; an undefined gain is an empty field.
void write_cost_csv(const std::vector<CostRow>& rows, std::ostream& out);

/*
 * Summarizes a warehouse as uniform parameters. Node and attribute counts
 * that differ between dimensions are replaced by their arithmetic mean,
 * rounded to the nearest integer (halves up).
 */
CostParams extract_cost_params(const Warehouse& warehouse);

}  // namespace xjoin
