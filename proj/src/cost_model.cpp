#include "xjoin/cost_model.hpp"

#include <numeric>
#include <stdexcept>

namespace xjoin {

namespace {

std::uint64_t checked_mul(std::uint64_t a, std::uint64_t b) {
  std::uint64_t out = 0;
  if (__builtin_mul_overflow(a, b, &out)) {
    throw std::overflow_error("cost exceeds 64-bit range");
  }
  return out;
}

std::uint64_t checked_add(std::uint64_t a, std::uint64_t b) {
  std::uint64_t out = 0;
  if (__builtin_add_overflow(a, b, &out)) {
    throw std::overflow_error("cost exceeds 64-bit range");
  }
  return out;
}

std::uint64_t rounded_mean(std::uint64_t total, std::uint64_t count) {
  if (count == 0) {
    return 0;
  }
  return (2 * total + count) / (2 * count);
}

}  // namespace

Rational Rational::reduced(std::uint64_t numerator, std::uint64_t denominator) {
  if (denominator == 0) {
    throw std::domain_error("zero denominator");
  }
  const auto divisor = std::gcd(numerator, denominator);
  return Rational{numerator / divisor, denominator / divisor};
}

std::uint64_t cost_without_index(const CostParams& p) {
  const auto per_reference = checked_add(p.dimensionCount, checked_mul(p.nodesPerDimension, p.attrsPerNode));
  return checked_mul(checked_mul(p.cellCount, p.dimensionCount), per_reference);
}

std::uint64_t cost_with_index(const CostParams& p) {
  return checked_mul(p.cellCount, checked_add(p.dimensionCount, p.attrsPerNode));
}

std::optional<Rational> gain_ratio(const CostParams& params) {
  const auto with_index = cost_with_index(params);
  if (with_index == 0) {
    return std::nullopt;
  }
  return Rational::reduced(cost_without_index(params), with_index);
}

CostEstimate estimate(const CostParams& params) {
  return CostEstimate{cost_without_index(params), cost_with_index(params), gain_ratio(params)};
}

std::vector<CostRow> cost_sweep(const std::vector<CostParams>& params_list) {
  std::vector<CostRow> rows;
  rows.reserve(params_list.size());
  for (const auto& params : params_list) {
    rows.push_back(CostRow{params, estimate(params)});
  }
  return rows;
}

void write_cost_csv(const std::vector<CostRow>& rows, std::ostream& out) {
  out << kCostCsvHeader << '\n';
  for (const auto& row : rows) {
    const auto& p = row.params;
    out << p.cellCount << ',' << p.dimensionCount << ',' << p.nodesPerDimension << ',' << p.attrsPerNode << ','
        << row.estimate.withoutIndex << ',' << row.estimate.withIndex << ',';
    if (row.estimate.gain) {
      out << format_number(row.estimate.gain->to_double());
    }
    out << '\n';
  }
}

CostParams extract_cost_params(const Warehouse& warehouse) {
  CostParams params;
  params.cellCount = warehouse.cells.size();
  params.dimensionCount = warehouse.dimensions.size();
  std::uint64_t total_nodes = 0;
  std::uint64_t total_attributes = 0;
  for (const auto& dimension : warehouse.dimensions) {
    total_nodes += dimension.nodes.size();
    for (const auto& node : dimension.nodes) {
      total_attributes += node.attributes.size();
    }
  }
  params.nodesPerDimension = rounded_mean(total_nodes, params.dimensionCount);
  params.attrsPerNode = rounded_mean(total_attributes, total_nodes);
  return params;
}

}  // namespace xjoin
