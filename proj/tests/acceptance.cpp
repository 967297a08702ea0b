// Acceptance gate. Prints one PASS/FAIL line per criterion; exit status is
// non-zero if any criterion fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "support/oracle.hpp"
#include "xjoin/bench.hpp"
#include "xjoin/cost_model.hpp"
#include "xjoin/datagen.hpp"
#include "xjoin/index_builder.hpp"
#include "xjoin/query.hpp"
#include "xjoin/xml_io.hpp"

using namespace xjoin;

namespace {

constexpr double kAvgTolerance = 1e-9;
constexpr double kMinRSquared = 0.9;
constexpr double kMinSpeedup = 10.0;
constexpr double kMaxSweepSeconds = 10.0;
constexpr double kSlopeRatioTolerance = 0.20;

struct Outcome {
  bool pass = true;
  std::string detail;
};

bool same_rows(const std::vector<ResultRow>& a, const std::vector<ResultRow>& b, Aggregate aggregate) {
  if (a.size() != b.size()) {
    return false;
  }
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].key != b[i].key || a[i].rowCount != b[i].rowCount) {
      return false;
    }
    const bool close = aggregate == Aggregate::Avg
                           ? std::fabs(a[i].aggregateValue - b[i].aggregateValue) <= kAvgTolerance
                           : a[i].aggregateValue == b[i].aggregateValue;
    if (!close) {
      return false;
    }
  }
  return true;
}

Query random_query(std::mt19937_64& rng, const GenSpec& spec) {
  constexpr Aggregate kAggregates[] = {Aggregate::Sum, Aggregate::Avg, Aggregate::Count, Aggregate::Min,
                                       Aggregate::Max};
  Query q;
  q.aggregate = kAggregates[uniform_below(rng, 5)];
  q.measureId = measure_name(uniform_below(rng, spec.measuresPerCell));
  const auto pool = value_pool_size(spec);
  const auto predicate_count = uniform_below(rng, 3);
  for (std::size_t i = 0; i < predicate_count; ++i) {
    const auto k = uniform_below(rng, spec.dimensionCount);
    const auto j = uniform_below(rng, spec.attrsPerNode);
    // Occasionally ask for a value outside the pool so some queries select nothing.
    const auto v = uniform_below(rng, pool + 1);
    q.predicates.push_back(
        Predicate{dimension_name(spec.dimensionCount, k), attribute_name(k, j), "v" + std::to_string(v)});
  }
  const auto arity = uniform_below(rng, 4);
  for (std::size_t i = 0; i < arity; ++i) {
    const auto k = uniform_below(rng, spec.dimensionCount);
    q.groupBy.push_back(GroupKeyRef{dimension_name(spec.dimensionCount, k), attribute_name(k, uniform_below(rng, spec.attrsPerNode))});
  }
  return q;
}

// Criteria 1 and 2 share one suite.
struct PropertySuite {
  std::size_t warehouses = 0;
  std::size_t queries = 0;
  std::size_t nonEmptyResults = 0;
  std::size_t mismatches = 0;
  std::uint64_t indexJoinComparisons = 0;
  std::uint64_t joinJoinComparisons = 0;
  std::string firstMismatch;
};

PropertySuite run_property_suite() {
  constexpr std::size_t kWarehouses = 220;
  constexpr std::size_t kQueriesPerWarehouse = 6;
  std::mt19937_64 rng(20240611);
  PropertySuite suite;
  for (std::size_t w = 0; w < kWarehouses; ++w) {
    GenSpec spec;
    spec.dimensionCount = 1 + uniform_below(rng, 6);
    spec.nodesPerDimension = 1 + uniform_below(rng, 60);
    spec.attrsPerNode = 1 + uniform_below(rng, 12);
    // Include the empty warehouse and the top of the range explicitly.
    spec.cellCount = w == 0 ? 0 : w == 1 ? 2000 : uniform_below(rng, 2001);
    spec.measuresPerCell = 1 + uniform_below(rng, 3);
    spec.seed = rng();
    const auto warehouse = generate(spec);
    const auto index = build_index(warehouse);
    ++suite.warehouses;
    for (std::size_t i = 0; i < kQueriesPerWarehouse; ++i) {
      const auto query = random_query(rng, spec);
      ExecutionCounters join_counters;
      ExecutionCounters index_counters;
      const auto by_join = execute_join_path(warehouse, query, &join_counters);
      const auto by_index = execute_index_path(index, query, &index_counters);
      const auto expected = xjoin::testing::brute_force(warehouse, query);
      ++suite.queries;
      suite.nonEmptyResults += expected.empty() ? 0 : 1;
      suite.indexJoinComparisons += index_counters.joinComparisons;
      suite.joinJoinComparisons += join_counters.joinComparisons;
      if (!same_rows(by_join, expected, query.aggregate) || !same_rows(by_index, expected, query.aggregate)) {
        if (suite.mismatches++ == 0) {
          suite.firstMismatch = "warehouse seed " + std::to_string(spec.seed) + " query " + std::to_string(i);
        }
      }
    }
  }
  return suite;
}

Outcome criterion_oracle(const PropertySuite& s) {
  Outcome o;
  o.pass = s.warehouses >= 200 && s.queries >= 5 * s.warehouses && s.mismatches == 0;
  o.detail = std::to_string(s.warehouses) + " warehouses, " + std::to_string(s.queries) + " queries (" +
             std::to_string(s.nonEmptyResults) + " non-empty), " + std::to_string(s.mismatches) + " mismatches";
  if (s.mismatches > 0) {
    o.detail += "; first: " + s.firstMismatch;
  }
  return o;
}

Outcome criterion_join_elimination(const PropertySuite& s) {
  Outcome o;
  o.pass = s.indexJoinComparisons == 0 && s.joinJoinComparisons > 0;
  o.detail = "index-path join comparisons " + std::to_string(s.indexJoinComparisons) +
             " (join path performed " + std::to_string(s.joinJoinComparisons) + ")";
  return o;
}

Outcome criterion_cost_formulas() {
  struct Point {
    CostParams params;
    std::uint64_t withoutIndex;
    std::uint64_t withIndex;
  };
  // Hand-evaluated: C*D*(D + d*a) and C*(D + a).
  const Point points[] = {
      {{100, 5, 50, 10}, 252500, 1500},
      {{1, 1, 1, 1}, 2, 2},
      {{0, 5, 50, 10}, 0, 0},
      {{10, 5, 50, 10}, 25250, 150},
      {{1000, 5, 50, 10}, 2525000, 15000},
      {{1000000, 5, 50, 10}, 2525000000ULL, 15000000},
      {{7, 3, 4, 2}, 231, 35},
      {{2, 2, 3, 0}, 8, 4},
      {{50, 6, 60, 12}, 217800, 900},
      {{1000, 1, 100, 5}, 501000, 6000},
      {{3, 4, 0, 9}, 48, 39},
      {{20, 10, 10, 10}, 22000, 400},
  };
  Outcome o;
  std::size_t checked = 0;
  for (const auto& p : points) {
    const bool ok = cost_without_index(p.params) == p.withoutIndex && cost_with_index(p.params) == p.withIndex;
    if (!ok) {
      o.pass = false;
      o.detail += "mismatch at cells=" + std::to_string(p.params.cellCount) + "; ";
    }
    ++checked;
  }
  const auto g10 = gain_ratio({10, 5, 50, 10});
  const auto g1k = gain_ratio({1000, 5, 50, 10});
  const auto g1m = gain_ratio({1000000, 5, 50, 10});
  const bool invariant = g10 && g1k && g1m && *g10 == *g1k && *g1k == *g1m;
  o.pass = o.pass && invariant;
  o.detail += std::to_string(checked) + " points checked; gain at 10/1e3/1e6 cells = " +
              (g10 ? std::to_string(g10->numerator) + "/" + std::to_string(g10->denominator) : "undefined") +
              (invariant ? " (invariant)" : " (NOT invariant)");
  return o;
}

struct Fit {
  double slope = 0;
  double rSquared = 0;
};

Fit linear_fit(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  Fit f;
  f.slope = sxy / sxx;
  f.rSquared = syy == 0 ? 1.0 : (sxy * sxy) / (sxx * syy);
  return f;
}

std::string fixed(double v, int digits = 3) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

Outcome criterion_trend(Outcome& consistency) {
  BenchmarkConfig config;
  config.spec = GenSpec{5, 50, 10, 0, 1, 42};
  config.cellCounts = {1000, 5000, 10000, 50000};
  config.repetitions = 5;
  const auto report = run_benchmark(config);

  std::vector<double> cells, join_ms, index_ms, join_visits, index_visits;
  Outcome o;
  std::string speedups;
  for (std::size_t i = 0; i + 1 < report.rows.size(); i += 2) {
    const auto& j = report.rows[i];
    const auto& x = report.rows[i + 1];
    cells.push_back(static_cast<double>(j.cellCount));
    join_ms.push_back(j.wallClockMillis);
    index_ms.push_back(x.wallClockMillis);
    join_visits.push_back(static_cast<double>(j.nodeVisits));
    index_visits.push_back(static_cast<double>(x.nodeVisits));
    if (j.resultChecksum != x.resultChecksum) {
      o.pass = false;
      o.detail += "checksum mismatch at " + std::to_string(j.cellCount) + "; ";
    }
    const double speedup = j.wallClockMillis / std::max(x.wallClockMillis, 1e-6);
    speedups += " " + std::to_string(j.cellCount) + ":" + fixed(speedup, 1) + "x";
    if (j.cellCount >= 10000 && speedup < kMinSpeedup) {
      o.pass = false;
    }
  }
  const auto join_fit = linear_fit(cells, join_ms);
  const auto index_fit = linear_fit(cells, index_ms);
  o.pass = o.pass && join_fit.rSquared >= kMinRSquared && index_fit.rSquared >= kMinRSquared;
  o.detail += "R2 join=" + fixed(join_fit.rSquared, 4) + " index=" + fixed(index_fit.rSquared, 4) + "; speedup" +
              speedups;

  // Node-visit counters against the formulas.
  const double predicted = static_cast<double>(cost_without_index({1, 5, 50, 10})) /
                           static_cast<double>(cost_with_index({1, 5, 50, 10}));
  const double measured = linear_fit(cells, join_visits).slope / linear_fit(cells, index_visits).slope;
  consistency.pass = std::fabs(measured / predicted - 1.0) <= kSlopeRatioTolerance;
  consistency.detail = "visit slope ratio " + fixed(measured) + " vs formula " + fixed(predicted);
  return o;
}

Outcome criterion_full_sweep() {
  const GenSpec spec{5, 50, 10, 500000, 1, 7};
  JoinIndex index;
  {
    const auto warehouse = generate(spec);
    index = build_index(warehouse);
  }
  const auto query = sales_query(spec);
  const auto start = std::chrono::steady_clock::now();
  const auto rows = execute_index_path(index, query);
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  Outcome o;
  std::size_t contributing = 0;
  for (const auto& row : rows) {
    contributing += row.rowCount;
  }
  o.pass = seconds < kMaxSweepSeconds && contributing > 0;
  o.detail = "500000 cells answered in " + fixed(seconds) + " s (" + std::to_string(rows.size()) + " groups, " +
             std::to_string(contributing) + " contributing cells)";
  return o;
}

Outcome criterion_round_trip() {
  std::mt19937_64 rng(99);
  Outcome o;
  std::size_t documents = 0;
  auto check = [&](const std::string& what, bool ok) {
    ++documents;
    if (!ok && o.pass) {
      o.pass = false;
      o.detail = "first failure: " + what + "; ";
    }
  };
  for (std::size_t i = 0; i < 60; ++i) {
    GenSpec spec;
    spec.dimensionCount = uniform_below(rng, 7);
    spec.nodesPerDimension = spec.dimensionCount == 0 ? 0 : 1 + uniform_below(rng, 30);
    spec.attrsPerNode = uniform_below(rng, 8);
    spec.cellCount = spec.dimensionCount == 0 ? 0 : uniform_below(rng, 500);
    spec.measuresPerCell = 1 + uniform_below(rng, 3);
    spec.seed = rng();
    const auto w = generate(spec);
    const auto index = build_index(w);

    const auto dims_text = serialize_dimensions(w.dimensions);
    const auto dims = parse_dimensions(dims_text);
    check("Dimensions.xml #" + std::to_string(i),
          dims.ok() && *dims.value == w.dimensions && serialize_dimensions(*dims.value) == dims_text &&
              serialize_dimensions(w.dimensions) == dims_text);

    const auto facts_text = serialize_facts(w.cells);
    const auto facts = parse_facts(facts_text);
    check("TableFacts.xml #" + std::to_string(i),
          facts.ok() && *facts.value == w.cells && serialize_facts(*facts.value) == facts_text &&
              serialize_facts(w.cells) == facts_text);

    const auto index_text = serialize_index(index);
    const auto parsed = parse_index(index_text);
    check("Index.xml #" + std::to_string(i),
          parsed.ok() && *parsed.value == index && serialize_index(*parsed.value) == index_text &&
              serialize_index(build_index(w)) == index_text);
  }
  o.detail += std::to_string(documents) + " documents round-tripped";
  return o;
}

Outcome criterion_validation() {
  std::mt19937_64 rng(7);
  Outcome o;
  std::size_t mutations = 0;
  for (std::size_t i = 0; i < 100; ++i) {
    GenSpec spec;
    spec.dimensionCount = 1 + uniform_below(rng, 6);
    spec.nodesPerDimension = 1 + uniform_below(rng, 40);
    spec.attrsPerNode = uniform_below(rng, 6);
    spec.cellCount = 1 + uniform_below(rng, 300);
    spec.seed = rng();
    auto w = generate(spec);
    if (!validate(w).empty()) {
      o.pass = false;
      o.detail = "generated warehouse invalid; ";
      continue;
    }
    auto& cell = w.cells[uniform_below(rng, w.cells.size())];
    auto& ref = cell.dimensionRefs[uniform_below(rng, cell.dimensionRefs.size())];
    ref.nodeId += "_corrupt";
    const auto report = validate(w);
    ++mutations;
    if (report.size() != 1 || report[0].kind != ViolationKind::UnknownNode) {
      o.pass = false;
      o.detail = "mutation " + std::to_string(i) + " gave " + std::to_string(report.size()) + " violations; ";
    }
  }
  o.detail += std::to_string(mutations) + " single-ref corruptions each reported exactly once";
  return o;
}

}  // namespace

int main() {
  bool all = true;
  auto report = [&all](const char* name, const Outcome& o) {
    all = all && o.pass;
    std::printf("%s %s: %s\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str());
    std::fflush(stdout);
  };
  auto guarded = [](const std::function<Outcome()>& f) {
    try {
      return f();
    } catch (const std::exception& e) {
      return Outcome{false, std::string("exception: ") + e.what()};
    }
  };

  PropertySuite suite;
  Outcome suite_error;
  try {
    suite = run_property_suite();
  } catch (const std::exception& e) {
    suite_error = Outcome{false, std::string("exception: ") + e.what()};
  }
  report("1 oracle-equivalence", suite_error.pass ? criterion_oracle(suite) : suite_error);
  report("2 join-elimination", suite_error.pass ? criterion_join_elimination(suite) : suite_error);
  report("3 cost-formulas", guarded(criterion_cost_formulas));
  Outcome consistency{false, "not run"};
  report("4 linear-trend-and-speedup", guarded([&] { return criterion_trend(consistency); }));
  report("4b cost-execution-consistency", consistency);
  report("5 full-sweep-under-10s", guarded(criterion_full_sweep));
  report("6 round-trip", guarded(criterion_round_trip));
  report("7 single-corruption-single-violation", guarded(criterion_validation));
  return all ? 0 : 1;
}
