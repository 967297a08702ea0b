#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "xjoin/datagen.hpp"
#include "xjoin/query.hpp"

namespace xjoin {

enum class ExecutionPath { Join, Index };

std::string_view to_string(ExecutionPath path);

struct BenchmarkRow {
  std::size_t cellCount = 0;
  ExecutionPath path = ExecutionPath::Join;
  double wallClockMillis = 0.0;  // median over repetitions
  std::uint64_t resultChecksum = 0;
  std::uint64_t joinComparisons = 0;
  std::uint64_t nodeVisits = 0;
};

struct BenchmarkReport {
  std::vector<BenchmarkRow> rows;
  std::string environmentNote;
};

struct BenchmarkConfig {
  GenSpec spec;  // cellCount is overridden by each entry of cellCounts
  std::vector<std::size_t> cellCounts;
  std::optional<Query> query;  // defaults to sales_query(spec)
  std::size_t repetitions = 5;
};

/*
 * For each cell count: generate the warehouse, build the index, then time
 * the query `repetitions` times on each path (join first, then index) and
 * keep the median. Generation and index build are excluded from the timings.
 */
BenchmarkReport run_benchmark(const BenchmarkConfig& config);

inline constexpr const char* kBenchmarkCsvHeader =
    "cells,path,wall_clock_ms,result_checksum,join_comparisons,node_visits";

void write_benchmark_csv(const BenchmarkReport& report, std::ostream& out);

/// 64-bit FNV-1a over the canonical result CSV.
std::uint64_t result_checksum(const Query& query, const std::vector<ResultRow>& rows);

std::uint64_t fnv1a64(std::string_view bytes);

double median(std::vector<double> samples);

}  // namespace xjoin
