#include "xjoin/bench.hpp"

#include <algorithm>
#include <chrono>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include "xjoin/index_builder.hpp"

namespace xjoin {

std::string_view to_string(ExecutionPath path) { return path == ExecutionPath::Join ? "join" : "index"; }

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (const char c : bytes) {
    hash ^= static_cast<unsigned char>(c);
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

std::uint64_t result_checksum(const Query& query, const std::vector<ResultRow>& rows) {
  return fnv1a64(format_result_csv(query, rows));
}

double median(std::vector<double> samples) {
  if (samples.empty()) {
    throw std::invalid_argument("median of an empty sample");
  }
  std::sort(samples.begin(), samples.end());
  const auto mid = samples.size() / 2;
  return samples.size() % 2 == 1 ? samples[mid] : (samples[mid - 1] + samples[mid]) / 2.0;
}

namespace {

using Clock = std::chrono::steady_clock;

double millis_since(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

template <typename Run>
BenchmarkRow time_path(std::size_t cells, ExecutionPath path, std::size_t repetitions, const Query& query, Run run) {
  BenchmarkRow row;
  row.cellCount = cells;
  row.path = path;
  std::vector<double> samples;
  samples.reserve(repetitions);
  for (std::size_t r = 0; r < repetitions; ++r) {
    ExecutionCounters counters;
    const auto start = Clock::now();
    const auto rows = run(counters);
    samples.push_back(millis_since(start));
    const auto checksum = result_checksum(query, rows);
    if (r > 0 && checksum != row.resultChecksum) {
      throw std::logic_error("non-deterministic query result");
    }
    row.resultChecksum = checksum;
    row.joinComparisons = counters.joinComparisons;
    row.nodeVisits = counters.nodeVisits;
  }
  row.wallClockMillis = median(std::move(samples));
  return row;
}

}  // namespace

BenchmarkReport run_benchmark(const BenchmarkConfig& config) {
  if (config.repetitions == 0) {
    throw std::invalid_argument("repetitions must be at least 1");
  }
  BenchmarkReport report;
  std::ostringstream note;
  note << std::fixed << std::setprecision(3) << "in-process run; dims=" << config.spec.dimensionCount
       << " nodes=" << config.spec.nodesPerDimension << " attrs=" << config.spec.attrsPerNode
       << " seed=" << config.spec.seed << " reps=" << config.repetitions << "; median wall clock per path";

  for (const auto cells : config.cellCounts) {
    GenSpec spec = config.spec;
    spec.cellCount = cells;
    const auto query = config.query ? *config.query : sales_query(spec);

    auto start = Clock::now();
    const auto warehouse = generate(spec);
    const double generate_ms = millis_since(start);
    start = Clock::now();
    const auto index = build_index(warehouse);
    const double build_ms = millis_since(start);
    note << "; cells=" << cells << " generate_ms=" << generate_ms << " build_index_ms=" << build_ms;

    report.rows.push_back(time_path(cells, ExecutionPath::Join, config.repetitions, query,
                                    [&](ExecutionCounters& c) { return execute_join_path(warehouse, query, &c); }));
    report.rows.push_back(time_path(cells, ExecutionPath::Index, config.repetitions, query,
                                    [&](ExecutionCounters& c) { return execute_index_path(index, query, &c); }));
  }
  report.environmentNote = note.str();
  return report;
}

void write_benchmark_csv(const BenchmarkReport& report, std::ostream& out) {
  out << kBenchmarkCsvHeader << '\n';
  for (const auto& row : report.rows) {
    std::ostringstream checksum;
    checksum << std::hex << std::setw(16) << std::setfill('0') << row.resultChecksum;
    out << row.cellCount << ',' << to_string(row.path) << ',' << format_number(row.wallClockMillis) << ','
        << checksum.str() << ',' << row.joinComparisons << ',' << row.nodeVisits << '\n';
  }
}

}  // namespace xjoin
