#include "xjoin/cli.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <functional>
#include <memory>
#include <stdexcept>

#include "xjoin/bench.hpp"
#include "xjoin/cost_model.hpp"
#include "xjoin/datagen.hpp"
#include "xjoin/index_builder.hpp"
#include "xjoin/query.hpp"
#include "xjoin/xml_io.hpp"

namespace xjoin {

namespace {

// Bad input data: parse failures, validation violations, unknown query names.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct QueryFlags {
  std::string aggregate;
  std::vector<std::string> where;
  std::string groupBy;

  void add_to(CLI::App& command, bool aggregate_required) {
    auto* agg = command.add_option("--agg", aggregate, "Aggregate as (sum|avg|count|min|max):<measure>");
    if (aggregate_required) {
      agg->required();
    }
    command.add_option("--where", where, "Equality predicate <dim>.<attr>=<value> (repeatable)")->take_all();
    command.add_option("--group-by", groupBy, "Comma-separated <dim>.<attr> keys");
  }

  bool given() const { return !aggregate.empty() || !where.empty() || !groupBy.empty(); }

  Query to_query() const {
    try {
      return parse_query(aggregate, where, groupBy);
    } catch (const QueryError& e) {
      throw UsageError(e.what());
    }
  }
};

void add_spec_flags(CLI::App& command, GenSpec& spec, bool with_cells) {
  command.add_option("--dims", spec.dimensionCount, "Number of dimensions")->capture_default_str();
  command.add_option("--nodes", spec.nodesPerDimension, "Nodes per dimension")->capture_default_str();
  command.add_option("--attrs", spec.attrsPerNode, "Attributes per node")->capture_default_str();
  if (with_cells) {
    command.add_option("--cells", spec.cellCount, "Number of fact cells")->capture_default_str();
  }
  command.add_option("--measures", spec.measuresPerCell, "Measures per cell")->capture_default_str();
  command.add_option("--seed", spec.seed, "Random seed")->capture_default_str();
}

void print_diagnostics(const std::vector<ParseDiagnostic>& diagnostics, std::ostream& err) {
  for (const auto& diagnostic : diagnostics) {
    err << diagnostic.to_string() << '\n';
  }
}

Warehouse load_checked(const std::string& directory, std::ostream& err) {
  auto result = load_warehouse(directory);
  print_diagnostics(result.diagnostics, err);
  if (!result.ok()) {
    throw DataError("cannot parse warehouse in '" + directory + "'");
  }
  return std::move(*result.value);
}

void print_violations(const ValidationReport& report, std::ostream& out) {
  for (const auto& violation : report) {
    out << to_string(violation.kind) << ',' << violation.locator << ',' << violation.message << '\n';
  }
}

/// Runs `emit` against --out when given, otherwise against `out`.
void with_output(const std::string& file, std::ostream& out, const std::function<void(std::ostream&)>& emit) {
  if (file.empty()) {
    emit(out);
    return;
  }
  std::ofstream stream(file, std::ios::binary | std::ios::trunc);
  if (!stream) {
    throw IoError("cannot open '" + file + "' for writing");
  }
  emit(stream);
  stream.flush();
  if (!stream) {
    throw IoError("failed writing '" + file + "'");
  }
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Join index for XML star-schema warehouses: generate, index, query, benchmark", "xjoin"};
  app.require_subcommand(1);

  // gen
  GenSpec gen_spec;
  std::string gen_out;
  auto* gen = app.add_subcommand("gen", "Generate Dimensions.xml and TableFacts.xml");
  add_spec_flags(*gen, gen_spec, true);
  gen->add_option("--out", gen_out, "Output directory")->required();

  // validate
  std::string validate_in;
  auto* validate_cmd = app.add_subcommand("validate", "Check referential integrity of a warehouse");
  validate_cmd->add_option("--in", validate_in, "Warehouse directory")->required();

  // index
  std::string index_in;
  std::string index_out;
  auto* index_cmd = app.add_subcommand("index", "Build Index.xml from a warehouse");
  index_cmd->add_option("--in", index_in, "Warehouse directory")->required();
  index_cmd->add_option("--out", index_out, "Output file (default: standard output)");

  // query
  std::string query_in;
  std::string query_index;
  std::string query_path = "index";
  std::string query_out;
  QueryFlags query_flags;
  auto* query_cmd = app.add_subcommand("query", "Run a decisional query and print the result as CSV");
  auto* in_opt = query_cmd->add_option("--in", query_in, "Warehouse directory");
  auto* index_opt = query_cmd->add_option("--index", query_index, "Index.xml file");
  in_opt->excludes(index_opt);
  query_cmd->add_option("--path", query_path, "Execution path")
      ->check(CLI::IsMember({"join", "index"}))
      ->capture_default_str();
  query_cmd->add_option("--out", query_out, "Output file (default: standard output)");
  query_flags.add_to(*query_cmd, true);

  // bench
  BenchmarkConfig bench_config;
  std::string bench_out;
  QueryFlags bench_flags;
  auto* bench = app.add_subcommand("bench", "Time both execution paths over a cell-count sweep");
  add_spec_flags(*bench, bench_config.spec, false);
  bench->add_option("--cells", bench_config.cellCounts, "Comma-separated cell counts")->delimiter(',');
  bench->add_option("--reps", bench_config.repetitions, "Repetitions per path (median reported)")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  bench->add_option("--out", bench_out, "Output file (default: standard output)");
  bench_flags.add_to(*bench, false);

  // cost
  std::vector<std::uint64_t> cost_cells;
  CostParams cost_params{0, 5, 50, 10};
  std::string cost_in;
  std::string cost_out;
  auto* cost = app.add_subcommand("cost", "Evaluate the analytical cost formulas");
  auto* cost_cells_opt = cost->add_option("--cells", cost_cells, "Comma-separated cell counts")->delimiter(',');
  auto* cost_dims = cost->add_option("--dims", cost_params.dimensionCount, "Dimensions")->capture_default_str();
  auto* cost_nodes = cost->add_option("--nodes", cost_params.nodesPerDimension, "Nodes per dimension")->capture_default_str();
  auto* cost_attrs = cost->add_option("--attrs", cost_params.attrsPerNode, "Attributes per node")->capture_default_str();
  auto* cost_in_opt = cost->add_option("--in", cost_in, "Derive parameters from a warehouse directory");
  cost_in_opt->excludes(cost_cells_opt)->excludes(cost_dims)->excludes(cost_nodes)->excludes(cost_attrs);
  cost->add_option("--out", cost_out, "Output file (default: standard output)");

  std::vector<std::string> argv_storage;
  argv_storage.reserve(args.size() + 1);
  argv_storage.emplace_back("xjoin");
  argv_storage.insert(argv_storage.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& arg : argv_storage) {
    argv.push_back(arg.c_str());
  }

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*gen) {
      save_warehouse(generate(gen_spec), gen_out);
      err << "wrote " << gen_out << "/" << kDimensionsFile << " and " << gen_out << "/" << kFactsFile << '\n';
      return kExitOk;
    }

    if (*validate_cmd) {
      const auto warehouse = load_checked(validate_in, err);
      const auto report = validate(warehouse);
      out << "kind,locator,message\n";
      print_violations(report, out);
      return report.empty() ? kExitOk : kExitData;
    }

    if (*index_cmd) {
      const auto warehouse = load_checked(index_in, err);
      if (const auto report = validate(warehouse); !report.empty()) {
        print_violations(report, err);
        throw DataError("warehouse violates referential integrity");
      }
      const auto index = build_index(warehouse);
      with_output(index_out, out, [&index](std::ostream& stream) { serialize_index(index, stream); });
      return kExitOk;
    }

    if (*query_cmd) {
      if (query_in.empty() && query_index.empty()) {
        throw UsageError("query needs --in DIR or --index FILE");
      }
      if (query_path == "join" && query_in.empty()) {
        throw UsageError("--path join needs the warehouse directory (--in)");
      }
      const Query query = query_flags.to_query();
      std::vector<ResultRow> rows;
      if (!query_in.empty()) {
        const auto warehouse = load_checked(query_in, err);
        if (const auto report = validate(warehouse); !report.empty()) {
          print_violations(report, err);
          throw DataError("warehouse violates referential integrity");
        }
        rows = query_path == "join" ? execute_join_path(warehouse, query)
                                    : execute_index_path(build_index(warehouse), query);
      } else {
        auto parsed = load_index(query_index);
        print_diagnostics(parsed.diagnostics, err);
        if (!parsed.ok()) {
          throw DataError("cannot parse index '" + query_index + "'");
        }
        rows = execute_index_path(*parsed.value, query);
      }
      with_output(query_out, out, [&](std::ostream& stream) { stream << format_result_csv(query, rows); });
      return kExitOk;
    }

    if (*bench) {
      if (bench_flags.given()) {
        bench_config.query = bench_flags.to_query();
      }
      const auto report = run_benchmark(bench_config);
      with_output(bench_out, out, [&report](std::ostream& stream) { write_benchmark_csv(report, stream); });
      err << report.environmentNote << '\n';
      return kExitOk;
    }

    if (*cost) {
      std::vector<CostParams> params;
      if (!cost_in.empty()) {
        params.push_back(extract_cost_params(load_checked(cost_in, err)));
      } else {
        for (const auto cells : cost_cells) {
          CostParams p = cost_params;
          p.cellCount = cells;
          params.push_back(p);
        }
      }
      const auto rows = cost_sweep(params);
      with_output(cost_out, out, [&rows](std::ostream& stream) { write_cost_csv(rows, stream); });
      return kExitOk;
    }
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const IoError& e) {
    err << "I/O error: " << e.what() << '\n';
    return kExitIo;
  } catch (const DataError& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  } catch (const QueryError& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  } catch (const InvalidWarehouseError& e) {
    print_violations(e.report(), err);
    err << "error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::invalid_argument& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::overflow_error& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  }
  return kExitUsage;
}

}  // namespace xjoin
