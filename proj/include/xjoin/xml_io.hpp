#pragma once

#include <cstddef>
#include <filesystem>
#include <istream>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "xjoin/warehouse.hpp"

namespace xjoin {

enum class Severity { Warning, Fatal };

struct ParseDiagnostic {
  Severity severity = Severity::Fatal;
  std::string message;
  std::size_t line = 0;
  std::size_t column = 0;
  std::string path;  // element path, e.g. "CubeFacts/cube/Cell[2]/Fact"

  std::string to_string() const;
};

/// A parse outcome. A fatal diagnostic always means `value` is empty.
template <typename T>
struct ParseResult {
  std::optional<T> value;
  std::vector<ParseDiagnostic> diagnostics;

  bool ok() const noexcept { return value.has_value(); }

  bool has_fatal() const noexcept {
    for (const auto& diagnostic : diagnostics) {
      if (diagnostic.severity == Severity::Fatal) {
        return true;
      }
    }
    return false;
  }
};

// Dimensions.xml: dimensionData/classification/Level[@node]/node[@id]/attribute[@name,@value]
ParseResult<std::vector<Dimension>> parse_dimensions(std::istream& input);
ParseResult<std::vector<Dimension>> parse_dimensions(std::string_view document);

// TableFacts.xml: CubeFacts/cube/Cell/{Fact[@id,@value], dimension[@id,@node]}
ParseResult<std::vector<FactCell>> parse_facts(std::istream& input);
ParseResult<std::vector<FactCell>> parse_facts(std::string_view document);

// Index.xml: same layout as TableFacts.xml plus attribute children under each dimension.
ParseResult<JoinIndex> parse_index(std::istream& input);
ParseResult<JoinIndex> parse_index(std::string_view document);

/// Checks well-formedness only (used for Schema.xml, whose contents are ignored).
std::vector<ParseDiagnostic> check_well_formed(std::istream& input);

void serialize_dimensions(const std::vector<Dimension>& dimensions, std::ostream& output);
void serialize_facts(const std::vector<FactCell>& cells, std::ostream& output);
void serialize_index(const JoinIndex& index, std::ostream& output);

std::string serialize_dimensions(const std::vector<Dimension>& dimensions);
std::string serialize_facts(const std::vector<FactCell>& cells);
std::string serialize_index(const JoinIndex& index);

enum class CubeLayout { Facts, Index };

/*
 * Streaming reader over a CubeFacts document. Holds at most one cell in memory.
 * In Facts layout, `attribute` children of `dimension` elements are reported as
 * unknown and dropped.
 */
class CubeCellReader {
 public:
  CubeCellReader(std::istream& input, CubeLayout layout);
  ~CubeCellReader();
  CubeCellReader(const CubeCellReader&) = delete;
  CubeCellReader& operator=(const CubeCellReader&) = delete;

  /// Next cell in document order; nullopt at the end of the cube or after a fatal error.
  std::optional<IndexCell> next();

  bool failed() const noexcept;
  const std::vector<ParseDiagnostic>& diagnostics() const noexcept;

  /// Peak bytes held by the underlying XML reader.
  std::size_t peak_buffered_bytes() const noexcept;

 private:
  struct State;
  std::unique_ptr<State> state_;
};

inline constexpr std::string_view kDimensionsFile = "Dimensions.xml";
inline constexpr std::string_view kFactsFile = "TableFacts.xml";
inline constexpr std::string_view kSchemaFile = "Schema.xml";
inline constexpr std::string_view kIndexFile = "Index.xml";

/// Thrown when a warehouse file cannot be opened or written.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Reads Dimensions.xml and TableFacts.xml (and checks Schema.xml if present) from `directory`.
ParseResult<Warehouse> load_warehouse(const std::filesystem::path& directory);

ParseResult<JoinIndex> load_index(const std::filesystem::path& file);

/// Writes Dimensions.xml and TableFacts.xml into `directory`, creating it if needed.
void save_warehouse(const Warehouse& warehouse, const std::filesystem::path& directory);

}  // namespace xjoin
