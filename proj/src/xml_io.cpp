#include "xjoin/xml_io.hpp"

#include <fstream>
#include <sstream>
#include <utility>

#include "xjoin/xml_reader.hpp"

namespace xjoin {

std::string ParseDiagnostic::to_string() const {
  std::string text = severity == Severity::Fatal ? "error" : "warning";
  if (line > 0) {
    text += " (line " + std::to_string(line) + ", column " + std::to_string(column) + ")";
  }
  if (!path.empty()) {
    text += " at " + path;
  }
  return text + ": " + message;
}

namespace {

// Unwinds a parse after a fatal diagnostic has been recorded.
struct FatalParse {};

class DocumentParser {
 public:
  explicit DocumentParser(std::istream& input) : reader_(input) {}

  const xml::Event& next() {
    try {
      return reader_.next();
    } catch (const xml::SyntaxError& e) {
      diagnostics_.push_back(ParseDiagnostic{Severity::Fatal, e.what(), e.line(), e.column(), path_string()});
      throw FatalParse{};
    }
  }

  [[noreturn]] void fatal(const xml::Event& at, std::string message) {
    diagnostics_.push_back(ParseDiagnostic{Severity::Fatal, std::move(message), at.line, at.column, path_string()});
    throw FatalParse{};
  }

  void warn(const xml::Event& at, std::string message) {
    diagnostics_.push_back(ParseDiagnostic{Severity::Warning, std::move(message), at.line, at.column, path_string()});
  }

  /// Warns about an unexpected element and consumes it with its whole subtree.
  void skip_unknown(const xml::Event& start) {
    warn(start, "unknown element <" + start.name + "> skipped");
    std::size_t depth = 1;
    while (depth > 0) {
      const auto& event = next();
      if (event.kind == xml::EventKind::StartElement) {
        ++depth;
      } else if (event.kind == xml::EventKind::EndElement) {
        --depth;
      }
    }
  }

  void warn_unknown_attributes(const xml::Event& start, std::initializer_list<std::string_view> known) {
    for (const auto& attr : start.attributes) {
      bool is_known = false;
      for (const auto name : known) {
        is_known = is_known || attr.name == name;
      }
      if (!is_known) {
        warn(start, "unknown attribute '" + attr.name + "' on <" + start.name + "> ignored");
      }
    }
  }

  std::string required(const xml::Event& start, std::string_view name) {
    const auto* value = start.attribute(name);
    if (value == nullptr) {
      fatal(start, "<" + start.name + "> is missing required attribute '" + std::string(name) + "'");
    }
    return *value;
  }

  /// Reads the root start tag and checks its name.
  void expect_root(std::string_view root_name) {
    const auto& event = next();
    if (event.kind != xml::EventKind::StartElement || event.name != root_name) {
      fatal(event, "unexpected root <" + event.name + ">, expected <" + std::string(root_name) + ">");
    }
    warn_unknown_attributes(event, {});
    path_.emplace_back(root_name);
  }

  void expect_end_of_document() {
    const auto& event = next();
    if (event.kind != xml::EventKind::EndOfDocument) {
      fatal(event, "content after the root element");
    }
  }

  void push(std::string segment) { path_.push_back(std::move(segment)); }
  void pop() { path_.pop_back(); }

  std::vector<ParseDiagnostic>& diagnostics() { return diagnostics_; }
  const xml::Reader& reader() const { return reader_; }

 private:
  std::string path_string() const {
    std::string text;
    for (const auto& segment : path_) {
      if (!text.empty()) {
        text.push_back('/');
      }
      text += segment;
    }
    return text;
  }

  xml::Reader reader_;
  std::vector<ParseDiagnostic> diagnostics_;
  std::vector<std::string> path_;
};

using xml::EventKind;

AttributeKV parse_attribute_element(DocumentParser& parser, const xml::Event& start) {
  AttributeKV attribute{parser.required(start, "name"), parser.required(start, "value")};
  parser.warn_unknown_attributes(start, {"name", "value"});
  for (;;) {
    const auto& event = parser.next();
    if (event.kind == EventKind::EndElement) {
      return attribute;
    }
    if (event.kind == EventKind::StartElement) {
      parser.skip_unknown(event);
    } else {
      parser.warn(event, "unexpected text ignored");
    }
  }
}

DimensionNode parse_node(DocumentParser& parser, const xml::Event& start) {
  DimensionNode node{parser.required(start, "id"), {}};
  parser.warn_unknown_attributes(start, {"id"});
  parser.push("node[" + node.id + "]");
  for (;;) {
    const auto& event = parser.next();
    if (event.kind == EventKind::EndElement) {
      break;
    }
    if (event.kind == EventKind::StartElement && event.name == "attribute") {
      node.attributes.push_back(parse_attribute_element(parser, event));
    } else if (event.kind == EventKind::StartElement) {
      parser.skip_unknown(event);
    } else {
      parser.warn(event, "unexpected text ignored");
    }
  }
  parser.pop();
  return node;
}

Dimension parse_level(DocumentParser& parser, const xml::Event& start) {
  Dimension dimension{parser.required(start, "node"), {}};
  parser.warn_unknown_attributes(start, {"node"});
  parser.push("Level[" + dimension.name + "]");
  for (;;) {
    const auto& event = parser.next();
    if (event.kind == EventKind::EndElement) {
      break;
    }
    if (event.kind == EventKind::StartElement && event.name == "node") {
      dimension.nodes.push_back(parse_node(parser, event));
    } else if (event.kind == EventKind::StartElement) {
      parser.skip_unknown(event);
    } else {
      parser.warn(event, "unexpected text ignored");
    }
  }
  parser.pop();
  return dimension;
}

void parse_classification(DocumentParser& parser, const xml::Event& start, std::vector<Dimension>& out) {
  parser.warn_unknown_attributes(start, {});
  parser.push("classification");
  for (;;) {
    const auto& event = parser.next();
    if (event.kind == EventKind::EndElement) {
      break;
    }
    if (event.kind == EventKind::StartElement && event.name == "Level") {
      out.push_back(parse_level(parser, event));
    } else if (event.kind == EventKind::StartElement) {
      parser.skip_unknown(event);
    } else {
      parser.warn(event, "unexpected text ignored");
    }
  }
  parser.pop();
}

Measure parse_fact_element(DocumentParser& parser, const xml::Event& start) {
  auto id = parser.required(start, "id");
  const auto lexeme = parser.required(start, "value");
  parser.warn_unknown_attributes(start, {"id", "value"});
  auto measure = parse_measure(id, lexeme);
  if (!measure) {
    parser.fatal(start, "Fact '" + id + "' has non-numeric value '" + lexeme + "'");
  }
  for (;;) {
    const auto& event = parser.next();
    if (event.kind == EventKind::EndElement) {
      return std::move(*measure);
    }
    if (event.kind == EventKind::StartElement) {
      parser.skip_unknown(event);
    } else {
      parser.warn(event, "unexpected text ignored");
    }
  }
}

IndexDimension parse_cell_dimension(DocumentParser& parser, const xml::Event& start, CubeLayout layout) {
  IndexDimension dimension{parser.required(start, "id"), parser.required(start, "node"), {}};
  parser.warn_unknown_attributes(start, {"id", "node"});
  parser.push("dimension[" + dimension.dimensionName + "]");
  for (;;) {
    const auto& event = parser.next();
    if (event.kind == EventKind::EndElement) {
      break;
    }
    if (event.kind == EventKind::StartElement && event.name == "attribute" && layout == CubeLayout::Index) {
      dimension.attributes.push_back(parse_attribute_element(parser, event));
    } else if (event.kind == EventKind::StartElement) {
      parser.skip_unknown(event);
    } else {
      parser.warn(event, "unexpected text ignored");
    }
  }
  parser.pop();
  return dimension;
}

IndexCell parse_cell(DocumentParser& parser, const xml::Event& start, CubeLayout layout, std::size_t ordinal) {
  parser.warn_unknown_attributes(start, {});
  parser.push("Cell[" + std::to_string(ordinal) + "]");
  IndexCell cell;
  for (;;) {
    const auto& event = parser.next();
    if (event.kind == EventKind::EndElement) {
      if (cell.facts.empty()) {
        parser.fatal(event, "Cell has no Fact element");
      }
      break;
    }
    if (event.kind == EventKind::StartElement && event.name == "Fact") {
      cell.facts.push_back(parse_fact_element(parser, event));
    } else if (event.kind == EventKind::StartElement && event.name == "dimension") {
      cell.dimensions.push_back(parse_cell_dimension(parser, event, layout));
    } else if (event.kind == EventKind::StartElement) {
      parser.skip_unknown(event);
    } else {
      parser.warn(event, "unexpected text ignored");
    }
  }
  parser.pop();
  return cell;
}

FactCell to_fact_cell(IndexCell&& cell) {
  FactCell fact_cell;
  fact_cell.measures = std::move(cell.facts);
  fact_cell.dimensionRefs.reserve(cell.dimensions.size());
  for (auto& dimension : cell.dimensions) {
    fact_cell.dimensionRefs.push_back(DimensionRef{std::move(dimension.dimensionName), std::move(dimension.nodeId)});
  }
  return fact_cell;
}

// Canonical output ----------------------------------------------------------

constexpr std::string_view kDeclaration = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";

void write_attributes(std::ostream& out, const std::vector<AttributeKV>& attributes, std::string_view indent) {
  for (const auto& attribute : attributes) {
    out << indent << "<attribute name=\"" << xml::escape_attribute(attribute.name) << "\" value=\""
        << xml::escape_attribute(attribute.value) << "\"/>\n";
  }
}

void write_facts(std::ostream& out, const std::vector<Measure>& facts) {
  for (const auto& fact : facts) {
    out << "      <Fact id=\"" << xml::escape_attribute(fact.id) << "\" value=\"" << xml::escape_attribute(fact.lexeme)
        << "\"/>\n";
  }
}

template <typename CellRange, typename WriteCell>
void write_cube(std::ostream& out, const CellRange& cells, WriteCell write_cell) {
  out << kDeclaration << "<CubeFacts>\n";
  if (cells.empty()) {
    out << "  <cube/>\n";
  } else {
    out << "  <cube>\n";
    for (const auto& cell : cells) {
      out << "    <Cell>\n";
      write_cell(cell);
      out << "    </Cell>\n";
    }
    out << "  </cube>\n";
  }
  out << "</CubeFacts>\n";
}

template <typename T>
ParseResult<T> failed_result(DocumentParser& parser) {
  return ParseResult<T>{std::nullopt, std::move(parser.diagnostics())};
}

}  // namespace

// CubeCellReader ------------------------------------------------------------

struct CubeCellReader::State {
  State(std::istream& input, CubeLayout cube_layout) : parser(input), layout(cube_layout) {}

  DocumentParser parser;
  CubeLayout layout;
  bool started = false;
  bool in_cube = false;
  bool done = false;
  bool failed = false;
  std::size_t ordinal = 0;
};

CubeCellReader::CubeCellReader(std::istream& input, CubeLayout layout)
    : state_(std::make_unique<State>(input, layout)) {}

CubeCellReader::~CubeCellReader() = default;

bool CubeCellReader::failed() const noexcept { return state_->failed; }

const std::vector<ParseDiagnostic>& CubeCellReader::diagnostics() const noexcept {
  return state_->parser.diagnostics();
}

std::size_t CubeCellReader::peak_buffered_bytes() const noexcept { return state_->parser.reader().peak_buffered_bytes(); }

std::optional<IndexCell> CubeCellReader::next() {
  auto& s = *state_;
  if (s.done || s.failed) {
    return std::nullopt;
  }
  try {
    if (!s.started) {
      s.started = true;
      s.parser.expect_root("CubeFacts");
    }
    for (;;) {
      const auto& event = s.parser.next();
      if (!s.in_cube) {
        if (event.kind == EventKind::EndElement) {
          s.parser.pop();
          s.parser.expect_end_of_document();
          s.done = true;
          return std::nullopt;
        }
        if (event.kind == EventKind::StartElement && event.name == "cube") {
          s.parser.warn_unknown_attributes(event, {});
          s.parser.push("cube");
          s.in_cube = true;
        } else if (event.kind == EventKind::StartElement) {
          s.parser.skip_unknown(event);
        } else {
          s.parser.warn(event, "unexpected text ignored");
        }
        continue;
      }
      if (event.kind == EventKind::EndElement) {
        s.parser.pop();
        s.in_cube = false;
      } else if (event.kind == EventKind::StartElement && event.name == "Cell") {
        return parse_cell(s.parser, event, s.layout, s.ordinal++);
      } else if (event.kind == EventKind::StartElement) {
        s.parser.skip_unknown(event);
      } else {
        s.parser.warn(event, "unexpected text ignored");
      }
    }
  } catch (const FatalParse&) {
    s.failed = true;
    return std::nullopt;
  }
}

// Parsers -------------------------------------------------------------------

ParseResult<std::vector<Dimension>> parse_dimensions(std::istream& input) {
  DocumentParser parser(input);
  std::vector<Dimension> dimensions;
  try {
    parser.expect_root("dimensionData");
    for (;;) {
      const auto& event = parser.next();
      if (event.kind == EventKind::EndElement) {
        break;
      }
      if (event.kind == EventKind::StartElement && event.name == "classification") {
        parse_classification(parser, event, dimensions);
      } else if (event.kind == EventKind::StartElement) {
        parser.skip_unknown(event);
      } else {
        parser.warn(event, "unexpected text ignored");
      }
    }
    parser.pop();
    parser.expect_end_of_document();
  } catch (const FatalParse&) {
    return failed_result<std::vector<Dimension>>(parser);
  }
  return {std::move(dimensions), std::move(parser.diagnostics())};
}

ParseResult<std::vector<Dimension>> parse_dimensions(std::string_view document) {
  std::istringstream input{std::string(document)};
  return parse_dimensions(input);
}

ParseResult<std::vector<FactCell>> parse_facts(std::istream& input) {
  CubeCellReader reader(input, CubeLayout::Facts);
  std::vector<FactCell> cells;
  while (auto cell = reader.next()) {
    cells.push_back(to_fact_cell(std::move(*cell)));
  }
  auto diagnostics = reader.diagnostics();
  if (reader.failed()) {
    return {std::nullopt, std::move(diagnostics)};
  }
  return {std::move(cells), std::move(diagnostics)};
}

ParseResult<std::vector<FactCell>> parse_facts(std::string_view document) {
  std::istringstream input{std::string(document)};
  return parse_facts(input);
}

ParseResult<JoinIndex> parse_index(std::istream& input) {
  CubeCellReader reader(input, CubeLayout::Index);
  JoinIndex index;
  while (auto cell = reader.next()) {
    index.cells.push_back(std::move(*cell));
  }
  auto diagnostics = reader.diagnostics();
  if (reader.failed()) {
    return {std::nullopt, std::move(diagnostics)};
  }
  return {std::move(index), std::move(diagnostics)};
}

ParseResult<JoinIndex> parse_index(std::string_view document) {
  std::istringstream input{std::string(document)};
  return parse_index(input);
}

std::vector<ParseDiagnostic> check_well_formed(std::istream& input) {
  xml::Reader reader(input);
  try {
    while (reader.next().kind != EventKind::EndOfDocument) {
    }
  } catch (const xml::SyntaxError& e) {
    return {ParseDiagnostic{Severity::Fatal, e.what(), e.line(), e.column(), {}}};
  }
  return {};
}

// Serializers ---------------------------------------------------------------

void serialize_dimensions(const std::vector<Dimension>& dimensions, std::ostream& out) {
  out << kDeclaration << "<dimensionData>\n";
  if (dimensions.empty()) {
    out << "  <classification/>\n";
  } else {
    out << "  <classification>\n";
    for (const auto& dimension : dimensions) {
      out << "    <Level node=\"" << xml::escape_attribute(dimension.name) << '"';
      if (dimension.nodes.empty()) {
        out << "/>\n";
        continue;
      }
      out << ">\n";
      for (const auto& node : dimension.nodes) {
        out << "      <node id=\"" << xml::escape_attribute(node.id) << '"';
        if (node.attributes.empty()) {
          out << "/>\n";
          continue;
        }
        out << ">\n";
        write_attributes(out, node.attributes, "        ");
        out << "      </node>\n";
      }
      out << "    </Level>\n";
    }
    out << "  </classification>\n";
  }
  out << "</dimensionData>\n";
}

void serialize_facts(const std::vector<FactCell>& cells, std::ostream& out) {
  write_cube(out, cells, [&out](const FactCell& cell) {
    write_facts(out, cell.measures);
    for (const auto& ref : cell.dimensionRefs) {
      out << "      <dimension id=\"" << xml::escape_attribute(ref.dimensionName) << "\" node=\""
          << xml::escape_attribute(ref.nodeId) << "\"/>\n";
    }
  });
}

void serialize_index(const JoinIndex& index, std::ostream& out) {
  write_cube(out, index.cells, [&out](const IndexCell& cell) {
    write_facts(out, cell.facts);
    for (const auto& dimension : cell.dimensions) {
      out << "      <dimension id=\"" << xml::escape_attribute(dimension.dimensionName) << "\" node=\""
          << xml::escape_attribute(dimension.nodeId) << '"';
      if (dimension.attributes.empty()) {
        out << "/>\n";
        continue;
      }
      out << ">\n";
      write_attributes(out, dimension.attributes, "        ");
      out << "      </dimension>\n";
    }
  });
}

std::string serialize_dimensions(const std::vector<Dimension>& dimensions) {
  std::ostringstream out;
  serialize_dimensions(dimensions, out);
  return std::move(out).str();
}

std::string serialize_facts(const std::vector<FactCell>& cells) {
  std::ostringstream out;
  serialize_facts(cells, out);
  return std::move(out).str();
}

std::string serialize_index(const JoinIndex& index) {
  std::ostringstream out;
  serialize_index(index, out);
  return std::move(out).str();
}

// Files ---------------------------------------------------------------------

namespace {

std::ifstream open_input(const std::filesystem::path& file) {
  std::ifstream input(file, std::ios::binary);
  if (!input) {
    throw IoError("cannot open '" + file.string() + "' for reading");
  }
  return input;
}

void tag_file(std::vector<ParseDiagnostic>& diagnostics, std::string_view file) {
  for (auto& diagnostic : diagnostics) {
    diagnostic.path = diagnostic.path.empty() ? std::string(file) : std::string(file) + ":" + diagnostic.path;
  }
}

}  // namespace

ParseResult<Warehouse> load_warehouse(const std::filesystem::path& directory) {
  ParseResult<Warehouse> result;

  const auto schema_path = directory / kSchemaFile;
  if (std::filesystem::exists(schema_path)) {
    auto input = open_input(schema_path);
    auto diagnostics = check_well_formed(input);
    tag_file(diagnostics, kSchemaFile);
    result.diagnostics = std::move(diagnostics);
  }

  auto dimensions_input = open_input(directory / kDimensionsFile);
  auto dimensions = parse_dimensions(dimensions_input);
  tag_file(dimensions.diagnostics, kDimensionsFile);
  result.diagnostics.insert(result.diagnostics.end(), dimensions.diagnostics.begin(), dimensions.diagnostics.end());

  auto facts_input = open_input(directory / kFactsFile);
  auto facts = parse_facts(facts_input);
  tag_file(facts.diagnostics, kFactsFile);
  result.diagnostics.insert(result.diagnostics.end(), facts.diagnostics.begin(), facts.diagnostics.end());

  if (dimensions.ok() && facts.ok() && !result.has_fatal()) {
    result.value = Warehouse{std::move(*dimensions.value), std::move(*facts.value)};
  }
  return result;
}

ParseResult<JoinIndex> load_index(const std::filesystem::path& file) {
  auto input = open_input(file);
  auto result = parse_index(input);
  tag_file(result.diagnostics, file.filename().string());
  return result;
}

void save_warehouse(const Warehouse& warehouse, const std::filesystem::path& directory) {
  std::error_code ec;
  std::filesystem::create_directories(directory, ec);
  if (ec) {
    throw IoError("cannot create directory '" + directory.string() + "': " + ec.message());
  }
  auto write = [](const std::filesystem::path& file, auto&& emit) {
    std::ofstream output(file, std::ios::binary | std::ios::trunc);
    if (!output) {
      throw IoError("cannot open '" + file.string() + "' for writing");
    }
    emit(output);
    output.flush();
    if (!output) {
      throw IoError("failed writing '" + file.string() + "'");
    }
  };
  write(directory / kDimensionsFile, [&](std::ostream& out) { serialize_dimensions(warehouse.dimensions, out); });
  write(directory / kFactsFile, [&](std::ostream& out) { serialize_facts(warehouse.cells, out); });
}

}  // namespace xjoin
