#pragma once

#include <cstddef>
#include <istream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace xjoin::xml {

struct Attribute {
  std::string name;
  std::string value;
};

enum class EventKind { StartElement, EndElement, Text, EndOfDocument };

struct Event {
  EventKind kind = EventKind::EndOfDocument;
  std::string name;                  // element name for start/end events
  std::vector<Attribute> attributes;  // start events only
  std::string text;                  // text events only (entity-decoded)
  std::size_t line = 0;
  std::size_t column = 0;

  /// Value of the named attribute, or nullptr.
  const std::string* attribute(std::string_view attribute_name) const;
};

class SyntaxError : public std::runtime_error {
 public:
  SyntaxError(const std::string& message, std::size_t line, std::size_t column);

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

/*
 * Minimal non-validating pull parser.
 *
 * Reads the input in fixed-size chunks and materializes one event at a time,
 * so memory use is bounded by the chunk size plus the largest single tag or
 * text run, independent of the document size.
 *
 * Supported: XML declaration, processing instructions, comments, CDATA,
 * the five predefined entities and numeric character references. A DOCTYPE
 * is skipped without interpretation. Whitespace-only text is not reported.
 * Self-closing tags produce a StartElement followed by an EndElement.
 *
 * Malformed input raises SyntaxError.
 */
class Reader {
 public:
  explicit Reader(std::istream& input, std::size_t chunk_size = 64 * 1024);

  /// Advances to the next event. The returned reference stays valid until the next call.
  const Event& next();

  /// Number of currently open elements.
  std::size_t depth() const noexcept { return open_.size(); }

  /// High-water mark of bytes held by the reader (chunk buffer plus current event).
  std::size_t peak_buffered_bytes() const noexcept { return peak_bytes_; }

 private:
  int peek();
  int get();
  void expect(char c);
  void expect_literal(std::string_view literal);
  bool refill();
  [[noreturn]] void fail(const std::string& message) const;

  void read_name(std::string& out);
  void skip_whitespace();
  void read_attribute_value(std::string& out);
  void append_reference(std::string& out);
  void skip_until(std::string_view terminator);
  void skip_doctype();
  bool read_markup();  // true when an event was produced
  void read_start_tag();
  void read_end_tag();
  void read_cdata();
  void track_peak();

  std::istream& input_;
  std::vector<char> buffer_;
  std::size_t pos_ = 0;
  std::size_t end_ = 0;
  bool eof_ = false;

  std::size_t line_ = 1;
  std::size_t column_ = 1;

  std::vector<std::string> open_;
  bool root_seen_ = false;
  bool root_closed_ = false;
  bool pending_end_ = false;
  bool at_start_ = true;

  Event event_;
  std::size_t peak_bytes_ = 0;
};

/// Escapes text for use inside a double-quoted attribute value.
std::string escape_attribute(std::string_view text);

}  // namespace xjoin::xml
