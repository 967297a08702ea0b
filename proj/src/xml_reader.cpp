#include "xjoin/xml_reader.hpp"

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <utility>

namespace xjoin::xml {

namespace {

bool is_space(int c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; }

bool is_name_start(int c) {
  return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || c == '_' || c == ':' || c >= 0x80;
}

bool is_name_char(int c) { return is_name_start(c) || (c >= '0' && c <= '9') || c == '-' || c == '.'; }

bool all_space(std::string_view text) {
  return std::all_of(text.begin(), text.end(), [](char c) { return is_space(static_cast<unsigned char>(c)); });
}

void append_utf8(std::string& out, std::uint32_t code_point) {
  if (code_point < 0x80) {
    out.push_back(static_cast<char>(code_point));
  } else if (code_point < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (code_point >> 6)));
    out.push_back(static_cast<char>(0x80 | (code_point & 0x3F)));
  } else if (code_point < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (code_point >> 12)));
    out.push_back(static_cast<char>(0x80 | ((code_point >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (code_point & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (code_point >> 18)));
    out.push_back(static_cast<char>(0x80 | ((code_point >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((code_point >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (code_point & 0x3F)));
  }
}

}  // namespace

const std::string* Event::attribute(std::string_view attribute_name) const {
  for (const auto& attr : attributes) {
    if (attr.name == attribute_name) {
      return &attr.value;
    }
  }
  return nullptr;
}

SyntaxError::SyntaxError(const std::string& message, std::size_t line, std::size_t column)
    : std::runtime_error(message + " at line " + std::to_string(line) + ", column " + std::to_string(column)),
      line_(line),
      column_(column) {}

Reader::Reader(std::istream& input, std::size_t chunk_size) : input_(input), buffer_(std::max<std::size_t>(chunk_size, 16)) {}

bool Reader::refill() {
  if (eof_) {
    return false;
  }
  input_.read(buffer_.data(), static_cast<std::streamsize>(buffer_.size()));
  end_ = static_cast<std::size_t>(input_.gcount());
  pos_ = 0;
  if (end_ == 0) {
    eof_ = true;
    return false;
  }
  return true;
}

int Reader::peek() {
  if (pos_ == end_ && !refill()) {
    return -1;
  }
  return static_cast<unsigned char>(buffer_[pos_]);
}

int Reader::get() {
  const int c = peek();
  if (c < 0) {
    return c;
  }
  ++pos_;
  if (c == '\n') {
    ++line_;
    column_ = 1;
  } else {
    ++column_;
  }
  return c;
}

void Reader::fail(const std::string& message) const { throw SyntaxError(message, line_, column_); }

void Reader::expect(char c) {
  const int got = get();
  if (got != static_cast<unsigned char>(c)) {
    fail(got < 0 ? std::string("unexpected end of document, expected '") + c + "'"
                 : std::string("expected '") + c + "'");
  }
}

void Reader::expect_literal(std::string_view literal) {
  for (const char c : literal) {
    expect(c);
  }
}

void Reader::skip_whitespace() {
  while (is_space(peek())) {
    get();
  }
}

void Reader::read_name(std::string& out) {
  out.clear();
  if (!is_name_start(peek())) {
    fail("expected a name");
  }
  while (is_name_char(peek())) {
    out.push_back(static_cast<char>(get()));
  }
}

void Reader::append_reference(std::string& out) {
  // '&' already consumed.
  std::string entity;
  for (;;) {
    const int c = get();
    if (c < 0) {
      fail("unterminated entity reference");
    }
    if (c == ';') {
      break;
    }
    entity.push_back(static_cast<char>(c));
    if (entity.size() > 16) {
      fail("entity reference too long");
    }
  }
  if (entity == "lt") {
    out.push_back('<');
  } else if (entity == "gt") {
    out.push_back('>');
  } else if (entity == "amp") {
    out.push_back('&');
  } else if (entity == "quot") {
    out.push_back('"');
  } else if (entity == "apos") {
    out.push_back('\'');
  } else if (entity.size() > 1 && entity[0] == '#') {
    const bool hex = entity[1] == 'x';
    const std::string_view digits = std::string_view(entity).substr(hex ? 2 : 1);
    std::uint32_t code_point = 0;
    const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), code_point, hex ? 16 : 10);
    if (digits.empty() || ec != std::errc{} || ptr != digits.data() + digits.size() || code_point == 0 ||
        code_point > 0x10FFFF) {
      fail("invalid character reference '&" + entity + ";'");
    }
    append_utf8(out, code_point);
  } else {
    fail("unknown entity '&" + entity + ";'");
  }
}

void Reader::read_attribute_value(std::string& out) {
  out.clear();
  const int quote = get();
  if (quote != '"' && quote != '\'') {
    fail("expected quoted attribute value");
  }
  for (;;) {
    const int c = get();
    if (c < 0) {
      fail("unterminated attribute value");
    }
    if (c == quote) {
      return;
    }
    if (c == '<') {
      fail("'<' inside attribute value");
    }
    if (c == '&') {
      append_reference(out);
    } else if (c == '\r') {
      if (peek() == '\n') {
        get();
      }
      out.push_back(' ');
    } else if (c == '\n' || c == '\t') {
      out.push_back(' ');
    } else {
      out.push_back(static_cast<char>(c));
    }
  }
}

void Reader::skip_until(std::string_view terminator) {
  std::size_t matched = 0;
  while (matched < terminator.size()) {
    const int c = get();
    if (c < 0) {
      fail("unexpected end of document, expected '" + std::string(terminator) + "'");
    }
    if (c == static_cast<unsigned char>(terminator[matched])) {
      ++matched;
    } else {
      matched = (c == static_cast<unsigned char>(terminator[0])) ? 1 : 0;
    }
  }
}

void Reader::skip_doctype() {
  int bracket_depth = 0;
  for (;;) {
    const int c = get();
    if (c < 0) {
      fail("unterminated DOCTYPE");
    }
    if (c == '[') {
      ++bracket_depth;
    } else if (c == ']') {
      --bracket_depth;
    } else if (c == '>' && bracket_depth <= 0) {
      return;
    }
  }
}

void Reader::read_start_tag() {
  if (root_closed_) {
    fail("content after the root element");
  }
  event_.kind = EventKind::StartElement;
  event_.text.clear();
  event_.attributes.clear();
  read_name(event_.name);
  for (;;) {
    const bool had_space = is_space(peek());
    skip_whitespace();
    const int c = peek();
    if (c == '/') {
      get();
      expect('>');
      pending_end_ = true;
      break;
    }
    if (c == '>') {
      get();
      break;
    }
    if (c < 0) {
      fail("unexpected end of document inside a tag");
    }
    if (!had_space) {
      fail("expected whitespace before attribute");
    }
    Attribute attr;
    read_name(attr.name);
    skip_whitespace();
    expect('=');
    skip_whitespace();
    read_attribute_value(attr.value);
    if (event_.attribute(attr.name) != nullptr) {
      fail("duplicate attribute '" + attr.name + "'");
    }
    event_.attributes.push_back(std::move(attr));
  }
  root_seen_ = true;
  open_.push_back(event_.name);
}

void Reader::read_end_tag() {
  event_.kind = EventKind::EndElement;
  event_.attributes.clear();
  event_.text.clear();
  read_name(event_.name);
  skip_whitespace();
  expect('>');
  if (open_.empty() || open_.back() != event_.name) {
    fail("mismatched end tag '</" + event_.name + ">'");
  }
  open_.pop_back();
  if (open_.empty()) {
    root_closed_ = true;
  }
}

void Reader::read_cdata() {
  // "<![CDATA[" already consumed.
  event_.kind = EventKind::Text;
  event_.name.clear();
  event_.attributes.clear();
  event_.text.clear();
  for (;;) {
    const int c = get();
    if (c < 0) {
      fail("unterminated CDATA section");
    }
    event_.text.push_back(static_cast<char>(c));
    if (c == '>' && std::string_view(event_.text).ends_with("]]>")) {
      event_.text.resize(event_.text.size() - 3);
      return;
    }
  }
}

bool Reader::read_markup() {
  // '<' already consumed.
  const int c = peek();
  if (c == '?') {
    get();
    skip_until("?>");
    return false;
  }
  if (c == '!') {
    get();
    if (peek() == '-') {
      expect_literal("--");
      skip_until("-->");
      return false;
    }
    if (peek() == '[') {
      expect_literal("[CDATA[");
      if (open_.empty()) {
        fail("CDATA outside the root element");
      }
      read_cdata();
      return true;
    }
    expect_literal("DOCTYPE");
    if (root_seen_) {
      fail("DOCTYPE after the root element");
    }
    skip_doctype();
    return false;
  }
  if (c == '/') {
    get();
    read_end_tag();
    return true;
  }
  read_start_tag();
  return true;
}

void Reader::track_peak() {
  std::size_t bytes = buffer_.size() + event_.name.size() + event_.text.size();
  for (const auto& attr : event_.attributes) {
    bytes += attr.name.size() + attr.value.size();
  }
  peak_bytes_ = std::max(peak_bytes_, bytes);
}

const Event& Reader::next() {
  if (at_start_) {
    at_start_ = false;
    // UTF-8 byte order mark.
    if (peek() == 0xEF) {
      get();
      if (get() != 0xBB || get() != 0xBF) {
        fail("invalid byte order mark");
      }
    }
  }
  if (pending_end_) {
    pending_end_ = false;
    event_.kind = EventKind::EndElement;
    event_.attributes.clear();
    open_.pop_back();
    if (open_.empty()) {
      root_closed_ = true;
    }
    return event_;
  }
  for (;;) {
    const std::size_t line = line_;
    const std::size_t column = column_;
    const int c = peek();
    if (c < 0) {
      if (!open_.empty()) {
        fail("unexpected end of document, '<" + open_.back() + ">' is not closed");
      }
      if (!root_seen_) {
        fail("document has no root element");
      }
      event_ = Event{};
      event_.line = line;
      event_.column = column;
      return event_;
    }
    if (c == '<') {
      get();
      if (read_markup()) {
        event_.line = line;
        event_.column = column;
        track_peak();
        return event_;
      }
      continue;
    }
    event_.kind = EventKind::Text;
    event_.name.clear();
    event_.attributes.clear();
    event_.text.clear();
    while (peek() >= 0 && peek() != '<') {
      const int t = get();
      if (t == '&') {
        append_reference(event_.text);
      } else {
        event_.text.push_back(static_cast<char>(t));
      }
    }
    if (all_space(event_.text)) {
      continue;
    }
    if (open_.empty()) {
      fail("text outside the root element");
    }
    event_.line = line;
    event_.column = column;
    track_peak();
    return event_;
  }
}

std::string escape_attribute(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (const char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\t': out += "&#9;"; break;
      case '\n': out += "&#10;"; break;
      case '\r': out += "&#13;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

}  // namespace xjoin::xml
