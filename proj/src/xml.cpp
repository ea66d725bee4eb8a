#include "xml.hpp"

#include <cstdlib>

#include "confokit/errors.hpp"

namespace confokit::detail {

namespace {

struct Reader {
  std::string_view text;
  std::size_t pos = 0;

  bool done() const { return pos >= text.size(); }
  char peek() const { return text[pos]; }
  bool starts_with(std::string_view s) const { return text.substr(pos, s.size()) == s; }

  [[noreturn]] void fail(const std::string& message) const { throw parse_error(message, pos); }

  void skip_whitespace() {
    while (!done() && (peek() == ' ' || peek() == '\t' || peek() == '\r' || peek() == '\n')) ++pos;
  }

  void expect(char c) {
    if (done() || peek() != c) fail(std::string("expected '") + c + "'");
    ++pos;
  }

  void skip_until(std::string_view terminator) {
    std::size_t found = text.find(terminator, pos);
    if (found == std::string_view::npos) fail("unterminated construct");
    pos = found + terminator.size();
  }

  static bool name_char(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == ':' ||
           c == '_' || c == '-' || c == '.';
  }

  std::string read_name() {
    std::size_t start = pos;
    while (!done() && name_char(peek())) ++pos;
    if (pos == start) fail("expected a name");
    return std::string(text.substr(start, pos - start));
  }

  std::string read_attribute_value() {
    if (done() || (peek() != '"' && peek() != '\'')) fail("expected quoted attribute value");
    char quote = text[pos++];
    std::string value;
    while (true) {
      if (done()) fail("unterminated attribute value");
      char c = text[pos];
      if (c == quote) {
        ++pos;
        return value;
      }
      if (c == '&') {
        value += read_entity();
      } else {
        value.push_back(c);
        ++pos;
      }
    }
  }

  std::string read_entity() {
    std::size_t semi = text.find(';', pos);
    if (semi == std::string_view::npos || semi - pos > 8) fail("malformed entity");
    std::string_view entity = text.substr(pos + 1, semi - pos - 1);
    pos = semi + 1;
    if (entity == "amp") return "&";
    if (entity == "lt") return "<";
    if (entity == "gt") return ">";
    if (entity == "quot") return "\"";
    if (entity == "apos") return "'";
    if (!entity.empty() && entity[0] == '#') {
      long code = entity[1] == 'x' || entity[1] == 'X'
                      ? std::strtol(std::string(entity.substr(2)).c_str(), nullptr, 16)
                      : std::strtol(std::string(entity.substr(1)).c_str(), nullptr, 10);
      if (code <= 0 || code > 0x10FFFF) fail("bad character reference");
      // UTF-8 encode.
      std::string out;
      if (code < 0x80) {
        out.push_back(static_cast<char>(code));
      } else if (code < 0x800) {
        out.push_back(static_cast<char>(0xC0 | (code >> 6)));
        out.push_back(static_cast<char>(0x80 | (code & 0x3F)));
      } else if (code < 0x10000) {
        out.push_back(static_cast<char>(0xE0 | (code >> 12)));
        out.push_back(static_cast<char>(0x80 | ((code >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (code & 0x3F)));
      } else {
        out.push_back(static_cast<char>(0xF0 | (code >> 18)));
        out.push_back(static_cast<char>(0x80 | ((code >> 12) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | ((code >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (code & 0x3F)));
      }
      return out;
    }
    fail("unknown entity '" + std::string(entity) + "'");
  }

  // Positioned just after the '<' of a start tag whose name is already read.
  XmlNode read_element(std::string name, std::size_t open_offset) {
    XmlNode node;
    node.name = std::move(name);
    node.byte_offset = open_offset;
    while (true) {
      skip_whitespace();
      if (done()) fail("unterminated start tag");
      if (peek() == '/') {
        ++pos;
        expect('>');
        return node;  // self-closing
      }
      if (peek() == '>') {
        ++pos;
        break;
      }
      std::string key = read_name();
      skip_whitespace();
      expect('=');
      skip_whitespace();
      node.attributes.emplace_back(std::move(key), read_attribute_value());
    }
    // Content: child elements until the matching end tag; text is skipped.
    while (true) {
      if (done()) fail("missing end tag for <" + node.name + ">");
      if (peek() != '<') {
        ++pos;
        continue;
      }
      std::size_t element_offset = pos;
      ++pos;
      if (starts_with("!--")) {
        skip_until("-->");
        continue;
      }
      if (starts_with("![CDATA[")) {
        skip_until("]]>");
        continue;
      }
      if (peek() == '/') {
        ++pos;
        std::string closing = read_name();
        if (closing != node.name)
          fail("mismatched end tag </" + closing + ">, expected </" + node.name + ">");
        skip_whitespace();
        expect('>');
        return node;
      }
      std::string child_name = read_name();
      node.children.push_back(read_element(std::move(child_name), element_offset));
    }
  }
};

}  // namespace

XmlNode parse_xml(std::string_view text) {
  Reader reader{text};
  if (reader.starts_with("\xEF\xBB\xBF")) reader.pos = 3;  // UTF-8 BOM
  while (true) {
    reader.skip_whitespace();
    if (reader.done()) reader.fail("document has no root element");
    if (reader.peek() != '<') reader.fail("expected '<'");
    std::size_t offset = reader.pos;
    ++reader.pos;
    if (reader.starts_with("?")) {
      reader.skip_until("?>");
      continue;
    }
    if (reader.starts_with("!--")) {
      reader.skip_until("-->");
      continue;
    }
    if (reader.starts_with("!")) {
      reader.skip_until(">");
      continue;
    }
    std::string name = reader.read_name();
    XmlNode root = reader.read_element(std::move(name), offset);
    reader.skip_whitespace();
    if (!reader.done()) reader.fail("content after the root element");
    return root;
  }
}

}  // namespace confokit::detail
