#include "csv.hpp"

#include "confokit/errors.hpp"

namespace confokit::detail {

namespace {

struct Cursor {
  std::string_view text;
  std::size_t pos = 0;
  std::size_t line = 1;

  bool done() const { return pos >= text.size(); }
  char peek() const { return text[pos]; }
  char take() {
    char c = text[pos++];
    if (c == '\n') ++line;
    return c;
  }
};

// Reads one row; returns false at end of input.
bool read_row(Cursor& cur, std::vector<std::string>& fields, std::size_t& start_line) {
  if (cur.done()) return false;
  start_line = cur.line;
  fields.clear();
  std::string field;
  bool quoted = false;
  while (true) {
    if (cur.done()) {
      fields.push_back(std::move(field));
      return true;
    }
    char c = cur.take();
    if (quoted) {
      if (c == '"') {
        if (!cur.done() && cur.peek() == '"') {
          field.push_back('"');
          cur.take();
        } else {
          quoted = false;
        }
      } else {
        field.push_back(c);
      }
    } else if (c == '"') {
      if (!field.empty()) throw parse_error("quote inside unquoted field at line " + std::to_string(cur.line), cur.pos);
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(field));
      field.clear();
    } else if (c == '\r') {
      if (!cur.done() && cur.peek() == '\n') cur.take();
      fields.push_back(std::move(field));
      return true;
    } else if (c == '\n') {
      fields.push_back(std::move(field));
      return true;
    } else {
      field.push_back(c);
    }
  }
}

}  // namespace

CsvTable parse_csv_table(std::string_view text) {
  CsvTable table;
  Cursor cur{text};

  // Leading comment lines carry file-level directives (e.g. vocabulary
  // extensions for task catalogs); they are not part of the table.
  while (!cur.done() && cur.peek() == '#') {
    std::string line;
    while (!cur.done()) {
      char c = cur.take();
      if (c == '\n') break;
      if (c != '\r') line.push_back(c);
    }
    table.leading_comments.push_back(std::move(line));
  }

  std::vector<std::string> fields;
  std::size_t line = 0;
  if (!read_row(cur, fields, line)) return table;
  table.header = fields;

  while (read_row(cur, fields, line)) {
    if (fields.size() == 1 && fields[0].empty()) continue;  // blank line
    if (fields.size() != table.header.size())
      throw parse_error("row at line " + std::to_string(line) + " has " + std::to_string(fields.size()) +
                            " fields, header has " + std::to_string(table.header.size()),
                        cur.pos);
    table.rows.push_back(fields);
    table.row_lines.push_back(line);
  }
  return table;
}

void append_csv_row(std::string& out, const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out.push_back(',');
    const std::string& f = fields[i];
    bool needs_quote = f.find_first_of(",\"\r\n") != std::string::npos;
    if (!needs_quote) {
      out += f;
      continue;
    }
    out.push_back('"');
    for (char c : f) {
      if (c == '"') out.push_back('"');
      out.push_back(c);
    }
    out.push_back('"');
  }
  out.push_back('\n');
}

}  // namespace confokit::detail
