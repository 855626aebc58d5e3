#include "csv.hpp"

#include <string>

#include "reqrec/error.hpp"

namespace reqrec::csv {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t");
  return std::string(s.substr(first, last - first + 1));
}

[[noreturn]] void fail(std::size_t line, const std::string& what) {
  throw Error(ErrorCode::kParseError, "line " + std::to_string(line) + ": " + what);
}

std::vector<std::string> split(std::string_view text, std::size_t line) {
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  bool was_quoted = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field.push_back(c);
      }
    } else if (c == '"') {
      if (!trim(field).empty()) fail(line, "quote inside an unquoted field");
      field.clear();
      quoted = true;
      was_quoted = true;
    } else if (c == ',') {
      fields.push_back(was_quoted ? field : trim(field));
      field.clear();
      was_quoted = false;
    } else if (was_quoted) {
      if (c != ' ' && c != '\t') fail(line, "text after a closing quote");
    } else {
      field.push_back(c);
    }
  }
  if (quoted) fail(line, "unterminated quoted field");
  fields.push_back(was_quoted ? field : trim(field));
  return fields;
}

}  // namespace

std::optional<Record> Reader::next() {
  std::string text;
  while (std::getline(in_, text)) {
    ++line_;
    if (!text.empty() && text.back() == '\r') text.pop_back();
    if (line_ == 1 && text.starts_with("\xEF\xBB\xBF")) text.erase(0, 3);
    if (trim(text).empty()) continue;
    return Record{line_, split(text, line_)};
  }
  return std::nullopt;
}

Header::Header(const Record& record) : width_(record.fields.size()), line_(record.line) {
  for (std::size_t i = 0; i < record.fields.size(); ++i) {
    if (!columns_.emplace(record.fields[i], i).second) {
      fail(record.line, "duplicate column '" + record.fields[i] + "'");
    }
  }
}

std::optional<std::size_t> Header::find(std::string_view name) const {
  auto it = columns_.find(name);
  if (it == columns_.end()) return std::nullopt;
  return it->second;
}

std::size_t Header::require(std::string_view name) const {
  auto pos = find(name);
  if (!pos) fail(line_, "missing column '" + std::string(name) + "'");
  return *pos;
}

void write_field(std::ostream& out, std::string_view field) {
  const bool needs_quotes = field.find_first_of(",\"\r\n") != std::string_view::npos ||
                            (!field.empty() && (field.front() == ' ' || field.back() == ' '));
  if (!needs_quotes) {
    out << field;
    return;
  }
  out << '"';
  for (char c : field) {
    if (c == '"') out << '"';
    out << c;
  }
  out << '"';
}

void write_row(std::ostream& out, const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i > 0) out << ',';
    write_field(out, fields[i]);
  }
  out << '\n';
}

}  // namespace reqrec::csv
