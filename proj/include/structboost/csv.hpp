#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "structboost/errors.hpp"

namespace structboost::csv {

// Comma-separated, double-quote escaped, header row required. A record ends
// at LF or CRLF outside quotes; a trailing newline does not start a record.
struct Record {
  std::size_t line = 0;  // 1-based line where the record starts
  std::vector<std::string> cells;
};

inline std::vector<Record> parse(std::string_view text) {
  std::vector<Record> out;
  if (text.size() >= 3 && text.substr(0, 3) == "\xEF\xBB\xBF") text.remove_prefix(3);
  std::size_t i = 0, line = 1;
  while (i < text.size()) {
    // Blank lines carry no record.
    if (text[i] == '\n' || (text[i] == '\r' && i + 1 < text.size() && text[i + 1] == '\n')) {
      i += text[i] == '\r' ? 2 : 1;
      ++line;
      continue;
    }
    Record rec;
    rec.line = line;
    std::string cell;
    bool done = false;
    while (!done) {
      cell.clear();
      if (i < text.size() && text[i] == '"') {
        ++i;
        while (true) {
          if (i >= text.size()) throw ParseError("line " + std::to_string(rec.line) + ": unterminated quoted cell");
          const char c = text[i++];
          if (c == '"') {
            if (i < text.size() && text[i] == '"') {
              cell += '"';
              ++i;
            } else {
              break;
            }
          } else {
            if (c == '\n') ++line;
            cell += c;
          }
        }
        if (i < text.size() && text[i] != ',' && text[i] != '\n' && text[i] != '\r')
          throw ParseError("line " + std::to_string(line) + ": characters after closing quote");
      } else {
        while (i < text.size() && text[i] != ',' && text[i] != '\n' && text[i] != '\r') {
          if (text[i] == '"') throw ParseError("line " + std::to_string(line) + ": stray quote in unquoted cell");
          cell += text[i++];
        }
      }
      rec.cells.push_back(cell);
      if (i >= text.size()) {
        done = true;
      } else if (text[i] == ',') {
        ++i;
      } else {
        if (text[i] == '\r') ++i;
        if (i < text.size() && text[i] == '\n') ++i;
        ++line;
        done = true;
      }
    }
    out.push_back(std::move(rec));
  }
  return out;
}

inline std::string escape(std::string_view cell) {
  if (cell.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(cell);
  std::string out = "\"";
  for (char c : cell) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

inline std::string join(const std::vector<std::string>& cells) {
  std::string out;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out += ',';
    out += escape(cells[i]);
  }
  return out;
}

}  // namespace structboost::csv
