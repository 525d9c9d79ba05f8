#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"

namespace textdct::cli {

// Fixed-width text table; numeric-looking cells are right aligned.
class Table {
 public:
  explicit Table(std::vector<std::string> header) : header_(std::move(header)) {}
  void add(std::vector<std::string> row) { rows_.push_back(std::move(row)); }
  void print(std::ostream& out) const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

std::string num(double v, int digits = 4);

// Writes `text` to `path`, or to stdout for "-". Throws on I/O failure.
void write_text(const std::string& path, const std::string& text);

// Report verbs: the table goes to stdout and the JSON to `out` when it names a
// file. With `out` == "-" the JSON takes stdout and the table moves to stderr.
void emit_report(const nlohmann::json& j, const Table& table,
                 const std::string& out);

}  // namespace textdct::cli
