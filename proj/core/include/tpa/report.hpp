#pragma once

// Plain-text output helpers shared by every module that writes files.

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace tpa {

// Shortest round-trip decimal representation, locale independent.
std::string fmt_num(double v);

std::uint64_t fnv1a64(const std::string& text);
std::string hex64(std::uint64_t v);

// "# key: value" lines. The timestamp line, if requested, is the only line
// that differs between otherwise identical runs.
using Metadata = std::vector<std::pair<std::string, std::string>>;
std::string metadata_block(const Metadata& meta);

struct CsvTable {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  void add_row(std::vector<std::string> row) { rows.push_back(std::move(row)); }
  std::string render(const Metadata& meta) const;
};

void write_file(const std::string& path, const std::string& content);

}  // namespace tpa
