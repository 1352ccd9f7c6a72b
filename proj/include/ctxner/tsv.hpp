#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace ctxner::tsv {

struct Row {
  std::size_t line = 0;  // 1-based line number in the source file
  std::vector<std::string> fields;
};

std::vector<std::string> split(std::string_view line);

// Reads a tab-separated file whose first line must equal `header` exactly.
// Blank lines are skipped; every other line must have header-many columns.
// Throws Input if the file cannot be opened and Malformed (with line
// number) on a bad header or column count.
std::vector<Row> read(const std::filesystem::path& path,
                      const std::vector<std::string>& header);

std::string join(const std::vector<std::string>& fields);

// Throws Malformed if `value` contains a tab or line break.
const std::string& field(const std::string& value);

// printf("%.<digits>g").
std::string format_significant(double value, int digits);

double parse_double(const std::string& text, const std::filesystem::path& file,
                    std::size_t line);
std::size_t parse_count(const std::string& text,
                        const std::filesystem::path& file, std::size_t line);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view content);

}  // namespace ctxner::tsv
