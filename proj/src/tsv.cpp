#include "ctxner/tsv.hpp"

#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "ctxner/error.hpp"

namespace ctxner::tsv {

namespace {

std::string where(const std::filesystem::path& file, std::size_t line) {
  return file.string() + ":" + std::to_string(line);
}

}  // namespace

std::vector<std::string> split(std::string_view line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    auto tab = line.find('\t', start);
    if (tab == std::string_view::npos) {
      out.emplace_back(line.substr(start));
      return out;
    }
    out.emplace_back(line.substr(start, tab - start));
    start = tab + 1;
  }
}

std::vector<Row> read(const std::filesystem::path& path,
                      const std::vector<std::string>& header) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Input, "cannot open " + path.string());

  std::vector<Row> rows;
  std::string line;
  std::size_t line_no = 0;
  bool saw_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!saw_header) {
      if (split(line) != header) {
        throw Error(ErrorKind::Malformed,
                    where(path, line_no) + ": expected header '" +
                        join(header) + "'");
      }
      saw_header = true;
      continue;
    }
    if (line.empty()) continue;
    auto fields = split(line);
    if (fields.size() != header.size()) {
      throw Error(ErrorKind::Malformed,
                  where(path, line_no) + ": expected " +
                      std::to_string(header.size()) + " columns, got " +
                      std::to_string(fields.size()));
    }
    rows.push_back(Row{line_no, std::move(fields)});
  }
  if (!saw_header) {
    throw Error(ErrorKind::Malformed, path.string() + ": missing header row");
  }
  return rows;
}

std::string join(const std::vector<std::string>& fields) {
  std::string out;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out.push_back('\t');
    out += fields[i];
  }
  return out;
}

const std::string& field(const std::string& value) {
  if (value.find_first_of("\t\r\n") != std::string::npos) {
    throw Error(ErrorKind::Malformed,
                "value contains a tab or line break: '" + value + "'");
  }
  return value;
}

std::string format_significant(double value, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, value);
  return buf;
}

double parse_double(const std::string& text, const std::filesystem::path& file,
                    std::size_t line) {
  // strtod rather than from_chars: libstdc++ 11 lacks the double overload
  // on some targets.
  errno = 0;
  char* end = nullptr;
  const double value = std::strtod(text.c_str(), &end);
  if (text.empty() || end != text.c_str() + text.size() || errno == ERANGE ||
      !std::isfinite(value)) {
    throw Error(ErrorKind::Malformed,
                where(file, line) + ": not a number: '" + text + "'");
  }
  return value;
}

std::size_t parse_count(const std::string& text,
                        const std::filesystem::path& file, std::size_t line) {
  std::size_t value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size()) {
    throw Error(ErrorKind::Malformed,
                where(file, line) + ": not a count: '" + text + "'");
  }
  return value;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Input, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::Input, "cannot write " + path.string());
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw Error(ErrorKind::Input, "write failed: " + path.string());
}

}  // namespace ctxner::tsv
