#include "ctxner/learning_example.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "ctxner/error.hpp"
#include "ctxner/tsv.hpp"

namespace ctxner {

namespace {

std::string_view trim(std::string_view s) {
  constexpr std::string_view ws = " \t\r\n\f\v";
  auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

}  // namespace

LearningExample::LearningExample(std::string_view surface, std::string_view class_label)
    : surface_(trim(surface)), class_label_(trim(class_label)) {
  if (surface_.empty()) throw Error(ErrorKind::Input, "learning example with empty surface");
}

std::vector<std::string> LearningExample::words() const {
  std::vector<std::string> out;
  std::istringstream in(surface_);
  std::string w;
  while (in >> w) out.push_back(w);
  return out;
}

std::vector<LearningExample> load_examples(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Input, "cannot open examples file " + path.string());

  std::vector<LearningExample> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line_no == 1 && line == "surface\tclass") continue;
    if (trim(line).empty()) continue;
    auto fields = tsv::split(line);
    if (fields.size() != 2) {
      throw Error(ErrorKind::Malformed, path.string() + ":" + std::to_string(line_no) +
                                            ": expected 'surface<TAB>class'");
    }
    try {
      out.emplace_back(fields[0], fields[1]);
    } catch (const Error& e) {
      throw Error(ErrorKind::Malformed,
                  path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
    if (out.back().class_label().empty()) {
      throw Error(ErrorKind::Malformed,
                  path.string() + ":" + std::to_string(line_no) + ": empty class label");
    }
  }
  return out;
}

std::vector<LearningExample> examples_of_class(const std::vector<LearningExample>& all,
                                               std::string_view class_label) {
  std::vector<LearningExample> out;
  std::copy_if(all.begin(), all.end(), std::back_inserter(out),
               [&](const LearningExample& e) { return e.class_label() == class_label; });
  return out;
}

std::vector<std::string> class_labels(const std::vector<LearningExample>& all) {
  std::vector<std::string> out;
  for (const auto& e : all) {
    if (std::find(out.begin(), out.end(), e.class_label()) == out.end()) {
      out.push_back(e.class_label());
    }
  }
  return out;
}

}  // namespace ctxner
