#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace ctxner {

/// One surface form of an entity class used as a training seed. Surface
/// forms of the same class may contain each other ("Bush" and
/// "George W. Bush"); both are kept.
class LearningExample {
 public:
  /// Trims surrounding whitespace; throws Input if nothing is left.
  LearningExample(std::string_view surface, std::string_view class_label);

  const std::string& surface() const noexcept { return surface_; }
  const std::string& class_label() const noexcept { return class_label_; }

  /// The surface split on whitespace, i.e. the token texts it must match.
  std::vector<std::string> words() const;

  bool operator==(const LearningExample&) const = default;

 private:
  std::string surface_;
  std::string class_label_;
};

/// Reads a `surface<TAB>class` file. A first line reading exactly
/// `surface<TAB>class` is treated as a header.
std::vector<LearningExample> load_examples(const std::filesystem::path& path);

/// Examples whose class label equals `class_label`, in input order.
std::vector<LearningExample> examples_of_class(const std::vector<LearningExample>& all,
                                               std::string_view class_label);

/// Distinct class labels in first-seen order.
std::vector<std::string> class_labels(const std::vector<LearningExample>& all);

}  // namespace ctxner
