#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "mmnn/metric.hpp"

namespace mmnn {

/// Maps original label strings to dense ids 1..k in order of first appearance.
class LabelTable {
 public:
  LabelTable() = default;
  explicit LabelTable(std::vector<std::string> names);

  Label intern(const std::string& name);
  std::optional<Label> find(const std::string& name) const;
  const std::string& name(Label id) const;
  int size() const { return static_cast<int>(names_.size()); }
  const std::vector<std::string>& names() const { return names_; }

 private:
  std::vector<std::string> names_;
};

/// Rows as read from disk, labels still in their original spelling.
struct RawDataset {
  std::vector<Point> points;
  std::vector<std::string> labels;
};

/// CSV rows `label,v1,v2,...`. A first row whose label field is literally
/// "label" is treated as a header. Throws ParseError with the 1-based line.
RawDataset read_csv(std::istream& in);

/// JSON lines `{"label": ..., "vector": [...]}` or `{"label": ..., "string": "..."}`.
RawDataset read_jsonl(std::istream& in);

/// Dispatches on extension: .jsonl/.json use read_jsonl, anything else CSV.
RawDataset read_dataset(const std::filesystem::path& path);

struct LabeledSample {
  Sample sample;
  LabelTable labels;
};

/// Remaps labels to 1..k and validates the result.
LabeledSample make_sample(const RawDataset& raw);

}  // namespace mmnn
