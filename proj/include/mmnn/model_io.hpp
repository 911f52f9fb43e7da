#pragma once

#include <filesystem>

#include <json.hpp>

#include "mmnn/bounds.hpp"
#include "mmnn/classifier.hpp"
#include "mmnn/dataset.hpp"
#include "mmnn/srm.hpp"

namespace mmnn {

inline constexpr int kModelSchema = 1;

/// Bound values, every additive term, and the reading conventions behind them.
nlohmann::json bound_report_json(const BoundParams& params, const BoundValue& value);

/// Training report: chosen L, cover, Q table and bound breakdown.
/// `search` and `params` describe the run; `scale` is the normalization factor.
nlohmann::json training_report_json(const SrmResult& result, const SrmParams& params,
                                    const LabelTable& labels, std::size_t n, double scale);

nlohmann::json model_json(const LipschitzClassifier& clf, const LabelTable& labels,
                          const nlohmann::json& bound_report);

struct LoadedModel {
  LabelTable labels;
  LipschitzClassifier classifier;
  nlohmann::json bound_report;
};

/// Throws ValidationError on malformed documents or schema > kModelSchema.
/// A positive `eta` or exact = false rebuilds the index as approximate.
LoadedModel model_from_json(const nlohmann::json& doc);
LoadedModel model_from_json(const nlohmann::json& doc, double eta, bool exact);

void write_json(const std::filesystem::path& path, const nlohmann::json& doc);
nlohmann::json read_json(const std::filesystem::path& path);

}  // namespace mmnn
