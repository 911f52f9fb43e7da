#include "mmnn/model_io.hpp"

#include <fstream>

#include "mmnn/error.hpp"

namespace mmnn {

using nlohmann::json;

namespace {

json point_json(const Point& p) {
  if (p.is_vector()) return json{{"vector", p.vec()}};
  return json{{"string", p.str()}};
}

Point point_from_json(const json& j) {
  if (j.contains("vector")) return Point(j.at("vector").get<std::vector<double>>());
  if (j.contains("string")) return Point(j.at("string").get<std::string>());
  throw ValidationError("model point needs \"vector\" or \"string\"");
}

std::string_view cover_method_name(CoverMethod m) {
  return m == CoverMethod::Exact ? "exact" : "greedy2approx";
}

}  // namespace

json bound_report_json(const BoundParams& params, const BoundValue& value) {
  json terms = json::object();
  for (const auto& t : value.details) terms[t.name] = t.value;
  json notes = json::array();
  notes.push_back("all logarithms are natural");
  if (value.stratification_clamped)
    notes.push_back("log log2(2L) term clamped to 0 because log2(2L) <= 1");
  if (value.fat_log_clamped) notes.push_back("ln(2L/delta) clamped to 0 because 2L <= delta");
  notes.push_back(std::string("scale-sensitive bound uses (") + std::string(to_string(params.fat)) +
                  ")^D; the entropy bound at eps = 1/4 gives (64L)^D");
  if (params.eta > 0.0) notes.push_back("bounds evaluated at L (1 + eta) for the approximate index");
  return json{
      {"params",
       {{"n", params.n},
        {"L", params.L},
        {"D", params.D},
        {"k", params.k},
        {"delta", params.delta},
        {"eta", params.eta},
        {"fat_constant", to_string(params.fat)}}},
      {"delta_rad", value.delta_rad},
      {"delta_fat", value.delta_fat},
      {"combined", value.combined},
      {"winner", value.delta_rad <= value.delta_fat ? "rad" : "fat"},
      {"terms", terms},
      {"notes", notes},
  };
}

json training_report_json(const SrmResult& result, const SrmParams& params,
                          const LabelTable& labels, std::size_t n, double scale) {
  json candidates = json::array();
  for (const auto& c : result.candidates_examined)
    candidates.push_back(
        {{"L", c.L}, {"cover_size", c.cover_size}, {"penalty", c.penalty}, {"q", c.q}});
  json zero = json::array();
  for (const auto& [i, j] : result.zero_pairs) zero.push_back({i, j});
  return json{
      {"schema", kModelSchema},
      {"n", n},
      {"k", labels.size()},
      {"labels", labels.names()},
      {"normalization_scale", scale},
      {"search", params.search == SearchMode::Sweep ? "sweep" : "binary"},
      {"penalty", to_string(params.penalty)},
      {"q_units", params.count_units ? "count" : "risk"},
      {"chosen_L", result.L_star},
      {"q_value", result.q_value},
      {"cover_size", result.cover.size},
      {"cover_method", cover_method_name(result.cover.method)},
      {"cover", result.cover.cover},
      {"s1_size", result.s1.size()},
      {"always_covered_pairs", zero},
      {"ddim",
       {{"value", result.ddim.ddim},
        {"method", to_string(result.ddim.method)},
        {"scales_examined", result.ddim.scales_examined},
        {"net_sizes", result.ddim.net_sizes}}},
      {"bounds", bound_report_json(result.bound_params, result.bound_report)},
      {"candidates_examined", candidates},
      {"candidates_total", result.candidates_total},
  };
}

json model_json(const LipschitzClassifier& clf, const LabelTable& labels, const json& bound_report) {
  json pts = json::array();
  for (std::size_t i = 0; i < clf.points().size(); ++i) {
    json p = point_json(clf.points()[i]);
    p["label"] = clf.labels()[i];
    pts.push_back(std::move(p));
  }
  return json{
      {"schema", kModelSchema},
      {"metric", {{"kind", to_string(clf.oracle().kind())}, {"scale", clf.oracle().scale()}}},
      {"L", clf.lipschitz()},
      {"eta", clf.eta()},
      {"exact_nn", clf.exact()},
      {"k", clf.k()},
      {"labels", labels.names()},
      {"s1", pts},
      {"bound_report", bound_report},
  };
}

LoadedModel model_from_json(const json& doc) {
  if (!doc.is_object()) throw ValidationError("model document is not an object");
  return model_from_json(doc, doc.value("eta", 0.0), doc.value("exact_nn", true));
}

LoadedModel model_from_json(const json& doc, double eta, bool exact) {
  try {
    const int schema = doc.at("schema").get<int>();
    if (schema > kModelSchema)
      throw ValidationError("model schema " + std::to_string(schema) +
                            " is newer than supported schema " + std::to_string(kModelSchema));
    if (schema < 1) throw ValidationError("invalid model schema " + std::to_string(schema));
    const auto& metric = doc.at("metric");
    const MetricOracle oracle(parse_metric_kind(metric.at("kind").get<std::string>()),
                              metric.at("scale").get<double>());
    LabelTable labels(doc.at("labels").get<std::vector<std::string>>());
    const int k = doc.at("k").get<int>();
    if (k != labels.size()) throw ValidationError("model k does not match its label table");
    std::vector<Point> points;
    std::vector<Label> ids;
    for (const auto& p : doc.at("s1")) {
      points.push_back(point_from_json(p));
      ids.push_back(p.at("label").get<Label>());
    }
    LipschitzClassifier clf(std::move(points), std::move(ids), k, doc.at("L").get<double>(), oracle,
                            eta, exact);
    return {std::move(labels), std::move(clf), doc.value("bound_report", json::object())};
  } catch (const json::exception& e) {
    throw ValidationError(std::string("malformed model: ") + e.what());
  }
}

void write_json(const std::filesystem::path& path, const json& doc) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << doc.dump(2) << '\n';
  if (!out) throw Error("failed writing " + path.string());
}

json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ValidationError(path.string() + ": invalid JSON: " + e.what());
  }
}

}  // namespace mmnn
