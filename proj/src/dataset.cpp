#include "mmnn/dataset.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "mmnn/error.hpp"

namespace mmnn {

LabelTable::LabelTable(std::vector<std::string> names) {
  for (auto& n : names) {
    if (find(n)) throw ValidationError("duplicate label name '" + n + "'");
    names_.push_back(std::move(n));
  }
}

Label LabelTable::intern(const std::string& name) {
  if (auto id = find(name)) return *id;
  names_.push_back(name);
  return static_cast<Label>(names_.size());
}

std::optional<Label> LabelTable::find(const std::string& name) const {
  for (std::size_t i = 0; i < names_.size(); ++i)
    if (names_[i] == name) return static_cast<Label>(i + 1);
  return std::nullopt;
}

const std::string& LabelTable::name(Label id) const {
  if (id < 1 || id > size()) throw ValidationError("label id " + std::to_string(id) + " unknown");
  return names_[static_cast<std::size_t>(id - 1)];
}

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

double parse_number(const std::string& field, std::size_t row) {
  double v = 0.0;
  const char* first = field.data();
  const char* last = first + field.size();
  if (!field.empty() && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || field.empty())
    throw ParseError(row, "'" + field + "' is not a number");
  if (!std::isfinite(v)) throw ParseError(row, "non-finite value '" + field + "'");
  return v;
}

}  // namespace

RawDataset read_csv(std::istream& in) {
  RawDataset ds;
  std::string line;
  std::size_t row = 0;
  std::size_t dim = 0;
  while (std::getline(in, line)) {
    ++row;
    if (trim(line).empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string f;
    while (std::getline(ss, f, ',')) fields.push_back(trim(f));
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    if (ds.points.empty() && !fields.empty() && fields[0] == "label") continue;
    if (fields.size() < 2) throw ParseError(row, "expected label followed by at least one value");
    std::vector<double> v;
    v.reserve(fields.size() - 1);
    for (std::size_t i = 1; i < fields.size(); ++i) v.push_back(parse_number(fields[i], row));
    if (ds.points.empty()) dim = v.size();
    else if (v.size() != dim)
      throw ParseError(row, "has " + std::to_string(v.size()) + " values, expected " +
                                std::to_string(dim));
    ds.labels.push_back(fields[0]);
    ds.points.emplace_back(std::move(v));
  }
  return ds;
}

RawDataset read_jsonl(std::istream& in) {
  RawDataset ds;
  std::string line;
  std::size_t row = 0;
  std::optional<bool> vector_rows;
  std::size_t dim = 0;
  while (std::getline(in, line)) {
    ++row;
    if (trim(line).empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(row, std::string("invalid JSON: ") + e.what());
    }
    if (!j.is_object() || !j.contains("label")) throw ParseError(row, "missing \"label\"");
    const auto& lab = j["label"];
    std::string label;
    if (lab.is_string()) label = lab.get<std::string>();
    else if (lab.is_number_integer()) label = std::to_string(lab.get<long long>());
    else if (lab.is_number()) label = lab.dump();
    else throw ParseError(row, "\"label\" must be a string or number");

    const bool has_vec = j.contains("vector");
    const bool has_str = j.contains("string");
    if (has_vec == has_str) throw ParseError(row, "need exactly one of \"vector\" or \"string\"");
    if (vector_rows && *vector_rows != has_vec)
      throw ParseError(row, "mixes vector and string payloads");
    vector_rows = has_vec;
    if (has_vec) {
      const auto& arr = j["vector"];
      if (!arr.is_array() || arr.empty()) throw ParseError(row, "\"vector\" must be a nonempty array");
      std::vector<double> v;
      for (const auto& x : arr) {
        if (!x.is_number()) throw ParseError(row, "\"vector\" entries must be numbers");
        v.push_back(x.get<double>());
      }
      if (ds.points.empty()) dim = v.size();
      else if (v.size() != dim)
        throw ParseError(row, "has " + std::to_string(v.size()) + " values, expected " +
                                  std::to_string(dim));
      ds.points.emplace_back(std::move(v));
    } else {
      if (!j["string"].is_string()) throw ParseError(row, "\"string\" must be a string");
      ds.points.emplace_back(j["string"].get<std::string>());
    }
    ds.labels.push_back(std::move(label));
  }
  return ds;
}

RawDataset read_dataset(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path.string());
  const auto ext = path.extension().string();
  if (ext == ".jsonl" || ext == ".json") return read_jsonl(in);
  return read_csv(in);
}

LabeledSample make_sample(const RawDataset& raw) {
  LabeledSample out;
  out.sample.points = raw.points;
  out.sample.labels.reserve(raw.labels.size());
  for (const auto& name : raw.labels) out.sample.labels.push_back(out.labels.intern(name));
  out.sample.k = out.labels.size();
  out.sample.validate();
  return out;
}

}  // namespace mmnn
