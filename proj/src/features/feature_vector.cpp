#include "steerbench/features/feature_vector.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "steerbench/common/error.hpp"

namespace steerbench::features {

std::string_view to_string(FeatureSpace space) {
  return space == FeatureSpace::grewe ? "grewe" : "ircount";
}

FeatureSpace feature_space_from_string(std::string_view name) {
  if (name == "grewe") return FeatureSpace::grewe;
  if (name == "ircount") return FeatureSpace::ircount;
  throw PreconditionError("unknown feature space '" + std::string(name) + "'");
}

const std::vector<std::string>& dimension_names(FeatureSpace space) {
  static const std::vector<std::string> grewe = {
      "comp", "rational", "atomic", "mem", "localmem", "coalesced", "comp_mem_ratio", "coalesced_mem_ratio",
  };
  static const std::vector<std::string> ircount = {
      "add",   "sub",  "mul",  "div",       "rem",          "cmp",          "and",         "or",
      "load",  "store", "br",  "call",      "atomicrmw",    "total_insts",  "total_blocks", "total_funcs",
  };
  return space == FeatureSpace::grewe ? grewe : ircount;
}

std::size_t dimension_count(FeatureSpace space) { return dimension_names(space).size(); }

FeatureVector::FeatureVector(FeatureSpace space) : space_(space), values_(dimension_count(space), 0.0) {}

FeatureVector::FeatureVector(FeatureSpace space, std::vector<double> values)
    : space_(space), values_(std::move(values)) {
  if (values_.size() != dimension_count(space)) {
    throw PreconditionError("feature vector for space '" + std::string(to_string(space)) + "' needs " +
                            std::to_string(dimension_count(space)) + " dimensions, got " +
                            std::to_string(values_.size()));
  }
  for (double v : values_) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw PreconditionError("feature values must be finite and non-negative");
  }
}

double FeatureVector::at(std::string_view dimension) const {
  const auto& names = dimension_names(space_);
  const auto it = std::find(names.begin(), names.end(), dimension);
  if (it == names.end()) throw PreconditionError("no dimension '" + std::string(dimension) + "'");
  return values_[static_cast<std::size_t>(it - names.begin())];
}

nlohmann::ordered_json FeatureVector::to_json() const {
  nlohmann::ordered_json doc;
  doc["space"] = std::string(to_string(space_));
  nlohmann::ordered_json dims = nlohmann::ordered_json::object();
  const auto& names = dimension_names(space_);
  for (std::size_t i = 0; i < values_.size(); ++i) dims[names[i]] = values_[i];
  doc["dims"] = std::move(dims);
  return doc;
}

FeatureVector FeatureVector::from_json(const nlohmann::json& doc) {
  try {
    const FeatureSpace space = feature_space_from_string(doc.at("space").get<std::string>());
    const auto& dims = doc.at("dims");
    std::vector<double> values;
    for (const auto& name : dimension_names(space)) values.push_back(dims.at(name).get<double>());
    if (dims.size() != values.size()) throw PreconditionError("feature vector has unknown dimensions");
    return FeatureVector(space, std::move(values));
  } catch (const nlohmann::json::exception& e) {
    throw PreconditionError(std::string("malformed feature vector: ") + e.what());
  }
}

double distance(const FeatureVector& a, const FeatureVector& b) {
  if (a.space() != b.space()) {
    throw PreconditionError("distance between different feature spaces (" + std::string(to_string(a.space())) +
                            " vs " + std::string(to_string(b.space())) + ")");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    sum += d * d;
  }
  return std::sqrt(sum);
}

double relative_proximity(const FeatureVector& candidate, const FeatureVector& target) {
  const double norm = distance(target, FeatureVector(target.space()));
  if (norm == 0.0) throw PreconditionError("relative proximity is undefined for a target at the origin");
  return std::max(0.0, 100.0 * (1.0 - distance(candidate, target) / norm));
}

std::string csv_header(FeatureSpace space) {
  std::string line = "kernel";
  for (const auto& n : dimension_names(space)) line += "," + n;
  return line;
}

std::string csv_row(std::string_view label, const FeatureVector& v) {
  std::ostringstream out;
  out.precision(17);
  out << label;
  for (double x : v.values()) out << ',' << x;
  return out.str();
}

}  // namespace steerbench::features
