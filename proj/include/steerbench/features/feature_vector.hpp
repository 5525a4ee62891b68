#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace steerbench::features {

enum class FeatureSpace { grewe, ircount };

std::string_view to_string(FeatureSpace space);
FeatureSpace feature_space_from_string(std::string_view name);

// Dimension names, in vector order.
const std::vector<std::string>& dimension_names(FeatureSpace space);
std::size_t dimension_count(FeatureSpace space);

// Fixed-dimension, non-negative feature vector tagged with its space.
class FeatureVector {
 public:
  explicit FeatureVector(FeatureSpace space);  // origin of the space
  FeatureVector(FeatureSpace space, std::vector<double> values);

  FeatureSpace space() const { return space_; }
  std::span<const double> values() const { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }
  double at(std::string_view dimension) const;
  std::size_t size() const { return values_.size(); }

  bool operator==(const FeatureVector& other) const = default;

  nlohmann::ordered_json to_json() const;
  static FeatureVector from_json(const nlohmann::json& doc);

 private:
  FeatureSpace space_;
  std::vector<double> values_;
};

// Euclidean distance. Throws PreconditionError on a space mismatch.
double distance(const FeatureVector& a, const FeatureVector& b);

// 100 * (1 - d(candidate, target) / d(target, origin)), clamped below at 0.
// Throws PreconditionError when the target is the origin.
double relative_proximity(const FeatureVector& candidate, const FeatureVector& target);

// CSV header ("kernel,<dims...>") and one row per vector.
std::string csv_header(FeatureSpace space);
std::string csv_row(std::string_view label, const FeatureVector& v);

}  // namespace steerbench::features
