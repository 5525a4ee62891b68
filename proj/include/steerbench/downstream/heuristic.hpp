#pragma once

#include <array>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "steerbench/downstream/device_model.hpp"

namespace steerbench::downstream {

// The 8 static features followed by global_size and transferred_bytes.
inline constexpr std::size_t kHeuristicInputs = 10;
std::array<double, kHeuristicInputs> heuristic_inputs(const LabeledPoint& p);
const std::array<std::string, kHeuristicInputs>& heuristic_input_names();

// Binary CART classifier over heuristic_inputs().
class DecisionTree {
 public:
  struct Node {
    int feature = -1;  // -1 marks a leaf
    double threshold = 0.0;
    int left = -1;     // x[feature] <= threshold
    int right = -1;
    Device leaf = Device::gpu;
  };

  explicit DecisionTree(std::vector<Node> nodes);
  Device predict(const LabeledPoint& p) const;
  Device predict(const std::array<double, kHeuristicInputs>& x) const;
  std::size_t node_count() const { return nodes_.size(); }
  std::size_t depth() const;
  const std::vector<Node>& nodes() const { return nodes_; }
  nlohmann::ordered_json to_json() const;

 private:
  std::vector<Node> nodes_;
};

// Gini CART. Thresholds are midpoints between consecutive distinct values;
// equal impurity prefers the lower input index, then the lower threshold.
// Leaves take the majority label, GPU on ties. Throws PreconditionError on
// an empty training set.
DecisionTree train_heuristic(std::span<const LabeledPoint> points, std::size_t max_depth);

struct Confusion {
  std::size_t tp = 0, fp = 0, tn = 0, fn = 0;  // GPU is the positive class
};

struct EvalReport {
  double speedup = 1.0;  // geometric mean of t_gpu / t_predicted
  double precision = 0.0;
  double recall = 0.0;
  double specificity = 0.0;
  Confusion confusion;
  std::size_t points = 0;
  nlohmann::ordered_json to_json() const;
};

// Time floor used in speedup ratios so zero-work kernels stay finite.
inline constexpr double kMinRuntime = 1e-9;

using Predictor = std::function<Device(const LabeledPoint&)>;
EvalReport evaluate(const Predictor& predictor, std::span<const LabeledPoint> test, const DeviceModel& model);
EvalReport evaluate(const DecisionTree& tree, std::span<const LabeledPoint> test, const DeviceModel& model);

// technique,speedup,precision,recall,specificity
void write_table2_csv(const std::filesystem::path& path,
                      std::span<const std::pair<std::string, EvalReport>> rows);

}  // namespace steerbench::downstream
