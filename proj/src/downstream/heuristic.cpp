#include "steerbench/downstream/heuristic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>

#include "steerbench/common/error.hpp"

namespace steerbench::downstream {
namespace {

using Inputs = std::array<double, kHeuristicInputs>;

struct Counts {
  std::size_t gpu = 0, cpu = 0;
  std::size_t total() const { return gpu + cpu; }
  double gini() const {
    const double n = static_cast<double>(total());
    if (n == 0.0) return 0.0;
    const double pg = static_cast<double>(gpu) / n, pc = static_cast<double>(cpu) / n;
    return 1.0 - pg * pg - pc * pc;
  }
  Device majority() const { return cpu > gpu ? Device::cpu : Device::gpu; }
  void add(Device d) { (d == Device::gpu ? gpu : cpu) += 1; }
  void remove(Device d) { (d == Device::gpu ? gpu : cpu) -= 1; }
};

class Builder {
 public:
  Builder(std::vector<Inputs> x, std::vector<Device> y, std::size_t max_depth)
      : x_(std::move(x)), y_(std::move(y)), max_depth_(max_depth) {}

  std::vector<DecisionTree::Node> build() {
    std::vector<std::size_t> all(x_.size());
    std::iota(all.begin(), all.end(), 0);
    grow(all, 0);
    return std::move(nodes_);
  }

 private:
  int grow(const std::vector<std::size_t>& idx, std::size_t depth) {
    Counts counts;
    for (auto i : idx) counts.add(y_[i]);
    const int me = static_cast<int>(nodes_.size());
    nodes_.push_back({});
    nodes_[static_cast<std::size_t>(me)].leaf = counts.majority();
    if (depth >= max_depth_ || counts.gpu == 0 || counts.cpu == 0 || idx.size() < 2) return me;

    const double n = static_cast<double>(idx.size());
    double best_impurity = counts.gini();
    int best_feature = -1;
    double best_threshold = 0.0;
    std::vector<std::size_t> order = idx;
    for (std::size_t f = 0; f < kHeuristicInputs; ++f) {
      std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return x_[a][f] < x_[b][f]; });
      Counts left, right = counts;
      for (std::size_t k = 0; k + 1 < order.size(); ++k) {
        left.add(y_[order[k]]);
        right.remove(y_[order[k]]);
        const double lo = x_[order[k]][f], hi = x_[order[k + 1]][f];
        if (!(lo < hi)) continue;
        const double impurity = (static_cast<double>(left.total()) * left.gini() +
                                 static_cast<double>(right.total()) * right.gini()) / n;
        if (impurity < best_impurity) {
          best_impurity = impurity;
          best_feature = static_cast<int>(f);
          double mid = lo + (hi - lo) / 2.0;
          if (!(mid < hi)) mid = lo;
          best_threshold = mid;
        }
      }
    }
    if (best_feature < 0) return me;

    std::vector<std::size_t> left_idx, right_idx;
    for (auto i : idx) {
      (x_[i][static_cast<std::size_t>(best_feature)] <= best_threshold ? left_idx : right_idx).push_back(i);
    }
    const int l = grow(left_idx, depth + 1);
    const int r = grow(right_idx, depth + 1);
    auto& node = nodes_[static_cast<std::size_t>(me)];
    node.feature = best_feature;
    node.threshold = best_threshold;
    node.left = l;
    node.right = r;
    return me;
  }

  std::vector<Inputs> x_;
  std::vector<Device> y_;
  std::size_t max_depth_;
  std::vector<DecisionTree::Node> nodes_;
};

}  // namespace

std::array<double, kHeuristicInputs> heuristic_inputs(const LabeledPoint& p) {
  if (p.features.space() != features::FeatureSpace::grewe) {
    throw PreconditionError("the device-mapping heuristic needs Grewe features");
  }
  Inputs x{};
  for (std::size_t i = 0; i < 8; ++i) x[i] = p.features[i];
  x[8] = static_cast<double>(p.workload.global_size);
  x[9] = static_cast<double>(p.workload.transferred_bytes);
  return x;
}

const std::array<std::string, kHeuristicInputs>& heuristic_input_names() {
  static const std::array<std::string, kHeuristicInputs> names = [] {
    std::array<std::string, kHeuristicInputs> n;
    const auto& dims = features::dimension_names(features::FeatureSpace::grewe);
    std::copy(dims.begin(), dims.end(), n.begin());
    n[8] = "global_size";
    n[9] = "transferred_bytes";
    return n;
  }();
  return names;
}

DecisionTree::DecisionTree(std::vector<Node> nodes) : nodes_(std::move(nodes)) {
  if (nodes_.empty()) throw PreconditionError("a decision tree needs at least one node");
}

Device DecisionTree::predict(const std::array<double, kHeuristicInputs>& x) const {
  std::size_t at = 0;
  while (nodes_[at].feature >= 0) {
    const Node& n = nodes_[at];
    at = static_cast<std::size_t>(x[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left : n.right);
  }
  return nodes_[at].leaf;
}

Device DecisionTree::predict(const LabeledPoint& p) const { return predict(heuristic_inputs(p)); }

std::size_t DecisionTree::depth() const {
  std::vector<std::size_t> d(nodes_.size(), 0);
  std::size_t deepest = 0;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    deepest = std::max(deepest, d[i]);
    if (nodes_[i].feature >= 0) {
      d[static_cast<std::size_t>(nodes_[i].left)] = d[i] + 1;
      d[static_cast<std::size_t>(nodes_[i].right)] = d[i] + 1;
    }
  }
  return deepest;
}

nlohmann::ordered_json DecisionTree::to_json() const {
  auto nodes = nlohmann::ordered_json::array();
  for (const auto& n : nodes_) {
    if (n.feature < 0) {
      nodes.push_back({{"leaf", to_string(n.leaf)}});
    } else {
      nodes.push_back({{"input", heuristic_input_names()[static_cast<std::size_t>(n.feature)]},
                       {"threshold", n.threshold},
                       {"left", n.left},
                       {"right", n.right}});
    }
  }
  return {{"depth", depth()}, {"nodes", nodes}};
}

DecisionTree train_heuristic(std::span<const LabeledPoint> points, std::size_t max_depth) {
  if (points.empty()) throw PreconditionError("cannot train a heuristic on an empty set");
  std::vector<Inputs> x;
  std::vector<Device> y;
  x.reserve(points.size());
  for (const auto& p : points) {
    x.push_back(heuristic_inputs(p));
    y.push_back(p.label);
  }
  return DecisionTree(Builder(std::move(x), std::move(y), max_depth).build());
}

nlohmann::ordered_json EvalReport::to_json() const {
  return {{"speedup", speedup},
          {"precision", precision},
          {"recall", recall},
          {"specificity", specificity},
          {"points", points},
          {"confusion", {{"tp", confusion.tp}, {"fp", confusion.fp}, {"tn", confusion.tn}, {"fn", confusion.fn}}}};
}

EvalReport evaluate(const Predictor& predictor, std::span<const LabeledPoint> test, const DeviceModel& model) {
  if (test.empty()) throw PreconditionError("cannot evaluate on an empty test set");
  EvalReport r;
  double log_sum = 0.0;
  for (const auto& p : test) {
    const Device pred = predictor(p);
    const double t_gpu = std::max(synth_runtime(p.features, p.workload, Device::gpu, model), kMinRuntime);
    const double t_pred = std::max(synth_runtime(p.features, p.workload, pred, model), kMinRuntime);
    log_sum += std::log(t_gpu / t_pred);
    const bool truth_gpu = p.label == Device::gpu;
    const bool pred_gpu = pred == Device::gpu;
    if (pred_gpu && truth_gpu) ++r.confusion.tp;
    if (pred_gpu && !truth_gpu) ++r.confusion.fp;
    if (!pred_gpu && !truth_gpu) ++r.confusion.tn;
    if (!pred_gpu && truth_gpu) ++r.confusion.fn;
  }
  r.points = test.size();
  r.speedup = std::exp(log_sum / static_cast<double>(test.size()));
  auto ratio = [](std::size_t a, std::size_t b) {
    return a + b == 0 ? 0.0 : static_cast<double>(a) / static_cast<double>(a + b);
  };
  r.precision = ratio(r.confusion.tp, r.confusion.fp);
  r.recall = ratio(r.confusion.tp, r.confusion.fn);
  r.specificity = ratio(r.confusion.tn, r.confusion.fp);
  return r;
}

EvalReport evaluate(const DecisionTree& tree, std::span<const LabeledPoint> test, const DeviceModel& model) {
  return evaluate([&tree](const LabeledPoint& p) { return tree.predict(p); }, test, model);
}

void write_table2_csv(const std::filesystem::path& path,
                      std::span<const std::pair<std::string, EvalReport>> rows) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write report: " + path.string());
  out << "technique,speedup,precision,recall,specificity\n";
  char buf[256];
  for (const auto& [name, r] : rows) {
    std::snprintf(buf, sizeof buf, "%s,%.6f,%.6f,%.6f,%.6f\n", name.c_str(), r.speedup, r.precision, r.recall,
                  r.specificity);
    out << buf;
  }
}

}  // namespace steerbench::downstream
