#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "steerbench/common/rng.hpp"
#include "steerbench/downstream/device_model.hpp"
#include "steerbench/features/feature_vector.hpp"

namespace steerbench::active {

using downstream::Device;
using downstream::LabeledPoint;
using features::FeatureSpace;
using features::FeatureVector;

// Standardized training data shared by all members.
struct TrainingData {
  Eigen::MatrixXd x;         // one row per point
  std::vector<Device> y;
};

class Member {
 public:
  virtual ~Member() = default;
  virtual std::string name() const = 0;
  // Full refit on `data` (neural members keep their parameters and continue).
  virtual void fit(const TrainingData& data, Rng& rng) = 0;
  virtual Device predict(const Eigen::VectorXd& x) const = 0;
};

// One hidden tanh layer, sigmoid output for P(GPU), full-batch Adam on
// binary cross-entropy.
class NeuralMember final : public Member {
 public:
  NeuralMember(std::size_t inputs, std::size_t width, std::size_t epochs, std::size_t update_epochs,
               double learning_rate, Rng& init_rng);
  std::string name() const override { return "nn" + std::to_string(width_); }
  void fit(const TrainingData& data, Rng& rng) override;
  Device predict(const Eigen::VectorXd& x) const override;
  double probability_gpu(const Eigen::VectorXd& x) const;

 private:
  std::size_t width_, epochs_, update_epochs_;
  double learning_rate_;
  bool trained_ = false;
  Eigen::MatrixXd w1_;  // width x inputs
  Eigen::VectorXd b1_;
  Eigen::VectorXd w2_;
  double b2_ = 0.0;
};

// Majority of the k nearest training points (Euclidean, index order on
// distance ties); a tied vote goes to the nearest neighbour's label.
class KnnMember final : public Member {
 public:
  explicit KnnMember(std::size_t k) : k_(k) {}
  std::string name() const override { return "knn" + std::to_string(k_); }
  void fit(const TrainingData& data, Rng& rng) override;
  Device predict(const Eigen::VectorXd& x) const override;
  std::size_t k() const { return k_; }
  // Vote given the training labels of the neighbours, nearest first.
  static Device vote(std::span<const Device> nearest, std::size_t k);

 private:
  std::size_t k_;
  TrainingData data_;
};

// Lloyd's algorithm from k-means++ seeding; each cluster votes the majority
// label of its training points (GPU on ties, global majority when empty).
class KMeansMember final : public Member {
 public:
  KMeansMember(std::size_t clusters, std::size_t max_iterations) : clusters_(clusters), max_iterations_(max_iterations) {}
  std::string name() const override { return "kmeans" + std::to_string(clusters_); }
  void fit(const TrainingData& data, Rng& rng) override;
  Device predict(const Eigen::VectorXd& x) const override;
  const Eigen::MatrixXd& centroids() const { return centroids_; }

 private:
  std::size_t clusters_, max_iterations_;
  Eigen::MatrixXd centroids_;
  std::vector<Device> cluster_labels_;
};

struct CommitteeConfig {
  std::array<std::size_t, 7> nn_widths = {8, 12, 16, 24, 32, 48, 64};
  std::size_t nn_epochs = 300;
  std::size_t nn_update_epochs = 100;
  double nn_learning_rate = 0.01;
  std::size_t kmeans_max_iterations = 100;
  std::uint64_t seed = 0;
  nlohmann::ordered_json to_json() const;
};

struct CommitteeReport {
  std::size_t cpu_votes = 0;
  std::size_t gpu_votes = 0;
  double p_cpu = 0.0;
  double p_gpu = 0.0;
  double entropy = 0.0;  // nats
  nlohmann::ordered_json to_json() const;
};

// -sum p ln p over the non-zero probabilities of a vote count vector.
double vote_entropy(std::span<const std::size_t> votes);

class Committee {
 public:
  // Trains the standard 21 members. Throws PreconditionError with fewer than
  // two points, a single label, or mixed feature spaces.
  static Committee train(std::vector<LabeledPoint> seed, const CommitteeConfig& cfg);

  // Committee over caller-supplied members and no standardization; for
  // experiments with scripted voters.
  static Committee from_members(FeatureSpace space, std::vector<std::unique_ptr<Member>> members);

  Committee(Committee&&) = default;
  Committee& operator=(Committee&&) = default;

  CommitteeReport predict(const FeatureVector& point) const;
  std::vector<Device> member_votes(const FeatureVector& point) const;

  // Appends `points` and refits every member on the accumulated set.
  void update(std::span<const LabeledPoint> points);

  FeatureSpace space() const { return space_; }
  std::size_t size() const { return members_.size(); }
  const Member& member(std::size_t i) const { return *members_[i]; }
  const std::vector<LabeledPoint>& training_set() const { return points_; }

 private:
  Committee() = default;
  Eigen::VectorXd standardize(const FeatureVector& v) const;
  TrainingData data() const;
  void fit_all();

  FeatureSpace space_ = FeatureSpace::grewe;
  CommitteeConfig cfg_;
  Eigen::VectorXd mean_, inv_std_;
  std::vector<LabeledPoint> points_;
  std::vector<std::unique_ptr<Member>> members_;
  TrainingData fitted_;
  std::size_t fits_ = 0;
};

}  // namespace steerbench::active
