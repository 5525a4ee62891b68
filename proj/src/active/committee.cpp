#include "steerbench/active/committee.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "steerbench/common/error.hpp"

namespace steerbench::active {
namespace {

constexpr std::size_t kMaxNeighbours = 7;

// Indices of the `count` nearest rows of `x` to `q`, nearest first; equal
// distances keep index order.
std::vector<std::size_t> nearest_rows(const Eigen::MatrixXd& x, const Eigen::VectorXd& q, std::size_t count) {
  const auto n = static_cast<std::size_t>(x.rows());
  std::vector<std::pair<double, std::size_t>> d(n);
  for (std::size_t i = 0; i < n; ++i) d[i] = {(x.row(static_cast<Eigen::Index>(i)).transpose() - q).squaredNorm(), i};
  const std::size_t m = std::min(count, n);
  std::partial_sort(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(m), d.end());
  std::vector<std::size_t> out(m);
  for (std::size_t i = 0; i < m; ++i) out[i] = d[i].second;
  return out;
}

Device majority(std::size_t cpu, std::size_t gpu) { return cpu > gpu ? Device::cpu : Device::gpu; }

}  // namespace

NeuralMember::NeuralMember(std::size_t inputs, std::size_t width, std::size_t epochs, std::size_t update_epochs,
                           double learning_rate, Rng& init_rng)
    : width_(width), epochs_(epochs), update_epochs_(update_epochs), learning_rate_(learning_rate) {
  const auto d = static_cast<Eigen::Index>(inputs), w = static_cast<Eigen::Index>(width);
  w1_.resize(w, d);
  b1_ = Eigen::VectorXd::Zero(w);
  w2_.resize(w);
  const double s1 = 1.0 / std::sqrt(static_cast<double>(inputs));
  const double s2 = 1.0 / std::sqrt(static_cast<double>(width));
  for (Eigen::Index i = 0; i < w; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) w1_(i, j) = init_rng.normal(0.0, s1);
  }
  for (Eigen::Index i = 0; i < w; ++i) w2_(i) = init_rng.normal(0.0, s2);
}

void NeuralMember::fit(const TrainingData& data, Rng&) {
  const Eigen::Index n = data.x.rows();
  if (n == 0) return;
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) y(i) = data.y[static_cast<std::size_t>(i)] == Device::gpu ? 1.0 : 0.0;
  const std::size_t epochs = trained_ ? update_epochs_ : epochs_;
  trained_ = true;

  constexpr double kBeta1 = 0.9, kBeta2 = 0.999, kEps = 1e-8;
  Eigen::MatrixXd m_w1 = Eigen::MatrixXd::Zero(w1_.rows(), w1_.cols()), v_w1 = m_w1;
  Eigen::VectorXd m_b1 = Eigen::VectorXd::Zero(b1_.size()), v_b1 = m_b1;
  Eigen::VectorXd m_w2 = Eigen::VectorXd::Zero(w2_.size()), v_w2 = m_w2;
  double m_b2 = 0.0, v_b2 = 0.0;
  for (std::size_t t = 1; t <= epochs; ++t) {
    const Eigen::MatrixXd h = ((data.x * w1_.transpose()).rowwise() + b1_.transpose()).array().tanh().matrix();
    const Eigen::VectorXd z = (h * w2_).array() + b2_;
    const Eigen::VectorXd p = (1.0 / (1.0 + (-z.array()).exp())).matrix();
    const Eigen::VectorXd dz = (p - y) / static_cast<double>(n);
    const Eigen::VectorXd g_w2 = h.transpose() * dz;
    const double g_b2 = dz.sum();
    const Eigen::MatrixXd da = ((dz * w2_.transpose()).array() * (1.0 - h.array().square())).matrix();
    const Eigen::MatrixXd g_w1 = da.transpose() * data.x;
    const Eigen::VectorXd g_b1 = da.colwise().sum().transpose();

    const double c1 = 1.0 - std::pow(kBeta1, static_cast<double>(t));
    const double c2 = 1.0 - std::pow(kBeta2, static_cast<double>(t));
    auto step = [&](auto& param, auto& m, auto& v, const auto& g) {
      m = kBeta1 * m + (1.0 - kBeta1) * g;
      v = kBeta2 * v + (1.0 - kBeta2) * g.cwiseProduct(g);
      param -= (learning_rate_ * (m / c1).array() / ((v / c2).array().sqrt() + kEps)).matrix();
    };
    step(w1_, m_w1, v_w1, g_w1);
    step(b1_, m_b1, v_b1, g_b1);
    step(w2_, m_w2, v_w2, g_w2);
    m_b2 = kBeta1 * m_b2 + (1.0 - kBeta1) * g_b2;
    v_b2 = kBeta2 * v_b2 + (1.0 - kBeta2) * g_b2 * g_b2;
    b2_ -= learning_rate_ * (m_b2 / c1) / (std::sqrt(v_b2 / c2) + kEps);
  }
}

double NeuralMember::probability_gpu(const Eigen::VectorXd& x) const {
  const Eigen::VectorXd h = (w1_ * x + b1_).array().tanh().matrix();
  const double z = h.dot(w2_) + b2_;
  return 1.0 / (1.0 + std::exp(-z));
}

Device NeuralMember::predict(const Eigen::VectorXd& x) const {
  return probability_gpu(x) >= 0.5 ? Device::gpu : Device::cpu;
}

void KnnMember::fit(const TrainingData& data, Rng&) { data_ = data; }

Device KnnMember::vote(std::span<const Device> nearest, std::size_t k) {
  const std::size_t m = std::min(k, nearest.size());
  std::size_t gpu = 0;
  for (std::size_t i = 0; i < m; ++i) gpu += nearest[i] == Device::gpu;
  const std::size_t cpu = m - gpu;
  if (gpu == cpu) return nearest.front();
  return gpu > cpu ? Device::gpu : Device::cpu;
}

Device KnnMember::predict(const Eigen::VectorXd& x) const {
  if (data_.y.empty()) throw PreconditionError("k-NN member is not trained");
  const auto idx = nearest_rows(data_.x, x, k_);
  std::vector<Device> labels;
  for (auto i : idx) labels.push_back(data_.y[i]);
  return vote(labels, k_);
}

void KMeansMember::fit(const TrainingData& data, Rng& rng) {
  const auto n = static_cast<std::size_t>(data.x.rows());
  if (n == 0) throw PreconditionError("k-means member needs training data");
  const std::size_t k = std::min(clusters_, n);
  const Eigen::Index dims = data.x.cols();
  centroids_.resize(static_cast<Eigen::Index>(k), dims);

  // k-means++ seeding.
  centroids_.row(0) = data.x.row(static_cast<Eigen::Index>(rng.uniform_index(n)));
  std::vector<double> d2(n, std::numeric_limits<double>::infinity());
  for (std::size_t c = 1; c < k; ++c) {
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double d = (data.x.row(static_cast<Eigen::Index>(i)) - centroids_.row(static_cast<Eigen::Index>(c - 1)))
                           .squaredNorm();
      d2[i] = std::min(d2[i], d);
      total += d2[i];
    }
    const std::size_t pick = total > 0.0 ? rng.categorical(d2) : rng.uniform_index(n);
    centroids_.row(static_cast<Eigen::Index>(c)) = data.x.row(static_cast<Eigen::Index>(pick));
  }

  std::vector<std::size_t> assign(n, k);
  auto nearest_centroid = [&](const auto& row) {
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < k; ++c) {
      const double d = (row - centroids_.row(static_cast<Eigen::Index>(c))).squaredNorm();
      if (d < best_d) {
        best_d = d;
        best = c;
      }
    }
    return best;
  };
  for (std::size_t iter = 0; iter < max_iterations_; ++iter) {
    bool changed = false;
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t c = nearest_centroid(data.x.row(static_cast<Eigen::Index>(i)));
      changed |= c != assign[i];
      assign[i] = c;
    }
    if (!changed) break;
    Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(k), dims);
    std::vector<std::size_t> counts(k, 0);
    for (std::size_t i = 0; i < n; ++i) {
      sums.row(static_cast<Eigen::Index>(assign[i])) += data.x.row(static_cast<Eigen::Index>(i));
      ++counts[assign[i]];
    }
    for (std::size_t c = 0; c < k; ++c) {
      if (counts[c] > 0) centroids_.row(static_cast<Eigen::Index>(c)) = sums.row(static_cast<Eigen::Index>(c)) / static_cast<double>(counts[c]);
    }
  }

  std::size_t all_cpu = 0, all_gpu = 0;
  std::vector<std::size_t> cpu(k, 0), gpu(k, 0);
  for (std::size_t i = 0; i < n; ++i) {
    const bool is_gpu = data.y[i] == Device::gpu;
    (is_gpu ? gpu : cpu)[assign[i]] += 1;
    (is_gpu ? all_gpu : all_cpu) += 1;
  }
  cluster_labels_.assign(k, majority(all_cpu, all_gpu));
  for (std::size_t c = 0; c < k; ++c) {
    if (cpu[c] + gpu[c] > 0) cluster_labels_[c] = majority(cpu[c], gpu[c]);
  }
}

Device KMeansMember::predict(const Eigen::VectorXd& x) const {
  if (cluster_labels_.empty()) throw PreconditionError("k-means member is not trained");
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (Eigen::Index c = 0; c < centroids_.rows(); ++c) {
    const double d = (centroids_.row(c).transpose() - x).squaredNorm();
    if (d < best_d) {
      best_d = d;
      best = static_cast<std::size_t>(c);
    }
  }
  return cluster_labels_[best];
}

nlohmann::ordered_json CommitteeConfig::to_json() const {
  return {{"nn_widths", nn_widths},
          {"nn_epochs", nn_epochs},
          {"nn_update_epochs", nn_update_epochs},
          {"nn_learning_rate", nn_learning_rate},
          {"kmeans_max_iterations", kmeans_max_iterations},
          {"seed", seed}};
}

nlohmann::ordered_json CommitteeReport::to_json() const {
  return {{"cpu_votes", cpu_votes}, {"gpu_votes", gpu_votes}, {"p_cpu", p_cpu}, {"p_gpu", p_gpu},
          {"entropy", entropy}};
}

double vote_entropy(std::span<const std::size_t> votes) {
  const double total = static_cast<double>(std::accumulate(votes.begin(), votes.end(), std::size_t{0}));
  if (total == 0.0) return 0.0;
  double h = 0.0;
  for (std::size_t v : votes) {
    if (v == 0) continue;
    const double p = static_cast<double>(v) / total;
    h -= p * std::log(p);
  }
  return h;
}

Committee Committee::train(std::vector<LabeledPoint> seed, const CommitteeConfig& cfg) {
  if (seed.size() < 2) throw PreconditionError("committee seed data needs at least two points");
  const FeatureSpace space = seed.front().features.space();
  bool has_cpu = false, has_gpu = false;
  for (const auto& p : seed) {
    if (p.features.space() != space) throw PreconditionError("committee seed data mixes feature spaces");
    (p.label == Device::gpu ? has_gpu : has_cpu) = true;
  }
  if (!has_cpu || !has_gpu) throw PreconditionError("committee seed data must contain both labels");

  Committee c;
  c.space_ = space;
  c.cfg_ = cfg;
  const auto dims = static_cast<Eigen::Index>(features::dimension_count(space));
  c.mean_ = Eigen::VectorXd::Zero(dims);
  c.inv_std_ = Eigen::VectorXd::Ones(dims);
  const double n = static_cast<double>(seed.size());
  for (const auto& p : seed) {
    for (Eigen::Index d = 0; d < dims; ++d) c.mean_(d) += p.features[static_cast<std::size_t>(d)] / n;
  }
  for (Eigen::Index d = 0; d < dims; ++d) {
    double var = 0.0;
    for (const auto& p : seed) var += std::pow(p.features[static_cast<std::size_t>(d)] - c.mean_(d), 2) / n;
    c.inv_std_(d) = var > 0.0 ? 1.0 / std::sqrt(var) : 1.0;
  }
  c.points_ = std::move(seed);

  Rng init(mix_seed(cfg.seed, 0x6e6eULL));
  for (std::size_t w : cfg.nn_widths) {
    c.members_.push_back(std::make_unique<NeuralMember>(static_cast<std::size_t>(dims), w, cfg.nn_epochs,
                                                        cfg.nn_update_epochs, cfg.nn_learning_rate, init));
  }
  for (std::size_t k = 1; k <= kMaxNeighbours; ++k) c.members_.push_back(std::make_unique<KnnMember>(k));
  for (std::size_t k = 2; k <= 8; ++k) {
    c.members_.push_back(std::make_unique<KMeansMember>(k, cfg.kmeans_max_iterations));
  }
  c.fit_all();
  return c;
}

Committee Committee::from_members(FeatureSpace space, std::vector<std::unique_ptr<Member>> members) {
  if (members.empty()) throw PreconditionError("a committee needs at least one member");
  Committee c;
  c.space_ = space;
  const auto dims = static_cast<Eigen::Index>(features::dimension_count(space));
  c.mean_ = Eigen::VectorXd::Zero(dims);
  c.inv_std_ = Eigen::VectorXd::Ones(dims);
  c.members_ = std::move(members);
  return c;
}

Eigen::VectorXd Committee::standardize(const FeatureVector& v) const {
  if (v.space() != space_) throw PreconditionError("point is in a different feature space than the committee");
  Eigen::VectorXd x(mean_.size());
  for (Eigen::Index d = 0; d < x.size(); ++d) x(d) = (v[static_cast<std::size_t>(d)] - mean_(d)) * inv_std_(d);
  return x;
}

TrainingData Committee::data() const {
  TrainingData t;
  t.x.resize(static_cast<Eigen::Index>(points_.size()), mean_.size());
  for (std::size_t i = 0; i < points_.size(); ++i) {
    t.x.row(static_cast<Eigen::Index>(i)) = standardize(points_[i].features).transpose();
    t.y.push_back(points_[i].label);
  }
  return t;
}

void Committee::fit_all() {
  fitted_ = data();
  const TrainingData& t = fitted_;
  for (std::size_t m = 0; m < members_.size(); ++m) {
    Rng rng(mix_seed(cfg_.seed, fits_ * members_.size() + m + 1));
    members_[m]->fit(t, rng);
  }
  ++fits_;
}

void Committee::update(std::span<const LabeledPoint> points) {
  if (points.empty()) throw PreconditionError("update needs at least one new point");
  for (const auto& p : points) {
    if (p.features.space() != space_) throw PreconditionError("new point is in a different feature space");
  }
  points_.insert(points_.end(), points.begin(), points.end());
  fit_all();
}

std::vector<Device> Committee::member_votes(const FeatureVector& point) const {
  const Eigen::VectorXd x = standardize(point);
  std::vector<Device> votes;
  votes.reserve(members_.size());
  // The k-NN members share one neighbour search.
  std::vector<Device> nearest;
  bool searched = false;
  for (const auto& m : members_) {
    if (const auto* knn = dynamic_cast<const KnnMember*>(m.get()); knn && knn->k() <= kMaxNeighbours && !fitted_.y.empty()) {
      if (!searched) {
        for (auto i : nearest_rows(fitted_.x, x, kMaxNeighbours)) nearest.push_back(fitted_.y[i]);
        searched = true;
      }
      votes.push_back(KnnMember::vote(nearest, knn->k()));
    } else {
      votes.push_back(m->predict(x));
    }
  }
  return votes;
}

CommitteeReport Committee::predict(const FeatureVector& point) const {
  const auto votes = member_votes(point);
  CommitteeReport r;
  for (Device d : votes) (d == Device::gpu ? r.gpu_votes : r.cpu_votes) += 1;
  const double n = static_cast<double>(votes.size());
  r.p_cpu = static_cast<double>(r.cpu_votes) / n;
  r.p_gpu = static_cast<double>(r.gpu_votes) / n;
  const std::array<std::size_t, 2> counts = {r.cpu_votes, r.gpu_votes};
  r.entropy = vote_entropy(counts);
  return r;
}

}  // namespace steerbench::active
