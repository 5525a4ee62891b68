#include <doctest.h>

#include <cmath>

#include "steerbench/active/acquisition.hpp"
#include "steerbench/active/committee.hpp"
#include "steerbench/common/error.hpp"
#include "steerbench/common/rng.hpp"
#include "support.hpp"

using namespace steerbench;
using namespace steerbench::active;

namespace {

FeatureVector grewe_at(double a, double b) {
  return FeatureVector(FeatureSpace::grewe, {a, b, a + b, 1, 0, 0, 0, 0});
}

LabeledPoint lp(const FeatureVector& f, Device d) {
  LabeledPoint p;
  p.features = f;
  p.label = d;
  return p;
}

// Two clusters split on the first coordinate.
std::vector<LabeledPoint> separable(std::size_t n) {
  std::vector<LabeledPoint> out;
  for (std::size_t i = 0; i < n; ++i) {
    const bool gpu = i % 2 == 0;
    const double a = gpu ? 10.0 + static_cast<double>(i % 5) : static_cast<double>(i % 5);
    out.push_back(lp(grewe_at(a, static_cast<double>(i % 3)), gpu ? Device::gpu : Device::cpu));
  }
  return out;
}

CommitteeConfig fast_config() {
  CommitteeConfig cfg;
  cfg.nn_epochs = 150;
  cfg.nn_update_epochs = 50;
  cfg.seed = 5;
  return cfg;
}

class ConstantMember final : public Member {
 public:
  explicit ConstantMember(Device d) : d_(d) {}
  std::string name() const override { return "const"; }
  void fit(const TrainingData&, Rng&) override {}
  Device predict(const Eigen::VectorXd&) const override { return d_; }

 private:
  Device d_;
};

// Votes CPU inside [lo, hi] on the first two coordinates, GPU elsewhere.
class BoxMember final : public Member {
 public:
  BoxMember(double lo, double hi) : lo_(lo), hi_(hi) {}
  std::string name() const override { return "box"; }
  void fit(const TrainingData&, Rng&) override {}
  Device predict(const Eigen::VectorXd& x) const override {
    const bool inside = x[0] >= lo_ && x[0] <= hi_ && x[1] >= lo_ && x[1] <= hi_;
    return inside ? Device::cpu : Device::gpu;
  }

 private:
  double lo_, hi_;
};

Bounds unit_box() {
  Bounds b;
  b.lo.assign(8, 0.0);
  b.hi.assign(8, 1.0);
  return b;
}

steering::Candidate candidate_at(const FeatureVector& f, const std::string& text) {
  steering::Candidate c{{text}, f, 0.0, 0, 0};
  return c;
}

// A trajectory whose only candidate sits exactly on the target.
SteerFn exact_steer() {
  return [](const FeatureVector& target, std::size_t epoch) {
    steering::Trajectory t;
    t.target = target;
    const auto c = candidate_at(target, "k" + std::to_string(epoch));
    t.generations = {{c}};
    t.stats = {{0, 1, 1, 0.0, 0.0, 0.0}};
    t.best_path = {c};
    t.termination = steering::Termination::exact_match;
    return t;
  };
}

}  // namespace

TEST_CASE("vote entropy closed form over every two-label split") {
  for (std::size_t gpu = 0; gpu <= 21; ++gpu) {
    const std::array<std::size_t, 2> votes = {21 - gpu, gpu};
    const double p = gpu / 21.0;
    const double q = 1.0 - p;
    double expected = 0.0;
    if (p > 0) expected -= p * std::log(p);
    if (q > 0) expected -= q * std::log(q);
    CAPTURE(gpu);
    CHECK(std::abs(vote_entropy(votes) - expected) < 1e-9);
  }
  const std::array<std::size_t, 2> all = {21, 0};
  CHECK(vote_entropy(all) == 0.0);
  const std::array<std::size_t, 2> split = {10, 11};
  CHECK(vote_entropy(split) == doctest::Approx(0.6920).epsilon(1e-4));
  const std::array<std::size_t, 2> even = {10, 10};
  CHECK(std::abs(vote_entropy(even) - std::log(2.0)) < 1e-9);
}

TEST_CASE("committee rejects degenerate seed data") {
  const auto cfg = fast_config();
  std::vector<LabeledPoint> gpu_only = {lp(grewe_at(1, 1), Device::gpu), lp(grewe_at(2, 1), Device::gpu)};
  CHECK_THROWS_AS(Committee::train(gpu_only, cfg), PreconditionError);
  CHECK_THROWS_AS(Committee::train({lp(grewe_at(1, 1), Device::gpu)}, cfg), PreconditionError);
  std::vector<LabeledPoint> mixed = {lp(grewe_at(1, 1), Device::gpu),
                                     lp(FeatureVector(FeatureSpace::ircount), Device::cpu)};
  CHECK_THROWS_AS(Committee::train(mixed, cfg), PreconditionError);
}

TEST_CASE("committee fits a separable set") {
  const auto pts = separable(20);
  const auto c = Committee::train(pts, fast_config());
  CHECK(c.size() == 21);
  CHECK(c.member(0).name() == "nn8");
  CHECK(c.member(7).name() == "knn1");
  CHECK(c.member(20).name() == "kmeans8");
  std::size_t correct = 0;
  for (const auto& p : pts) {
    const auto r = c.predict(p.features);
    CHECK(r.cpu_votes + r.gpu_votes == 21);
    CHECK(r.p_cpu + r.p_gpu == doctest::Approx(1.0));
    const std::array<std::size_t, 2> votes = {r.cpu_votes, r.gpu_votes};
    CHECK(r.entropy == vote_entropy(votes));
    correct += (r.gpu_votes > r.cpu_votes ? Device::gpu : Device::cpu) == p.label;
  }
  CHECK(correct == 20);
}

TEST_CASE("committee training is deterministic") {
  const auto pts = separable(20);
  const auto a = Committee::train(pts, fast_config());
  const auto b = Committee::train(pts, fast_config());
  Rng rng(3);
  for (const auto& f : sample_points(200, default_bounds(pts), rng)) CHECK(a.member_votes(f) == b.member_votes(f));
}

TEST_CASE("update keeps duplicates and 1-NN follows a new label") {
  const auto pts = separable(20);
  auto c = Committee::train(pts, fast_config());
  c.update(std::vector<LabeledPoint>{pts[0]});
  CHECK(c.training_set().size() == 21);
  CHECK_NOTHROW(c.predict(pts[0].features));
  const auto fresh = lp(grewe_at(12.5, 7.0), Device::cpu);
  c.update(std::vector<LabeledPoint>{fresh});
  CHECK(c.member_votes(fresh.features)[7] == Device::cpu);
}

TEST_CASE("successive and combined updates agree for the k-NN members") {
  const auto pts = separable(20);
  auto a = Committee::train(pts, fast_config());
  auto b = Committee::train(pts, fast_config());
  const std::vector<LabeledPoint> first = {lp(grewe_at(3, 9), Device::gpu), lp(grewe_at(11, 9), Device::cpu)};
  const std::vector<LabeledPoint> second = {lp(grewe_at(5, 4), Device::gpu)};
  a.update(first);
  a.update(second);
  std::vector<LabeledPoint> both = first;
  both.insert(both.end(), second.begin(), second.end());
  b.update(both);
  Rng rng(17);
  for (const auto& f : sample_points(300, default_bounds(pts), rng)) {
    const auto va = a.member_votes(f);
    const auto vb = b.member_votes(f);
    for (std::size_t m = 7; m < 14; ++m) CHECK(va[m] == vb[m]);
  }
}

TEST_CASE("bounds and sampling") {
  const auto pts = separable(20);
  const auto b = default_bounds(pts, 1.5);
  CHECK(b.hi[0] == doctest::Approx(21.0));
  CHECK(b.lo[0] == 0.0);
  CHECK(b.hi[4] == 1.0);
  Rng rng(1);
  for (const auto& f : sample_points(100, b, rng)) {
    for (std::size_t i = 0; i < 8; ++i) {
      CHECK(f[i] >= b.lo[i]);
      CHECK(f[i] <= b.hi[i]);
    }
  }
  CHECK_THROWS_AS(default_bounds(std::span<const LabeledPoint>{}), PreconditionError);
}

TEST_CASE("constant committee acquires the first sample") {
  std::vector<std::unique_ptr<Member>> members;
  for (int i = 0; i < 5; ++i) members.push_back(std::make_unique<ConstantMember>(Device::gpu));
  const auto c = Committee::from_members(FeatureSpace::grewe, std::move(members));
  Rng a(9);
  Rng b(9);
  const auto got = acquire(c, 64, unit_box(), a);
  const auto sampled = sample_points(64, unit_box(), b);
  CHECK(got.index == 0);
  CHECK(got.point == sampled[0]);
  CHECK(got.report.entropy == 0.0);
  CHECK_THROWS_AS(most_uncertain(c, std::span<const FeatureVector>{}), PreconditionError);
}

TEST_CASE("planted disagreement is found inside its box") {
  std::vector<std::unique_ptr<Member>> members;
  for (int i = 0; i < 3; ++i) members.push_back(std::make_unique<ConstantMember>(Device::gpu));
  for (int i = 0; i < 3; ++i) members.push_back(std::make_unique<BoxMember>(0.4, 0.6));
  const auto c = Committee::from_members(FeatureSpace::grewe, std::move(members));
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng rng(seed);
    const auto got = acquire(c, 512, unit_box(), rng);
    CHECK(got.point[0] >= 0.4);
    CHECK(got.point[0] <= 0.6);
    CHECK(got.point[1] >= 0.4);
    CHECK(got.point[1] <= 0.6);
    CHECK(got.report.entropy == doctest::Approx(std::log(2.0)));
  }
}

TEST_CASE("acquire equals a brute-force scan of the same samples") {
  const auto pts = separable(20);
  const auto c = Committee::train(pts, fast_config());
  const auto bounds = default_bounds(pts);
  for (std::uint64_t seed = 0; seed < 25; ++seed) {
    Rng a(seed);
    Rng b(seed);
    const auto got = acquire(c, 256, bounds, a);
    const auto sampled = sample_points(256, bounds, b);
    std::size_t best = 0;
    double best_h = -1.0;
    for (std::size_t i = 0; i < sampled.size(); ++i) {
      const double h = c.predict(sampled[i]).entropy;
      if (h > best_h) {
        best_h = h;
        best = i;
      }
    }
    CHECK(got.index == best);
    CHECK(got.point == sampled[best]);
    CHECK(got.report.entropy == best_h);
  }
}

TEST_CASE("zero epochs leave the seed set unchanged") {
  const auto pts = separable(20);
  auto c = Committee::train(pts, fast_config());
  ALConfig cfg;
  cfg.n_random = 64;
  cfg.probe_points = 16;
  const auto r = al_loop(
      c, exact_steer(), [](const steering::Candidate&) { return std::vector<LabeledPoint>{}; }, 0, cfg);
  CHECK(r.log.empty());
  REQUIRE(r.labeled.size() == pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) CHECK(r.labeled[i].features == pts[i].features);
  CHECK(r.probe_entropy.size() == 1);
}

TEST_CASE("a constant GPU labeler drives probe entropy to zero") {
  std::vector<LabeledPoint> seed = {lp(FeatureVector(FeatureSpace::grewe), Device::cpu),
                                    lp(FeatureVector(FeatureSpace::grewe, std::vector<double>(8, 10.0)), Device::gpu)};
  auto c = Committee::train(seed, fast_config());
  ALConfig cfg;
  cfg.n_random = 128;
  cfg.probe_points = 64;
  cfg.seed = 4;
  const auto gpu_everywhere = [](const steering::Candidate& cand) {
    std::vector<LabeledPoint> out = {lp(cand.features, Device::gpu)};
    for (int i = 1; i <= 4; ++i) {
      out.push_back(lp(FeatureVector(FeatureSpace::grewe, std::vector<double>(8, 0.1 * i)), Device::gpu));
    }
    return out;
  };
  const auto r = al_loop(c, exact_steer(), gpu_everywhere, 10, cfg);
  REQUIRE(r.log.size() == 10);
  for (const auto& e : r.log) CHECK_FALSE(e.skipped());
  for (double h : r.probe_entropy.back()) CHECK(h == 0.0);
  CHECK(r.log.back().mean_probe_entropy == 0.0);
  CHECK(r.labeled.size() > seed.size());
}

TEST_CASE("empty generations skip the epoch") {
  const auto pts = separable(20);
  auto c = Committee::train(pts, fast_config());
  ALConfig cfg;
  cfg.n_random = 32;
  cfg.probe_points = 8;
  const SteerFn failing = [](const FeatureVector& target, std::size_t) -> steering::Trajectory {
    steering::Trajectory partial;
    partial.target = target;
    throw steering::EmptyGenerationError("nothing validated", partial);
  };
  const auto r = al_loop(
      c, failing, [](const steering::Candidate&) { return std::vector<LabeledPoint>{}; }, 2, cfg);
  REQUIRE(r.log.size() == 2);
  CHECK(r.log[0].skipped());
  CHECK(r.log[0].error.find("nothing validated") != std::string::npos);
  CHECK(r.labeled.size() == pts.size());
}

TEST_CASE("al loop is deterministic and writes probe csv") {
  const auto pts = separable(20);
  ALConfig cfg;
  cfg.n_random = 64;
  cfg.probe_points = 8;
  cfg.seed = 11;
  const auto labeler = [](const steering::Candidate& cand) {
    return std::vector<LabeledPoint>{lp(cand.features, cand.features[0] > 8 ? Device::gpu : Device::cpu)};
  };
  auto a = Committee::train(pts, fast_config());
  auto b = Committee::train(pts, fast_config());
  const auto ra = al_loop(a, exact_steer(), labeler, 3, cfg);
  const auto rb = al_loop(b, exact_steer(), labeler, 3, cfg);
  CHECK(ra.log_json().dump() == rb.log_json().dump());
  const auto path = test::temp_dir("probe") / "p.csv";
  ra.write_probe_csv(path);
  const auto text = test::read_file(path);
  CHECK(text.rfind("epoch,probe,comp,rational,atomic,mem,localmem,coalesced,comp_mem_ratio,coalesced_mem_ratio,entropy\n",
                   0) == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') == 1 + 4 * 8);
}
