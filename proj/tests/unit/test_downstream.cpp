#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "steerbench/common/error.hpp"
#include "steerbench/common/rng.hpp"
#include "steerbench/downstream/device_model.hpp"
#include "steerbench/downstream/heuristic.hpp"
#include "support.hpp"

using namespace steerbench;
using namespace steerbench::downstream;
using features::FeatureSpace;

namespace {

FeatureVector work_vector(double comp, double mem) {
  return FeatureVector(FeatureSpace::grewe, {comp, 0, 0, mem, 0, 0, mem > 0 ? comp / mem : 0, 0});
}

LabeledPoint point(double comp, double mem, std::uint64_t global, std::uint64_t bytes, const DeviceModel& m) {
  LabeledPoint p;
  p.features = work_vector(comp, mem);
  p.workload = {global, bytes};
  p.label = fastest_device(p.features, p.workload, m);
  return p;
}

// 71 GPU-optimal points and 29 CPU-optimal points under the default model.
std::vector<LabeledPoint> split_fixture(const DeviceModel& m) {
  std::vector<LabeledPoint> out;
  for (int i = 0; i < 71; ++i) out.push_back(point(10 + i, 5, 1u << 20, 1u << 10, m));
  for (int i = 0; i < 29; ++i) out.push_back(point(1 + i % 3, 1, 1u << 8, 1u << 16, m));
  return out;
}

}  // namespace

TEST_CASE("synthetic runtimes, GPU case") {
  const DeviceModel m;
  const auto f = work_vector(6, 4);
  const Workload w{1000000, 1000000};
  CHECK(synth_runtime(f, w, Device::cpu, m) == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(synth_runtime(f, w, Device::gpu, m) == doctest::Approx(0.021).epsilon(1e-12));
  CHECK(fastest_device(f, w, m) == Device::gpu);
}

TEST_CASE("synthetic runtimes, CPU case") {
  const DeviceModel m;
  const auto f = work_vector(6, 4);
  const Workload w{1000, 1000000};
  CHECK(synth_runtime(f, w, Device::cpu, m) == doctest::Approx(1e-4).epsilon(1e-12));
  CHECK(synth_runtime(f, w, Device::gpu, m) == doctest::Approx(1.101e-2).epsilon(1e-12));
  CHECK(fastest_device(f, w, m) == Device::cpu);
}

TEST_CASE("zero work costs only the GPU overhead and transfer") {
  const DeviceModel m;
  const auto f = FeatureVector(FeatureSpace::grewe);
  const Workload w{4096, 1000};
  CHECK(synth_runtime(f, w, Device::cpu, m) == 0.0);
  CHECK(synth_runtime(f, w, Device::gpu, m) == doctest::Approx(1e-3 + 1e-5).epsilon(1e-12));
}

TEST_CASE("exact ties go to the GPU") {
  DeviceModel m;
  m.cpu_throughput = 1;
  m.gpu_throughput = 2;
  m.gpu_fixed_overhead = 0.25;
  m.gpu_transfer_cost = 0.25;
  const auto f = work_vector(1, 0);
  const Workload w{1, 1};
  REQUIRE(synth_runtime(f, w, Device::cpu, m) == synth_runtime(f, w, Device::gpu, m));
  CHECK(fastest_device(f, w, m) == Device::gpu);
}

TEST_CASE("device model validation") {
  DeviceModel m;
  m.gpu_throughput = m.cpu_throughput;
  CHECK_THROWS_AS(m.check(), PreconditionError);
  CHECK_THROWS_AS(synth_runtime(FeatureVector(FeatureSpace::ircount), {}, Device::cpu, DeviceModel{}),
                  PreconditionError);
  CHECK(device_from_string("cpu") == Device::cpu);
  CHECK_THROWS_AS(device_from_string("tpu"), PreconditionError);
}

TEST_CASE("label covers the workload grid") {
  const auto grid = default_workload_grid();
  CHECK(grid.size() == 21);
  const auto pts = label(work_vector(3, 2), grid, {}, "k");
  CHECK(pts.size() == grid.size());
  CHECK(pts.front().label == Device::cpu);
  CHECK(pts.back().workload == grid.back());
  CHECK_THROWS_AS(label(work_vector(3, 2), std::span<const Workload>{}, {}), PreconditionError);
  const auto path = (test::temp_dir("points") / "p.jsonl").string();
  write_points_jsonl(path, pts);
  const auto back = read_points_jsonl(path);
  REQUIRE(back.size() == pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    CHECK(back[i].features == pts[i].features);
    CHECK(back[i].label == pts[i].label);
    CHECK(back[i].workload == pts[i].workload);
  }
}

TEST_CASE("tree separates a linearly separable set at depth 3") {
  std::vector<LabeledPoint> pts;
  for (int i = 0; i < 40; ++i) {
    LabeledPoint p;
    p.features = work_vector(i, 1);
    p.workload = {256, 1024};
    p.label = i < 17 ? Device::cpu : Device::gpu;
    pts.push_back(p);
  }
  const auto tree = train_heuristic(pts, 3);
  CHECK(tree.depth() <= 3);
  for (const auto& p : pts) CHECK(tree.predict(p) == p.label);
}

TEST_CASE("constant labels give a constant tree") {
  std::vector<LabeledPoint> pts;
  for (int i = 0; i < 10; ++i) {
    LabeledPoint p;
    p.features = work_vector(i, i);
    p.label = Device::cpu;
    pts.push_back(p);
  }
  const auto tree = train_heuristic(pts, 6);
  CHECK(tree.node_count() == 1);
  CHECK(tree.predict(pts[0]) == Device::cpu);
  CHECK_THROWS_AS(train_heuristic(std::span<const LabeledPoint>{}, 3), PreconditionError);
}

TEST_CASE("tree predictions do not depend on row order") {
  const DeviceModel m;
  std::vector<LabeledPoint> pts;
  Rng rng(12);
  for (int i = 0; i < 200; ++i) {
    pts.push_back(point(static_cast<double>(rng.uniform_int(0, 30)), static_cast<double>(rng.uniform_int(0, 10)),
                        1ull << (8 + 2 * rng.uniform_int(0, 6)), 1ull << 16, m));
  }
  const auto a = train_heuristic(pts, 5);
  auto shuffled = pts;
  rng.shuffle(shuffled.begin(), shuffled.end());
  const auto b = train_heuristic(shuffled, 5);
  for (const auto& p : pts) CHECK(a.predict(p) == b.predict(p));
  CHECK(a.to_json().dump() == b.to_json().dump());
}

TEST_CASE("speedups of reference predictors on a 71/29 fixture") {
  const DeviceModel m;
  const auto pts = split_fixture(m);
  REQUIRE(std::count_if(pts.begin(), pts.end(), [](const auto& p) { return p.label == Device::gpu; }) == 71);

  const auto gpu = evaluate([](const LabeledPoint&) { return Device::gpu; }, pts, m);
  CHECK(gpu.speedup == 1.0);

  double log_sum = 0.0;
  for (const auto& p : pts) {
    const double tg = synth_runtime(p.features, p.workload, Device::gpu, m);
    const double tc = synth_runtime(p.features, p.workload, Device::cpu, m);
    log_sum += std::log(tg / std::min(tg, tc));
  }
  const double expected_oracle = std::exp(log_sum / pts.size());
  const auto oracle = evaluate([](const LabeledPoint& p) { return p.label; }, pts, m);
  CHECK(oracle.speedup == doctest::Approx(expected_oracle).epsilon(1e-12));
  CHECK(oracle.speedup > 1.0);
  CHECK(oracle.precision == 1.0);
  CHECK(oracle.recall == 1.0);
  CHECK(oracle.specificity == 1.0);

  const auto wrong = evaluate(
      [](const LabeledPoint& p) { return p.label == Device::gpu ? Device::cpu : Device::gpu; }, pts, m);
  CHECK(wrong.speedup < 1.0);
  CHECK(wrong.confusion.tp == 0);
  CHECK(wrong.confusion.fn == 71);
  CHECK(wrong.confusion.fp == 29);
}

TEST_CASE("more transferred bytes never turn a CPU label into GPU") {
  const DeviceModel m;
  for (double comp : {0.0, 1.0, 5.0, 40.0}) {
    const auto f = work_vector(comp, 3);
    for (std::uint64_t global : {1ull << 8, 1ull << 14, 1ull << 20}) {
      bool seen_cpu = false;
      for (int b = 4; b <= 30; b += 2) {
        const auto d = fastest_device(f, {global, 1ull << b}, m);
        if (seen_cpu) CHECK(d == Device::cpu);
        seen_cpu = seen_cpu || d == Device::cpu;
      }
    }
  }
}

TEST_CASE("trained trees never beat the oracle and report valid rates") {
  const DeviceModel m;
  Rng rng(77);
  std::vector<LabeledPoint> train, test;
  for (int i = 0; i < 300; ++i) {
    auto& dst = i < 150 ? train : test;
    dst.push_back(point(static_cast<double>(rng.uniform_int(0, 40)), static_cast<double>(rng.uniform_int(0, 12)),
                        1ull << (8 + 2 * rng.uniform_int(0, 6)), 1ull << (10 + 6 * rng.uniform_int(0, 2)), m));
  }
  const auto oracle = evaluate([](const LabeledPoint& p) { return p.label; }, test, m);
  for (std::size_t depth : {1u, 2u, 4u, 8u}) {
    const auto tree = train_heuristic(train, depth);
    const auto r = evaluate(tree, test, m);
    CHECK(r.speedup <= oracle.speedup + 1e-12);
    CHECK(r.speedup >= 0.0);
    for (double v : {r.precision, r.recall, r.specificity}) {
      CHECK(v >= 0.0);
      CHECK(v <= 1.0);
    }
    const auto& c = r.confusion;
    CHECK(c.tp + c.fp + c.tn + c.fn == test.size());
    if (c.tp + c.fn > 0) CHECK(r.recall == doctest::Approx(static_cast<double>(c.tp) / (c.tp + c.fn)));
  }
}

TEST_CASE("table2 csv") {
  const DeviceModel m;
  const auto pts = split_fixture(m);
  const std::vector<std::pair<std::string, EvalReport>> rows = {
      {"static", evaluate([](const LabeledPoint&) { return Device::gpu; }, pts, m)}};
  const auto path = test::temp_dir("table2") / "t.csv";
  write_table2_csv(path, rows);
  CHECK(test::read_file(path).rfind("technique,speedup,precision,recall,specificity\nstatic,1.000000,", 0) == 0);
}
