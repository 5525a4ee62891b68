#include "steerbench/pipeline/experiment.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <unordered_set>

#include "steerbench/common/error.hpp"
#include "steerbench/features/grewe.hpp"
#include "steerbench/frontend/frontend.hpp"
#include "steerbench/steering/mutation.hpp"

namespace steerbench::pipeline {

PreparedCorpus prepare_corpus(const corpus::IngestResult& ingested, std::uint64_t seed,
                              std::size_t sequence_length) {
  std::vector<SourceKernel> kernels;
  std::unordered_set<std::string> seen;
  std::size_t dropped = 0;
  for (const auto& k : ingested.kernels) {
    SourceKernel renamed;
    try {
      renamed = corpus::rewrite_identifiers(k, corpus::kernel_seed(seed, k.text));
    } catch (const PreconditionError&) {
      ++dropped;
      continue;
    }
    if (seen.insert(renamed.text).second) kernels.push_back(std::move(renamed));
  }
  if (kernels.empty()) throw PreconditionError("corpus has no usable kernels");
  corpus::Vocabulary vocab = corpus::build_vocabulary(kernels);
  std::vector<corpus::EncodedKernel> encoded;
  encoded.reserve(kernels.size());
  for (const auto& k : kernels) encoded.push_back(corpus::encode(k, vocab, sequence_length));
  return {std::move(kernels), ingested.stats, dropped, std::move(vocab), std::move(encoded)};
}

features::FeatureVector grewe_features(std::string_view text) {
  return features::extract_grewe(frontend::parse_valid(text));
}

std::vector<LabeledPoint> label_kernel(std::string_view text, std::span<const downstream::Workload> grid,
                                       const downstream::DeviceModel& model) {
  const auto f = grewe_features(text);
  if (f.at("comp") + f.at("mem") <= 0.0) return {};
  return downstream::label(f, grid, model, std::string(text));
}

nlohmann::ordered_json ReferenceConfig::to_json() const {
  return {{"train_kernels", train_kernels},
          {"gpu_parts", gpu_parts},
          {"cpu_parts", cpu_parts},
          {"model", model.to_json()},
          {"seed", seed}};
}

ReferenceSuite build_reference_suite(std::span<const SourceKernel> kernels, const ReferenceConfig& cfg) {
  cfg.model.check();
  if (cfg.gpu_parts == 0 || cfg.cpu_parts == 0) throw PreconditionError("split ratio parts must be positive");
  ReferenceSuite suite;
  suite.grid = downstream::default_workload_grid();

  std::vector<std::size_t> order(kernels.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(mix_seed(cfg.seed, 0x7265666572656e63ULL));
  rng.shuffle(order.begin(), order.end());

  std::vector<LabeledPoint> pool;
  for (std::size_t i : order) {
    auto pts = label_kernel(kernels[i].text, suite.grid, cfg.model);
    if (pts.empty()) continue;
    if (suite.train_kernels.size() < cfg.train_kernels) {
      suite.train_kernels.push_back(kernels[i]);
      suite.train.insert(suite.train.end(), pts.begin(), pts.end());
    } else {
      suite.test_kernels.push_back(kernels[i]);
      pool.insert(pool.end(), pts.begin(), pts.end());
    }
  }
  if (suite.train_kernels.size() < cfg.train_kernels) throw PreconditionError("not enough kernels for the training set");

  std::vector<std::size_t> gpu, cpu;
  for (std::size_t i = 0; i < pool.size(); ++i) (pool[i].label == downstream::Device::gpu ? gpu : cpu).push_back(i);
  const std::size_t m = std::min(gpu.size() / cfg.gpu_parts, cpu.size() / cfg.cpu_parts);
  if (m == 0) throw PreconditionError("not enough test points for the requested device split");
  rng.shuffle(gpu.begin(), gpu.end());
  rng.shuffle(cpu.begin(), cpu.end());
  std::vector<std::size_t> keep(gpu.begin(), gpu.begin() + static_cast<std::ptrdiff_t>(m * cfg.gpu_parts));
  keep.insert(keep.end(), cpu.begin(), cpu.begin() + static_cast<std::ptrdiff_t>(m * cfg.cpu_parts));
  std::sort(keep.begin(), keep.end());
  for (std::size_t i : keep) suite.test.push_back(pool[i]);
  return suite;
}

std::string_view to_string(Augment a) {
  switch (a) {
    case Augment::none: return "none";
    case Augment::active: return "active";
    case Augment::random: return "random";
    case Augment::mutation: return "mutation";
  }
  return "none";
}

Augment augment_from_string(std::string_view name) {
  for (Augment a : {Augment::none, Augment::active, Augment::random, Augment::mutation}) {
    if (to_string(a) == name) return a;
  }
  throw PreconditionError("unknown augmentation '" + std::string(name) + "'");
}

steering::SteeringConfig experiment_steering() {
  steering::SteeringConfig s;
  s.beam_width = 4;
  s.depth = 5;
  s.samples_per_candidate = 4;
  s.seed_samples = 32;
  return s;
}

nlohmann::ordered_json AugmentConfig::to_json() const {
  return {{"epochs", epochs},
          {"tree_depth", tree_depth},
          {"steering", steering.to_json()},
          {"al", al.to_json()},
          {"committee", committee.to_json()},
          {"seed", seed}};
}

AugmentRun run_augmentation(Augment strategy, const ReferenceSuite& suite, const model::Generator* gen,
                            const AugmentConfig& cfg, const downstream::DeviceModel& model) {
  AugmentRun run;
  run.strategy = strategy;
  auto score = [&](std::span<const LabeledPoint> train) {
    return downstream::evaluate(downstream::train_heuristic(train, cfg.tree_depth), suite.test, model);
  };

  if (strategy == Augment::none) {
    run.report = score(suite.train);
    run.speedup.assign(cfg.epochs + 1, run.report.speedup);
    run.al.labeled = suite.train;
    return run;
  }

  if (!gen && strategy != Augment::mutation) throw PreconditionError("this augmentation needs a generator");
  active::CommitteeConfig ccfg = cfg.committee;
  ccfg.seed = mix_seed(cfg.seed, 1);
  active::ALConfig acfg = cfg.al;
  acfg.seed = mix_seed(cfg.seed, 2);
  acfg.random_targets = strategy == Augment::random;
  active::Committee committee = active::Committee::train(suite.train, ccfg);

  auto steer_cfg = [&](std::size_t epoch) {
    steering::SteeringConfig s = cfg.steering;
    s.seed = mix_seed(cfg.seed, 3 + epoch);
    return s;
  };
  active::SteerFn steer;
  if (strategy == Augment::mutation) {
    steer = [&](const features::FeatureVector& target, std::size_t epoch) {
      return steering::mutation_search(suite.train_kernels, target, steer_cfg(epoch));
    };
  } else {
    steer = [&](const features::FeatureVector& target, std::size_t epoch) {
      return steering::steer(*gen, target, steer_cfg(epoch));
    };
  }
  const active::LabelFn labeler = [&](const steering::Candidate& c) {
    return label_kernel(c.kernel.text, suite.grid, model);
  };
  run.al = active::al_loop(committee, steer, labeler, cfg.epochs, acfg);

  std::size_t used = suite.train.size();
  const std::span<const LabeledPoint> all(run.al.labeled);
  run.report = score(all.first(used));
  run.speedup.push_back(run.report.speedup);
  for (const auto& e : run.al.log) {
    used += e.new_points;
    run.report = score(all.first(used));
    run.speedup.push_back(run.report.speedup);
  }
  return run;
}

void write_fig8_csv(const std::filesystem::path& path, std::span<const AugmentRun> runs) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << "epoch";
  std::size_t rows = 0;
  for (const auto& r : runs) {
    out << ',' << to_string(r.strategy);
    rows = std::max(rows, r.speedup.size());
  }
  out << '\n';
  char buf[32];
  for (std::size_t e = 0; e < rows; ++e) {
    out << e;
    for (const auto& r : runs) {
      out << ',';
      if (e < r.speedup.size()) {
        std::snprintf(buf, sizeof buf, "%.6f", r.speedup[e]);
        out << buf;
      }
    }
    out << '\n';
  }
  if (!out) throw IoError("failed writing " + path.string());
}

}  // namespace steerbench::pipeline
