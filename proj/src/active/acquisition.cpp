#include "steerbench/active/acquisition.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>

#include "steerbench/common/error.hpp"

namespace steerbench::active {

void Bounds::check() const {
  const std::size_t dims = features::dimension_count(space);
  if (lo.size() != dims || hi.size() != dims) throw PreconditionError("bounds do not match the feature space");
  for (std::size_t d = 0; d < dims; ++d) {
    if (!std::isfinite(lo[d]) || !std::isfinite(hi[d]) || lo[d] > hi[d]) {
      throw PreconditionError("bounds must be finite with lo <= hi");
    }
  }
}

nlohmann::ordered_json Bounds::to_json() const {
  return {{"space", features::to_string(space)}, {"lo", lo}, {"hi", hi}};
}

Bounds default_bounds(std::span<const LabeledPoint> points, double scale) {
  if (points.empty()) throw PreconditionError("bounds need at least one point");
  if (!(scale > 0.0) || !std::isfinite(scale)) throw PreconditionError("bound scale must be positive");
  Bounds b;
  b.space = points.front().features.space();
  const std::size_t dims = features::dimension_count(b.space);
  b.lo.assign(dims, 0.0);
  b.hi.assign(dims, 0.0);
  for (const auto& p : points) {
    if (p.features.space() != b.space) throw PreconditionError("points mix feature spaces");
    for (std::size_t d = 0; d < dims; ++d) b.hi[d] = std::max(b.hi[d], p.features[d]);
  }
  for (double& h : b.hi) h = h > 0.0 ? h * scale : 1.0;
  return b;
}

std::vector<FeatureVector> sample_points(std::size_t n, const Bounds& bounds, Rng& rng) {
  bounds.check();
  std::vector<FeatureVector> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> v(bounds.lo.size());
    for (std::size_t d = 0; d < v.size(); ++d) v[d] = rng.uniform(bounds.lo[d], bounds.hi[d]);
    out.emplace_back(bounds.space, std::move(v));
  }
  return out;
}

Acquisition most_uncertain(const Committee& committee, std::span<const FeatureVector> candidates) {
  if (candidates.empty()) throw PreconditionError("no candidate points to acquire from");
  Acquisition best{candidates.front(), committee.predict(candidates.front()), 0};
  for (std::size_t i = 1; i < candidates.size(); ++i) {
    CommitteeReport r = committee.predict(candidates[i]);
    if (r.entropy > best.report.entropy) best = {candidates[i], r, i};
  }
  return best;
}

Acquisition acquire(const Committee& committee, std::size_t n_random, const Bounds& bounds, Rng& rng) {
  if (n_random == 0) throw PreconditionError("n_random must be at least 1");
  if (bounds.space != committee.space()) throw PreconditionError("bounds are in a different feature space");
  const auto points = sample_points(n_random, bounds, rng);
  return most_uncertain(committee, points);
}

void ALConfig::check() const {
  if (n_random == 0) throw PreconditionError("n_random must be at least 1");
  if (!(bound_scale > 0.0)) throw PreconditionError("bound_scale must be positive");
}

nlohmann::ordered_json ALConfig::to_json() const {
  return {{"n_random", n_random},
          {"bound_scale", bound_scale},
          {"probe_points", probe_points},
          {"random_targets", random_targets},
          {"seed", seed}};
}

nlohmann::ordered_json EpochLog::to_json() const {
  nlohmann::ordered_json j = {{"epoch", epoch},
                              {"target", target.to_json()},
                              {"entropy_before", entropy_before},
                              {"entropy_after", entropy_after}};
  j["achieved_dist"] = achieved_dist ? nlohmann::ordered_json(*achieved_dist) : nlohmann::ordered_json(nullptr);
  j["best_kernel"] = best_kernel;
  j["new_points"] = new_points;
  j["mean_probe_entropy"] = mean_probe_entropy;
  j["skipped"] = skipped();
  if (!error.empty()) j["error"] = error;
  return j;
}

nlohmann::ordered_json ALResult::log_json() const {
  nlohmann::ordered_json epochs = nlohmann::ordered_json::array();
  for (const auto& e : log) epochs.push_back(e.to_json());
  nlohmann::ordered_json mean = nlohmann::ordered_json::array();
  for (const auto& row : probe_entropy) {
    double s = 0.0;
    for (double h : row) s += h;
    mean.push_back(row.empty() ? 0.0 : s / static_cast<double>(row.size()));
  }
  return {{"epochs", epochs}, {"mean_probe_entropy", mean}, {"labeled_points", labeled.size()}};
}

void ALResult::write_probe_csv(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << "epoch,probe";
  const FeatureSpace space = probes.empty() ? FeatureSpace::grewe : probes.front().space();
  for (const auto& name : features::dimension_names(space)) out << ',' << name;
  out << ",entropy\n";
  char buf[64];
  for (std::size_t e = 0; e < probe_entropy.size(); ++e) {
    for (std::size_t i = 0; i < probes.size(); ++i) {
      out << e << ',' << i;
      for (double v : probes[i].values()) {
        std::snprintf(buf, sizeof buf, ",%.9g", v);
        out << buf;
      }
      std::snprintf(buf, sizeof buf, ",%.9g\n", probe_entropy[e][i]);
      out << buf;
    }
  }
  if (!out) throw IoError("failed writing " + path.string());
}

double mean_entropy(const Committee& committee, std::span<const FeatureVector> probes) {
  if (probes.empty()) return 0.0;
  double s = 0.0;
  for (const auto& p : probes) s += committee.predict(p).entropy;
  return s / static_cast<double>(probes.size());
}

namespace {

std::vector<double> probe_row(const Committee& committee, std::span<const FeatureVector> probes) {
  std::vector<double> row;
  row.reserve(probes.size());
  for (const auto& p : probes) row.push_back(committee.predict(p).entropy);
  return row;
}

}  // namespace

ALResult al_loop(Committee& committee, const SteerFn& steer, const LabelFn& label, std::size_t epochs,
                 const ALConfig& cfg) {
  cfg.check();
  ALResult result;
  const Bounds bounds = default_bounds(committee.training_set(), cfg.bound_scale);
  Rng probe_rng(mix_seed(cfg.seed, 0x70726f6265ULL));
  result.probes = sample_points(cfg.probe_points, bounds, probe_rng);
  result.probe_entropy.push_back(probe_row(committee, result.probes));

  Rng rng(mix_seed(cfg.seed, 0x6163717569726575ULL));
  for (std::size_t epoch = 0; epoch < epochs; ++epoch) {
    EpochLog entry;
    entry.epoch = epoch;
    Rng epoch_rng = rng.split(epoch);
    if (cfg.random_targets) {
      auto pts = sample_points(1, bounds, epoch_rng);
      entry.target = pts.front();
      entry.entropy_before = committee.predict(entry.target).entropy;
    } else {
      Acquisition a = acquire(committee, cfg.n_random, bounds, epoch_rng);
      entry.target = a.point;
      entry.entropy_before = a.report.entropy;
    }

    try {
      const steering::Trajectory traj = steer(entry.target, epoch);
      const auto& best = traj.best();
      entry.achieved_dist = best.dist;
      entry.best_kernel = best.kernel.text;
      std::set<std::string> seen;
      std::vector<LabeledPoint> fresh;
      auto take = [&](const steering::Candidate& c) {
        if (!seen.insert(c.kernel.text).second) return;
        auto pts = label(c);
        fresh.insert(fresh.end(), pts.begin(), pts.end());
      };
      for (const auto& c : traj.best_path) take(c);
      const auto beam = steering::select_top_k(traj.generations.back(), traj.config.beam_width, 0.0, epoch_rng);
      for (const auto& c : beam.survivors) take(c);
      entry.new_points = fresh.size();
      if (!fresh.empty()) committee.update(fresh);
    } catch (const steering::EmptyGenerationError& e) {
      entry.error = e.what();
    }
    entry.entropy_after = committee.predict(entry.target).entropy;
    result.probe_entropy.push_back(probe_row(committee, result.probes));
    const auto& row = result.probe_entropy.back();
    double s = 0.0;
    for (double h : row) s += h;
    entry.mean_probe_entropy = row.empty() ? 0.0 : s / static_cast<double>(row.size());
    result.log.push_back(std::move(entry));
  }
  result.labeled = committee.training_set();
  return result;
}

}  // namespace steerbench::active
