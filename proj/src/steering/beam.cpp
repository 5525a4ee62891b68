#include "steerbench/steering/beam.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <unordered_set>

#include "steerbench/corpus/corpus.hpp"
#include "steerbench/datagen/infill_data.hpp"
#include "steerbench/features/extract.hpp"

namespace steerbench::steering {
namespace {

std::vector<Candidate> unique_by_text(std::vector<Candidate> in) {
  std::unordered_set<std::string> seen;
  std::vector<Candidate> out;
  out.reserve(in.size());
  for (auto& c : in) {
    if (seen.insert(c.kernel.text).second) out.push_back(std::move(c));
  }
  return out;
}

bool ranks_before(const Candidate& a, const Candidate& b) {
  if (a.dist != b.dist) return a.dist < b.dist;
  if (a.token_length != b.token_length) return a.token_length < b.token_length;
  return a.kernel.text < b.kernel.text;
}

}  // namespace

void SteeringConfig::check() const {
  if (beam_width < 1) throw PreconditionError("beam width K must be at least 1");
  if (depth < 1) throw PreconditionError("beam depth must be at least 1");
  if (!(replace_probability >= 0.0 && replace_probability < 1.0)) {
    throw PreconditionError("replace probability p must be in [0, 1)");
  }
  if (!(temperature >= 0.0)) throw PreconditionError("temperature must be non-negative");
  if (max_infill_steps < 1) throw PreconditionError("max infill steps must be at least 1");
  if (!(max_hole_ratio > 0.0 && max_hole_ratio <= 1.0)) throw PreconditionError("max_hole_ratio must be in (0, 1]");
}

nlohmann::ordered_json SteeringConfig::to_json() const {
  return {{"beam_width", beam_width},
          {"depth", depth},
          {"samples_per_candidate", samples_per_candidate},
          {"seed_samples", seed_samples},
          {"replace_probability", replace_probability},
          {"temperature", temperature},
          {"max_infill_steps", max_infill_steps},
          {"max_hole_ratio", max_hole_ratio},
          {"seed", seed}};
}

SteeringConfig SteeringConfig::from_json(const nlohmann::json& doc) {
  SteeringConfig c;
  c.beam_width = doc.value("beam_width", c.beam_width);
  c.depth = doc.value("depth", c.depth);
  c.samples_per_candidate = doc.value("samples_per_candidate", c.samples_per_candidate);
  c.seed_samples = doc.value("seed_samples", c.seed_samples);
  c.replace_probability = doc.value("replace_probability", c.replace_probability);
  c.temperature = doc.value("temperature", c.temperature);
  c.max_infill_steps = doc.value("max_infill_steps", c.max_infill_steps);
  c.max_hole_ratio = doc.value("max_hole_ratio", c.max_hole_ratio);
  c.seed = doc.value("seed", c.seed);
  c.check();
  return c;
}

nlohmann::ordered_json Candidate::to_json() const {
  return {{"text", kernel.text},
          {"origin", frontend::to_string(kernel.origin)},
          {"generation", generation},
          {"dist", dist},
          {"token_length", token_length},
          {"features", features.to_json()}};
}

std::optional<Candidate> make_candidate(std::string_view text, frontend::Origin origin, const FeatureVector& target,
                                        std::size_t generation) {
  auto v = frontend::validate(text);
  if (!v.valid) return std::nullopt;
  Candidate c{{frontend::render(*v.ast), origin}, features::extract(*v.ast, target.space()), 0.0, generation, 0};
  c.dist = features::distance(c.features, target);
  c.token_length = corpus::tokenize(c.kernel.text).size();
  return c;
}

std::string_view to_string(Termination t) {
  return t == Termination::exact_match ? "exact_match" : "depth_exhausted";
}

const Candidate& Trajectory::best() const {
  if (best_path.empty()) throw PreconditionError("trajectory has no candidates");
  return best_path.back();
}

nlohmann::ordered_json Trajectory::to_json() const {
  nlohmann::ordered_json doc;
  doc["config"] = config.to_json();
  doc["target"] = target.to_json();
  doc["termination"] = to_string(termination);
  doc["best"] = best_path.empty() ? nlohmann::ordered_json() : best().to_json();
  auto& gens = doc["generations"] = nlohmann::ordered_json::array();
  for (std::size_t g = 0; g < generations.size(); ++g) {
    const GenerationStats& s = stats[g];
    nlohmann::ordered_json entry = {{"generation", s.generation},   {"attempts", s.attempts},
                                    {"valid_count", s.valid_count}, {"best_dist", s.best_dist},
                                    {"mean_dist", s.mean_dist},     {"best_so_far", s.best_so_far}};
    auto& cands = entry["candidates"] = nlohmann::ordered_json::array();
    for (const auto& c : generations[g]) cands.push_back(c.to_json());
    gens.push_back(std::move(entry));
  }
  return doc;
}

void Trajectory::write_csv(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write trajectory CSV: " + path.string());
  out << "generation,attempts,valid_count,best_dist,mean_dist,best_so_far\n";
  char buf[160];
  for (const auto& s : stats) {
    std::snprintf(buf, sizeof buf, "%zu,%zu,%zu,%.9g,%.9g,%.9g\n", s.generation, s.attempts, s.valid_count,
                  s.best_dist, s.mean_dist, s.best_so_far);
    out << buf;
  }
}

std::vector<Candidate> seed_generation(const model::Generator& gen, const FeatureVector& target,
                                       const SteeringConfig& cfg, Rng& rng) {
  const auto feed = model::fixed_feed(gen.vocabulary(), gen.sequence_length());
  std::vector<Candidate> out;
  for (std::size_t s = 0; s < cfg.seed_samples; ++s) {
    const auto result = model::infill(gen, feed, cfg.temperature, rng, cfg.max_infill_steps);
    const std::string text = corpus::decode(result.ids, gen.vocabulary());
    if (auto c = make_candidate(text, frontend::Origin::generated, target, 0)) out.push_back(std::move(*c));
  }
  out = unique_by_text(std::move(out));
  if (out.empty()) {
    Trajectory partial;
    partial.target = target;
    partial.config = cfg;
    throw EmptyGenerationError("generation 0: none of " + std::to_string(cfg.seed_samples) +
                                   " samples passed validation",
                               std::move(partial));
  }
  return out;
}

Selection select_top_k(std::span<const Candidate> candidates, std::size_t k, double p, Rng& rng) {
  if (candidates.empty()) throw PreconditionError("select_top_k needs at least one candidate");
  std::vector<Candidate> ranked(candidates.begin(), candidates.end());
  std::sort(ranked.begin(), ranked.end(), ranks_before);
  const std::size_t keep = std::min(k, ranked.size());
  Selection sel;
  sel.survivors.assign(ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(keep));
  std::vector<Candidate> pool(ranked.begin() + static_cast<std::ptrdiff_t>(keep), ranked.end());
  sel.replaced.assign(keep, false);
  for (std::size_t slot = 0; slot < keep; ++slot) {
    if (!rng.bernoulli(p) || pool.empty()) continue;
    const std::size_t pick = rng.uniform_index(pool.size());
    sel.survivors[slot] = std::move(pool[pick]);
    pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(pick));
    sel.replaced[slot] = true;
  }
  return sel;
}

std::vector<Candidate> expand(const Candidate& parent, const model::Generator& gen, const FeatureVector& target,
                              const SteeringConfig& cfg, std::size_t generation, Rng& rng) {
  std::vector<Candidate> children;
  if (cfg.samples_per_candidate == 0) return children;
  corpus::EncodedKernel encoded;
  try {
    encoded = corpus::encode_text(parent.kernel.text, gen.vocabulary(), gen.sequence_length());
  } catch (const PreconditionError&) {
    return children;  // parent uses a token the model cannot emit
  }
  if (encoded.true_length < 3) return children;
  for (std::size_t s = 0; s < cfg.samples_per_candidate; ++s) {
    const auto placement = datagen::sample_placement(encoded, cfg.max_hole_ratio, rng);
    const auto instance = datagen::apply_hole(encoded, placement);
    const auto result = model::infill(gen, instance.input_ids, cfg.temperature, rng, cfg.max_infill_steps);
    const std::string text = corpus::decode(result.ids, gen.vocabulary());
    if (auto c = make_candidate(text, frontend::Origin::generated, target, generation)) {
      children.push_back(std::move(*c));
    }
  }
  return children;
}

Trajectory beam_search(std::vector<Candidate> seeds, std::size_t seed_attempts, const FeatureVector& target,
                       const SteeringConfig& cfg, const ExpandFn& produce, Rng& rng) {
  cfg.check();
  Trajectory traj;
  traj.target = target;
  traj.config = cfg;

  auto record = [&](std::vector<Candidate> gen, std::size_t attempts) {
    GenerationStats s;
    s.generation = traj.generations.size();
    s.attempts = attempts;
    s.valid_count = gen.size();
    const auto best = std::min_element(gen.begin(), gen.end(), ranks_before);
    s.best_dist = best->dist;
    double sum = 0.0;
    for (const auto& c : gen) sum += c.dist;
    s.mean_dist = sum / static_cast<double>(gen.size());
    if (traj.best_path.empty() || ranks_before(*best, traj.best_path.back())) {
      traj.best_path.push_back(*best);
    } else {
      traj.best_path.push_back(traj.best_path.back());
    }
    s.best_so_far = traj.best_path.back().dist;
    traj.stats.push_back(s);
    traj.generations.push_back(std::move(gen));
  };

  seeds = unique_by_text(std::move(seeds));
  if (seeds.empty()) throw EmptyGenerationError("generation 0 is empty", traj);
  record(std::move(seeds), seed_attempts);

  for (std::size_t depth = 1; depth <= cfg.depth; ++depth) {
    if (traj.best().dist == 0.0) break;
    Rng gen_rng = rng.split(depth);
    const Selection sel = select_top_k(traj.generations.back(), cfg.beam_width, cfg.replace_probability, gen_rng);
    const std::uint64_t base = gen_rng.next();
    std::vector<Candidate> children;
    for (std::size_t j = 0; j < sel.survivors.size(); ++j) {
      Rng child_rng(mix_seed(base, j));
      auto kids = produce(sel.survivors[j], depth, child_rng);
      std::move(kids.begin(), kids.end(), std::back_inserter(children));
    }
    children = unique_by_text(std::move(children));
    if (children.empty()) {
      throw EmptyGenerationError("generation " + std::to_string(depth) + " produced no valid kernel", traj);
    }
    record(std::move(children), sel.survivors.size() * cfg.samples_per_candidate);
  }
  traj.termination = traj.best().dist == 0.0 ? Termination::exact_match : Termination::depth_exhausted;
  return traj;
}

Trajectory steer(const model::Generator& gen, const FeatureVector& target, const SteeringConfig& cfg) {
  cfg.check();
  Rng rng(cfg.seed);
  auto seeds = seed_generation(gen, target, cfg, rng);
  const ExpandFn produce = [&](const Candidate& parent, std::size_t generation, Rng& r) {
    return expand(parent, gen, target, cfg, generation, r);
  };
  return beam_search(std::move(seeds), cfg.seed_samples, target, cfg, produce, rng);
}

}  // namespace steerbench::steering
