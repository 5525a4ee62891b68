#include "steerbench/pipeline/cli.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "steerbench/active/acquisition.hpp"
#include "steerbench/common/error.hpp"
#include "steerbench/corpus/corpus.hpp"
#include "steerbench/datagen/infill_data.hpp"
#include "steerbench/features/extract.hpp"
#include "steerbench/frontend/frontend.hpp"
#include "steerbench/model/checkpoint.hpp"
#include "steerbench/model/ngram.hpp"
#include "steerbench/model/transformer.hpp"
#include "steerbench/pipeline/experiment.hpp"
#include "steerbench/steering/beam.hpp"

#ifndef STEERBENCH_VERSION
#define STEERBENCH_VERSION "0.0.0"
#endif

namespace steerbench::pipeline {
namespace {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

class UsageError : public Error {
 public:
  using Error::Error;
};

constexpr std::uint64_t kDefaultSeed = 20230101;

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const fs::path& path, const std::string& text) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw IoError("cannot write " + path.string());
}

void write_json(const fs::path& path, const json& doc) { write_text(path, doc.dump(2) + "\n"); }

json read_json(const fs::path& path) {
  try {
    return json::parse(read_text(path));
  } catch (const json::parse_error& e) {
    throw UsageError("malformed JSON in " + path.string());
  }
}

std::string hash_hex(const json& config) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(config.dump())));
  return buf;
}

// Marker file held for the duration of a command.
class WorkspaceLock {
 public:
  explicit WorkspaceLock(const fs::path& root) : path_(root / ".lock") {
    fs::create_directories(root);
    std::FILE* f = std::fopen(path_.c_str(), "wx");
    if (!f) throw PreconditionError("workspace is locked by another process (" + path_.string() + ")");
    std::fclose(f);
  }
  ~WorkspaceLock() {
    std::error_code ec;
    fs::remove(path_, ec);
  }
  WorkspaceLock(const WorkspaceLock&) = delete;
  WorkspaceLock& operator=(const WorkspaceLock&) = delete;

 private:
  fs::path path_;
};

class Workspace {
 public:
  Workspace(fs::path root, std::ostream& err) : root_(std::move(root)), err_(err), lock_(root_) {
    const fs::path m = root_ / "manifest.json";
    if (fs::exists(m)) {
      manifest_ = read_json(m);
    } else {
      manifest_ = {{"tool_version", STEERBENCH_VERSION}, {"artifacts", json::object()}};
    }
  }

  fs::path path(const std::string& rel) const { return root_ / rel; }

  // Registers an artifact; warns when it replaces one built from a
  // different configuration.
  void record(const std::string& key, const std::string& rel, const json& config) {
    const std::string hash = hash_hex(config);
    auto& artifacts = manifest_["artifacts"];
    if (artifacts.contains(key) && artifacts[key].value("config_hash", "") != hash) {
      err_ << "warning: replacing " << key << " built with a different configuration\n";
    }
    artifacts[key] = {{"path", rel}, {"config_hash", hash}, {"config", config}};
  }

  void forget(const std::string& key) { manifest_["artifacts"].erase(key); }

  fs::path require(const std::string& key, const std::string& producer) const {
    const auto& artifacts = manifest_["artifacts"];
    if (!artifacts.contains(key)) throw PreconditionError("workspace has no " + key + "; run '" + producer + "' first");
    const fs::path p = root_ / artifacts[key]["path"].get<std::string>();
    if (!fs::exists(p)) throw PreconditionError("artifact " + key + " is missing at " + p.string());
    return p;
  }

  const json& artifact_config(const std::string& key) const { return manifest_["artifacts"][key]["config"]; }

  void set(const std::string& key, json value) { manifest_[key] = std::move(value); }

  void save() const {
    json doc = manifest_;
    doc["tool_version"] = STEERBENCH_VERSION;
    write_json(root_ / "manifest.json", doc);
  }

 private:
  fs::path root_;
  std::ostream& err_;
  WorkspaceLock lock_;
  json manifest_;
};

struct LoadedCorpus {
  std::vector<SourceKernel> kernels;
  corpus::Vocabulary vocab;
  std::vector<corpus::EncodedKernel> encoded;
  std::size_t sequence_length;
};

LoadedCorpus load_corpus(const Workspace& ws) {
  const auto vocab_path = ws.require("vocabulary", "ingest");
  const auto dataset_path = ws.require("dataset", "ingest");
  const auto kernels_path = ws.require("kernels", "ingest");
  corpus::Vocabulary vocab = corpus::Vocabulary::from_json(read_json(vocab_path));
  auto encoded = corpus::read_encoded_jsonl(dataset_path);
  std::vector<SourceKernel> kernels;
  std::istringstream lines(read_text(kernels_path));
  for (std::string line; std::getline(lines, line);) {
    if (!line.empty()) kernels.push_back({json::parse(line).at("text").get<std::string>(), frontend::Origin::corpus});
  }
  const std::size_t len = ws.artifact_config("dataset").at("sequence_length").get<std::size_t>();
  return {std::move(kernels), std::move(vocab), std::move(encoded), len};
}

std::unique_ptr<model::Generator> load_generator(const Workspace& ws, const std::string& kind,
                                                 const corpus::Vocabulary& vocab) {
  const auto ckpt = model::load_checkpoint(ws.require("checkpoint_" + kind, "train --model " + kind));
  if (kind == "ngram") return std::make_unique<model::NgramModel>(model::NgramModel::from_checkpoint(ckpt, vocab));
  return std::make_unique<model::Transformer>(model::Transformer::from_checkpoint(ckpt, vocab));
}

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& seed, std::ostream& out) {
  const std::uint64_t s = seed.value_or(kDefaultSeed);
  if (!seed) out << "seed: " << s << "\n";
  return s;
}

std::string fmt(double v, const char* spec = "%.6f") {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

// ---------------------------------------------------------------- ingest

struct IngestArgs {
  std::string corpus, workspace;
  std::uint64_t seed = kDefaultSeed;
  std::size_t sequence_length = 128;
  ReferenceConfig reference;
};

void cmd_ingest(const IngestArgs& a, std::ostream& out, std::ostream& err) {
  Workspace ws(a.workspace, err);
  const auto ingested = corpus::ingest_corpus(a.corpus);
  const json cfg = {{"seed", a.seed}, {"sequence_length", a.sequence_length}};
  json stats = ingested.stats.to_json();

  if (ingested.kernels.empty()) {
    stats["rename_dropped"] = 0;
    stats["vocabulary_size"] = 0;
    stats["truncated"] = 0;
    write_json(ws.path("corpus/stats.json"), stats);
    ws.record("stats", "corpus/stats.json", cfg);
    for (const char* key : {"kernels", "vocabulary", "dataset", "reference_train", "reference_test"}) ws.forget(key);
    ws.save();
    out << "kernels: 0\n";
    return;
  }

  const PreparedCorpus prep = prepare_corpus(ingested, a.seed, a.sequence_length);
  std::size_t truncated = 0;
  for (const auto& e : prep.encoded) truncated += e.truncated(prep.vocab);
  stats["rename_dropped"] = prep.rename_dropped;
  stats["vocabulary_size"] = prep.vocab.size();
  stats["truncated"] = truncated;

  std::string kernel_lines;
  for (const auto& k : prep.kernels) kernel_lines += json{{"text", k.text}}.dump() + "\n";
  write_text(ws.path("corpus/kernels.jsonl"), kernel_lines);
  write_json(ws.path("corpus/vocabulary.json"), prep.vocab.to_json());
  fs::create_directories(ws.path("corpus"));
  corpus::write_encoded_jsonl(ws.path("corpus/dataset.jsonl"), prep.encoded);
  write_json(ws.path("corpus/stats.json"), stats);
  ws.record("stats", "corpus/stats.json", cfg);
  ws.record("kernels", "corpus/kernels.jsonl", cfg);
  ws.record("vocabulary", "corpus/vocabulary.json", cfg);
  ws.record("dataset", "corpus/dataset.jsonl", cfg);

  ReferenceConfig rc = a.reference;
  rc.seed = a.seed;
  try {
    const ReferenceSuite suite = build_reference_suite(prep.kernels, rc);
    fs::create_directories(ws.path("reference"));
    downstream::write_points_jsonl(ws.path("reference/train.jsonl").string(), suite.train);
    downstream::write_points_jsonl(ws.path("reference/test.jsonl").string(), suite.test);
    ws.record("reference_train", "reference/train.jsonl", rc.to_json());
    ws.record("reference_test", "reference/test.jsonl", rc.to_json());
    out << "reference: " << suite.train.size() << " train points, " << suite.test.size() << " test points\n";
  } catch (const PreconditionError& e) {
    err << "warning: no reference suite: " << e.what() << "\n";
    ws.forget("reference_train");
    ws.forget("reference_test");
  }
  ws.set("sequence_length", a.sequence_length);
  ws.save();
  out << "kernels: " << prep.kernels.size() << "\n"
      << "compilation_rate: " << fmt(ingested.stats.compilation_rate) << "\n"
      << "vocabulary: " << prep.vocab.size() << "\n";
}

// ---------------------------------------------------------------- train

struct TrainArgs {
  std::string workspace, model = "ngram";
  std::size_t steps = 0;
  std::optional<std::uint64_t> seed;
  std::size_t order = 16, closure_order = 8;
  std::size_t layers = 2, heads = 4, hidden = 128, intermediate = 512, batch = 32, warmup = 1000;
  double learning_rate = 5e-4;
};

void cmd_train(const TrainArgs& a, std::ostream& out, std::ostream& err) {
  Workspace ws(a.workspace, err);
  const std::uint64_t seed = resolve_seed(a.seed, out);
  const LoadedCorpus c = load_corpus(ws);
  const std::string ckpt_rel = "checkpoints/" + a.model + ".ckpt";
  const std::string loss_rel = "reports/loss_" + a.model + ".csv";
  fs::create_directories(ws.path("checkpoints"));
  fs::create_directories(ws.path("reports"));

  datagen::DatagenConfig dcfg;
  dcfg.seed = mix_seed(seed, 1);
  json config;
  if (a.model == "ngram") {
    model::NgramConfig ncfg;
    ncfg.order = a.order;
    ncfg.closure_order = a.closure_order;
    ncfg.sequence_length = c.sequence_length;
    const auto m = model::train_ngram(a.order, c.encoded, c.vocab, ncfg);
    datagen::InfillStream stream(c.encoded, dcfg);
    const auto held = stream.take(256);
    const double loss = model::mean_cross_entropy(m, held);
    const std::vector<model::LossPoint> curve = {{0, loss}};
    model::write_loss_csv(ws.path(loss_rel), curve);
    model::save_checkpoint(ws.path(ckpt_rel), m.to_checkpoint());
    config = ncfg.to_json();
    out << "loss: " << fmt(loss) << "\n";
  } else {
    model::ModelConfig mcfg;
    mcfg.layers = a.layers;
    mcfg.attention_heads = a.heads;
    mcfg.hidden_size = a.hidden;
    mcfg.intermediate_size = a.intermediate;
    mcfg.batch_size = a.batch;
    mcfg.warmup_steps = std::min(a.warmup, a.steps);
    mcfg.train_steps = std::max<std::size_t>(a.steps, 1);
    mcfg.peak_learning_rate = a.learning_rate;
    mcfg.sequence_length = c.sequence_length;
    mcfg.vocab_size = c.vocab.size();
    mcfg.seed = seed;
    mcfg.check();
    model::Transformer m(c.vocab, mcfg);
    datagen::InfillStream stream(c.encoded, dcfg);
    const auto curve = m.train(stream, a.steps);
    model::write_loss_csv(ws.path(loss_rel), curve);
    model::save_checkpoint(ws.path(ckpt_rel), m.to_checkpoint());
    config = mcfg.to_json();
    if (!curve.empty()) out << "initial_loss: " << fmt(curve.front().loss) << "\nfinal_loss: " << fmt(curve.back().loss) << "\n";
  }
  config["seed"] = seed;
  ws.record("checkpoint_" + a.model, ckpt_rel, config);
  ws.record("loss_" + a.model, loss_rel, config);
  ws.save();
  out << "checkpoint: " << ckpt_rel << "\n";
}

// ---------------------------------------------------------------- sample

struct SampleArgs {
  std::string workspace, model = "ngram";
  std::size_t n = 1000;
  double temperature = 1.0;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> max_steps;
  bool timing = false;
};

void cmd_sample(const SampleArgs& a, std::ostream& out, std::ostream& err) {
  Workspace ws(a.workspace, err);
  const std::uint64_t seed = resolve_seed(a.seed, out);
  const LoadedCorpus c = load_corpus(ws);
  const auto gen = load_generator(ws, a.model, c.vocab);
  const auto feed = model::fixed_feed(c.vocab, gen->sequence_length());
  const std::size_t max_steps = a.max_steps.value_or(gen->sequence_length());

  Rng rng(mix_seed(seed, 0x73616d70ULL));
  std::set<std::string> unique;
  std::size_t compiling = 0, max_tokens = 0;
  std::string lines;
  const auto t0 = std::chrono::steady_clock::now();
  for (std::size_t i = 0; i < a.n; ++i) {
    const auto r = model::infill(*gen, feed, a.temperature, rng, max_steps);
    const std::string text = corpus::decode(r.ids, c.vocab);
    const bool valid = frontend::validate(text).valid;
    unique.insert(text);
    std::size_t tokens = 0;
    for (auto id : r.ids) tokens += !corpus::Vocabulary::is_meta(id);
    if (valid) {
      ++compiling;
      max_tokens = std::max(max_tokens, tokens);
    }
    lines += json{{"index", i}, {"text", text}, {"valid", valid}, {"tokens", tokens}, {"steps", r.steps}, {"closed", r.closed}}.dump() + "\n";
  }
  const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const double rate = a.n == 0 ? 0.0 : static_cast<double>(compiling) / static_cast<double>(a.n);

  std::string summary = "samples,unique,compiling,rate,max_tokens";
  if (a.timing) summary += ",time_per_sample_ms";
  summary += "\n" + std::to_string(a.n) + "," + std::to_string(unique.size()) + "," + std::to_string(compiling) + "," +
             fmt(rate) + "," + std::to_string(max_tokens);
  if (a.timing) summary += "," + fmt(a.n == 0 ? 0.0 : 1000.0 * elapsed / static_cast<double>(a.n), "%.3f");
  summary += "\n";
  write_text(ws.path("samples/samples.jsonl"), lines);
  write_text(ws.path("samples/summary.csv"), summary);
  const json config = {{"model", a.model}, {"n", a.n}, {"temperature", a.temperature}, {"seed", seed}, {"max_steps", max_steps}};
  ws.record("samples", "samples/samples.jsonl", config);
  ws.record("sample_summary", "samples/summary.csv", config);
  ws.save();
  out << summary;
}

// ---------------------------------------------------------------- steer

struct SteerArgs {
  std::string workspace, model = "ngram", target, target_kernel, space = "grewe";
  std::size_t k = 8, depth = 20, samples = 8, seed_samples = 64;
  double p = 0.15, temperature = 0.8;
  std::optional<std::uint64_t> seed;
};

features::FeatureVector load_target(const SteerArgs& a) {
  const auto space = features::feature_space_from_string(a.space);
  if (!a.target_kernel.empty()) {
    const std::string text = read_text(a.target_kernel);
    const auto v = frontend::validate(text);
    if (!v.valid) throw UsageError("target kernel does not validate: " + a.target_kernel);
    return features::extract(frontend::parse_valid(text), space);
  }
  const json doc = read_json(a.target);
  features::FeatureVector t(space);
  try {
    t = features::FeatureVector::from_json(doc);
  } catch (const PreconditionError& e) {
    throw UsageError(std::string("malformed target file: ") + e.what());
  }
  if (t.space() != space) {
    throw PreconditionError("target is in space " + std::string(features::to_string(t.space())) + " but --space is " +
                            a.space);
  }
  return t;
}

void cmd_steer(const SteerArgs& a, std::ostream& out, std::ostream& err) {
  if (a.target.empty() == a.target_kernel.empty()) throw UsageError("give exactly one of --target or --target-kernel");
  Workspace ws(a.workspace, err);
  const std::uint64_t seed = resolve_seed(a.seed, out);
  const features::FeatureVector target = load_target(a);
  const LoadedCorpus c = load_corpus(ws);
  const auto gen = load_generator(ws, a.model, c.vocab);
  steering::SteeringConfig cfg;
  cfg.beam_width = a.k;
  cfg.depth = a.depth;
  cfg.samples_per_candidate = a.samples;
  cfg.seed_samples = a.seed_samples;
  cfg.replace_probability = a.p;
  cfg.temperature = a.temperature;
  cfg.max_infill_steps = gen->sequence_length();
  cfg.seed = seed;
  cfg.check();

  auto emit = [&](const steering::Trajectory& t) {
    write_json(ws.path("trajectories/steer.json"), t.to_json());
    t.write_csv(ws.path("trajectories/steer.csv"));
    json config = cfg.to_json();
    config["model"] = a.model;
    config["target"] = target.to_json();
    ws.record("trajectory", "trajectories/steer.json", config);
    ws.record("trajectory_csv", "trajectories/steer.csv", config);
    ws.save();
  };
  try {
    const auto t = steering::steer(*gen, target, cfg);
    emit(t);
    const auto& best = t.best();
    out << "termination: " << steering::to_string(t.termination) << "\n"
        << "generations: " << t.generations.size() << "\n"
        << "best_dist: " << fmt(best.dist, "%.9g") << "\n"
        << "proximity: " << fmt(features::relative_proximity(best.features, target), "%.4f") << "\n"
        << "best_kernel: " << best.kernel.text << "\n";
  } catch (const steering::EmptyGenerationError& e) {
    if (!e.partial().empty()) emit(e.partial());
    throw PreconditionError(e.what());
  }
}

// ---------------------------------------------------------------- search

struct SearchArgs {
  std::string workspace, model = "ngram", seed_set;
  std::size_t epochs = 10, n_random = 4096, probe_points = 256;
  std::size_t k = 4, depth = 5, samples = 4, seed_samples = 32;
  std::optional<std::uint64_t> seed;
};

void cmd_search(const SearchArgs& a, std::ostream& out, std::ostream& err) {
  Workspace ws(a.workspace, err);
  const std::uint64_t seed = resolve_seed(a.seed, out);
  const fs::path seed_path = a.seed_set.empty() ? ws.require("reference_train", "ingest") : fs::path(a.seed_set);
  if (!fs::exists(seed_path)) throw PreconditionError("committee seed data not found: " + seed_path.string());
  const auto seed_points = downstream::read_points_jsonl(seed_path.string());
  if (seed_points.empty()) throw PreconditionError("committee seed data is empty: " + seed_path.string());
  const LoadedCorpus c = load_corpus(ws);
  const auto gen = load_generator(ws, a.model, c.vocab);

  active::CommitteeConfig ccfg;
  ccfg.seed = mix_seed(seed, 1);
  active::ALConfig acfg;
  acfg.n_random = a.n_random;
  acfg.probe_points = a.probe_points;
  acfg.seed = mix_seed(seed, 2);
  steering::SteeringConfig scfg = experiment_steering();
  scfg.beam_width = a.k;
  scfg.depth = a.depth;
  scfg.samples_per_candidate = a.samples;
  scfg.seed_samples = a.seed_samples;
  scfg.max_infill_steps = gen->sequence_length();
  scfg.check();

  auto committee = active::Committee::train(seed_points, ccfg);
  const auto grid = downstream::default_workload_grid();
  const downstream::DeviceModel dm;
  const active::SteerFn steer = [&](const features::FeatureVector& target, std::size_t epoch) {
    steering::SteeringConfig s = scfg;
    s.seed = mix_seed(seed, 3 + epoch);
    return steering::steer(*gen, target, s);
  };
  const active::LabelFn labeler = [&](const steering::Candidate& cand) {
    return label_kernel(cand.kernel.text, grid, dm);
  };
  const auto result = active::al_loop(committee, steer, labeler, a.epochs, acfg);

  json log = result.log_json();
  log["config"] = {{"al", acfg.to_json()}, {"committee", ccfg.to_json()}, {"steering", scfg.to_json()}};
  write_json(ws.path("search/log.json"), log);
  downstream::write_points_jsonl(ws.path("search/labeled.jsonl").string(), result.labeled);
  result.write_probe_csv(ws.path("search/probe_entropy.csv"));
  const json config = {{"model", a.model}, {"epochs", a.epochs}, {"seed", seed}, {"seed_set", seed_path.string()}};
  ws.record("search_log", "search/log.json", config);
  ws.record("search_labeled", "search/labeled.jsonl", config);
  ws.record("search_probe", "search/probe_entropy.csv", config);
  ws.save();
  for (const auto& e : result.log) {
    out << "epoch " << e.epoch << ": entropy " << fmt(e.entropy_before, "%.4f") << " -> "
        << fmt(e.entropy_after, "%.4f");
    if (e.skipped()) {
      out << " skipped (" << e.error << ")\n";
    } else {
      out << ", dist " << fmt(*e.achieved_dist, "%.6g") << ", +" << e.new_points << " points\n";
    }
  }
  out << "labeled: " << result.labeled.size() << "\n";
}

// ---------------------------------------------------------------- eval

struct EvalArgs {
  std::string workspace, model = "ngram", train_set, test_set;
  std::vector<std::string> augment = {"none"};
  std::size_t epochs = 10, tree_depth = 6, n_random = 4096;
  std::optional<std::uint64_t> seed;
};

void cmd_eval(const EvalArgs& a, std::ostream& out, std::ostream& err) {
  Workspace ws(a.workspace, err);
  const std::uint64_t seed = resolve_seed(a.seed, out);
  const fs::path train_path = a.train_set.empty() ? ws.require("reference_train", "ingest") : fs::path(a.train_set);
  const fs::path test_path = a.test_set.empty() ? ws.require("reference_test", "ingest") : fs::path(a.test_set);
  std::vector<Augment> strategies;
  for (const auto& s : a.augment) {
    try {
      strategies.push_back(augment_from_string(s));
    } catch (const PreconditionError& e) {
      throw UsageError(e.what());
    }
  }

  ReferenceSuite suite;
  suite.grid = downstream::default_workload_grid();
  suite.train = downstream::read_points_jsonl(train_path.string());
  suite.test = downstream::read_points_jsonl(test_path.string());
  if (suite.train.empty() || suite.test.empty()) throw PreconditionError("train and test sets must be non-empty");
  std::set<std::string> seen;
  for (const auto& p : suite.train) {
    if (!p.kernel.empty() && seen.insert(p.kernel).second) suite.train_kernels.push_back({p.kernel, frontend::Origin::corpus});
  }

  const downstream::DeviceModel dm;
  std::unique_ptr<model::Generator> gen;
  std::optional<LoadedCorpus> c;
  const bool needs_model = std::any_of(strategies.begin(), strategies.end(),
                                       [](Augment s) { return s == Augment::active || s == Augment::random; });
  if (needs_model) {
    c = load_corpus(ws);
    gen = load_generator(ws, a.model, c->vocab);
  }

  AugmentConfig cfg;
  cfg.epochs = a.epochs;
  cfg.tree_depth = a.tree_depth;
  cfg.seed = seed;
  cfg.steering = experiment_steering();
  if (gen) cfg.steering.max_infill_steps = gen->sequence_length();
  cfg.al.n_random = a.n_random;

  std::vector<std::pair<std::string, downstream::EvalReport>> rows;
  rows.emplace_back("static", downstream::evaluate([](const LabeledPoint&) { return downstream::Device::gpu; },
                                                   suite.test, dm));
  rows.emplace_back("oracle", downstream::evaluate(
                                  [&](const LabeledPoint& p) { return downstream::fastest_device(p.features, p.workload, dm); },
                                  suite.test, dm));
  std::vector<AugmentRun> runs;
  json report = {{"config", cfg.to_json()}, {"train_points", suite.train.size()}, {"test_points", suite.test.size()}};
  for (Augment s : strategies) {
    AugmentRun run = run_augmentation(s, suite, gen.get(), cfg, dm);
    rows.emplace_back(std::string(to_string(s)), run.report);
    report["runs"][std::string(to_string(s))] = {{"speedup", run.speedup},
                                                 {"report", run.report.to_json()},
                                                 {"labeled_points", run.al.labeled.size()}};
    runs.push_back(std::move(run));
  }
  for (const auto& [name, r] : rows) report["table"][name] = r.to_json();

  fs::create_directories(ws.path("reports"));
  downstream::write_table2_csv(ws.path("reports/table2.csv"), rows);
  write_fig8_csv(ws.path("reports/fig8.csv"), runs);
  write_json(ws.path("reports/eval.json"), report);
  json config = cfg.to_json();
  config["augment"] = a.augment;
  config["train_set"] = train_path.string();
  config["test_set"] = test_path.string();
  ws.record("table2", "reports/table2.csv", config);
  ws.record("fig8", "reports/fig8.csv", config);
  ws.record("eval", "reports/eval.json", config);
  ws.save();
  out << read_text(ws.path("reports/table2.csv"));
}

std::string one_line(std::string s) {
  for (char& ch : s) {
    if (ch == '\n' || ch == '\r') ch = ' ';
  }
  return s;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Steerable compiler-benchmark generator", "steerbench"};
  app.require_subcommand(1);
  app.set_version_flag("--version", STEERBENCH_VERSION);
  app.set_config("--config", "", "TOML file of option defaults; command-line flags take precedence");

  IngestArgs ingest;
  auto* ci = app.add_subcommand("ingest", "Collect, validate and encode a kernel corpus");
  ci->add_option("--corpus", ingest.corpus, "Directory of .kl files")->required();
  ci->add_option("--workspace", ingest.workspace, "Workspace directory")->required();
  ci->add_option("--seed", ingest.seed, "Identifier-renaming and split seed");
  ci->add_option("--sequence-length", ingest.sequence_length, "Encoded sequence length")->check(CLI::Range(8, 4096));
  ci->add_option("--reference-train-kernels", ingest.reference.train_kernels, "Kernels in the labeled seed set");

  TrainArgs train;
  auto* ct = app.add_subcommand("train", "Train a generator");
  ct->add_option("--workspace", train.workspace)->required();
  ct->add_option("--model", train.model)->check(CLI::IsMember({"transformer", "ngram"}));
  ct->add_option("--steps", train.steps, "Optimizer steps (transformer)");
  ct->add_option("--seed", train.seed);
  ct->add_option("--order", train.order, "n-gram order");
  ct->add_option("--closure-order", train.closure_order, "n-gram closure context levels");
  ct->add_option("--layers", train.layers);
  ct->add_option("--heads", train.heads);
  ct->add_option("--hidden", train.hidden);
  ct->add_option("--intermediate", train.intermediate);
  ct->add_option("--batch", train.batch);
  ct->add_option("--warmup", train.warmup);
  ct->add_option("--lr", train.learning_rate);

  SampleArgs sample;
  auto* cs = app.add_subcommand("sample", "Undirected samples from 'kernel void [HOLE]'");
  cs->add_option("--workspace", sample.workspace)->required();
  cs->add_option("--model", sample.model)->check(CLI::IsMember({"transformer", "ngram"}));
  cs->add_option("--n", sample.n);
  cs->add_option("--temperature", sample.temperature)->check(CLI::NonNegativeNumber);
  cs->add_option("--seed", sample.seed);
  cs->add_option("--max-steps", sample.max_steps);
  cs->add_flag("--timing", sample.timing, "Add a time_per_sample_ms column (not reproducible)");

  SteerArgs steer;
  auto* cst = app.add_subcommand("steer", "Beam search toward a target feature vector");
  cst->add_option("--workspace", steer.workspace)->required();
  cst->add_option("--model", steer.model)->check(CLI::IsMember({"transformer", "ngram"}));
  cst->add_option("--target", steer.target, "Feature-vector JSON file");
  cst->add_option("--target-kernel", steer.target_kernel, "Kernel whose features are the target");
  cst->add_option("--space", steer.space)->check(CLI::IsMember({"grewe", "ircount"}));
  cst->add_option("--K", steer.k)->check(CLI::PositiveNumber);
  cst->add_option("--depth", steer.depth);
  cst->add_option("--samples", steer.samples)->check(CLI::PositiveNumber);
  cst->add_option("--seed-samples", steer.seed_samples)->check(CLI::PositiveNumber);
  cst->add_option("--p", steer.p)->check(CLI::Range(0.0, 1.0));
  cst->add_option("--temperature", steer.temperature)->check(CLI::NonNegativeNumber);
  cst->add_option("--seed", steer.seed);

  SearchArgs search;
  auto* cse = app.add_subcommand("search", "Active-learning loop: acquire, steer, label, update");
  cse->add_option("--workspace", search.workspace)->required();
  cse->add_option("--model", search.model)->check(CLI::IsMember({"transformer", "ngram"}));
  cse->add_option("--epochs", search.epochs);
  cse->add_option("--seed-set", search.seed_set, "Labeled JSON-lines seed data");
  cse->add_option("--n-random", search.n_random)->check(CLI::PositiveNumber);
  cse->add_option("--probe-points", search.probe_points);
  cse->add_option("--K", search.k)->check(CLI::PositiveNumber);
  cse->add_option("--depth", search.depth);
  cse->add_option("--samples", search.samples)->check(CLI::PositiveNumber);
  cse->add_option("--seed-samples", search.seed_samples)->check(CLI::PositiveNumber);
  cse->add_option("--seed", search.seed);

  EvalArgs eval;
  auto* ce = app.add_subcommand("eval", "Train and evaluate the device-mapping heuristic");
  ce->add_option("--workspace", eval.workspace)->required();
  ce->add_option("--model", eval.model)->check(CLI::IsMember({"transformer", "ngram"}));
  ce->add_option("--train-set", eval.train_set);
  ce->add_option("--test-set", eval.test_set);
  ce->add_option("--augment", eval.augment, "none, active, random and/or mutation")->delimiter(',');
  ce->add_option("--epochs", eval.epochs);
  ce->add_option("--tree-depth", eval.tree_depth)->check(CLI::PositiveNumber);
  ce->add_option("--n-random", eval.n_random)->check(CLI::PositiveNumber);
  ce->add_option("--seed", eval.seed);

  try {
    app.parse(std::vector<std::string>(args.rbegin(), args.rend()));
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "error: usage: " << one_line(e.what()) << "\n";
    return kExitUsage;
  }

  try {
    if (ci->parsed()) cmd_ingest(ingest, out, err);
    if (ct->parsed()) cmd_train(train, out, err);
    if (cs->parsed()) cmd_sample(sample, out, err);
    if (cst->parsed()) cmd_steer(steer, out, err);
    if (cse->parsed()) cmd_search(search, out, err);
    if (ce->parsed()) cmd_eval(eval, out, err);
  } catch (const UsageError& e) {
    err << "error: usage: " << one_line(e.what()) << "\n";
    return kExitUsage;
  } catch (const PreconditionError& e) {
    err << "error: precondition: " << one_line(e.what()) << "\n";
    return kExitPrecondition;
  } catch (const IoError& e) {
    err << "error: io: " << one_line(e.what()) << "\n";
    return kExitPrecondition;
  } catch (const std::exception& e) {
    err << "error: internal: " << one_line(e.what()) << "\n";
    return kExitInternal;
  }
  return kExitOk;
}

}  // namespace steerbench::pipeline
