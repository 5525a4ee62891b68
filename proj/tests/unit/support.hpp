#pragma once

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "steerbench/corpus/corpus.hpp"
#include "steerbench/corpus/vocabulary.hpp"
#include "steerbench/frontend/frontend.hpp"
#include "steerbench/frontend/render.hpp"
#include "steerbench/model/generator.hpp"

namespace test {

namespace fs = std::filesystem;
using steerbench::corpus::TokenId;
using steerbench::corpus::Vocabulary;

inline fs::path data_dir() { return STEERBENCH_TEST_DATA; }
inline fs::path corpus_dir() { return STEERBENCH_CORPUS_DIR; }

inline std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const fs::path& p, const std::string& text) {
  fs::create_directories(p.parent_path());
  std::ofstream(p, std::ios::binary) << text;
}

// file name -> raw text of the golden suite, sorted by name.
inline std::map<std::string, std::string> golden_kernels() {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::directory_iterator(data_dir() / "golden")) {
    if (e.path().extension() == ".kl") out[e.path().filename().string()] = read_file(e.path());
  }
  return out;
}

inline std::vector<steerbench::frontend::SourceKernel> golden_canonical() {
  std::vector<steerbench::frontend::SourceKernel> out;
  for (const auto& [name, text] : golden_kernels()) {
    out.push_back({steerbench::frontend::render(steerbench::frontend::parse_valid(text)),
                   steerbench::frontend::Origin::corpus});
  }
  return out;
}

// Fresh empty directory under the system temp dir.
inline fs::path temp_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("steerbench_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

// Generator that plays back a fixed token script, one token per call, and
// then keeps answering `after` (default [ENDHOLE]). Logits are one-hot so
// greedy and sampled decoding agree.
class ScriptedGenerator final : public steerbench::model::Generator {
 public:
  ScriptedGenerator(Vocabulary vocab, std::size_t length, std::vector<TokenId> script,
                    TokenId after = Vocabulary::endhole)
      : vocab_(std::move(vocab)), length_(length), script_(std::move(script)), after_(after) {}

  const Vocabulary& vocabulary() const override { return vocab_; }
  std::size_t sequence_length() const override { return length_; }
  std::vector<double> hole_logits(std::span<const TokenId>, std::size_t) const override {
    const TokenId t = calls_ < script_.size() ? script_[calls_] : after_;
    ++calls_;
    std::vector<double> l(vocab_.size(), -1e9);
    l[static_cast<std::size_t>(t)] = 0.0;
    return l;
  }
  void rewind() { calls_ = 0; }
  std::size_t calls() const { return calls_; }

 private:
  Vocabulary vocab_;
  std::size_t length_;
  std::vector<TokenId> script_;
  TokenId after_;
  mutable std::size_t calls_ = 0;
};

// Replays `text`'s tokens for every infill of the fixed feed: it emits the
// tokens after "kernel void" in order, then [ENDHOLE], and restarts.
class FixedKernelGenerator final : public steerbench::model::Generator {
 public:
  FixedKernelGenerator(Vocabulary vocab, std::size_t length, const std::string& canonical_text)
      : vocab_(std::move(vocab)), length_(length) {
    const auto toks = steerbench::corpus::tokenize(canonical_text);
    for (std::size_t i = 2; i < toks.size(); ++i) tail_.push_back(*vocab_.find(toks[i]));
  }
  const Vocabulary& vocabulary() const override { return vocab_; }
  std::size_t sequence_length() const override { return length_; }
  std::vector<double> hole_logits(std::span<const TokenId> ids, std::size_t hole) const override {
    // Position inside the tail = tokens already emitted after "kernel void".
    const std::size_t emitted = hole >= 3 ? hole - 3 : 0;
    const TokenId t = emitted < tail_.size() ? tail_[emitted] : Vocabulary::endhole;
    (void)ids;
    std::vector<double> l(vocab_.size(), -1e9);
    l[static_cast<std::size_t>(t)] = 0.0;
    return l;
  }

 private:
  Vocabulary vocab_;
  std::size_t length_;
  std::vector<TokenId> tail_;
};

}  // namespace test
