#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "steerbench/common/error.hpp"
#include "steerbench/common/rng.hpp"
#include "steerbench/datagen/infill_data.hpp"
#include "support.hpp"

using namespace steerbench;
using namespace steerbench::datagen;
using corpus::EncodedKernel;

namespace {

// [START] t5..t14 [END] [PAD]... : a 10-token body.
EncodedKernel ten_token_kernel(std::size_t length = 32) {
  EncodedKernel e;
  e.ids.assign(length, Vocabulary::pad);
  e.ids[0] = Vocabulary::start;
  for (std::size_t i = 1; i <= 10; ++i) e.ids[i] = static_cast<TokenId>(4 + i);
  e.ids[11] = Vocabulary::end;
  e.true_length = 12;
  return e;
}

EncodedKernel body_of(std::size_t n, std::size_t length) {
  EncodedKernel e;
  e.ids.assign(length, Vocabulary::pad);
  e.ids[0] = Vocabulary::start;
  for (std::size_t i = 1; i <= n; ++i) e.ids[i] = 5;
  e.ids[n + 1] = Vocabulary::end;
  e.true_length = n + 2;
  return e;
}

}  // namespace

TEST_CASE("apply_hole at start 3 with length 4") {
  const auto k = ten_token_kernel();
  const auto inst = apply_hole(k, {3, 4});
  CHECK(inst.input_ids.size() == k.ids.size());
  CHECK(inst.hole_index == 3);
  CHECK(inst.input_ids[3] == Vocabulary::hole);
  CHECK(inst.target == k.ids[3]);
  CHECK(inst.hidden_length == 4);
  CHECK(inst.hidden == std::vector<TokenId>(k.ids.begin() + 3, k.ids.begin() + 7));
  CHECK(inst.input_ids[4] == k.ids[7]);
  CHECK(restore(inst) == k.ids);
}

TEST_CASE("seeded placement golden") {
  const auto k = ten_token_kernel();
  Rng rng(139);
  const auto p = sample_placement(k, 0.9, rng);
  CHECK(p.start == 3);
  CHECK(p.length == 4);
  const auto inst = apply_hole(k, p);
  CHECK(inst.input_ids[3] == Vocabulary::hole);
  CHECK(inst.target == k.ids[3]);
}

TEST_CASE("an empty hole targets the end-of-hole token") {
  const auto k = ten_token_kernel();
  const auto inst = apply_hole(k, {5, 0});
  CHECK(inst.target == Vocabulary::endhole);
  CHECK(inst.hidden.empty());
  std::vector<TokenId> expected(k.ids.begin(), k.ids.begin() + 5);
  expected.push_back(Vocabulary::hole);
  expected.insert(expected.end(), k.ids.begin() + 5, k.ids.end() - 1);
  CHECK(inst.input_ids == expected);
  CHECK(restore(inst) == k.ids);
}

TEST_CASE("hidden span never exceeds the hole ratio") {
  const auto k = body_of(18, 32);
  REQUIRE(k.true_length == 20);
  Rng rng(3);
  std::size_t longest = 0;
  for (int t = 0; t < 5000; ++t) {
    const auto p = sample_placement(k, 0.9, rng);
    CHECK(p.length <= 18);
    CHECK(p.start >= 1);
    CHECK(p.start + p.length <= 19);
    longest = std::max(longest, p.length);
  }
  CHECK(longest == 18);
}

TEST_CASE("too-short kernels and bad configs are rejected") {
  EncodedKernel tiny;
  tiny.ids = {Vocabulary::start, Vocabulary::end, Vocabulary::pad};
  tiny.true_length = 2;
  Rng rng(0);
  CHECK_THROWS_AS(sample_placement(tiny, 0.9, rng), PreconditionError);
  DatagenConfig bad;
  bad.max_hole_ratio = 1.5;
  CHECK_THROWS_AS(bad.check(), PreconditionError);
}

TEST_CASE("full-length encodings still fit the hole") {
  const auto k = body_of(14, 16);
  Rng rng(9);
  for (int t = 0; t < 200; ++t) {
    const auto inst = insert_hole(k, {}, rng);
    CHECK(inst.input_ids.size() == 16);
    CHECK(inst.hidden_length >= 1);
    CHECK(restore(inst) == k.ids);
  }
}

TEST_CASE("stream samples kernels uniformly") {
  DatagenConfig cfg;
  cfg.seed = 17;
  InfillStream stream({ten_token_kernel(), body_of(6, 32)}, cfg);
  std::size_t first = 0;
  for (int t = 0; t < 1000; ++t) first += stream.next().source_index == 0;
  // 1000 fair draws: sd = sqrt(250) ~ 15.8, so 70 is beyond 4 sd.
  CHECK(first >= 430);
  CHECK(first <= 570);
}

TEST_CASE("stream is reproducible") {
  DatagenConfig cfg;
  cfg.seed = 23;
  InfillStream a({ten_token_kernel(), body_of(6, 32)}, cfg);
  InfillStream b({ten_token_kernel(), body_of(6, 32)}, cfg);
  const auto x = a.take(100);
  const auto y = b.take(100);
  for (std::size_t i = 0; i < 100; ++i) {
    CHECK(x[i].input_ids == y[i].input_ids);
    CHECK(x[i].target == y[i].target);
  }
}

TEST_CASE("single-kernel stream always references it") {
  InfillStream s({ten_token_kernel()}, {});
  for (const auto& inst : s.take(50)) CHECK(inst.source_index == 0);
}

TEST_CASE("stream skips kernels that are too short") {
  EncodedKernel tiny;
  tiny.ids = {Vocabulary::start, Vocabulary::end, Vocabulary::pad, Vocabulary::pad};
  tiny.true_length = 2;
  InfillStream s({tiny, ten_token_kernel()}, {});
  for (const auto& inst : s.take(40)) CHECK(inst.source_index == 1);
  CHECK(s.skipped() > 0);
}

TEST_CASE("masked stream hides exactly one token") {
  const TokenId mask = 200;
  MaskedStream s({ten_token_kernel()}, mask, 4);
  const auto k = ten_token_kernel();
  for (int t = 0; t < 100; ++t) {
    const auto m = s.next();
    CHECK(std::count(m.input_ids.begin(), m.input_ids.end(), mask) == 1);
    CHECK(m.input_ids[m.mask_index] == mask);
    CHECK(m.target == k.ids[m.mask_index]);
    CHECK_FALSE(Vocabulary::is_meta(m.target));
  }
}

TEST_CASE("make_dataset over the golden suite") {
  const auto kernels = test::golden_canonical();
  const auto vocab = corpus::build_vocabulary(kernels);
  auto stream = make_dataset(kernels, vocab, 128, {});
  CHECK(stream.kernels().size() == kernels.size());
  for (const auto& inst : stream.take(200)) {
    CHECK(std::count(inst.input_ids.begin(), inst.input_ids.end(), Vocabulary::hole) == 1);
    CHECK(restore(inst) == stream.kernels()[inst.source_index].ids);
  }
}
