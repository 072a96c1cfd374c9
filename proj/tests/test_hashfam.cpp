#include <doctest.h>

#include <cmath>
#include <set>

#include "oracles.hpp"
#include "qia/errors.hpp"
#include "qia/hashfam.hpp"

using namespace qia;

TEST_CASE("sample_hash is a pure function of the generator state") {
  Rng a(1), b(1);
  const auto h1 = sample_hash(a, 40, 8);
  const auto h2 = sample_hash(b, 40, 8);
  CHECK(h1 == h2);
  CHECK(h1.diagonals() == h2.diagonals());
  CHECK(h1.offset() == h2.offset());
  CHECK(h1.out_len() == 16);

  const auto rebuilt = HashFunction::from_seed(h1.seed(), 40, 8);
  CHECK(rebuilt.diagonals() == h1.diagonals());
  CHECK(rebuilt.diagonals().size() == 40 + 16 - 1);
}

TEST_CASE("eval of the zero input is the offset") {
  Rng rng(3);
  for (int i = 0; i < 50; ++i) {
    const auto h = sample_hash(rng, 144, 16);
    CHECK(h.eval(BitString(144)) == h.offset());
  }
}

TEST_CASE("frozen Toeplitz vector: seed 0xDEADBEEF, N = 8, d = 2") {
  const auto h = HashFunction::from_seed(0xDEADBEEF, 8, 2);
  const auto input = BitString::from_string("10110010");
  // Expected value computed with oracle::toeplitz_eval and checked by hand.
  CHECK(h.eval(input).to_string() == "1011");
  CHECK(oracle::to_ints(h.eval(input)) == oracle::toeplitz_eval(h, oracle::to_ints(input)));
}

TEST_CASE("packed evaluation matches the bit-matrix oracle") {
  Rng rng(77);
  for (int i = 0; i < 200; ++i) {
    const std::size_t n = 1 + rng.below(200);
    const std::size_t d = 1 + rng.below(40);
    const auto h = sample_hash(rng, n, d);
    const auto x = random_bits(rng, n);
    REQUIRE(oracle::to_ints(h.eval(x)) == oracle::toeplitz_eval(h, oracle::to_ints(x)));
  }
}

TEST_CASE("affinity: H(x ^ y) ^ H(x) ^ H(y) ^ H(0) = 0") {
  Rng rng(11);
  const auto h = sample_hash(rng, 144, 16);
  const BitString zero(144);
  for (int i = 0; i < 5000; ++i) {
    const auto x = random_bits(rng, 144);
    const auto y = random_bits(rng, 144);
    REQUIRE((h.eval(x ^ y) ^ h.eval(x) ^ h.eval(y) ^ h.eval(zero)) == BitString(32));
  }
}

TEST_CASE("collision rate for a fixed pair is about 2^-2d") {
  const std::size_t d = 4;
  Rng rng(4242);
  const auto x = random_bits(rng, 64);
  auto y = x;
  y.set(10, !y[10]);
  constexpr int kTrials = 100000;
  int collisions = 0;
  for (int i = 0; i < kTrials; ++i) {
    const auto h = sample_hash(rng, 64, d);
    collisions += h.eval(x) == h.eval(y);
  }
  const double p = std::ldexp(1.0, -2 * int(d));
  CHECK(std::abs(double(collisions) / kTrials - p) <= 4 * oracle::binomial_sigma(p, kTrials));
}

TEST_CASE("flipping one input bit changes the output with probability 1 - 2^-2d") {
  const std::size_t d = 3;
  Rng rng(5);
  constexpr int kTrials = 40000;
  int changed = 0;
  for (int i = 0; i < kTrials; ++i) {
    const auto h = sample_hash(rng, 32, d);
    const auto x = random_bits(rng, 32);
    auto y = x;
    const auto pos = rng.below(32);
    y.set(pos, !y[pos]);
    changed += h.eval(x) != h.eval(y);
  }
  const double p = 1.0 - std::ldexp(1.0, -2 * int(d));
  CHECK(std::abs(double(changed) / kTrials - p) <= 4 * oracle::binomial_sigma(p, kTrials));
}

TEST_CASE("eval rejects inputs of the wrong length") {
  const auto h = HashFunction::from_seed(1, 16, 2);
  CHECK_THROWS_AS(h.eval(BitString(15)), InputError);
  CHECK_THROWS_AS(HashFunction::from_seed(1, 0, 2), InputError);
  CHECK_THROWS_AS(HashFunction::from_seed(1, 4, 0), InputError);
}

TEST_CASE("nonces: reproducible, balanced, collision free") {
  Rng a(9), b(9);
  CHECK(sample_nonce(a, 128) == sample_nonce(b, 128));
  CHECK_THROWS_AS(sample_nonce(a, 0), InputError);

  constexpr int kTrials = 100000;
  constexpr std::size_t kLen = 16;
  std::vector<int> ones(kLen);
  Rng rng(10);
  for (int i = 0; i < kTrials; ++i) {
    const auto n = sample_nonce(rng, kLen);
    for (std::size_t p = 0; p < kLen; ++p) ones[p] += n.bits[p];
  }
  for (int c : ones) {
    CHECK(std::abs(double(c) / kTrials - 0.5) <= 4 * oracle::binomial_sigma(0.5, kTrials));
  }

  std::set<std::string> seen;
  const Rng root(11);
  for (std::uint64_t s = 0; s < 10000; ++s) {
    Rng session = root.stream(s);
    seen.insert(sample_nonce(session, 128).bits.to_hex());
  }
  CHECK(seen.size() == 10000);
}
