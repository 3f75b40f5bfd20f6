#include <doctest.h>

#include <random>

#include "hsc/chunking.hpp"
#include "hsc/error.hpp"
#include "oracles.hpp"

using namespace hsc;

namespace {

std::vector<std::uint64_t> as_vector(const ChunkVector& v) {
  return {v.values().begin(), v.values().end()};
}

}  // namespace

TEST_CASE("worked chunk examples") {
  const ChunkingSpec xor4{32, 4, Coupling::kXor};
  CHECK(as_vector(make_chunks(0, 0, xor4)) == std::vector<std::uint64_t>{0, 0, 0, 0});
  CHECK(as_vector(make_chunks(0xAABBCCDD, 0x11223344, xor4)) ==
        std::vector<std::uint64_t>{0xBB, 0x99, 0xFF, 0x99});
  const ChunkingSpec cat1{32, 1, Coupling::kConcat};
  const auto c = make_chunks(0xAABBCCDD, 0x11223344, cat1);
  CHECK(c.size() == 1);
  CHECK(c.width() == 64);
  CHECK(c[0] == 0xAABBCCDD11223344ULL);
}

TEST_CASE("make_chunks matches the bitwise slicer") {
  std::mt19937 rng(11);
  for (int n : {8, 16, 32}) {
    for (int k = 1; k <= n; ++k) {
      if (n % k) continue;
      for (bool concat : {false, true}) {
        const ChunkingSpec spec{n, k, concat ? Coupling::kConcat : Coupling::kXor};
        for (int i = 0; i < 50; ++i) {
          const Word mask = n == 32 ? ~Word{0} : (Word{1} << n) - 1;
          const Word a = rng() & mask, b = rng() & mask;
          REQUIRE(as_vector(make_chunks(a, b, spec)) == oracle::chunks(a, b, n, k, concat));
        }
      }
    }
  }
}

TEST_CASE("CONCAT chunks reassemble both words") {
  std::mt19937 rng(5);
  const ChunkingSpec spec{32, 4, Coupling::kConcat};
  for (int i = 0; i < 100; ++i) {
    const Word a = rng(), b = rng();
    const auto c = make_chunks(a, b, spec);
    Word ra = 0, rb = 0;
    for (int j = 0; j < 4; ++j) {
      ra = ra << 8 | static_cast<Word>(c[j] >> 8);
      rb = rb << 8 | static_cast<Word>(c[j] & 0xFF);
    }
    CHECK(ra == a);
    CHECK(rb == b);
  }
}

TEST_CASE("a single-bit change alters exactly one chunk") {
  std::mt19937 rng(9);
  for (auto coupling : {Coupling::kXor, Coupling::kConcat}) {
    const ChunkingSpec spec{32, 4, coupling};
    for (int i = 0; i < 50; ++i) {
      const Word a = rng(), b = rng();
      const auto base = make_chunks(a, b, spec);
      for (int bit = 0; bit < 32; ++bit) {
        for (bool on_address : {true, false}) {
          const auto m = on_address ? make_chunks(a ^ (1u << bit), b, spec)
                                    : make_chunks(a, b ^ (1u << bit), spec);
          int differ = 0;
          for (int j = 0; j < 4; ++j) differ += m[j] != base[j];
          REQUIRE(differ == 1);
        }
      }
    }
  }
}

TEST_CASE("XOR coupling is blind to identical masks on address and instruction") {
  const ChunkingSpec spec{32, 4, Coupling::kXor};
  const Word a = 0x00001234, b = 0x00400093;
  const Word mask = 0x00FF0000;  // lands entirely in chunk 1
  const auto base = make_chunks(a, b, spec);
  CHECK(make_chunks(a ^ mask, b ^ mask, spec) == base);
  CHECK_FALSE(make_chunks(a ^ mask, b, spec) == base);
  const ChunkingSpec cat{32, 4, Coupling::kConcat};
  CHECK_FALSE(make_chunks(a ^ mask, b ^ mask, cat) == make_chunks(a, b, cat));
}

TEST_CASE("chunking spec validation") {
  CHECK_NOTHROW(ChunkingSpec{32, 4, Coupling::kXor}.validate());
  CHECK_THROWS_AS((ChunkingSpec{32, 3, Coupling::kXor}.validate()), ParameterError);
  CHECK_THROWS_AS((ChunkingSpec{32, 0, Coupling::kXor}.validate()), ParameterError);
  CHECK_THROWS_AS((ChunkingSpec{33, 1, Coupling::kXor}.validate()), ParameterError);
  CHECK(parse_coupling("CONCAT") == Coupling::kConcat);
  CHECK(to_string(Coupling::kXor) == "XOR");
  CHECK_THROWS_AS(parse_coupling("xor"), ParameterError);
}

TEST_CASE("memory index") {
  const Word base = 0x80000000;
  CHECK(memory_index(base, base, 7) == 0);
  CHECK(memory_index(base + 4 * 5, base, 4096) == 5);
  CHECK(memory_index(base + 4 * (1288 + 3), base, 1288) == 3);
  // wraps below the base
  CHECK(memory_index(base - 4, base, 16) == (0x3FFFFFFFu % 16));
  CHECK_THROWS_AS(memory_index(base + 2, base, 16), AlignmentError);
  CHECK_THROWS_AS(memory_index(base, base, 0), ParameterError);
}
