#include <doctest.h>

#include <cmath>
#include <random>

#include "hsc/error.hpp"
#include "hsc/hsm.hpp"
#include "oracles.hpp"

using namespace hsc;

namespace {

HsmSpec hsec(int k, std::uint32_t depth, UnconfiguredPolicy policy = UnconfiguredPolicy::kZeroInit,
             Word base = 0) {
  HsmSpec s;
  s.chunking = {32, k, Coupling::kXor};
  s.code = codec::CodeKind::hamming();
  s.depth = depth;
  s.base = base;
  s.unconfigured = policy;
  return s;
}

std::uint64_t content_hash(const Hsm& h) {
  std::uint64_t acc = 1469598103934665603ULL;
  for (std::uint32_t i = 0; i < h.spec().depth; ++i) {
    for (int b = 0; b < h.banks(); ++b) acc = (acc ^ h.entry(b, i)) * 1099511628211ULL;
    acc = (acc ^ h.configured(i)) * 1099511628211ULL;
  }
  return acc;
}

}  // namespace

TEST_CASE("configure then query round trip") {
  Hsm h(hsec(1, 4));
  h.configure(0, 0x00000013);
  h.switch_to_query();
  const auto v = h.query(0, 0x00000013);
  CHECK_FALSE(v.alarm);
  CHECK(v.reason == VerdictReason::kMatch);
  CHECK(v.bank_mismatch == 0);
}

TEST_CASE("mode discipline") {
  Hsm h(hsec(4, 8));
  CHECK(h.mode() == Mode::kConfigure);
  CHECK_THROWS_AS(h.query(0, 0), ModeError);
  h.configure(0, 1);
  h.switch_to_query();
  CHECK_NOTHROW(h.switch_to_query());  // idempotent
  CHECK(h.mode() == Mode::kQuery);
  CHECK_THROWS_AS(h.configure(4, 2), ModeError);
  h.reset();
  CHECK(h.mode() == Mode::kConfigure);
  CHECK(h.entry(0, 0) == 0);
}

TEST_CASE("alignment and spec errors") {
  Hsm h(hsec(1, 8));
  CHECK_THROWS_AS(h.configure(2, 0), AlignmentError);
  h.switch_to_query();
  CHECK_THROWS_AS(h.query(6, 0), AlignmentError);
  CHECK_THROWS_AS(Hsm(hsec(1, 0)), ParameterError);
  CHECK_THROWS_AS(Hsm(hsec(3, 8)), ParameterError);
  CHECK_THROWS_AS(Hsm(hsec(1, 8, UnconfiguredPolicy::kZeroInit, 2)), AlignmentError);
}

TEST_CASE("stored check bits come from the chunk codec") {
  Hsm h(hsec(4, 4));
  const Word addr = 8, instr = 0xDEADBEEF;
  h.configure(addr, instr);
  const auto chunks = oracle::chunks(addr, instr, 32, 4, false);
  for (int b = 0; b < 4; ++b) CHECK(h.entry(b, 2) == oracle::hamming_parity(chunks[b], 8));
}

TEST_CASE("equal chunks store equal check bits") {
  Hsm h(hsec(4, 4));
  h.configure(0, 0x11223344);
  h.configure(4, 0x11AA3344 ^ 0x00000004);  // chunk 0 and 2 equal after XOR with address
  CHECK(h.entry(0, 0) == h.entry(0, 1));
  CHECK(h.entry(2, 0) == h.entry(2, 1));
}

TEST_CASE("last write wins on collisions and is counted") {
  Hsm h(hsec(1, 2));
  h.configure(0, 0x13);
  h.configure(8, 0x93);  // same index as address 0
  CHECK(h.collisions() == 1);
  h.switch_to_query();
  CHECK_FALSE(h.query(8, 0x93).alarm);
  CHECK(h.entry(0, 0) == oracle::hamming_parity(8 ^ 0x93, 32));
}

TEST_CASE("single-bit instruction corruption always alarms") {
  std::mt19937 rng(1);
  for (int k : {1, 2, 4}) {
    Hsm h(hsec(k, 64));
    std::vector<Word> words(64);
    for (std::size_t i = 0; i < words.size(); ++i) {
      words[i] = rng();
      h.configure(static_cast<Word>(4 * i), words[i]);
    }
    h.switch_to_query();
    for (std::size_t i = 0; i < words.size(); ++i) {
      for (int b = 0; b < 32; ++b) {
        const auto v = h.query(static_cast<Word>(4 * i), words[i] ^ (1u << b));
        REQUIRE(v.alarm);
        CHECK(v.reason == VerdictReason::kParityMismatch);
        CHECK(__builtin_popcount(v.bank_mismatch) == 1);
      }
    }
  }
}

TEST_CASE("valid-bit policy alarms on unwritten entries") {
  Hsm h(hsec(4, 8, UnconfiguredPolicy::kValidBit));
  h.configure(0, 0x13);
  h.switch_to_query();
  const auto v = h.query(12, 0x00000000);
  CHECK(v.alarm);
  CHECK(v.reason == VerdictReason::kUnconfiguredEntry);
  CHECK_FALSE(h.configured(3));
  CHECK(h.configured(0));
  CHECK(h.match_mask(12, 0) == 0);
}

TEST_CASE("zero-init policy matches all-zero check bits on unwritten entries") {
  Hsm h(hsec(1, 8));
  h.configure(0, 0x13);
  h.switch_to_query();
  // Address 12 XOR instruction 12 is chunk 0, whose parity is zero.
  CHECK_FALSE(h.query(12, 12).alarm);
  CHECK(h.query(12, 13).alarm);
}

TEST_CASE("storage bits") {
  CHECK(Hsm(hsec(1, 1288)).storage_bits() == 7728);
  CHECK(Hsm(hsec(4, 1288)).storage_bits() == 20608);
  CHECK(Hsm(hsec(4, 1288, UnconfiguredPolicy::kValidBit)).storage_bits() == 4 * 1288 * 5);
  HsmSpec crc = hsec(2, 100);
  crc.code = codec::CodeKind::crc_of(codec::kCrc16);
  CHECK(Hsm(crc).storage_bits() == 2 * 100 * 16);
}

TEST_CASE("queries never mutate memory") {
  std::mt19937 rng(4);
  Hsm h(hsec(4, 32, UnconfiguredPolicy::kValidBit));
  for (Word i = 0; i < 20; ++i) h.configure(4 * i, rng());
  h.switch_to_query();
  const auto before = content_hash(h);
  const auto snap = h.serialize();
  for (int i = 0; i < 20000; ++i) (void)h.query(4 * (rng() % 64), rng());
  CHECK(content_hash(h) == before);
  CHECK(h.serialize() == snap);
}

TEST_CASE("random probes match a configured bank at about 2^-p") {
  // One HSEC8 bank, p=4: the match frequency over 1e5 random words must sit
  // within three binomial standard deviations of 1/16.
  Hsm h(hsec(4, 16));
  std::mt19937 rng(99);
  for (Word i = 0; i < 16; ++i) h.configure(4 * i, rng());
  h.switch_to_query();
  constexpr int kProbes = 100000;
  int hits[4] = {};
  for (int i = 0; i < kProbes; ++i) {
    const auto mask = h.match_mask(4 * (rng() % 16), rng());
    for (int b = 0; b < 4; ++b) hits[b] += (mask >> b) & 1;
  }
  const double p = 1.0 / 16, sd = std::sqrt(kProbes * p * (1 - p));
  for (int b = 0; b < 4; ++b) CHECK(std::abs(hits[b] - kProbes * p) < 3 * sd);
}

TEST_CASE("snapshot round trip") {
  for (auto policy : {UnconfiguredPolicy::kValidBit, UnconfiguredPolicy::kZeroInit}) {
    HsmSpec spec = hsec(4, 37, policy, 0x1000);
    spec.name = "probe";
    Hsm h(spec);
    std::mt19937 rng(8);
    for (Word i = 0; i < 30; ++i) h.configure(0x1000 + 4 * i, rng());
    h.switch_to_query();
    const auto bytes = h.serialize();
    std::size_t used = 0;
    const Hsm back = Hsm::deserialize(bytes, &used);
    CHECK(used == bytes.size());
    CHECK(back.spec() == h.spec());
    CHECK(back.mode() == Mode::kQuery);
    CHECK(back.serialize() == bytes);
    for (std::uint32_t i = 0; i < 37; ++i) {
      for (int b = 0; b < 4; ++b) CHECK(back.entry(b, i) == h.entry(b, i));
      if (policy == UnconfiguredPolicy::kValidBit) CHECK(back.configured(i) == h.configured(i));
    }
  }
}

TEST_CASE("snapshot round trip for CRC and CONCAT") {
  HsmSpec spec = hsec(2, 9);
  spec.code = codec::CodeKind::crc_of(codec::kCrc16);
  spec.chunking.coupling = Coupling::kConcat;
  Hsm h(spec);
  h.configure(0, 0xCAFEBABE);
  h.configure(4, 0x00000013);
  const auto bytes = h.serialize();
  const Hsm back = Hsm::deserialize(bytes);
  CHECK(back.spec() == spec);
  CHECK(back.mode() == Mode::kConfigure);
  CHECK(back.entry(1, 1) == h.entry(1, 1));
}

TEST_CASE("corrupt snapshots are rejected") {
  Hsm h(hsec(1, 4));
  h.configure(0, 0x13);
  auto bytes = h.serialize();
  auto bad_magic = bytes;
  bad_magic[0] = 'X';
  CHECK_THROWS_AS(Hsm::deserialize(bad_magic), FormatError);
  auto truncated = bytes;
  truncated.resize(bytes.size() - 1);
  CHECK_THROWS_AS(Hsm::deserialize(truncated), FormatError);
  auto bad_version = bytes;
  bad_version[4] = 99;
  CHECK_THROWS_AS(Hsm::deserialize(bad_version), FormatError);
}

TEST_CASE("toy geometry agrees with a direct table on all address/instruction pairs") {
  // n=8, k=2, D=16: each 4-bit chunk carries a 3-bit Hamming parity.
  HsmSpec spec;
  spec.chunking = {8, 2, Coupling::kXor};
  spec.code = codec::CodeKind::hamming();
  spec.depth = 16;
  Hsm h(spec);
  std::mt19937 rng(21);
  std::vector<std::pair<Word, Word>> table(16);
  for (Word i = 0; i < 12; ++i) {  // four slots left unwritten
    table[i] = {4 * i, rng() & 0xFF};
    h.configure(table[i].first, table[i].second);
  }
  h.switch_to_query();
  int checked = 0;
  for (Word a = 0; a < 256; ++a) {
    for (Word ins = 0; ins < 256; ++ins) {
      if (a % 4) {
        CHECK_THROWS_AS(h.query(a, ins), AlignmentError);
        continue;
      }
      const auto& [sa, si] = table[(a / 4) % 16];
      const auto want = oracle::chunks(sa, si, 8, 2, false);
      const auto got = oracle::chunks(a, ins, 8, 2, false);
      std::uint32_t expect_mask = 0;
      for (int b = 0; b < 2; ++b) {
        if (oracle::hamming_parity(want[b], 4) != oracle::hamming_parity(got[b], 4)) {
          expect_mask |= 1u << b;
        }
      }
      const auto v = h.query(a, ins);
      REQUIRE(v.bank_mismatch == expect_mask);
      REQUIRE(v.alarm == (expect_mask != 0));
      ++checked;
    }
  }
  CHECK(checked == 64 * 256);
}
