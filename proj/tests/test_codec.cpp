#include <doctest.h>

#include <random>

#include "hsc/codec.hpp"
#include "hsc/error.hpp"
#include "oracles.hpp"

using namespace hsc;
using namespace hsc::codec;

TEST_CASE("parity width follows the smallest-p rule") {
  CHECK(hamming_parity_width(32) == 6);
  CHECK(hamming_parity_width(16) == 5);
  CHECK(hamming_parity_width(8) == 4);
  for (int d = 1; d <= 64; ++d) CHECK(hamming_parity_width(d) == oracle::parity_width(d));
  CHECK_THROWS_AS(hamming_parity_width(0), ParameterError);
  CHECK_THROWS_AS(hamming_parity_width(65), ParameterError);
}

TEST_CASE("frozen hamming vectors") {
  CHECK(hamming_parity({0x00, 8}) == Bits{0b0000, 4});
  CHECK(hamming_parity({0x01, 8}) == Bits{0b0011, 4});
  CHECK(hamming_parity({0xFF, 8}) == Bits{0b0011, 4});
  CHECK(hamming_parity({0xA5, 8}) == Bits{0b0011, 4});
  CHECK(hamming_parity({0xBEEF, 16}) == Bits{0b01110, 5});
  CHECK(hamming_parity({0xFFFF, 16}) == Bits{0b11110, 5});
  CHECK(hamming_parity({0xDEADBEEF, 32}) == Bits{0b100011, 6});
  CHECK(hamming_parity({0x13, 32}) == Bits{0b001111, 6});
  CHECK(hamming_parity({0xFFFFFFFF, 32}) == Bits{0b011000, 6});
}

TEST_CASE("hamming parity agrees with the codeword oracle") {
  for (std::uint64_t x = 0; x < 256; ++x) {
    CHECK(hamming_parity({x, 8}).value == oracle::hamming_parity(x, 8));
  }
  std::mt19937_64 rng(42);
  for (int d : {1, 4, 11, 16, 26, 32, 57, 64}) {
    const std::uint64_t mask = d == 64 ? ~0ULL : (1ULL << d) - 1;
    for (int i = 0; i < 2000; ++i) {
      const std::uint64_t x = rng() & mask;
      REQUIRE(hamming_parity({x, d}).value == oracle::hamming_parity(x, d));
    }
  }
}

TEST_CASE("every data bit is covered and sits at a non-power-of-two position") {
  for (int d : {8, 16, 32}) {
    const auto& layout = hamming_layout(d);
    std::uint64_t covered = 0;
    for (int j = 0; j < layout.parity_width(); ++j) covered |= layout.coverage(j);
    CHECK(covered == ((1ULL << d) - 1));
    for (int b = 0; b < d; ++b) {
      const int pos = layout.position_of(b);
      CHECK((pos & (pos - 1)) != 0);
    }
  }
  CHECK(hamming_layout(8).position_of(0) == 3);
}

TEST_CASE("syndrome") {
  CHECK(hamming_syndrome({0x00, 8}, {0b0001, 4}) == Bits{0b0001, 4});
  for (std::uint64_t x = 0; x < 256; ++x) {
    const auto p = hamming_parity({x, 8});
    CHECK(hamming_syndrome({x, 8}, p).value == 0);
    for (int b = 0; b < 8; ++b) CHECK(hamming_syndrome({x ^ (1ULL << b), 8}, p).value != 0);
  }
  CHECK_THROWS_AS(hamming_syndrome({0, 8}, {0, 5}), ParameterError);
  CHECK_THROWS_AS(hamming_parity({0x100, 8}), ParameterError);
}

TEST_CASE("single-bit errors are corrected exhaustively at d=8") {
  for (std::uint64_t x = 0; x < 256; ++x) {
    const auto p = hamming_parity({x, 8});
    const auto clean = hamming_correct({x, 8}, p);
    CHECK(clean.status == CorrectionStatus::kClean);
    CHECK(clean.data == x);
    for (int b = 0; b < 8; ++b) {
      const auto c = hamming_correct({x ^ (1ULL << b), 8}, p);
      REQUIRE(c.status == CorrectionStatus::kDataCorrected);
      CHECK(c.data == x);
      CHECK(c.bit == b);
    }
  }
}

TEST_CASE("a flipped parity bit is flagged without touching data") {
  const auto p = hamming_parity({0x5A, 8});
  for (int j = 0; j < 4; ++j) {
    const auto c = hamming_correct({0x5A, 8}, {p.value ^ (1ULL << j), 4});
    CHECK(c.status == CorrectionStatus::kParityError);
    CHECK(c.data == 0x5A);
    CHECK(c.bit == j);
  }
}

TEST_CASE("double errors are never silently reported clean") {
  // SEC cannot fix two flips; the decoder either miscorrects or gives up.
  for (std::uint64_t x = 0; x < 256; x += 7) {
    const auto p = hamming_parity({x, 8});
    for (int a = 0; a < 8; ++a) {
      for (int b = a + 1; b < 8; ++b) {
        const auto c = hamming_correct({x ^ (1ULL << a) ^ (1ULL << b), 8}, p);
        CHECK(c.status != CorrectionStatus::kClean);
        CHECK(c.data != x);
      }
    }
  }
}

TEST_CASE("syndromes past the codeword length are uncorrectable") {
  // d=8 uses positions 1..12; syndromes 13..15 name no position.
  const auto c = hamming_correct({0, 8}, {13, 4});
  CHECK(c.status == CorrectionStatus::kUncorrectable);
}

TEST_CASE("single-bit sensitivity on sampled 16 and 32-bit data") {
  std::mt19937_64 rng(7);
  for (int d : {16, 32}) {
    for (int i = 0; i < 10000; ++i) {
      const std::uint64_t x = rng() & ((1ULL << d) - 1);
      const auto p = hamming_parity({x, d});
      for (int b = 0; b < d; ++b) {
        const auto c = hamming_correct({x ^ (1ULL << b), d}, p);
        REQUIRE(c.status == CorrectionStatus::kDataCorrected);
        REQUIRE(c.data == x);
      }
    }
  }
}

TEST_CASE("frozen CRC vectors") {
  CHECK(crc_checkbits({0x01, 8}, kCrc8) == Bits{0x07, 8});
  CHECK(crc_checkbits({0xA5, 8}, kCrc8) == Bits{0x72, 8});
  CHECK(crc_checkbits({0xFF, 8}, kCrc8) == Bits{0xF3, 8});
  CHECK(crc_checkbits({0x1234, 16}, kCrc16).value == 0x13C6);
  CHECK(crc_checkbits({0x313233, 24}, kCrc16).value == 0x9752);
  CHECK(crc_checkbits({0xDEADBEEF, 32}, kCrc32).value == 0x46DEC763);
  CHECK(crc_checkbits({0x13, 32}, kCrc32).value == 0x4152FDA9);
  CHECK(crc_checkbits({0, 32}, kCrc32).value == 0);
}

TEST_CASE("CRC agrees with polynomial long division") {
  for (std::uint64_t x = 0; x < 256; ++x) {
    CHECK(crc_checkbits({x, 8}, kCrc8).value == oracle::crc_long_division(x, 8, 0x07, 8));
  }
  std::mt19937_64 rng(3);
  const CrcParams params[] = {kCrc8, kCrc16, kCrc32, {0x5, 3}, {0x1, 1}};
  for (const auto& cp : params) {
    for (int w : {1, 5, 8, 16, 32, 40}) {
      for (int i = 0; i < 200; ++i) {
        const std::uint64_t x = rng() & ((1ULL << w) - 1);
        REQUIRE(crc_checkbits({x, w}, cp).value ==
                oracle::crc_long_division(x, w, cp.poly, cp.width));
      }
    }
  }
}

TEST_CASE("CRC-8 is a bijection on 8-bit data, so every flip changes it") {
  std::vector<int> seen(256, 0);
  for (std::uint64_t x = 0; x < 256; ++x) {
    const auto c = crc_checkbits({x, 8}, kCrc8).value;
    seen[c]++;
    for (int b = 0; b < 8; ++b) CHECK(crc_checkbits({x ^ (1ULL << b), 8}, kCrc8).value != c);
  }
  for (int n : seen) CHECK(n == 1);
}

TEST_CASE("CRC parameter validation") {
  CHECK_THROWS_AS(crc_checkbits({1, 8}, {0, 8}), ParameterError);
  CHECK_THROWS_AS(crc_checkbits({1, 8}, {0x107, 8}), ParameterError);
  CHECK_THROWS_AS(crc_checkbits({1, 0}, kCrc8), ParameterError);
  CHECK_THROWS_AS(CheckCode(CodeKind::crc_of({0, 16}), 16), ParameterError);
}

TEST_CASE("CheckCode dispatches to the right family") {
  const CheckCode h(CodeKind::hamming(), 8);
  CHECK(h.check_width() == 4);
  CHECK(h.compute(0x01) == 0b0011);
  const CheckCode c(CodeKind::crc_of(kCrc16), 16);
  CHECK(c.check_width() == 16);
  CHECK(c.compute(0x1234) == 0x13C6);
  CHECK(describe(CodeKind::hamming(), 32) == "HSEC:d32:p6");
  CHECK(describe(CodeKind::crc_of(kCrc8), 8) == "CRC:d8:poly=0x7:c8");
}
