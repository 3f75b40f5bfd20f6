#include <doctest.h>

#include <filesystem>
#include <random>

#include "hsc/error.hpp"
#include "hsc/riscv.hpp"
#include "oracles.hpp"

using namespace hsc;
using namespace hsc::riscv;

TEST_CASE("decode examples") {
  CHECK(decode(0x00000013).op == OpClass::kAluImm);
  const auto j = decode(0x0000006F);
  CHECK(j.op == OpClass::kJal);
  CHECK(j.imm == 0);
  CHECK(j.control_flow);
  CHECK(decode(0xFFFFFFFF).op == OpClass::kIllegal);
  CHECK(decode(0x00000000).op == OpClass::kIllegal);
  CHECK(decode(0x00000073).op == OpClass::kSystem);
  CHECK(decode(0x30200073).op == OpClass::kIllegal);  // mret is outside RV32I
}

TEST_CASE("decode classes agree with the mask/match table") {
  std::mt19937 rng(17);
  const auto& table = oracle::rv32i_encodings();
  // Random words plus words forced onto each listed encoding.
  for (int i = 0; i < 200000; ++i) {
    Word w = rng();
    if (i % 2) {
      const auto& e = table[rng() % table.size()];
      w = (w & ~e.mask) | e.match;
    }
    REQUIRE(std::string(to_string(decode(w).op)) == oracle::classify(w));
  }
}

TEST_CASE("decoded immediates follow the format layouts") {
  std::mt19937 rng(23);
  for (int i = 0; i < 50000; ++i) {
    const Word w = rng();
    CHECK(imm_i(w) == oracle::imm_i(w));
    CHECK(imm_s(w) == oracle::imm_s(w));
    CHECK(imm_b(w) == oracle::imm_b(w));
    CHECK(imm_u(w) == oracle::imm_u(w));
    CHECK(imm_j(w) == oracle::imm_j(w));
  }
  // beq x0, x0, -4 and jal x0, -8
  CHECK(decode(0xFE000EE3).imm == -4);
  CHECK(decode(0xFF9FF06F).imm == -8);
  // sw x5, -12(x2)
  const auto s = decode(0xFE512A23);
  CHECK(s.op == OpClass::kStore);
  CHECK(s.imm == -12);
  CHECK(s.rs1 == 2);
  CHECK(s.rs2 == 5);
  // srai x10, x11, 3 reports the shift amount
  const auto sh = decode(0x4035D513);
  CHECK(sh.op == OpClass::kAluImm);
  CHECK(sh.imm == 3);
  CHECK(sh.rd == 10);
}

TEST_CASE("binary loading") {
  const std::uint8_t one[] = {0x13, 0x00, 0x00, 0x00};
  const auto img = load_image_bytes(one, 0x100, "t");
  REQUIRE(img.size() == 1);
  CHECK(img.words[0] == 0x00000013);
  CHECK(img.base == 0x100);
  const std::uint8_t five[] = {0x13, 0, 0, 0, 0x6F};
  try {
    load_image_bytes(five);
    FAIL("expected a format error");
  } catch (const FormatError& e) {
    CHECK(e.location() == 4);
  }
}

TEST_CASE("hex loading") {
  const auto img = load_image_hex("# header\n00000013\n\n0x0000006f  # jump\n");
  CHECK(img.words == std::vector<Word>{0x13, 0x6F});
  try {
    load_image_hex("00000013\n0000zz13\n");
    FAIL("expected a format error");
  } catch (const FormatError& e) {
    CHECK(e.location() == 2);
  }
  CHECK_THROWS_AS(load_image_hex("0013\n"), FormatError);
}

TEST_CASE("image validation") {
  ProgramImage empty;
  CHECK_THROWS_AS(empty.validate(), DataError);
  ProgramImage odd{"x", 2, {0x13}};
  CHECK_THROWS_AS(odd.validate(), AlignmentError);
  const ProgramImage ok{"x", 0x40, {1, 2, 3}};
  CHECK(ok.contains(0x48));
  CHECK_FALSE(ok.contains(0x4C));
  CHECK_FALSE(ok.contains(0x42));
  CHECK(ok.address_of(2) == 0x48);
}

TEST_CASE("file round trips with sidecar metadata") {
  const auto dir = std::filesystem::temp_directory_path() / "hsc_riscv_test";
  std::filesystem::create_directories(dir);
  const auto img = gen_synthetic(100, 5, {}, 0x2000, "roundtrip");
  for (const char* file : {"img.hex", "img.bin"}) {
    const auto path = dir / file;
    save_image_file(img, path);
    CHECK(load_image_file(path) == img);
  }
  CHECK(load_image_hex(image_to_hex(img), img.base, img.name) == img);
  CHECK(load_image_bytes(image_to_bytes(img), img.base, img.name) == img);
  std::filesystem::remove_all(dir);
}

TEST_CASE("synthetic images") {
  const auto a = gen_synthetic(216, 1);
  CHECK(a.size() == 216);
  CHECK(a == gen_synthetic(216, 1));
  CHECK_FALSE(a.words == gen_synthetic(216, 2).words);
  CHECK(gen_synthetic(4466, 7).size() == 4466);
  CHECK_THROWS_AS(gen_synthetic(0, 1), ParameterError);
  InstructionMix bad;
  bad.alu = -1;
  CHECK_THROWS_AS(gen_synthetic(10, 1, bad), ParameterError);
  InstructionMix none{0, 0, 0, 0, 0, 0.3};
  CHECK_THROWS_AS(gen_synthetic(10, 1, none), ParameterError);
}

TEST_CASE("generated words decode and control flow stays inside the image") {
  for (std::size_t size : {1, 2, 216, 1288}) {
    for (double compact : {0.0, 0.3, 0.9}) {
      InstructionMix mix;
      mix.compact_fraction = compact;
      const auto img = gen_synthetic(size, 3, mix, 0x400);
      for (std::size_t j = 0; j < img.size(); ++j) {
        const auto d = decode(img.words[j]);
        REQUIRE(d.op != OpClass::kIllegal);
        REQUIRE(oracle::classify(img.words[j]) != "ILLEGAL");
        if (d.op == OpClass::kBranch || d.op == OpClass::kJal) {
          const auto target = static_cast<std::int64_t>(img.address_of(j)) + d.imm;
          REQUIRE(target % 4 == 0);
          REQUIRE(img.contains(static_cast<Word>(target)));
        }
      }
    }
  }
}

TEST_CASE("compact fraction lowers upper-halfword entropy") {
  InstructionMix mix;
  mix.compact_fraction = 0.9;
  const auto img = gen_synthetic(2000, 4, mix);
  std::size_t zero_upper = 0;
  for (Word w : img.words) zero_upper += (w >> 16) == 0;
  CHECK(zero_upper > img.size() * 7 / 10);
}
