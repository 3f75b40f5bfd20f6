#pragma once

// RV32I base-ISA decoding, program images and synthetic benchmark corpora.

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hsc/chunking.hpp"

namespace hsc::riscv {

enum class OpClass {
  kAluReg,
  kAluImm,
  kLoad,
  kStore,
  kBranch,
  kJal,
  kJalr,
  kLui,
  kAuipc,
  kSystem,
  kFence,
  kIllegal,
};

std::string_view to_string(OpClass c);

struct DecodedInstr {
  OpClass op = OpClass::kIllegal;
  std::uint8_t rd = 0;
  std::uint8_t rs1 = 0;
  std::uint8_t rs2 = 0;
  std::uint8_t funct3 = 0;
  std::uint8_t funct7 = 0;
  std::int32_t imm = 0;  // sign-extended; 0 for formats without an immediate
  bool control_flow = false;

  friend bool operator==(const DecodedInstr&, const DecodedInstr&) = default;
};

// Total: every word maps to exactly one class, unknown encodings to kIllegal.
DecodedInstr decode(Word word);

// Immediate extraction per base-ISA format.
std::int32_t imm_i(Word w);
std::int32_t imm_s(Word w);
std::int32_t imm_b(Word w);
std::int32_t imm_u(Word w);
std::int32_t imm_j(Word w);

struct ProgramImage {
  std::string name;
  Word base = 0;
  std::vector<Word> words;

  std::size_t size() const { return words.size(); }
  Word address_of(std::size_t j) const { return base + static_cast<Word>(4 * j); }
  bool contains(Word address) const {
    const Word off = address - base;
    return off % 4 == 0 && off / 4 < words.size();
  }
  // Throws DataError for an empty image, AlignmentError for a misaligned base.
  void validate() const;

  friend bool operator==(const ProgramImage&, const ProgramImage&) = default;
};

// Little-endian words; throws FormatError carrying the byte offset of a
// trailing partial word.
ProgramImage load_image_bytes(std::span<const std::uint8_t> bytes, Word base = 0,
                              std::string name = {});
// One 8-hex-digit word per line, '#' starts a comment, blank lines skipped.
// Throws FormatError carrying the 1-based line number.
ProgramImage load_image_hex(std::string_view text, Word base = 0, std::string name = {});

std::vector<std::uint8_t> image_to_bytes(const ProgramImage& image);
std::string image_to_hex(const ProgramImage& image);

// Loads .hex as hex text and anything else as raw binary. An optional
// sidecar "<path>.meta" (key=value lines, keys name and base) overrides the
// defaults; the name otherwise defaults to the file stem.
ProgramImage load_image_file(const std::filesystem::path& path);
void save_image_file(const ProgramImage& image, const std::filesystem::path& path,
                     bool write_sidecar = true);

// Relative instruction-class weights for the synthetic generator.
struct InstructionMix {
  double alu = 0.55;
  double memory = 0.20;  // split evenly between loads and stores
  double branch = 0.15;
  double jal = 0.05;
  double upper = 0.05;  // LUI / AUIPC
  // Fraction of words emitted in a compact form (x0/x1 base registers, zero
  // or tiny immediates) whose upper halfword is zero. Real code is dominated
  // by such encodings; raising it lowers the entropy of the upper halfword.
  double compact_fraction = 0.3;
};

// Deterministic under `seed`. Every word decodes to a non-illegal class and
// every branch / JAL target is word-aligned and inside the image.
ProgramImage gen_synthetic(std::size_t size, std::uint64_t seed, const InstructionMix& mix = {},
                           Word base = 0, std::string name = {});

}  // namespace hsc::riscv
