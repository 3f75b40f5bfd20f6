#pragma once

// Check-bit generators used by the security modules: a parameterized Hamming
// single-error-correcting code and bitwise (MSB-first) CRC.

#include <array>
#include <cstdint>
#include <string>

namespace hsc::codec {

inline constexpr int kMaxDataWidth = 64;
inline constexpr int kMaxParityWidth = 7;  // 2^7 >= 64 + 7 + 1

// A bit vector of at most 64 bits. Bit 0 is the least-significant bit.
struct Bits {
  std::uint64_t value = 0;
  int width = 0;

  friend bool operator==(const Bits&, const Bits&) = default;
};

// Smallest p with 2^p >= d + p + 1. Throws ParameterError unless 1 <= d <= 64.
int hamming_parity_width(int data_width);

enum class CorrectionStatus {
  kClean,          // zero syndrome
  kDataCorrected,  // syndrome named a data bit, which was flipped back
  kParityError,    // syndrome named a parity position; data is untouched
  kUncorrectable,  // syndrome names no position of the codeword
};

struct Correction {
  CorrectionStatus status = CorrectionStatus::kClean;
  std::uint64_t data = 0;
  int bit = -1;  // data bit or parity index that was flagged, -1 otherwise
};

// Classical power-of-two Hamming construction. Codeword positions are
// 1..d+p; powers of two hold parity, data bits fill the remaining positions
// in ascending order starting with data bit 0. Parity j covers every data
// position whose index has bit j set.
class HammingLayout {
 public:
  explicit HammingLayout(int data_width);

  int data_width() const { return data_width_; }
  int parity_width() const { return parity_width_; }
  int codeword_width() const { return data_width_ + parity_width_; }

  // Mask of the data bits covered by parity j.
  std::uint64_t coverage(int parity_index) const;
  // 1-based codeword position of a data bit.
  int position_of(int data_bit) const;

  // Hot path: no width validation. `data` must fit in data_width() bits.
  std::uint32_t parity_unchecked(std::uint64_t data) const {
    std::uint32_t out = 0;
    for (int j = 0; j < parity_width_; ++j) {
      out |= static_cast<std::uint32_t>(__builtin_popcountll(data & coverage_[j]) & 1) << j;
    }
    return out;
  }

  std::uint32_t parity(std::uint64_t data) const;
  std::uint32_t syndrome(std::uint64_t data, std::uint32_t stored_parity) const;
  Correction correct(std::uint64_t data, std::uint32_t stored_parity) const;

 private:
  void check_data(std::uint64_t data) const;
  void check_parity(std::uint32_t parity) const;

  int data_width_;
  int parity_width_;
  std::array<std::uint64_t, kMaxParityWidth> coverage_{};
  std::array<std::int8_t, kMaxDataWidth> position_{};
  // codeword position -> data bit, or -1 for parity / unused positions
  std::array<std::int8_t, 128> data_bit_at_{};
};

// Shared, lazily built layout for a data width in [1, 64].
const HammingLayout& hamming_layout(int data_width);

Bits hamming_parity(Bits data);
Bits hamming_syndrome(Bits data, Bits stored_parity);
Correction hamming_correct(Bits data, Bits stored_parity);

// Generator polynomial without its implicit leading x^width term, MSB-first.
struct CrcParams {
  std::uint64_t poly = 0;
  int width = 0;

  friend bool operator==(const CrcParams&, const CrcParams&) = default;
};

inline constexpr CrcParams kCrc8{0x07, 8};
inline constexpr CrcParams kCrc16{0x1021, 16};
inline constexpr CrcParams kCrc32{0x04C11DB7, 32};

// Remainder of data * x^c divided by the generator; init 0, no reflection,
// no final XOR. Throws ParameterError on a zero polynomial, a polynomial
// wider than its width, or c outside [1, 32].
Bits crc_checkbits(Bits data, CrcParams params);

// Unchecked kernel used on the query path.
std::uint32_t crc_remainder(std::uint64_t data, int data_width, CrcParams params);

enum class CodeFamily { kHamming, kCrc };

struct CodeKind {
  CodeFamily family = CodeFamily::kHamming;
  CrcParams crc{};  // only meaningful for kCrc

  static CodeKind hamming() { return {}; }
  static CodeKind crc_of(CrcParams p) { return {CodeFamily::kCrc, p}; }

  friend bool operator==(const CodeKind&, const CodeKind&) = default;
};

// Validates the CRC invariants (degree == c, c >= 1). No-op for Hamming.
void validate(const CodeKind& kind);

// Human-readable code label, e.g. "HSEC:d32:p6" or "CRC:d8:poly=0x7:c8".
std::string describe(const CodeKind& kind, int data_width);

// A code bound to one data width: what a bank of an HSM evaluates per chunk.
class CheckCode {
 public:
  CheckCode(CodeKind kind, int data_width);

  const CodeKind& kind() const { return kind_; }
  int data_width() const { return data_width_; }
  int check_width() const { return check_width_; }

  std::uint32_t compute(std::uint64_t data) const {
    return kind_.family == CodeFamily::kHamming ? layout_->parity_unchecked(data)
                                                : crc_remainder(data, data_width_, kind_.crc);
  }

 private:
  CodeKind kind_;
  int data_width_;
  int check_width_;
  const HammingLayout* layout_ = nullptr;
};

// Identifier of the Hamming construction, printed for provenance.
inline constexpr const char* kHammingConstructionId = "hamming-pow2-positions/lsb-first-data/v1";

}  // namespace hsc::codec
