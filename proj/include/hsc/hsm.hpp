#pragma once

// One Hardware Security Module: k ECC shadow memories indexed by word offset,
// written once while the program is installed and compared on every fetch.

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hsc/chunking.hpp"
#include "hsc/codec.hpp"

namespace hsc {

enum class UnconfiguredPolicy {
  kValidBit,  // each entry carries a valid bit; querying an unwritten entry alarms
  kZeroInit,  // entries start as all-zero check bits, no valid bit
};

std::string_view to_string(UnconfiguredPolicy p);
UnconfiguredPolicy parse_unconfigured_policy(std::string_view s);

enum class Mode { kConfigure, kQuery };

struct HsmSpec {
  ChunkingSpec chunking;
  codec::CodeKind code;
  std::uint32_t depth = 1;  // D
  Word base = 0;
  UnconfiguredPolicy unconfigured = UnconfiguredPolicy::kZeroInit;
  std::string name;  // optional display label, e.g. "HSEC32"

  // Check bits stored per entry (p for Hamming, c for CRC).
  int entry_width() const;
  // Throws ParameterError on any violated invariant (D >= 1, chunking, code).
  void validate() const;
  std::string label() const;

  friend bool operator==(const HsmSpec&, const HsmSpec&) = default;
};

enum class VerdictReason { kMatch, kParityMismatch, kUnconfiguredEntry };

std::string_view to_string(VerdictReason r);

struct Verdict {
  bool alarm = false;
  std::uint32_t bank_mismatch = 0;  // bit i set when bank i disagreed
  VerdictReason reason = VerdictReason::kMatch;

  bool bank_flagged(int bank) const { return (bank_mismatch >> bank) & 1U; }

  friend bool operator==(const Verdict&, const Verdict&) = default;
};

class Hsm {
 public:
  explicit Hsm(HsmSpec spec);

  const HsmSpec& spec() const { return spec_; }
  Mode mode() const { return mode_; }
  int banks() const { return spec_.chunking.fragments; }

  // Writes the check bits of every chunk at memory_index(address). Last write
  // wins on an index collision; collisions() counts them.
  void configure(Word address, Word instruction);
  void switch_to_query();
  // Clears all memories and returns to CONFIGURE mode.
  void reset();

  Verdict query(Word address, Word instruction) const;

  // Bit i set when bank i holds an entry equal to the recomputed check bits.
  // Unwritten entries never match under the valid-bit policy. Mode-agnostic;
  // used by the analytical estimator.
  std::uint32_t match_mask(Word address, Word instruction) const;
  bool configured(std::uint32_t index) const;
  std::uint32_t entry(int bank, std::uint32_t index) const;

  std::uint64_t storage_bits() const;
  std::uint64_t collisions() const { return collisions_; }

  // Flat binary snapshot: versioned header, then the banks in order, each a
  // bit-packed run of D entries (LSB-first, valid bit above the check bits).
  std::vector<std::uint8_t> serialize() const;
  // Parses one snapshot starting at `bytes`; `consumed` receives its length.
  static Hsm deserialize(std::span<const std::uint8_t> bytes, std::size_t* consumed = nullptr);

 private:
  std::uint32_t index_of(Word address) const;
  std::uint32_t compute(int bank, Word address, Word instruction) const {
    return codes_[static_cast<std::size_t>(bank)].compute(
        chunk_at(address, instruction, spec_.chunking, bank));
  }

  HsmSpec spec_;
  std::vector<codec::CheckCode> codes_;
  Mode mode_ = Mode::kConfigure;
  std::vector<std::uint32_t> entries_;  // [index * k + bank]
  std::vector<std::uint8_t> written_;   // per index
  std::uint64_t collisions_ = 0;
};

}  // namespace hsc
