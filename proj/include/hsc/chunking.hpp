#pragma once

// Data path from a fetched (address, instruction) pair to the k codec inputs
// and the ECC-memory index shared by the banks of a module.

#include <array>
#include <cstdint>
#include <span>
#include <string_view>

namespace hsc {

using Word = std::uint32_t;

inline constexpr int kMaxWordWidth = 32;
inline constexpr int kMaxFragments = 32;
inline constexpr Word kWordBytes = 4;

enum class Coupling {
  kXor,     // chunk_i = addr_slice_i ^ instr_slice_i      (n/k bits)
  kConcat,  // chunk_i = addr_slice_i : instr_slice_i      (2n/k bits)
};

std::string_view to_string(Coupling c);
Coupling parse_coupling(std::string_view s);

struct ChunkingSpec {
  int word_width = 32;  // n
  int fragments = 1;    // k
  Coupling coupling = Coupling::kXor;

  int slice_width() const { return word_width / fragments; }
  int codec_width() const { return coupling == Coupling::kXor ? slice_width() : 2 * slice_width(); }
  Word word_mask() const {
    return word_width >= 32 ? ~Word{0} : (Word{1} << word_width) - 1;
  }
  // Throws ParameterError unless 1 <= n <= 32 and k divides n.
  void validate() const;

  friend bool operator==(const ChunkingSpec&, const ChunkingSpec&) = default;
};

// Chunk i of the pair; chunk 0 is the most-significant slice. Inputs are
// truncated to n bits.
inline std::uint64_t chunk_at(Word address, Word instruction, const ChunkingSpec& spec, int i) {
  const int w = spec.slice_width();
  const int shift = spec.word_width - (i + 1) * w;
  const std::uint64_t m = (std::uint64_t{1} << w) - 1;
  const std::uint64_t a = (address >> shift) & m;
  const std::uint64_t b = (instruction >> shift) & m;
  return spec.coupling == Coupling::kXor ? (a ^ b) : ((a << w) | b);
}

class ChunkVector {
 public:
  ChunkVector() = default;
  ChunkVector(int count, int width) : size_(count), width_(width) {}

  int size() const { return size_; }
  int width() const { return width_; }
  std::uint64_t operator[](int i) const { return chunks_[static_cast<std::size_t>(i)]; }
  std::uint64_t& operator[](int i) { return chunks_[static_cast<std::size_t>(i)]; }
  std::span<const std::uint64_t> values() const {
    return {chunks_.data(), static_cast<std::size_t>(size_)};
  }

  friend bool operator==(const ChunkVector& a, const ChunkVector& b) {
    if (a.size_ != b.size_ || a.width_ != b.width_) return false;
    for (int i = 0; i < a.size_; ++i) {
      if (a[i] != b[i]) return false;
    }
    return true;
  }

 private:
  std::array<std::uint64_t, kMaxFragments> chunks_{};
  int size_ = 0;
  int width_ = 0;
};

ChunkVector make_chunks(Word address, Word instruction, const ChunkingSpec& spec);

enum class IndexPolicy { kOffsetModDepth };

// ((address - base) / 4) mod depth, with the subtraction wrapping in n bits.
// Throws AlignmentError for a non-word-aligned address, ParameterError for
// depth 0.
std::uint32_t memory_index(Word address, Word base, std::uint32_t depth, int word_width = 32,
                           IndexPolicy policy = IndexPolicy::kOffsetModDepth);

}  // namespace hsc
