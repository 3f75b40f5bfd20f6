#include "hsc/chunking.hpp"

#include <string>

#include "hsc/error.hpp"

namespace hsc {

std::string_view to_string(Coupling c) { return c == Coupling::kXor ? "XOR" : "CONCAT"; }

Coupling parse_coupling(std::string_view s) {
  if (s == "XOR") return Coupling::kXor;
  if (s == "CONCAT") return Coupling::kConcat;
  throw ParameterError("unknown coupling '" + std::string(s) + "' (expected XOR or CONCAT)");
}

void ChunkingSpec::validate() const {
  if (word_width < 1 || word_width > kMaxWordWidth) {
    throw ParameterError("word width must be in [1, 32], got " + std::to_string(word_width));
  }
  if (fragments < 1 || word_width % fragments != 0) {
    throw ParameterError("fragmentation factor " + std::to_string(fragments) +
                         " does not divide word width " + std::to_string(word_width));
  }
}

ChunkVector make_chunks(Word address, Word instruction, const ChunkingSpec& spec) {
  spec.validate();
  ChunkVector out(spec.fragments, spec.codec_width());
  for (int i = 0; i < spec.fragments; ++i) out[i] = chunk_at(address, instruction, spec, i);
  return out;
}

std::uint32_t memory_index(Word address, Word base, std::uint32_t depth, int word_width,
                           IndexPolicy) {
  if (depth == 0) throw ParameterError("memory depth must be at least 1");
  if (address % kWordBytes != 0) {
    throw AlignmentError("address " + std::to_string(address) + " is not word-aligned");
  }
  const Word mask = word_width >= 32 ? ~Word{0} : (Word{1} << word_width) - 1;
  const Word offset = (address - base) & mask;
  return (offset / kWordBytes) % depth;
}

}  // namespace hsc
