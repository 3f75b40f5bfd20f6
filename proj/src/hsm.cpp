#include "hsc/hsm.hpp"

#include "bytes.hpp"
#include "hsc/error.hpp"

namespace hsc {

namespace {

constexpr std::uint8_t kMagic[4] = {'H', 'S', 'M', 0};
constexpr std::uint16_t kSnapshotVersion = 1;

}  // namespace

std::string_view to_string(UnconfiguredPolicy p) {
  return p == UnconfiguredPolicy::kValidBit ? "VALID_BIT" : "ZERO_INIT";
}

UnconfiguredPolicy parse_unconfigured_policy(std::string_view s) {
  if (s == "VALID_BIT") return UnconfiguredPolicy::kValidBit;
  if (s == "ZERO_INIT") return UnconfiguredPolicy::kZeroInit;
  throw ParameterError("unknown unconfigured policy '" + std::string(s) +
                       "' (expected VALID_BIT or ZERO_INIT)");
}

std::string_view to_string(VerdictReason r) {
  switch (r) {
    case VerdictReason::kMatch: return "MATCH";
    case VerdictReason::kParityMismatch: return "PARITY_MISMATCH";
    case VerdictReason::kUnconfiguredEntry: return "UNCONFIGURED_ENTRY";
  }
  return "?";
}

int HsmSpec::entry_width() const {
  return code.family == codec::CodeFamily::kHamming
             ? codec::hamming_parity_width(chunking.codec_width())
             : code.crc.width;
}

void HsmSpec::validate() const {
  chunking.validate();
  codec::validate(code);
  if (depth == 0) throw ParameterError("memory depth must be at least 1");
  if (base % kWordBytes != 0) throw AlignmentError("module base address is not word-aligned");
  if (chunking.word_width < 32 && (base & ~chunking.word_mask())) {
    throw ParameterError("module base address does not fit the word width");
  }
  entry_width();
}

std::string HsmSpec::label() const {
  if (!name.empty()) return name;
  return codec::describe(code, chunking.codec_width()) + "x" +
         std::to_string(chunking.fragments);
}

Hsm::Hsm(HsmSpec spec) : spec_(std::move(spec)) {
  spec_.validate();
  codes_.reserve(static_cast<std::size_t>(banks()));
  for (int i = 0; i < banks(); ++i) codes_.emplace_back(spec_.code, spec_.chunking.codec_width());
  reset();
}

void Hsm::reset() {
  mode_ = Mode::kConfigure;
  entries_.assign(static_cast<std::size_t>(spec_.depth) * static_cast<std::size_t>(banks()), 0);
  written_.assign(spec_.depth, 0);
  collisions_ = 0;
}

std::uint32_t Hsm::index_of(Word address) const {
  return memory_index(address, spec_.base, spec_.depth, spec_.chunking.word_width);
}

void Hsm::configure(Word address, Word instruction) {
  if (mode_ != Mode::kConfigure) throw ModeError("configure called in QUERY mode");
  const auto idx = index_of(address);
  if (written_[idx]) ++collisions_;
  written_[idx] = 1;
  const std::size_t row = static_cast<std::size_t>(idx) * static_cast<std::size_t>(banks());
  for (int b = 0; b < banks(); ++b) entries_[row + static_cast<std::size_t>(b)] = compute(b, address, instruction);
}

void Hsm::switch_to_query() { mode_ = Mode::kQuery; }

std::uint32_t Hsm::match_mask(Word address, Word instruction) const {
  const auto idx = index_of(address);
  if (spec_.unconfigured == UnconfiguredPolicy::kValidBit && !written_[idx]) return 0;
  const std::size_t row = static_cast<std::size_t>(idx) * static_cast<std::size_t>(banks());
  std::uint32_t mask = 0;
  for (int b = 0; b < banks(); ++b) {
    if (entries_[row + static_cast<std::size_t>(b)] == compute(b, address, instruction)) mask |= 1U << b;
  }
  return mask;
}

Verdict Hsm::query(Word address, Word instruction) const {
  if (mode_ != Mode::kQuery) throw ModeError("query called in CONFIGURE mode");
  const auto idx = index_of(address);
  if (spec_.unconfigured == UnconfiguredPolicy::kValidBit && !written_[idx]) {
    return {true, 0, VerdictReason::kUnconfiguredEntry};
  }
  const std::size_t row = static_cast<std::size_t>(idx) * static_cast<std::size_t>(banks());
  std::uint32_t mismatch = 0;
  for (int b = 0; b < banks(); ++b) {
    if (entries_[row + static_cast<std::size_t>(b)] != compute(b, address, instruction)) mismatch |= 1U << b;
  }
  if (mismatch) return {true, mismatch, VerdictReason::kParityMismatch};
  return {};
}

bool Hsm::configured(std::uint32_t index) const {
  if (index >= spec_.depth) throw ParameterError("memory index out of range");
  return written_[index] != 0;
}

std::uint32_t Hsm::entry(int bank, std::uint32_t index) const {
  if (bank < 0 || bank >= banks()) throw ParameterError("bank out of range");
  if (index >= spec_.depth) throw ParameterError("memory index out of range");
  return entries_[static_cast<std::size_t>(index) * static_cast<std::size_t>(banks()) +
                  static_cast<std::size_t>(bank)];
}

std::uint64_t Hsm::storage_bits() const {
  const std::uint64_t width = static_cast<std::uint64_t>(spec_.entry_width()) +
                              (spec_.unconfigured == UnconfiguredPolicy::kValidBit ? 1 : 0);
  return static_cast<std::uint64_t>(banks()) * spec_.depth * width;
}

std::vector<std::uint8_t> Hsm::serialize() const {
  detail::ByteWriter w;
  w.raw(kMagic);
  w.u16(kSnapshotVersion);
  w.u8(static_cast<std::uint8_t>(spec_.chunking.word_width));
  w.u8(static_cast<std::uint8_t>(spec_.chunking.fragments));
  w.u8(spec_.chunking.coupling == Coupling::kXor ? 0 : 1);
  w.u8(spec_.code.family == codec::CodeFamily::kHamming ? 0 : 1);
  w.u8(static_cast<std::uint8_t>(spec_.entry_width()));
  w.u8(spec_.unconfigured == UnconfiguredPolicy::kValidBit ? 1 : 0);
  w.u8(mode_ == Mode::kConfigure ? 0 : 1);
  w.u64(spec_.code.crc.poly);
  w.u32(spec_.base);
  w.u32(spec_.depth);
  w.u64(collisions_);
  w.str(spec_.name);

  const bool valid_bit = spec_.unconfigured == UnconfiguredPolicy::kValidBit;
  const int check_width = spec_.entry_width();
  const int width = check_width + (valid_bit ? 1 : 0);
  for (int b = 0; b < banks(); ++b) {
    std::vector<std::uint8_t> packed((static_cast<std::size_t>(spec_.depth) * width + 7) / 8, 0);
    std::size_t bit = 0;
    for (std::uint32_t i = 0; i < spec_.depth; ++i) {
      std::uint64_t v = entry(b, i);
      if (valid_bit && written_[i]) v |= std::uint64_t{1} << check_width;
      for (int j = 0; j < width; ++j, ++bit) {
        if ((v >> j) & 1) packed[bit / 8] |= static_cast<std::uint8_t>(1U << (bit % 8));
      }
    }
    w.raw(packed);
  }
  return std::move(w.bytes());
}

Hsm Hsm::deserialize(std::span<const std::uint8_t> bytes, std::size_t* consumed) {
  detail::ByteReader r(bytes);
  const auto magic = r.raw(4);
  for (int i = 0; i < 4; ++i) {
    if (magic[static_cast<std::size_t>(i)] != kMagic[i]) throw FormatError("not an HSM snapshot", 0);
  }
  if (const auto v = r.u16(); v != kSnapshotVersion) {
    throw FormatError("unsupported HSM snapshot version " + std::to_string(v), 4);
  }
  HsmSpec spec;
  spec.chunking.word_width = r.u8();
  spec.chunking.fragments = r.u8();
  spec.chunking.coupling = r.u8() == 0 ? Coupling::kXor : Coupling::kConcat;
  const bool crc = r.u8() != 0;
  const int check_width = r.u8();
  spec.unconfigured = r.u8() != 0 ? UnconfiguredPolicy::kValidBit : UnconfiguredPolicy::kZeroInit;
  const Mode mode = r.u8() == 0 ? Mode::kConfigure : Mode::kQuery;
  const auto poly = r.u64();
  if (crc) spec.code = codec::CodeKind::crc_of({poly, check_width});
  spec.base = r.u32();
  spec.depth = r.u32();
  const auto collisions = r.u64();
  spec.name = r.str();

  Hsm hsm(spec);
  if (hsm.spec_.entry_width() != check_width) {
    throw FormatError("snapshot entry width disagrees with its code", r.position());
  }
  const bool valid_bit = spec.unconfigured == UnconfiguredPolicy::kValidBit;
  const int width = check_width + (valid_bit ? 1 : 0);
  for (int b = 0; b < hsm.banks(); ++b) {
    const auto packed = r.raw((static_cast<std::size_t>(spec.depth) * width + 7) / 8);
    std::size_t bit = 0;
    for (std::uint32_t i = 0; i < spec.depth; ++i) {
      std::uint64_t v = 0;
      for (int j = 0; j < width; ++j, ++bit) {
        v |= std::uint64_t{(packed[bit / 8] >> (bit % 8)) & 1U} << j;
      }
      const std::uint32_t check = static_cast<std::uint32_t>(v & ((std::uint64_t{1} << check_width) - 1));
      hsm.entries_[static_cast<std::size_t>(i) * static_cast<std::size_t>(hsm.banks()) +
                   static_cast<std::size_t>(b)] = check;
      if (valid_bit ? ((v >> check_width) & 1) != 0 : false) hsm.written_[i] = 1;
    }
  }
  hsm.mode_ = mode;
  hsm.collisions_ = collisions;
  if (consumed) *consumed = r.position();
  return hsm;
}

}  // namespace hsc
