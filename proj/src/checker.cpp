#include "hsc/checker.hpp"

#include <array>

#include "bytes.hpp"
#include "hsc/error.hpp"

namespace hsc {

namespace {

constexpr std::array<Preset, 7> kPresets = {
    Preset::kPaperCombined, Preset::kSingleHsec32, Preset::kSingleHsec16, Preset::kSingleHsec8,
    Preset::kCrc32,         Preset::kCrc16,        Preset::kCrc8};

constexpr std::uint8_t kMagic[4] = {'H', 'S', 'C', 0};
constexpr std::uint16_t kSnapshotVersion = 1;

}  // namespace

std::string_view to_string(Preset p) {
  switch (p) {
    case Preset::kPaperCombined: return "PAPER_COMBINED";
    case Preset::kSingleHsec32: return "SINGLE_HSEC32";
    case Preset::kSingleHsec16: return "SINGLE_HSEC16";
    case Preset::kSingleHsec8: return "SINGLE_HSEC8";
    case Preset::kCrc32: return "CRC32";
    case Preset::kCrc16: return "CRC16";
    case Preset::kCrc8: return "CRC8";
    case Preset::kCustom: return "custom";
  }
  return "?";
}

Preset parse_preset(std::string_view s) {
  for (Preset p : kPresets) {
    if (s == to_string(p)) return p;
  }
  if (s == "custom") return Preset::kCustom;
  throw ParameterError("unknown preset '" + std::string(s) + "'");
}

std::span<const Preset> all_presets() { return kPresets; }

bool is_hamming_preset(Preset p) {
  return p == Preset::kPaperCombined || p == Preset::kSingleHsec32 ||
         p == Preset::kSingleHsec16 || p == Preset::kSingleHsec8;
}

std::string_view to_string(DepthPolicy p) { return p == DepthPolicy::kExact ? "EXACT" : "POW2"; }

DepthPolicy parse_depth_policy(std::string_view s) {
  if (s == "EXACT") return DepthPolicy::kExact;
  if (s == "POW2") return DepthPolicy::kPow2;
  throw ParameterError("unknown depth policy '" + std::string(s) + "' (expected EXACT or POW2)");
}

std::uint32_t depth_for(DepthPolicy policy, std::size_t image_size) {
  if (image_size == 0) throw DataError("cannot size memories for an empty image");
  if (image_size > (std::size_t{1} << 30)) throw ParameterError("image too large for 32-bit addressing");
  if (policy == DepthPolicy::kExact) return static_cast<std::uint32_t>(image_size);
  std::uint32_t d = 1;
  while (d < image_size) d <<= 1;
  return d;
}

HsmSpec preset_member(Preset single, std::uint32_t depth, const GeometryOptions& opts) {
  HsmSpec s;
  s.depth = depth;
  s.base = opts.base;
  s.unconfigured = opts.unconfigured;
  s.chunking.word_width = 32;
  s.chunking.coupling = opts.coupling;
  switch (single) {
    case Preset::kSingleHsec32: s.chunking.fragments = 1; s.name = "HSEC32"; break;
    case Preset::kSingleHsec16: s.chunking.fragments = 2; s.name = "HSEC16"; break;
    case Preset::kSingleHsec8: s.chunking.fragments = 4; s.name = "HSEC8"; break;
    case Preset::kCrc32:
      s.chunking.fragments = 1;
      s.code = codec::CodeKind::crc_of(codec::kCrc32);
      s.name = "CRC32";
      break;
    case Preset::kCrc16:
      s.chunking.fragments = 2;
      s.code = codec::CodeKind::crc_of(codec::kCrc16);
      s.name = "CRC16";
      break;
    case Preset::kCrc8:
      s.chunking.fragments = 4;
      s.code = codec::CodeKind::crc_of(codec::kCrc8);
      s.name = "CRC8";
      break;
    default:
      throw ParameterError("preset " + std::string(to_string(single)) + " is not a single module");
  }
  return s;
}

HscConfig make_preset(Preset preset, std::uint32_t depth, const GeometryOptions& opts) {
  HscConfig cfg;
  cfg.preset = preset;
  if (preset == Preset::kPaperCombined) {
    cfg.members = {preset_member(Preset::kSingleHsec32, depth, opts),
                   preset_member(Preset::kSingleHsec8, depth, opts)};
  } else if (preset == Preset::kCustom) {
    throw ParameterError("the custom preset has no default members");
  } else {
    cfg.members = {preset_member(preset, depth, opts)};
  }
  return cfg;
}

void HscConfig::validate() const {
  if (members.empty()) throw ParameterError("a checker needs at least one module");
  if (members.size() > 32) throw ParameterError("a checker supports at most 32 modules");
  for (const auto& m : members) {
    m.validate();
    if (m.chunking.word_width != members.front().chunking.word_width ||
        m.base != members.front().base) {
      throw ParameterError("checker modules must share word width and base address");
    }
  }
}

Checker::Checker(Preset preset, std::vector<Hsm> members)
    : preset_(preset), members_(std::move(members)) {
  if (members_.empty()) throw ParameterError("a checker needs at least one module");
  if (members_.size() > 32) throw ParameterError("a checker supports at most 32 modules");
}

CheckVerdict Checker::check(const FetchEvent& event) const {
  CheckVerdict v;
  v.members.reserve(members_.size());
  for (const auto& m : members_) {
    v.members.push_back(m.query(event.address, event.instruction));
    v.alarm = v.alarm || v.members.back().alarm;
  }
  return v;
}

std::uint32_t Checker::alarm_mask(Word address, Word instruction) const {
  std::uint32_t mask = 0;
  for (std::size_t i = 0; i < members_.size(); ++i) {
    if (members_[i].query(address, instruction).alarm) mask |= 1U << i;
  }
  return mask;
}

std::uint64_t Checker::storage_bits() const {
  std::uint64_t total = 0;
  for (const auto& m : members_) total += m.storage_bits();
  return total;
}

std::vector<std::uint8_t> Checker::serialize() const {
  detail::ByteWriter w;
  w.raw(kMagic);
  w.u16(kSnapshotVersion);
  w.str(std::string(to_string(preset_)));
  w.u32(static_cast<std::uint32_t>(members_.size()));
  for (const auto& m : members_) w.raw(m.serialize());
  return std::move(w.bytes());
}

Checker Checker::deserialize(std::span<const std::uint8_t> bytes) {
  detail::ByteReader r(bytes);
  const auto magic = r.raw(4);
  for (int i = 0; i < 4; ++i) {
    if (magic[static_cast<std::size_t>(i)] != kMagic[i]) throw FormatError("not a checker snapshot", 0);
  }
  if (const auto v = r.u16(); v != kSnapshotVersion) {
    throw FormatError("unsupported checker snapshot version " + std::to_string(v), 4);
  }
  const Preset preset = parse_preset(r.str());
  const auto count = r.u32();
  if (count == 0 || count > 32) throw FormatError("bad member count in checker snapshot", r.position());
  std::size_t pos = r.position();
  std::vector<Hsm> members;
  members.reserve(count);
  for (std::uint32_t i = 0; i < count; ++i) {
    std::size_t used = 0;
    try {
      members.push_back(Hsm::deserialize(bytes.subspan(pos), &used));
    } catch (const FormatError& e) {
      throw FormatError(e.what(), pos + e.location());
    }
    pos += used;
  }
  if (pos != bytes.size()) throw FormatError("trailing bytes after checker snapshot", pos);
  return Checker(preset, std::move(members));
}

Checker install(const riscv::ProgramImage& image, const HscConfig& config) {
  image.validate();
  config.validate();
  std::vector<Hsm> members;
  members.reserve(config.members.size());
  for (const auto& spec : config.members) {
    if (spec.base != image.base) {
      throw ParameterError("image base does not match module " + spec.label() + " base address");
    }
    Hsm hsm(spec);
    for (std::size_t j = 0; j < image.size(); ++j) hsm.configure(image.address_of(j), image.words[j]);
    if (hsm.collisions() > 0 && !config.allow_collisions) {
      throw CollisionError("install: " + std::to_string(hsm.collisions()) +
                               " memory index collisions in module " + spec.label() +
                               " (depth " + std::to_string(spec.depth) + " < image size " +
                               std::to_string(image.size()) + ")",
                           hsm.collisions());
    }
    hsm.switch_to_query();
    members.push_back(std::move(hsm));
  }
  return Checker(config.preset, std::move(members));
}

}  // namespace hsc
