#pragma once

// The composite Hardware Security Checker: an ordered set of modules whose
// warnings are OR-combined.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hsc/hsm.hpp"
#include "hsc/riscv.hpp"

namespace hsc {

enum class Preset {
  kPaperCombined,  // HSEC32 (k=1) + HSEC8 (k=4)
  kSingleHsec32,
  kSingleHsec16,
  kSingleHsec8,
  kCrc32,
  kCrc16,
  kCrc8,
  kCustom,
};

std::string_view to_string(Preset p);
Preset parse_preset(std::string_view s);
// Every named preset, in declaration order (kCustom excluded).
std::span<const Preset> all_presets();
bool is_hamming_preset(Preset p);

enum class DepthPolicy {
  kExact,  // D = I
  kPow2,   // D = next power of two >= I
};

std::string_view to_string(DepthPolicy p);
DepthPolicy parse_depth_policy(std::string_view s);
std::uint32_t depth_for(DepthPolicy policy, std::size_t image_size);

struct GeometryOptions {
  Coupling coupling = Coupling::kXor;
  UnconfiguredPolicy unconfigured = UnconfiguredPolicy::kZeroInit;
  Word base = 0;
};

struct HscConfig {
  std::vector<HsmSpec> members;
  Preset preset = Preset::kCustom;
  // Index collisions during install raise CollisionError unless allowed.
  bool allow_collisions = false;

  std::string name() const { return std::string(to_string(preset)); }
  // At least one member; all members share word width and base.
  void validate() const;
};

HscConfig make_preset(Preset preset, std::uint32_t depth, const GeometryOptions& opts = {});

// Member specs of a single-module preset, e.g. kSingleHsec16 -> HSEC, k=2.
HsmSpec preset_member(Preset single, std::uint32_t depth, const GeometryOptions& opts = {});

struct FetchEvent {
  std::uint64_t cycle = 0;
  Word address = 0;
  Word instruction = 0;
  bool tampered = false;
  std::uint8_t tamper_kind = 0;  // harness-defined; 0 = none

  friend bool operator==(const FetchEvent&, const FetchEvent&) = default;
};

struct CheckVerdict {
  bool alarm = false;
  std::vector<Verdict> members;
};

class Checker {
 public:
  Checker(Preset preset, std::vector<Hsm> members);

  Preset preset() const { return preset_; }
  std::string name() const { return std::string(to_string(preset_)); }
  const std::vector<Hsm>& members() const { return members_; }

  CheckVerdict check(const FetchEvent& event) const;
  // Bit i set when member i alarms. Allocation-free; used by the harness.
  std::uint32_t alarm_mask(Word address, Word instruction) const;

  std::uint64_t storage_bits() const;

  // Manifest header (magic, version, preset, member count) followed by the
  // member snapshots in order.
  std::vector<std::uint8_t> serialize() const;
  static Checker deserialize(std::span<const std::uint8_t> bytes);

 private:
  Preset preset_;
  std::vector<Hsm> members_;
};

// Configures every word of the image into every member, then switches all
// members to QUERY. Throws DataError for an empty image and CollisionError
// (with the count) when indices collide and the config forbids it.
Checker install(const riscv::ProgramImage& image, const HscConfig& config);

}  // namespace hsc
