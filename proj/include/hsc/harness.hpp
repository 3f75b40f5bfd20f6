#pragma once

// Fetch-trace generation, Hardware Trojan injection, Monte Carlo FP/FN
// campaigns and the sampling-based FN estimator.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hsc/checker.hpp"
#include "hsc/riscv.hpp"
#include "hsc/rng.hpp"

namespace hsc::harness {

enum class TraceMode { kLinear, kCfgWalk, kFile };

std::string_view to_string(TraceMode m);

// Threat model 1 mutates the fetch address, threat model 2 the fetched word.
enum class AttackModel { kAddress, kInstruction };

enum class AddressVariant {
  kOutOfImage,    // uniform aligned address outside the image, random word
  kInImageAlias,  // a different in-image address, random attacker word
};

enum class InstructionVariant {
  kRandomWord,       // all 32 bits redrawn
  kOtherImageInstr,  // a word from elsewhere in the image (wrong time)
  kSingleBitFlip,
  kRandomByte,  // one byte redrawn
};

// FetchEvent::tamper_kind values.
enum TamperKind : std::uint8_t {
  kNotTampered = 0,
  kTamperOutOfImage,
  kTamperInImageAlias,
  kTamperRandomWord,
  kTamperOtherImageInstr,
  kTamperSingleBitFlip,
  kTamperRandomByte,
  kTamperExternal,  // tampered event read from a trace file
};

struct AttackSpec {
  AttackModel model = AttackModel::kAddress;
  AddressVariant address_variant = AddressVariant::kOutOfImage;
  InstructionVariant instruction_variant = InstructionVariant::kRandomWord;
  std::uint64_t seed = 0;

  // "M1/OUT_OF_IMAGE", "M2/SINGLE_BIT_FLIP", ...
  std::string label() const;
};

// model is "M1" or "M2"; the variant must belong to that model.
AttackSpec parse_attack(std::string_view model, std::string_view variant, std::uint64_t seed = 0);

// Precomputes the decoded image so traces can be generated repeatedly.
class TraceGenerator {
 public:
  explicit TraceGenerator(const riscv::ProgramImage& image);

  // LINEAR: base, base+4, ... wrapping after the last word.
  // CFG_WALK: follows decoded control flow; branches are taken with
  // probability 1/2, JAL is followed, JALR/SYSTEM/ILLEGAL and any target
  // outside the image restart at base.
  void generate(TraceMode mode, Rng& rng, std::size_t max_len, std::vector<FetchEvent>& out) const;

  const riscv::ProgramImage& image() const { return image_; }

 private:
  const riscv::ProgramImage& image_;
  std::vector<std::int64_t> taken_;  // word index reached by the taken edge, -1 = base
  std::vector<std::uint8_t> kind_;   // 0 sequential, 1 branch, 2 jump, 3 restart
};

// Deterministic under `seed`. FILE mode is not generated; use load_trace_csv.
std::vector<FetchEvent> gen_trace(const riscv::ProgramImage& image, TraceMode mode,
                                  std::uint64_t seed, std::size_t max_len);

// CSV with header `cycle,address,instruction`, hex fields 0x-prefixed.
// With an image, events that disagree with it are marked tampered. Throws
// FormatError with the 1-based line number.
std::vector<FetchEvent> load_trace_csv(std::string_view text,
                                       const riscv::ProgramImage* image = nullptr);
std::vector<FetchEvent> load_trace_file(const std::filesystem::path& path,
                                        const riscv::ProgramImage* image = nullptr);
std::string trace_to_csv(std::span<const FetchEvent> trace);

// Mutates one legitimate fetch per the attack spec; the result is flagged
// tampered and differs from what the image holds at the mutated address.
FetchEvent mutate(const FetchEvent& event, const AttackSpec& spec,
                  const riscv::ProgramImage& image, Rng& rng);

struct Injection {
  std::size_t cycle = 0;
  FetchEvent original;
};

// Mutates exactly one event, chosen uniformly over the trace.
Injection inject(std::vector<FetchEvent>& trace, const AttackSpec& spec,
                 const riscv::ProgramImage& image, Rng& rng);
Injection inject(std::vector<FetchEvent>& trace, const AttackSpec& spec,
                 const riscv::ProgramImage& image);

struct RateEstimate {
  std::uint64_t events = 0;
  std::uint64_t trials = 0;
  double rate = 0;
  double ci_low = 0;
  double ci_high = 1;

  friend bool operator==(const RateEstimate&, const RateEstimate&) = default;
};

// 95% interval: normal approximation, exact Clopper-Pearson when fewer than
// five events (or non-events) were observed.
RateEstimate estimate_rate(std::uint64_t events, std::uint64_t trials);

struct ExperimentConfig {
  riscv::ProgramImage image;
  std::string image_source;  // echoed in reports
  Preset preset = Preset::kPaperCombined;
  Coupling coupling = Coupling::kXor;
  DepthPolicy depth_policy = DepthPolicy::kExact;
  UnconfiguredPolicy unconfigured = UnconfiguredPolicy::kZeroInit;
  TraceMode trace_mode = TraceMode::kCfgWalk;
  std::vector<FetchEvent> file_trace;  // FILE mode only
  std::string trace_path;
  std::uint32_t runs_attacked = 10000;
  std::uint32_t runs_clean = 10000;
  AttackSpec attack;
  std::uint64_t seed = 1;
  std::size_t trace_length = 512;
  unsigned workers = 1;

  HscConfig checker_config() const;
};

// An image path (relative paths resolve against `base_dir`) or
// synthetic:SIZE[:SEED[:COMPACT_FRACTION]]. A given base overrides the
// loaded one.
riscv::ProgramImage load_image_source(std::string_view source,
                                      const std::filesystem::path& base_dir = {},
                                      std::optional<Word> base = std::nullopt);

// Flat key=value text. Keys: image, base, preset, coupling, depth_policy,
// unconfigured_policy, trace_mode, runs_attacked, runs_clean, attack_model,
// attack_variant, seed. `image` is a path (relative to `base_dir`) or
// synthetic:SIZE[:SEED[:COMPACT_FRACTION]]; trace_mode FILE takes the form
// FILE:path.
ExperimentConfig parse_experiment_config(std::string_view text,
                                         const std::filesystem::path& base_dir = {});
ExperimentConfig load_experiment_config(const std::filesystem::path& path);

struct ExperimentReport {
  std::string benchmark;
  std::string preset;
  std::string model;  // attack label
  RateEstimate fp;
  RateEstimate fn;
  std::vector<std::string> member_labels;
  std::vector<std::uint64_t> member_detections;  // attacked runs caught per member

  // configuration echo
  std::size_t image_size = 0;
  Word base = 0;
  std::uint32_t depth = 0;
  std::string coupling;
  std::string depth_policy;
  std::string unconfigured_policy;
  std::string trace_mode;
  std::size_t trace_length = 0;
  std::uint64_t seed = 0;
  std::string codes;  // member codes joined with '+'

  friend bool operator==(const ExperimentReport&, const ExperimentReport&) = default;
};

// Installs the checker once, then replays runs_clean clean traces and
// runs_attacked traces with one injection each. Run r (clean runs first,
// then attacked) draws from seed + r, and results are reduced in run order,
// so the report does not depend on the worker count.
ExperimentReport run_experiment(const ExperimentConfig& config);

// Same campaign against an already installed checker.
ExperimentReport run_experiment(const ExperimentConfig& config, const Checker& checker);

struct Prediction {
  std::uint64_t samples = 0;
  std::vector<std::string> bank_labels;  // "HSEC32[0]", "HSEC8[3]", ...
  std::vector<double> bank_match_rate;
  double independence_product = 0;  // product of per-bank rates
  double joint_rate = 0;            // all banks matched: the FN estimate
  double uniform_baseline = 0;      // 2^-(total stored check bits)
};

// Samples attacker draws at uniformly chosen image positions and measures
// how often the recomputed check bits equal the stored ones.
Prediction predict_fn(const Checker& checker, const riscv::ProgramImage& image,
                      const AttackSpec& spec, std::uint64_t samples = 100000);

enum class ReportFormat { kCsv, kMarkdown };

// CSV: fixed header, one row per report. Markdown: a Benchmark / Preset /
// Model / FP / FN / CI95 table followed by the configuration echo. Rates are
// percentages with three decimals.
std::string emit_report(std::span<const ExperimentReport> reports, ReportFormat format);

std::string_view csv_header();

}  // namespace hsc::harness
