#include <charconv>
#include <cstdio>
#include <fstream>
#include <iterator>

#include "hsc/error.hpp"
#include "hsc/harness.hpp"

namespace hsc::harness {

namespace {

enum : std::uint8_t { kSequential = 0, kBranch = 1, kJump = 2, kRestart = 3 };

}  // namespace

std::string_view to_string(TraceMode m) {
  switch (m) {
    case TraceMode::kLinear: return "LINEAR";
    case TraceMode::kCfgWalk: return "CFG_WALK";
    case TraceMode::kFile: return "FILE";
  }
  return "?";
}

TraceGenerator::TraceGenerator(const riscv::ProgramImage& image) : image_(image) {
  image_.validate();
  const auto n = static_cast<std::int64_t>(image_.size());
  taken_.assign(image_.size(), -1);
  kind_.assign(image_.size(), kSequential);
  for (std::int64_t j = 0; j < n; ++j) {
    const auto d = riscv::decode(image_.words[static_cast<std::size_t>(j)]);
    auto target = [&](std::int32_t imm) -> std::int64_t {
      if (imm % 4 != 0) return -1;
      const std::int64_t t = j + imm / 4;
      return (t >= 0 && t < n) ? t : -1;
    };
    auto& kind = kind_[static_cast<std::size_t>(j)];
    switch (d.op) {
      case riscv::OpClass::kBranch:
        kind = kBranch;
        taken_[static_cast<std::size_t>(j)] = target(d.imm);
        break;
      case riscv::OpClass::kJal:
        kind = kJump;
        taken_[static_cast<std::size_t>(j)] = target(d.imm);
        break;
      case riscv::OpClass::kJalr:
      case riscv::OpClass::kSystem:
      case riscv::OpClass::kIllegal:
        kind = kRestart;
        break;
      default:
        break;
    }
  }
}

void TraceGenerator::generate(TraceMode mode, Rng& rng, std::size_t max_len,
                              std::vector<FetchEvent>& out) const {
  if (max_len == 0) throw ParameterError("trace length must be at least 1");
  if (mode == TraceMode::kFile) throw ParameterError("FILE traces are loaded, not generated");
  out.clear();
  out.reserve(max_len);
  const std::size_t n = image_.size();
  std::size_t pc = 0;
  for (std::size_t i = 0; i < max_len; ++i) {
    if (mode == TraceMode::kLinear) pc = i % n;
    out.push_back({i, image_.address_of(pc), image_.words[pc], false, kNotTampered});
    if (mode == TraceMode::kLinear) continue;
    const auto sequential = pc + 1 == n ? 0 : pc + 1;
    const auto taken = taken_[pc] < 0 ? std::size_t{0} : static_cast<std::size_t>(taken_[pc]);
    switch (kind_[pc]) {
      case kSequential: pc = sequential; break;
      case kBranch: pc = (rng() >> 63) ? taken : sequential; break;
      case kJump: pc = taken; break;
      default: pc = 0; break;
    }
  }
}

std::vector<FetchEvent> gen_trace(const riscv::ProgramImage& image, TraceMode mode,
                                  std::uint64_t seed, std::size_t max_len) {
  TraceGenerator gen(image);
  Rng rng = make_rng(seed);
  std::vector<FetchEvent> out;
  gen.generate(mode, rng, max_len, out);
  return out;
}

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

bool parse_hex_field(std::string_view s, Word& out) {
  s = trim(s);
  if (!(s.starts_with("0x") || s.starts_with("0X"))) return false;
  s.remove_prefix(2);
  if (s.empty() || s.size() > 8) return false;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out, 16);
  return ec == std::errc{} && ptr == s.data() + s.size();
}

bool parse_cycle(std::string_view s, std::uint64_t& out) {
  s = trim(s);
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out, 10);
  return !s.empty() && ec == std::errc{} && ptr == s.data() + s.size();
}

}  // namespace

std::vector<FetchEvent> load_trace_csv(std::string_view text, const riscv::ProgramImage* image) {
  std::vector<FetchEvent> out;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (!text.empty()) {
    ++line_no;
    const auto nl = text.find('\n');
    const std::string_view line = trim(text.substr(0, nl));
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    if (line.empty()) continue;
    auto fail = [&](const std::string& why) {
      return FormatError("trace line " + std::to_string(line_no) + ": " + why, line_no);
    };
    if (!header_seen) {
      if (line != "cycle,address,instruction") throw fail("expected header 'cycle,address,instruction'");
      header_seen = true;
      continue;
    }
    const auto c1 = line.find(',');
    const auto c2 = c1 == std::string_view::npos ? c1 : line.find(',', c1 + 1);
    if (c2 == std::string_view::npos || line.find(',', c2 + 1) != std::string_view::npos) {
      throw fail("expected three comma-separated fields");
    }
    FetchEvent e;
    if (!parse_cycle(line.substr(0, c1), e.cycle)) throw fail("bad cycle field");
    if (!parse_hex_field(line.substr(c1 + 1, c2 - c1 - 1), e.address)) {
      throw fail("address must be a 0x-prefixed hex word");
    }
    if (!parse_hex_field(line.substr(c2 + 1), e.instruction)) {
      throw fail("instruction must be a 0x-prefixed hex word");
    }
    if (image) {
      const bool legit = image->contains(e.address) &&
                         image->words[(e.address - image->base) / 4] == e.instruction;
      e.tampered = !legit;
      e.tamper_kind = legit ? kNotTampered : kTamperExternal;
    }
    out.push_back(e);
  }
  if (!header_seen) throw FormatError("trace is empty (missing header)", line_no == 0 ? 1 : line_no);
  return out;
}

std::vector<FetchEvent> load_trace_file(const std::filesystem::path& path,
                                        const riscv::ProgramImage* image) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open trace '" + path.string() + "'");
  const std::string text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  return load_trace_csv(text, image);
}

std::string trace_to_csv(std::span<const FetchEvent> trace) {
  std::string out = "cycle,address,instruction\n";
  char buf[64];
  for (const auto& e : trace) {
    std::snprintf(buf, sizeof buf, "%llu,0x%08x,0x%08x\n", static_cast<unsigned long long>(e.cycle),
                  e.address, e.instruction);
    out += buf;
  }
  return out;
}

}  // namespace hsc::harness
