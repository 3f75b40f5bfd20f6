#include "hsc/riscv.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <sstream>

#include "hsc/error.hpp"
#include "hsc/rng.hpp"

namespace hsc::riscv {

namespace {

constexpr Word kOpLoad = 0x03;
constexpr Word kOpFence = 0x0F;
constexpr Word kOpImm = 0x13;
constexpr Word kOpAuipc = 0x17;
constexpr Word kOpStore = 0x23;
constexpr Word kOpReg = 0x33;
constexpr Word kOpLui = 0x37;
constexpr Word kOpBranch = 0x63;
constexpr Word kOpJalr = 0x67;
constexpr Word kOpJal = 0x6F;
constexpr Word kOpSystem = 0x73;

std::int32_t sext(Word v, int bits) {
  const Word m = Word{1} << (bits - 1);
  return static_cast<std::int32_t>((v ^ m) - m);
}

}  // namespace

std::string_view to_string(OpClass c) {
  switch (c) {
    case OpClass::kAluReg: return "ALU_REG";
    case OpClass::kAluImm: return "ALU_IMM";
    case OpClass::kLoad: return "LOAD";
    case OpClass::kStore: return "STORE";
    case OpClass::kBranch: return "BRANCH";
    case OpClass::kJal: return "JAL";
    case OpClass::kJalr: return "JALR";
    case OpClass::kLui: return "LUI";
    case OpClass::kAuipc: return "AUIPC";
    case OpClass::kSystem: return "SYSTEM";
    case OpClass::kFence: return "FENCE";
    case OpClass::kIllegal: return "ILLEGAL";
  }
  return "?";
}

std::int32_t imm_i(Word w) { return sext(w >> 20, 12); }
std::int32_t imm_s(Word w) { return sext(((w >> 25) << 5) | ((w >> 7) & 0x1F), 12); }
std::int32_t imm_b(Word w) {
  const Word v = (((w >> 31) & 1) << 12) | (((w >> 7) & 1) << 11) | (((w >> 25) & 0x3F) << 5) |
                 (((w >> 8) & 0xF) << 1);
  return sext(v, 13);
}
std::int32_t imm_u(Word w) { return static_cast<std::int32_t>(w & 0xFFFFF000U); }
std::int32_t imm_j(Word w) {
  const Word v = (((w >> 31) & 1) << 20) | (((w >> 12) & 0xFF) << 12) | (((w >> 20) & 1) << 11) |
                 (((w >> 21) & 0x3FF) << 1);
  return sext(v, 21);
}

DecodedInstr decode(Word w) {
  DecodedInstr d;
  d.rd = static_cast<std::uint8_t>((w >> 7) & 0x1F);
  d.funct3 = static_cast<std::uint8_t>((w >> 12) & 0x7);
  d.rs1 = static_cast<std::uint8_t>((w >> 15) & 0x1F);
  d.rs2 = static_cast<std::uint8_t>((w >> 20) & 0x1F);
  d.funct7 = static_cast<std::uint8_t>(w >> 25);
  const unsigned f3 = d.funct3;
  const unsigned f7 = d.funct7;

  auto illegal = [] { return DecodedInstr{}; };

  switch (w & 0x7F) {
    case kOpReg:
      if (!(f7 == 0 || (f7 == 0x20 && (f3 == 0 || f3 == 5)))) return illegal();
      d.op = OpClass::kAluReg;
      return d;
    case kOpImm:
      if (f3 == 1 && f7 != 0) return illegal();
      if (f3 == 5 && f7 != 0 && f7 != 0x20) return illegal();
      d.op = OpClass::kAluImm;
      d.imm = (f3 == 1 || f3 == 5) ? static_cast<std::int32_t>(d.rs2) : imm_i(w);
      return d;
    case kOpLoad:
      if (f3 == 3 || f3 >= 6) return illegal();
      d.op = OpClass::kLoad;
      d.imm = imm_i(w);
      return d;
    case kOpStore:
      if (f3 > 2) return illegal();
      d.op = OpClass::kStore;
      d.imm = imm_s(w);
      return d;
    case kOpBranch:
      if (f3 == 2 || f3 == 3) return illegal();
      d.op = OpClass::kBranch;
      d.imm = imm_b(w);
      d.control_flow = true;
      return d;
    case kOpJal:
      d.op = OpClass::kJal;
      d.imm = imm_j(w);
      d.control_flow = true;
      return d;
    case kOpJalr:
      if (f3 != 0) return illegal();
      d.op = OpClass::kJalr;
      d.imm = imm_i(w);
      d.control_flow = true;
      return d;
    case kOpLui:
      d.op = OpClass::kLui;
      d.imm = imm_u(w);
      return d;
    case kOpAuipc:
      d.op = OpClass::kAuipc;
      d.imm = imm_u(w);
      return d;
    case kOpFence:
      if (f3 > 1) return illegal();
      d.op = OpClass::kFence;
      d.imm = imm_i(w);
      return d;
    case kOpSystem:
      if (f3 == 4) return illegal();
      if (f3 == 0 && w != 0x00000073U && w != 0x00100073U) return illegal();  // ecall / ebreak
      d.op = OpClass::kSystem;
      d.imm = imm_i(w);
      d.control_flow = f3 == 0;
      return d;
    default:
      return illegal();
  }
}

void ProgramImage::validate() const {
  if (words.empty()) throw DataError("program image '" + name + "' is empty");
  if (base % 4 != 0) throw AlignmentError("program image base is not word-aligned");
}

ProgramImage load_image_bytes(std::span<const std::uint8_t> bytes, Word base, std::string name) {
  if (bytes.size() % 4 != 0) {
    const auto offset = bytes.size() - bytes.size() % 4;
    throw FormatError("truncated word at byte offset " + std::to_string(offset), offset);
  }
  ProgramImage img{std::move(name), base, {}};
  img.words.reserve(bytes.size() / 4);
  for (std::size_t i = 0; i < bytes.size(); i += 4) {
    img.words.push_back(Word{bytes[i]} | (Word{bytes[i + 1]} << 8) | (Word{bytes[i + 2]} << 16) |
                        (Word{bytes[i + 3]} << 24));
  }
  return img;
}

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

bool parse_hex_word(std::string_view s, Word& out) {
  if (s.size() != 8) return false;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out, 16);
  return ec == std::errc{} && ptr == s.data() + s.size();
}

Word parse_base(std::string_view s) {
  s = trim(s);
  int radix = 10;
  if (s.starts_with("0x") || s.starts_with("0X")) {
    s.remove_prefix(2);
    radix = 16;
  }
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v, radix);
  if (ec != std::errc{} || ptr != s.data() + s.size() || v > 0xFFFFFFFFULL) {
    throw ParameterError("invalid base address '" + std::string(s) + "'");
  }
  return static_cast<Word>(v);
}

}  // namespace

ProgramImage load_image_hex(std::string_view text, Word base, std::string name) {
  ProgramImage img{std::move(name), base, {}};
  std::size_t line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.starts_with("0x") || line.starts_with("0X")) line.remove_prefix(2);
    Word w = 0;
    if (!parse_hex_word(line, w)) {
      throw FormatError("line " + std::to_string(line_no) + ": expected 8 hex digits, got '" +
                            std::string(line) + "'",
                        line_no);
    }
    img.words.push_back(w);
  }
  return img;
}

std::vector<std::uint8_t> image_to_bytes(const ProgramImage& image) {
  std::vector<std::uint8_t> out;
  out.reserve(image.size() * 4);
  for (Word w : image.words) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(w >> (8 * i)));
  }
  return out;
}

std::string image_to_hex(const ProgramImage& image) {
  std::string out;
  out.reserve(image.size() * 9);
  char buf[16];
  for (Word w : image.words) {
    std::snprintf(buf, sizeof buf, "%08x\n", w);
    out += buf;
  }
  return out;
}

namespace {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::filesystem::path sidecar_of(const std::filesystem::path& path) {
  return path.string() + ".meta";
}

}  // namespace

ProgramImage load_image_file(const std::filesystem::path& path) {
  std::string name = path.stem().string();
  Word base = 0;
  if (const auto meta = sidecar_of(path); std::filesystem::exists(meta)) {
    std::istringstream in(read_file(meta));
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      std::string_view l = trim(line);
      if (l.empty() || l.front() == '#') continue;
      const auto eq = l.find('=');
      if (eq == std::string_view::npos) {
        throw FormatError("line " + std::to_string(line_no) + " of " + meta.string() +
                              ": expected key=value",
                          line_no);
      }
      const auto key = trim(l.substr(0, eq));
      const auto value = trim(l.substr(eq + 1));
      if (key == "name") {
        name = std::string(value);
      } else if (key == "base") {
        base = parse_base(value);
      } else {
        throw FormatError("line " + std::to_string(line_no) + " of " + meta.string() +
                              ": unknown key '" + std::string(key) + "'",
                          line_no);
      }
    }
  }
  const std::string content = read_file(path);
  if (path.extension() == ".hex") return load_image_hex(content, base, name);
  const auto* data = reinterpret_cast<const std::uint8_t*>(content.data());
  return load_image_bytes({data, content.size()}, base, name);
}

void save_image_file(const ProgramImage& image, const std::filesystem::path& path,
                     bool write_sidecar) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  if (path.extension() == ".hex") {
    out << image_to_hex(image);
  } else {
    const auto bytes = image_to_bytes(image);
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  }
  if (write_sidecar) {
    std::ofstream meta(sidecar_of(path));
    char buf[16];
    std::snprintf(buf, sizeof buf, "0x%08x", image.base);
    meta << "name=" << image.name << "\nbase=" << buf << "\n";
  }
}

// ---------------------------------------------------------------------------
// Synthetic corpus generation

namespace {

// Registers weighted the way compiled RV32 code uses them: argument and
// temporary registers dominate, sp/s0 serve as memory bases.
constexpr std::array<std::uint8_t, 16> kHotRegs = {10, 11, 12, 13, 14, 15, 5, 6,
                                                   7,  8,  9,  2,  1,  18, 19, 20};
constexpr std::array<std::uint8_t, 8> kBaseRegs = {2, 8, 10, 11, 12, 9, 13, 14};

Word r_type(Word f7, std::uint8_t rs2, std::uint8_t rs1, Word f3, std::uint8_t rd, Word op) {
  return (f7 << 25) | (Word{rs2} << 20) | (Word{rs1} << 15) | (f3 << 12) | (Word{rd} << 7) | op;
}

Word i_type(std::int32_t imm, std::uint8_t rs1, Word f3, std::uint8_t rd, Word op) {
  return ((static_cast<Word>(imm) & 0xFFF) << 20) | (Word{rs1} << 15) | (f3 << 12) |
         (Word{rd} << 7) | op;
}

Word s_type(std::int32_t imm, std::uint8_t rs2, std::uint8_t rs1, Word f3) {
  const Word u = static_cast<Word>(imm) & 0xFFF;
  return ((u >> 5) << 25) | (Word{rs2} << 20) | (Word{rs1} << 15) | (f3 << 12) |
         ((u & 0x1F) << 7) | kOpStore;
}

Word b_type(std::int32_t offset, std::uint8_t rs2, std::uint8_t rs1, Word f3) {
  const Word u = static_cast<Word>(offset);
  return (((u >> 12) & 1) << 31) | (((u >> 5) & 0x3F) << 25) | (Word{rs2} << 20) |
         (Word{rs1} << 15) | (f3 << 12) | (((u >> 1) & 0xF) << 8) | (((u >> 11) & 1) << 7) |
         kOpBranch;
}

Word j_type(std::int32_t offset, std::uint8_t rd) {
  const Word u = static_cast<Word>(offset);
  return (((u >> 20) & 1) << 31) | (((u >> 1) & 0x3FF) << 21) | (((u >> 11) & 1) << 20) |
         (((u >> 12) & 0xFF) << 12) | (Word{rd} << 7) | kOpJal;
}

Word u_type(Word imm20, std::uint8_t rd, Word op) { return (imm20 << 12) | (Word{rd} << 7) | op; }

class Generator {
 public:
  Generator(std::size_t size, std::uint64_t seed, const InstructionMix& mix)
      : size_(size), rng_(make_rng(seed)), mix_(mix) {}

  Word emit(std::size_t j) {
    const bool compact = coin(rng_, mix_.compact_fraction);
    const double total = mix_.alu + mix_.memory + mix_.branch + mix_.jal + mix_.upper;
    double x = uniform_unit(rng_) * total;
    if ((x -= mix_.alu) < 0) return compact ? compact_alu() : alu();
    if ((x -= mix_.memory) < 0) return compact ? compact_memory() : memory();
    if ((x -= mix_.branch) < 0) return branch(j, compact);
    if ((x -= mix_.jal) < 0) return jal(j);
    return upper(compact);
  }

 private:
  std::uint8_t hot() { return kHotRegs[uniform_below(rng_, kHotRegs.size())]; }
  std::uint8_t low_reg() { return static_cast<std::uint8_t>(uniform_below(rng_, 2)); }  // x0 / x1
  std::int32_t small_imm() {
    if (coin(rng_, 0.8)) return static_cast<std::int32_t>(uniform_below(rng_, 24)) - 8;
    return static_cast<std::int32_t>(uniform_below(rng_, 4096)) - 2048;
  }

  Word alu() {
    if (coin(rng_, 0.5)) {
      static constexpr Word kF3[] = {0, 2, 3, 4, 6, 7, 1, 5};
      const Word f3 = kF3[uniform_below(rng_, 8)];
      if (f3 == 1 || f3 == 5) {
        const Word f7 = (f3 == 5 && coin(rng_, 0.3)) ? 0x20 : 0;
        return r_type(f7, static_cast<std::uint8_t>(uniform_below(rng_, 32)), hot(), f3, hot(), kOpImm);
      }
      return i_type(small_imm(), hot(), f3, hot(), kOpImm);
    }
    const Word f3 = static_cast<Word>(uniform_below(rng_, 8));
    const Word f7 = ((f3 == 0 || f3 == 5) && coin(rng_, 0.25)) ? 0x20 : 0;
    return r_type(f7, hot(), hot(), f3, hot(), kOpReg);
  }

  Word compact_alu() {
    if (coin(rng_, 0.5)) {
      static constexpr Word kF3[] = {0, 2, 3, 4, 6, 7};
      return i_type(0, low_reg(), kF3[uniform_below(rng_, 6)], hot(), kOpImm);
    }
    return r_type(0, 0, low_reg(), static_cast<Word>(uniform_below(rng_, 8)), hot(), kOpReg);
  }

  Word memory() {
    const std::int32_t off = 4 * (static_cast<std::int32_t>(uniform_below(rng_, 80)) - 16);
    if (coin(rng_, 0.5)) {
      static constexpr Word kF3[] = {2, 2, 2, 0, 1, 4, 5};
      return i_type(off, kBaseRegs[uniform_below(rng_, kBaseRegs.size())],
                    kF3[uniform_below(rng_, 7)], hot(), kOpLoad);
    }
    static constexpr Word kF3[] = {2, 2, 0, 1};
    return s_type(off, hot(), kBaseRegs[uniform_below(rng_, kBaseRegs.size())],
                  kF3[uniform_below(rng_, 4)]);
  }

  Word compact_memory() {
    if (coin(rng_, 0.5)) {
      static constexpr Word kF3[] = {2, 2, 0, 1, 4, 5};
      return i_type(0, low_reg(), kF3[uniform_below(rng_, 6)], hot(), kOpLoad);
    }
    return s_type(4 * static_cast<std::int32_t>(uniform_below(rng_, 8)), 0, low_reg(),
                  static_cast<Word>(uniform_below(rng_, 3)));
  }

  Word branch(std::size_t j, bool compact) {
    static constexpr Word kF3[] = {0, 1, 4, 5, 6, 7};
    const Word f3 = kF3[uniform_below(rng_, 6)];
    // Compact: forward by 1..7 words, which keeps bits 31:16 clear.
    if (compact && j + 1 < size_) {
      const std::size_t span = std::min<std::size_t>(7, size_ - 1 - j);
      const auto words = static_cast<std::int32_t>(1 + uniform_below(rng_, span));
      return b_type(4 * words, 0, low_reg(), f3);
    }
    return b_type(4 * target_offset(j, 1000), hot(), hot(), f3);
  }

  Word jal(std::size_t j) {
    const std::uint8_t rd = coin(rng_, 0.6) ? 1 : 0;
    return j_type(4 * target_offset(j, 250000), rd);
  }

  Word upper(bool compact) {
    const Word op = coin(rng_, 0.7) ? kOpLui : kOpAuipc;
    if (compact) return u_type(static_cast<Word>(uniform_below(rng_, 16)), hot(), op);
    static constexpr Word kCommon[] = {0x1A100, 0x00100, 0x10000, 0x00010, 0x80000, 0x1A110};
    const Word imm = coin(rng_, 0.6) ? kCommon[uniform_below(rng_, 6)]
                                     : static_cast<Word>(uniform_below(rng_, 1U << 20));
    return u_type(imm, hot(), op);
  }

  // Word offset to a target in the image within `window` words, avoiding the
  // instruction itself when the image has room.
  std::int32_t target_offset(std::size_t j, std::size_t window) {
    const std::size_t lo = j > window ? j - window : 0;
    const std::size_t hi = std::min(size_ - 1, j + window);
    if (hi == lo) return 0;
    std::size_t t;
    do {
      t = lo + uniform_below(rng_, hi - lo + 1);
    } while (t == j);
    return static_cast<std::int32_t>(t) - static_cast<std::int32_t>(j);
  }

  std::size_t size_;
  Rng rng_;
  InstructionMix mix_;
};

}  // namespace

ProgramImage gen_synthetic(std::size_t size, std::uint64_t seed, const InstructionMix& mix,
                           Word base, std::string name) {
  if (size == 0) throw ParameterError("synthetic image size must be at least 1");
  if (base % 4 != 0) throw AlignmentError("program image base is not word-aligned");
  const double weights[] = {mix.alu, mix.memory, mix.branch, mix.jal, mix.upper};
  double total = 0;
  for (double w : weights) {
    if (!(w >= 0)) throw ParameterError("instruction mix weights must be non-negative");
    total += w;
  }
  if (total <= 0) throw ParameterError("instruction mix weights are all zero");
  if (!(mix.compact_fraction >= 0 && mix.compact_fraction <= 1)) {
    throw ParameterError("compact fraction must be in [0, 1]");
  }
  if (name.empty()) name = "synthetic-" + std::to_string(size) + "-s" + std::to_string(seed);

  ProgramImage img{std::move(name), base, {}};
  img.words.reserve(size);
  Generator gen(size, seed, mix);
  for (std::size_t j = 0; j < size; ++j) img.words.push_back(gen.emit(j));
  return img;
}

}  // namespace hsc::riscv
