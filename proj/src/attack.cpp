#include "hsc/error.hpp"
#include "hsc/harness.hpp"

namespace hsc::harness {

namespace {

std::string_view to_string(AddressVariant v) {
  return v == AddressVariant::kOutOfImage ? "OUT_OF_IMAGE" : "IN_IMAGE_ALIAS";
}

std::string_view to_string(InstructionVariant v) {
  switch (v) {
    case InstructionVariant::kRandomWord: return "RANDOM_WORD";
    case InstructionVariant::kOtherImageInstr: return "OTHER_IMAGE_INSTR";
    case InstructionVariant::kSingleBitFlip: return "SINGLE_BIT_FLIP";
    case InstructionVariant::kRandomByte: return "RANDOM_BYTE";
  }
  return "?";
}

Word random_word_except(Rng& rng, Word avoid) {
  Word w;
  do {
    w = uniform_word(rng);
  } while (w == avoid);
  return w;
}

}  // namespace

std::string AttackSpec::label() const {
  if (model == AttackModel::kAddress) return "M1/" + std::string(to_string(address_variant));
  return "M2/" + std::string(to_string(instruction_variant));
}

AttackSpec parse_attack(std::string_view model, std::string_view variant, std::uint64_t seed) {
  AttackSpec spec;
  spec.seed = seed;
  if (model == "M1") {
    spec.model = AttackModel::kAddress;
    for (auto v : {AddressVariant::kOutOfImage, AddressVariant::kInImageAlias}) {
      if (variant == to_string(v)) {
        spec.address_variant = v;
        return spec;
      }
    }
    throw ParameterError("unknown M1 variant '" + std::string(variant) +
                         "' (expected OUT_OF_IMAGE or IN_IMAGE_ALIAS)");
  }
  if (model == "M2") {
    spec.model = AttackModel::kInstruction;
    for (auto v : {InstructionVariant::kRandomWord, InstructionVariant::kOtherImageInstr,
                   InstructionVariant::kSingleBitFlip, InstructionVariant::kRandomByte}) {
      if (variant == to_string(v)) {
        spec.instruction_variant = v;
        return spec;
      }
    }
    throw ParameterError("unknown M2 variant '" + std::string(variant) +
                         "' (expected RANDOM_WORD, OTHER_IMAGE_INSTR, SINGLE_BIT_FLIP or "
                         "RANDOM_BYTE)");
  }
  throw ParameterError("unknown attack model '" + std::string(model) + "' (expected M1 or M2)");
}

FetchEvent mutate(const FetchEvent& event, const AttackSpec& spec,
                  const riscv::ProgramImage& image, Rng& rng) {
  FetchEvent m = event;
  m.tampered = true;
  const std::uint64_t n = image.size();

  if (spec.model == AttackModel::kAddress) {
    if (spec.address_variant == AddressVariant::kOutOfImage) {
      // Word slots of the 32-bit space not covered by the image, drawn
      // uniformly and placed after the image (wrapping past 2^32).
      constexpr std::uint64_t kSlots = std::uint64_t{1} << 30;
      if (n >= kSlots) throw ParameterError("image fills the address space");
      const std::uint64_t r = uniform_below(rng, kSlots - n);
      m.address = image.base + static_cast<Word>(4 * (n + r));
      m.instruction = uniform_word(rng);
      m.tamper_kind = kTamperOutOfImage;
      return m;
    }
    if (n < 2) throw ParameterError("IN_IMAGE_ALIAS needs an image of at least two words");
    std::uint64_t j = 0;
    const bool inside = image.contains(event.address);
    if (inside) {
      const std::uint64_t self = (event.address - image.base) / 4;
      j = uniform_below(rng, n - 1);
      if (j >= self) ++j;
    } else {
      j = uniform_below(rng, n);
    }
    m.address = image.address_of(j);
    m.instruction = random_word_except(rng, image.words[j]);
    m.tamper_kind = kTamperInImageAlias;
    return m;
  }

  switch (spec.instruction_variant) {
    case InstructionVariant::kRandomWord:
      m.instruction = random_word_except(rng, event.instruction);
      m.tamper_kind = kTamperRandomWord;
      break;
    case InstructionVariant::kOtherImageInstr: {
      bool found = false;
      for (int tries = 0; tries < 64 && !found; ++tries) {
        const Word w = image.words[uniform_below(rng, n)];
        if (w != event.instruction) {
          m.instruction = w;
          found = true;
        }
      }
      if (!found) {
        std::vector<Word> others;
        for (Word w : image.words) {
          if (w != event.instruction) others.push_back(w);
        }
        if (others.empty()) {
          throw ParameterError("OTHER_IMAGE_INSTR needs an image with two distinct words");
        }
        m.instruction = others[uniform_below(rng, others.size())];
      }
      m.tamper_kind = kTamperOtherImageInstr;
      break;
    }
    case InstructionVariant::kSingleBitFlip:
      m.instruction = event.instruction ^ (Word{1} << uniform_below(rng, 32));
      m.tamper_kind = kTamperSingleBitFlip;
      break;
    case InstructionVariant::kRandomByte: {
      const auto byte = static_cast<int>(uniform_below(rng, 4));
      const Word old = (event.instruction >> (8 * byte)) & 0xFF;
      Word v = static_cast<Word>(uniform_below(rng, 255));
      if (v >= old) ++v;
      m.instruction = (event.instruction & ~(Word{0xFF} << (8 * byte))) | (v << (8 * byte));
      m.tamper_kind = kTamperRandomByte;
      break;
    }
  }
  return m;
}

Injection inject(std::vector<FetchEvent>& trace, const AttackSpec& spec,
                 const riscv::ProgramImage& image, Rng& rng) {
  if (trace.empty()) throw ParameterError("cannot inject into an empty trace");
  Injection inj;
  inj.cycle = uniform_below(rng, trace.size());
  inj.original = trace[inj.cycle];
  trace[inj.cycle] = mutate(inj.original, spec, image, rng);
  return inj;
}

Injection inject(std::vector<FetchEvent>& trace, const AttackSpec& spec,
                 const riscv::ProgramImage& image) {
  Rng rng = make_rng(spec.seed);
  return inject(trace, spec, image, rng);
}

}  // namespace hsc::harness
