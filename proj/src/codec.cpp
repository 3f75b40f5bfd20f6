#include "hsc/codec.hpp"

#include <cstdio>
#include <memory>
#include <mutex>

#include "hsc/error.hpp"

namespace hsc::codec {

namespace {

std::uint64_t low_mask(int width) {
  return width >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << width) - 1;
}

bool is_power_of_two(int v) { return v > 0 && (v & (v - 1)) == 0; }

}  // namespace

int hamming_parity_width(int data_width) {
  if (data_width < 1 || data_width > kMaxDataWidth) {
    throw ParameterError("hamming data width must be in [1, 64], got " +
                         std::to_string(data_width));
  }
  int p = 1;
  while ((1 << p) < data_width + p + 1) ++p;
  return p;
}

HammingLayout::HammingLayout(int data_width)
    : data_width_(data_width), parity_width_(hamming_parity_width(data_width)) {
  data_bit_at_.fill(-1);
  int bit = 0;
  for (int pos = 1; bit < data_width_; ++pos) {
    if (is_power_of_two(pos)) continue;
    position_[bit] = static_cast<std::int8_t>(pos);
    data_bit_at_[pos] = static_cast<std::int8_t>(bit);
    for (int j = 0; j < parity_width_; ++j) {
      if (pos & (1 << j)) coverage_[j] |= std::uint64_t{1} << bit;
    }
    ++bit;
  }
}

std::uint64_t HammingLayout::coverage(int parity_index) const {
  if (parity_index < 0 || parity_index >= parity_width_) {
    throw ParameterError("parity index out of range");
  }
  return coverage_[parity_index];
}

int HammingLayout::position_of(int data_bit) const {
  if (data_bit < 0 || data_bit >= data_width_) throw ParameterError("data bit out of range");
  return position_[data_bit];
}

void HammingLayout::check_data(std::uint64_t data) const {
  if (data & ~low_mask(data_width_)) {
    throw ParameterError("data does not fit in " + std::to_string(data_width_) + " bits");
  }
}

void HammingLayout::check_parity(std::uint32_t parity) const {
  if (parity & ~static_cast<std::uint32_t>(low_mask(parity_width_))) {
    throw ParameterError("parity does not fit in " + std::to_string(parity_width_) + " bits");
  }
}

std::uint32_t HammingLayout::parity(std::uint64_t data) const {
  check_data(data);
  return parity_unchecked(data);
}

std::uint32_t HammingLayout::syndrome(std::uint64_t data, std::uint32_t stored_parity) const {
  check_parity(stored_parity);
  return parity(data) ^ stored_parity;
}

Correction HammingLayout::correct(std::uint64_t data, std::uint32_t stored_parity) const {
  const std::uint32_t s = syndrome(data, stored_parity);
  if (s == 0) return {CorrectionStatus::kClean, data, -1};
  if (static_cast<int>(s) > codeword_width()) return {CorrectionStatus::kUncorrectable, data, -1};
  if (is_power_of_two(static_cast<int>(s))) {
    return {CorrectionStatus::kParityError, data, __builtin_ctz(s)};
  }
  const int bit = data_bit_at_[s];
  return {CorrectionStatus::kDataCorrected, data ^ (std::uint64_t{1} << bit), bit};
}

const HammingLayout& hamming_layout(int data_width) {
  hamming_parity_width(data_width);  // range check
  static std::array<std::unique_ptr<HammingLayout>, kMaxDataWidth + 1> cache;
  static std::once_flag flags[kMaxDataWidth + 1];
  std::call_once(flags[data_width],
                 [data_width] { cache[data_width] = std::make_unique<HammingLayout>(data_width); });
  return *cache[data_width];
}

namespace {

const HammingLayout& layout_for(Bits data) {
  const auto& layout = hamming_layout(data.width);
  if (data.value & ~low_mask(data.width)) throw ParameterError("bit vector wider than its width");
  return layout;
}

void check_parity_width(const HammingLayout& layout, Bits parity) {
  if (parity.width != layout.parity_width()) {
    throw ParameterError("stored parity width " + std::to_string(parity.width) +
                         " does not match layout parity width " +
                         std::to_string(layout.parity_width()));
  }
}

}  // namespace

Bits hamming_parity(Bits data) {
  const auto& layout = layout_for(data);
  return {layout.parity(data.value), layout.parity_width()};
}

Bits hamming_syndrome(Bits data, Bits stored_parity) {
  const auto& layout = layout_for(data);
  check_parity_width(layout, stored_parity);
  return {layout.syndrome(data.value, static_cast<std::uint32_t>(stored_parity.value)),
          layout.parity_width()};
}

Correction hamming_correct(Bits data, Bits stored_parity) {
  const auto& layout = layout_for(data);
  check_parity_width(layout, stored_parity);
  return layout.correct(data.value, static_cast<std::uint32_t>(stored_parity.value));
}

std::uint32_t crc_remainder(std::uint64_t data, int data_width, CrcParams params) {
  const std::uint32_t top = std::uint32_t{1} << (params.width - 1);
  const std::uint32_t mask = static_cast<std::uint32_t>(low_mask(params.width));
  const auto poly = static_cast<std::uint32_t>(params.poly);
  std::uint32_t reg = 0;
  for (int i = data_width - 1; i >= 0; --i) {
    const bool in = (data >> i) & 1;
    const bool msb = (reg & top) != 0;
    reg = (reg << 1) & mask;
    if (msb != in) reg ^= poly;
  }
  return reg;
}

void validate(const CodeKind& kind) {
  if (kind.family != CodeFamily::kCrc) return;
  const auto& p = kind.crc;
  if (p.width < 1 || p.width > 32) {
    throw ParameterError("CRC check width must be in [1, 32], got " + std::to_string(p.width));
  }
  if (p.poly == 0) throw ParameterError("CRC polynomial must be nonzero");
  if (p.poly & ~low_mask(p.width)) {
    throw ParameterError("CRC polynomial has terms above x^" + std::to_string(p.width - 1));
  }
}

Bits crc_checkbits(Bits data, CrcParams params) {
  validate(CodeKind::crc_of(params));
  if (data.width < 1 || data.width > kMaxDataWidth) {
    throw ParameterError("CRC data width must be in [1, 64]");
  }
  if (data.value & ~low_mask(data.width)) throw ParameterError("bit vector wider than its width");
  return {crc_remainder(data.value, data.width, params), params.width};
}

std::string describe(const CodeKind& kind, int data_width) {
  char buf[96];
  if (kind.family == CodeFamily::kHamming) {
    std::snprintf(buf, sizeof buf, "HSEC:d%d:p%d", data_width,
                  hamming_parity_width(data_width));
  } else {
    std::snprintf(buf, sizeof buf, "CRC:d%d:poly=0x%llX:c%d", data_width,
                  static_cast<unsigned long long>(kind.crc.poly), kind.crc.width);
  }
  return buf;
}

CheckCode::CheckCode(CodeKind kind, int data_width) : kind_(kind), data_width_(data_width) {
  if (data_width < 1 || data_width > kMaxDataWidth) {
    throw ParameterError("code data width must be in [1, 64]");
  }
  validate(kind_);
  if (kind_.family == CodeFamily::kHamming) {
    layout_ = &hamming_layout(data_width);
    check_width_ = layout_->parity_width();
  } else {
    check_width_ = kind_.crc.width;
  }
}

}  // namespace hsc::codec
