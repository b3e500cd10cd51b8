#include "lean3d/entropy.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "lean3d/error.hpp"

namespace lean3d {
namespace {

constexpr std::uint32_t kRansLow = 1u << 23;
constexpr std::uint32_t kRansHigh = 1u << 31;

}  // namespace

QuantizedLogits quantize_logits(std::span<const double, kAlphabetSize> z) {
  QuantizedLogits out{};
  for (int r = 0; r < kAlphabetSize; ++r) {
    if (!std::isfinite(z[r])) fail(ErrorKind::kInput, "non-finite logit");
    const double v = std::floor(kLogitScale * z[r] + 0.5);
    out[r] = static_cast<std::int16_t>(std::clamp(v, double(kLogitMin), double(kLogitMax)));
  }
  return out;
}

IntegerCdf logits_to_cdf(const QuantizedLogits& logits) {
  // |score| < 2^25: fits comfortably in int32, and scores are all distinct.
  std::array<std::int32_t, kAlphabetSize> score{};
  for (int r = 0; r < kAlphabetSize; ++r) score[r] = kRankWeight * std::int32_t{logits[r]} - r;

  std::array<int, kAlphabetSize> order{};
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) { return score[a] > score[b]; });

  std::array<std::uint32_t, kAlphabetSize> count{};
  for (int j = 0; j < kAlphabetSize; ++j) count[order[j]] = kRankTemplate[j];

  IntegerCdf out;
  for (int r = 0; r < kAlphabetSize; ++r) out.cdf[r + 1] = out.cdf[r] + count[r];
  return out;
}

const IntegerCdf& uniform_prior_cdf() {
  static const IntegerCdf cdf = logits_to_cdf(QuantizedLogits{});
  return cdf;
}

void RansEncoder::put(unsigned symbol, const IntegerCdf& cdf) {
  if (symbol >= kAlphabetSize) fail(ErrorKind::kUsage, "symbol out of range: " + std::to_string(symbol));
  const std::uint32_t f = cdf.freq(symbol);
  if (f == 0) fail(ErrorKind::kUsage, "symbol has zero frequency");
  const std::uint32_t limit = ((kRansLow >> kProbBits) << 8) * f;
  std::uint32_t x = state_;
  while (x >= limit) {
    reversed_.push_back(static_cast<std::uint8_t>(x & 0xFF));
    x >>= 8;
  }
  state_ = ((x / f) << kProbBits) + (x % f) + cdf.start(symbol);
  ++count_;
}

std::vector<std::uint8_t> RansEncoder::finish() {
  std::vector<std::uint8_t> out;
  out.reserve(reversed_.size() + 4);
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(state_ >> (8 * i)));
  out.insert(out.end(), reversed_.rbegin(), reversed_.rend());
  reversed_.clear();
  state_ = kRansLow;
  count_ = 0;
  return out;
}

RansDecoder::RansDecoder(std::span<const std::uint8_t> bytes) : bytes_(bytes) {
  if (bytes_.size() < 4) fail(ErrorKind::kCorruptStream, "rANS stream shorter than its 4-byte state");
  for (int i = 0; i < 4; ++i) state_ |= static_cast<std::uint32_t>(bytes_[i]) << (8 * i);
  pos_ = 4;
  if (state_ < kRansLow || state_ >= kRansHigh) fail(ErrorKind::kCorruptStream, "rANS initial state out of range");
}

unsigned RansDecoder::get(const IntegerCdf& cdf) {
  const std::uint32_t low = state_ & (kProbScale - 1);
  unsigned s = 0;
  while (s + 1 < kAlphabetSize && cdf.cdf[s + 1] <= low) ++s;
  const std::uint64_t next = std::uint64_t{cdf.freq(s)} * (state_ >> kProbBits) + low - cdf.start(s);
  if (next >= kRansHigh) fail(ErrorKind::kCorruptStream, "rANS state overflow");
  std::uint32_t x = static_cast<std::uint32_t>(next);
  while (x < kRansLow) {
    if (pos_ >= bytes_.size()) fail(ErrorKind::kCorruptStream, "rANS stream exhausted");
    x = (x << 8) | bytes_[pos_++];
  }
  state_ = x;
  return s;
}

void RansDecoder::finish() const {
  if (pos_ != bytes_.size()) fail(ErrorKind::kIntegrity, "rANS stream has unconsumed bytes");
  if (state_ != kRansLow) fail(ErrorKind::kIntegrity, "rANS final state mismatch");
}

std::vector<std::uint8_t> rans_encode(std::span<const std::uint8_t> symbols, std::span<const IntegerCdf> cdfs) {
  if (symbols.size() != cdfs.size()) fail(ErrorKind::kUsage, "symbol and CDF sequences differ in length");
  RansEncoder enc;
  for (std::size_t i = symbols.size(); i-- > 0;) enc.put(symbols[i], cdfs[i]);
  return enc.finish();
}

double symbol_bits(const IntegerCdf& cdf, unsigned symbol) {
  return -std::log2(static_cast<double>(cdf.freq(symbol)) / kProbScale);
}

}  // namespace lean3d
