#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace lean3d {

inline constexpr int kAlphabetSize = 16;
inline constexpr int kProbBits = 16;                     // total mass 2^16
inline constexpr std::uint32_t kProbScale = 1u << kProbBits;
inline constexpr int kLogitScale = 128;                  // z~ = floor(128 z + 0.5)
inline constexpr std::int32_t kRankWeight = 1000;        // s_r = 1000 z~_r - r
inline constexpr std::int32_t kLogitMin = -(1 << 15);
inline constexpr std::int32_t kLogitMax = (1 << 15) - 1;

/// Counts assigned by rank: the top symbol, ranks 1..14, and the last rank.
inline constexpr std::array<std::uint32_t, kAlphabetSize> kRankTemplate = {
    60000, 369, 369, 369, 369, 369, 369, 369, 369, 369, 369, 369, 369, 369, 369, 370};

/// Sixteen quantized logits in [-2^15, 2^15).
using QuantizedLogits = std::array<std::int16_t, kAlphabetSize>;

/// cdf[0] = 0, cdf[16] = 65536, strictly increasing.
struct IntegerCdf {
  std::array<std::uint32_t, kAlphabetSize + 1> cdf{};

  std::uint32_t start(unsigned symbol) const { return cdf[symbol]; }
  std::uint32_t freq(unsigned symbol) const { return cdf[symbol + 1] - cdf[symbol]; }
  friend bool operator==(const IntegerCdf&, const IntegerCdf&) = default;
};

/// floor(128 z + 0.5) per entry, clamped to the int16 logit domain.
/// Throws kInput on NaN/Inf.
QuantizedLogits quantize_logits(std::span<const double, kAlphabetSize> z);

/// Rank-template CDF. Integer-only and a pure function of the logits.
IntegerCdf logits_to_cdf(const QuantizedLogits& logits);

/// CDF of the all-zero logit vector (symbol 0 dominant, symbol 15 last).
const IntegerCdf& uniform_prior_cdf();

/// Byte-wise rANS encoder, 32-bit state in [2^23, 2^31). Symbols must be fed
/// in reverse coding order; finish() returns the stream the decoder reads forward.
class RansEncoder {
 public:
  void put(unsigned symbol, const IntegerCdf& cdf);
  std::vector<std::uint8_t> finish();
  std::size_t symbols_coded() const { return count_; }

 private:
  std::uint32_t state_ = 1u << 23;
  std::vector<std::uint8_t> reversed_;
  std::size_t count_ = 0;
};

/// Forward rANS decoder. Every read is bounds-checked; finish() verifies that
/// the stream was consumed exactly and the state returned to its initial value.
class RansDecoder {
 public:
  explicit RansDecoder(std::span<const std::uint8_t> bytes);
  unsigned get(const IntegerCdf& cdf);
  void finish() const;

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
  std::uint32_t state_ = 0;
};

/// Encodes symbols[i] under cdfs[i]. Sizes must match.
std::vector<std::uint8_t> rans_encode(std::span<const std::uint8_t> symbols, std::span<const IntegerCdf> cdfs);

/// Decodes `count` symbols; provider(i, decoded_prefix) returns the CDF for
/// position i and may depend on the symbols already decoded.
template <typename Provider>
std::vector<std::uint8_t> rans_decode(std::span<const std::uint8_t> bytes, Provider&& provider, std::size_t count) {
  RansDecoder dec(bytes);
  std::vector<std::uint8_t> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const IntegerCdf& cdf = provider(i, std::span<const std::uint8_t>(out));
    out.push_back(static_cast<std::uint8_t>(dec.get(cdf)));
  }
  dec.finish();
  return out;
}

/// -log2(freq / 2^16), the ideal cost of coding `symbol` under `cdf`.
double symbol_bits(const IntegerCdf& cdf, unsigned symbol);

}  // namespace lean3d
