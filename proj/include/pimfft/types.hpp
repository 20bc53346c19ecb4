#pragma once
// Number formats shared by the in-memory schedules and the host-side
// reference arithmetic.

#include <cstdint>
#include <stdexcept>
#include <string>

namespace pimfft {

enum class NumberKind : uint8_t { Fixed, Float };

/// Bit layout of one real scalar inside a crossbar row, LSB-first:
///   fixed:  [0..total)  two's complement with `fraction_bits` binary places
///   float:  [0..mant) mantissa, [mant..mant+exp) biased exponent, top bit sign
///
/// Float semantics (mirrored exactly by FormatEmulator and the gate
/// schedules): exponent 0 encodes zero, every other exponent pattern is a
/// normal value (no NaN/Inf encodings), rounding is to-nearest-even,
/// underflow flushes to zero, overflow saturates to the maximum magnitude.
struct NumberFormat {
  NumberKind kind = NumberKind::Float;
  int total_bits = 32;
  int fraction_bits = 0;   // fixed only
  int exponent_bits = 8;   // float only
  int mantissa_bits = 23;  // float only

  static NumberFormat single() { return floating(8, 23); }
  static NumberFormat half() { return floating(5, 10); }

  static NumberFormat fixed(int total, int fraction) {
    NumberFormat f;
    f.kind = NumberKind::Fixed;
    f.total_bits = total;
    f.fraction_bits = fraction;
    f.exponent_bits = 0;
    f.mantissa_bits = 0;
    f.validate();
    return f;
  }

  static NumberFormat floating(int exponent, int mantissa) {
    NumberFormat f;
    f.kind = NumberKind::Float;
    f.total_bits = 1 + exponent + mantissa;
    f.exponent_bits = exponent;
    f.mantissa_bits = mantissa;
    f.validate();
    return f;
  }

  bool is_float() const { return kind == NumberKind::Float; }
  int bias() const { return (1 << (exponent_bits - 1)) - 1; }

  void validate() const {
    if (kind == NumberKind::Float) {
      if (exponent_bits < 2 || exponent_bits > 11)
        throw std::invalid_argument("exponent width out of supported range [2,11]");
      if (mantissa_bits < 2 || mantissa_bits > 30)
        throw std::invalid_argument("mantissa width out of supported range [2,30]");
      if (total_bits != 1 + exponent_bits + mantissa_bits)
        throw std::invalid_argument("inconsistent float width");
      if (total_bits > 32) throw std::invalid_argument("real width above 32 bits unsupported");
    } else {
      if (total_bits < 2 || total_bits > 32)
        throw std::invalid_argument("fixed width out of supported range [2,32]");
      if (fraction_bits < 0 || fraction_bits >= total_bits)
        throw std::invalid_argument("fraction bits out of range");
    }
  }

  std::string name() const {
    if (kind == NumberKind::Float)
      return "float-e" + std::to_string(exponent_bits) + "m" + std::to_string(mantissa_bits);
    return "fixed-" + std::to_string(total_bits) + "." + std::to_string(fraction_bits);
  }

  bool operator==(const NumberFormat&) const = default;
};

/// A complex value is two adjacent real slots: re then im.
inline int complex_bits(const NumberFormat& f) { return 2 * f.total_bits; }

inline uint64_t format_mask(const NumberFormat& f) {
  return f.total_bits == 64 ? ~uint64_t{0} : ((uint64_t{1} << f.total_bits) - 1);
}

}  // namespace pimfft
