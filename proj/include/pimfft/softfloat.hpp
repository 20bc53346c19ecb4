#pragma once
// Host-side, bit-exact emulation of the arithmetic realized by the gate
// schedules. The emulator is the normative definition of the arithmetic; the
// column circuits are transliterations of the same algorithms and are tested
// for bit equality against it.

#include <complex>
#include <cstdint>

#include "pimfft/types.hpp"

namespace pimfft {

enum class Rounding : uint8_t { NearestEven, TowardZero };

struct ArithFlags {
  uint64_t flushed = 0;    // underflow results flushed to zero
  uint64_t saturated = 0;  // overflow results clamped to max magnitude

  ArithFlags& operator+=(const ArithFlags& o) {
    flushed += o.flushed;
    saturated += o.saturated;
    return *this;
  }
};

class FormatEmulator {
 public:
  explicit FormatEmulator(NumberFormat fmt, Rounding rounding = Rounding::NearestEven);

  const NumberFormat& format() const { return fmt_; }

  uint64_t add(uint64_t a, uint64_t b, ArithFlags* flags = nullptr) const;
  uint64_t sub(uint64_t a, uint64_t b, ArithFlags* flags = nullptr) const;
  uint64_t mul(uint64_t a, uint64_t b, ArithFlags* flags = nullptr) const;
  /// Division by two: float decrements the exponent (zero kept, minimum
  /// exponent flushes to zero); fixed is an arithmetic right shift.
  uint64_t halve(uint64_t a, ArithFlags* flags = nullptr) const;
  uint64_t negate(uint64_t a) const;

  bool is_zero(uint64_t a) const;

  /// Round a host double into the format (same rounding rules as the ops).
  uint64_t encode(double x, ArithFlags* flags = nullptr) const;
  double decode(uint64_t bits) const;

  /// Complex helpers over [re | im] packing in a single word
  /// (real slot in the low total_bits, imaginary above it).
  uint64_t pack_complex(uint64_t re, uint64_t im) const;
  uint64_t complex_re(uint64_t z) const { return z & format_mask(fmt_); }
  uint64_t complex_im(uint64_t z) const { return (z >> fmt_.total_bits) & format_mask(fmt_); }
  uint64_t encode_complex(std::complex<double> z, ArithFlags* flags = nullptr) const;
  std::complex<double> decode_complex(uint64_t bits) const;

 private:
  uint64_t add_float(uint64_t a, uint64_t b, ArithFlags* flags) const;
  uint64_t mul_float(uint64_t a, uint64_t b, ArithFlags* flags) const;
  uint64_t round_pack(bool sign, int64_t exp, uint64_t sig3, ArithFlags* flags) const;
  uint64_t pack(bool sign, uint64_t exp, uint64_t mant) const;

  NumberFormat fmt_;
  Rounding rounding_;
};

}  // namespace pimfft
