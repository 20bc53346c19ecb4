#include "pimfft/softfloat.hpp"

#include <cmath>
#include <stdexcept>

namespace pimfft {
namespace {

inline int bit_length(uint64_t v) {
  int n = 0;
  while (v) {
    v >>= 1;
    ++n;
  }
  return n;
}

}  // namespace

FormatEmulator::FormatEmulator(NumberFormat fmt, Rounding rounding)
    : fmt_(fmt), rounding_(rounding) {
  fmt_.validate();
}

uint64_t FormatEmulator::pack(bool sign, uint64_t exp, uint64_t mant) const {
  const int m = fmt_.mantissa_bits;
  const int e = fmt_.exponent_bits;
  return ((uint64_t)sign << (e + m)) | ((exp & ((1u << e) - 1)) << m) |
         (mant & ((uint64_t{1} << m) - 1));
}

bool FormatEmulator::is_zero(uint64_t a) const {
  if (fmt_.is_float()) {
    const int m = fmt_.mantissa_bits;
    return ((a >> m) & ((1u << fmt_.exponent_bits) - 1)) == 0;
  }
  return (a & format_mask(fmt_)) == 0;
}

uint64_t FormatEmulator::negate(uint64_t a) const {
  if (fmt_.is_float()) return (a ^ (uint64_t{1} << (fmt_.total_bits - 1))) & format_mask(fmt_);
  return (~a + 1) & format_mask(fmt_);
}

// Rounds a significand laid out as [P bits | G R S] with the leading one at
// bit m+3, packs with flush/saturate handling.
uint64_t FormatEmulator::round_pack(bool sign, int64_t exp, uint64_t sig3,
                                    ArithFlags* flags) const {
  const int m = fmt_.mantissa_bits;
  const int e = fmt_.exponent_bits;
  const uint64_t lsb = (sig3 >> 3) & 1, g = (sig3 >> 2) & 1, r = (sig3 >> 1) & 1, s = sig3 & 1;
  uint64_t frac = sig3 >> 3;
  if (rounding_ == Rounding::NearestEven && g && (r || s || lsb)) frac += 1;
  if (frac >> (m + 1)) {  // rounding carried into a new leading bit
    frac >>= 1;
    exp += 1;
  }
  if (exp <= 0) {
    if (flags) flags->flushed++;
    return pack(sign, 0, 0);
  }
  if (exp >= (int64_t{1} << e)) {
    if (flags) flags->saturated++;
    return pack(sign, (1u << e) - 1, (uint64_t{1} << m) - 1);
  }
  return pack(sign, (uint64_t)exp, frac);
}

uint64_t FormatEmulator::add_float(uint64_t a, uint64_t b, ArithFlags* flags) const {
  const int m = fmt_.mantissa_bits;
  const int e = fmt_.exponent_bits;
  const uint64_t emask = (1u << e) - 1, mmask = (uint64_t{1} << m) - 1;
  const bool sa = (a >> (e + m)) & 1, sb = (b >> (e + m)) & 1;
  const uint64_t ea = (a >> m) & emask, eb = (b >> m) & emask;
  const uint64_t ma = a & mmask, mb = b & mmask;

  if (ea == 0 && eb == 0) return pack(sa && sb, 0, 0);
  if (ea == 0) return b & format_mask(fmt_);
  if (eb == 0) return a & format_mask(fmt_);

  // Order by magnitude so the subtraction path never goes negative.
  const uint64_t keya = (ea << m) | ma, keyb = (eb << m) | mb;
  const bool swap = keyb > keya;
  const bool sx = swap ? sb : sa, sy = swap ? sa : sb;
  const uint64_t ex = swap ? eb : ea, ey = swap ? ea : eb;
  const uint64_t mx = swap ? mb : ma, my = swap ? ma : mb;

  const uint64_t sigx = (uint64_t{1} << m) | mx;
  const uint64_t sigy = (uint64_t{1} << m) | my;
  const uint64_t x3 = sigx << 3;
  const int64_t d = (int64_t)ex - (int64_t)ey;

  uint64_t y3;
  if (d >= m + 4) {
    y3 = 1;  // everything shifted out; operand is nonzero so sticky stays set
  } else {
    const uint64_t t = sigy << 3;
    const uint64_t dropped = d ? (t & ((uint64_t{1} << d) - 1)) : 0;
    y3 = (t >> d) | (dropped ? 1 : 0);
  }

  const bool effsub = sx != sy;
  uint64_t sum;
  int64_t exp = (int64_t)ex;
  if (!effsub) {
    sum = x3 + y3;
    if ((sum >> (m + 4)) & 1) {
      sum = (sum >> 1) | (sum & 1);
      exp += 1;
    }
  } else {
    sum = x3 - y3;
    if (sum == 0) return pack(false, 0, 0);  // exact cancellation gives +0
    const int lead = bit_length(sum) - 1;
    const int k = (m + 3) - lead;
    sum <<= k;
    exp -= k;
  }
  return round_pack(sx, exp, sum, flags);
}

uint64_t FormatEmulator::mul_float(uint64_t a, uint64_t b, ArithFlags* flags) const {
  const int m = fmt_.mantissa_bits;
  const int e = fmt_.exponent_bits;
  const uint64_t emask = (1u << e) - 1, mmask = (uint64_t{1} << m) - 1;
  const bool sa = (a >> (e + m)) & 1, sb = (b >> (e + m)) & 1;
  const bool s = sa != sb;
  const uint64_t ea = (a >> m) & emask, eb = (b >> m) & emask;
  if (ea == 0 || eb == 0) return pack(s, 0, 0);

  const uint64_t sigx = (uint64_t{1} << m) | (a & mmask);
  const uint64_t sigy = (uint64_t{1} << m) | (b & mmask);
  const uint64_t prod = sigx * sigy;  // 2m+2 bits, fits: m <= 30
  const int top = 2 * m + 1;
  const bool hi = (prod >> top) & 1;
  int64_t exp = (int64_t)ea + (int64_t)eb - fmt_.bias() + (hi ? 1 : 0);

  const int lead = hi ? top : top - 1;
  const int sh = lead - (m + 3);
  uint64_t sig3;
  if (sh >= 0) {
    const uint64_t dropped = sh ? (prod & ((uint64_t{1} << sh) - 1)) : 0;
    sig3 = (prod >> sh) | (dropped ? 1 : 0);
  } else {
    sig3 = prod << (-sh);
  }
  return round_pack(s, exp, sig3, flags);
}

uint64_t FormatEmulator::add(uint64_t a, uint64_t b, ArithFlags* flags) const {
  if (fmt_.is_float()) return add_float(a, b, flags);
  return (a + b) & format_mask(fmt_);
}

uint64_t FormatEmulator::sub(uint64_t a, uint64_t b, ArithFlags* flags) const {
  if (fmt_.is_float()) return add_float(a, negate(b), flags);
  return (a - b) & format_mask(fmt_);
}

uint64_t FormatEmulator::mul(uint64_t a, uint64_t b, ArithFlags* flags) const {
  if (fmt_.is_float()) return mul_float(a, b, flags);
  return (a * b) & format_mask(fmt_);
}

uint64_t FormatEmulator::halve(uint64_t a, ArithFlags* flags) const {
  const uint64_t mask = format_mask(fmt_);
  if (!fmt_.is_float()) {  // arithmetic shift right by one
    const int n = fmt_.total_bits;
    const uint64_t sign = (a >> (n - 1)) & 1;
    return (((a & mask) >> 1) | (sign << (n - 1))) & mask;
  }
  const int m = fmt_.mantissa_bits;
  const int e = fmt_.exponent_bits;
  const uint64_t exp = (a >> m) & ((1u << e) - 1);
  if (exp == 0) return a & mask;  // zero stays untouched
  if (exp == 1) {                 // below minimum normal: flush
    if (flags) flags->flushed++;
    const bool sign = (a >> (e + m)) & 1;
    return pack(sign, 0, 0);
  }
  return (a - (uint64_t{1} << m)) & mask;
}

uint64_t FormatEmulator::encode(double x, ArithFlags* flags) const {
  if (!fmt_.is_float()) {
    if (!std::isfinite(x)) throw std::invalid_argument("cannot encode non-finite value");
    const double scaled = std::ldexp(x, fmt_.fraction_bits);
    double r = std::nearbyint(scaled);  // assume default RNE host mode
    // explicit ties-to-even, independent of the host rounding mode
    if (std::abs(scaled - std::trunc(scaled)) == 0.5) {
      const double fl = std::floor(scaled);
      r = (std::fmod(fl, 2.0) == 0.0) ? fl : fl + 1.0;
    }
    return (uint64_t)(int64_t)r & format_mask(fmt_);
  }
  if (!std::isfinite(x)) throw std::invalid_argument("cannot encode non-finite value");
  if (x == 0.0) return pack(std::signbit(x), 0, 0);
  const bool sign = std::signbit(x);
  int xe;
  const double f = std::frexp(std::abs(x), &xe);  // f in [0.5, 1)
  // 53-bit integer significand of the double, exact
  const uint64_t sig53 = (uint64_t)std::ldexp(f, 53);
  const int m = fmt_.mantissa_bits;
  // target layout [m+1 bits | G R S]: shift 53 -> m+4 with sticky
  const int sh = 53 - (m + 4);
  const uint64_t dropped = sig53 & ((uint64_t{1} << sh) - 1);
  const uint64_t sig3 = (sig53 >> sh) | (dropped ? 1 : 0);
  const int64_t exp = (int64_t)xe - 1 + fmt_.bias();
  return round_pack(sign, exp, sig3, flags);
}

double FormatEmulator::decode(uint64_t bits) const {
  if (!fmt_.is_float()) {
    const int n = fmt_.total_bits;
    int64_t v = (int64_t)(bits & format_mask(fmt_));
    if (v >> (n - 1)) v -= (int64_t{1} << n);
    return std::ldexp((double)v, -fmt_.fraction_bits);
  }
  const int m = fmt_.mantissa_bits;
  const int e = fmt_.exponent_bits;
  const uint64_t exp = (bits >> m) & ((1u << e) - 1);
  const bool sign = (bits >> (e + m)) & 1;
  if (exp == 0) return sign ? -0.0 : 0.0;
  const double sig = 1.0 + std::ldexp((double)(bits & ((uint64_t{1} << m) - 1)), -m);
  const double v = std::ldexp(sig, (int)exp - fmt_.bias());
  return sign ? -v : v;
}

uint64_t FormatEmulator::pack_complex(uint64_t re, uint64_t im) const {
  const uint64_t mask = format_mask(fmt_);
  return (re & mask) | ((im & mask) << fmt_.total_bits);
}

uint64_t FormatEmulator::encode_complex(std::complex<double> z, ArithFlags* flags) const {
  return pack_complex(encode(z.real(), flags), encode(z.imag(), flags));
}

std::complex<double> FormatEmulator::decode_complex(uint64_t bits) const {
  return {decode(complex_re(bits)), decode(complex_im(bits))};
}

}  // namespace pimfft
