#include "pimfft/gates.hpp"

#include <algorithm>
#include <mutex>
#include <stdexcept>

namespace pimfft {

CircuitBuilder::CircuitBuilder(int n_external) : n_external_(n_external), next_(n_external) {
  if (n_external < 1) throw std::invalid_argument("schedule needs at least one external wire");
}

Wire CircuitBuilder::ext(int i) const {
  if (i < 0 || i >= n_external_) throw std::out_of_range("external wire");
  return i;
}

std::vector<Wire> CircuitBuilder::ext_range(int base, int count) const {
  std::vector<Wire> v(count);
  for (int i = 0; i < count; ++i) v[i] = ext(base + i);
  return v;
}

Wire CircuitBuilder::fresh() { return next_++; }

Wire CircuitBuilder::nor(Wire a, Wire b) {
  const Wire out = fresh();
  gates_.push_back({ColumnOp::Kind::Nor, a, b, out});
  return out;
}

Wire CircuitBuilder::not_(Wire a) {
  const Wire out = fresh();
  gates_.push_back({ColumnOp::Kind::Not, a, 0, out});
  return out;
}

Wire CircuitBuilder::xnor_(Wire a, Wire b) {
  const Wire n1 = nor(a, b);
  const Wire n2 = nor(a, n1);
  const Wire n3 = nor(b, n1);
  return nor(n2, n3);
}

Wire CircuitBuilder::mux(Wire s, Wire a, Wire b) {
  const Wire t1 = nor(not_(a), not_(s));  // a & s
  const Wire t2 = nor(not_(b), s);        // b & !s
  return not_(nor(t1, t2));
}

Wire CircuitBuilder::zero() {
  if (zero_ < 0) {
    const Wire x = ext(0);
    zero_ = nor(x, not_(x));
  }
  return zero_;
}

Wire CircuitBuilder::one() {
  if (one_ < 0) one_ = not_(zero());
  return one_;
}

void CircuitBuilder::copy_to_ext(Wire w, int ext_index) {
  const Wire t = not_(w);
  gates_.push_back({ColumnOp::Kind::Not, t, 0, ext(ext_index)});
}

CompiledSchedule CircuitBuilder::compile() const {
  // last read per internal wire
  std::vector<int> last_use(next_, -1);
  int first_ext_write = (int)gates_.size();
  int last_ext_read = -1;
  for (int g = 0; g < (int)gates_.size(); ++g) {
    const auto& gate = gates_[g];
    last_use[gate.a] = g;
    if (gate.a < n_external_) last_ext_read = std::max(last_ext_read, g);
    if (gate.kind == ColumnOp::Kind::Nor) {
      last_use[gate.b] = g;
      if (gate.b < n_external_) last_ext_read = std::max(last_ext_read, g);
    }
    if (gate.out < n_external_) first_ext_write = std::min(first_ext_write, g);
  }
  // the in-place guarantee: once outputs start landing, operands are dead
  if (last_ext_read > first_ext_write)
    throw std::logic_error("schedule reads an external wire after writing one");

  CompiledSchedule s;
  s.n_external = n_external_;
  std::vector<int32_t> col_of(next_, INT32_MIN);
  std::vector<int32_t> free_cols;
  int width = 0;
  auto resolve_in = [&](Wire w) -> int32_t {
    if (w < n_external_) return -(w + 1);
    if (col_of[w] == INT32_MIN) throw std::logic_error("wire read before definition");
    return col_of[w];
  };
  for (int g = 0; g < (int)gates_.size(); ++g) {
    const auto& gate = gates_[g];
    CompiledGate cg;
    cg.kind = gate.kind;
    cg.a = resolve_in(gate.a);
    cg.b = gate.kind == ColumnOp::Kind::Nor ? resolve_in(gate.b) : 0;
    if (gate.out < n_external_) {
      cg.out = -(gate.out + 1);
    } else {
      int32_t col;
      if (!free_cols.empty()) {
        col = free_cols.back();
        free_cols.pop_back();
      } else {
        col = width++;
      }
      col_of[gate.out] = col;
      cg.out = col;
    }
    s.gates.push_back(cg);
    // release columns whose wires die here
    auto maybe_free = [&](Wire w) {
      if (w >= n_external_ && last_use[w] == g && col_of[w] != INT32_MIN) {
        free_cols.push_back(col_of[w]);
        col_of[w] = INT32_MIN;
      }
    };
    maybe_free(gate.a);
    if (gate.kind == ColumnOp::Kind::Nor) maybe_free(gate.b);
    maybe_free(gate.out);  // dead store (e.g. unread wire)
  }
  s.scratch_width = width;
  return s;
}

// --- vector helpers ----------------------------------------------------------

std::vector<Wire> mux_vec(CircuitBuilder& cb, Wire s, const std::vector<Wire>& a,
                          const std::vector<Wire>& b) {
  if (a.size() != b.size()) throw std::invalid_argument("mux width mismatch");
  const Wire ns = cb.not_(s);
  std::vector<Wire> out(a.size());
  for (size_t i = 0; i < a.size(); ++i) {
    const Wire t1 = cb.nor(cb.not_(a[i]), ns);   // a & s
    const Wire t2 = cb.nor(cb.not_(b[i]), s);    // b & !s
    out[i] = cb.not_(cb.nor(t1, t2));
  }
  return out;
}

Wire or_all(CircuitBuilder& cb, std::span<const Wire> v) {
  if (v.empty()) return cb.zero();
  // balanced NOR/NOT tree
  std::vector<Wire> cur(v.begin(), v.end());
  while (cur.size() > 1) {
    std::vector<Wire> next;
    for (size_t i = 0; i + 1 < cur.size(); i += 2) next.push_back(cb.or_(cur[i], cur[i + 1]));
    if (cur.size() % 2) next.push_back(cur.back());
    cur = std::move(next);
  }
  return cur[0];
}

Wire is_zero_vec(CircuitBuilder& cb, std::span<const Wire> v) {
  return cb.not_(or_all(cb, v));
}

namespace {

// sum and carry of a full adder; 9 gates
std::pair<Wire, Wire> full_add(CircuitBuilder& cb, Wire a, Wire b, Wire c) {
  const Wire n1 = cb.nor(a, b);
  const Wire n2 = cb.nor(a, n1);
  const Wire n3 = cb.nor(b, n1);
  const Wire n4 = cb.nor(n2, n3);  // xnor(a,b)
  const Wire n5 = cb.nor(n4, c);
  const Wire n6 = cb.nor(n4, n5);
  const Wire n7 = cb.nor(c, n5);
  const Wire sum = cb.nor(n6, n7);   // a ^ b ^ c
  const Wire cout = cb.nor(n1, n5);  // maj(a,b,c)
  return {sum, cout};
}

}  // namespace

std::vector<Wire> add_vec(CircuitBuilder& cb, const std::vector<Wire>& a,
                          const std::vector<Wire>& b, Wire carry_in) {
  if (a.size() != b.size()) throw std::invalid_argument("add width mismatch");
  std::vector<Wire> out(a.size() + 1);
  Wire c = carry_in;
  for (size_t i = 0; i < a.size(); ++i) {
    auto [s, co] = full_add(cb, a[i], b[i], c);
    out[i] = s;
    c = co;
  }
  out[a.size()] = c;
  return out;
}

std::vector<Wire> sub_vec(CircuitBuilder& cb, const std::vector<Wire>& a,
                          const std::vector<Wire>& b) {
  std::vector<Wire> nb(b.size());
  for (size_t i = 0; i < b.size(); ++i) nb[i] = cb.not_(b[i]);
  auto s = add_vec(cb, a, nb, cb.one());
  s.pop_back();  // discard carry
  return s;
}

Wire less_than(CircuitBuilder& cb, const std::vector<Wire>& a, const std::vector<Wire>& b) {
  if (a.size() != b.size()) throw std::invalid_argument("compare width mismatch");
  // borrow chain of a - b: borrow' = maj(!a, b, borrow)
  Wire borrow = cb.zero();
  for (size_t i = 0; i < a.size(); ++i) {
    const Wire na = cb.not_(a[i]);
    const Wire n1 = cb.nor(na, b[i]);
    const Wire n4 = cb.xnor_(na, b[i]);
    const Wire n5 = cb.nor(n4, borrow);
    borrow = cb.nor(n1, n5);
  }
  return borrow;
}

Wire ge_const(CircuitBuilder& cb, const std::vector<Wire>& v, uint64_t k) {
  // borrow chain of v - k with constant bits folded in
  Wire borrow = cb.zero();
  for (size_t i = 0; i < v.size(); ++i) {
    const bool kb = (k >> i) & 1;
    if (kb) {
      borrow = cb.not_(cb.nor(cb.not_(v[i]), borrow));  // !v | borrow
    } else {
      borrow = cb.nor(v[i], cb.not_(borrow));  // !v & borrow
    }
  }
  if (k >> v.size()) return cb.zero();  // constant wider than the vector
  return cb.not_(borrow);
}

std::vector<Wire> inc_vec(CircuitBuilder& cb, const std::vector<Wire>& a, Wire inc,
                          Wire* carry_out) {
  std::vector<Wire> out(a.size());
  Wire c = inc;
  for (size_t i = 0; i < a.size(); ++i) {
    out[i] = cb.xor_(a[i], c);
    c = cb.nor(cb.not_(a[i]), cb.not_(c));  // a & c
  }
  if (carry_out) *carry_out = c;
  return out;
}

// --- real-valued circuit blocks ----------------------------------------------

namespace {

struct FloatParts {
  std::vector<Wire> mant;
  std::vector<Wire> exp;
  Wire sign;
};

FloatParts split_float(const std::vector<Wire>& v, const NumberFormat& f) {
  FloatParts p;
  p.mant.assign(v.begin(), v.begin() + f.mantissa_bits);
  p.exp.assign(v.begin() + f.mantissa_bits, v.begin() + f.mantissa_bits + f.exponent_bits);
  p.sign = v[f.total_bits - 1];
  return p;
}

std::vector<Wire> const_vec(CircuitBuilder& cb, uint64_t bits, int width) {
  std::vector<Wire> v(width);
  for (int i = 0; i < width; ++i) v[i] = ((bits >> i) & 1) ? cb.one() : cb.zero();
  return v;
}

std::vector<Wire> zext(CircuitBuilder& cb, const std::vector<Wire>& v, int width) {
  std::vector<Wire> out = v;
  while ((int)out.size() < width) out.push_back(cb.zero());
  return out;
}

// Rounds [P bits | G R S] (leading one at bit m+3 for in-range values) to
// nearest-even, applies the exponent, and selects flush/saturate fallbacks.
// exp is a signed (e+2)-bit vector. Returns the packed W-bit result wires.
std::vector<Wire> round_pack_wires(CircuitBuilder& cb, const NumberFormat& f, Wire sign,
                                   std::vector<Wire> exp, const std::vector<Wire>& sig3) {
  const int m = f.mantissa_bits, e = f.exponent_bits;
  const Wire lsb = sig3[3], g = sig3[2], r = sig3[1], s = sig3[0];
  const Wire up = cb.nor(cb.not_(g), cb.not_(cb.or3(r, s, lsb)));  // g & (r|s|lsb)
  std::vector<Wire> frac(sig3.begin() + 3, sig3.begin() + 3 + m + 1);
  Wire carry;
  frac = inc_vec(cb, frac, up, &carry);
  // carry means the significand became a power of two one position up
  std::vector<Wire> frac_hi = const_vec(cb, uint64_t{1} << m, m + 1);
  frac = mux_vec(cb, carry, frac_hi, frac);
  exp = inc_vec(cb, exp, carry);

  const Wire esign = exp[e + 1];
  const Wire flush = cb.or_(esign, is_zero_vec(cb, exp));
  const Wire sat = cb.nor(cb.not_(cb.not_(esign)), cb.not_(exp[e]));  // !esign & exp[e]

  std::vector<Wire> out(f.total_bits);
  for (int i = 0; i < m; ++i) out[i] = frac[i];
  for (int i = 0; i < e; ++i) out[m + i] = exp[i];
  out[f.total_bits - 1] = sign;

  std::vector<Wire> satv(f.total_bits);
  for (int i = 0; i < m + e; ++i) satv[i] = cb.one();
  satv[f.total_bits - 1] = sign;
  out = mux_vec(cb, sat, satv, out);

  std::vector<Wire> flv = const_vec(cb, 0, f.total_bits);
  flv[f.total_bits - 1] = sign;
  return mux_vec(cb, flush, flv, out);
}

std::vector<Wire> float_add_wires(CircuitBuilder& cb, const NumberFormat& f,
                                  const std::vector<Wire>& a, std::vector<Wire> b,
                                  bool negate_b) {
  const int m = f.mantissa_bits, e = f.exponent_bits, W = f.total_bits;
  if (negate_b) b[W - 1] = cb.not_(b[W - 1]);
  const FloatParts pa = split_float(a, f), pb = split_float(b, f);

  const Wire za = is_zero_vec(cb, pa.exp);
  const Wire zb = is_zero_vec(cb, pb.exp);

  // magnitude order on (exp, mant)
  std::vector<Wire> keya, keyb;
  keya.insert(keya.end(), pa.mant.begin(), pa.mant.end());
  keya.insert(keya.end(), pa.exp.begin(), pa.exp.end());
  keyb.insert(keyb.end(), pb.mant.begin(), pb.mant.end());
  keyb.insert(keyb.end(), pb.exp.begin(), pb.exp.end());
  const Wire swap = less_than(cb, keya, keyb);

  const auto Ex = mux_vec(cb, swap, pb.exp, pa.exp);
  const auto Ey = mux_vec(cb, swap, pa.exp, pb.exp);
  const auto Mx = mux_vec(cb, swap, pb.mant, pa.mant);
  const auto My = mux_vec(cb, swap, pa.mant, pb.mant);
  const Wire sx = cb.mux(swap, pb.sign, pa.sign);
  const Wire sy = cb.mux(swap, pa.sign, pb.sign);

  const auto d = sub_vec(cb, Ex, Ey);
  const Wire dbig = ge_const(cb, d, (uint64_t)m + 4);

  // y significand shifted right by d with sticky, layout [m+4 bits]
  std::vector<Wire> y(m + 4);
  y[0] = cb.zero();
  y[1] = cb.zero();
  y[2] = cb.zero();
  for (int i = 0; i < m; ++i) y[3 + i] = My[i];
  y[m + 3] = cb.one();
  int levels = 0;
  while ((1 << levels) < m + 4) ++levels;
  for (int k = 0; k < levels && k < (int)d.size(); ++k) {
    const int sh = 1 << k;
    std::vector<Wire> dropped(y.begin(), y.begin() + sh);
    const Wire jam = or_all(cb, dropped);
    std::vector<Wire> cand(m + 4);
    cand[0] = cb.or_(y[sh], jam);
    for (int i = 1; i < m + 4; ++i) cand[i] = (i + sh < m + 4) ? y[i + sh] : cb.zero();
    y = mux_vec(cb, d[k], cand, y);
  }
  std::vector<Wire> y_far = const_vec(cb, 1, m + 4);  // fully shifted out: sticky only
  y = mux_vec(cb, dbig, y_far, y);

  std::vector<Wire> x(m + 4);
  x[0] = cb.zero();
  x[1] = cb.zero();
  x[2] = cb.zero();
  for (int i = 0; i < m; ++i) x[3 + i] = Mx[i];
  x[m + 3] = cb.one();

  const Wire effsub = cb.xor_(sx, sy);
  std::vector<Wire> yc(m + 4);
  for (int i = 0; i < m + 4; ++i) yc[i] = cb.xor_(y[i], effsub);
  auto sum = add_vec(cb, x, yc, effsub);  // m+5 bits

  const Wire zcancel =
      cb.nor(cb.not_(effsub), or_all(cb, std::span<const Wire>(sum.data(), m + 4)));

  // carry renormalization (addition path only)
  const Wire hi = cb.nor(cb.not_(sum[m + 4]), effsub);  // sum[m+4] & !effsub
  std::vector<Wire> val(sum.begin(), sum.begin() + m + 4);
  {
    std::vector<Wire> cand(m + 4);
    cand[0] = cb.or_(sum[1], sum[0]);
    for (int i = 1; i < m + 4; ++i) cand[i] = sum[i + 1];
    val = mux_vec(cb, hi, cand, val);
  }

  // left normalization; no-op on the addition path
  std::vector<Wire> exp = zext(cb, Ex, e + 2);
  exp = inc_vec(cb, exp, hi);
  int lv = 0;
  while ((1 << lv) < m + 4) ++lv;
  std::vector<Wire> shift_bits(lv, 0);
  for (int j = lv - 1; j >= 0; --j) {
    const int sh = 1 << j;
    if (sh >= m + 4) {
      shift_bits[j] = cb.zero();
      continue;
    }
    std::vector<Wire> top(val.end() - sh, val.end());
    const Wire do_shift = is_zero_vec(cb, top);
    std::vector<Wire> cand(m + 4);
    for (int i = m + 3; i >= sh; --i) cand[i] = val[i - sh];
    for (int i = 0; i < sh; ++i) cand[i] = cb.zero();
    val = mux_vec(cb, do_shift, cand, val);
    shift_bits[j] = do_shift;
  }
  std::vector<Wire> kvec(e + 2, 0);
  for (int i = 0; i < e + 2; ++i) kvec[i] = (i < lv) ? shift_bits[i] : cb.zero();
  exp = sub_vec(cb, exp, kvec);

  auto res = round_pack_wires(cb, f, sx, exp, val);

  // zero-operand and exact-cancellation bypasses, innermost lowest priority
  std::vector<Wire> poszero = const_vec(cb, 0, W);
  res = mux_vec(cb, zcancel, poszero, res);
  std::vector<Wire> avec = a;
  std::vector<Wire> bvec = b;
  res = mux_vec(cb, zb, avec, res);
  res = mux_vec(cb, za, bvec, res);
  std::vector<Wire> zz = const_vec(cb, 0, W);
  zz[W - 1] = cb.nor(cb.not_(pa.sign), cb.not_(pb.sign));  // sa & sb
  const Wire zab = cb.nor(cb.not_(za), cb.not_(zb));
  return mux_vec(cb, zab, zz, res);
}

std::vector<Wire> float_mul_wires(CircuitBuilder& cb, const NumberFormat& f,
                                  const std::vector<Wire>& a, const std::vector<Wire>& b) {
  const int m = f.mantissa_bits, e = f.exponent_bits, W = f.total_bits;
  const int P = m + 1;
  const FloatParts pa = split_float(a, f), pb = split_float(b, f);
  const Wire s = cb.xor_(pa.sign, pb.sign);
  const Wire za = is_zero_vec(cb, pa.exp);
  const Wire zb = is_zero_vec(cb, pb.exp);
  const Wire z = cb.or_(za, zb);

  std::vector<Wire> sx = pa.mant;
  sx.push_back(cb.one());
  std::vector<Wire> sy = pb.mant;
  sy.push_back(cb.one());

  // schoolbook product, LSB-first accumulation; carries land on virgin bits
  std::vector<Wire> acc(2 * P);
  for (int j = 0; j < P; ++j) acc[j] = cb.nor(cb.not_(sx[j]), cb.not_(sy[0]));
  for (int j = P; j < 2 * P; ++j) acc[j] = cb.zero();
  for (int i = 1; i < P; ++i) {
    const Wire nyi = cb.not_(sy[i]);
    Wire carry = cb.zero();
    for (int j = 0; j < P; ++j) {
      const Wire pp = cb.nor(cb.not_(sx[j]), nyi);
      auto [sum, co] = full_add(cb, acc[i + j], pp, carry);
      acc[i + j] = sum;
      carry = co;
    }
    acc[i + P] = carry;
  }

  const Wire hi = acc[2 * P - 1];
  // align leading one to bit m+3 of an (m+4)-wide window, sticky-jamming
  auto window = [&](int lead) {
    std::vector<Wire> v(m + 4);
    const int sh = lead - (m + 3);
    if (sh >= 0) {
      std::vector<Wire> dropped(acc.begin(), acc.begin() + sh);
      const Wire jam = or_all(cb, dropped);
      v[0] = sh < 2 * P ? cb.or_(acc[sh], jam) : jam;
      for (int i = 1; i < m + 4; ++i) v[i] = (i + sh < 2 * P) ? acc[i + sh] : cb.zero();
    } else {
      for (int i = 0; i < -sh; ++i) v[i] = cb.zero();
      for (int i = -sh; i < m + 4; ++i)
        v[i] = (i + sh < 2 * P) ? acc[i + sh] : cb.zero();
    }
    return v;
  };
  auto vhi = window(2 * P - 1);
  auto vlo = window(2 * P - 2);
  auto val = mux_vec(cb, hi, vhi, vlo);

  std::vector<Wire> ea = zext(cb, pa.exp, e + 2);
  std::vector<Wire> eb = zext(cb, pb.exp, e + 2);
  auto esum = add_vec(cb, ea, eb, cb.zero());
  esum.pop_back();
  auto exp = sub_vec(cb, esum, const_vec(cb, (uint64_t)f.bias(), e + 2));
  exp = inc_vec(cb, exp, hi);

  auto res = round_pack_wires(cb, f, s, exp, val);
  std::vector<Wire> zv = const_vec(cb, 0, W);
  zv[W - 1] = s;
  return mux_vec(cb, z, zv, res);
}

std::vector<Wire> float_halve_wires(CircuitBuilder& cb, const NumberFormat& f,
                                    const std::vector<Wire>& a) {
  const int m = f.mantissa_bits, e = f.exponent_bits, W = f.total_bits;
  const FloatParts pa = split_float(a, f);
  const Wire z = is_zero_vec(cb, pa.exp);
  // exp == 1
  std::vector<Wire> rest(pa.exp.begin() + 1, pa.exp.end());
  const Wire is_min = cb.nor(cb.not_(pa.exp[0]), or_all(cb, rest));
  // exp - 1 borrow chain
  std::vector<Wire> dec(e);
  Wire borrow = cb.one();
  for (int i = 0; i < e; ++i) {
    dec[i] = cb.xor_(pa.exp[i], borrow);
    borrow = cb.nor(pa.exp[i], cb.not_(borrow));  // !exp & borrow
  }
  std::vector<Wire> out(W);
  const Wire keep = cb.or_(z, is_min);
  auto eout = mux_vec(cb, keep, const_vec(cb, 0, e), dec);
  // zero keeps its (zero) exponent; min normal flushes mantissa too
  for (int i = 0; i < m; ++i) out[i] = cb.nor(cb.not_(a[i]), is_min);  // a & !is_min
  // restore exponent when input was zero (stays all-zero anyway)
  for (int i = 0; i < e; ++i) out[m + i] = eout[i];
  out[W - 1] = pa.sign;
  return out;
}

std::vector<Wire> fixed_add_wires(CircuitBuilder& cb, const NumberFormat& f,
                                  const std::vector<Wire>& a, const std::vector<Wire>& b,
                                  bool sub) {
  std::vector<Wire> bb = b;
  if (sub)
    for (auto& w : bb) w = cb.not_(w);
  auto s = add_vec(cb, a, bb, sub ? cb.one() : cb.zero());
  s.pop_back();  // wrap-around
  return s;
}

std::vector<Wire> fixed_mul_wires(CircuitBuilder& cb, const NumberFormat& f,
                                  const std::vector<Wire>& a, const std::vector<Wire>& b) {
  const int N = f.total_bits;
  std::vector<Wire> acc(N);
  for (int j = 0; j < N; ++j) acc[j] = cb.nor(cb.not_(a[j]), cb.not_(b[0]));
  for (int i = 1; i < N; ++i) {
    const Wire nbi = cb.not_(b[i]);
    Wire carry = cb.zero();
    for (int j = 0; j + i < N; ++j) {
      const Wire pp = cb.nor(cb.not_(a[j]), nbi);
      auto [sum, co] = full_add(cb, acc[i + j], pp, carry);
      acc[i + j] = sum;
      carry = co;
    }
  }
  return acc;
}

std::vector<Wire> fixed_halve_wires(CircuitBuilder& cb, const NumberFormat& f,
                                    const std::vector<Wire>& a) {
  const int N = f.total_bits;
  std::vector<Wire> out(N);
  for (int i = 0; i + 1 < N; ++i) out[i] = cb.not_(cb.not_(a[i + 1]));
  out[N - 1] = cb.not_(cb.not_(a[N - 1]));  // arithmetic shift keeps the sign
  return out;
}

std::vector<Wire> fixed_neg_wires(CircuitBuilder& cb, const NumberFormat& f,
                                  const std::vector<Wire>& a) {
  std::vector<Wire> na(a.size());
  for (size_t i = 0; i < a.size(); ++i) na[i] = cb.not_(a[i]);
  return inc_vec(cb, na, cb.one());
}

// real-op dispatch used by the complex composites
std::vector<Wire> real_op(CircuitBuilder& cb, const NumberFormat& f, ScheduleKind op,
                          const std::vector<Wire>& a, const std::vector<Wire>& b) {
  if (f.is_float()) {
    switch (op) {
      case ScheduleKind::FloatAdd: return float_add_wires(cb, f, a, b, false);
      case ScheduleKind::FloatSub: return float_add_wires(cb, f, a, b, true);
      case ScheduleKind::FloatMul: return float_mul_wires(cb, f, a, b);
      default: break;
    }
  } else {
    switch (op) {
      case ScheduleKind::FloatAdd: return fixed_add_wires(cb, f, a, b, false);
      case ScheduleKind::FloatSub: return fixed_add_wires(cb, f, a, b, true);
      case ScheduleKind::FloatMul: return fixed_mul_wires(cb, f, a, b);
      default: break;
    }
  }
  throw std::logic_error("unsupported real op");
}

void write_out(CircuitBuilder& cb, const std::vector<Wire>& w, int ext_base) {
  for (size_t i = 0; i < w.size(); ++i) cb.copy_to_ext(w[i], ext_base + (int)i);
}

CompiledSchedule build_real_binary(const NumberFormat& f, ScheduleKind op) {
  const int W = f.total_bits;
  CircuitBuilder cb(3 * W);
  const auto a = cb.ext_range(0, W);
  const auto b = cb.ext_range(W, W);
  write_out(cb, real_op(cb, f, op, a, b), 2 * W);
  return cb.compile();
}

CompiledSchedule build_halve(const NumberFormat& f) {
  const int W = f.total_bits;
  CircuitBuilder cb(2 * W);
  const auto a = cb.ext_range(0, W);
  write_out(cb, f.is_float() ? float_halve_wires(cb, f, a) : fixed_halve_wires(cb, f, a), W);
  return cb.compile();
}

CompiledSchedule build_fixed_neg(const NumberFormat& f) {
  const int W = f.total_bits;
  CircuitBuilder cb(2 * W);
  write_out(cb, fixed_neg_wires(cb, f, cb.ext_range(0, W)), W);
  return cb.compile();
}

CompiledSchedule build_complex_addsub(const NumberFormat& f, bool sub) {
  const int W = f.total_bits;
  CircuitBuilder cb(6 * W);
  const auto op = sub ? ScheduleKind::FloatSub : ScheduleKind::FloatAdd;
  const auto re = real_op(cb, f, op, cb.ext_range(0, W), cb.ext_range(2 * W, W));
  const auto im = real_op(cb, f, op, cb.ext_range(W, W), cb.ext_range(3 * W, W));
  write_out(cb, re, 4 * W);
  write_out(cb, im, 5 * W);
  return cb.compile();
}

CompiledSchedule build_complex_mul(const NumberFormat& f) {
  const int W = f.total_bits;
  CircuitBuilder cb(6 * W);
  const auto are = cb.ext_range(0, W), aim = cb.ext_range(W, W);
  const auto bre = cb.ext_range(2 * W, W), bim = cb.ext_range(3 * W, W);
  const auto p1 = real_op(cb, f, ScheduleKind::FloatMul, are, bre);
  const auto p2 = real_op(cb, f, ScheduleKind::FloatMul, aim, bim);
  const auto p3 = real_op(cb, f, ScheduleKind::FloatMul, are, bim);
  const auto p4 = real_op(cb, f, ScheduleKind::FloatMul, aim, bre);
  write_out(cb, real_op(cb, f, ScheduleKind::FloatSub, p1, p2), 4 * W);
  write_out(cb, real_op(cb, f, ScheduleKind::FloatAdd, p3, p4), 5 * W);
  return cb.compile();
}

// (u, v, w) -> (u + w*v, u - w*v), overwriting u and v
CompiledSchedule build_butterfly_dit(const NumberFormat& f) {
  const int W = f.total_bits;
  CircuitBuilder cb(6 * W);
  const auto ure = cb.ext_range(0, W), uim = cb.ext_range(W, W);
  const auto vre = cb.ext_range(2 * W, W), vim = cb.ext_range(3 * W, W);
  const auto wre = cb.ext_range(4 * W, W), wim = cb.ext_range(5 * W, W);
  const auto p1 = real_op(cb, f, ScheduleKind::FloatMul, wre, vre);
  const auto p2 = real_op(cb, f, ScheduleKind::FloatMul, wim, vim);
  const auto p3 = real_op(cb, f, ScheduleKind::FloatMul, wre, vim);
  const auto p4 = real_op(cb, f, ScheduleKind::FloatMul, wim, vre);
  const auto tre = real_op(cb, f, ScheduleKind::FloatSub, p1, p2);
  const auto tim = real_op(cb, f, ScheduleKind::FloatAdd, p3, p4);
  const auto o1re = real_op(cb, f, ScheduleKind::FloatAdd, ure, tre);
  const auto o1im = real_op(cb, f, ScheduleKind::FloatAdd, uim, tim);
  const auto o2re = real_op(cb, f, ScheduleKind::FloatSub, ure, tre);
  const auto o2im = real_op(cb, f, ScheduleKind::FloatSub, uim, tim);
  write_out(cb, o1re, 0);
  write_out(cb, o1im, W);
  write_out(cb, o2re, 2 * W);
  write_out(cb, o2im, 3 * W);
  return cb.compile();
}

// (u, v, w) -> (u + v, (u - v)*w), overwriting u and v
CompiledSchedule build_butterfly_dif(const NumberFormat& f) {
  const int W = f.total_bits;
  CircuitBuilder cb(6 * W);
  const auto ure = cb.ext_range(0, W), uim = cb.ext_range(W, W);
  const auto vre = cb.ext_range(2 * W, W), vim = cb.ext_range(3 * W, W);
  const auto wre = cb.ext_range(4 * W, W), wim = cb.ext_range(5 * W, W);
  const auto are = real_op(cb, f, ScheduleKind::FloatAdd, ure, vre);
  const auto aim = real_op(cb, f, ScheduleKind::FloatAdd, uim, vim);
  const auto sre = real_op(cb, f, ScheduleKind::FloatSub, ure, vre);
  const auto sim = real_op(cb, f, ScheduleKind::FloatSub, uim, vim);
  const auto p1 = real_op(cb, f, ScheduleKind::FloatMul, wre, sre);
  const auto p2 = real_op(cb, f, ScheduleKind::FloatMul, wim, sim);
  const auto p3 = real_op(cb, f, ScheduleKind::FloatMul, wre, sim);
  const auto p4 = real_op(cb, f, ScheduleKind::FloatMul, wim, sre);
  const auto o2re = real_op(cb, f, ScheduleKind::FloatSub, p1, p2);
  const auto o2im = real_op(cb, f, ScheduleKind::FloatAdd, p3, p4);
  write_out(cb, are, 0);
  write_out(cb, aim, W);
  write_out(cb, o2re, 2 * W);
  write_out(cb, o2im, 3 * W);
  return cb.compile();
}

CompiledSchedule build(ScheduleKind kind, const NumberFormat& f) {
  switch (kind) {
    case ScheduleKind::FixedAdd:
    case ScheduleKind::FloatAdd: return build_real_binary(f, ScheduleKind::FloatAdd);
    case ScheduleKind::FixedSub:
    case ScheduleKind::FloatSub: return build_real_binary(f, ScheduleKind::FloatSub);
    case ScheduleKind::FixedMulLow:
    case ScheduleKind::FloatMul: return build_real_binary(f, ScheduleKind::FloatMul);
    case ScheduleKind::FixedHalve:
    case ScheduleKind::FloatHalve: return build_halve(f);
    case ScheduleKind::FixedNeg: return build_fixed_neg(f);
    case ScheduleKind::ComplexAdd: return build_complex_addsub(f, false);
    case ScheduleKind::ComplexSub: return build_complex_addsub(f, true);
    case ScheduleKind::ComplexMul: return build_complex_mul(f);
    case ScheduleKind::ButterflyDit: return build_butterfly_dit(f);
    case ScheduleKind::ButterflyDif: return build_butterfly_dif(f);
  }
  throw std::logic_error("unknown schedule kind");
}

}  // namespace

const char* schedule_kind_name(ScheduleKind k) {
  switch (k) {
    case ScheduleKind::FixedAdd: return "fixed_add";
    case ScheduleKind::FixedSub: return "fixed_sub";
    case ScheduleKind::FixedMulLow: return "fixed_mul_low";
    case ScheduleKind::FixedHalve: return "fixed_halve";
    case ScheduleKind::FixedNeg: return "fixed_neg";
    case ScheduleKind::FloatAdd: return "float_add";
    case ScheduleKind::FloatSub: return "float_sub";
    case ScheduleKind::FloatMul: return "float_mul";
    case ScheduleKind::FloatHalve: return "float_halve";
    case ScheduleKind::ComplexAdd: return "complex_add";
    case ScheduleKind::ComplexSub: return "complex_sub";
    case ScheduleKind::ComplexMul: return "complex_mul";
    case ScheduleKind::ButterflyDit: return "butterfly_dit";
    case ScheduleKind::ButterflyDif: return "butterfly_dif";
  }
  return "?";
}

const CompiledSchedule& schedule_for(ScheduleKind kind, const NumberFormat& fmt) {
  struct Key {
    ScheduleKind kind;
    NumberFormat fmt;
    bool operator<(const Key& o) const {
      if (kind != o.kind) return kind < o.kind;
      if (fmt.kind != o.fmt.kind) return fmt.kind < o.fmt.kind;
      if (fmt.total_bits != o.fmt.total_bits) return fmt.total_bits < o.fmt.total_bits;
      if (fmt.fraction_bits != o.fmt.fraction_bits) return fmt.fraction_bits < o.fmt.fraction_bits;
      if (fmt.exponent_bits != o.fmt.exponent_bits) return fmt.exponent_bits < o.fmt.exponent_bits;
      return fmt.mantissa_bits < o.fmt.mantissa_bits;
    }
  };
  static std::map<Key, CompiledSchedule> cache;
  static std::mutex mu;
  std::lock_guard<std::mutex> lock(mu);
  auto [it, inserted] = cache.try_emplace(Key{kind, fmt});
  if (inserted) it->second = build(kind, fmt);
  return it->second;
}

std::map<std::string, ScheduleInfo> schedule_table(const NumberFormat& fmt) {
  std::map<std::string, ScheduleInfo> t;
  std::vector<ScheduleKind> kinds;
  if (fmt.is_float())
    kinds = {ScheduleKind::FloatAdd,   ScheduleKind::FloatSub,   ScheduleKind::FloatMul,
             ScheduleKind::FloatHalve, ScheduleKind::ComplexAdd, ScheduleKind::ComplexSub,
             ScheduleKind::ComplexMul, ScheduleKind::ButterflyDit, ScheduleKind::ButterflyDif};
  else
    kinds = {ScheduleKind::FixedAdd,   ScheduleKind::FixedSub,   ScheduleKind::FixedMulLow,
             ScheduleKind::FixedHalve, ScheduleKind::FixedNeg,   ScheduleKind::ComplexAdd,
             ScheduleKind::ComplexSub, ScheduleKind::ComplexMul, ScheduleKind::ButterflyDit,
             ScheduleKind::ButterflyDif};
  for (auto k : kinds) {
    const auto& s = schedule_for(k, fmt);
    t[schedule_kind_name(k)] = {s.cycles(), s.scratch_width};
  }
  return t;
}

int max_schedule_scratch(const NumberFormat& fmt) {
  int w = 0;
  for (const auto& [name, info] : schedule_table(fmt)) w = std::max(w, info.scratch_width);
  return w;
}

void run_schedule(Crossbar& xb, const CompiledSchedule& s, std::span<const int> ext_cols,
                  int scratch_base, const RowSet& rows) {
  if ((int)ext_cols.size() != s.n_external)
    throw std::invalid_argument("schedule binding width mismatch");
  if (scratch_base < 0 || scratch_base + s.scratch_width > xb.dims().cols)
    throw std::out_of_range("scratch window out of range");
  auto col = [&](int32_t v) { return v < 0 ? ext_cols[-v - 1] : scratch_base + v; };
  for (const auto& g : s.gates) {
    if (g.kind == ColumnOp::Kind::Nor)
      xb.nor_columns(col(g.a), col(g.b), col(g.out), rows);
    else
      xb.not_column(col(g.a), col(g.out), rows);
  }
}

void run_schedule_lockstep(Crossbar& xb, const CompiledSchedule& s,
                           std::span<const ScheduleBinding> bindings, const RowSet& rows) {
  if (bindings.empty()) throw std::invalid_argument("no bindings");
  for (const auto& b : bindings)
    if ((int)b.ext_cols.size() != s.n_external)
      throw std::invalid_argument("schedule binding width mismatch");
  std::vector<ColumnOp> ops(bindings.size());
  for (const auto& g : s.gates) {
    for (size_t p = 0; p < bindings.size(); ++p) {
      auto col = [&](int32_t v) {
        return v < 0 ? bindings[p].ext_cols[-v - 1] : bindings[p].scratch_base + v;
      };
      ops[p] = ColumnOp{g.kind, col(g.a), g.kind == ColumnOp::Kind::Nor ? col(g.b) : 0,
                        col(g.out), rows};
    }
    xb.parallel_partition_step(ops);
  }
}

}  // namespace pimfft
