#include "pimfft/oracle.hpp"

#include <numbers>
#include <stdexcept>

namespace pimfft::oracle {

namespace {

// roots-of-unity table: w[t] = exp(-2*pi*i * t / n)
std::vector<std::complex<double>> root_table(Eigen::Index n, bool inverse) {
  std::vector<std::complex<double>> w(n);
  const double base = (inverse ? 2.0 : -2.0) * std::numbers::pi / (double)n;
  for (Eigen::Index t = 0; t < n; ++t) w[t] = std::polar(1.0, base * (double)t);
  return w;
}

bool is_pow2(size_t n) { return n && (n & (n - 1)) == 0; }

}  // namespace

CVec naive_dft(const CVec& x) {
  const Eigen::Index n = x.size();
  if (n == 0) throw std::invalid_argument("empty sequence");
  const auto w = root_table(n, false);
  CVec X(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    std::complex<double> acc = 0;
    for (Eigen::Index j = 0; j < n; ++j) acc += x[j] * w[(j * k) % n];
    X[k] = acc;
  }
  return X;
}

CVec naive_idft(const CVec& X) {
  const Eigen::Index n = X.size();
  if (n == 0) throw std::invalid_argument("empty sequence");
  const auto w = root_table(n, true);
  CVec x(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    std::complex<double> acc = 0;
    for (Eigen::Index k = 0; k < n; ++k) acc += X[k] * w[(j * k) % n];
    x[j] = acc / (double)n;
  }
  return x;
}

namespace {

CVec fft_pow2(const CVec& in, bool inverse) {
  const Eigen::Index n = in.size();
  if (!is_pow2((size_t)n)) throw std::invalid_argument("length must be a power of two");
  CVec a(n);
  // bit-reversed copy
  int levels = 0;
  while ((Eigen::Index{1} << levels) < n) ++levels;
  for (Eigen::Index i = 0; i < n; ++i) {
    Eigen::Index r = 0;
    for (int b = 0; b < levels; ++b)
      if (i & (Eigen::Index{1} << b)) r |= Eigen::Index{1} << (levels - 1 - b);
    a[r] = in[i];
  }
  for (Eigen::Index m = 2; m <= n; m <<= 1) {
    const Eigen::Index half = m >> 1;
    const double ang = (inverse ? 2.0 : -2.0) * std::numbers::pi / (double)m;
    for (Eigen::Index j = 0; j < half; ++j) {
      const std::complex<double> w = std::polar(1.0, ang * (double)j);
      for (Eigen::Index k = j; k < n; k += m) {
        const std::complex<double> t = w * a[k + half];
        const std::complex<double> u = a[k];
        a[k] = u + t;
        a[k + half] = u - t;
      }
    }
  }
  return a;
}

}  // namespace

CVec host_fft(const CVec& x) { return fft_pow2(x, false); }

CVec host_ifft(const CVec& X) {
  CVec x = fft_pow2(X, true);
  x /= (double)X.size();
  return x;
}

CVec schoolbook_polymul(const CVec& a, const CVec& b, ConvMode mode) {
  if (a.size() == 0 || b.size() == 0) throw std::invalid_argument("empty polynomial");
  if (mode == ConvMode::Acyclic) {
    CVec c = CVec::Zero(a.size() + b.size() - 1);
    for (Eigen::Index i = 0; i < a.size(); ++i)
      for (Eigen::Index j = 0; j < b.size(); ++j) c[i + j] += a[i] * b[j];
    return c;
  }
  if (a.size() != b.size()) throw std::invalid_argument("cyclic convolution needs equal lengths");
  const Eigen::Index n = a.size();
  CVec c = CVec::Zero(n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) c[(i + j) % n] += a[i] * b[j];
  return c;
}

double rel_l2(const CVec& got, const CVec& ref) {
  const double rn = ref.norm();
  if (rn == 0.0) return got.norm() == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return (got - ref).norm() / rn;
}

Replay::Replay(NumberFormat fmt, Rounding rounding) : emu_(fmt, rounding) {}

uint64_t Replay::get(int row, int col) const {
  const auto it = mem_.find(key(row, col));
  if (it == mem_.end()) throw std::logic_error("replay reads an unwritten slot");
  return it->second;
}

void Replay::apply(const LogEntry& e) {
  switch (e.op) {
    case LogOp::Set:
      put(e.dst_row, e.dst_col, e.bits);
      return;
    case LogOp::Copy:
      put(e.dst_row, e.dst_col, get(e.src_row, e.src_col));
      return;
    case LogOp::Swap: {
      const uint64_t a = get(e.src_row, e.src_col);
      const uint64_t b = get(e.dst_row, e.dst_col);
      put(e.src_row, e.src_col, b);
      put(e.dst_row, e.dst_col, a);
      return;
    }
    default: break;
  }
  e.rows.for_each_block([&](int start, int len) {
    for (int r = start; r < start + len; ++r) {
      switch (e.op) {
        case LogOp::CopyVec: put(r, e.out, get(r, e.a)); break;
        case LogOp::SwapVec: {
          const uint64_t x = get(r, e.a), y = get(r, e.b);
          put(r, e.a, y);
          put(r, e.b, x);
          break;
        }
        case LogOp::Add: put(r, e.out, emu_.add(get(r, e.a), get(r, e.b), &flags_)); break;
        case LogOp::Sub: put(r, e.out, emu_.sub(get(r, e.a), get(r, e.b), &flags_)); break;
        case LogOp::Mul: put(r, e.out, emu_.mul(get(r, e.a), get(r, e.b), &flags_)); break;
        case LogOp::Halve: put(r, e.a, emu_.halve(get(r, e.a), &flags_)); break;
        case LogOp::Neg: put(r, e.a, emu_.negate(get(r, e.a))); break;
        default: throw std::logic_error("bad log entry");
      }
    }
  });
}

void Replay::run(const ExecLog& log) {
  for (const auto& e : log.entries) apply(e);
}

bool Replay::has(int row, int col) const { return mem_.count(key(row, col)) != 0; }

uint64_t Replay::slot(int row, int col) const { return get(row, col); }

size_t replay_mismatches(const ExecLog& log, const NumberFormat& fmt,
                         const std::vector<std::pair<std::pair<int, int>, uint64_t>>& expected,
                         Rounding rounding) {
  Replay rp(fmt, rounding);
  rp.run(log);
  size_t bad = 0;
  for (const auto& [addr, bits] : expected)
    if (rp.slot(addr.first, addr.second) != bits) ++bad;
  return bad;
}

}  // namespace pimfft::oracle
