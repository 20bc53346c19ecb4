#pragma once
// Host-side references used for verification: direct DFT/IDFT, a
// double-precision radix-2 FFT, schoolbook polynomial multiplication, and a
// replay interpreter that re-executes a recorded operation log through the
// FormatEmulator for bit-exact comparison against the crossbar image.

#include <Eigen/Dense>
#include <complex>
#include <unordered_map>
#include <vector>

#include "pimfft/exec_log.hpp"
#include "pimfft/softfloat.hpp"

namespace pimfft::oracle {

using CVec = Eigen::VectorXcd;

CVec naive_dft(const CVec& x);
CVec naive_idft(const CVec& X);
CVec host_fft(const CVec& x);
CVec host_ifft(const CVec& X);

enum class ConvMode { Cyclic, Acyclic };
/// Exact double-precision coefficient convolution; acyclic output has
/// length |a| + |b| - 1, cyclic output |a|.
CVec schoolbook_polymul(const CVec& a, const CVec& b, ConvMode mode);

double rel_l2(const CVec& got, const CVec& ref);

/// Replays a recorded operation log on a host-side slot mirror.
class Replay {
 public:
  explicit Replay(NumberFormat fmt, Rounding rounding = Rounding::NearestEven);

  void run(const ExecLog& log);

  bool has(int row, int col) const;
  uint64_t slot(int row, int col) const;
  const ArithFlags& flags() const { return flags_; }

 private:
  static uint64_t key(int row, int col) {
    return (uint64_t)(uint32_t)col << 32 | (uint32_t)row;
  }
  uint64_t get(int row, int col) const;
  void put(int row, int col, uint64_t v) { mem_[key(row, col)] = v; }
  void apply(const LogEntry& e);

  FormatEmulator emu_;
  ArithFlags flags_;
  std::unordered_map<uint64_t, uint64_t> mem_;
};

/// Replays `log` and compares the named real slots against `expected_bits`.
/// Returns the number of mismatching slots (0 = bit-exact).
size_t replay_mismatches(const ExecLog& log, const NumberFormat& fmt,
                         const std::vector<std::pair<std::pair<int, int>, uint64_t>>& expected,
                         Rounding rounding = Rounding::NearestEven);

}  // namespace pimfft::oracle
