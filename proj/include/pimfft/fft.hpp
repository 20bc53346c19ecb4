#pragma once
// In-memory radix-2 FFT on one crossbar.
//
// Storage configurations for an n-point complex sequence on an r x c array
// (E = complex width in bit columns):
//   R       n = r        one element per row over E columns
//   TwoR    n = 2r       two elements per row over 2E columns
//   TwoRBeta{beta}  n = 2r*beta   2*beta elements per row over 2E*beta columns
//
// Layout (normative index maps, shared by the engine, the tests and the
// documentation):
//   * Elements-per-row order is row-major raster: storage slot u of row k
//     holds position p = k*U + u at the first stage, leftmost unit first,
//     the same direction in every row.
//   * At the stage with butterfly distance d = 2^(s-1), position p maps to
//     butterfly b = ((p >> s) << (s-1)) | (p & (d-1)) and side c = bit s-1
//     of p. Multi-slot configs place butterfly b at row b / pairs, unit pair
//     b % pairs, slot side c; the R configuration always keeps position p in
//     row p and pairs operands via the align/restore steps instead.
//   * Between stages only the elements whose side bit changes move; they
//     exchange places pairwise (slot swaps realized with NOT copies).
//
// Two stage orders are provided. DecimationInTime consumes the bit-reversed
// order (input permutation first) and emits natural order; it is the
// standalone transform. DecimationInFrequency consumes natural order and
// emits bit-reversed order with the permutation after the stages; running
// the forward transform as DIF and the inverse as DIT lets a
// transform-multiply-inverse pipeline drop both permutations, which cancel.

#include <complex>
#include <span>
#include <vector>

#include "pimfft/bitserial.hpp"
#include "pimfft/crossbar.hpp"
#include "pimfft/exec_log.hpp"
#include "pimfft/types.hpp"

namespace pimfft {

enum class FFTVariant : uint8_t { R, TwoR, TwoRBeta };
enum class Direction : uint8_t { Forward, Inverse };
enum class StageOrder : uint8_t { DecimationInTime, DecimationInFrequency };

struct FFTConfig {
  FFTVariant variant = FFTVariant::R;
  int beta = 1;                 // TwoRBeta only
  bool use_partitions = false;  // TwoRBeta only; butterflies run in lockstep

  static FFTConfig r() { return {FFTVariant::R, 1, false}; }
  static FFTConfig two_r() { return {FFTVariant::TwoR, 1, false}; }
  static FFTConfig two_r_beta(int beta, bool partitions = false) {
    return {FFTVariant::TwoRBeta, beta, partitions};
  }
};

const char* variant_name(FFTVariant v);

struct FFTPlanOptions {
  bool skip_input_permutation = false;
  StageOrder order = StageOrder::DecimationInTime;
  /// The data to transform already sits in the output layout of a previous
  /// forward run (DIT only); the input permutation folds the layout change in.
  bool input_in_forward_output_layout = false;
  /// Column base of the data region (polynomial pipelines lay out several
  /// regions side by side). Twiddle/scratch windows can be shared the same way.
  int col_base = 0;
  int twiddle_base = -1;  // -1: place automatically after the data
  int scratch_base = -1;
  int align_base = -1;
};

struct SlotAddr {
  int row = 0;
  int col = 0;
};

struct FFTPlan {
  int n = 0;
  int levels = 0;
  FFTConfig config;
  NumberFormat format;
  Direction direction = Direction::Forward;
  CrossbarDims dims;
  StageOrder order = StageOrder::DecimationInTime;
  bool skip_input_permutation = false;
  bool input_in_forward_output_layout = false;
  bool partition_parallel = false;

  int rows_used = 0;
  int units = 1;  // element slots per row
  int pairs = 1;  // butterfly units per row (multi-slot configs)
  int elem_cols = 0;

  std::vector<int> slot_base;     // physical base column per slot
  std::vector<int> twiddle_base;  // per butterfly unit
  int align_base = 0;             // R-config partner region
  int scratch_base = 0;
  int scratch_width = 0;
  std::vector<int> pair_scratch_base;  // partition-aligned layouts
  int footprint = 0;

  int input_stage() const;
  int output_stage() const;
  /// Physical slot of element position p in the layout of stage s.
  SlotAddr element_addr(int stage, int position) const;
  /// Twiddle constant of the butterfly at (row, pair) in stage s, rounded
  /// once from a double-precision host value into the storage format.
  uint64_t twiddle_bits(int stage, int pair, int row) const;
  std::complex<double> twiddle_value(int stage, int pair, int row) const;

  int scratch_for_pair(int t) const {
    return pair_scratch_base.empty() ? scratch_base : pair_scratch_base[t];
  }
};

FFTPlan plan_fft(int n, CrossbarDims dims, const NumberFormat& format,
                 const FFTConfig& config, Direction direction,
                 const FFTPlanOptions& options = {});

/// Host-side (untimed) placement of the input sequence in the plan's input
/// layout; values are rounded once into the storage format.
void load_sequence(Crossbar& xb, const FFTPlan& plan,
                   std::span<const std::complex<double>> values, ExecLog* log = nullptr);
std::vector<std::complex<double>> read_sequence(const Crossbar& xb, const FFTPlan& plan);
std::vector<uint64_t> read_sequence_bits(const Crossbar& xb, const FFTPlan& plan);
/// (row, column, bits) of every real slot of the output, for replay checks.
std::vector<std::pair<std::pair<int, int>, uint64_t>> read_real_slots(const Crossbar& xb,
                                                                      const FFTPlan& plan);

/// Timed input permutation (or the layout-folding variant, see options).
void bit_reversal_permute(Crossbar& xb, const FFTPlan& plan, ExecLog* log = nullptr);

/// R-configuration stage steps: bring each butterfly's partner element next
/// to its mate (align), and return outputs to one-element-per-row (restore).
void stage_align_r(Crossbar& xb, const FFTPlan& plan, int stage, ExecLog* log = nullptr);
void stage_restore_r(Crossbar& xb, const FFTPlan& plan, int stage, ExecLog* log = nullptr);

/// Layout transition between stage `stage` and `stage + 1` (involution).
void swap_pairs(Crossbar& xb, const FFTPlan& plan, int stage, ExecLog* log = nullptr);

void write_stage_twiddles(Crossbar& xb, const FFTPlan& plan, int stage,
                          ExecLog* log = nullptr);

/// One element-parallel butterfly over explicit slots; twiddles must already
/// sit in `w`. DIT flavor (u, v) <- (u + w v, u - w v); DIF flavor
/// (u, v) <- (u + v, (u - v) w).
void butterfly_rows(Crossbar& xb, const FFTPlan& plan, int u_col, int v_col, int w_col,
                    const RowSet& rows, bool dif_flavor = false, ExecLog* log = nullptr);

/// Full transform on the resident sequence; returns the trace delta.
Trace run_fft(Crossbar& xb, const FFTPlan& plan, ExecLog* log = nullptr);
/// Same machinery with an Inverse-direction plan (conjugate twiddles and the
/// final 1/n scaling by repeated exponent decrements).
Trace run_inverse_fft(Crossbar& xb, const FFTPlan& plan, ExecLog* log = nullptr);

}  // namespace pimfft
