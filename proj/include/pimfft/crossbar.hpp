#pragma once
// One memristive crossbar modeled as a binary matrix with single-cycle
// bitwise logic on columns (row-parallel) and on rows (column-parallel),
// optional column partitions, and exact cycle/gate/energy accounting.

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <span>
#include <vector>

namespace pimfft {

using BitMatrix = Eigen::Matrix<uint8_t, Eigen::Dynamic, Eigen::Dynamic>;

inline constexpr double kGateEnergyFJ = 6.4;
inline constexpr uint64_t kDefaultClockHz = 333'333'333;

struct CrossbarDims {
  int rows = 1024;
  int cols = 1024;
};

/// Contiguous, disjoint column ranges covering [0, cols).
struct PartitionConfig {
  struct Range {
    int begin = 0;
    int end = 0;  // exclusive
  };
  std::vector<Range> ranges;

  static PartitionConfig single(int cols) { return even(1, cols); }
  static PartitionConfig even(int count, int cols);

  int count() const { return (int)ranges.size(); }
  int index_of_column(int col) const;
  void validate(const CrossbarDims& dims) const;
};

enum class Phase : uint8_t {
  Other = 0,
  Permute,
  Align,
  Twiddle,
  Butterfly,
  Swap,
  Scale,
  Pointwise,
  Unpack,
  kCount
};

const char* phase_name(Phase p);

struct Trace {
  uint64_t cycles = 0;
  uint64_t gate_ops = 0;    // device-level gate evaluations
  uint64_t column_ops = 0;  // column-parallel logic steps issued
  uint64_t row_ops = 0;     // row-parallel logic steps issued
  uint64_t write_ops = 0;   // constant-write column segments
  uint64_t flush_events = 0;

  std::array<uint64_t, (size_t)Phase::kCount> phase_cycles{};

  /// Exact by construction: every gate evaluation costs kGateEnergyFJ.
  double energy_fj() const { return (double)gate_ops * kGateEnergyFJ; }
  double latency_s(uint64_t clock_hz = kDefaultClockHz) const {
    return (double)cycles / (double)clock_hz;
  }

  Trace operator-(const Trace& o) const;
  Trace& operator+=(const Trace& o);
};

/// Periodic row subset: rows [offset + k*period, offset + k*period + block).
struct RowSet {
  int offset = 0;
  int block = 0;
  int period = 1;
  int rows = 0;  // crossbar row count this set is defined over

  static RowSet all(int rows) { return {0, rows, rows, rows}; }
  static RowSet single(int row, int rows) { return {row, 1, rows, rows}; }
  static RowSet blocks(int offset, int block, int period, int rows) {
    return {offset, block, period, rows};
  }

  int count() const;
  bool contains(int row) const;
  template <typename F>
  void for_each_block(F&& f) const {
    for (int start = offset; start < rows; start += period) {
      const int len = std::min(block, rows - start);
      if (len > 0) f(start, len);
    }
  }
};

struct ColRange {
  int begin = 0;
  int width = 0;
  int end() const { return begin + width; }
};

struct ColumnOp {
  enum class Kind : uint8_t { Nor, Not };
  Kind kind = Kind::Nor;
  int a = 0;
  int b = 0;  // unused for Not
  int out = 0;
  RowSet rows;
};

class Crossbar {
 public:
  Crossbar(CrossbarDims dims, PartitionConfig partitions, uint8_t fill = 0);
  Crossbar(CrossbarDims dims, PartitionConfig partitions, const BitMatrix& init);

  const CrossbarDims& dims() const { return dims_; }
  const PartitionConfig& partitions() const { return partitions_; }
  const Trace& trace() const { return trace_; }

  void set_phase(Phase p) { phase_ = p; }
  Phase phase() const { return phase_; }

  // --- timed logic steps -------------------------------------------------
  /// out[row] = NOR(a[row], b[row]) for every row in the set; 1 cycle.
  void nor_columns(int a, int b, int out, const RowSet& rows);
  /// out[row] = NOT(a[row]); 1 cycle. `out` must differ from `a`.
  void not_column(int a, int out, const RowSet& rows);
  /// In-place complement of a column over a row subset; 1 cycle.
  void flip_column(int col, const RowSet& rows);

  /// out_row[col] = NOR(a_row[col], b_row[col]) over a column range; 1 cycle.
  void nor_rows(int a_row, int b_row, int out_row, const ColRange& cols);
  void not_row(int a_row, int out_row, const ColRange& cols);

  /// Executes up to partition-count column ops in a single cycle. Every op
  /// must sit wholly inside its own distinct partition.
  void parallel_partition_step(std::span<const ColumnOp> ops);

  /// Constant write. One cycle and one write op per column segment touched;
  /// no gate energy (tracked separately from the logic-gate model).
  void write_constant(const RowSet& rows, const ColRange& cols,
                      const std::vector<uint64_t>& row_bits);
  /// Same value pattern for every row in the set.
  void write_constant_uniform(const RowSet& rows, const ColRange& cols, uint64_t bits);

  void add_flush_events(uint64_t n) { trace_.flush_events += n; }

  // --- untimed host access ------------------------------------------------
  /// Copy of a region; does not advance the trace (host-side inspection).
  BitMatrix read_region(int row0, int col0, int nrows, int ncols) const;
  uint64_t read_bits(int row, const ColRange& cols) const;
  /// Host-side initialization (loading inputs is not a simulated step).
  void poke_bits(int row, const ColRange& cols, uint64_t bits);
  void poke_region(int row0, int col0, const BitMatrix& bits);

  const BitMatrix& state() const { return state_; }

 private:
  void tick(uint64_t gates);
  void check_col(int c) const;
  void check_row(int r) const;
  void apply_column_op(const ColumnOp& op);

  CrossbarDims dims_;
  PartitionConfig partitions_;
  BitMatrix state_;
  Trace trace_;
  Phase phase_ = Phase::Other;
};

}  // namespace pimfft
