#pragma once
// Semantic operation log. Pipelines record every data move and every real
// arithmetic step they issue; the replay oracle re-executes the log with the
// host FormatEmulator and the result must match the crossbar image bit for
// bit. Slots are addressed by (row, column base of the real slot); negative
// column bases name virtual temporaries that only exist in the log.

#include <cstdint>
#include <vector>

#include "pimfft/crossbar.hpp"
#include "pimfft/types.hpp"

namespace pimfft {

enum class LogOp : uint8_t {
  Set,      // point: dst <- bits
  Copy,     // point: dst <- src
  Swap,     // point: dst <-> src
  CopyVec,  // per row in set: out <- a
  SwapVec,  // per row in set: a <-> b
  Add,      // per row: out <- a + b
  Sub,      // per row: out <- a - b
  Mul,      // per row: out <- a * b
  Halve,    // per row: a <- a / 2
  Neg,      // per row: a <- -a
};

struct LogEntry {
  LogOp op;
  RowSet rows{};  // vector entries
  int32_t a = -1, b = -1, out = -1;  // real-slot column bases (vector entries)
  int32_t src_row = -1, src_col = -1;
  int32_t dst_row = -1, dst_col = -1;
  uint64_t bits = 0;
};

/// First virtual temp column id; temps count downwards from here.
inline constexpr int32_t kLogTempBase = -1024;
inline int32_t log_temp(int k) { return kLogTempBase - k; }

struct ExecLog {
  std::vector<LogEntry> entries;

  void set(int row, int col, uint64_t bits) {
    LogEntry e{LogOp::Set};
    e.dst_row = row;
    e.dst_col = col;
    e.bits = bits;
    entries.push_back(e);
  }
  void copy_point(int src_row, int src_col, int dst_row, int dst_col) {
    LogEntry e{LogOp::Copy};
    e.src_row = src_row;
    e.src_col = src_col;
    e.dst_row = dst_row;
    e.dst_col = dst_col;
    entries.push_back(e);
  }
  void swap_point(int row_a, int col_a, int row_b, int col_b) {
    LogEntry e{LogOp::Swap};
    e.src_row = row_a;
    e.src_col = col_a;
    e.dst_row = row_b;
    e.dst_col = col_b;
    entries.push_back(e);
  }
  void vec(LogOp op, const RowSet& rows, int a, int b, int out) {
    LogEntry e{op};
    e.rows = rows;
    e.a = a;
    e.b = b;
    e.out = out;
    entries.push_back(e);
  }
};

}  // namespace pimfft
