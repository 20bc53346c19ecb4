#pragma once
// Element-parallel (single-row, bit-serial) arithmetic over crossbar columns.
// Every operation runs one compiled gate schedule: the result appears in all
// active rows simultaneously and the cycle count does not depend on how many
// rows participate. Fixed-point and floating-point share the same surface;
// a complex value is two adjacent real slots (re then im).

#include <complex>
#include <cstdint>

#include "pimfft/crossbar.hpp"
#include "pimfft/exec_log.hpp"
#include "pimfft/gates.hpp"
#include "pimfft/softfloat.hpp"
#include "pimfft/types.hpp"

namespace pimfft {

/// Execution context for the arithmetic layer: one crossbar stream, a number
/// format, and a scratch column window (schedule intermediates plus data
/// moves; at least 3 complex widths wide and max_schedule_scratch columns).
struct ArithContext {
  Crossbar* xb = nullptr;
  NumberFormat fmt;
  int scratch_base = 0;
  int scratch_width = 0;
  ExecLog* log = nullptr;  // optional semantic log for replay verification

  int W() const { return fmt.total_bits; }
  int E() const { return 2 * fmt.total_bits; }
};

int required_scratch_width(const NumberFormat& fmt);

// --- real ops (column base addressing, width = fmt.total_bits) -------------
void add_real(ArithContext& c, int a, int b, int out, const RowSet& rows);
void sub_real(ArithContext& c, int a, int b, int out, const RowSet& rows);
void mul_real(ArithContext& c, int a, int b, int out, const RowSet& rows);
void halve_real(ArithContext& c, int a, const RowSet& rows);
void negate_real(ArithContext& c, int a, const RowSet& rows);

// --- complex ops (column base of [re | im]) ---------------------------------
void add_complex(ArithContext& c, int a, int b, int out, const RowSet& rows);
void sub_complex(ArithContext& c, int a, int b, int out, const RowSet& rows);
void mul_complex(ArithContext& c, int a, int b, int out, const RowSet& rows);
/// Sign flip of the imaginary part; a single cycle for float formats.
void conjugate_in_place(ArithContext& c, int z, const RowSet& rows);
/// (a + bi) -> (-b + ai) by column moves and a sign flip; no rounding.
void mul_by_i(ArithContext& c, int z, const RowSet& rows);
void halve_complex(ArithContext& c, int z, const RowSet& rows);

/// (u, v) <- (u + w*v, u - w*v) elementwise over the active rows (dif=false),
/// or (u + v, (u - v)*w) (dif=true). In-place; w holds pre-written constants.
void butterfly(ArithContext& c, int u, int v, int w, const RowSet& rows, bool dif);

/// Log-only helper for lockstep execution paths that run the schedule
/// themselves (partition-parallel butterflies).
void log_butterfly(ArithContext& c, int u, int v, int w, const RowSet& rows, bool dif);

// --- data movement (double-NOT copies through scratch) ----------------------
void copy_real(ArithContext& c, int src, int dst, const RowSet& rows);
void copy_complex(ArithContext& c, int src, int dst, const RowSet& rows);
/// Moves one complex element between arbitrary (row, column) places.
void move_complex(ArithContext& c, int src_row, int src_col, int dst_row, int dst_col);
void swap_complex(ArithContext& c, int row_a, int col_a, int row_b, int col_b);

// --- host-side access (untimed) ----------------------------------------------
void poke_complex(Crossbar& xb, const NumberFormat& fmt, int row, int col,
                  std::complex<double> z, ExecLog* log = nullptr);
std::complex<double> peek_complex(const Crossbar& xb, const NumberFormat& fmt, int row,
                                  int col);
uint64_t peek_complex_bits(const Crossbar& xb, const NumberFormat& fmt, int row, int col);

}  // namespace pimfft
