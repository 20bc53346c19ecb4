#include "pimfft/bitserial.hpp"

#include <algorithm>
#include <stdexcept>

namespace pimfft {
namespace {

std::vector<int> cols_of(int base, int width) {
  std::vector<int> v(width);
  for (int i = 0; i < width; ++i) v[i] = base + i;
  return v;
}

std::vector<int> concat(std::vector<int> a, const std::vector<int>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

void run(ArithContext& c, ScheduleKind kind, const std::vector<int>& ext, const RowSet& rows) {
  run_schedule(*c.xb, schedule_for(kind, c.fmt), ext, c.scratch_base, rows);
}

ScheduleKind real_kind(const NumberFormat& f, LogOp op) {
  const bool fl = f.is_float();
  switch (op) {
    case LogOp::Add: return fl ? ScheduleKind::FloatAdd : ScheduleKind::FixedAdd;
    case LogOp::Sub: return fl ? ScheduleKind::FloatSub : ScheduleKind::FixedSub;
    case LogOp::Mul: return fl ? ScheduleKind::FloatMul : ScheduleKind::FixedMulLow;
    case LogOp::Halve: return fl ? ScheduleKind::FloatHalve : ScheduleKind::FixedHalve;
    default: throw std::logic_error("not a real op");
  }
}

// NOT a -> scratch, NOT scratch -> b; plain value lands in b
void double_not(ArithContext& c, int src, int dst, int width, const RowSet& rows) {
  for (int i = 0; i < width; ++i) c.xb->not_column(src + i, c.scratch_base + i, rows);
  for (int i = 0; i < width; ++i) c.xb->not_column(c.scratch_base + i, dst + i, rows);
}

// count of active rows whose exponent is the minimum normal (flush candidates)
uint64_t count_min_exponent(ArithContext& c, int real_col, const RowSet& rows) {
  if (!c.fmt.is_float()) return 0;
  uint64_t n = 0;
  const ColRange ecols{real_col + c.fmt.mantissa_bits, c.fmt.exponent_bits};
  rows.for_each_block([&](int start, int len) {
    for (int r = start; r < start + len; ++r)
      if (c.xb->read_bits(r, ecols) == 1) ++n;
  });
  return n;
}

}  // namespace

int required_scratch_width(const NumberFormat& fmt) {
  return std::max(max_schedule_scratch(fmt), 3 * complex_bits(fmt));
}

void add_real(ArithContext& c, int a, int b, int out, const RowSet& rows) {
  run(c, real_kind(c.fmt, LogOp::Add), concat(concat(cols_of(a, c.W()), cols_of(b, c.W())), cols_of(out, c.W())), rows);
  if (c.log) c.log->vec(LogOp::Add, rows, a, b, out);
}

void sub_real(ArithContext& c, int a, int b, int out, const RowSet& rows) {
  run(c, real_kind(c.fmt, LogOp::Sub), concat(concat(cols_of(a, c.W()), cols_of(b, c.W())), cols_of(out, c.W())), rows);
  if (c.log) c.log->vec(LogOp::Sub, rows, a, b, out);
}

void mul_real(ArithContext& c, int a, int b, int out, const RowSet& rows) {
  run(c, real_kind(c.fmt, LogOp::Mul), concat(concat(cols_of(a, c.W()), cols_of(b, c.W())), cols_of(out, c.W())), rows);
  if (c.log) c.log->vec(LogOp::Mul, rows, a, b, out);
}

void halve_real(ArithContext& c, int a, const RowSet& rows) {
  c.xb->add_flush_events(count_min_exponent(c, a, rows));
  run(c, real_kind(c.fmt, LogOp::Halve), concat(cols_of(a, c.W()), cols_of(a, c.W())), rows);
  if (c.log) c.log->vec(LogOp::Halve, rows, a, -1, a);
}

void negate_real(ArithContext& c, int a, const RowSet& rows) {
  if (c.fmt.is_float()) {
    c.xb->flip_column(a + c.W() - 1, rows);
  } else {
    run(c, ScheduleKind::FixedNeg, concat(cols_of(a, c.W()), cols_of(a, c.W())), rows);
  }
  if (c.log) c.log->vec(LogOp::Neg, rows, a, -1, a);
}

void add_complex(ArithContext& c, int a, int b, int out, const RowSet& rows) {
  run(c, ScheduleKind::ComplexAdd,
      concat(concat(cols_of(a, c.E()), cols_of(b, c.E())), cols_of(out, c.E())), rows);
  if (c.log) {
    c.log->vec(LogOp::Add, rows, a, b, out);
    c.log->vec(LogOp::Add, rows, a + c.W(), b + c.W(), out + c.W());
  }
}

void sub_complex(ArithContext& c, int a, int b, int out, const RowSet& rows) {
  run(c, ScheduleKind::ComplexSub,
      concat(concat(cols_of(a, c.E()), cols_of(b, c.E())), cols_of(out, c.E())), rows);
  if (c.log) {
    c.log->vec(LogOp::Sub, rows, a, b, out);
    c.log->vec(LogOp::Sub, rows, a + c.W(), b + c.W(), out + c.W());
  }
}

void mul_complex(ArithContext& c, int a, int b, int out, const RowSet& rows) {
  run(c, ScheduleKind::ComplexMul,
      concat(concat(cols_of(a, c.E()), cols_of(b, c.E())), cols_of(out, c.E())), rows);
  if (c.log) {
    const int W = c.W();
    c.log->vec(LogOp::Mul, rows, a, b, log_temp(0));
    c.log->vec(LogOp::Mul, rows, a + W, b + W, log_temp(1));
    c.log->vec(LogOp::Mul, rows, a, b + W, log_temp(2));
    c.log->vec(LogOp::Mul, rows, a + W, b, log_temp(3));
    c.log->vec(LogOp::Sub, rows, log_temp(0), log_temp(1), out);
    c.log->vec(LogOp::Add, rows, log_temp(2), log_temp(3), out + W);
  }
}

void conjugate_in_place(ArithContext& c, int z, const RowSet& rows) {
  negate_real(c, z + c.W(), rows);
}

void mul_by_i(ArithContext& c, int z, const RowSet& rows) {
  const int W = c.W();
  const int s0 = c.scratch_base, s1 = c.scratch_base + W;
  const int re = z, im = z + W;
  for (int i = 0; i < W; ++i) c.xb->not_column(re + i, s0 + i, rows);
  for (int i = 0; i < W; ++i) c.xb->not_column(im + i, s1 + i, rows);
  for (int i = 0; i < W; ++i) c.xb->not_column(s0 + i, im + i, rows);
  for (int i = 0; i < W; ++i) c.xb->not_column(s1 + i, re + i, rows);
  if (c.log) c.log->vec(LogOp::SwapVec, rows, re, im, -1);
  negate_real(c, re, rows);
}

void halve_complex(ArithContext& c, int z, const RowSet& rows) {
  halve_real(c, z, rows);
  halve_real(c, z + c.W(), rows);
}

void log_butterfly(ArithContext& c, int u, int v, int w, const RowSet& rows, bool dif) {
  if (!c.log) return;
  const int W = c.W();
  auto& log = *c.log;
  if (!dif) {
    log.vec(LogOp::Mul, rows, w, v, log_temp(0));
    log.vec(LogOp::Mul, rows, w + W, v + W, log_temp(1));
    log.vec(LogOp::Mul, rows, w, v + W, log_temp(2));
    log.vec(LogOp::Mul, rows, w + W, v, log_temp(3));
    log.vec(LogOp::Sub, rows, log_temp(0), log_temp(1), log_temp(4));
    log.vec(LogOp::Add, rows, log_temp(2), log_temp(3), log_temp(5));
    log.vec(LogOp::Sub, rows, u, log_temp(4), v);
    log.vec(LogOp::Sub, rows, u + W, log_temp(5), v + W);
    log.vec(LogOp::Add, rows, u, log_temp(4), u);
    log.vec(LogOp::Add, rows, u + W, log_temp(5), u + W);
  } else {
    log.vec(LogOp::Add, rows, u, v, log_temp(0));
    log.vec(LogOp::Add, rows, u + W, v + W, log_temp(1));
    log.vec(LogOp::Sub, rows, u, v, log_temp(2));
    log.vec(LogOp::Sub, rows, u + W, v + W, log_temp(3));
    log.vec(LogOp::Mul, rows, w, log_temp(2), log_temp(4));
    log.vec(LogOp::Mul, rows, w + W, log_temp(3), log_temp(5));
    log.vec(LogOp::Mul, rows, w, log_temp(3), log_temp(6));
    log.vec(LogOp::Mul, rows, w + W, log_temp(2), log_temp(7));
    log.vec(LogOp::Sub, rows, log_temp(4), log_temp(5), v);
    log.vec(LogOp::Add, rows, log_temp(6), log_temp(7), v + W);
    log.vec(LogOp::CopyVec, rows, log_temp(0), -1, u);
    log.vec(LogOp::CopyVec, rows, log_temp(1), -1, u + W);
  }
}

void butterfly(ArithContext& c, int u, int v, int w, const RowSet& rows, bool dif) {
  run(c, dif ? ScheduleKind::ButterflyDif : ScheduleKind::ButterflyDit,
      concat(concat(cols_of(u, c.E()), cols_of(v, c.E())), cols_of(w, c.E())), rows);
  log_butterfly(c, u, v, w, rows, dif);
}

void copy_real(ArithContext& c, int src, int dst, const RowSet& rows) {
  double_not(c, src, dst, c.W(), rows);
  if (c.log) c.log->vec(LogOp::CopyVec, rows, src, -1, dst);
}

void copy_complex(ArithContext& c, int src, int dst, const RowSet& rows) {
  double_not(c, src, dst, c.E(), rows);
  if (c.log) {
    c.log->vec(LogOp::CopyVec, rows, src, -1, dst);
    c.log->vec(LogOp::CopyVec, rows, src + c.W(), -1, dst + c.W());
  }
}

void move_complex(ArithContext& c, int src_row, int src_col, int dst_row, int dst_col) {
  const int E = c.E();
  const int rmax = c.xb->dims().rows;
  const int s0 = c.scratch_base, s1 = c.scratch_base + E;
  if (src_row == dst_row) {
    if (src_col != dst_col) double_not(c, src_col, dst_col, E, RowSet::single(src_row, rmax));
  } else {
    const RowSet at_src = RowSet::single(src_row, rmax);
    const RowSet at_dst = RowSet::single(dst_row, rmax);
    for (int i = 0; i < E; ++i) c.xb->not_column(src_col + i, s0 + i, at_src);
    c.xb->not_row(src_row, dst_row, ColRange{s0, E});
    for (int i = 0; i < E; ++i) c.xb->not_column(s0 + i, s1 + i, at_dst);
    for (int i = 0; i < E; ++i) c.xb->not_column(s1 + i, dst_col + i, at_dst);
  }
  if (c.log) {
    c.log->copy_point(src_row, src_col, dst_row, dst_col);
    c.log->copy_point(src_row, src_col + c.W(), dst_row, dst_col + c.W());
  }
}

void swap_complex(ArithContext& c, int row_a, int col_a, int row_b, int col_b) {
  const int E = c.E();
  const int rmax = c.xb->dims().rows;
  const int s0 = c.scratch_base, s1 = c.scratch_base + E, s2 = c.scratch_base + 2 * E;
  const RowSet at_a = RowSet::single(row_a, rmax);
  const RowSet at_b = RowSet::single(row_b, rmax);
  if (row_a == row_b) {
    if (col_a == col_b) return;
    for (int i = 0; i < E; ++i) c.xb->not_column(col_a + i, s0 + i, at_a);
    for (int i = 0; i < E; ++i) c.xb->not_column(col_b + i, s1 + i, at_a);
    for (int i = 0; i < E; ++i) c.xb->not_column(s0 + i, col_b + i, at_a);
    for (int i = 0; i < E; ++i) c.xb->not_column(s1 + i, col_a + i, at_a);
  } else {
    for (int i = 0; i < E; ++i) c.xb->not_column(col_a + i, s0 + i, at_a);
    for (int i = 0; i < E; ++i) c.xb->not_column(col_b + i, s1 + i, at_b);
    c.xb->not_row(row_a, row_b, ColRange{s0, E});
    c.xb->not_row(row_b, row_a, ColRange{s1, E});
    for (int i = 0; i < E; ++i) c.xb->not_column(s0 + i, s2 + i, at_b);
    for (int i = 0; i < E; ++i) c.xb->not_column(s2 + i, col_b + i, at_b);
    for (int i = 0; i < E; ++i) c.xb->not_column(s1 + i, s2 + i, at_a);
    for (int i = 0; i < E; ++i) c.xb->not_column(s2 + i, col_a + i, at_a);
  }
  if (c.log) {
    c.log->swap_point(row_a, col_a, row_b, col_b);
    c.log->swap_point(row_a, col_a + c.W(), row_b, col_b + c.W());
  }
}

void poke_complex(Crossbar& xb, const NumberFormat& fmt, int row, int col,
                  std::complex<double> z, ExecLog* log) {
  const FormatEmulator emu(fmt);
  const uint64_t bits = emu.encode_complex(z);
  xb.poke_bits(row, ColRange{col, complex_bits(fmt)}, bits);
  if (log) {
    log->set(row, col, emu.complex_re(bits));
    log->set(row, col + fmt.total_bits, emu.complex_im(bits));
  }
}

std::complex<double> peek_complex(const Crossbar& xb, const NumberFormat& fmt, int row,
                                  int col) {
  const FormatEmulator emu(fmt);
  return emu.decode_complex(xb.read_bits(row, ColRange{col, complex_bits(fmt)}));
}

uint64_t peek_complex_bits(const Crossbar& xb, const NumberFormat& fmt, int row, int col) {
  return xb.read_bits(row, ColRange{col, complex_bits(fmt)});
}

}  // namespace pimfft
