#include "pimfft/fft.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <unordered_map>

namespace pimfft {
namespace {

bool is_pow2(int n) { return n > 0 && (n & (n - 1)) == 0; }

int ilog2(int n) {
  int l = 0;
  while ((1 << l) < n) ++l;
  return l;
}

int bitrev(int x, int bits) {
  int r = 0;
  for (int b = 0; b < bits; ++b)
    if (x & (1 << b)) r |= 1 << (bits - 1 - b);
  return r;
}

ArithContext make_ctx(Crossbar& xb, const FFTPlan& plan, int scratch_base, ExecLog* log) {
  ArithContext c;
  c.xb = &xb;
  c.fmt = plan.format;
  c.scratch_base = scratch_base;
  c.scratch_width = plan.scratch_width;
  c.log = log;
  return c;
}

}  // namespace

const char* variant_name(FFTVariant v) {
  switch (v) {
    case FFTVariant::R: return "r";
    case FFTVariant::TwoR: return "2r";
    case FFTVariant::TwoRBeta: return "2rb";
  }
  return "?";
}

int FFTPlan::input_stage() const {
  if (order == StageOrder::DecimationInTime)
    return input_in_forward_output_layout ? std::max(levels, 1) : 1;
  return std::max(levels, 1);
}

int FFTPlan::output_stage() const {
  return order == StageOrder::DecimationInTime ? std::max(levels, 1) : 1;
}

SlotAddr FFTPlan::element_addr(int stage, int position) const {
  if (position < 0 || position >= n) throw std::out_of_range("position");
  if (config.variant == FFTVariant::R || n == 1) return {position, slot_base[0]};
  if (stage < 1 || stage > levels) throw std::out_of_range("stage");
  const int d = 1 << (stage - 1);
  const int b = ((position >> stage) << (stage - 1)) | (position & (d - 1));
  const int c = (position >> (stage - 1)) & 1;
  return {b / pairs, slot_base[2 * (b % pairs) + c]};
}

std::complex<double> FFTPlan::twiddle_value(int stage, int pair, int row) const {
  const int d = 1 << (stage - 1);
  const int b = row * pairs + pair;
  const int j = b & (d - 1);
  const double sign = direction == Direction::Forward ? -1.0 : 1.0;
  return std::polar(1.0, sign * 2.0 * std::numbers::pi * (double)j / (double)(2 * d));
}

uint64_t FFTPlan::twiddle_bits(int stage, int pair, int row) const {
  return FormatEmulator(format).encode_complex(twiddle_value(stage, pair, row));
}

FFTPlan plan_fft(int n, CrossbarDims dims, const NumberFormat& format,
                 const FFTConfig& config, Direction direction,
                 const FFTPlanOptions& options) {
  format.validate();
  if (!is_pow2(n)) throw std::invalid_argument("sequence length must be a power of two");

  FFTPlan plan;
  plan.n = n;
  plan.levels = ilog2(n);
  plan.config = config;
  plan.format = format;
  plan.direction = direction;
  plan.dims = dims;
  plan.order = options.order;
  plan.skip_input_permutation = options.skip_input_permutation;
  plan.input_in_forward_output_layout = options.input_in_forward_output_layout;

  if (options.input_in_forward_output_layout) {
    if (options.order != StageOrder::DecimationInTime)
      throw std::invalid_argument("layout folding applies to the decimation-in-time order");
    if (options.skip_input_permutation)
      throw std::invalid_argument("layout folding needs the input permutation");
  }

  switch (config.variant) {
    case FFTVariant::R:
      plan.units = 1;
      plan.pairs = 1;
      if (n != dims.rows)
        throw std::invalid_argument("r configuration requires n equal to the row count");
      break;
    case FFTVariant::TwoR:
      plan.units = 2;
      plan.pairs = 1;
      if (n != 2 * dims.rows)
        throw std::invalid_argument("2r configuration requires n = 2 * rows");
      break;
    case FFTVariant::TwoRBeta:
      if (config.beta < 1 || !is_pow2(config.beta))
        throw std::invalid_argument("beta must be a positive power of two");
      plan.units = 2 * config.beta;
      plan.pairs = config.beta;
      if (n != 2 * dims.rows * config.beta)
        throw std::invalid_argument("2rb configuration requires n = 2 * rows * beta");
      break;
  }
  plan.rows_used = dims.rows;
  plan.elem_cols = complex_bits(format);
  const int E = plan.elem_cols;
  const int scratch_w = required_scratch_width(format);
  plan.scratch_width = scratch_w;

  const bool custom_bases = options.col_base != 0 || options.twiddle_base >= 0 ||
                            options.scratch_base >= 0 || options.align_base >= 0;
  if (config.use_partitions && config.variant != FFTVariant::TwoRBeta)
    throw std::invalid_argument("partitions apply to the 2rb configuration");
  if (config.use_partitions && custom_bases)
    throw std::invalid_argument("partitioned layout does not support custom column bases");

  plan.slot_base.resize(plan.units);
  plan.twiddle_base.resize(plan.pairs);

  bool aligned = false;
  if (config.variant == FFTVariant::TwoRBeta && !custom_bases) {
    // one butterfly unit per equal column stripe, its twiddles and scratch
    // beside it; serial and partition-parallel runs share this layout
    const int per_pair = 3 * E + scratch_w;
    if (dims.cols % plan.pairs == 0 && per_pair <= dims.cols / plan.pairs) {
      aligned = true;
      const int stride = dims.cols / plan.pairs;
      plan.pair_scratch_base.resize(plan.pairs);
      for (int t = 0; t < plan.pairs; ++t) {
        plan.slot_base[2 * t] = t * stride;
        plan.slot_base[2 * t + 1] = t * stride + E;
        plan.twiddle_base[t] = t * stride + 2 * E;
        plan.pair_scratch_base[t] = t * stride + 3 * E;
      }
      plan.scratch_base = plan.pair_scratch_base[0];
      plan.align_base = plan.scratch_base;  // unused outside the r configuration
      plan.footprint = (plan.pairs - 1) * stride + per_pair;
    } else if (config.use_partitions) {
      throw std::invalid_argument("column footprint exceeds the partition stripe width");
    }
  }
  if (!aligned) {
    const int base = options.col_base;
    for (int u = 0; u < plan.units; ++u) plan.slot_base[u] = base + u * E;
    int cursor = base + plan.units * E;
    const int tw = options.twiddle_base >= 0 ? options.twiddle_base : cursor;
    for (int t = 0; t < plan.pairs; ++t) plan.twiddle_base[t] = tw + t * E;
    if (options.twiddle_base < 0) cursor = tw + plan.pairs * E;
    const int align =
        options.align_base >= 0 ? options.align_base
                                : (config.variant == FFTVariant::R ? cursor : cursor);
    if (config.variant == FFTVariant::R && options.align_base < 0) cursor = align + E;
    plan.align_base = align;
    plan.scratch_base = options.scratch_base >= 0 ? options.scratch_base : cursor;
    plan.footprint = std::max({plan.scratch_base + scratch_w,
                               plan.twiddle_base.back() + E,
                               plan.align_base + (config.variant == FFTVariant::R ? E : 0),
                               base + plan.units * E});
  }
  plan.partition_parallel = config.use_partitions;
  if (plan.footprint > dims.cols)
    throw std::invalid_argument("column footprint exceeds crossbar width");
  return plan;
}

void load_sequence(Crossbar& xb, const FFTPlan& plan,
                   std::span<const std::complex<double>> values, ExecLog* log) {
  if ((int)values.size() != plan.n) throw std::invalid_argument("sequence length mismatch");
  for (const auto& v : values)
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
      throw std::invalid_argument("input values must be finite");
  const int stage = plan.input_stage();
  for (int p = 0; p < plan.n; ++p) {
    const SlotAddr a = plan.element_addr(stage, p);
    poke_complex(xb, plan.format, a.row, a.col, values[p], log);
  }
}

std::vector<std::complex<double>> read_sequence(const Crossbar& xb, const FFTPlan& plan) {
  std::vector<std::complex<double>> out(plan.n);
  const int stage = plan.output_stage();
  for (int p = 0; p < plan.n; ++p) {
    const SlotAddr a = plan.element_addr(stage, p);
    out[p] = peek_complex(xb, plan.format, a.row, a.col);
  }
  return out;
}

std::vector<uint64_t> read_sequence_bits(const Crossbar& xb, const FFTPlan& plan) {
  std::vector<uint64_t> out(plan.n);
  const int stage = plan.output_stage();
  for (int p = 0; p < plan.n; ++p) {
    const SlotAddr a = plan.element_addr(stage, p);
    out[p] = peek_complex_bits(xb, plan.format, a.row, a.col);
  }
  return out;
}

std::vector<std::pair<std::pair<int, int>, uint64_t>> read_real_slots(const Crossbar& xb,
                                                                      const FFTPlan& plan) {
  std::vector<std::pair<std::pair<int, int>, uint64_t>> out;
  const int W = plan.format.total_bits;
  const int stage = plan.output_stage();
  const uint64_t mask = format_mask(plan.format);
  for (int p = 0; p < plan.n; ++p) {
    const SlotAddr a = plan.element_addr(stage, p);
    const uint64_t bits = peek_complex_bits(xb, plan.format, a.row, a.col);
    out.push_back({{a.row, a.col}, bits & mask});
    out.push_back({{a.row, a.col + W}, (bits >> W) & mask});
  }
  return out;
}

void bit_reversal_permute(Crossbar& xb, const FFTPlan& plan, ExecLog* log) {
  if (plan.n == 1) return;
  xb.set_phase(Phase::Permute);
  ArithContext ctx = make_ctx(xb, plan, plan.scratch_base, log);
  const int from_stage = plan.input_in_forward_output_layout ? std::max(plan.levels, 1) : 1;
  const int to_stage = 1;

  // value at the slot of position p (from-layout) moves to the slot of
  // position rev(p) (to-layout); realize each cycle as adjacent swaps
  auto key = [&](const SlotAddr& a) { return (int64_t)a.row * (int64_t)(plan.dims.cols + 1) + a.col; };
  std::unordered_map<int64_t, int> from_pos;
  from_pos.reserve(plan.n * 2);
  for (int p = 0; p < plan.n; ++p) from_pos[key(plan.element_addr(from_stage, p))] = p;
  std::vector<int> target(plan.n);
  for (int p = 0; p < plan.n; ++p)
    target[p] = from_pos.at(key(plan.element_addr(to_stage, bitrev(p, plan.levels))));

  std::vector<char> seen(plan.n, 0);
  for (int p0 = 0; p0 < plan.n; ++p0) {
    if (seen[p0] || target[p0] == p0) {
      seen[p0] = 1;
      continue;
    }
    std::vector<int> cycle;
    int p = p0;
    while (!seen[p]) {
      seen[p] = 1;
      cycle.push_back(p);
      p = target[p];
    }
    for (int i = (int)cycle.size() - 2; i >= 0; --i) {
      const SlotAddr a = plan.element_addr(from_stage, cycle[i]);
      const SlotAddr b = plan.element_addr(from_stage, cycle[i + 1]);
      swap_complex(ctx, a.row, a.col, b.row, b.col);
    }
  }
  xb.set_phase(Phase::Other);
}

void stage_align_r(Crossbar& xb, const FFTPlan& plan, int stage, ExecLog* log) {
  if (plan.config.variant != FFTVariant::R)
    throw std::invalid_argument("align applies to the r configuration");
  xb.set_phase(Phase::Align);
  const int d = 1 << (stage - 1);
  const int E = plan.elem_cols;
  const int W = plan.format.total_bits;
  const int data = plan.slot_base[0], home = plan.align_base;
  const RowSet qv = RowSet::blocks(d, d, 2 * d, plan.rows_used);
  for (int i = 0; i < E; ++i) xb.not_column(data + i, home + i, qv);
  qv.for_each_block([&](int start, int len) {
    for (int q = start; q < start + len; ++q) xb.not_row(q, q - d, ColRange{home, E});
  });
  if (log) {
    qv.for_each_block([&](int start, int len) {
      for (int q = start; q < start + len; ++q) {
        log->copy_point(q, data, q - d, home);
        log->copy_point(q, data + W, q - d, home + W);
      }
    });
  }
  xb.set_phase(Phase::Other);
}

void stage_restore_r(Crossbar& xb, const FFTPlan& plan, int stage, ExecLog* log) {
  if (plan.config.variant != FFTVariant::R)
    throw std::invalid_argument("restore applies to the r configuration");
  xb.set_phase(Phase::Align);
  const int d = 1 << (stage - 1);
  const int E = plan.elem_cols;
  const int W = plan.format.total_bits;
  const int data = plan.slot_base[0], home = plan.align_base;
  const RowSet qu = RowSet::blocks(0, d, 2 * d, plan.rows_used);
  const RowSet qv = RowSet::blocks(d, d, 2 * d, plan.rows_used);
  qu.for_each_block([&](int start, int len) {
    for (int q = start; q < start + len; ++q) xb.not_row(q, q + d, ColRange{home, E});
  });
  for (int i = 0; i < E; ++i) xb.not_column(home + i, data + i, qv);
  if (log) {
    qu.for_each_block([&](int start, int len) {
      for (int q = start; q < start + len; ++q) {
        log->copy_point(q, home, q + d, data);
        log->copy_point(q, home + W, q + d, data + W);
      }
    });
  }
  xb.set_phase(Phase::Other);
}

void swap_pairs(Crossbar& xb, const FFTPlan& plan, int stage, ExecLog* log) {
  if (plan.config.variant == FFTVariant::R)
    throw std::invalid_argument("pair swaps apply to multi-slot configurations");
  if (stage < 1 || stage >= plan.levels) throw std::out_of_range("stage");
  xb.set_phase(Phase::Swap);
  const int E = plan.elem_cols;
  const int W = plan.format.total_bits;
  const int pbits = ilog2(plan.pairs);
  const int j = stage - 1;
  const RowSet all = RowSet::all(plan.rows_used);

  if (j < pbits) {
    // horizontal: slot 1 of pair t0 trades with slot 0 of pair t0 + 2^j
    for (int t0 = 0; t0 < plan.pairs; ++t0) {
      if (t0 & (1 << j)) continue;
      const int t1 = t0 | (1 << j);
      const int a = plan.slot_base[2 * t0 + 1];
      const int b = plan.slot_base[2 * t1];
      const int s0 = plan.scratch_for_pair(t0);
      const int s1 = plan.scratch_for_pair(t1);
      for (int i = 0; i < E; ++i) xb.not_column(a + i, s0 + i, all);
      for (int i = 0; i < E; ++i) xb.not_column(b + i, s1 + i, all);
      for (int i = 0; i < E; ++i) xb.not_column(s0 + i, b + i, all);
      for (int i = 0; i < E; ++i) xb.not_column(s1 + i, a + i, all);
      if (log) {
        log->vec(LogOp::SwapVec, all, a, b, -1);
        log->vec(LogOp::SwapVec, all, a + W, b + W, -1);
      }
    }
  } else {
    // vertical: slot 0 of the upper row block trades with slot 1 of the
    // lower one, serially across the butterfly units
    const int D = 1 << (j - pbits);
    const RowSet qa = RowSet::blocks(0, D, 2 * D, plan.rows_used);
    const RowSet qb = RowSet::blocks(D, D, 2 * D, plan.rows_used);
    for (int t = 0; t < plan.pairs; ++t) {
      const int lo = plan.slot_base[2 * t];
      const int hi = plan.slot_base[2 * t + 1];
      const int s = plan.scratch_for_pair(t);
      const int s0 = s, s1 = s + E, s2 = s + 2 * E;
      for (int i = 0; i < E; ++i) xb.not_column(lo + i, s0 + i, qb);
      for (int i = 0; i < E; ++i) xb.not_column(hi + i, s1 + i, qa);
      qb.for_each_block([&](int start, int len) {
        for (int q = start; q < start + len; ++q) xb.not_row(q, q - D, ColRange{s0, E});
      });
      qa.for_each_block([&](int start, int len) {
        for (int q = start; q < start + len; ++q) xb.not_row(q, q + D, ColRange{s1, E});
      });
      for (int i = 0; i < E; ++i) xb.not_column(s0 + i, s2 + i, qa);
      for (int i = 0; i < E; ++i) xb.not_column(s2 + i, hi + i, qa);
      for (int i = 0; i < E; ++i) xb.not_column(s1 + i, s2 + i, qb);
      for (int i = 0; i < E; ++i) xb.not_column(s2 + i, lo + i, qb);
      if (log) {
        qa.for_each_block([&](int start, int len) {
          for (int q = start; q < start + len; ++q) {
            log->swap_point(q + D, lo, q, hi);
            log->swap_point(q + D, lo + W, q, hi + W);
          }
        });
      }
    }
  }
  xb.set_phase(Phase::Other);
}

void write_stage_twiddles(Crossbar& xb, const FFTPlan& plan, int stage, ExecLog* log) {
  xb.set_phase(Phase::Twiddle);
  const int E = plan.elem_cols;
  const int W = plan.format.total_bits;
  const uint64_t mask = format_mask(plan.format);
  if (plan.config.variant == FFTVariant::R) {
    const int d = 1 << (stage - 1);
    const RowSet qu = RowSet::blocks(0, d, 2 * d, plan.rows_used);
    std::vector<uint64_t> bits;
    qu.for_each_block([&](int start, int len) {
      for (int q = start; q < start + len; ++q) bits.push_back(plan.twiddle_bits(stage, 0, q));
    });
    xb.write_constant(qu, ColRange{plan.twiddle_base[0], E}, bits);
    if (log) {
      size_t i = 0;
      qu.for_each_block([&](int start, int len) {
        for (int q = start; q < start + len; ++q) {
          log->set(q, plan.twiddle_base[0], bits[i] & mask);
          log->set(q, plan.twiddle_base[0] + W, (bits[i] >> W) & mask);
          ++i;
        }
      });
    }
  } else {
    const RowSet all = RowSet::all(plan.rows_used);
    for (int t = 0; t < plan.pairs; ++t) {
      std::vector<uint64_t> bits((size_t)plan.rows_used);
      for (int k = 0; k < plan.rows_used; ++k) bits[k] = plan.twiddle_bits(stage, t, k);
      xb.write_constant(all, ColRange{plan.twiddle_base[t], E}, bits);
      if (log) {
        for (int k = 0; k < plan.rows_used; ++k) {
          log->set(k, plan.twiddle_base[t], bits[k] & mask);
          log->set(k, plan.twiddle_base[t] + W, (bits[k] >> W) & mask);
        }
      }
    }
  }
  xb.set_phase(Phase::Other);
}

void butterfly_rows(Crossbar& xb, const FFTPlan& plan, int u_col, int v_col, int w_col,
                    const RowSet& rows, bool dif_flavor, ExecLog* log) {
  ArithContext ctx = make_ctx(xb, plan, plan.scratch_base, log);
  xb.set_phase(Phase::Butterfly);
  butterfly(ctx, u_col, v_col, w_col, rows, dif_flavor);
  xb.set_phase(Phase::Other);
}

namespace {

void run_stage_butterflies(Crossbar& xb, const FFTPlan& plan, int stage, ExecLog* log) {
  const bool dif = plan.order == StageOrder::DecimationInFrequency;
  write_stage_twiddles(xb, plan, stage, log);
  xb.set_phase(Phase::Butterfly);
  if (plan.config.variant == FFTVariant::R) {
    const int d = 1 << (stage - 1);
    const RowSet qu = RowSet::blocks(0, d, 2 * d, plan.rows_used);
    ArithContext ctx = make_ctx(xb, plan, plan.scratch_base, log);
    butterfly(ctx, plan.slot_base[0], plan.align_base, plan.twiddle_base[0], qu, dif);
  } else if (plan.partition_parallel) {
    const RowSet all = RowSet::all(plan.rows_used);
    const auto& sched = schedule_for(dif ? ScheduleKind::ButterflyDif : ScheduleKind::ButterflyDit,
                                     plan.format);
    std::vector<ScheduleBinding> bindings(plan.pairs);
    const int E = plan.elem_cols;
    for (int t = 0; t < plan.pairs; ++t) {
      auto& b = bindings[t];
      b.scratch_base = plan.scratch_for_pair(t);
      b.ext_cols.reserve(3 * E);
      for (int i = 0; i < E; ++i) b.ext_cols.push_back(plan.slot_base[2 * t] + i);
      for (int i = 0; i < E; ++i) b.ext_cols.push_back(plan.slot_base[2 * t + 1] + i);
      for (int i = 0; i < E; ++i) b.ext_cols.push_back(plan.twiddle_base[t] + i);
    }
    run_schedule_lockstep(xb, sched, bindings, all);
    if (log) {
      ArithContext ctx = make_ctx(xb, plan, plan.scratch_base, log);
      for (int t = 0; t < plan.pairs; ++t)
        log_butterfly(ctx, plan.slot_base[2 * t], plan.slot_base[2 * t + 1],
                      plan.twiddle_base[t], all, dif);
    }
  } else {
    const RowSet all = RowSet::all(plan.rows_used);
    for (int t = 0; t < plan.pairs; ++t) {
      ArithContext ctx = make_ctx(xb, plan, plan.scratch_for_pair(t), log);
      butterfly(ctx, plan.slot_base[2 * t], plan.slot_base[2 * t + 1], plan.twiddle_base[t],
                all, dif);
    }
  }
  xb.set_phase(Phase::Other);
}

void scale_by_n(Crossbar& xb, const FFTPlan& plan, ExecLog* log) {
  xb.set_phase(Phase::Scale);
  const RowSet all = RowSet::all(plan.rows_used);
  for (int pass = 0; pass < plan.levels; ++pass) {
    for (int u = 0; u < plan.units; ++u) {
      ArithContext ctx = make_ctx(xb, plan, plan.scratch_for_pair(u / 2), log);
      halve_complex(ctx, plan.slot_base[u], all);
    }
  }
  xb.set_phase(Phase::Other);
}

void check_run(const Crossbar& xb, const FFTPlan& plan) {
  if (xb.dims().rows != plan.dims.rows || xb.dims().cols != plan.dims.cols)
    throw std::invalid_argument("plan and crossbar dimensions differ");
  if (plan.partition_parallel) {
    if (xb.partitions().count() != plan.pairs)
      throw std::invalid_argument("partition-parallel run needs one partition per unit");
    const int stride = plan.dims.cols / plan.pairs;
    for (int t = 0; t < plan.pairs; ++t) {
      const auto& r = xb.partitions().ranges[t];
      if (r.begin != t * stride || r.end != (t + 1) * stride)
        throw std::invalid_argument("partition boundaries must match the unit stripes");
    }
  }
}

}  // namespace

Trace run_fft(Crossbar& xb, const FFTPlan& plan, ExecLog* log) {
  check_run(xb, plan);
  const Trace before = xb.trace();
  if (plan.config.variant == FFTVariant::R) {
    if (plan.order == StageOrder::DecimationInTime) {
      if (!plan.skip_input_permutation) bit_reversal_permute(xb, plan, log);
      for (int s = 1; s <= plan.levels; ++s) {
        stage_align_r(xb, plan, s, log);
        run_stage_butterflies(xb, plan, s, log);
        stage_restore_r(xb, plan, s, log);
      }
    } else {
      for (int s = plan.levels; s >= 1; --s) {
        stage_align_r(xb, plan, s, log);
        run_stage_butterflies(xb, plan, s, log);
        stage_restore_r(xb, plan, s, log);
      }
      if (!plan.skip_input_permutation) bit_reversal_permute(xb, plan, log);
    }
  } else {
    if (plan.order == StageOrder::DecimationInTime) {
      if (!plan.skip_input_permutation) bit_reversal_permute(xb, plan, log);
      for (int s = 1; s <= plan.levels; ++s) {
        if (s > 1) swap_pairs(xb, plan, s - 1, log);
        run_stage_butterflies(xb, plan, s, log);
      }
    } else {
      for (int s = plan.levels; s >= 1; --s) {
        if (s < plan.levels) swap_pairs(xb, plan, s, log);
        run_stage_butterflies(xb, plan, s, log);
      }
      if (!plan.skip_input_permutation) bit_reversal_permute(xb, plan, log);
    }
  }
  if (plan.direction == Direction::Inverse) scale_by_n(xb, plan, log);
  return xb.trace() - before;
}

Trace run_inverse_fft(Crossbar& xb, const FFTPlan& plan, ExecLog* log) {
  if (plan.direction != Direction::Inverse)
    throw std::invalid_argument("inverse run needs an inverse-direction plan");
  return run_fft(xb, plan, log);
}

}  // namespace pimfft
