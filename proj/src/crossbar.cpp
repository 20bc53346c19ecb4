#include "pimfft/crossbar.hpp"

#include <stdexcept>

namespace pimfft {

PartitionConfig PartitionConfig::even(int count, int cols) {
  if (count < 1 || cols % count != 0)
    throw std::invalid_argument("partition count must divide the column count");
  PartitionConfig p;
  const int w = cols / count;
  for (int i = 0; i < count; ++i) p.ranges.push_back({i * w, (i + 1) * w});
  return p;
}

int PartitionConfig::index_of_column(int col) const {
  for (int i = 0; i < (int)ranges.size(); ++i)
    if (col >= ranges[i].begin && col < ranges[i].end) return i;
  return -1;
}

void PartitionConfig::validate(const CrossbarDims& dims) const {
  if (ranges.empty()) throw std::invalid_argument("at least one partition required");
  int expect = 0;
  for (const auto& r : ranges) {
    if (r.begin != expect || r.end <= r.begin)
      throw std::invalid_argument("partitions must be contiguous, disjoint and ordered");
    expect = r.end;
  }
  if (expect != dims.cols) throw std::invalid_argument("partitions must cover all columns");
}

const char* phase_name(Phase p) {
  switch (p) {
    case Phase::Permute: return "permute";
    case Phase::Align: return "align";
    case Phase::Twiddle: return "twiddle";
    case Phase::Butterfly: return "butterfly";
    case Phase::Swap: return "swap";
    case Phase::Scale: return "scale";
    case Phase::Pointwise: return "pointwise";
    case Phase::Unpack: return "unpack";
    default: return "other";
  }
}

Trace Trace::operator-(const Trace& o) const {
  Trace t = *this;
  t.cycles -= o.cycles;
  t.gate_ops -= o.gate_ops;
  t.column_ops -= o.column_ops;
  t.row_ops -= o.row_ops;
  t.write_ops -= o.write_ops;
  t.flush_events -= o.flush_events;
  for (size_t i = 0; i < t.phase_cycles.size(); ++i) t.phase_cycles[i] -= o.phase_cycles[i];
  return t;
}

Trace& Trace::operator+=(const Trace& o) {
  cycles += o.cycles;
  gate_ops += o.gate_ops;
  column_ops += o.column_ops;
  row_ops += o.row_ops;
  write_ops += o.write_ops;
  flush_events += o.flush_events;
  for (size_t i = 0; i < phase_cycles.size(); ++i) phase_cycles[i] += o.phase_cycles[i];
  return *this;
}

int RowSet::count() const {
  int n = 0;
  for_each_block([&](int, int len) { n += len; });
  return n;
}

bool RowSet::contains(int row) const {
  if (row < offset || row >= rows) return false;
  return (row - offset) % period < block;
}

Crossbar::Crossbar(CrossbarDims dims, PartitionConfig partitions, uint8_t fill)
    : dims_(dims), partitions_(std::move(partitions)) {
  if (dims_.rows < 1 || dims_.cols < 1) throw std::invalid_argument("crossbar must be non-empty");
  partitions_.validate(dims_);
  state_ = BitMatrix::Constant(dims_.rows, dims_.cols, fill ? 1 : 0);
}

Crossbar::Crossbar(CrossbarDims dims, PartitionConfig partitions, const BitMatrix& init)
    : Crossbar(dims, std::move(partitions), uint8_t{0}) {
  if (init.rows() != dims_.rows || init.cols() != dims_.cols)
    throw std::invalid_argument("initial state shape mismatch");
  state_ = init.unaryExpr([](uint8_t v) { return uint8_t(v ? 1 : 0); });
}

void Crossbar::tick(uint64_t gates) {
  trace_.cycles += 1;
  trace_.gate_ops += gates;
  trace_.phase_cycles[(size_t)phase_] += 1;
}

void Crossbar::check_col(int c) const {
  if (c < 0 || c >= dims_.cols) throw std::out_of_range("column index out of range");
}

void Crossbar::check_row(int r) const {
  if (r < 0 || r >= dims_.rows) throw std::out_of_range("row index out of range");
}

void Crossbar::apply_column_op(const ColumnOp& op) {
  uint8_t* out = state_.data() + (size_t)op.out * dims_.rows;
  const uint8_t* a = state_.data() + (size_t)op.a * dims_.rows;
  if (op.kind == ColumnOp::Kind::Not) {
    op.rows.for_each_block([&](int start, int len) {
      for (int i = start; i < start + len; ++i) out[i] = a[i] ^ 1u;
    });
  } else {
    const uint8_t* b = state_.data() + (size_t)op.b * dims_.rows;
    op.rows.for_each_block([&](int start, int len) {
      for (int i = start; i < start + len; ++i) out[i] = (a[i] | b[i]) ^ 1u;
    });
  }
}

void Crossbar::nor_columns(int a, int b, int out, const RowSet& rows) {
  check_col(a);
  check_col(b);
  check_col(out);
  if (out == a || out == b) throw std::invalid_argument("output column must differ from inputs");
  ColumnOp op{ColumnOp::Kind::Nor, a, b, out, rows};
  apply_column_op(op);
  trace_.column_ops += 1;
  tick((uint64_t)rows.count());
}

void Crossbar::not_column(int a, int out, const RowSet& rows) {
  check_col(a);
  check_col(out);
  if (out == a) throw std::invalid_argument("output column must differ from input");
  ColumnOp op{ColumnOp::Kind::Not, a, 0, out, rows};
  apply_column_op(op);
  trace_.column_ops += 1;
  tick((uint64_t)rows.count());
}

void Crossbar::flip_column(int col, const RowSet& rows) {
  check_col(col);
  uint8_t* c = state_.data() + (size_t)col * dims_.rows;
  rows.for_each_block([&](int start, int len) {
    for (int i = start; i < start + len; ++i) c[i] ^= 1u;
  });
  trace_.column_ops += 1;
  tick((uint64_t)rows.count());
}

void Crossbar::nor_rows(int a_row, int b_row, int out_row, const ColRange& cols) {
  check_row(a_row);
  check_row(b_row);
  check_row(out_row);
  if (out_row == a_row || out_row == b_row)
    throw std::invalid_argument("output row must differ from inputs");
  if (cols.begin < 0 || cols.end() > dims_.cols) throw std::out_of_range("column range");
  for (int c = cols.begin; c < cols.end(); ++c)
    state_(out_row, c) = (state_(a_row, c) | state_(b_row, c)) ^ 1u;
  trace_.row_ops += 1;
  tick((uint64_t)cols.width);
}

void Crossbar::not_row(int a_row, int out_row, const ColRange& cols) {
  check_row(a_row);
  check_row(out_row);
  if (out_row == a_row) throw std::invalid_argument("output row must differ from input");
  if (cols.begin < 0 || cols.end() > dims_.cols) throw std::out_of_range("column range");
  for (int c = cols.begin; c < cols.end(); ++c) state_(out_row, c) = state_(a_row, c) ^ 1u;
  trace_.row_ops += 1;
  tick((uint64_t)cols.width);
}

void Crossbar::parallel_partition_step(std::span<const ColumnOp> ops) {
  if (ops.empty()) throw std::invalid_argument("parallel step needs at least one op");
  if ((int)ops.size() > partitions_.count())
    throw std::invalid_argument("more ops than partitions");
  std::vector<int> used;
  uint64_t gates = 0;
  for (const auto& op : ops) {
    check_col(op.a);
    check_col(op.out);
    if (op.kind == ColumnOp::Kind::Nor) check_col(op.b);
    const int pa = partitions_.index_of_column(op.a);
    const int po = partitions_.index_of_column(op.out);
    const int pb = op.kind == ColumnOp::Kind::Nor ? partitions_.index_of_column(op.b) : pa;
    if (pa != po || pa != pb)
      throw std::invalid_argument("parallel op spans partition boundary");
    for (int u : used)
      if (u == pa) throw std::invalid_argument("two parallel ops target one partition");
    used.push_back(pa);
    if (op.out == op.a || (op.kind == ColumnOp::Kind::Nor && op.out == op.b))
      throw std::invalid_argument("output column must differ from inputs");
    gates += (uint64_t)op.rows.count();
  }
  for (const auto& op : ops) apply_column_op(op);
  trace_.column_ops += ops.size();
  tick(gates);
}

void Crossbar::write_constant(const RowSet& rows, const ColRange& cols,
                              const std::vector<uint64_t>& row_bits) {
  if (cols.begin < 0 || cols.end() > dims_.cols || cols.width > 64)
    throw std::out_of_range("column range");
  size_t idx = 0;
  rows.for_each_block([&](int start, int len) {
    for (int r = start; r < start + len; ++r) {
      if (idx >= row_bits.size()) throw std::invalid_argument("missing row bits");
      const uint64_t bits = row_bits[idx++];
      for (int c = 0; c < cols.width; ++c)
        state_(r, cols.begin + c) = (bits >> c) & 1u;
    }
  });
  if (idx != row_bits.size()) throw std::invalid_argument("excess row bits");
  // one cycle and one write op per column segment, no gate energy
  trace_.cycles += (uint64_t)cols.width;
  trace_.write_ops += (uint64_t)cols.width;
  trace_.phase_cycles[(size_t)phase_] += (uint64_t)cols.width;
}

void Crossbar::write_constant_uniform(const RowSet& rows, const ColRange& cols, uint64_t bits) {
  write_constant(rows, cols, std::vector<uint64_t>((size_t)rows.count(), bits));
}

BitMatrix Crossbar::read_region(int row0, int col0, int nrows, int ncols) const {
  if (row0 < 0 || col0 < 0 || row0 + nrows > dims_.rows || col0 + ncols > dims_.cols)
    throw std::out_of_range("region out of range");
  return state_.block(row0, col0, nrows, ncols);
}

uint64_t Crossbar::read_bits(int row, const ColRange& cols) const {
  check_row(row);
  if (cols.begin < 0 || cols.end() > dims_.cols || cols.width > 64)
    throw std::out_of_range("column range");
  uint64_t v = 0;
  for (int c = 0; c < cols.width; ++c)
    v |= (uint64_t)(state_(row, cols.begin + c) & 1u) << c;
  return v;
}

void Crossbar::poke_bits(int row, const ColRange& cols, uint64_t bits) {
  check_row(row);
  if (cols.begin < 0 || cols.end() > dims_.cols || cols.width > 64)
    throw std::out_of_range("column range");
  for (int c = 0; c < cols.width; ++c)
    state_(row, cols.begin + c) = (bits >> c) & 1u;
}

void Crossbar::poke_region(int row0, int col0, const BitMatrix& bits) {
  if (row0 < 0 || col0 < 0 || row0 + bits.rows() > dims_.rows ||
      col0 + bits.cols() > dims_.cols)
    throw std::out_of_range("region out of range");
  state_.block(row0, col0, bits.rows(), bits.cols()) =
      bits.unaryExpr([](uint8_t v) { return uint8_t(v ? 1 : 0); });
}

}  // namespace pimfft
