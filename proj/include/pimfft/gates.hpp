#pragma once
// NOR/NOT column circuits compiled into reusable gate schedules.
//
// A schedule is a fixed sequence of single-cycle column gates over relative
// column ids. Operand bit columns are "external" wires bound to absolute
// columns at execution time; intermediate wires are assigned to a scratch
// column window by liveness, so the scratch footprint stays small. Schedules
// are data-independent: the cycle count of an operation is the same for one
// active row and for all rows.

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "pimfft/crossbar.hpp"
#include "pimfft/types.hpp"

namespace pimfft {

using Wire = int32_t;

struct CompiledGate {
  ColumnOp::Kind kind;
  int32_t a;
  int32_t b;
  int32_t out;  // external i encoded as -(i+1); scratch columns are >= 0
};

struct CompiledSchedule {
  std::vector<CompiledGate> gates;
  int n_external = 0;
  int scratch_width = 0;
  uint64_t cycles() const { return gates.size(); }
};

class CircuitBuilder {
 public:
  explicit CircuitBuilder(int n_external);

  Wire ext(int i) const;
  std::vector<Wire> ext_range(int base, int count) const;

  Wire nor(Wire a, Wire b);
  Wire not_(Wire a);
  Wire or_(Wire a, Wire b) { return not_(nor(a, b)); }
  Wire and_(Wire a, Wire b) { return nor(not_(a), not_(b)); }
  Wire or3(Wire a, Wire b, Wire c) { return or_(or_(a, b), c); }
  Wire xnor_(Wire a, Wire b);
  Wire xor_(Wire a, Wire b) { return not_(xnor_(a, b)); }
  /// s ? a : b
  Wire mux(Wire s, Wire a, Wire b);
  Wire zero();
  Wire one();

  /// Lands a computed wire in an external output column (double NOT).
  void copy_to_ext(Wire w, int ext_index);

  CompiledSchedule compile() const;

  size_t gate_count() const { return gates_.size(); }

 private:
  struct RawGate {
    ColumnOp::Kind kind;
    Wire a, b, out;
  };
  Wire fresh();

  int n_external_;
  Wire next_;
  Wire zero_ = -1;
  Wire one_ = -1;
  std::vector<RawGate> gates_;
};

// --- vector circuit helpers -------------------------------------------------

std::vector<Wire> mux_vec(CircuitBuilder& cb, Wire s, const std::vector<Wire>& a,
                          const std::vector<Wire>& b);
Wire or_all(CircuitBuilder& cb, std::span<const Wire> v);
Wire is_zero_vec(CircuitBuilder& cb, std::span<const Wire> v);
/// sum = a + b + carry_in, LSB-first; result has one extra carry bit on top.
std::vector<Wire> add_vec(CircuitBuilder& cb, const std::vector<Wire>& a,
                          const std::vector<Wire>& b, Wire carry_in);
/// a - b as two's complement over equal widths; borrow-free when a >= b.
std::vector<Wire> sub_vec(CircuitBuilder& cb, const std::vector<Wire>& a,
                          const std::vector<Wire>& b);
/// Borrow-out of a - b (1 when a < b); ignores the difference bits.
Wire less_than(CircuitBuilder& cb, const std::vector<Wire>& a, const std::vector<Wire>& b);
/// 1 when the unsigned value of v >= k.
Wire ge_const(CircuitBuilder& cb, const std::vector<Wire>& v, uint64_t k);
std::vector<Wire> inc_vec(CircuitBuilder& cb, const std::vector<Wire>& a, Wire inc,
                          Wire* carry_out = nullptr);

// --- compiled schedules -----------------------------------------------------

enum class ScheduleKind : uint8_t {
  FixedAdd,
  FixedSub,
  FixedMulLow,
  FixedHalve,
  FixedNeg,
  FloatAdd,
  FloatSub,
  FloatMul,
  FloatHalve,
  ComplexAdd,
  ComplexSub,
  ComplexMul,
  ButterflyDit,
  ButterflyDif,
};

const char* schedule_kind_name(ScheduleKind k);

/// Process-wide cache of compiled schedules (built on first use).
const CompiledSchedule& schedule_for(ScheduleKind kind, const NumberFormat& fmt);

struct ScheduleInfo {
  uint64_t cycles = 0;
  int scratch_width = 0;
};
std::map<std::string, ScheduleInfo> schedule_table(const NumberFormat& fmt);

/// Widest scratch window any schedule of this format needs.
int max_schedule_scratch(const NumberFormat& fmt);

// --- execution ---------------------------------------------------------------

/// Runs a schedule as sequential column steps.
void run_schedule(Crossbar& xb, const CompiledSchedule& s, std::span<const int> ext_cols,
                  int scratch_base, const RowSet& rows);

struct ScheduleBinding {
  std::vector<int> ext_cols;
  int scratch_base = 0;
};

/// Runs one schedule in lockstep across several partition-local bindings:
/// gate i of every binding executes in the same cycle.
void run_schedule_lockstep(Crossbar& xb, const CompiledSchedule& s,
                           std::span<const ScheduleBinding> bindings, const RowSet& rows);

}  // namespace pimfft
