// Must-Have-Been-Initialized dataflow analysis.
//
// Each program point carries a triple (May, Must, Wf): classes whose
// initializer may have started, classes whose initializer must have started,
// and fields written on every path. May is ordered by inclusion, Must and Wf
// by reverse inclusion.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sfi/cfg.hpp"

namespace sfi {

struct AbstractState {
  IndexSet may;
  IndexSet must;
  IndexSet wf;

  bool operator==(const AbstractState&) const = default;
};

AbstractState bottom(std::size_t num_classes, std::size_t num_fields);
AbstractState top(std::size_t num_classes, std::size_t num_fields);
inline AbstractState bottom(const Cfg& cfg) { return bottom(cfg.num_classes(), cfg.num_fields()); }
inline AbstractState top(const Cfg& cfg) { return top(cfg.num_classes(), cfg.num_fields()); }

bool is_bottom(const AbstractState& a);
/// True when no (store, history) pair can satisfy the state, i.e. Must ⊄ May.
/// Bottom is the canonical such state.
bool is_infeasible(const AbstractState& a);

bool leq(const AbstractState& a, const AbstractState& b);
AbstractState join(const AbstractState& a, const AbstractState& b);
AbstractState meet(const AbstractState& a, const AbstractState& b);

/// Effect of Put/Get/Any/Return. Throws std::invalid_argument for Invoke.
AbstractState transfer_instr(InstrKind kind, std::optional<FieldIdx> field, const AbstractState& a);

/// Combines the state before a call with the state at the callee exit.
AbstractState f_call(const AbstractState& caller, const AbstractState& exit);

/// Calling context propagated to C.<clinit>: unfeasible when C is already
/// known to be initialized.
AbstractState f_init_call(ClassIdx c, const AbstractState& a);

struct Solution {
  std::vector<AbstractState> in;
  std::vector<AbstractState> out;

  bool operator==(const Solution&) const = default;
};

/// Accounts for a class initializer that may run before the instruction at
/// `point`. Reads A_in at the initializer's exit from `sol`.
AbstractState f_init(const Cfg& cfg, PointId point, const AbstractState& a, const Solution& sol);

/// Right-hand sides of the equation system evaluated on `sol`.
AbstractState eval_in(const Cfg& cfg, PointId point, const Solution& sol);
AbstractState eval_out(const Cfg& cfg, PointId point, const Solution& sol);

enum class SolveStrategy { Worklist, RoundRobin };

struct SolveOptions {
  SolveStrategy strategy = SolveStrategy::Worklist;
  /// When set, the worklist picks a pseudo-random pending point each step.
  std::optional<std::uint64_t> shuffle_seed;
};

/// Least solution of the equation system.
Solution solve(const Cfg& cfg, const SolveOptions& options = {});

enum class EquationSide { In, Out };

struct Discrepancy {
  PointId point;
  EquationSide side;
  AbstractState expected;
  AbstractState actual;
};

/// Equations not satisfied by `sol`; empty iff `sol` is a solution.
std::vector<Discrepancy> check_equations(const Cfg& cfg, const Solution& sol);

}  // namespace sfi
