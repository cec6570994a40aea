// Small-step semantics with lazy class initialization.
//
// Field values are abstract, so a store only records which fields have been
// written. A marked frame remembers an instruction suspended by a class
// initializer; returning into it resumes that instruction without checking
// for initialization again.

#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "sfi/cfg.hpp"

namespace sfi {

enum class FieldValue { Default, Written };

struct Frame {
  PointId point = 0;
  bool marked = false;

  bool operator==(const Frame&) const = default;
};

struct ConcreteState {
  PointId point = 0;
  std::vector<Frame> stack;  // top at back()
  IndexSet written;          // fields whose value is not the default
  IndexSet history;          // classes whose initializer has been entered

  FieldValue value(FieldIdx f) const { return written.test(f) ? FieldValue::Written : FieldValue::Default; }
  bool operator==(const ConcreteState&) const = default;
};

struct ConcreteStateHash {
  std::size_t operator()(const ConcreteState& s) const;
};

enum class StepKind {
  ClinitEntry,   // initialization of a class started
  Intra,         // put/get/any to an intra successor
  Call,          // invoke entered a callee
  Return,        // return to the successor of a plain caller frame
};

struct Transition {
  ConcreteState target;
  StepKind kind;
  std::optional<ClassIdx> initialized;  // for ClinitEntry
  /// Points whose instruction executed in this step: the current point, plus
  /// any suspended instructions resumed after a class initializer returned.
  std::vector<PointId> executed;
  std::size_t marked_pops = 0;
};

/// Class whose initializer must run before the instruction at `point`.
std::optional<ClassIdx> need_init(const Cfg& cfg, PointId point, const IndexSet& history);

ConcreteState initial_state(const Cfg& cfg);

/// True for a return with an empty stack, or the exit of the entry method
/// reached with an empty stack.
bool is_final(const Cfg& cfg, const ConcreteState& s);

/// All successors of `state`, ordered by target point.
std::vector<Transition> step(const Cfg& cfg, const ConcreteState& state);

struct ExplorationLimits {
  std::size_t max_depth = 32;
  std::size_t max_states = 100000;
};

struct ExplorationResult {
  std::vector<ConcreteState> visited;  // breadth-first discovery order
  std::vector<ConcreteState> stuck;
  std::vector<ConcreteState> final;
  bool depth_limit_hit = false;
  bool state_limit_hit = false;

  bool complete() const { return !depth_limit_hit && !state_limit_hit; }
};

/// Called once per expanded state with its outgoing transitions.
using ExpandObserver = std::function<void(const ConcreteState&, std::span<const Transition>)>;

ExplorationResult explore(const Cfg& cfg, const ExplorationLimits& limits, const ExpandObserver& observer = {});

class TraceError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

/// Replays one execution, taking successor `choices[i]` at step i. Stops at
/// a state without successors or when choices run out.
std::vector<ConcreteState> run_trace(const Cfg& cfg, std::span<const std::size_t> choices);

}  // namespace sfi
