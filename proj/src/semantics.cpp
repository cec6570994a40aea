#include "sfi/semantics.hpp"

#include <boost/functional/hash.hpp>

#include <algorithm>
#include <deque>
#include <unordered_set>

namespace sfi {

std::size_t ConcreteStateHash::operator()(const ConcreteState& s) const {
  std::size_t seed = s.point;
  for (const auto& f : s.stack) {
    boost::hash_combine(seed, f.point);
    boost::hash_combine(seed, f.marked);
  }
  boost::hash_combine(seed, hash_value(s.written));
  boost::hash_combine(seed, hash_value(s.history));
  return seed;
}

std::optional<ClassIdx> need_init(const Cfg& cfg, PointId point, const IndexSet& history) {
  const auto& clinit = cfg.point(point).clinit;
  if (clinit && !history.test(*clinit)) return clinit;
  return std::nullopt;
}

ConcreteState initial_state(const Cfg& cfg) {
  return {cfg.entry_point(), {}, IndexSet(cfg.num_fields()), IndexSet(cfg.num_classes())};
}

bool is_final(const Cfg& cfg, const ConcreteState& s) {
  if (!s.stack.empty()) return false;
  const auto& p = cfg.point(s.point);
  if (p.kind) return *p.kind == InstrKind::Return;
  return s.point == cfg.method(cfg.entry()).last;
}

namespace {

// The instruction-level relation: executes the instruction at `at` without
// considering class initialization. Returns into a marked frame resume the
// suspended instruction recursively.
void step_instr(const Cfg& cfg, PointId at, const ConcreteState& from, std::vector<Frame> stack,
                std::vector<PointId> executed, std::size_t pops, std::vector<Transition>& out) {
  const auto& p = cfg.point(at);
  if (!p.kind) return;
  executed.push_back(at);
  auto emit = [&](PointId to, std::vector<Frame> cs, StepKind kind, bool write) {
    ConcreteState t{to, std::move(cs), from.written, from.history};
    if (write) t.written.set(p.field);
    out.push_back({std::move(t), kind, std::nullopt, executed, pops});
  };
  switch (*p.kind) {
    case InstrKind::Put:
    case InstrKind::Get:
    case InstrKind::Any:
      for (PointId s : p.succ) emit(s, stack, StepKind::Intra, *p.kind == InstrKind::Put);
      return;
    case InstrKind::Invoke:
      for (MethodIdx m : p.callees) {
        auto cs = stack;
        cs.push_back({at, false});
        emit(cfg.method(m).first, std::move(cs), StepKind::Call, false);
      }
      return;
    case InstrKind::Return: {
      if (stack.empty()) return;
      const Frame top = stack.back();
      stack.pop_back();
      if (top.marked) {
        step_instr(cfg, top.point, from, std::move(stack), std::move(executed), pops + 1, out);
        return;
      }
      for (PointId s : cfg.point(top.point).succ) emit(s, stack, StepKind::Return, false);
      return;
    }
  }
}

}  // namespace

std::vector<Transition> step(const Cfg& cfg, const ConcreteState& state) {
  std::vector<Transition> out;
  if (!cfg.point(state.point).kind) return out;
  if (auto c = need_init(cfg, state.point, state.history)) {
    ConcreteState t = state;
    t.point = cfg.method(cfg.clinit_of(*c)).first;
    t.stack.push_back({state.point, true});
    t.history.set(*c);
    out.push_back({std::move(t), StepKind::ClinitEntry, c, {}, 0});
    return out;
  }
  step_instr(cfg, state.point, state, state.stack, {}, 0, out);
  std::stable_sort(out.begin(), out.end(),
                   [](const Transition& a, const Transition& b) { return a.target.point < b.target.point; });
  return out;
}

ExplorationResult explore(const Cfg& cfg, const ExplorationLimits& limits, const ExpandObserver& observer) {
  ExplorationResult result;
  std::unordered_set<ConcreteState, ConcreteStateHash> seen;
  auto start = initial_state(cfg);
  seen.insert(start);
  result.visited.push_back(std::move(start));

  for (std::size_t next = 0; next < result.visited.size(); ++next) {
    const ConcreteState state = result.visited[next];
    if (state.stack.size() > limits.max_depth) {
      result.depth_limit_hit = true;
      continue;
    }
    const auto transitions = step(cfg, state);
    if (observer) observer(state, transitions);
    if (transitions.empty()) {
      (is_final(cfg, state) ? result.final : result.stuck).push_back(state);
      continue;
    }
    for (const auto& t : transitions) {
      if (seen.contains(t.target)) continue;
      if (result.visited.size() >= limits.max_states) {
        result.state_limit_hit = true;
        return result;
      }
      seen.insert(t.target);
      result.visited.push_back(t.target);
    }
  }
  return result;
}

std::vector<ConcreteState> run_trace(const Cfg& cfg, std::span<const std::size_t> choices) {
  std::vector<ConcreteState> trace{initial_state(cfg)};
  for (std::size_t i = 0; i < choices.size(); ++i) {
    auto ts = step(cfg, trace.back());
    if (ts.empty()) break;
    if (choices[i] >= ts.size())
      throw TraceError("choice " + std::to_string(choices[i]) + " at step " + std::to_string(i) + " exceeds " +
                       std::to_string(ts.size()) + " successor(s)");
    trace.push_back(std::move(ts[choices[i]].target));
  }
  return trace;
}

}  // namespace sfi
