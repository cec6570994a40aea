#include "sfi/analysis.hpp"

#include <algorithm>
#include <deque>
#include <numeric>
#include <random>
#include <stdexcept>

namespace sfi {

AbstractState bottom(std::size_t num_classes, std::size_t num_fields) {
  AbstractState a{IndexSet(num_classes), IndexSet(num_classes), IndexSet(num_fields)};
  a.must.set();
  a.wf.set();
  return a;
}

AbstractState top(std::size_t num_classes, std::size_t num_fields) {
  AbstractState a{IndexSet(num_classes), IndexSet(num_classes), IndexSet(num_fields)};
  a.may.set();
  return a;
}

bool is_bottom(const AbstractState& a) { return a.may.none() && a.must.all() && a.wf.all(); }

bool is_infeasible(const AbstractState& a) { return !a.must.is_subset_of(a.may); }

bool leq(const AbstractState& a, const AbstractState& b) {
  return a.may.is_subset_of(b.may) && b.must.is_subset_of(a.must) && b.wf.is_subset_of(a.wf);
}

AbstractState join(const AbstractState& a, const AbstractState& b) {
  return {a.may | b.may, a.must & b.must, a.wf & b.wf};
}

AbstractState meet(const AbstractState& a, const AbstractState& b) {
  return {a.may & b.may, a.must | b.must, a.wf | b.wf};
}

AbstractState transfer_instr(InstrKind kind, std::optional<FieldIdx> field, const AbstractState& a) {
  switch (kind) {
    case InstrKind::Put: {
      AbstractState r = a;
      r.wf.set(field.value());
      return r;
    }
    case InstrKind::Get:
    case InstrKind::Any:
    case InstrKind::Return:
      return a;
    case InstrKind::Invoke:
      break;
  }
  throw std::invalid_argument("invoke has no single-instruction transfer function");
}

AbstractState f_call(const AbstractState& caller, const AbstractState& exit) {
  return {exit.may, caller.must | exit.must, caller.wf | exit.wf};
}

AbstractState f_init_call(ClassIdx c, const AbstractState& a) {
  if (a.must.test(c)) return bottom(a.may.size(), a.wf.size());
  AbstractState r = a;
  r.may.set(c);
  r.must.set(c);
  return r;
}

AbstractState f_init(const Cfg& cfg, PointId point, const AbstractState& a, const Solution& sol) {
  const auto& p = cfg.point(point);
  if (!p.clinit) return a;
  // A state with Must ⊄ May describes no execution; mapping it to bottom keeps
  // the transfer monotone over the whole lattice.
  if (is_infeasible(a)) return bottom(a.may.size(), a.wf.size());
  const ClassIdx c = *p.clinit;
  if (a.must.test(c)) return a;
  const auto& exit = sol.in[cfg.method(cfg.clinit_of(c)).last];
  AbstractState called = f_call(a, exit);
  if (!a.may.test(c)) return called;
  return join(f_init_call(c, a), called);
}

AbstractState eval_in(const Cfg& cfg, PointId point, const Solution& sol) {
  const auto& p = cfg.point(point);
  AbstractState acc = bottom(cfg);
  if (point == cfg.entry_point()) acc = {IndexSet(cfg.num_classes()), IndexSet(cfg.num_classes()), IndexSet(cfg.num_fields())};
  const auto& m = cfg.method(p.method);
  if (m.first == point) {
    if (m.clinit_of) {
      for (PointId site : cfg.cls(*m.clinit_of).init_sites) acc = join(acc, f_init_call(*m.clinit_of, sol.in[site]));
    } else {
      for (PointId caller : m.callers) acc = join(acc, f_init(cfg, caller, sol.in[caller], sol));
    }
  }
  for (PointId pred : p.pred) acc = join(acc, sol.out[pred]);
  return acc;
}

AbstractState eval_out(const Cfg& cfg, PointId point, const Solution& sol) {
  const auto& p = cfg.point(point);
  const AbstractState before = f_init(cfg, point, sol.in[point], sol);
  if (!p.kind) return before;
  if (*p.kind == InstrKind::Invoke) {
    AbstractState exits = bottom(cfg);
    for (MethodIdx callee : p.callees) exits = join(exits, sol.in[cfg.method(callee).last]);
    return f_call(before, exits);
  }
  return transfer_instr(*p.kind, p.field, before);
}

namespace {

// Points whose equations read the in- or out-value of each point.
std::vector<std::vector<PointId>> readers(const Cfg& cfg) {
  std::vector<std::vector<PointId>> r(cfg.num_points());
  for (PointId q = 0; q < cfg.num_points(); ++q) {
    const auto& p = cfg.point(q);
    auto& out = r[q];
    out.insert(out.end(), p.succ.begin(), p.succ.end());
    if (p.clinit) out.push_back(cfg.method(cfg.clinit_of(*p.clinit)).first);
    for (MethodIdx callee : p.callees) out.push_back(cfg.method(callee).first);
    const auto& m = cfg.method(p.method);
    if (m.last == q) {
      out.insert(out.end(), m.callers.begin(), m.callers.end());
      if (m.clinit_of) {
        for (PointId site : cfg.cls(*m.clinit_of).init_sites) {
          out.push_back(site);
          for (MethodIdx callee : cfg.point(site).callees) out.push_back(cfg.method(callee).first);
        }
      }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
  }
  return r;
}

// Recomputes both sides at `point`; true when either changed.
bool update(const Cfg& cfg, PointId point, Solution& sol) {
  AbstractState in = eval_in(cfg, point, sol);
  bool changed = false;
  if (in != sol.in[point]) {
    sol.in[point] = std::move(in);
    changed = true;
  }
  AbstractState out = eval_out(cfg, point, sol);
  if (out != sol.out[point]) {
    sol.out[point] = std::move(out);
    changed = true;
  }
  return changed;
}

}  // namespace

Solution solve(const Cfg& cfg, const SolveOptions& options) {
  const std::size_t n = cfg.num_points();
  Solution sol{std::vector<AbstractState>(n, bottom(cfg)), std::vector<AbstractState>(n, bottom(cfg))};

  if (options.strategy == SolveStrategy::RoundRobin) {
    for (bool changed = true; changed;) {
      changed = false;
      for (PointId p = 0; p < n; ++p) changed |= update(cfg, p, sol);
    }
    return sol;
  }

  const auto deps = readers(cfg);
  std::vector<bool> queued(n, true);
  std::vector<PointId> pending(n);
  std::iota(pending.begin(), pending.end(), PointId{0});
  std::deque<PointId> fifo;
  if (!options.shuffle_seed) fifo.assign(pending.begin(), pending.end());
  std::mt19937_64 rng(options.shuffle_seed.value_or(0));

  while (options.shuffle_seed ? !pending.empty() : !fifo.empty()) {
    PointId p;
    if (options.shuffle_seed) {
      const std::size_t i = rng() % pending.size();
      p = pending[i];
      pending[i] = pending.back();
      pending.pop_back();
    } else {
      p = fifo.front();
      fifo.pop_front();
    }
    queued[p] = false;
    if (!update(cfg, p, sol)) continue;
    for (PointId r : deps[p]) {
      if (queued[r]) continue;
      queued[r] = true;
      if (options.shuffle_seed)
        pending.push_back(r);
      else
        fifo.push_back(r);
    }
  }
  return sol;
}

std::vector<Discrepancy> check_equations(const Cfg& cfg, const Solution& sol) {
  std::vector<Discrepancy> out;
  if (sol.in.size() != cfg.num_points() || sol.out.size() != cfg.num_points())
    throw std::invalid_argument("solution does not cover every program point");
  for (PointId p = 0; p < cfg.num_points(); ++p) {
    auto in = eval_in(cfg, p, sol);
    if (in != sol.in[p]) out.push_back({p, EquationSide::In, std::move(in), sol.in[p]});
    auto o = eval_out(cfg, p, sol);
    if (o != sol.out[p]) out.push_back({p, EquationSide::Out, std::move(o), sol.out[p]});
  }
  return out;
}

}  // namespace sfi
