#include "sfi/checks.hpp"

#include <algorithm>
#include <set>

namespace sfi {

std::string_view to_string(DiagnosticKind kind) {
  switch (kind) {
    case DiagnosticKind::ReadBeforeInit: return "read-before-init";
    case DiagnosticKind::MayNullRead: return "may-null-read";
  }
  return "?";
}

std::string_view to_string(CorrectnessClause clause) {
  switch (clause) {
    case CorrectnessClause::MustInHistory: return "must-subset-of-history";
    case CorrectnessClause::HistoryInMay: return "history-subset-of-may";
    case CorrectnessClause::WrittenFields: return "wf-subset-of-written";
  }
  return "?";
}

namespace {

std::optional<CorrectnessClause> failing_clause(const AbstractState& a, const IndexSet& written,
                                                const IndexSet& history) {
  if (!a.must.is_subset_of(history)) return CorrectnessClause::MustInHistory;
  if (!history.is_subset_of(a.may)) return CorrectnessClause::HistoryInMay;
  if (!a.wf.is_subset_of(written)) return CorrectnessClause::WrittenFields;
  return std::nullopt;
}

}  // namespace

bool correctness_holds(const AbstractState& a, const IndexSet& written, const IndexSet& history) {
  return !failing_clause(a, written, history);
}

std::vector<Diagnostic> read_before_write(const Cfg& cfg, const Solution& sol) {
  std::vector<Diagnostic> out;
  for (PointId l = 0; l < cfg.num_points(); ++l) {
    const auto& p = cfg.point(l);
    if (p.kind != InstrKind::Get) continue;
    // A read that triggers initialization happens after the initializer ran.
    const AbstractState before = f_init(cfg, l, sol.in[l], sol);
    if (is_infeasible(before) || before.wf.test(p.field)) continue;
    const auto& f = cfg.field(p.field);
    out.push_back({DiagnosticKind::ReadBeforeInit, l, p.field,
                   f.str() + " may be read at " + p.label.str() + " before it is written"});
  }
  return out;
}

std::vector<Diagnostic> may_null_reads(const std::vector<Diagnostic>& reads) {
  std::vector<Diagnostic> out;
  for (const auto& d : reads)
    if (d.kind == DiagnosticKind::ReadBeforeInit)
      out.push_back({DiagnosticKind::MayNullRead, d.point, d.field, "value read may be the default (null/zero)"});
  return out;
}

std::vector<FieldIdx> nullness_flags(const Cfg& cfg, const Solution& sol) {
  std::set<FieldIdx> fields;
  for (const auto& d : read_before_write(cfg, sol)) fields.insert(d.field);
  return {fields.begin(), fields.end()};
}

void SoundnessReport::merge(SoundnessReport other) {
  programs_checked += other.programs_checked;
  states_checked += other.states_checked;
  for (auto& v : other.violations) violations.push_back(std::move(v));
  exploration_complete.insert(exploration_complete.end(), other.exploration_complete.begin(),
                              other.exploration_complete.end());
}

SoundnessReport verify_soundness(const Cfg& cfg, const Solution& sol, const ExplorationLimits& limits) {
  const auto result = explore(cfg, limits);
  SoundnessReport report;
  report.programs_checked = 1;
  report.exploration_complete.push_back(result.complete());
  for (const auto& s : result.visited) {
    ++report.states_checked;
    const auto& a = sol.in.at(s.point);
    if (auto clause = failing_clause(a, s.written, s.history)) report.violations.push_back({s, a, *clause});
  }
  return report;
}

SemanticsReport check_semantics_invariants(const Cfg& cfg, const ExplorationLimits& limits) {
  SemanticsReport report;
  auto fail = [&](const ConcreteState& s, const std::string& what) {
    report.failures.push_back(cfg.point(s.point).label.str() + ": " + what);
  };
  explore(cfg, limits, [&](const ConcreteState& s, std::span<const Transition> ts) {
    ++report.states_expanded;
    report.transitions += ts.size();
    const auto init = need_init(cfg, s.point, s.history);
    if (init) {
      if (ts.size() != 1 || ts[0].kind != StepKind::ClinitEntry || ts[0].initialized != init)
        fail(s, "initialization step is not the unique successor");
    }
    for (const auto& t : ts) {
      const auto& to = t.target;
      if (!s.written.is_subset_of(to.written)) fail(s, "written fields shrank");
      if (!s.history.is_subset_of(to.history)) fail(s, "history shrank");
      if (t.kind == StepKind::ClinitEntry) {
        if (!init) fail(s, "initialization without a pending initialization edge");
        if (!t.initialized || s.history.test(*t.initialized)) fail(s, "class initialized twice along a trace");
        if (to.history.count() != s.history.count() + 1) fail(s, "initialization must add exactly one class");
        if (to.stack.size() != s.stack.size() + 1 || !to.stack.back().marked || to.stack.back().point != s.point)
          fail(s, "initialization must push a marked frame for the current point");
        continue;
      }
      if (init) fail(s, "instruction executed while an initialization is pending");
      if (to.history != s.history) fail(s, "history changed outside an initialization step");
      // Frames popped by a return into suspended instructions must be marked,
      // and each resumed instruction is the marked frame's point.
      if (t.executed.size() != t.marked_pops + 1 || t.executed.front() != s.point) {
        fail(s, "executed chain does not match the popped frames");
        continue;
      }
      if (t.marked_pops > s.stack.size()) {
        fail(s, "popped more frames than the stack holds");
        continue;
      }
      for (std::size_t i = 0; i < t.marked_pops; ++i) {
        const Frame& f = s.stack[s.stack.size() - 1 - i];
        if (!f.marked || f.point != t.executed[i + 1]) fail(s, "resumed a frame that is not marked");
      }
      const std::size_t base = s.stack.size() - t.marked_pops;
      const bool prefix_kept = std::equal(s.stack.begin(), s.stack.begin() + static_cast<std::ptrdiff_t>(
                                                                                 std::min(base, to.stack.size())),
                                          to.stack.begin());
      switch (t.kind) {
        case StepKind::Call:
          if (to.stack.size() != base + 1 || to.stack.back().marked || !prefix_kept)
            fail(s, "call must push a plain frame");
          break;
        case StepKind::Return:
          if (base == 0 || to.stack.size() != base - 1 || s.stack[base - 1].marked)
            fail(s, "plain return must pop a plain frame");
          break;
        case StepKind::Intra:
          if (to.stack.size() != base || !prefix_kept) fail(s, "intra step changed the call stack");
          break;
        case StepKind::ClinitEntry:
          break;
      }
    }
  });
  return report;
}

ReadAgreement check_read_agreement(const Cfg& cfg, const Solution& sol, const ExplorationLimits& limits) {
  std::set<std::pair<PointId, FieldIdx>> observed;
  const auto result = explore(cfg, limits, [&](const ConcreteState& s, std::span<const Transition> ts) {
    for (const auto& t : ts)
      for (PointId e : t.executed) {
        const auto& p = cfg.point(e);
        if (p.kind == InstrKind::Get && !s.written.test(p.field)) observed.insert({e, p.field});
      }
  });
  std::set<std::pair<PointId, FieldIdx>> warned;
  for (const auto& d : read_before_write(cfg, sol)) warned.insert({d.point, d.field});
  ReadAgreement agreement;
  agreement.exploration_complete = result.complete();
  agreement.default_reads = observed.size();
  std::set_difference(observed.begin(), observed.end(), warned.begin(), warned.end(),
                      std::back_inserter(agreement.under_warnings));
  return agreement;
}

}  // namespace sfi
