// Clients of the analysis: the read-before-initialization check, the
// may-be-null field flags, and the interpreter-backed soundness harness.

#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "sfi/analysis.hpp"
#include "sfi/semantics.hpp"

namespace sfi {

enum class DiagnosticKind { ReadBeforeInit, MayNullRead };

std::string_view to_string(DiagnosticKind kind);

struct Diagnostic {
  DiagnosticKind kind;
  PointId point;
  FieldIdx field;
  std::string detail;

  bool operator==(const Diagnostic&) const = default;
};

/// Must ⊆ h ⊆ May and Wf ⊆ written.
bool correctness_holds(const AbstractState& a, const IndexSet& written, const IndexSet& history);

/// Reads at Get points whose field is absent from Wf after any class
/// initialization the read itself triggers. Unreachable points are silent.
/// Sorted by (point, field).
std::vector<Diagnostic> read_before_write(const Cfg& cfg, const Solution& sol);

/// Fields whose abstraction must include the default value.
std::vector<FieldIdx> nullness_flags(const Cfg& cfg, const Solution& sol);

/// One may-null-read diagnostic per read-before-init diagnostic.
std::vector<Diagnostic> may_null_reads(const std::vector<Diagnostic>& reads);

enum class CorrectnessClause { MustInHistory, HistoryInMay, WrittenFields };

std::string_view to_string(CorrectnessClause clause);

struct SoundnessViolation {
  ConcreteState state;
  AbstractState abstract;
  CorrectnessClause clause;
};

struct SoundnessReport {
  std::size_t programs_checked = 0;
  std::size_t states_checked = 0;
  std::vector<SoundnessViolation> violations;
  std::vector<bool> exploration_complete;

  bool ok() const { return violations.empty(); }
  void merge(SoundnessReport other);
};

/// Checks the correctness relation between `sol.in` and every explored state.
SoundnessReport verify_soundness(const Cfg& cfg, const Solution& sol, const ExplorationLimits& limits);

/// Properties of the transition relation that any trace must satisfy.
struct SemanticsReport {
  std::size_t states_expanded = 0;
  std::size_t transitions = 0;
  std::vector<std::string> failures;
};

SemanticsReport check_semantics_invariants(const Cfg& cfg, const ExplorationLimits& limits);

/// Compares the reads of default-valued fields observed by the interpreter
/// with read_before_write. `under_warnings` lists observed reads that no
/// diagnostic covers.
struct ReadAgreement {
  bool exploration_complete = false;
  std::size_t default_reads = 0;
  std::vector<std::pair<PointId, FieldIdx>> under_warnings;
};

ReadAgreement check_read_agreement(const Cfg& cfg, const Solution& sol, const ExplorationLimits& limits);

struct GeneratorBounds {
  std::size_t max_classes = 3;
  std::size_t max_methods = 4;
  std::size_t max_points = 20;
  std::size_t max_fields = 2;
};

/// Random well-formed program, deterministic in `seed`.
Program generate_program(std::uint64_t seed, const GeneratorBounds& bounds);

}  // namespace sfi
