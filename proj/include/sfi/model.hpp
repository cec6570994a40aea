// Program model for static-field initialization analysis.
//
// A program is the 5-tuple (entry, instr, flow_intra, flow_inter, flow_clinit)
// together with the class/method structure it is drawn from. Labels are
// method-local; a PointLabel qualifies them with their method.

#pragma once

#include <compare>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace sfi {

inline constexpr std::string_view kClinitName = "<clinit>";
inline constexpr std::string_view kEndLabel = "end";
inline constexpr std::string_view kRootClass = "Object";
/// Labels introduced by desugarings start with this character.
inline constexpr char kSyntheticPrefix = '$';

struct FieldId {
  std::string class_name;
  std::string field_name;

  auto operator<=>(const FieldId&) const = default;
  std::string str() const { return class_name + "." + field_name; }
};

struct MethodId {
  std::string class_name;
  std::string method_name;

  static MethodId clinit(std::string cls) { return {std::move(cls), std::string(kClinitName)}; }
  bool is_clinit() const { return method_name == kClinitName; }

  auto operator<=>(const MethodId&) const = default;
  std::string str() const { return class_name + "." + method_name; }
};

struct PointLabel {
  MethodId method;
  std::string local;

  bool is_last() const { return local == kEndLabel; }
  bool is_synthetic() const { return !local.empty() && local.front() == kSyntheticPrefix; }

  auto operator<=>(const PointLabel&) const = default;
  std::string str() const { return method.str() + "/" + local; }
};

/// Orders local labels naturally: numeric labels by value, then others
/// lexicographically, and `end` last.
bool label_less(std::string_view a, std::string_view b);

enum class InstrKind { Put, Get, Invoke, Return, Any };

struct Instruction {
  InstrKind kind = InstrKind::Any;
  std::optional<FieldId> field;  // set for Put and Get only

  static Instruction put(FieldId f) { return {InstrKind::Put, std::move(f)}; }
  static Instruction get(FieldId f) { return {InstrKind::Get, std::move(f)}; }
  static Instruction invoke() { return {InstrKind::Invoke, std::nullopt}; }
  static Instruction ret() { return {InstrKind::Return, std::nullopt}; }
  static Instruction any() { return {InstrKind::Any, std::nullopt}; }

  bool operator==(const Instruction&) const = default;
  std::string str() const;
};

struct MethodBody {
  /// Declared local labels in order; the first one is the method's first point.
  /// An empty body has first == last.
  std::vector<std::string> points;

  bool operator==(const MethodBody&) const = default;
};

struct FieldDecl {
  std::string name;
  bool has_initializer = false;

  bool operator==(const FieldDecl&) const = default;
};

struct ClassDecl {
  std::string name;
  std::optional<std::string> superclass;
  std::vector<FieldDecl> fields;
  std::optional<MethodBody> clinit;
  std::map<std::string, MethodBody> methods;

  bool operator==(const ClassDecl&) const = default;
  bool has_field(std::string_view field) const;
  /// Superclass unless absent or the implicit root.
  std::optional<std::string> effective_superclass() const;
};

struct Program {
  MethodId entry;
  std::map<std::string, ClassDecl> classes;
  std::map<PointLabel, Instruction> instr;
  std::set<std::pair<PointLabel, PointLabel>> flow_intra;
  std::set<std::pair<PointLabel, MethodId>> flow_inter;
  // Stored as a relation so that validate() can report non-functional input.
  std::set<std::pair<PointLabel, std::string>> flow_clinit;

  bool operator==(const Program&) const = default;

  const ClassDecl* find_class(std::string_view name) const;
  const MethodBody* body(const MethodId& m) const;
  MethodBody* body(const MethodId& m);
  bool has_method(const MethodId& m) const { return body(m) != nullptr; }
  bool has_field(const FieldId& f) const;

  /// All methods, clinits included, in (class, name) order.
  std::vector<MethodId> methods() const;
  std::vector<FieldId> fields() const;

  PointLabel first(const MethodId& m) const;
  static PointLabel last(const MethodId& m) { return {m, std::string(kEndLabel)}; }

  std::optional<std::string> clinit_target(const PointLabel& l) const;
  std::vector<PointLabel> intra_successors(const PointLabel& l) const;
  std::vector<MethodId> inter_targets(const PointLabel& l) const;
};

enum class ViolationKind {
  MissingReturnEdge,
  DanglingLabel,
  DuplicateClinitTarget,
  CrossMethodIntraEdge,
  UnknownReference,
  InvokeWithoutTarget,
  // Extensions: edges or instructions attached where the model forbids them,
  // and superclass cycles.
  MisplacedEdge,
  CyclicSuperclass,
};

enum class Severity { Warning, Error };

std::string_view to_string(ViolationKind kind);

struct Violation {
  ViolationKind kind;
  PointLabel location;
  std::string message;

  Severity severity() const {
    return kind == ViolationKind::InvokeWithoutTarget ? Severity::Warning : Severity::Error;
  }
  bool operator==(const Violation&) const = default;
};

/// Checks every structural invariant of a program. Violations are returned
/// sorted by location.
std::vector<Violation> validate(const Program& program);
bool has_errors(const std::vector<Violation>& violations);

class ModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class FieldInitMode { Ignore, PreSuper, PostSuper };

std::string_view to_string(FieldInitMode mode);
std::optional<FieldInitMode> parse_field_init_mode(std::string_view text);

/// Prepends to the clinit of each class with a non-root superclass S a point
/// carrying an initialization edge to S, creating the clinit if needed. Throws ModelError on a cyclic
/// superclass chain.
Program desugar_super_init(Program program);

/// Materializes field initializers as Put points at the head of the class
/// initializer, before (PreSuper) or after (PostSuper) the superclass edge.
Program desugar_field_initializers(Program program, FieldInitMode mode);

/// Adds an initialization edge for the entry method's class at its start.
Program add_entry_class_init(Program program);

/// Synthetic label spellings used by the desugarings.
namespace synthetic {
inline const std::string kSuper = "$super";
inline const std::string kEntry = "$entry";
inline const std::string kReturn = "$ret";
std::string field_init(FieldInitMode mode, std::string_view field);
bool is_pre_super_init(std::string_view label);
}  // namespace synthetic

}  // namespace sfi
