#include "sfi/model.hpp"

#include <algorithm>
#include <cctype>
#include <deque>
#include <sstream>

namespace sfi {

namespace {

bool all_digits(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isdigit(c); });
}

}  // namespace

bool label_less(std::string_view a, std::string_view b) {
  const bool a_end = a == kEndLabel, b_end = b == kEndLabel;
  if (a_end || b_end) return !a_end && b_end;
  const bool a_num = all_digits(a), b_num = all_digits(b);
  if (a_num != b_num) return a_num;
  if (a_num) {
    auto strip = [](std::string_view s) {
      const auto nz = s.find_first_not_of('0');
      return nz == std::string_view::npos ? std::string_view("0") : s.substr(nz);
    };
    const auto sa = strip(a), sb = strip(b);
    if (sa.size() != sb.size()) return sa.size() < sb.size();
    if (sa != sb) return sa < sb;
  }
  return a < b;
}

std::string Instruction::str() const {
  switch (kind) {
    case InstrKind::Put: return "put " + field->str();
    case InstrKind::Get: return "get " + field->str();
    case InstrKind::Invoke: return "invoke";
    case InstrKind::Return: return "return";
    case InstrKind::Any: return "any";
  }
  return "?";
}

bool ClassDecl::has_field(std::string_view field) const {
  return std::any_of(fields.begin(), fields.end(), [&](const FieldDecl& f) { return f.name == field; });
}

std::optional<std::string> ClassDecl::effective_superclass() const {
  if (!superclass || *superclass == kRootClass) return std::nullopt;
  return superclass;
}

const ClassDecl* Program::find_class(std::string_view name) const {
  auto it = classes.find(std::string(name));
  return it == classes.end() ? nullptr : &it->second;
}

const MethodBody* Program::body(const MethodId& m) const {
  const auto* cls = find_class(m.class_name);
  if (cls == nullptr) return nullptr;
  if (m.is_clinit()) return cls->clinit ? &*cls->clinit : nullptr;
  auto it = cls->methods.find(m.method_name);
  return it == cls->methods.end() ? nullptr : &it->second;
}

MethodBody* Program::body(const MethodId& m) {
  return const_cast<MethodBody*>(std::as_const(*this).body(m));
}

bool Program::has_field(const FieldId& f) const {
  const auto* cls = find_class(f.class_name);
  return cls != nullptr && cls->has_field(f.field_name);
}

std::vector<MethodId> Program::methods() const {
  std::vector<MethodId> out;
  for (const auto& [name, cls] : classes) {
    if (cls.clinit) out.push_back(MethodId::clinit(name));
    for (const auto& [mname, body] : cls.methods) out.push_back({name, mname});
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<FieldId> Program::fields() const {
  std::vector<FieldId> out;
  for (const auto& [name, cls] : classes)
    for (const auto& f : cls.fields) out.push_back({name, f.name});
  std::sort(out.begin(), out.end());
  return out;
}

PointLabel Program::first(const MethodId& m) const {
  const auto* b = body(m);
  if (b == nullptr || b->points.empty()) return last(m);
  return {m, b->points.front()};
}

std::optional<std::string> Program::clinit_target(const PointLabel& l) const {
  auto it = flow_clinit.lower_bound({l, std::string()});
  if (it == flow_clinit.end() || it->first != l) return std::nullopt;
  return it->second;
}

std::vector<PointLabel> Program::intra_successors(const PointLabel& l) const {
  std::vector<PointLabel> out;
  for (auto it = flow_intra.lower_bound({l, PointLabel{}}); it != flow_intra.end() && it->first == l; ++it)
    out.push_back(it->second);
  return out;
}

std::vector<MethodId> Program::inter_targets(const PointLabel& l) const {
  std::vector<MethodId> out;
  for (auto it = flow_inter.lower_bound({l, MethodId{}}); it != flow_inter.end() && it->first == l; ++it)
    out.push_back(it->second);
  return out;
}

std::string_view to_string(ViolationKind kind) {
  switch (kind) {
    case ViolationKind::MissingReturnEdge: return "missing-return-edge";
    case ViolationKind::DanglingLabel: return "dangling-label";
    case ViolationKind::DuplicateClinitTarget: return "duplicate-clinit-target";
    case ViolationKind::CrossMethodIntraEdge: return "cross-method-intra-edge";
    case ViolationKind::UnknownReference: return "unknown-reference";
    case ViolationKind::InvokeWithoutTarget: return "invoke-without-target";
    case ViolationKind::MisplacedEdge: return "misplaced-edge";
    case ViolationKind::CyclicSuperclass: return "cyclic-superclass";
  }
  return "?";
}

namespace {

class Validator {
 public:
  explicit Validator(const Program& p) : p_(p) {}

  std::vector<Violation> run() {
    check_entry();
    check_classes();
    check_points();
    check_intra();
    check_inter();
    check_clinit();
    check_return_edges();
    std::stable_sort(out_.begin(), out_.end(),
                     [](const Violation& a, const Violation& b) { return a.location < b.location; });
    return std::move(out_);
  }

 private:
  void report(ViolationKind kind, PointLabel where, std::string message) {
    out_.push_back({kind, std::move(where), std::move(message)});
  }

  // A label is declared when it is `end` of an existing method or listed in its body.
  bool declared(const PointLabel& l) const {
    const auto* b = p_.body(l.method);
    if (b == nullptr) return false;
    if (l.is_last()) return true;
    return std::find(b->points.begin(), b->points.end(), l.local) != b->points.end();
  }

  void check_entry() {
    if (!p_.has_method(p_.entry))
      report(ViolationKind::UnknownReference, Program::last(p_.entry),
             "entry method " + p_.entry.str() + " is not declared");
  }

  void check_classes() {
    for (const auto& [name, cls] : p_.classes) {
      const PointLabel where{MethodId::clinit(name), std::string(kEndLabel)};
      if (auto super = cls.effective_superclass()) {
        if (p_.find_class(*super) == nullptr) {
          report(ViolationKind::UnknownReference, where,
                 "class " + name + " extends undeclared class " + *super);
          continue;
        }
        std::set<std::string> seen{name};
        for (auto cur = super; cur;) {
          if (!seen.insert(*cur).second) {
            report(ViolationKind::CyclicSuperclass, where, "superclass chain of " + name + " is cyclic");
            break;
          }
          const auto* c = p_.find_class(*cur);
          cur = c ? c->effective_superclass() : std::nullopt;
        }
      }
      auto check_body = [&](const MethodId& m, const MethodBody& body) {
        std::set<std::string> labels;
        for (const auto& l : body.points) {
          const PointLabel pl{m, l};
          if (l == kEndLabel)
            report(ViolationKind::DanglingLabel, pl, "label 'end' is reserved for " + m.str() + ".last");
          else if (!labels.insert(l).second)
            report(ViolationKind::DanglingLabel, pl, "duplicate label " + pl.str());
          else if (!p_.instr.contains(pl))
            report(ViolationKind::DanglingLabel, pl, "point " + pl.str() + " has no instruction");
        }
      };
      if (cls.clinit) check_body(MethodId::clinit(name), *cls.clinit);
      for (const auto& [mname, body] : cls.methods) check_body({name, mname}, body);
    }
  }

  void check_points() {
    for (const auto& [l, ins] : p_.instr) {
      if (l.is_last()) {
        report(ViolationKind::MisplacedEdge, l, "method exit " + l.str() + " carries an instruction");
        continue;
      }
      if (!declared(l)) {
        report(ViolationKind::DanglingLabel, l, "instruction at undeclared point " + l.str());
        continue;
      }
      const bool needs_field = ins.kind == InstrKind::Put || ins.kind == InstrKind::Get;
      if (needs_field && (!ins.field || !p_.has_field(*ins.field)))
        report(ViolationKind::UnknownReference, l,
               ins.str() + " at " + l.str() + " refers to an undeclared field");
      if (ins.kind == InstrKind::Invoke && p_.inter_targets(l).empty())
        report(ViolationKind::InvokeWithoutTarget, l, "invoke at " + l.str() + " has no call target");
    }
  }

  void check_intra() {
    for (const auto& [from, to] : p_.flow_intra) {
      if (from.method != to.method) {
        report(ViolationKind::CrossMethodIntraEdge, from,
               "intra edge " + from.str() + " -> " + to.str() + " crosses methods");
        continue;
      }
      if (!declared(from))
        report(ViolationKind::DanglingLabel, from, "intra edge from undeclared point " + from.str());
      else if (from.is_last())
        report(ViolationKind::MisplacedEdge, from, "intra edge leaves method exit " + from.str());
      if (!declared(to))
        report(ViolationKind::DanglingLabel, from, "intra edge to undeclared point " + to.str());
    }
  }

  void check_inter() {
    for (const auto& [from, target] : p_.flow_inter) {
      if (!declared(from) || from.is_last()) {
        report(ViolationKind::DanglingLabel, from, "call edge from undeclared point " + from.str());
        continue;
      }
      auto it = p_.instr.find(from);
      if (it != p_.instr.end() && it->second.kind != InstrKind::Invoke)
        report(ViolationKind::MisplacedEdge, from, "call edge leaves non-invoke point " + from.str());
      if (!p_.has_method(target))
        report(ViolationKind::UnknownReference, from, "call target " + target.str() + " is not declared");
    }
  }

  void check_clinit() {
    std::optional<PointLabel> prev;
    for (const auto& [from, cls] : p_.flow_clinit) {
      if (prev && *prev == from)
        report(ViolationKind::DuplicateClinitTarget, from,
               "point " + from.str() + " has more than one initialization edge");
      prev = from;
      if (!declared(from))
        report(ViolationKind::DanglingLabel, from, "initialization edge from undeclared point " + from.str());
      else if (from.is_last())
        report(ViolationKind::MisplacedEdge, from, "initialization edge leaves method exit " + from.str());
      if (p_.find_class(cls) == nullptr)
        report(ViolationKind::UnknownReference, from,
               "initialization edge at " + from.str() + " names undeclared class " + cls);
    }
  }

  void check_return_edges() {
    for (const auto& m : p_.methods()) {
      const PointLabel start = p_.first(m);
      const PointLabel exit = Program::last(m);
      std::set<PointLabel> seen{start};
      std::deque<PointLabel> work{start};
      while (!work.empty()) {
        const PointLabel l = work.front();
        work.pop_front();
        auto it = p_.instr.find(l);
        if (it != p_.instr.end() && it->second.kind == InstrKind::Return && !p_.flow_intra.contains({l, exit}))
          report(ViolationKind::MissingReturnEdge, l, "return at " + l.str() + " has no edge to " + exit.str());
        for (auto& next : p_.intra_successors(l))
          if (next.method == m && seen.insert(next).second) work.push_back(next);
      }
    }
  }

  const Program& p_;
  std::vector<Violation> out_;
};

}  // namespace

std::vector<Violation> validate(const Program& program) { return Validator(program).run(); }

bool has_errors(const std::vector<Violation>& violations) {
  return std::any_of(violations.begin(), violations.end(),
                     [](const Violation& v) { return v.severity() == Severity::Error; });
}

std::string_view to_string(FieldInitMode mode) {
  switch (mode) {
    case FieldInitMode::Ignore: return "ignore";
    case FieldInitMode::PreSuper: return "pre-super";
    case FieldInitMode::PostSuper: return "post-super";
  }
  return "?";
}

std::optional<FieldInitMode> parse_field_init_mode(std::string_view text) {
  if (text == "ignore") return FieldInitMode::Ignore;
  if (text == "pre-super" || text == "pre_super") return FieldInitMode::PreSuper;
  if (text == "post-super" || text == "post_super") return FieldInitMode::PostSuper;
  return std::nullopt;
}

namespace synthetic {

std::string field_init(FieldInitMode mode, std::string_view field) {
  return std::string(mode == FieldInitMode::PreSuper ? "$fpre_" : "$fpost_") + std::string(field);
}

bool is_pre_super_init(std::string_view label) { return label.starts_with("$fpre_"); }

}  // namespace synthetic

namespace {

bool has_label(const MethodBody& body, std::string_view label) {
  return std::find(body.points.begin(), body.points.end(), label) != body.points.end();
}

// Gives an empty body a single return point so that entering it is well defined.
void ensure_nonempty(Program& p, const MethodId& m) {
  auto* body = p.body(m);
  if (!body->points.empty()) return;
  const PointLabel ret{m, synthetic::kReturn};
  body->points.push_back(ret.local);
  p.instr[ret] = Instruction::ret();
  p.flow_intra.insert({ret, Program::last(m)});
}

// Inserts a fresh point at position `pos` of a non-empty body. The new point
// falls through to the point previously at `pos`; a predecessor at `pos - 1`
// is rewired to the new point.
void insert_point(Program& p, const MethodId& m, std::size_t pos, const std::string& label,
                  Instruction ins, std::optional<std::string> clinit) {
  auto* body = p.body(m);
  const PointLabel fresh{m, label};
  const PointLabel next{m, body->points.at(pos)};
  if (pos > 0) {
    const PointLabel prev{m, body->points[pos - 1]};
    p.flow_intra.erase({prev, next});
    p.flow_intra.insert({prev, fresh});
  }
  body->points.insert(body->points.begin() + static_cast<std::ptrdiff_t>(pos), label);
  p.instr[fresh] = std::move(ins);
  p.flow_intra.insert({fresh, next});
  if (clinit) p.flow_clinit.insert({fresh, std::move(*clinit)});
}

std::size_t leading_count(const MethodBody& body, std::size_t from, auto pred) {
  std::size_t i = from;
  while (i < body.points.size() && pred(body.points[i])) ++i;
  return i;
}

void check_superclass_chains(const Program& p) {
  for (const auto& [name, cls] : p.classes) {
    std::set<std::string> seen{name};
    for (auto cur = cls.effective_superclass(); cur;) {
      const auto* c = p.find_class(*cur);
      if (c == nullptr) throw ModelError("class " + name + " extends undeclared class " + *cur);
      if (!seen.insert(*cur).second) throw ModelError("superclass chain of " + name + " is cyclic");
      cur = c->effective_superclass();
    }
  }
}

}  // namespace

Program desugar_super_init(Program program) {
  check_superclass_chains(program);
  for (auto& [name, cls] : program.classes) {
    const auto super = cls.effective_superclass();
    if (!super || (cls.clinit && has_label(*cls.clinit, synthetic::kSuper))) continue;
    if (!cls.clinit) cls.clinit = MethodBody{};
    const MethodId m = MethodId::clinit(name);
    ensure_nonempty(program, m);
    const std::size_t pos = leading_count(*program.body(m), 0, synthetic::is_pre_super_init);
    insert_point(program, m, pos, synthetic::kSuper, Instruction::any(), *super);
  }
  return program;
}

Program desugar_field_initializers(Program program, FieldInitMode mode) {
  if (mode == FieldInitMode::Ignore) return program;
  const auto is_post = [](std::string_view l) { return l.starts_with("$fpost_"); };
  for (auto& [name, cls] : program.classes) {
    const MethodId m = MethodId::clinit(name);
    for (const auto& field : cls.fields) {
      if (!field.has_initializer) continue;
      const std::string label = synthetic::field_init(mode, field.name);
      if (cls.clinit && has_label(*cls.clinit, label)) continue;
      if (!cls.clinit) cls.clinit = MethodBody{};
      ensure_nonempty(program, m);
      const auto& body = *program.body(m);
      std::size_t pos = leading_count(body, 0, synthetic::is_pre_super_init);
      if (mode == FieldInitMode::PostSuper) {
        if (pos < body.points.size() && body.points[pos] == synthetic::kSuper) ++pos;
        pos = leading_count(body, pos, is_post);
      }
      insert_point(program, m, pos, label, Instruction::put({name, field.name}), std::nullopt);
    }
  }
  return program;
}

Program add_entry_class_init(Program program) {
  const MethodId m = program.entry;
  auto* body = program.body(m);
  if (body == nullptr) throw ModelError("entry method " + m.str() + " is not declared");
  if (has_label(*body, synthetic::kEntry)) return program;
  ensure_nonempty(program, m);
  insert_point(program, m, 0, synthetic::kEntry, Instruction::any(), m.class_name);
  return program;
}

}  // namespace sfi
