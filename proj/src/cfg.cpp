#include "sfi/cfg.hpp"

#include <algorithm>
#include <map>

namespace sfi {

namespace {

struct MethodPlan {
  MethodId id;
  std::vector<std::string> labels;  // declared, or {$ret} when materialized
  bool materialized = false;
  bool implicit = false;
};

}  // namespace

Cfg::Cfg(const Program& program) {
  const auto violations = validate(program);
  if (has_errors(violations)) {
    for (const auto& v : violations)
      if (v.severity() == Severity::Error) throw ModelError("invalid program: " + v.message);
  }

  for (const auto& [name, cls] : program.classes) classes_.push_back({name, std::nullopt, {}});
  fields_ = program.fields();

  std::vector<MethodPlan> plans;
  for (const auto& m : program.methods()) {
    const auto& body = *program.body(m);
    if (body.points.empty())
      plans.push_back({m, {synthetic::kReturn}, true, false});
    else
      plans.push_back({m, body.points, false, false});
  }
  std::set<std::string> targeted;
  for (const auto& [from, cls] : program.flow_clinit) targeted.insert(cls);
  for (const auto& cls : targeted)
    if (!program.find_class(cls)->clinit) plans.push_back({MethodId::clinit(cls), {synthetic::kReturn}, true, true});
  std::sort(plans.begin(), plans.end(), [](const auto& a, const auto& b) { return a.id < b.id; });

  std::map<PointLabel, PointId> ids;
  for (MethodIdx mi = 0; mi < plans.size(); ++mi) {
    const auto& plan = plans[mi];
    auto sorted = plan.labels;
    std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) { return label_less(a, b); });
    sorted.emplace_back(kEndLabel);
    MethodInfo info;
    info.id = plan.id;
    info.implicit = plan.implicit;
    for (const auto& l : sorted) {
      const PointId id = static_cast<PointId>(points_.size());
      PointInfo p;
      p.label = {plan.id, l};
      p.method = mi;
      p.is_last = l == kEndLabel;
      ids.emplace(p.label, id);
      points_.push_back(std::move(p));
    }
    info.last = static_cast<PointId>(points_.size() - 1);
    info.first = ids.at({plan.id, plan.labels.front()});
    if (plan.id.is_clinit()) {
      const ClassIdx c = *find_class(plan.id.class_name);
      info.clinit_of = c;
      classes_[c].clinit = mi;
    }
    if (plan.materialized) {
      auto& ret = points_[info.first];
      ret.kind = InstrKind::Return;
      ret.succ.push_back(info.last);
    }
    if (plan.id == program.entry) entry_ = mi;
    methods_.push_back(std::move(info));
  }

  for (const auto& [label, ins] : program.instr) {
    auto& p = points_[ids.at(label)];
    p.kind = ins.kind;
    if (ins.field) p.field = *find_field(*ins.field);
  }
  for (const auto& [from, to] : program.flow_intra) points_[ids.at(from)].succ.push_back(ids.at(to));
  for (const auto& [from, target] : program.flow_inter) {
    const MethodIdx m = *find_method(target);
    const PointId p = ids.at(from);
    points_[p].callees.push_back(m);
    methods_[m].callers.push_back(p);
  }
  for (const auto& [from, cls] : program.flow_clinit) {
    const PointId p = ids.at(from);
    const ClassIdx c = *find_class(cls);
    points_[p].clinit = c;
    classes_[c].init_sites.push_back(p);
  }
  for (PointId id = 0; id < points_.size(); ++id) {
    auto& p = points_[id];
    std::sort(p.succ.begin(), p.succ.end());
    p.succ.erase(std::unique(p.succ.begin(), p.succ.end()), p.succ.end());
    for (PointId s : p.succ) points_[s].pred.push_back(id);
  }
  for (auto& m : methods_) std::sort(m.callers.begin(), m.callers.end());
  for (auto& c : classes_) std::sort(c.init_sites.begin(), c.init_sites.end());
}

std::optional<PointId> Cfg::find_point(const PointLabel& label) const {
  auto it = std::lower_bound(points_.begin(), points_.end(), label, [](const PointInfo& p, const PointLabel& l) {
    if (p.label.method != l.method) return p.label.method < l.method;
    return label_less(p.label.local, l.local);
  });
  if (it == points_.end() || it->label != label) return std::nullopt;
  return static_cast<PointId>(it - points_.begin());
}

std::optional<ClassIdx> Cfg::find_class(std::string_view name) const {
  auto it = std::lower_bound(classes_.begin(), classes_.end(), name,
                             [](const ClassInfo& c, std::string_view n) { return c.name < n; });
  if (it == classes_.end() || it->name != name) return std::nullopt;
  return static_cast<ClassIdx>(it - classes_.begin());
}

std::optional<FieldIdx> Cfg::find_field(const FieldId& f) const {
  auto it = std::lower_bound(fields_.begin(), fields_.end(), f);
  if (it == fields_.end() || *it != f) return std::nullopt;
  return static_cast<FieldIdx>(it - fields_.begin());
}

std::optional<MethodIdx> Cfg::find_method(const MethodId& m) const {
  auto it = std::lower_bound(methods_.begin(), methods_.end(), m,
                             [](const MethodInfo& info, const MethodId& id) { return info.id < id; });
  if (it == methods_.end() || it->id != m) return std::nullopt;
  return static_cast<MethodIdx>(it - methods_.begin());
}

IndexSet Cfg::class_set(std::initializer_list<std::string_view> names) const {
  IndexSet s(num_classes());
  for (auto n : names) s.set(find_class(n).value());
  return s;
}

IndexSet Cfg::field_set(std::initializer_list<std::string_view> qualified) const {
  IndexSet s(num_fields());
  for (auto q : qualified) {
    const auto dot = q.find('.');
    s.set(find_field({std::string(q.substr(0, dot)), std::string(q.substr(dot + 1))}).value());
  }
  return s;
}

std::vector<std::string> Cfg::class_names(const IndexSet& s) const {
  std::vector<std::string> out;
  for (auto i = s.find_first(); i != IndexSet::npos; i = s.find_next(i)) out.push_back(classes_[i].name);
  return out;
}

std::vector<std::string> Cfg::field_names(const IndexSet& s) const {
  std::vector<std::string> out;
  for (auto i = s.find_first(); i != IndexSet::npos; i = s.find_next(i)) out.push_back(fields_[i].str());
  return out;
}

}  // namespace sfi
