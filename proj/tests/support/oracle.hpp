// Reference implementation of the dataflow equations used by the tests.
//
// Works directly on the Program's names with std::set and naive round-robin
// iteration from bottom, sharing no code with the library solver. F_init
// follows the three-case definition, except that a state whose Must is not
// contained in its May (it describes no execution) is sent to bottom first.
// Without that rule such states, produced by calls at unreachable points, add
// spurious classes to May at the entry of the called method.
#pragma once

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "sfi/model.hpp"

namespace oracle {

struct State {
  std::set<std::string> may;
  std::set<std::string> must;
  std::set<std::string> wf;  // qualified field names
  bool operator==(const State&) const = default;
};

inline std::set<std::string> set_union(const std::set<std::string>& a, const std::set<std::string>& b) {
  std::set<std::string> r = a;
  r.insert(b.begin(), b.end());
  return r;
}

inline std::set<std::string> set_inter(const std::set<std::string>& a, const std::set<std::string>& b) {
  std::set<std::string> r;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::inserter(r, r.end()));
  return r;
}

inline State join(const State& a, const State& b) {
  return {set_union(a.may, b.may), set_inter(a.must, b.must), set_inter(a.wf, b.wf)};
}

inline State fcall(const State& a, const State& x) { return {x.may, set_union(a.must, x.must), set_union(a.wf, x.wf)}; }

class Solver {
 public:
  using Key = std::pair<std::string, std::string>;  // (method str, local label)

  explicit Solver(const sfi::Program& p) : p_(p) {
    for (const auto& [name, cls] : p.classes) {
      classes_.insert(name);
      for (const auto& f : cls.fields) fields_.insert(name + "." + f.name);
    }
    for (const auto& m : p.methods()) add_method(m);
    for (const auto& [l, c] : p.flow_clinit) {
      const auto m = sfi::MethodId::clinit(c);
      if (!bodies_.count(m.str())) add_method(m);
    }
    bottom_ = {{}, classes_, fields_};
  }

  void solve() {
    for (const auto& k : order_) {
      in_[k] = bottom_;
      out_[k] = bottom_;
    }
    for (bool changed = true; changed;) {
      changed = false;
      for (const auto& k : order_) {
        State i = eval_in(k);
        if (!(i == in_[k])) {
          in_[k] = i;
          changed = true;
        }
        State o = eval_out(k);
        if (!(o == out_[k])) {
          out_[k] = o;
          changed = true;
        }
      }
    }
  }

  const std::vector<Key>& points() const { return order_; }
  const State& in(const Key& k) const { return in_.at(k); }
  const State& out(const Key& k) const { return out_.at(k); }

 private:
  struct Info {
    std::string first;
    sfi::MethodId id;
  };

  void add_method(const sfi::MethodId& m) {
    const auto* body = p_.body(m);
    const std::string first = body && !body->points.empty() ? body->points.front() : "end";
    bodies_[m.str()] = {first, m};
    if (body)
      for (const auto& l : body->points) order_.push_back({m.str(), l});
    order_.push_back({m.str(), "end"});
  }

  sfi::PointLabel label(const Key& k) const { return {bodies_.at(k.first).id, k.second}; }
  Key key(const sfi::PointLabel& l) const { return {l.method.str(), l.local}; }
  Key last_of(const sfi::MethodId& m) const { return {m.str(), "end"}; }

  State finit(const Key& k, const State& a) const {
    const auto c = p_.clinit_target(label(k));
    if (!c) return a;
    if (!std::includes(a.may.begin(), a.may.end(), a.must.begin(), a.must.end())) return bottom_;
    if (a.must.count(*c)) return a;
    const State called = fcall(a, in_.at(last_of(sfi::MethodId::clinit(*c))));
    if (!a.may.count(*c)) return called;
    return join(finit_call(*c, a), called);
  }

  State finit_call(const std::string& c, const State& a) const {
    if (a.must.count(c)) return bottom_;
    State r = a;
    r.may.insert(c);
    r.must.insert(c);
    return r;
  }

  State eval_in(const Key& k) const {
    State acc = bottom_;
    const auto& info = bodies_.at(k.first);
    const bool is_first = info.first == k.second;
    if (is_first && info.id == p_.entry) acc = join(acc, State{});
    if (is_first) {
      if (info.id.is_clinit()) {
        for (const auto& [l, c] : p_.flow_clinit)
          if (c == info.id.class_name) acc = join(acc, finit_call(c, in_.at(key(l))));
      } else {
        for (const auto& [l, m] : p_.flow_inter)
          if (m == info.id) acc = join(acc, finit(key(l), in_.at(key(l))));
      }
    }
    for (const auto& [from, to] : p_.flow_intra)
      if (key(to) == k) acc = join(acc, out_.at(key(from)));
    return acc;
  }

  State eval_out(const Key& k) const {
    const State before = finit(k, in_.at(k));
    const auto it = p_.instr.find(label(k));
    if (k.second == "end" || it == p_.instr.end()) return before;
    if (it->second.kind == sfi::InstrKind::Invoke) {
      State exits = bottom_;
      for (const auto& [l, m] : p_.flow_inter)
        if (key(l) == k) exits = join(exits, in_.at(last_of(m)));
      return fcall(before, exits);
    }
    if (it->second.kind == sfi::InstrKind::Put) {
      State r = before;
      r.wf.insert(it->second.field->str());
      return r;
    }
    return before;
  }

  const sfi::Program& p_;
  std::set<std::string> classes_;
  std::set<std::string> fields_;
  State bottom_;
  std::map<std::string, Info> bodies_;
  std::vector<Key> order_;
  std::map<Key, State> in_;
  std::map<Key, State> out_;
};

}  // namespace oracle
