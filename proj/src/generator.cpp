#include <algorithm>
#include <random>

#include "sfi/checks.hpp"

namespace sfi {

namespace {

// Draws are taken straight from the engine (no std distributions) so that a
// seed yields the same program with every standard library.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::size_t below(std::size_t n) { return n == 0 ? 0 : static_cast<std::size_t>(engine_() % n); }
  std::size_t between(std::size_t lo, std::size_t hi) { return lo + below(hi - lo + 1); }
  bool chance(unsigned percent) { return below(100) < percent; }
  template <typename T>
  const T& pick(const std::vector<T>& v) {
    return v[below(v.size())];
  }

 private:
  std::mt19937_64 engine_;
};

std::string class_name(std::size_t i) {
  if (i < 26) return std::string(1, static_cast<char>('A' + i));
  return "K" + std::to_string(i);
}

class Generator {
 public:
  Generator(std::uint64_t seed, const GeneratorBounds& bounds) : rng_(seed), bounds_(bounds) {}

  Program run() {
    make_classes();
    make_fields();
    make_methods();
    make_bodies();
    add_biases();
    return std::move(p_);
  }

 private:
  void make_classes() {
    const std::size_t n = rng_.between(1, std::max<std::size_t>(1, bounds_.max_classes));
    for (std::size_t i = 0; i < n; ++i) {
      ClassDecl c;
      c.name = class_name(i);
      if (i > 0 && rng_.chance(20)) c.superclass = class_name(rng_.below(i));
      names_.push_back(c.name);
      p_.classes.emplace(c.name, std::move(c));
    }
    std::vector<std::string> order = names_;
    for (const auto& n : order)
      if (rng_.chance(50)) p_.classes[n].clinit = MethodBody{};
    // At least 30% of the classes get an initializer.
    const std::size_t wanted = (3 * n + 9) / 10;
    while (with_clinit().size() < wanted) p_.classes[rng_.pick(order)].clinit = MethodBody{};
  }

  std::vector<std::string> with_clinit() const {
    std::vector<std::string> out;
    for (const auto& [name, c] : p_.classes)
      if (c.clinit) out.push_back(name);
    return out;
  }

  void make_fields() {
    const std::size_t n = bounds_.max_fields == 0 ? 0 : rng_.between(1, bounds_.max_fields);
    for (std::size_t i = 0; i < n; ++i) {
      const auto& owner = rng_.pick(names_);
      const std::string name = "f" + std::to_string(i);
      p_.classes[owner].fields.push_back({name, rng_.chance(20)});
      fields_.push_back({owner, name});
    }
  }

  void make_methods() {
    const std::size_t n = rng_.between(1, std::max<std::size_t>(1, bounds_.max_methods));
    for (std::size_t i = 0; i < n; ++i) {
      const MethodId m{rng_.pick(names_), i == 0 ? "main" : "m" + std::to_string(i)};
      p_.classes[m.class_name].methods.emplace(m.method_name, MethodBody{});
      plain_.push_back(m);
    }
    p_.entry = plain_.front();
  }

  void make_bodies() {
    std::vector<MethodId> bodies = plain_;
    for (const auto& c : with_clinit()) bodies.push_back(MethodId::clinit(c));
    const std::size_t total = rng_.between(bodies.size(), std::max(bodies.size(), bounds_.max_points));
    std::vector<std::size_t> sizes(bodies.size(), 1);
    for (std::size_t extra = total - bodies.size(); extra > 0; --extra) ++sizes[rng_.below(sizes.size())];
    for (std::size_t b = 0; b < bodies.size(); ++b) make_body(bodies[b], sizes[b]);
  }

  std::string pick_class_for_edge() {
    const auto targets = with_clinit();
    if (!targets.empty() && rng_.chance(80)) return rng_.pick(targets);
    return rng_.pick(names_);
  }

  void make_body(const MethodId& m, std::size_t k) {
    auto& body = *p_.body(m);
    for (std::size_t i = 0; i < k; ++i) body.points.push_back(std::to_string(next_label_++));
    const auto self = std::find(plain_.begin(), plain_.end(), m);
    const std::size_t self_index = self == plain_.end() ? 0 : static_cast<std::size_t>(self - plain_.begin()) + 1;

    for (std::size_t i = 0; i < k; ++i) {
      const PointLabel l{m, body.points[i]};
      Instruction ins = Instruction::ret();
      if (i + 1 < k) {
        const std::size_t roll = rng_.below(10);
        if (roll < 3)
          ins = Instruction::any();
        else if (roll < 5 && !fields_.empty())
          ins = Instruction::put(rng_.pick(fields_));
        else if (roll < 7 && !fields_.empty())
          ins = Instruction::get(rng_.pick(fields_));
        else if (roll < 9)
          ins = Instruction::invoke();
        else
          ins = rng_.chance(50) ? Instruction::ret() : Instruction::any();
      }
      p_.instr[l] = ins;

      if (ins.field && rng_.chance(60))
        p_.flow_clinit.insert({l, ins.field->class_name});
      else if (!ins.field && ins.kind != InstrKind::Return && rng_.chance(20))
        p_.flow_clinit.insert({l, pick_class_for_edge()});

      if (ins.kind == InstrKind::Invoke) {
        const std::size_t count = rng_.chance(70) ? 1 : 2;
        for (std::size_t c = 0; c < count; ++c) {
          // Mostly call "later" methods so that most programs are recursion-free.
          if (self_index < plain_.size() && rng_.chance(85))
            p_.flow_inter.insert({l, plain_[rng_.between(self_index, plain_.size() - 1)]});
          else
            p_.flow_inter.insert({l, rng_.pick(plain_)});
        }
      }

      if (ins.kind == InstrKind::Return) {
        p_.flow_intra.insert({l, Program::last(m)});
      } else {
        p_.flow_intra.insert({l, {m, body.points[i + 1]}});
        if (rng_.chance(25)) p_.flow_intra.insert({l, {m, body.points[rng_.below(k)]}});
      }
    }
  }

  void set_clinit_edge(const PointLabel& l, const std::string& cls) {
    auto it = p_.flow_clinit.lower_bound({l, std::string()});
    if (it != p_.flow_clinit.end() && it->first == l) p_.flow_clinit.erase(it);
    p_.flow_clinit.insert({l, cls});
  }

  void add_biases() {
    const auto inits = with_clinit();
    // Mutual initialization (two classes whose initializers trigger each other).
    if (inits.size() >= 2 && rng_.chance(30)) {
      const std::size_t i = rng_.below(inits.size());
      const std::size_t j = (i + 1 + rng_.below(inits.size() - 1)) % inits.size();
      const auto& x = inits[i];
      const auto& y = inits[j];
      set_clinit_edge(p_.first(MethodId::clinit(x)), y);
      set_clinit_edge(p_.first(MethodId::clinit(y)), x);
    }
    // An initializer that touches its own class.
    if (!inits.empty() && rng_.chance(20)) {
      const auto& x = rng_.pick(inits);
      const auto& body = *p_.body(MethodId::clinit(x));
      set_clinit_edge({MethodId::clinit(x), rng_.pick(body.points)}, x);
    }
    if (p_.flow_clinit.empty()) set_clinit_edge(p_.first(p_.entry), pick_class_for_edge());
  }

  Rng rng_;
  GeneratorBounds bounds_;
  Program p_;
  std::vector<std::string> names_;
  std::vector<FieldId> fields_;
  std::vector<MethodId> plain_;
  std::size_t next_label_ = 0;
};

}  // namespace

Program generate_program(std::uint64_t seed, const GeneratorBounds& bounds) { return Generator(seed, bounds).run(); }

}  // namespace sfi
