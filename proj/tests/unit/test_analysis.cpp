#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "sfi/analysis.hpp"
#include "sfi/checks.hpp"
#include "support/helpers.hpp"

using namespace sfi;
using testing::state;

namespace {

PointId at(const Cfg& cfg, const char* method, const char* label) {
  const std::string m(method);
  const auto dot = m.find('.');
  return *cfg.find_point({{m.substr(0, dot), m.substr(dot + 1)}, label});
}

AbstractState random_state(std::mt19937_64& rng, std::size_t nc, std::size_t nf) {
  AbstractState a{IndexSet(nc), IndexSet(nc), IndexSet(nf)};
  for (std::size_t i = 0; i < nc; ++i) {
    a.may[i] = rng() & 1;
    a.must[i] = rng() & 1;
  }
  for (std::size_t i = 0; i < nf; ++i) a.wf[i] = rng() & 1;
  return a;
}

}  // namespace

TEST_CASE("bottom and top") {
  const Cfg cfg(testing::parse_ok(
      "entry C.main\nclass A { field f }\nclass B { }\nclass C { method main { 0: return } }"));
  CHECK(bottom(cfg) == state(cfg, {}, {"A", "B", "C"}, {"A.f"}));
  CHECK(top(cfg) == state(cfg, {"A", "B", "C"}, {}, {}));
  CHECK(is_bottom(bottom(cfg)));
  CHECK(is_infeasible(bottom(cfg)));
  CHECK_FALSE(is_infeasible(top(cfg)));
  CHECK(leq(bottom(cfg), top(cfg)));
}

TEST_CASE("lattice operations on the worked example") {
  const Cfg cfg(testing::fixture("worked_example.sfi"));
  const auto out2 = state(cfg, {"A", "B"}, {"A", "B"}, {"A.f"});
  const auto out4 = state(cfg, {"A", "B"}, {"B"}, {});
  CHECK(join(out2, out4) == out4);
  CHECK(meet(out2, out4) == out2);
  CHECK(leq(out2, out4));
  CHECK_FALSE(leq(out4, out2));
}

TEST_CASE("instruction transfer") {
  const Cfg cfg(testing::fixture("worked_example.sfi"));
  const FieldIdx f = *cfg.find_field({"A", "f"});
  const auto a = state(cfg, {"A", "B"}, {"A", "B"}, {});
  CHECK(transfer_instr(InstrKind::Put, f, a) == state(cfg, {"A", "B"}, {"A", "B"}, {"A.f"}));
  CHECK(transfer_instr(InstrKind::Get, f, a) == a);
  CHECK(transfer_instr(InstrKind::Any, std::nullopt, a) == a);
  CHECK(transfer_instr(InstrKind::Return, std::nullopt, a) == a);
  CHECK_THROWS_AS(transfer_instr(InstrKind::Invoke, std::nullopt, a), std::invalid_argument);
}

TEST_CASE("call combination and initializer entry") {
  const Cfg cfg(testing::fixture("worked_example.sfi"));
  const ClassIdx A = *cfg.find_class("A");
  const ClassIdx B = *cfg.find_class("B");
  CHECK(f_call(state(cfg, {"A", "B"}, {"A", "B"}, {"A.f"}), state(cfg, {"A", "B"}, {"B"}, {})) ==
        state(cfg, {"A", "B"}, {"A", "B"}, {"A.f"}));
  CHECK(f_call(top(cfg), bottom(cfg)).may.none());
  CHECK(f_init_call(A, state(cfg, {"A", "B"}, {"A", "B"}, {"A.f"})) == bottom(cfg));
  CHECK(f_init_call(B, state(cfg, {}, {}, {})) == state(cfg, {"B"}, {"B"}, {}));
  CHECK(f_init_call(B, state(cfg, {"A"}, {"A"}, {})) == state(cfg, {"A", "B"}, {"A", "B"}, {}));
  CHECK(join(f_init_call(B, state(cfg, {}, {}, {})), f_init_call(B, state(cfg, {"A"}, {"A"}, {}))) ==
        state(cfg, {"A", "B"}, {"B"}, {}));
}

TEST_CASE("initialization transfer cases") {
  const Cfg cfg(testing::fixture("worked_example.sfi"));
  const Solution sol = solve(cfg);
  const auto full = state(cfg, {"A", "B"}, {"A", "B"}, {"A.f"});
  // A certainly not initialized yet.
  CHECK(f_init(cfg, at(cfg, "C.main", "1"), state(cfg, {}, {}, {}), sol) == full);
  // A certainly initialized.
  CHECK(f_init(cfg, at(cfg, "A.<clinit>", "8"), full, sol) == full);
  // no edge
  CHECK(f_init(cfg, at(cfg, "C.main", "0"), full, sol) == full);
  // A maybe initialized: both outcomes joined.
  const auto maybe = state(cfg, {"A"}, {}, {});
  CHECK(f_init(cfg, at(cfg, "C.main", "1"), maybe, sol) == state(cfg, {"A", "B"}, {"A"}, {}));
}

TEST_CASE("least solution of the worked example") {
  const Cfg cfg(testing::fixture("worked_example.sfi"));
  const Solution sol = solve(cfg);
  CHECK(sol.in[at(cfg, "B.<clinit>", "10")] == state(cfg, {"A", "B"}, {"B"}, {}));
  CHECK(sol.in[at(cfg, "A.<clinit>", "6")] == state(cfg, {"A"}, {"A"}, {}));
  CHECK(sol.out[at(cfg, "C.main", "1")] == state(cfg, {"A", "B"}, {"A", "B"}, {"A.f"}));
  CHECK(sol.in[at(cfg, "C.main", "5")] == state(cfg, {"A", "B"}, {"B"}, {}));
  CHECK(check_equations(cfg, sol).empty());
}

TEST_CASE("check_equations spots a perturbed solution") {
  const Cfg cfg(testing::fixture("worked_example.sfi"));
  Solution sol = solve(cfg);
  const PointId p = at(cfg, "C.main", "4");
  sol.in[p] = top(cfg);
  const auto d = check_equations(cfg, sol);
  REQUIRE_FALSE(d.empty());
  CHECK(std::any_of(d.begin(), d.end(), [&](const Discrepancy& x) { return x.point == p && x.side == EquationSide::In; }));
}

TEST_CASE("solver agrees with the reference solver") {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    CAPTURE(seed);
    const Program p = desugar_super_init(generate_program(seed, {4, 6, 30, 3}));
    const Cfg cfg(p);
    const Solution sol = solve(cfg);
    CHECK(testing::compare_with_oracle(p, cfg, sol) == "");
    CHECK(check_equations(cfg, sol).empty());
  }
  for (const char* f : {"mutual_a_first.sfi", "ctor_reads_early.sfi", "worked_example.sfi", "constants_b_first.sfi", "empty_method.sfi"}) {
    const Program p = testing::fixture(f);
    const Cfg cfg(p);
    CHECK(testing::compare_with_oracle(p, cfg, solve(cfg)) == "");
  }
}

TEST_CASE("evaluation order does not change the solution") {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const Cfg cfg(desugar_super_init(generate_program(seed, {})));
    const Solution base = solve(cfg);
    CHECK(solve(cfg, {SolveStrategy::RoundRobin, std::nullopt}) == base);
    for (std::uint64_t s = 1; s <= 3; ++s) CHECK(solve(cfg, {SolveStrategy::Worklist, s}) == base);
  }
}

TEST_CASE("lattice laws on random states") {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 500; ++i) {
    const auto a = random_state(rng, 4, 3);
    const auto b = random_state(rng, 4, 3);
    CHECK(leq(a, join(a, b)));
    CHECK(leq(meet(a, b), a));
    CHECK(join(a, b) == join(b, a));
    CHECK(meet(join(a, b), a) == a);
    CHECK(join(bottom(4, 3), a) == a);
    CHECK(meet(top(4, 3), a) == a);
    CHECK(f_call(a, a) == a);
  }
}
