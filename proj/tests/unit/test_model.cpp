#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>

#include "sfi/model.hpp"
#include "support/helpers.hpp"

using namespace sfi;
using testing::parse_ok;

namespace {

std::vector<ViolationKind> kinds(const Program& p) {
  std::vector<ViolationKind> out;
  for (const auto& v : validate(p)) out.push_back(v.kind);
  return out;
}

bool contains(const std::vector<ViolationKind>& ks, ViolationKind k) { return std::find(ks.begin(), ks.end(), k) != ks.end(); }

const char* kMinimal = "entry C.main\nclass C { method main { 0: return } }";

}  // namespace

TEST_CASE("natural label order puts numbers first and end last") {
  CHECK(label_less("2", "10"));
  CHECK_FALSE(label_less("10", "2"));
  CHECK(label_less("10", "a"));
  CHECK(label_less("a", "b"));
  CHECK(label_less("zz", "end"));
  CHECK(label_less("$ret", "end"));
  CHECK_FALSE(label_less("end", "end"));
}

TEST_CASE("labels and identifiers render qualified") {
  const PointLabel l{MethodId::clinit("A"), "3"};
  CHECK(l.str() == "A.<clinit>/3");
  CHECK(l.method.is_clinit());
  CHECK(Program::last({"C", "main"}).is_last());
  CHECK(PointLabel{{"C", "m"}, "$super"}.is_synthetic());
  CHECK(Instruction::put({"A", "f"}).str() == "put A.f");
  CHECK(Instruction::invoke().str() == "invoke");
}

TEST_CASE("Object as superclass counts as no superclass") {
  ClassDecl c{"A", "Object", {}, std::nullopt, {}};
  CHECK_FALSE(c.effective_superclass());
  c.superclass = "B";
  CHECK(c.effective_superclass() == "B");
}

TEST_CASE("minimal program is valid") {
  const Program p = parse_ok(kMinimal);
  CHECK(validate(p).empty());
  CHECK(p.first({"C", "main"}).local == "0");
  CHECK(p.intra_successors({{"C", "main"}, "0"}) == std::vector<PointLabel>{Program::last({"C", "main"})});
}

TEST_CASE("the worked example is valid") { CHECK(validate(testing::fixture("worked_example.sfi")).empty()); }

TEST_CASE("validator reports each violation kind") {
  const MethodId main{"C", "main"};
  const PointLabel p0{main, "0"};

  SUBCASE("return without edge to end") {
    Program p = parse_ok(kMinimal);
    p.flow_intra.clear();
    CHECK(kinds(p) == std::vector{ViolationKind::MissingReturnEdge});
  }
  SUBCASE("edge to undeclared label") {
    Program p = parse_ok(kMinimal);
    p.flow_intra.insert({p0, {main, "7"}});
    CHECK(kinds(p) == std::vector{ViolationKind::DanglingLabel});
  }
  SUBCASE("two clinit targets on one point") {
    Program p = parse_ok("entry C.main\nclass A { clinit { 0: return } }\nclass B { clinit { 0: return } }\n"
                         "class C { method main { 0: any clinit=A -> 1  1: return } }");
    p.flow_clinit.insert({p0, "B"});
    CHECK(contains(kinds(p), ViolationKind::DuplicateClinitTarget));
  }
  SUBCASE("intra edge across methods") {
    Program p = parse_ok("entry C.main\nclass C { method main { 0: any -> 1  1: return } method m { 0: return } }");
    p.flow_intra.insert({p0, {{"C", "m"}, "0"}});
    CHECK(contains(kinds(p), ViolationKind::CrossMethodIntraEdge));
  }
  SUBCASE("reference to an unknown class") {
    Program p = parse_ok(kMinimal);
    p.flow_clinit.insert({p0, "Nope"});
    CHECK(contains(kinds(p), ViolationKind::UnknownReference));
  }
  SUBCASE("invoke without callee is only a warning") {
    const Program p = parse_ok("entry C.main\nclass C { method main { 0: invoke -> 1  1: return } }");
    const auto vs = validate(p);
    REQUIRE(vs.size() == 1);
    CHECK(vs[0].kind == ViolationKind::InvokeWithoutTarget);
    CHECK(vs[0].severity() == Severity::Warning);
    CHECK_FALSE(has_errors(vs));
  }
  SUBCASE("call edge from a non-invoke point") {
    Program p = parse_ok("entry C.main\nclass C { method main { 0: any -> 1  1: return } method m { 0: return } }");
    p.flow_inter.insert({p0, {"C", "m"}});
    CHECK(contains(kinds(p), ViolationKind::MisplacedEdge));
  }
  SUBCASE("cyclic superclass chain") {
    const Program p = parse_ok("entry C.main\nclass A extends B { }\nclass B extends A { }\n"
                               "class C { method main { 0: return } }");
    CHECK(contains(kinds(p), ViolationKind::CyclicSuperclass));
    CHECK_THROWS_AS(desugar_super_init(p), ModelError);
  }
}

TEST_CASE("violations are sorted by location") {
  Program p = parse_ok("entry C.main\nclass C { method main { 0: any -> 1  1: any -> 2  2: return } }");
  p.flow_intra.insert({{{"C", "main"}, "2"}, {{"C", "main"}, "x"}});
  p.flow_intra.insert({{{"C", "main"}, "0"}, {{"C", "main"}, "y"}});
  const auto vs = validate(p);
  REQUIRE(vs.size() == 2);
  CHECK(vs[0].location < vs[1].location);
}

TEST_CASE("field init mode spellings") {
  CHECK(parse_field_init_mode("ignore") == FieldInitMode::Ignore);
  CHECK(parse_field_init_mode("pre-super") == FieldInitMode::PreSuper);
  CHECK(parse_field_init_mode("post_super") == FieldInitMode::PostSuper);
  CHECK_FALSE(parse_field_init_mode("sideways"));
}

TEST_CASE("implicit superclass initialization") {
  const Program p = parse_ok(
      "entry C.main\n"
      "class S { clinit { 0: return } }\n"
      "class A extends S { clinit { 0: any -> 1  1: return } }\n"
      "class E extends S { }\n"
      "class C { method main { 0: any clinit=A -> 1  1: return } }");
  const Program d = desugar_super_init(p);
  const MethodId a = MethodId::clinit("A");
  CHECK(d.body(a)->points == std::vector<std::string>{"$super", "0", "1"});
  CHECK(d.clinit_target({a, "$super"}) == "S");
  CHECK(d.intra_successors({a, "$super"}) == std::vector<PointLabel>{{a, "0"}});
  CHECK(d.first(a).local == "$super");
  CHECK(d.body(MethodId::clinit("E"))->points == std::vector<std::string>{"$super", "$ret"});
  CHECK(d.body(MethodId::clinit("S"))->points == std::vector<std::string>{"0"});
  CHECK(validate(d).empty());
  CHECK(desugar_super_init(d) == d);
}

TEST_CASE("field initializers before or after the superclass edge") {
  const Program p = parse_ok(
      "entry C.main\n"
      "class S { }\n"
      "class A extends S { field x init  field y  clinit { 0: return } }\n"
      "class C { method main { 0: get A.x clinit=A -> 1  1: return } }");
  const MethodId a = MethodId::clinit("A");

  const Program pre = desugar_super_init(desugar_field_initializers(p, FieldInitMode::PreSuper));
  CHECK(pre.body(a)->points == std::vector<std::string>{"$fpre_x", "$super", "0"});
  CHECK(pre.instr.at({a, "$fpre_x"}) == Instruction::put({"A", "x"}));

  const Program post = desugar_field_initializers(desugar_super_init(p), FieldInitMode::PostSuper);
  CHECK(post.body(a)->points == std::vector<std::string>{"$super", "$fpost_x", "0"});
  CHECK(post.intra_successors({a, "$super"}) == std::vector<PointLabel>{{a, "$fpost_x"}});
  CHECK(validate(post).empty());

  CHECK(desugar_field_initializers(p, FieldInitMode::Ignore) == p);
}

TEST_CASE("field initializers create a missing clinit") {
  const Program p = parse_ok("entry C.main\nclass A { field x init }\nclass C { method main { 0: return } }");
  const Program d = desugar_field_initializers(p, FieldInitMode::PostSuper);
  CHECK(d.body(MethodId::clinit("A"))->points == std::vector<std::string>{"$fpost_x", "$ret"});
  CHECK(validate(d).empty());
}

TEST_CASE("entry class initialization") {
  const Program d = add_entry_class_init(parse_ok(kMinimal));
  const MethodId main{"C", "main"};
  CHECK(d.first(main).local == "$entry");
  CHECK(d.clinit_target({main, "$entry"}) == "C");
  CHECK(add_entry_class_init(d) == d);
  CHECK(validate(d).empty());
}
