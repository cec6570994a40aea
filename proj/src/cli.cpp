#include "sfi/cli.hpp"

#include "CLI11.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>

#include "sfi/analysis.hpp"
#include "sfi/cfg.hpp"
#include "sfi/checks.hpp"
#include "sfi/frontend.hpp"
#include "sfi/model.hpp"
#include "sfi/semantics.hpp"

namespace sfi {

namespace {

struct Options {
  std::string path;
  std::string format = "table";
  std::string field_init_mode = "ignore";
  std::string implicit_super_init = "auto";
  std::string entry_class_init = "off";
  std::size_t max_depth = 32;
  std::size_t max_states = 100000;
  std::string trace;
  bool strict = false;
  std::size_t random = 0;
  std::uint64_t seed = 0;
  GeneratorBounds bounds{6, 8, 40, 4};
  bool inject_fault = false;
};

struct Failure {
  int code;
};

std::string braces(const std::vector<std::string>& items) {
  std::string s = "{";
  for (std::size_t i = 0; i < items.size(); ++i) s += (i ? "," : "") + items[i];
  return s + "}";
}

class Driver {
 public:
  Driver(const Options& opt, std::ostream& out, std::ostream& err) : opt_(opt), out_(out), err_(err) {}

  int validate_cmd() {
    const Program p = load();
    const auto violations = validate(p);
    for (const auto& v : violations)
      out_ << (v.severity() == Severity::Error ? "error" : "warning") << " " << to_string(v.kind) << " "
           << v.location.str() << ": " << v.message << "\n";
    const bool fail = has_errors(violations) || (opt_.strict && !violations.empty());
    err_ << violations.size() << " violation(s)\n";
    return fail ? kExitFindings : kExitOk;
  }

  int analyze_cmd() {
    const Cfg cfg(prepare(load()));
    const Solution sol = solve(cfg);
    if (opt_.format == "json") {
      out_ << solution_to_json(cfg, sol, read_before_write(cfg, sol));
      return kExitOk;
    }
    print_table(cfg, sol);
    return kExitOk;
  }

  int check_cmd() {
    const Cfg cfg(prepare(load()));
    const Solution sol = solve(cfg);
    const auto reads = read_before_write(cfg, sol);
    if (opt_.format == "json") {
      auto all = reads;
      for (auto& d : may_null_reads(reads)) all.push_back(std::move(d));
      out_ << solution_to_json(cfg, sol, all);
    } else {
      for (const auto& d : reads)
        out_ << to_string(d.kind) << " " << cfg.point(d.point).label.str() << " " << cfg.field(d.field).str() << ": "
             << d.detail << "\n";
      std::vector<std::string> flagged;
      for (FieldIdx f : nullness_flags(cfg, sol)) flagged.push_back(cfg.field(f).str());
      out_ << "may-null fields: " << braces(flagged) << "\n";
    }
    return reads.empty() ? kExitOk : kExitFindings;
  }

  int run_cmd() {
    const Cfg cfg(prepare(load()));
    if (!opt_.trace.empty()) return print_trace(cfg);
    const auto result = explore(cfg, limits());
    IndexSet seen(cfg.num_classes());
    for (const auto& s : result.visited) seen |= s.history;
    std::string limit = "none";
    if (result.depth_limit_hit && result.state_limit_hit)
      limit = "depth,states";
    else if (result.depth_limit_hit)
      limit = "depth";
    else if (result.state_limit_hit)
      limit = "states";
    out_ << "visited: " << result.visited.size() << "\n"
         << "complete: " << (result.complete() ? "true" : "false") << "\n"
         << "limits_hit: " << limit << "\n"
         << "final: " << result.final.size() << "\n"
         << "stuck: " << result.stuck.size() << "\n"
         << "initialized: " << braces(cfg.class_names(seen)) << "\n";
    std::set<std::vector<std::string>> histories;
    for (const auto& s : result.final) histories.insert(cfg.class_names(s.history));
    for (const auto& h : histories) out_ << "final history: " << braces(h) << "\n";
    return kExitOk;
  }

  int verify_cmd() {
    SoundnessReport total;
    if (opt_.random > 0) {
      for (std::size_t i = 0; i < opt_.random; ++i) {
        const Program p = desugar_super_init(generate_program(opt_.seed + i, opt_.bounds));
        total.merge(verify_one(Cfg(p)));
      }
    } else {
      total = verify_one(Cfg(prepare(load())));
    }
    const auto complete = std::count(total.exploration_complete.begin(), total.exploration_complete.end(), true);
    out_ << "programs_checked: " << total.programs_checked << "\n"
         << "states_checked: " << total.states_checked << "\n"
         << "complete_explorations: " << complete << "\n"
         << "violations: " << total.violations.size() << "\n";
    return total.ok() ? kExitOk : kExitInvariantBreach;
  }

 private:
  ExplorationLimits limits() const { return {opt_.max_depth, opt_.max_states}; }

  SoundnessReport verify_one(const Cfg& cfg) const {
    Solution sol = solve(cfg);
    if (opt_.inject_fault) {
      // Drop the first class of every non-empty May set.
      for (auto& a : sol.in)
        if (auto c = a.may.find_first(); c != IndexSet::npos) a.may.reset(c);
    }
    auto report = verify_soundness(cfg, sol, limits());
    for (const auto& v : report.violations)
      out_ << "violation " << to_string(v.clause) << " at " << cfg.point(v.state.point).label.str()
           << " history=" << braces(cfg.class_names(v.state.history)) << "\n";
    return report;
  }

  Program load() const {
    std::ifstream in(opt_.path, std::ios::binary);
    if (!in) {
      err_ << "sfi: cannot read " << opt_.path << "\n";
      throw Failure{kExitUsage};
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    auto result = parse(buf.str(), ParseOptions{.keep_dangling_labels = true});
    if (auto* errors = std::get_if<std::vector<ParseError>>(&result)) {
      for (const auto& e : *errors) err_ << opt_.path << ":" << e.str() << "\n";
      throw Failure{kExitUsage};
    }
    return std::get<Program>(std::move(result));
  }

  // Validates, then applies the configured desugarings.
  Program prepare(Program p) const {
    const auto violations = validate(p);
    if (has_errors(violations)) {
      for (const auto& v : violations)
        err_ << "error " << to_string(v.kind) << " " << v.location.str() << ": " << v.message << "\n";
      throw Failure{kExitFindings};
    }
    const auto mode = parse_field_init_mode(opt_.field_init_mode);
    p = desugar_field_initializers(std::move(p), *mode);
    bool super_init = opt_.implicit_super_init == "on";
    if (opt_.implicit_super_init == "auto")
      super_init = std::any_of(p.classes.begin(), p.classes.end(),
                               [](const auto& kv) { return kv.second.superclass.has_value(); });
    if (super_init) p = desugar_super_init(std::move(p));
    if (opt_.entry_class_init == "on") p = add_entry_class_init(std::move(p));
    return p;
  }

  void print_table(const Cfg& cfg, const Solution& sol) const {
    std::vector<std::vector<std::string>> rows{{"point", "instr", "in.May", "in.Must", "in.Wf", "out.May", "out.Must", "out.Wf"}};
    for (PointId id = 0; id < cfg.num_points(); ++id) {
      const auto& p = cfg.point(id);
      std::string instr;
      if (p.kind) {
        Instruction ins{*p.kind, std::nullopt};
        if (*p.kind == InstrKind::Put || *p.kind == InstrKind::Get) ins.field = cfg.field(p.field);
        instr = ins.str();
        if (p.clinit) instr += " [clinit=" + cfg.cls(*p.clinit).name + "]";
      }
      const auto& a = sol.in[id];
      const auto& b = sol.out[id];
      rows.push_back({p.label.str(), instr, braces(cfg.class_names(a.may)), braces(cfg.class_names(a.must)),
                      braces(cfg.field_names(a.wf)), braces(cfg.class_names(b.may)), braces(cfg.class_names(b.must)),
                      braces(cfg.field_names(b.wf))});
    }
    std::vector<std::size_t> width(rows.front().size(), 0);
    for (const auto& r : rows)
      for (std::size_t i = 0; i < r.size(); ++i) width[i] = std::max(width[i], r[i].size());
    for (const auto& r : rows) {
      for (std::size_t i = 0; i < r.size(); ++i) {
        if (i + 1 == r.size()) {
          out_ << r[i];
          break;
        }
        out_ << std::left << std::setw(static_cast<int>(width[i])) << r[i] << "  ";
      }
      out_ << "\n";
    }
  }

  int print_trace(const Cfg& cfg) const {
    std::vector<std::size_t> choices;
    std::stringstream ss(opt_.trace);
    for (std::string item; std::getline(ss, item, ',');) {
      try {
        std::size_t used = 0;
        choices.push_back(std::stoul(item, &used));
        if (used != item.size()) throw std::invalid_argument(item);
      } catch (const std::exception&) {
        err_ << "sfi: bad trace choice '" << item << "'\n";
        return kExitUsage;
      }
    }
    std::vector<ConcreteState> trace;
    try {
      trace = run_trace(cfg, choices);
    } catch (const TraceError& e) {
      err_ << "sfi: " << e.what() << "\n";
      return kExitUsage;
    }
    for (std::size_t i = 0; i < trace.size(); ++i) {
      const auto& s = trace[i];
      std::vector<std::string> frames;
      for (auto it = s.stack.rbegin(); it != s.stack.rend(); ++it) {
        const auto label = cfg.point(it->point).label.str();
        frames.push_back(it->marked ? "[" + label + "]" : label);
      }
      out_ << i << ": " << cfg.point(s.point).label.str() << " stack=" << braces(frames)
           << " written=" << braces(cfg.field_names(s.written)) << " history=" << braces(cfg.class_names(s.history))
           << "\n";
    }
    return kExitOk;
  }

  const Options& opt_;
  std::ostream& out_;
  std::ostream& err_;
};

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Static field initialization analyzer", "sfi"};
  app.require_subcommand(1);
  Options opt;

  auto add_file = [&](CLI::App* cmd, bool required = true) {
    auto* o = cmd->add_option("file", opt.path, "program in .sfi format");
    if (required) o->required();
  };
  auto add_desugar = [&](CLI::App* cmd) {
    cmd->add_option("--field-init-mode", opt.field_init_mode, "ignore|pre-super|post-super")
        ->check(CLI::IsMember({"ignore", "pre-super", "post-super", "pre_super", "post_super"}));
    cmd->add_option("--implicit-super-init", opt.implicit_super_init, "on|off (default: on when a class extends another)")
        ->check(CLI::IsMember({"on", "off", "auto"}));
    cmd->add_option("--entry-class-init", opt.entry_class_init, "on|off")->check(CLI::IsMember({"on", "off"}));
  };
  auto add_limits = [&](CLI::App* cmd) {
    cmd->add_option("--max-depth", opt.max_depth, "call stack depth bound")->check(CLI::PositiveNumber);
    cmd->add_option("--max-states", opt.max_states, "visited state bound")->check(CLI::PositiveNumber);
  };

  auto* validate_cmd = app.add_subcommand("validate", "check program well-formedness");
  add_file(validate_cmd);
  validate_cmd->add_flag("--strict", opt.strict, "fail on warnings too");

  auto* analyze_cmd = app.add_subcommand("analyze", "print the least dataflow solution");
  add_file(analyze_cmd);
  add_desugar(analyze_cmd);
  analyze_cmd->add_option("--format", opt.format, "table|json")->check(CLI::IsMember({"table", "json"}));

  auto* run_cmd = app.add_subcommand("run", "explore the reachable states");
  add_file(run_cmd);
  add_desugar(run_cmd);
  add_limits(run_cmd);
  run_cmd->add_option("--trace", opt.trace, "comma-separated successor choices");

  auto* check_cmd = app.add_subcommand("check", "report fields possibly read before initialization");
  add_file(check_cmd);
  add_desugar(check_cmd);
  check_cmd->add_option("--format", opt.format, "table|json")->check(CLI::IsMember({"table", "json"}));

  auto* verify_cmd = app.add_subcommand("verify", "cross-check the analysis against the interpreter");
  add_file(verify_cmd, false);
  add_desugar(verify_cmd);
  add_limits(verify_cmd);
  auto* random = verify_cmd->add_option("--random", opt.random, "number of generated programs");
  verify_cmd->add_option("--seed", opt.seed, "first generator seed");
  verify_cmd->add_option("--classes", opt.bounds.max_classes, "generator bound")->check(CLI::PositiveNumber);
  verify_cmd->add_option("--methods", opt.bounds.max_methods, "generator bound")->check(CLI::PositiveNumber);
  verify_cmd->add_option("--points", opt.bounds.max_points, "generator bound")->check(CLI::PositiveNumber);
  verify_cmd->add_option("--fields", opt.bounds.max_fields, "generator bound");
  verify_cmd->add_flag("--inject-fault", opt.inject_fault)->group("");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
    if (verify_cmd->parsed() && opt.path.empty() && random->count() == 0)
      throw CLI::ValidationError("verify", "a file or --random N is required");
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "sfi: " << e.what() << "\n";
    return kExitUsage;
  }

  Driver driver(opt, out, err);
  try {
    if (validate_cmd->parsed()) return driver.validate_cmd();
    if (analyze_cmd->parsed()) return driver.analyze_cmd();
    if (run_cmd->parsed()) return driver.run_cmd();
    if (check_cmd->parsed()) return driver.check_cmd();
    if (verify_cmd->parsed()) return driver.verify_cmd();
  } catch (const Failure& f) {
    return f.code;
  } catch (const ModelError& e) {
    err << "sfi: " << e.what() << "\n";
    return kExitFindings;
  }
  return kExitUsage;
}

}  // namespace sfi
