#pragma once

#include <fstream>
#include <initializer_list>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>

#include "sfi/analysis.hpp"
#include "sfi/cfg.hpp"
#include "sfi/frontend.hpp"
#include "support/oracle.hpp"

namespace testing {

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline std::string fixture_path(std::string_view name) { return std::string(SFI_FIXTURES) + "/" + std::string(name); }

inline sfi::Program parse_ok(std::string_view text) {
  auto r = sfi::parse(text);
  if (auto* errs = std::get_if<std::vector<sfi::ParseError>>(&r)) {
    std::string msg = "parse failed:";
    for (const auto& e : *errs) msg += " " + e.str();
    throw std::runtime_error(msg);
  }
  return std::get<sfi::Program>(std::move(r));
}

inline sfi::Program fixture(std::string_view name) { return parse_ok(read_file(fixture_path(name))); }

inline sfi::AbstractState state(const sfi::Cfg& cfg, std::initializer_list<std::string_view> may,
                                std::initializer_list<std::string_view> must,
                                std::initializer_list<std::string_view> wf) {
  return {cfg.class_set(may), cfg.class_set(must), cfg.field_set(wf)};
}

inline std::set<std::string> as_set(const std::vector<std::string>& v) { return {v.begin(), v.end()}; }

/// Compares the library solution with the reference solver on every point
/// both know about. Returns a description of the first mismatch, or "".
inline std::string compare_with_oracle(const sfi::Program& program, const sfi::Cfg& cfg, const sfi::Solution& sol) {
  oracle::Solver ref(program);
  ref.solve();
  auto convert = [&](const sfi::AbstractState& a) {
    return oracle::State{as_set(cfg.class_names(a.may)), as_set(cfg.class_names(a.must)),
                         as_set(cfg.field_names(a.wf))};
  };
  for (const auto& key : ref.points()) {
    std::optional<sfi::PointId> id;
    for (const auto& m : program.methods())
      if (m.str() == key.first) id = cfg.find_point({m, key.second});
    if (!id) {
      // Methods known only through initialization edges.
      const auto dot = key.first.find('.');
      id = cfg.find_point({{key.first.substr(0, dot), key.first.substr(dot + 1)}, key.second});
    }
    if (!id) return "point missing from compiled view: " + key.first + "/" + key.second;
    if (!(convert(sol.in[*id]) == ref.in(key))) return "in mismatch at " + key.first + "/" + key.second;
    if (!(convert(sol.out[*id]) == ref.out(key))) return "out mismatch at " + key.first + "/" + key.second;
  }
  return "";
}

}  // namespace testing
