// Dense, immutable view of a validated Program shared by the interpreter and
// the dataflow solver. Classes, fields, methods and points get contiguous
// indices in sorted order, so index order is also output order.

#pragma once

#include <boost/dynamic_bitset.hpp>

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sfi/model.hpp"

namespace sfi {

using PointId = std::uint32_t;
using ClassIdx = std::uint32_t;
using FieldIdx = std::uint32_t;
using MethodIdx = std::uint32_t;

/// Set of classes or fields, indexed like the owning Cfg.
using IndexSet = boost::dynamic_bitset<>;

struct PointInfo {
  PointLabel label;
  MethodIdx method = 0;
  std::optional<InstrKind> kind;  // empty for method exits
  FieldIdx field = 0;             // meaningful for Put and Get
  std::optional<ClassIdx> clinit;
  std::vector<PointId> succ;  // sorted
  std::vector<PointId> pred;  // sorted
  std::vector<MethodIdx> callees;
  bool is_last = false;
};

struct MethodInfo {
  MethodId id;
  PointId first = 0;
  PointId last = 0;
  std::optional<ClassIdx> clinit_of;
  std::vector<PointId> callers;  // invoke points with an edge to this method
  bool implicit = false;         // materialized empty body
};

struct ClassInfo {
  std::string name;
  std::optional<MethodIdx> clinit;
  std::vector<PointId> init_sites;  // points whose initialization edge names this class
};

class Cfg {
 public:
  /// Throws ModelError when `program` has error-grade violations.
  explicit Cfg(const Program& program);

  std::size_t num_points() const { return points_.size(); }
  std::size_t num_classes() const { return classes_.size(); }
  std::size_t num_fields() const { return fields_.size(); }
  std::size_t num_methods() const { return methods_.size(); }

  const PointInfo& point(PointId id) const { return points_.at(id); }
  const MethodInfo& method(MethodIdx id) const { return methods_.at(id); }
  const ClassInfo& cls(ClassIdx id) const { return classes_.at(id); }
  const FieldId& field(FieldIdx id) const { return fields_.at(id); }
  std::span<const PointInfo> points() const { return points_; }

  MethodIdx entry() const { return entry_; }
  PointId entry_point() const { return methods_[entry_].first; }

  std::optional<PointId> find_point(const PointLabel& label) const;
  std::optional<ClassIdx> find_class(std::string_view name) const;
  std::optional<FieldIdx> find_field(const FieldId& f) const;
  std::optional<MethodIdx> find_method(const MethodId& m) const;

  /// Clinit method of a class; classes initialized without a declared body
  /// get an implicit one consisting of a single return.
  MethodIdx clinit_of(ClassIdx c) const { return *classes_.at(c).clinit; }

  IndexSet class_set(std::initializer_list<std::string_view> names) const;
  IndexSet field_set(std::initializer_list<std::string_view> qualified) const;
  std::vector<std::string> class_names(const IndexSet& s) const;
  std::vector<std::string> field_names(const IndexSet& s) const;

 private:
  std::vector<PointInfo> points_;
  std::vector<MethodInfo> methods_;
  std::vector<ClassInfo> classes_;
  std::vector<FieldId> fields_;
  MethodIdx entry_ = 0;
};

}  // namespace sfi
