#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "pqd/evaluator.hpp"
#include "pqd/syntax.hpp"

namespace pqd {

/// Index actually consumed by a term, per free name.
using Usage = std::map<Name, Index>;

/// A judgment Γ ⊢ M : A accepted by the checker, with Γ's indices set to the
/// usage of M.
struct Judgment {
  Context ctx;
  TermPtr term;
  TypePtr type;
};

struct CheckOptions {
  /// Insert lift/force and primed forms where the surface program omits
  /// them. When false every rule must match the term syntactically.
  bool elaborate = true;
  std::uint64_t fuel = 1'000'000;
  /// Nesting limit for checking; deeper terms raise ResourceExhausted.
  std::size_t max_depth = 50'000;
  /// Called for every judgment accepted in non-elaborating mode.
  std::function<void(const Judgment&)> record;
};

struct Inferred {
  TermPtr term;  // elaborated term
  TypePtr type;
  Usage usage;
};

struct CheckedDecl {
  std::string name;
  TypePtr type;
  TermPtr body;
};

struct Program {
  std::vector<CheckedDecl> decls;
  Globals globals;
};

/// Kind checker, bidirectional type checker and elaborator. Top-level
/// declarations accumulate as globals available at index ω.
class Checker {
 public:
  explicit Checker(CheckOptions opts = {});

  /// Kinds every type against the shape of its prefix; ω only on parameter
  /// types.
  void wf_context(const Context& g) const;

  /// Checks Φ ⊢ A : * and returns A with embedded terms elaborated (the
  /// identity when elaboration is off).
  TypePtr kind_check(const Context& phi, const TypePtr& a) const;

  /// Infers the type of `m`. Linear bindings of `g` must be consumed exactly
  /// as their indices say; indices of parameter bindings are not checked.
  Inferred type_infer(const Context& g, const TermPtr& m) const;
  Inferred type_check(const Context& g, const TermPtr& m, const TypePtr& a) const;

  /// Equality after normalizing embedded parameter terms.
  bool type_eq(const Context& phi, const TypePtr& a, const TypePtr& b) const;

  /// Elaborates `m`, optionally against `expected`, regardless of the
  /// elaborate option.
  TermPtr elaborate(const Context& g, const TermPtr& m, const TypePtr& expected) const;

  /// Checks one declaration and adds it to the globals.
  CheckedDecl check_declaration(const Declaration& d);

  void add_global(const std::string& name, TypePtr type, TermPtr body);
  const Globals& globals() const { return bodies_; }
  const std::map<std::string, TypePtr>& global_types() const { return types_; }
  const CheckOptions& options() const { return opts_; }

 private:
  CheckOptions opts_;
  std::map<std::string, TypePtr> types_;
  Globals bodies_;
};

/// Checks declarations in order: elaboration, then a non-elaborating recheck
/// of the result.
Program check_program(const std::vector<Declaration>& decls, CheckOptions opts = {});

}  // namespace pqd
