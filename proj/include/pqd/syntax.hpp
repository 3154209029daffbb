#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "pqd/diagnostics.hpp"
#include "pqd/index.hpp"

namespace pqd {

struct Type;
struct Term;
struct BoxedCircuit;

using TypePtr = std::shared_ptr<const Type>;
using TermPtr = std::shared_ptr<const Term>;

/// Wire sort of a label.
enum class Sort { Qubit, Bit };

/// Identity of a circuit wire. Labels are never substituted for.
struct LabelId {
  std::uint32_t value = 0;
  friend auto operator<=>(const LabelId&, const LabelId&) = default;
};

// ---------------------------------------------------------------------------
// Types

enum class TypeKind {
  Qubit,
  Bit,
  Unit,
  Nat,
  List,    // elem
  Vec,     // elem, len
  Bang,    // elem
  LinPi,   // (binder : dom) -o cod
  Tensor,  // (binder : dom) * cod
  IntPi,   // (binder : dom) -> cod, parameter types only
  Circ,    // Circ(dom, cod)
};

/// Binder name used for non-dependent arrows and tensors.
inline constexpr std::string_view kAnon = "_";

struct Type {
  TypeKind kind;
  std::string binder;  // LinPi, Tensor, IntPi
  TypePtr dom;         // List/Vec/Bang element, Pi/Tensor domain, Circ input
  TypePtr cod;         // Pi/Tensor codomain, Circ output
  TermPtr len;         // Vec length
  Span span;
};

namespace ty {
TypePtr qubit(Span s = {});
TypePtr bit(Span s = {});
TypePtr unit(Span s = {});
TypePtr nat(Span s = {});
TypePtr list(TypePtr elem, Span s = {});
TypePtr vec(TypePtr elem, TermPtr len, Span s = {});
TypePtr bang(TypePtr inner, Span s = {});
TypePtr lin_pi(std::string binder, TypePtr dom, TypePtr cod, Span s = {});
TypePtr tensor(std::string binder, TypePtr dom, TypePtr cod, Span s = {});
TypePtr int_pi(std::string binder, TypePtr dom, TypePtr cod, Span s = {});
TypePtr circ(TypePtr in, TypePtr out, Span s = {});
/// Non-dependent shorthands.
TypePtr arrow(TypePtr dom, TypePtr cod);
TypePtr pair(TypePtr left, TypePtr right);
TypePtr of_sort(Sort sort);
}  // namespace ty

// ---------------------------------------------------------------------------
// Terms

enum class TermKind {
  Unit,
  Var,         // name
  Label,       // label, sort
  Const,       // name (built-in constructor, toNat or gate)
  Lam,         // name, type (optional binder annotation), a = body
  App,         // a b
  Lift,        // a
  Force,       // a
  ForceP,      // force' a
  Pair,        // (a, b)
  LetPair,     // let (name, name2) = a in b
  LamP,        // \' name -> a
  AppP,        // a @ b
  Box,         // box[type] a; type2 = output annotation filled by the checker
  Apply,       // apply(a, b)
  ApplyP,      // apply'(a, b)
  Boxed,       // boxed circuit value
  Case,        // case a of alts
  Ann,         // (a : type)
};

/// One alternative of a case expression: `ctor vars.. -> body`.
struct Alt {
  std::string ctor;
  std::vector<std::string> vars;
  TermPtr body;
  Span span;
};

struct Term {
  TermKind kind;
  std::string name;
  std::string name2;
  LabelId label;
  Sort sort = Sort::Qubit;
  TermPtr a;
  TermPtr b;
  TypePtr type;
  TypePtr type2;
  std::shared_ptr<const BoxedCircuit> boxed;
  std::vector<Alt> alts;
  Span span;
};

namespace tm {
TermPtr unit(Span s = {});
TermPtr var(std::string name, Span s = {});
TermPtr label(LabelId id, Sort sort, Span s = {});
TermPtr cnst(std::string name, Span s = {});
TermPtr lam(std::string x, TermPtr body, Span s = {});
TermPtr lam(std::string x, TypePtr annot, TermPtr body, Span s = {});
TermPtr app(TermPtr f, TermPtr arg, Span s = {});
TermPtr apps(TermPtr f, std::vector<TermPtr> args);
TermPtr lift(TermPtr body, Span s = {});
TermPtr force(TermPtr body, Span s = {});
TermPtr force_p(TermPtr body, Span s = {});
TermPtr pair(TermPtr l, TermPtr r, Span s = {});
TermPtr let_pair(std::string x, std::string y, TermPtr scrut, TermPtr body,
                 Span s = {});
TermPtr lam_p(std::string x, TypePtr annot, TermPtr body, Span s = {});
TermPtr app_p(TermPtr f, TermPtr arg, Span s = {});
TermPtr box(TypePtr in, TypePtr out, TermPtr body, Span s = {});
TermPtr apply(TermPtr circ, TermPtr arg, Span s = {});
TermPtr apply_p(TermPtr circ, TermPtr arg, Span s = {});
TermPtr boxed(std::shared_ptr<const BoxedCircuit> bc, Span s = {});
TermPtr case_of(TermPtr scrut, std::vector<Alt> alts, Span s = {});
TermPtr ann(TermPtr body, TypePtr type, Span s = {});
/// Succ^n Zero.
TermPtr numeral(std::uint64_t n, Span s = {});
/// Cons x1 (Cons x2 ... Nil).
TermPtr list(const std::vector<TermPtr>& elems, Span s = {});
/// VCons x1 (VCons x2 ... VNil).
TermPtr vec(const std::vector<TermPtr>& elems, Span s = {});
}  // namespace tm

/// Shallow copy of `t` with a replaced span; used by the parser.
TermPtr with_span(const TermPtr& t, Span s);

// ---------------------------------------------------------------------------
// Built-in constants

enum class ConstKind { Constructor, ToNat, Gate };

struct ConstInfo {
  std::string_view name;
  ConstKind kind;
  int arity;  // number of arguments of a saturated application
};

/// Zero, Succ, Nil, Cons, VNil, VCons, toNat, and every gate name.
const ConstInfo* lookup_const(std::string_view name);

/// Head constant and arguments of a (possibly partial) constant application
/// built with App or AppP. Returns nullopt when the head is not a constant.
struct Spine {
  const ConstInfo* head;
  std::vector<TermPtr> args;
};
std::optional<Spine> const_spine(const TermPtr& t);

/// Value of a closed numeral Succ^n Zero, if `t` is one.
std::optional<std::uint64_t> as_numeral(const TermPtr& t);

// ---------------------------------------------------------------------------
// Contexts

/// A context entry is a variable or a label.
using Name = std::variant<std::string, LabelId>;

std::string to_string(const Name& n);

struct Binding {
  Name name;
  Index index = Index::One;
  TypePtr type;
};

/// Ordered bindings. Later entries may mention earlier variables in types.
using Context = std::vector<Binding>;

/// Pointwise index sum. Throws MismatchedContexts when the contexts do not
/// bind the same names and types in order, LinearityViolation when a
/// non-parameter type would receive ω.
Context ctx_add(const Context& g1, const Context& g2);
/// Pointwise index scaling; same ω check as ctx_add.
Context ctx_scale(Index k, const Context& g);

// ---------------------------------------------------------------------------
// Predicates and structural operations

bool is_parameter_type(const TypePtr& a);
bool is_simple_type(const TypePtr& a);
bool is_parameter_term(const TermPtr& m);
/// Values of the call-by-value semantics, including constructor
/// applications to values and pairs of values.
bool is_value(const TermPtr& m);

struct FreeNames {
  std::set<std::string> vars;
  std::set<LabelId> labels;
};

FreeNames free_names(const TermPtr& m);
FreeNames free_names(const TypePtr& a);
bool occurs_free(const std::string& x, const TermPtr& m);
bool occurs_free(const std::string& x, const TypePtr& a);

/// Capture-avoiding substitution of `replacement` for free occurrences of `x`.
TermPtr subst(const TermPtr& body, const std::string& x,
              const TermPtr& replacement);
TypePtr subst(const TypePtr& body, const std::string& x,
              const TermPtr& replacement);

/// Equality up to renaming of bound variables. Labels compare by identity.
bool alpha_eq(const TermPtr& a, const TermPtr& b);
bool alpha_eq(const TypePtr& a, const TypePtr& b);

/// A variable name based on `base` that is not in `avoid`.
std::string fresh_name(const std::string& base,
                       const std::set<std::string>& avoid);

/// Labels of a simple term in left-to-right order.
std::vector<TermPtr> interface_labels(const TermPtr& simple_term);

// ---------------------------------------------------------------------------
// Programs

/// A top-level declaration `name : type` / `name = body`. Either part may be
/// missing from the source; a missing type is inferred.
struct Declaration {
  std::string name;
  TypePtr type;
  TermPtr body;
  Span span;
};

}  // namespace pqd
