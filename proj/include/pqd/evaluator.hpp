#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>

#include "pqd/circuit.hpp"
#include "pqd/syntax.hpp"

namespace pqd {

/// Bodies of checked top-level declarations, unfolded on demand.
using Globals = std::map<std::string, TermPtr>;

struct EvalOptions {
  std::uint64_t fuel = 1'000'000;  // rule applications per run
  std::size_t max_depth = 5000;    // nesting of evaluation premises
};

/// A circuit under construction, the term being run against it, and the
/// label supply shared by both.
struct Configuration {
  Circuit circuit;
  TermPtr term;
  LabelSupply supply;
};

/// Big-step call-by-value evaluator. Premises are evaluated left to right.
/// Open terms are allowed: an elimination whose principal argument is neutral
/// is returned stuck instead of failing.
class Evaluator {
 public:
  Evaluator(const Globals* globals, LabelSupply& supply, EvalOptions opts = {});

  /// Evaluates `m` against `c`, appending gates to `c` as it goes.
  TermPtr eval(Circuit& c, const TermPtr& m);

  /// Evaluates a parameter term and asserts that `c` is left unchanged.
  /// Throws EvalError(CircuitMutated) otherwise.
  TermPtr eval_param(const Circuit& c, const TermPtr& m);

  /// Evaluates every embedded term of `a`. Names in `opaque` are treated as
  /// free variables even when a global of the same name exists.
  TypePtr normalize_type(const TypePtr& a, const std::set<std::string>& opaque = {});
  TermPtr normalize_term(const TermPtr& m, const std::set<std::string>& opaque = {});

  std::uint64_t steps() const { return steps_; }

 private:
  TermPtr run(Circuit& c, const TermPtr& m);
  TermPtr apply_value(Circuit& c, const TermPtr& head, const TermPtr& arg,
                      bool primed, const Span& span);
  TermPtr eval_box(Circuit& c, const TermPtr& m);
  TypePtr normalize_type_in(const TypePtr& a);
  void tick(const Span& span);

  const Globals* globals_;
  LabelSupply& supply_;
  EvalOptions opts_;
  std::set<std::string> opaque_;
  std::uint64_t steps_ = 0;
  std::size_t depth_ = 0;
};

/// Convenience wrappers over a configuration.
Configuration eval(Configuration cfg, const Globals* globals = nullptr,
                   EvalOptions opts = {});
Configuration eval_param(Configuration cfg, const Globals* globals = nullptr,
                         EvalOptions opts = {});

struct RunResult {
  Configuration final;
  std::optional<BoxedCircuit> circuit;  // set when main yields a boxed circuit
};

/// Evaluates the global `main` in the empty circuit with a fresh supply.
/// Throws EvalError(NoMain) when it is absent.
RunResult run_main(const Globals& globals, EvalOptions opts = {});

}  // namespace pqd
