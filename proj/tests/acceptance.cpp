// Acceptance suite: one PASS/FAIL line per criterion.

#include <algorithm>
#include <chrono>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>

#include "pqd/checker.hpp"
#include "pqd/evaluator.hpp"
#include "pqd/frontend.hpp"
#include "pqd/shape.hpp"
#include "pqd/stack.hpp"
#include "support.hpp"

using namespace pqd;
namespace ts = pqd::tsupport;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

CheckOptions strict_opts() {
  CheckOptions o;
  o.elaborate = false;
  return o;
}

/// A strict checker that knows every declaration of `p`.
Checker strict_checker(const Program& p) {
  Checker c(strict_opts());
  for (const auto& d : p.decls) c.add_global(d.name, d.type, d.body);
  return c;
}

struct CorpusEntry {
  std::string name;
  Program program;
  std::vector<Judgment> judgments;
};

const std::vector<CorpusEntry>& corpus() {
  static const std::vector<CorpusEntry> entries = [] {
    std::vector<CorpusEntry> out;
    for (const auto& path : ts::corpus_files()) {
      CorpusEntry e;
      e.name = path.filename().string();
      CheckOptions o;
      o.record = [&e](const Judgment& j) { e.judgments.push_back(j); };
      e.program = ts::load_program(path, o);
      out.push_back(std::move(e));
    }
    return out;
  }();
  return entries;
}

const CheckedDecl* find_decl(const Program& p, const std::string& name) {
  for (const auto& d : p.decls)
    if (d.name == name) return &d;
  return nullptr;
}

// ---------------------------------------------------------------------------
// 1. Index semiring

int count_of(Index k) { return k == Index::Zero ? 0 : k == Index::One ? 1 : 2; }
Index index_of(int n) {
  n = std::min(n, 2);
  return n == 0 ? Index::Zero : n == 1 ? Index::One : Index::Omega;
}

Outcome index_semiring() {
  auto t0 = Clock::now();
  int checks = 0, failures = 0;
  auto expect = [&](bool ok) {
    ++checks;
    if (!ok) ++failures;
  };
  for (Index a : kAllIndices)
    for (Index b : kAllIndices) {
      expect((a + b) == index_of(count_of(a) + count_of(b)));
      expect((a * b) == index_of(count_of(a) * count_of(b)));
      expect((a + b) == (b + a) && (a * b) == (b * a));
      for (Index c : kAllIndices) {
        expect(((a + b) + c) == (a + (b + c)));
        expect(((a * b) * c) == (a * (b * c)));
        expect((a * (b + c)) == (a * b + a * c));
        expect(((a + b) * c) == (a * c + b * c));
      }
    }
  for (Index a : kAllIndices) {
    expect((Index::Zero + a) == a);
    expect((Index::One * a) == a);
    expect((Index::Zero * a) == Index::Zero);
  }
  double secs = seconds_since(t0);
  std::ostringstream d;
  d << checks << " laws checked, " << failures << " failures, " << secs << " s";
  return {failures == 0 && secs < 1.0, d.str()};
}

// ---------------------------------------------------------------------------
// 2. Shape laws

Outcome shape_laws() {
  std::mt19937 rng(ts::kSeed);
  int failures = 0, fixed = 0;
  for (int i = 0; i < 1000; ++i) {
    auto a = ts::random_type(rng);
    auto sa = shape_type(a);
    if (!alpha_eq(shape_type(sa), sa) || !is_parameter_type(sa)) ++failures;
    if (is_parameter_type(a)) {
      ++fixed;
      if (!alpha_eq(sa, a)) ++failures;
    }
    auto m = ts::random_term(rng);
    auto sm = shape_term(m);
    if (!alpha_eq(shape_term(sm), sm) || !is_parameter_term(sm)) ++failures;
    if (is_parameter_term(m)) {
      ++fixed;
      if (!alpha_eq(sm, m)) ++failures;
    }
    auto r = ts::random_param_value(rng);
    ++fixed;
    if (!alpha_eq(shape_term(r), r)) ++failures;
  }
  std::ostringstream d;
  d << "1000 types + 1000 terms, " << fixed << " parameter fixed points, " << failures
    << " failures";
  return {failures == 0, d.str()};
}

// ---------------------------------------------------------------------------
// 3. Shape-typing commutation

Outcome shape_typing() {
  std::size_t judgments = 0, failures = 0;
  std::string first;
  for (const auto& e : corpus()) {
    Checker c = strict_checker(e.program);
    for (const auto& j : e.judgments) {
      ++judgments;
      try {
        c.type_check(shape_ctx(j.ctx), shape_term(j.term), shape_type(j.type));
      } catch (const Diagnostic& d) {
        if (failures++ == 0)
          first = e.name + ": " + print_term(shape_term(j.term)) + ": " + d.what();
      }
    }
  }
  bool has_required = true;
  for (const char* f : {"conv.pqd", "unbox.pqd", "gates.pqd", "all_h.pqd"})
    has_required = has_required && std::any_of(corpus().begin(), corpus().end(),
                                               [&](const CorpusEntry& e) { return e.name == f; });
  std::ostringstream d;
  d << corpus().size() << " programs, " << judgments << " judgments, " << failures
    << " failures";
  if (!first.empty()) d << " (first: " << first << ")";
  return {failures == 0 && corpus().size() >= 30 && has_required && judgments > 0, d.str()};
}

// ---------------------------------------------------------------------------
// 4. Type preservation

Context label_context(const TermPtr& v) {
  Context g;
  std::function<void(const TermPtr&)> walk = [&](const TermPtr& m) {
    if (!m) return;
    if (m->kind == TermKind::Label) {
      bool seen = std::any_of(g.begin(), g.end(),
                              [&](const Binding& b) { return b.name == Name{m->label}; });
      if (!seen) g.push_back(Binding{m->label, Index::One, ty::of_sort(m->sort)});
    }
    walk(m->a);
    walk(m->b);
    for (const auto& alt : m->alts) walk(alt.body);
  };
  walk(v);
  return g;
}

Outcome type_preservation() {
  auto t0 = Clock::now();
  std::size_t checked = 0, failures = 0;
  std::string first;
  for (const auto& e : corpus()) {
    const auto* main = find_decl(e.program, "main");
    if (!main) continue;
    ++checked;
    try {
      auto r = run_main(e.program.globals);
      Checker c = strict_checker(e.program);
      c.type_check(label_context(r.final.term), r.final.term, main->type);
    } catch (const Diagnostic& d) {
      if (failures++ == 0) first = e.name + ": " + d.what();
    }
  }
  double secs = seconds_since(t0);
  std::ostringstream d;
  d << checked << " mains re-checked, " << failures << " failures, " << secs << " s";
  if (!first.empty()) d << " (first: " << first << ")";
  return {failures == 0 && checked == corpus().size() && secs < 10.0, d.str()};
}

// ---------------------------------------------------------------------------
// 5. Circuit invariance of parameter evaluation

void parameter_subterms(const TermPtr& m, std::vector<TermPtr>& out);

void parameter_subterms(const TypePtr& a, std::vector<TermPtr>& out) {
  if (!a) return;
  parameter_subterms(a->dom, out);
  parameter_subterms(a->cod, out);
  if (a->len) parameter_subterms(a->len, out);
}

void parameter_subterms(const TermPtr& m, std::vector<TermPtr>& out) {
  if (!m) return;
  if (is_parameter_term(m)) out.push_back(m);
  parameter_subterms(m->a, out);
  parameter_subterms(m->b, out);
  parameter_subterms(m->type, out);
  parameter_subterms(m->type2, out);
  for (const auto& alt : m->alts) parameter_subterms(alt.body, out);
}

Outcome circuit_invariance() {
  // A host circuit with live wires and an existing gate.
  LabelSupply host_supply;
  auto iface = tm::pair(tm::label(host_supply.fresh(), Sort::Qubit),
                        tm::label(host_supply.fresh(), Sort::Qubit));
  auto h = gate_circuit(*lookup_gate("H"), host_supply);
  Circuit host = append(identity_circuit(iface), iface->a, h, host_supply).circuit;

  std::size_t subterms = 0, mutated = 0, errors = 0;
  std::string first;
  for (const auto& e : corpus()) {
    std::vector<TermPtr> terms;
    for (const auto& d : e.program.decls) {
      parameter_subterms(d.body, terms);
      parameter_subterms(shape_term(d.body), terms);
      parameter_subterms(d.type, terms);
    }
    for (const auto& t : terms) {
      ++subterms;
      Circuit c = host;
      LabelSupply s = host_supply;
      Evaluator ev(&e.program.globals, s, EvalOptions{100'000, 2000});
      try {
        ev.eval(c, t);
      } catch (const Diagnostic& d) {
        ++errors;
      }
      if (!(c == host) && mutated++ == 0) first = e.name + ": " + print_term(t);
      // The evaluator's own assertion must agree.
      try {
        Evaluator ev2(&e.program.globals, s, EvalOptions{100'000, 2000});
        ev2.eval_param(host, t);
      } catch (const EvalError& d) {
        if (d.kind() == ErrorKind::CircuitMutated && mutated++ == 0)
          first = e.name + ": " + print_term(t);
      } catch (const Diagnostic&) {
      }
    }
  }
  std::ostringstream d;
  d << subterms << " parameter subterms, " << mutated << " changed the circuit, " << errors
    << " stopped on open or divergent terms";
  if (!first.empty()) d << " (first: " << first << ")";
  return {mutated == 0 && subterms > 0, d.str()};
}

// ---------------------------------------------------------------------------
// 6. conv

Outcome conv() {
  auto path = std::filesystem::path(PQD_SOURCE_DIR) / "programs" / "conv.pqd";
  auto p = ts::load_program(path);
  const auto* d = find_decl(p, "conv");
  if (!d) return {false, "conv.pqd has no conv declaration"};
  std::string type = print_type(d->type);
  if (type != "!((x : List Qubit) -o Vec Qubit (toNat x))")
    return {false, "conv has type " + type};
  auto r = run_main(p.globals);
  if (!r.circuit) return {false, "main did not produce a circuit"};
  auto distinct = [](const TermPtr& t) {
    auto ws = interface_wires(t);
    std::set<LabelId> ids;
    for (const auto& w : ws) ids.insert(w.id);
    return ws.size() == 3 && ids.size() == 3;
  };
  bool ok = distinct(r.circuit->in) && distinct(r.circuit->out);
  validate(r.circuit->circuit);
  return {ok, "conv : " + type + "; boxed on 3 qubits: " +
                  print_term(r.circuit->in) + " => " + print_term(r.circuit->out)};
}

// ---------------------------------------------------------------------------
// 7. allH family

Outcome all_h() {
  auto path = std::filesystem::path(PQD_SOURCE_DIR) / "programs" / "all_h.pqd";
  std::string src = ts::read_file(path);
  auto at = src.find("main = ");
  if (at == std::string::npos) return {false, "all_h.pqd has no main"};
  std::string base = src.substr(0, at);
  std::ostringstream d;
  bool ok = true;
  for (unsigned n : {0u, 1u, 4u, 8u}) {
    auto p = check_program(parse_program(base + "main = allH " + std::to_string(n) + "\n"));
    const auto* decl = find_decl(p, "allH");
    if (!decl || print_type(decl->type) != "!((n : Nat) -o Circ(Vec Qubit n, Vec Qubit n))")
      return {false, "allH has the wrong type"};
    auto r1 = run_main(p.globals);
    auto r2 = run_main(p.globals);
    if (!r1.circuit || !r2.circuit) return {false, "main is not a circuit"};
    std::map<std::string, std::size_t> expect;
    if (n > 0) expect["H"] = n;
    bool counts = gate_count(r1.circuit->circuit) == expect;
    bool stable = export_text(*r1.circuit) == export_text(*r2.circuit);
    ok = ok && counts && stable;
    d << "n=" << n << (counts ? " count ok" : " count WRONG") << (stable ? "/stable; " : "/UNSTABLE; ");
  }
  return {ok, d.str()};
}

// ---------------------------------------------------------------------------
// 8. Adequacy up to relabeling

bool same_up_to_labels(const BoxedCircuit& a, const BoxedCircuit& b) {
  auto x = canonical_relabel(a);
  auto y = canonical_relabel(b);
  return x.circuit == y.circuit && alpha_eq(x.in, y.in) && alpha_eq(x.out, y.out);
}

std::optional<BoxedCircuit> main_circuit(const std::string& src) {
  return run_main(check_program(parse_program(src)).globals).circuit;
}

Outcome adequacy() {
  std::size_t boxed_twice = 0, reversed = 0, failures = 0;
  std::string first;
  auto fail = [&](const std::string& why) {
    if (failures++ == 0) first = why;
  };
  for (const auto& e : corpus()) {
    auto it = e.program.globals.find("main");
    if (it == e.program.globals.end()) continue;
    LabelSupply s;
    Evaluator ev(&e.program.globals, s);
    Circuit c1, c2;
    auto v1 = ev.eval(c1, tm::var("main"));
    auto v2 = ev.eval(c2, tm::var("main"));
    if (v1->kind != TermKind::Boxed) continue;
    ++boxed_twice;
    if (v2->kind != TermKind::Boxed || !same_up_to_labels(*v1->boxed, *v2->boxed))
      fail(e.name + ": boxing twice differs");
    try {
      auto r = reverse(*v1->boxed);
      validate(r.circuit);
      ++reversed;
      if (!same_up_to_labels(reverse(r), *v1->boxed)) fail(e.name + ": reverse twice differs");
    } catch (const CircuitError& err) {
      if (err.kind() != ErrorKind::NotReversible) fail(e.name + ": " + err.what());
    }
  }
  // Semantically equal programs written differently.
  const std::vector<std::pair<std::string, std::string>> pairs{
      {"main = box[Qubit] (\\q -> apply(H, q))\n",
       "unbox : !(Circ(Qubit, Qubit) -o !(Qubit -o Qubit))\n"
       "unbox = \\c -> lift (\\s -> apply(c, s))\n"
       "main = box[Qubit] (unbox H)\n"},
      {"main = box[Qubit] (\\q -> apply(H, apply(S, apply(H, q))))\n",
       "seq : !(Circ(Qubit, Qubit) -o Circ(Qubit, Qubit) -o Circ(Qubit, Qubit))\n"
       "seq = \\c d -> box[Qubit] (\\q -> apply(d, apply(c, q)))\n"
       "main = seq H (seq S H)\n"},
      {"main = box[Qubit * Qubit] (\\p -> let (a, b) = p in apply(CNOT, (apply(H, a), b)))\n",
       "main = box[Qubit * Qubit] (\\p -> let (a, b) = p in CNOT (H a, b))\n"},
  };
  std::size_t equal_pairs = 0;
  for (const auto& [a, b] : pairs) {
    auto ca = main_circuit(a);
    auto cb = main_circuit(b);
    if (ca && cb && same_up_to_labels(*ca, *cb))
      ++equal_pairs;
    else
      fail("equivalent programs differ: " + a);
  }
  std::ostringstream d;
  d << boxed_twice << " mains boxed twice, " << reversed << " reversible circuits reversed twice, "
    << equal_pairs << "/" << pairs.size() << " equivalent program pairs, " << failures
    << " failures";
  if (!first.empty()) d << " (first: " << first << ")";
  return {failures == 0 && boxed_twice > 0 && reversed > 0, d.str()};
}

// ---------------------------------------------------------------------------
// 9. Negative suite

Outcome negatives() {
  std::size_t total = 0, ok = 0;
  std::string first;
  std::set<std::string> kinds;
  for (const auto& path : ts::negative_files()) {
    auto c = ts::read_negative(path);
    ++total;
    std::string got = "accepted";
    try {
      CheckOptions o;
      o.elaborate = !c.strict;
      check_program(parse_program(c.source), o);
    } catch (const Diagnostic& d) {
      got = std::string(to_string(d.kind())) + " " + std::to_string(d.span().line);
      if (d.span().valid() && to_string(d.kind()) == c.kind && d.span().line == c.line) {
        ++ok;
        kinds.insert(c.kind);
        continue;
      }
    }
    if (first.empty())
      first = path.filename().string() + ": expected " + c.kind + " " +
              std::to_string(c.line) + ", got " + got;
  }
  bool categories = true;
  for (const char* f : {"dup_qubit.pqd", "omega_linear.pqd", "lift_linear.pqd",
                        "nonparam_in_type.pqd", "box_nonsimple.pqd",
                        "apply_interface_mismatch.pqd"})
    categories = categories && std::filesystem::exists(
                                   std::filesystem::path(PQD_SOURCE_DIR) / "tests" / "negative" / f);
  std::ostringstream d;
  d << ok << "/" << total << " rejected with the expected kind and line, " << kinds.size()
    << " distinct kinds";
  if (!first.empty()) d << " (first mismatch: " << first << ")";
  return {total >= 10 && ok == total && categories, d.str()};
}

// ---------------------------------------------------------------------------
// 10. Substitution

/// A closed value of `a` whose labels come from `supply`, or null when none is
/// generated for this type.
TermPtr value_of(const TypePtr& a, std::mt19937& rng, LabelSupply& supply) {
  switch (a->kind) {
    case TypeKind::Unit: return tm::unit();
    case TypeKind::Nat: return tm::numeral(rng() % 4);
    case TypeKind::Qubit: return tm::label(supply.fresh(), Sort::Qubit);
    case TypeKind::Bit: return tm::label(supply.fresh(), Sort::Bit);
    case TypeKind::List: {
      std::vector<TermPtr> xs;
      for (auto n = rng() % 3; n > 0; --n) {
        auto x = value_of(a->dom, rng, supply);
        if (!x) return nullptr;
        xs.push_back(x);
      }
      return tm::list(xs);
    }
    case TypeKind::Vec: {
      auto n = as_numeral(a->len);
      if (!n) return nullptr;
      std::vector<TermPtr> xs;
      for (auto i = *n; i > 0; --i) {
        auto x = value_of(a->dom, rng, supply);
        if (!x) return nullptr;
        xs.push_back(x);
      }
      return tm::vec(xs);
    }
    case TypeKind::Tensor: {
      auto l = value_of(a->dom, rng, supply);
      if (!l) return nullptr;
      auto r = value_of(subst(a->cod, a->binder, shape_term(l)), rng, supply);
      return r ? tm::pair(l, r) : nullptr;
    }
    case TypeKind::Circ: {
      if (!alpha_eq(a->dom, a->cod)) {
        if (alpha_eq(a->dom, ty::qubit()) && alpha_eq(a->cod, ty::bit()))
          return tm::boxed(std::make_shared<BoxedCircuit>(
              gate_circuit(*lookup_gate("Meas"), supply)));
        return nullptr;
      }
      if (alpha_eq(a->dom, ty::qubit()))
        return tm::boxed(std::make_shared<BoxedCircuit>(gate_circuit(*lookup_gate("H"), supply)));
      try {
        auto in = gen(a->dom, supply);
        return tm::boxed(std::make_shared<BoxedCircuit>(
            BoxedCircuit{in, identity_circuit(in), in, a->dom, a->cod}));
      } catch (const CircuitError&) {
        return nullptr;
      }
    }
    default:
      return nullptr;
  }
}

Outcome substitution() {
  struct Candidate {
    const CorpusEntry* entry;
    const Judgment* j;
    std::size_t pos;
  };
  std::vector<Candidate> candidates;
  for (const auto& e : corpus())
    for (const auto& j : e.judgments)
      for (std::size_t i = 0; i < j.ctx.size(); ++i) {
        const auto& b = j.ctx[i];
        if (!std::holds_alternative<std::string>(b.name)) continue;
        if (!free_names(b.type).vars.empty()) continue;
        candidates.push_back({&e, &j, i});
      }
  std::mt19937 rng(ts::kSeed);
  std::shuffle(candidates.begin(), candidates.end(), rng);

  std::size_t param = 0, value = 0, attempts = 0, failures = 0;
  std::string first;
  std::map<const CorpusEntry*, Checker> checkers;
  for (std::size_t k = 0; param + value < 200 && attempts < 20 * candidates.size(); ++k) {
    ++attempts;
    const auto& c = candidates[k % candidates.size()];
    const Binding& x = c.j->ctx[c.pos];
    const std::string& name = std::get<std::string>(x.name);
    LabelSupply supply{1'000'000};
    TermPtr v = value_of(x.type, rng, supply);
    if (!v) continue;
    TermPtr sv = shape_term(v);

    // Γ1 + kΓ2, [Sh(V)/x]Γ' ⊢ [V/x]M : B[Sh(V)]
    Context g;
    for (const auto& l : label_context(v))
      g.push_back(Binding{l.name, x.index, l.type});
    for (std::size_t i = 0; i < c.pos; ++i) g.push_back(c.j->ctx[i]);
    for (std::size_t i = c.pos + 1; i < c.j->ctx.size(); ++i) {
      Binding b = c.j->ctx[i];
      b.type = subst(b.type, name, sv);
      g.push_back(b);
    }
    TermPtr m = subst(c.j->term, name, v);
    TypePtr t = subst(c.j->type, name, sv);
    auto it = checkers.find(c.entry);
    if (it == checkers.end()) it = checkers.emplace(c.entry, strict_checker(c.entry->program)).first;
    (is_parameter_type(x.type) ? param : value)++;
    try {
      it->second.type_check(g, m, t);
    } catch (const Diagnostic& d) {
      if (failures++ == 0)
        first = c.entry->name + ": [" + print_term(v) + "/" + name + "]" + print_term(c.j->term) +
                ": " + d.what();
    }
  }
  std::ostringstream d;
  d << param << " parameter-term and " << value << " value substitutions from "
    << candidates.size() << " candidate bindings, " << failures << " failures";
  if (!first.empty()) d << " (first: " << first << ")";
  return {failures == 0 && param + value >= 200 && param > 0 && value > 0, d.str()};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"index semiring", index_semiring},
      {"shape laws", shape_laws},
      {"shape-typing commutation", shape_typing},
      {"type preservation", type_preservation},
      {"circuit invariance of parameter evaluation", circuit_invariance},
      {"conv", conv},
      {"allH family reproducibility", all_h},
      {"adequacy up to relabeling", adequacy},
      {"negative suite", negatives},
      {"substitution", substitution},
  };
  int failed = 0;
  run_with_stack(kLargeStack, [&] {
    int n = 0;
    for (const auto& [name, run] : criteria) {
      ++n;
      Outcome o{false, ""};
      try {
        o = run();
      } catch (const std::exception& e) {
        o = {false, std::string("uncaught: ") + e.what()};
      }
      if (!o.pass) ++failed;
      std::cout << "criterion " << n << " [" << name << "]: " << (o.pass ? "PASS" : "FAIL")
                << " - " << o.detail << std::endl;
    }
  });
  return failed == 0 ? 0 : 1;
}
