#include "pqd/evaluator.hpp"

#include "pqd/shape.hpp"

namespace pqd {

namespace {

[[noreturn]] void stuck(const Span& span, const std::string& what) {
  throw EvalError(ErrorKind::StuckTerm, span, what);
}

// Constructor application that is not a saturated toNat.
bool is_intro_spine(const TermPtr& v) {
  auto sp = const_spine(v);
  if (!sp || sp->head->kind == ConstKind::Gate) return false;
  const auto n = static_cast<int>(sp->args.size());
  if (sp->head->kind == ConstKind::ToNat) return n < sp->head->arity;
  return n <= sp->head->arity;
}

// A result whose head is an introduction form.
bool is_canonical(const TermPtr& v) {
  switch (v->kind) {
    case TermKind::Unit:
    case TermKind::Label:
    case TermKind::Lam:
    case TermKind::LamP:
    case TermKind::Lift:
    case TermKind::Boxed:
    case TermKind::Pair:
      return true;
    default:
      return is_intro_spine(v);
  }
}

// Length of a list value as a numeral; stays symbolic past a neutral tail.
TermPtr to_nat(const TermPtr& v, const Span& span) {
  auto sp = const_spine(v);
  if (sp && sp->head->name == "Nil" && sp->args.empty()) return tm::cnst("Zero", span);
  if (sp && sp->head->name == "Cons" && sp->args.size() == 2)
    return tm::app(tm::cnst("Succ", span), to_nat(sp->args[1], span), span);
  return tm::app(tm::cnst("toNat", span), v, span);
}

TermPtr rebuild_spine(const Spine& sp, const Span& span) {
  TermPtr out = tm::cnst(std::string(sp.head->name), span);
  for (const auto& a : sp.args) out = tm::app(out, a, span);
  return out;
}

struct DepthGuard {
  std::size_t& depth;
  explicit DepthGuard(std::size_t& d) : depth(d) { ++depth; }
  ~DepthGuard() { --depth; }
};

}  // namespace

Evaluator::Evaluator(const Globals* globals, LabelSupply& supply, EvalOptions opts)
    : globals_(globals), supply_(supply), opts_(opts) {}

void Evaluator::tick(const Span& span) {
  if (++steps_ > opts_.fuel)
    throw EvalError(ErrorKind::ResourceExhausted, span,
                    "evaluation exceeded " + std::to_string(opts_.fuel) + " steps");
  if (depth_ > opts_.max_depth)
    throw EvalError(ErrorKind::ResourceExhausted, span,
                    "evaluation nested deeper than " +
                        std::to_string(opts_.max_depth) + " premises");
}

TermPtr Evaluator::eval(Circuit& c, const TermPtr& m) { return run(c, m); }

TermPtr Evaluator::eval_param(const Circuit& c, const TermPtr& m) {
  Circuit work = c;
  TermPtr v = run(work, m);
  if (!(work == c))
    throw EvalError(ErrorKind::CircuitMutated, m->span,
                    "parameter evaluation changed the circuit");
  return v;
}

TermPtr Evaluator::run(Circuit& c, const TermPtr& m) {
  DepthGuard guard(depth_);
  tick(m->span);
  const Span& s = m->span;
  // Closed constructor values (numerals, literal lists) return at once rather
  // than being rebuilt one premise per constructor.
  if ((m->kind == TermKind::App || m->kind == TermKind::AppP) && is_value(m) &&
      free_names(m).vars.empty())
    return m;
  switch (m->kind) {
    case TermKind::Unit:
    case TermKind::Label:
    case TermKind::Lam:
    case TermKind::LamP:
    case TermKind::Lift:
    case TermKind::Boxed:
      return m;

    case TermKind::Var: {
      if (opaque_.count(m->name) || !globals_) return m;
      auto it = globals_->find(m->name);
      if (it == globals_->end() || !it->second) return m;
      return run(c, it->second);
    }

    case TermKind::Const: {
      const ConstInfo* info = lookup_const(m->name);
      if (info && info->kind == ConstKind::Gate) {
        auto bc = std::make_shared<BoxedCircuit>(
            gate_circuit(*lookup_gate(m->name), supply_));
        return tm::boxed(std::move(bc), s);
      }
      return m;
    }

    case TermKind::Ann:
      return run(c, m->a);

    case TermKind::Pair: {
      TermPtr l = run(c, m->a);
      TermPtr r = run(c, m->b);
      if (l == m->a && r == m->b) return m;
      return tm::pair(l, r, s);
    }

    case TermKind::App:
    case TermKind::AppP: {
      TermPtr f = run(c, m->a);
      TermPtr x = run(c, m->b);
      return apply_value(c, f, x, m->kind == TermKind::AppP, s);
    }

    case TermKind::Force:
    case TermKind::ForceP: {
      const bool primed = m->kind == TermKind::ForceP;
      TermPtr v = run(c, m->a);
      if (v->kind == TermKind::Lift) {
        if (!primed) return run(c, v->a);
        // Parameter evaluation: the circuit must come back untouched.
        return eval_param(c, shape_term(v->a));
      }
      if (is_canonical(v)) stuck(s, "force of a non-lifted value");
      return primed ? tm::force_p(v, s) : tm::force(v, s);
    }

    case TermKind::LetPair: {
      TermPtr v = run(c, m->a);
      if (v->kind == TermKind::Pair) {
        TermPtr body = subst(subst(m->b, m->name, v->a), m->name2, v->b);
        return run(c, body);
      }
      if (is_canonical(v)) stuck(s, "let-pair of a non-pair value");
      return tm::let_pair(m->name, m->name2, v, m->b, s);
    }

    case TermKind::Case: {
      TermPtr v = run(c, m->a);
      auto sp = const_spine(v);
      if (sp && is_intro_spine(v) && sp->head->kind == ConstKind::Constructor) {
        for (const auto& alt : m->alts) {
          if (alt.ctor != sp->head->name) continue;
          if (alt.vars.size() != sp->args.size())
            stuck(alt.span, "constructor pattern " + alt.ctor + " has wrong arity");
          TermPtr body = alt.body;
          // Substitute simultaneously: rename pattern variables apart first.
          std::set<std::string> avoid = free_names(v).vars;
          for (const auto& x : alt.vars) avoid.insert(x);
          for (const auto& y : free_names(alt.body).vars) avoid.insert(y);
          std::vector<std::string> tmp;
          for (const auto& x : alt.vars) {
            std::string t = fresh_name(x, avoid);
            avoid.insert(t);
            body = subst(body, x, tm::var(t));
            tmp.push_back(t);
          }
          for (std::size_t i = 0; i < tmp.size(); ++i)
            body = subst(body, tmp[i], sp->args[i]);
          return run(c, body);
        }
        stuck(s, "no alternative for constructor " + std::string(sp->head->name));
      }
      if (is_canonical(v)) stuck(s, "case on a value that is not a constructor");
      return tm::case_of(v, m->alts, s);
    }

    case TermKind::Box:
      return eval_box(c, m);

    case TermKind::Apply:
    case TermKind::ApplyP: {
      const bool primed = m->kind == TermKind::ApplyP;
      TermPtr f = run(c, m->a);
      TermPtr x = run(c, m->b);
      if (f->kind != TermKind::Boxed) {
        if (is_canonical(f)) stuck(s, "apply of a value that is not a circuit");
        return primed ? tm::apply_p(f, x, s) : tm::apply(f, x, s);
      }
      if (primed) return eval_param(c, shape_term(f->boxed->out));
      auto result = append(c, x, *f->boxed, supply_);
      c = std::move(result.circuit);
      return result.out;
    }
  }
  stuck(s, "unknown term");
}

TermPtr Evaluator::apply_value(Circuit& c, const TermPtr& f, const TermPtr& x,
                               bool primed, const Span& s) {
  if (f->kind == TermKind::Lam || f->kind == TermKind::LamP)
    return run(c, subst(f->a, f->name, x));
  if (auto sp = const_spine(f); sp && is_intro_spine(f)) {
    const auto n = static_cast<int>(sp->args.size());
    if (n >= sp->head->arity)
      stuck(s, "constructor " + std::string(sp->head->name) + " over-applied");
    if (sp->head->kind == ConstKind::ToNat) return to_nat(x, s);
    sp->args.push_back(x);
    return rebuild_spine(*sp, s);
  }
  if (is_canonical(f)) stuck(s, "application of a value that is not a function");
  return primed ? tm::app_p(f, x, s) : tm::app(f, x, s);
}

TermPtr Evaluator::eval_box(Circuit& c, const TermPtr& m) {
  const Span& s = m->span;
  TermPtr v = run(c, m->a);
  if (v->kind != TermKind::Lift) {
    if (is_canonical(v)) stuck(s, "box of a value that is not lifted");
    return tm::box(m->type, m->type2, v, s);
  }
  TypePtr in = normalize_type_in(m->type);
  TypePtr out = m->type2 ? normalize_type_in(m->type2) : nullptr;
  if (!free_names(in).vars.empty())
    return tm::box(in, out, v, s);  // open interface: stays stuck

  TermPtr a = gen(in, supply_);
  Circuit d = identity_circuit(a);
  TermPtr b = run(d, tm::app(v->a, a, s));
  auto bc = std::make_shared<BoxedCircuit>(
      BoxedCircuit{a, std::move(d), b, in, out});
  return tm::boxed(std::move(bc), s);
}

TypePtr Evaluator::normalize_type(const TypePtr& a, const std::set<std::string>& opaque) {
  auto saved = opaque_;
  opaque_.insert(opaque.begin(), opaque.end());
  try {
    TypePtr r = normalize_type_in(a);
    opaque_ = std::move(saved);
    return r;
  } catch (...) {
    opaque_ = std::move(saved);
    throw;
  }
}

TermPtr Evaluator::normalize_term(const TermPtr& m, const std::set<std::string>& opaque) {
  auto saved = opaque_;
  opaque_.insert(opaque.begin(), opaque.end());
  try {
    TermPtr r = eval_param(Circuit{}, m);
    opaque_ = std::move(saved);
    return r;
  } catch (...) {
    opaque_ = std::move(saved);
    throw;
  }
}

TypePtr Evaluator::normalize_type_in(const TypePtr& a) {
  if (!a) return a;
  switch (a->kind) {
    case TypeKind::Qubit:
    case TypeKind::Bit:
    case TypeKind::Unit:
    case TypeKind::Nat:
      return a;
    case TypeKind::List:
      return ty::list(normalize_type_in(a->dom), a->span);
    case TypeKind::Bang:
      return ty::bang(normalize_type_in(a->dom), a->span);
    case TypeKind::Vec:
      return ty::vec(normalize_type_in(a->dom), eval_param(Circuit{}, a->len),
                     a->span);
    case TypeKind::Circ:
      return ty::circ(normalize_type_in(a->dom), normalize_type_in(a->cod), a->span);
    case TypeKind::LinPi:
    case TypeKind::Tensor:
    case TypeKind::IntPi: {
      TypePtr dom = normalize_type_in(a->dom);
      const bool bound = a->binder != kAnon;
      const bool was_opaque = opaque_.count(a->binder) > 0;
      if (bound) opaque_.insert(a->binder);
      TypePtr cod;
      try {
        cod = normalize_type_in(a->cod);
      } catch (...) {
        if (bound && !was_opaque) opaque_.erase(a->binder);
        throw;
      }
      if (bound && !was_opaque) opaque_.erase(a->binder);
      auto make = a->kind == TypeKind::LinPi   ? &ty::lin_pi
                  : a->kind == TypeKind::Tensor ? &ty::tensor
                                                : &ty::int_pi;
      return make(a->binder, dom, cod, a->span);
    }
  }
  return a;
}

Configuration eval(Configuration cfg, const Globals* globals, EvalOptions opts) {
  Evaluator ev(globals, cfg.supply, opts);
  cfg.term = ev.eval(cfg.circuit, cfg.term);
  return cfg;
}

Configuration eval_param(Configuration cfg, const Globals* globals, EvalOptions opts) {
  Evaluator ev(globals, cfg.supply, opts);
  cfg.term = ev.eval_param(cfg.circuit, cfg.term);
  return cfg;
}

RunResult run_main(const Globals& globals, EvalOptions opts) {
  auto it = globals.find("main");
  if (it == globals.end())
    throw EvalError(ErrorKind::NoMain, {}, "program has no declaration named main");
  RunResult r;
  r.final.term = it->second;
  r.final = eval(std::move(r.final), &globals, opts);
  if (r.final.term->kind == TermKind::Boxed) r.circuit = *r.final.term->boxed;
  return r;
}

}  // namespace pqd
