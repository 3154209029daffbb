#include "pqd/checker.hpp"

#include <algorithm>

#include "pqd/frontend.hpp"
#include "pqd/shape.hpp"

namespace pqd {

namespace {

struct Entry {
  Name name;
  TypePtr type;
};
using Env = std::vector<Entry>;

bool is_kind(const TypePtr& t, TypeKind k) { return t && t->kind == k; }

std::string show(const TypePtr& t) { return print_type(t); }

// Pattern term `ctor v1 .. vn`.
TermPtr pattern_term(const std::string& ctor, const std::vector<std::string>& vars) {
  TermPtr p = tm::cnst(ctor);
  for (const auto& v : vars) p = tm::app(p, tm::var(v));
  return p;
}

// Simultaneous substitution of `args` for `vars`.
TermPtr subst_all(TermPtr body, const std::vector<std::string>& vars,
                  const std::vector<TermPtr>& args) {
  std::set<std::string> avoid = free_names(body).vars;
  for (const auto& a : args)
    for (const auto& v : free_names(a).vars) avoid.insert(v);
  for (const auto& v : vars) avoid.insert(v);
  std::vector<std::string> tmp;
  for (const auto& v : vars) {
    std::string t = fresh_name(v, avoid);
    avoid.insert(t);
    body = subst(body, v, tm::var(t));
    tmp.push_back(t);
  }
  for (std::size_t i = 0; i < tmp.size(); ++i) body = subst(body, tmp[i], args[i]);
  return body;
}

// Whether a closed simple term has the (normalized) simple type `t`.
bool inhabits(const TermPtr& v, const TypePtr& t) {
  switch (t->kind) {
    case TypeKind::Unit:
      return v->kind == TermKind::Unit;
    case TypeKind::Qubit:
    case TypeKind::Bit:
      return v->kind == TermKind::Label && ty::of_sort(v->sort)->kind == t->kind;
    case TypeKind::Tensor:
      return v->kind == TermKind::Pair && inhabits(v->a, t->dom) && inhabits(v->b, t->cod);
    case TypeKind::Vec: {
      auto vs = const_spine(v);
      auto ls = const_spine(t->len);
      if (!vs || !ls) return false;
      if (vs->head->name == "VNil") return ls->head->name == "Zero" && ls->args.empty();
      return vs->head->name == "VCons" && vs->args.size() == 2 &&
             ls->head->name == "Succ" && ls->args.size() == 1 &&
             inhabits(vs->args[0], t->dom) &&
             inhabits(vs->args[1], ty::vec(t->dom, ls->args[0]));
    }
    default:
      return false;
  }
}

class Engine {
 public:
  Engine(const std::map<std::string, TypePtr>& types, const Globals& bodies,
         const CheckOptions& opts, bool elab)
      : types_(types), bodies_(bodies), opts_(opts), elab_(elab) {}

  Inferred infer(const Env& env, const TermPtr& m);
  Inferred check(const Env& env, const TermPtr& m, const TypePtr& a);
  TypePtr kind(const Env& phi, const TypePtr& a);
  bool eq(const Env& env, const TypePtr& a, const TypePtr& b);
  TypePtr normalize(const Env& env, const TypePtr& a);
  TermPtr normalize_term(const Env& env, const TermPtr& m);
  Usage plus(const Env& env, const Usage& u1, const Usage& u2);
  [[noreturn]] void fail(ErrorKind k, const std::string& msg) const {
    throw TypeError(k, cur_, msg);
  }

 private:
  struct At {
    Engine& e;
    Span saved;
    At(Engine& eng, const Span& s) : e(eng), saved(eng.cur_) {
      if (e.depth_ >= e.opts_.max_depth)
        e.fail(ErrorKind::ResourceExhausted, "term nesting exceeds the checker's depth limit");
      ++e.depth_;
      if (s.valid()) e.cur_ = s;
    }
    ~At() {
      --e.depth_;
      e.cur_ = saved;
    }
  };

  Inferred infer_(const Env& env, const TermPtr& m);
  Inferred check_(const Env& env, const TermPtr& m, const TypePtr& a);
  Inferred coerce(const Env& env, Inferred r, const TypePtr& a);
  Inferred infer_app(const Env& env, const TermPtr& m);
  Inferred infer_let(const Env& env, const TermPtr& m, const TypePtr& expected);
  Inferred infer_case(const Env& env, const TermPtr& m, const TypePtr& expected);
  Inferred infer_box(const Env& env, const TermPtr& m, const TypePtr& out);
  Inferred infer_spine(const Env& env, const TermPtr& m, const Spine& sp);
  std::optional<Inferred> check_spine(const Env& env, const TermPtr& m,
                                      const Spine& sp, const TypePtr& a);
  Inferred check_lam(const Env& env, const TermPtr& m, const TypePtr& a);
  TypePtr simple_type_of(const TermPtr& iface);

  const Entry* find(const Env& env, const Name& n) const;
  bool is_linear(const Env& env, const Name& n) const;
  bool clashes(const Env& env, const std::string& x) const;
  std::string freshen(const Env& env, const std::string& x, TermPtr& body,
                      const std::set<std::string>& extra = {}) const;
  void require_param(const Env& env, const Usage& u, const std::string& what) const;
  void consume(Usage& u, const std::string& x, const TypePtr& type) const;
  Env shape_env(const Env& env) const;
  std::set<std::string> env_names(const Env& env) const;
  TermPtr spine_term(const TermPtr& m, const Spine& sp,
                     const std::vector<TermPtr>& args) const;
  void record(const Env& env, const Inferred& r);

  const std::map<std::string, TypePtr>& types_;
  const Globals& bodies_;
  const CheckOptions& opts_;
  bool elab_;
  Span cur_;
  std::size_t depth_ = 0;
};

// ---------------------------------------------------------------------------
// Environment helpers

const Entry* Engine::find(const Env& env, const Name& n) const {
  for (auto it = env.rbegin(); it != env.rend(); ++it)
    if (it->name == n) return &*it;
  return nullptr;
}

bool Engine::is_linear(const Env& env, const Name& n) const {
  const Entry* e = find(env, n);
  return e && !is_parameter_type(e->type);
}

bool Engine::clashes(const Env& env, const std::string& x) const {
  return find(env, Name{x}) != nullptr || types_.count(x) > 0;
}

std::string Engine::freshen(const Env& env, const std::string& x, TermPtr& body,
                            const std::set<std::string>& extra) const {
  if (!clashes(env, x) && !extra.count(x)) return x;
  std::set<std::string> avoid = env_names(env);
  for (const auto& [g, _] : types_) avoid.insert(g);
  avoid.insert(extra.begin(), extra.end());
  if (body)
    for (const auto& v : free_names(body).vars) avoid.insert(v);
  std::string y = fresh_name(x, avoid);
  if (body) body = subst(body, x, tm::var(y));
  return y;
}

std::set<std::string> Engine::env_names(const Env& env) const {
  std::set<std::string> out;
  for (const auto& e : env)
    if (auto s = std::get_if<std::string>(&e.name)) out.insert(*s);
  return out;
}

Env Engine::shape_env(const Env& env) const {
  Env out;
  out.reserve(env.size());
  for (const auto& e : env) out.push_back(Entry{e.name, shape_type(e.type)});
  return out;
}

Usage Engine::plus(const Env& env, const Usage& u1, const Usage& u2) {
  Usage out = u1;
  for (const auto& [n, k] : u2) {
    Index& slot = out[n];
    slot = slot + k;
    if (slot == Index::Omega && is_linear(env, n))
      fail(ErrorKind::LinearityViolation,
           "linear resource " + to_string(n) + " is used more than once");
  }
  return out;
}

void Engine::require_param(const Env& env, const Usage& u, const std::string& what) const {
  for (const auto& [n, k] : u)
    if (k != Index::Zero && is_linear(env, n))
      fail(ErrorKind::NotParameterContext,
           what + " requires a parameter context, but it uses linear resource " +
               to_string(n));
}

void Engine::consume(Usage& u, const std::string& x, const TypePtr& type) const {
  Index k = Index::Zero;
  if (auto it = u.find(Name{x}); it != u.end()) {
    k = it->second;
    u.erase(it);
  }
  if (!is_parameter_type(type) && k != Index::One)
    fail(ErrorKind::LinearityViolation,
         "linear variable " + x + " of type " + show(type) +
             (k == Index::Zero ? " is never used" : " is used more than once"));
}

void Engine::record(const Env& env, const Inferred& r) {
  if (elab_ || !opts_.record) return;
  Judgment j;
  for (const auto& e : env) {
    Index k = Index::Omega;
    if (!is_parameter_type(e.type)) {
      auto it = r.usage.find(e.name);
      k = it == r.usage.end() ? Index::Zero : it->second;
    }
    j.ctx.push_back(Binding{e.name, k, e.type});
  }
  j.term = r.term;
  j.type = r.type;
  opts_.record(j);
}

// ---------------------------------------------------------------------------
// Conversion

TypePtr Engine::normalize(const Env& env, const TypePtr& a) {
  LabelSupply supply;
  Evaluator ev(&bodies_, supply, EvalOptions{opts_.fuel});
  return ev.normalize_type(a, env_names(env));
}

TermPtr Engine::normalize_term(const Env& env, const TermPtr& m) {
  LabelSupply supply;
  Evaluator ev(&bodies_, supply, EvalOptions{opts_.fuel});
  return ev.normalize_term(m, env_names(env));
}

bool Engine::eq(const Env& env, const TypePtr& a, const TypePtr& b) {
  if (alpha_eq(a, b)) return true;
  return alpha_eq(normalize(env, a), normalize(env, b));
}

// ---------------------------------------------------------------------------
// Kinding

TypePtr Engine::kind(const Env& phi, const TypePtr& a) {
  At at(*this, a->span);
  switch (a->kind) {
    case TypeKind::Qubit:
    case TypeKind::Bit:
    case TypeKind::Unit:
    case TypeKind::Nat:
      return a;
    case TypeKind::List:
      return ty::list(kind(phi, a->dom), a->span);
    case TypeKind::Bang:
      return ty::bang(kind(phi, a->dom), a->span);
    case TypeKind::Vec: {
      TypePtr elem = kind(phi, a->dom);
      TermPtr len = a->len;
      At at_len(*this, len->span);
      if (!free_names(len).labels.empty() || (!elab_ && !is_parameter_term(len)))
        fail(ErrorKind::NotParameterTerm,
             "vector length " + print_term(len) + " is not a parameter term");
      Inferred r = check(phi, len, ty::nat());
      TermPtr out = is_parameter_term(r.term) ? r.term : shape_term(r.term);
      if (!is_parameter_term(out))
        fail(ErrorKind::NotParameterTerm,
             "vector length " + print_term(len) + " is not a parameter term");
      return ty::vec(elem, out, a->span);
    }
    case TypeKind::LinPi:
    case TypeKind::Tensor:
    case TypeKind::IntPi: {
      TypePtr dom = kind(phi, a->dom);
      if (a->kind == TypeKind::IntPi && !is_parameter_type(dom))
        fail(ErrorKind::KindMismatch,
             "domain of -> must be a parameter type, got " + show(dom));
      std::string x = a->binder;
      TypePtr cod = a->cod;
      Env inner = phi;
      if (x != kAnon) {
        TermPtr none;
        std::string y = freshen(phi, x, none);
        if (y != x) {
          cod = subst(cod, x, tm::var(y));
          x = y;
        }
        inner.push_back(Entry{Name{x}, shape_type(dom)});
      }
      cod = kind(inner, cod);
      if (a->kind == TypeKind::IntPi && !is_parameter_type(cod))
        fail(ErrorKind::KindMismatch,
             "codomain of -> must be a parameter type, got " + show(cod));
      if (a->kind == TypeKind::LinPi) return ty::lin_pi(x, dom, cod, a->span);
      if (a->kind == TypeKind::Tensor) return ty::tensor(x, dom, cod, a->span);
      return ty::int_pi(x, dom, cod, a->span);
    }
    case TypeKind::Circ: {
      TypePtr in = kind(phi, a->dom);
      TypePtr out = kind(phi, a->cod);
      if (!is_simple_type(in) || !is_simple_type(out))
        fail(ErrorKind::NotSimpleType,
             "Circ needs simple types, got " + show(!is_simple_type(in) ? in : out));
      return ty::circ(in, out, a->span);
    }
  }
  return a;
}

// ---------------------------------------------------------------------------
// Inference and checking

Inferred Engine::infer(const Env& env, const TermPtr& m) {
  At at(*this, m->span);
  Inferred r = infer_(env, m);
  record(env, r);
  return r;
}

Inferred Engine::check(const Env& env, const TermPtr& m, const TypePtr& a) {
  At at(*this, m->span);
  Inferred r = check_(env, m, a);
  record(env, r);
  return r;
}

Inferred Engine::infer_(const Env& env, const TermPtr& m) {
  const Span& s = m->span;
  switch (m->kind) {
    case TermKind::Unit:
      return {m, ty::unit(), {}};

    case TermKind::Var: {
      if (const Entry* e = find(env, Name{m->name}))
        return {m, e->type, {{Name{m->name}, Index::One}}};
      if (auto it = types_.find(m->name); it != types_.end())
        return {m, it->second, {}};
      fail(ErrorKind::UnboundName, "unbound variable " + m->name);
    }

    case TermKind::Label: {
      const Entry* e = find(env, Name{m->label});
      if (!e) fail(ErrorKind::UnboundName, "unbound label " + label_text(m->label));
      return {m, e->type, {{Name{m->label}, Index::One}}};
    }

    case TermKind::Const: {
      const ConstInfo* info = lookup_const(m->name);
      if (!info) fail(ErrorKind::UnboundName, "unknown constant " + m->name);
      if (info->kind == ConstKind::Gate)
        return {m, gate_type(*lookup_gate(m->name)), {}};
      return infer_spine(env, m, Spine{info, {}});
    }

    case TermKind::Lam: {
      if (!m->type)
        fail(ErrorKind::TypeMismatch,
             "cannot infer the type of an unannotated lambda; add an annotation");
      TypePtr dom = kind(shape_env(env), m->type);
      TermPtr body = m->a;
      std::string x = freshen(env, m->name, body);
      Env inner = env;
      inner.push_back(Entry{Name{x}, dom});
      Inferred r = infer(inner, body);
      consume(r.usage, x, dom);
      TypePtr t = ty::lin_pi(occurs_free(x, r.type) ? x : std::string(kAnon), dom,
                             r.type);
      return {tm::lam(x, dom, r.term, s), t, r.usage};
    }

    case TermKind::LamP: {
      if (!m->type)
        fail(ErrorKind::TypeMismatch,
             "cannot infer the type of an unannotated lambda; add an annotation");
      TypePtr dom = kind(shape_env(env), m->type);
      if (!is_parameter_type(dom))
        fail(ErrorKind::KindMismatch,
             "binder of \\' must have a parameter type, got " + show(dom));
      TermPtr body = m->a;
      std::string x = freshen(env, m->name, body);
      Env inner = env;
      inner.push_back(Entry{Name{x}, dom});
      Inferred r = infer(inner, body);
      r.usage.erase(Name{x});
      require_param(env, r.usage, "\\'");
      TypePtr t = ty::int_pi(occurs_free(x, r.type) ? x : std::string(kAnon), dom,
                             r.type);
      return {tm::lam_p(x, dom, r.term, s), t, r.usage};
    }

    case TermKind::App:
    case TermKind::AppP: {
      auto sp = const_spine(m);
      if (sp && sp->head->kind != ConstKind::Gate) return infer_spine(env, m, *sp);
      return infer_app(env, m);
    }

    case TermKind::Lift: {
      Inferred r = infer(env, m->a);
      require_param(env, r.usage, "lift");
      return {tm::lift(r.term, s), ty::bang(r.type), r.usage};
    }

    case TermKind::Force:
    case TermKind::ForceP: {
      const bool primed = m->kind == TermKind::ForceP;
      Inferred r = infer(env, m->a);
      if (!is_kind(r.type, TypeKind::Bang))
        fail(ErrorKind::TypeMismatch,
             "force expects a term of ! type, got " + show(r.type));
      if (primed) {
        require_param(env, r.usage, "force'");
        return {tm::force_p(r.term, s), shape_type(r.type->dom), r.usage};
      }
      return {tm::force(r.term, s), r.type->dom, r.usage};
    }

    case TermKind::Pair: {
      Inferred l = infer(env, m->a);
      Inferred r = infer(env, m->b);
      return {tm::pair(l.term, r.term, s), ty::pair(l.type, r.type),
              plus(env, l.usage, r.usage)};
    }

    case TermKind::LetPair:
      return infer_let(env, m, nullptr);

    case TermKind::Case:
      return infer_case(env, m, nullptr);

    case TermKind::Box:
      return infer_box(env, m, nullptr);

    case TermKind::Apply:
    case TermKind::ApplyP: {
      const bool primed = m->kind == TermKind::ApplyP;
      Inferred c = infer(env, m->a);
      if (elab_ && is_kind(c.type, TypeKind::Bang) &&
          is_kind(c.type->dom, TypeKind::Circ)) {
        c.term = tm::force(c.term);
        c.type = c.type->dom;
      }
      if (!is_kind(c.type, TypeKind::Circ))
        fail(ErrorKind::TypeMismatch,
             "apply expects a circuit of type Circ(S, U), got " + show(c.type));
      if (primed) {
        Inferred x = check(env, m->b, shape_type(c.type->dom));
        Usage u = plus(env, c.usage, x.usage);
        require_param(env, u, "apply'");
        return {tm::apply_p(c.term, x.term, s), shape_type(c.type->cod), u};
      }
      Inferred x = check(env, m->b, c.type->dom);
      return {tm::apply(c.term, x.term, s), c.type->cod, plus(env, c.usage, x.usage)};
    }

    case TermKind::Boxed: {
      const BoxedCircuit& bc = *m->boxed;
      TypePtr in = bc.in_type ? bc.in_type : simple_type_of(bc.in);
      TypePtr out = bc.out_type ? bc.out_type : simple_type_of(bc.out);
      if (!inhabits(bc.in, normalize(env, in)) || !inhabits(bc.out, normalize(env, out)))
        fail(ErrorKind::TypeMismatch,
             "boxed circuit interfaces do not match Circ(" + show(in) + ", " +
                 show(out) + ")");
      return {m, ty::circ(in, out), {}};
    }

    case TermKind::Ann: {
      TypePtr a = kind(shape_env(env), m->type);
      Inferred r = check(env, m->a, a);
      return {tm::ann(r.term, a, s), a, r.usage};
    }
  }
  fail(ErrorKind::TypeMismatch, "cannot infer a type for this term");
}

Inferred Engine::coerce(const Env& env, Inferred r, const TypePtr& a) {
  if (elab_) {
    const bool want_bang = is_kind(a, TypeKind::Bang);
    const bool have_bang = is_kind(r.type, TypeKind::Bang);
    if (want_bang && !have_bang) {
      require_param(env, r.usage, "lift");
      r.term = tm::lift(r.term, r.term->span);
      r.type = ty::bang(r.type);
    } else if (have_bang && !want_bang) {
      r.term = tm::force(r.term, r.term->span);
      r.type = r.type->dom;
    }
  }
  if (!eq(env, r.type, a))
    fail(ErrorKind::TypeMismatch,
         "expected type " + show(a) + " but found " + show(r.type));
  r.type = a;
  return r;
}

Inferred Engine::check_(const Env& env, const TermPtr& m, const TypePtr& a) {
  const Span& s = m->span;
  auto sp = const_spine(m);
  const bool ctor = sp && sp->head->kind == ConstKind::Constructor;

  if (elab_ && is_kind(a, TypeKind::Bang) &&
      (m->kind == TermKind::Lam || m->kind == TermKind::Pair || ctor)) {
    Inferred r = check(env, m, a->dom);
    require_param(env, r.usage, "lift");
    return {tm::lift(r.term, s), a, r.usage};
  }

  switch (m->kind) {
    case TermKind::Lam:
    case TermKind::LamP:
      return check_lam(env, m, a);

    case TermKind::Lift:
      if (is_kind(a, TypeKind::Bang)) {
        Inferred r = check(env, m->a, a->dom);
        require_param(env, r.usage, "lift");
        return {tm::lift(r.term, s), a, r.usage};
      }
      break;

    case TermKind::Pair:
      if (is_kind(a, TypeKind::Tensor)) {
        Inferred l = check(env, m->a, a->dom);
        TypePtr cod = a->binder == kAnon
                          ? a->cod
                          : subst(a->cod, a->binder, shape_term(l.term));
        Inferred r = check(env, m->b, cod);
        return {tm::pair(l.term, r.term, s), a, plus(env, l.usage, r.usage)};
      }
      break;

    case TermKind::LetPair:
      return infer_let(env, m, a);

    case TermKind::Case:
      return infer_case(env, m, a);

    case TermKind::Box:
      if (is_kind(a, TypeKind::Circ) && !m->type2) {
        Inferred r = infer_box(env, m, a->cod);
        return coerce(env, r, a);
      }
      break;

    default:
      if (ctor)
        if (auto r = check_spine(env, m, *sp, a)) return *r;
      break;
  }
  return coerce(env, infer(env, m), a);
}

Inferred Engine::check_lam(const Env& env, const TermPtr& m, const TypePtr& a) {
  const Span& s = m->span;
  const bool primed_term = m->kind == TermKind::LamP;
  const bool lin = is_kind(a, TypeKind::LinPi);
  const bool intu = is_kind(a, TypeKind::IntPi);
  if (!(lin && !primed_term) && !(intu && (primed_term || elab_))) {
    if (lin || intu)
      fail(ErrorKind::TypeMismatch,
           std::string(primed_term ? "\\'" : "lambda") +
               " cannot have type " + show(a));
    fail(ErrorKind::TypeMismatch, "lambda checked against non-function type " + show(a));
  }
  if (m->type && !eq(env, kind(shape_env(env), m->type), a->dom))
    fail(ErrorKind::TypeMismatch, "binder annotation " + show(m->type) +
                                      " does not match expected domain " + show(a->dom));
  TermPtr body = m->a;
  std::string x = freshen(env, m->name, body);
  TypePtr cod = a->binder == kAnon ? a->cod : subst(a->cod, a->binder, tm::var(x));
  Env inner = env;
  inner.push_back(Entry{Name{x}, a->dom});
  Inferred r = check(inner, body, cod);
  TypePtr annot = m->type ? a->dom : nullptr;
  if (intu) {
    r.usage.erase(Name{x});
    require_param(env, r.usage, "\\'");
    TermPtr out = primed_term ? r.term : shape_term(r.term);
    return {tm::lam_p(x, annot, out, s), a, r.usage};
  }
  consume(r.usage, x, a->dom);
  return {tm::lam(x, annot, r.term, s), a, r.usage};
}

Inferred Engine::infer_app(const Env& env, const TermPtr& m) {
  const Span& s = m->span;
  const bool primed = m->kind == TermKind::AppP;
  Inferred f = infer(env, m->a);
  TypePtr t = f.type;
  if (elab_ && is_kind(t, TypeKind::Bang)) {
    if (is_kind(t->dom, TypeKind::IntPi)) {
      f.term = tm::force_p(f.term, f.term->span);
      t = t->dom;
    } else if (is_kind(t->dom, TypeKind::LinPi) || is_kind(t->dom, TypeKind::Circ)) {
      f.term = tm::force(f.term, f.term->span);
      t = t->dom;
    }
  }
  if (elab_ && !primed && is_kind(t, TypeKind::Circ)) {
    Inferred x = check(env, m->b, t->dom);
    return {tm::apply(f.term, x.term, s), t->cod, plus(env, f.usage, x.usage)};
  }
  if (!primed && is_kind(t, TypeKind::LinPi)) {
    Inferred x = check(env, m->b, t->dom);
    TypePtr cod = t->binder == kAnon ? t->cod
                                     : subst(t->cod, t->binder, shape_term(x.term));
    return {tm::app(f.term, x.term, s), cod, plus(env, f.usage, x.usage)};
  }
  if (is_kind(t, TypeKind::IntPi) && (primed || elab_)) {
    Inferred x = check(env, m->b, t->dom);
    Usage u = plus(env, f.usage, x.usage);
    require_param(env, u, "@");
    TermPtr fn = primed ? f.term : shape_term(f.term);
    TermPtr arg = primed ? x.term : shape_term(x.term);
    TypePtr cod = t->binder == kAnon ? t->cod : subst(t->cod, t->binder, arg);
    return {tm::app_p(fn, arg, s), cod, u};
  }
  if (is_kind(t, TypeKind::LinPi) || is_kind(t, TypeKind::IntPi))
    fail(ErrorKind::TypeMismatch,
         std::string(primed ? "@" : "application") + " cannot apply a function of type " +
             show(t));
  fail(ErrorKind::TypeMismatch, "applied term has type " + show(t) +
                                    ", which is not a function");
}

// ---------------------------------------------------------------------------
// Eliminators

Inferred Engine::infer_let(const Env& env, const TermPtr& m, const TypePtr& expected) {
  const Span& s = m->span;
  Inferred p = infer(env, m->a);
  if (elab_ && is_kind(p.type, TypeKind::Bang) && is_kind(p.type->dom, TypeKind::Tensor)) {
    p.term = tm::force(p.term, p.term->span);
    p.type = p.type->dom;
  }
  if (!is_kind(p.type, TypeKind::Tensor))
    fail(ErrorKind::TypeMismatch, "let-pair expects a pair, got " + show(p.type));
  if (m->name == m->name2 && m->name != kAnon)
    fail(ErrorKind::TypeMismatch, "let-pair binds " + m->name + " twice");
  TermPtr body = m->b;
  std::string x = freshen(env, m->name, body, {m->name2});
  std::string y = freshen(env, m->name2, body, {x});
  TypePtr a = p.type->dom;
  TypePtr b = p.type->binder == kAnon ? p.type->cod
                                      : subst(p.type->cod, p.type->binder, tm::var(x));
  Env inner = env;
  inner.push_back(Entry{Name{x}, a});
  inner.push_back(Entry{Name{y}, b});
  Inferred r = expected ? check(inner, body, expected) : infer(inner, body);
  consume(r.usage, y, b);
  consume(r.usage, x, a);
  TypePtr t = expected ? expected : r.type;
  if (!expected && (occurs_free(x, t) || occurs_free(y, t))) {
    t = normalize(env, t);
    if (occurs_free(x, t) || occurs_free(y, t))
      fail(ErrorKind::TypeMismatch,
           "type " + show(t) + " of the let body mentions a variable bound by the let");
  }
  return {tm::let_pair(x, y, p.term, r.term, s), t, plus(env, p.usage, r.usage)};
}

namespace {

struct CtorSig {
  std::string name;
  std::size_t arity;
};

}  // namespace

Inferred Engine::infer_case(const Env& env, const TermPtr& m, const TypePtr& expected) {
  const Span& s = m->span;
  Inferred sc = infer(env, m->a);
  if (elab_ && is_kind(sc.type, TypeKind::Bang)) {
    sc.term = tm::force(sc.term, sc.term->span);
    sc.type = sc.type->dom;
  }
  const TypePtr t = sc.type;
  std::vector<CtorSig> ctors;
  if (is_kind(t, TypeKind::Nat))
    ctors = {{"Zero", 0}, {"Succ", 1}};
  else if (is_kind(t, TypeKind::List))
    ctors = {{"Nil", 0}, {"Cons", 2}};
  else if (is_kind(t, TypeKind::Vec))
    ctors = {{"VNil", 0}, {"VCons", 2}};
  else
    fail(ErrorKind::TypeMismatch,
         "case expects a Nat, List or Vec scrutinee, got " + show(t));

  // Alternatives: known constructors, right arity, no duplicates.
  std::set<std::string> seen;
  for (const auto& alt : m->alts) {
    At at(*this, alt.span);
    auto c = std::find_if(ctors.begin(), ctors.end(),
                          [&](const CtorSig& k) { return k.name == alt.ctor; });
    if (c == ctors.end())
      fail(ErrorKind::TypeMismatch,
           "constructor " + alt.ctor + " does not belong to type " + show(t));
    if (alt.vars.size() != c->arity)
      fail(ErrorKind::ArityMismatch, "pattern " + alt.ctor + " expects " +
                                         std::to_string(c->arity) + " variables, got " +
                                         std::to_string(alt.vars.size()));
    if (!seen.insert(alt.ctor).second)
      fail(ErrorKind::TypeMismatch, "duplicate alternative for " + alt.ctor);
  }

  // Vectors: only the constructor selected by the length is reachable.
  std::set<std::string> reachable;
  TermPtr vec_tail_len;
  if (is_kind(t, TypeKind::Vec)) {
    TermPtr len = normalize_term(env, t->len);
    auto lsp = const_spine(len);
    if (lsp && lsp->head->name == "Zero" && lsp->args.empty()) {
      reachable = {"VNil"};
    } else if (lsp && lsp->head->name == "Succ" && lsp->args.size() == 1) {
      reachable = {"VCons"};
      vec_tail_len = lsp->args[0];
    } else {
      fail(ErrorKind::TypeMismatch,
           "cannot case on a vector of unknown length " + print_term(t->len) +
               "; case on the length first");
    }
  } else {
    for (const auto& c : ctors) reachable.insert(c.name);
  }

  auto binder_types = [&](const std::string& ctor) -> std::vector<TypePtr> {
    if (ctor == "Succ") return {ty::nat()};
    if (ctor == "Cons") return {t->dom, ty::list(t->dom)};
    if (ctor == "VCons") return {t->dom, ty::vec(t->dom, vec_tail_len)};
    return {};
  };

  // A scrutinee with a constructor normal form selects one branch. Parameter
  // scrutinees are normalized first; others must already be a constructor
  // applied to values, whose resources then flow into the selected branch.
  const bool param_scrut = is_parameter_type(t);
  TermPtr v = param_scrut ? normalize_term(env, sc.term) : sc.term;
  auto vsp = const_spine(v);
  bool selects = vsp && vsp->head->kind == ConstKind::Constructor &&
                 static_cast<int>(vsp->args.size()) == vsp->head->arity;
  if (selects && !param_scrut)
    selects = std::all_of(vsp->args.begin(), vsp->args.end(),
                          [](const TermPtr& a) { return is_value(a); });
  {
    if (selects) {
      auto alt = std::find_if(m->alts.begin(), m->alts.end(),
                              [&](const Alt& a) { return a.ctor == vsp->head->name; });
      if (alt == m->alts.end())
        fail(ErrorKind::TypeMismatch, "missing alternative for " +
                                          std::string(vsp->head->name));
      At at(*this, alt->span);
      TermPtr body = subst_all(alt->body, alt->vars, vsp->args);
      Inferred r = expected ? check(env, body, expected) : infer(env, body);
      std::vector<Alt> alts = m->alts;
      alts[alt - m->alts.begin()].body = r.term;
      return {tm::case_of(sc.term, std::move(alts), s), expected ? expected : r.type,
              param_scrut ? plus(env, sc.usage, r.usage) : r.usage};
    }
  }

  TermPtr sv = normalize_term(env, sc.term);
  const std::string* refine = sv->kind == TermKind::Var ? &sv->name : nullptr;

  std::vector<Alt> alts = m->alts;
  std::vector<Usage> usages;
  TypePtr result = expected;
  std::set<std::string> avoid = free_names(sc.term).vars;
  for (auto& alt : alts) {
    if (!reachable.count(alt.ctor)) continue;
    At at(*this, alt.span);
    TermPtr body = alt.body;
    std::vector<std::string> vars;
    std::set<std::string> taken = avoid;
    for (const auto& v : alt.vars) taken.insert(v);
    for (const auto& v : alt.vars) {
      taken.erase(v);
      std::string y = freshen(env, v, body, taken);
      taken.insert(y);
      vars.push_back(y);
    }
    std::vector<TypePtr> btys = binder_types(alt.ctor);
    TermPtr pat = pattern_term(alt.ctor, vars);
    // Pattern variables go right after a refined scrutinee so that later
    // bindings whose types now mention them stay well scoped.
    Env inner;
    auto add_vars = [&] {
      for (std::size_t i = 0; i < vars.size(); ++i)
        inner.push_back(Entry{Name{vars[i]}, btys[i]});
    };
    bool placed = false;
    for (const auto& e : env) {
      inner.push_back(Entry{e.name, refine ? subst(e.type, *refine, pat) : e.type});
      if (refine && !placed && e.name == Name{*refine}) {
        add_vars();
        placed = true;
      }
    }
    if (!placed) add_vars();
    TypePtr goal = expected && refine ? subst(expected, *refine, pat) : expected;
    Inferred r = goal ? check(inner, body, goal) : infer(inner, body);
    for (std::size_t i = vars.size(); i-- > 0;) consume(r.usage, vars[i], btys[i]);
    if (!goal) {
      TypePtr bt = r.type;
      bool escapes = std::any_of(vars.begin(), vars.end(),
                                 [&](const std::string& v) { return occurs_free(v, bt); });
      if (escapes) {
        bt = normalize(inner, bt);
        for (const auto& v : vars)
          if (occurs_free(v, bt))
            fail(ErrorKind::TypeMismatch, "type " + show(bt) +
                                              " of a case branch mentions pattern variable " + v);
      }
      if (!result)
        result = bt;
      else if (!eq(env, result, bt))
        fail(ErrorKind::TypeMismatch, "case branches have different types " +
                                          show(result) + " and " + show(bt));
    }
    alt.vars = vars;
    alt.body = r.term;
    usages.push_back(std::move(r.usage));
  }
  for (const auto& c : reachable)
    if (!seen.count(c)) fail(ErrorKind::TypeMismatch, "missing alternative for " + c);

  // Linear resources must be used identically by every branch.
  Usage joined;
  for (const auto& u : usages)
    for (const auto& [n, k] : u) joined[n] = idx_join(joined[n], k);
  for (const auto& u : usages)
    for (const auto& [n, k] : joined) {
      if (!is_linear(env, n)) continue;
      auto it = u.find(n);
      Index mine = it == u.end() ? Index::Zero : it->second;
      if (mine != k)
        fail(ErrorKind::LinearityViolation,
             "case branches use linear resource " + to_string(n) + " differently");
    }
  return {tm::case_of(sc.term, std::move(alts), s), result, plus(env, sc.usage, joined)};
}

// ---------------------------------------------------------------------------
// Circuits

Inferred Engine::infer_box(const Env& env, const TermPtr& m, const TypePtr& out_hint) {
  const Span& s = m->span;
  TypePtr in = kind(shape_env(env), m->type);
  if (!is_simple_type(in))
    fail(ErrorKind::NotSimpleType, "box needs a simple input type, got " + show(in));
  TypePtr out = m->type2 ? kind(shape_env(env), m->type2) : out_hint;
  if (out) {
    if (!is_simple_type(out))
      fail(ErrorKind::NotSimpleType, "box needs a simple output type, got " + show(out));
    Inferred r = check(env, m->a, ty::bang(ty::lin_pi(std::string(kAnon), in, out)));
    return {tm::box(in, out, r.term, s), ty::circ(in, out), r.usage};
  }

  TermPtr inner = m->a;
  if (elab_ && inner->kind == TermKind::Lift) inner = inner->a;
  TermPtr fn;
  Usage usage;
  if (elab_ && inner->kind == TermKind::Lam) {
    At at(*this, inner->span);
    if (inner->type && !eq(env, kind(shape_env(env), inner->type), in))
      fail(ErrorKind::TypeMismatch, "binder annotation " + show(inner->type) +
                                        " does not match box input " + show(in));
    TermPtr body = inner->a;
    std::string x = freshen(env, inner->name, body);
    Env ext = env;
    ext.push_back(Entry{Name{x}, in});
    Inferred r = infer(ext, body);
    consume(r.usage, x, in);
    out = r.type;
    if (occurs_free(x, out)) {
      out = normalize(ext, out);
      if (occurs_free(x, out))
        fail(ErrorKind::TypeMismatch,
             "box output type " + show(out) + " depends on the circuit input");
    }
    require_param(env, r.usage, "lift");
    fn = tm::lift(tm::lam(x, inner->type ? in : nullptr, r.term, inner->span), m->a->span);
    usage = r.usage;
  } else {
    Inferred r = infer(env, m->a);
    TypePtr t = r.type;
    if (is_kind(t, TypeKind::Bang) && is_kind(t->dom, TypeKind::LinPi)) {
      t = t->dom;
    } else if (elab_ && is_kind(t, TypeKind::LinPi)) {
      require_param(env, r.usage, "lift");
      r.term = tm::lift(r.term, r.term->span);
    } else {
      fail(ErrorKind::TypeMismatch,
           "box expects a term of type !(S -o U), got " + show(t));
    }
    if (!eq(env, t->dom, in))
      fail(ErrorKind::TypeMismatch, "boxed function expects " + show(t->dom) +
                                        " but the box input is " + show(in));
    if (t->binder != kAnon && occurs_free(t->binder, t->cod))
      fail(ErrorKind::TypeMismatch,
           "box output type " + show(t->cod) + " depends on the circuit input");
    out = t->cod;
    fn = r.term;
    usage = r.usage;
  }
  out = normalize(env, out);
  if (!is_simple_type(out))
    fail(ErrorKind::NotSimpleType, "box needs a simple output type, got " + show(out));
  return {tm::box(in, out, fn, s), ty::circ(in, out), usage};
}

TypePtr Engine::simple_type_of(const TermPtr& iface) {
  switch (iface->kind) {
    case TermKind::Unit:
      return ty::unit();
    case TermKind::Label:
      return ty::of_sort(iface->sort);
    case TermKind::Pair:
      return ty::pair(simple_type_of(iface->a), simple_type_of(iface->b));
    default:
      break;
  }
  auto sp = const_spine(iface);
  if (sp && sp->head->name == "VCons" && sp->args.size() == 2) {
    TypePtr elem = simple_type_of(sp->args[0]);
    auto tail = const_spine(sp->args[1]);
    if (tail && tail->head->name == "VNil") return ty::vec(elem, tm::numeral(1));
    TypePtr rest = simple_type_of(sp->args[1]);
    if (rest->kind == TypeKind::Vec && alpha_eq(rest->dom, elem))
      return ty::vec(elem, tm::app(tm::cnst("Succ"), rest->len));
  }
  fail(ErrorKind::TypeMismatch, "circuit interface " + print_term(iface) +
                                    " is not a simple term");
}

// ---------------------------------------------------------------------------
// Constructors

TermPtr Engine::spine_term(const TermPtr& m, const Spine& sp,
                           const std::vector<TermPtr>& args) const {
  if (!elab_) return m;
  TermPtr out = tm::cnst(std::string(sp.head->name), m->span);
  for (const auto& a : args) out = tm::app(out, a, m->span);
  return out;
}

Inferred Engine::infer_spine(const Env& env, const TermPtr& m, const Spine& sp) {
  const std::string name(sp.head->name);
  if (static_cast<int>(sp.args.size()) != sp.head->arity)
    fail(ErrorKind::ArityMismatch, name + " expects " + std::to_string(sp.head->arity) +
                                       " arguments, got " + std::to_string(sp.args.size()));
  if (name == "Zero") return {m, ty::nat(), {}};
  if (name == "Succ") {
    Inferred r = check(env, sp.args[0], ty::nat());
    return {spine_term(m, sp, {r.term}), ty::nat(), r.usage};
  }
  if (name == "toNat") {
    Inferred r = check(env, sp.args[0], ty::list(ty::unit()));
    return {spine_term(m, sp, {r.term}), ty::nat(), r.usage};
  }
  if (name == "Cons") {
    Inferred h = infer(env, sp.args[0]);
    Inferred t = check(env, sp.args[1], ty::list(h.type));
    return {spine_term(m, sp, {h.term, t.term}), ty::list(h.type),
            plus(env, h.usage, t.usage)};
  }
  if (name == "VCons") {
    Inferred h = infer(env, sp.args[0]);
    auto tsp = const_spine(sp.args[1]);
    if (tsp && tsp->head->name == "VNil" && tsp->args.empty()) {
      TypePtr t = ty::vec(h.type, tm::numeral(1));
      return {spine_term(m, sp, {h.term, sp.args[1]}), t, h.usage};
    }
    Inferred t = infer(env, sp.args[1]);
    if (!is_kind(t.type, TypeKind::Vec) || !eq(env, t.type->dom, h.type))
      fail(ErrorKind::TypeMismatch, "VCons expects a tail of type Vec " + show(h.type) +
                                        " n, got " + show(t.type));
    TypePtr ty = ty::vec(h.type, tm::app(tm::cnst("Succ"), t.type->len));
    return {spine_term(m, sp, {h.term, t.term}), ty, plus(env, h.usage, t.usage)};
  }
  fail(ErrorKind::TypeMismatch,
       "cannot infer the type of " + name + "; add a type annotation");
}

std::optional<Inferred> Engine::check_spine(const Env& env, const TermPtr& m,
                                            const Spine& sp, const TypePtr& a) {
  const std::string name(sp.head->name);
  const bool list_ctor = name == "Nil" || name == "Cons";
  const bool vec_ctor = name == "VNil" || name == "VCons";
  if (!list_ctor && !vec_ctor) return std::nullopt;
  if (static_cast<int>(sp.args.size()) != sp.head->arity)
    fail(ErrorKind::ArityMismatch, name + " expects " + std::to_string(sp.head->arity) +
                                       " arguments, got " + std::to_string(sp.args.size()));
  if (list_ctor && is_kind(a, TypeKind::List)) {
    if (name == "Nil") return Inferred{spine_term(m, sp, {}), a, {}};
    Inferred h = check(env, sp.args[0], a->dom);
    Inferred t = check(env, sp.args[1], a);
    return Inferred{spine_term(m, sp, {h.term, t.term}), a, plus(env, h.usage, t.usage)};
  }
  if (vec_ctor && is_kind(a, TypeKind::Vec)) {
    TermPtr len = normalize_term(env, a->len);
    auto lsp = const_spine(len);
    if (name == "VNil") {
      if (!(lsp && lsp->head->name == "Zero"))
        fail(ErrorKind::TypeMismatch, "VNil cannot have type " + show(a));
      return Inferred{spine_term(m, sp, {}), a, {}};
    }
    if (!(lsp && lsp->head->name == "Succ" && lsp->args.size() == 1))
      fail(ErrorKind::TypeMismatch, "VCons cannot have type " + show(a));
    Inferred h = check(env, sp.args[0], a->dom);
    Inferred t = check(env, sp.args[1], ty::vec(a->dom, lsp->args[0]));
    return Inferred{spine_term(m, sp, {h.term, t.term}), a, plus(env, h.usage, t.usage)};
  }
  fail(ErrorKind::TypeMismatch, "constructor " + name + " cannot have type " + show(a));
}

}  // namespace

// ---------------------------------------------------------------------------
// Public interface

namespace {

Env env_of(const Context& g) {
  Env env;
  env.reserve(g.size());
  for (const auto& b : g) env.push_back(Entry{b.name, b.type});
  return env;
}

// Linear bindings must be consumed exactly as their index says.
void validate_usage(const Context& g, const Usage& u) {
  for (const auto& b : g) {
    if (is_parameter_type(b.type)) continue;
    auto it = u.find(b.name);
    Index used = it == u.end() ? Index::Zero : it->second;
    if (used != b.index)
      throw TypeError(ErrorKind::LinearityViolation, b.type->span,
                      "linear resource " + to_string(b.name) + " has index " +
                          std::string(to_string(b.index)) + " but is used " +
                          std::string(to_string(used)) + " times");
  }
}

}  // namespace

Checker::Checker(CheckOptions opts) : opts_(std::move(opts)) {}

void Checker::wf_context(const Context& g) const {
  Engine e(types_, bodies_, opts_, opts_.elaborate);
  Env phi;
  for (const auto& b : g) {
    e.kind(phi, b.type);
    if (b.index == Index::Omega && !is_parameter_type(b.type))
      throw TypeError(ErrorKind::LinearityViolation, b.type->span,
                      to_string(b.name) + " has index w but its type " + show(b.type) +
                          " is not a parameter type");
    phi.push_back(Entry{b.name, shape_type(b.type)});
  }
}

TypePtr Checker::kind_check(const Context& phi, const TypePtr& a) const {
  for (const auto& b : phi)
    if (!is_parameter_type(b.type) && b.index != Index::Zero)
      throw TypeError(ErrorKind::NotParameterContext, a->span,
                      "kinding needs a parameter context, but " + to_string(b.name) +
                          " has linear type " + show(b.type));
  Engine e(types_, bodies_, opts_, opts_.elaborate);
  return e.kind(env_of(phi), a);
}

Inferred Checker::type_infer(const Context& g, const TermPtr& m) const {
  wf_context(g);
  Engine e(types_, bodies_, opts_, opts_.elaborate);
  Inferred r = e.infer(env_of(g), m);
  validate_usage(g, r.usage);
  return r;
}

Inferred Checker::type_check(const Context& g, const TermPtr& m, const TypePtr& a) const {
  wf_context(g);
  TypePtr k = kind_check(shape_ctx(g), a);
  Engine e(types_, bodies_, opts_, opts_.elaborate);
  Inferred r = e.check(env_of(g), m, k);
  validate_usage(g, r.usage);
  return r;
}

bool Checker::type_eq(const Context& phi, const TypePtr& a, const TypePtr& b) const {
  Engine e(types_, bodies_, opts_, false);
  return e.eq(env_of(phi), a, b);
}

TermPtr Checker::elaborate(const Context& g, const TermPtr& m, const TypePtr& expected) const {
  Engine e(types_, bodies_, opts_, true);
  Env env = env_of(g);
  return expected ? e.check(env, m, e.kind(env_of(shape_ctx(g)), expected)).term
                  : e.infer(env, m).term;
}

void Checker::add_global(const std::string& name, TypePtr type, TermPtr body) {
  types_[name] = std::move(type);
  if (body) bodies_[name] = std::move(body);
}

CheckedDecl Checker::check_declaration(const Declaration& d) {
  if (types_.count(d.name))
    throw TypeError(ErrorKind::TypeMismatch, d.span, "duplicate declaration of " + d.name);
  if (!d.body)
    throw TypeError(ErrorKind::TypeMismatch, d.span, d.name + " has no definition");
  try {
    Engine elab(types_, bodies_, opts_, opts_.elaborate);
    Engine strict(types_, bodies_, opts_, false);
    TypePtr type;
    TermPtr body;
    if (d.type) {
      type = elab.kind({}, d.type);
      if (!is_parameter_type(type))
        throw TypeError(ErrorKind::KindMismatch, d.type->span,
                        "top-level declaration " + d.name +
                            " must have a parameter type, got " + show(type));
      types_[d.name] = type;  // in scope for recursion
      body = elab.check({}, d.body, type).term;
    } else {
      Inferred r = elab.infer({}, d.body);
      type = r.type;
      body = r.term;
      if (!is_parameter_type(type)) {
        if (!opts_.elaborate)
          throw TypeError(ErrorKind::KindMismatch, d.span,
                          "top-level declaration " + d.name +
                              " must have a parameter type, got " + show(type));
        body = tm::lift(body, body->span);
        type = ty::bang(type);
      }
      types_[d.name] = type;
    }
    if (opts_.elaborate) strict.check({}, body, type);
    bodies_[d.name] = body;
    return CheckedDecl{d.name, type, body};
  } catch (const TypeError& e) {
    types_.erase(d.name);
    throw TypeError(e.kind(), e.span().valid() ? e.span() : d.span,
                    "in " + d.name + ": " + e.what());
  } catch (...) {
    types_.erase(d.name);
    throw;
  }
}

Program check_program(const std::vector<Declaration>& decls, CheckOptions opts) {
  Checker c(std::move(opts));
  Program p;
  for (const auto& d : decls) p.decls.push_back(c.check_declaration(d));
  p.globals = c.globals();
  return p;
}

}  // namespace pqd
