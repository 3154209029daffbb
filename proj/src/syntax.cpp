#include "pqd/syntax.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <utility>

#include "pqd/circuit.hpp"

namespace pqd {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::LinearityViolation: return "LinearityViolation";
    case ErrorKind::UnboundName: return "UnboundName";
    case ErrorKind::KindMismatch: return "KindMismatch";
    case ErrorKind::TypeMismatch: return "TypeMismatch";
    case ErrorKind::NotParameterContext: return "NotParameterContext";
    case ErrorKind::NotSimpleType: return "NotSimpleType";
    case ErrorKind::NotParameterTerm: return "NotParameterTerm";
    case ErrorKind::ArityMismatch: return "ArityMismatch";
    case ErrorKind::MismatchedContexts: return "MismatchedContexts";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::InterfaceMismatch: return "InterfaceMismatch";
    case ErrorKind::NotReversible: return "NotReversible";
    case ErrorKind::InvalidCircuit: return "InvalidCircuit";
    case ErrorKind::StuckTerm: return "StuckTerm";
    case ErrorKind::ResourceExhausted: return "ResourceExhausted";
    case ErrorKind::CircuitMutated: return "CircuitMutated";
    case ErrorKind::NoMain: return "NoMain";
  }
  return "Error";
}

std::string Diagnostic::render(std::string_view file) const {
  std::string out(file);
  out += ':' + std::to_string(span_.line) + ':' + std::to_string(span_.col) +
         ": " + std::string(to_string(kind_)) + ": " + what();
  return out;
}

// ---------------------------------------------------------------------------
// Type builders

namespace {

TypePtr make_type(TypeKind k, Span s, std::string binder = {},
                  TypePtr dom = nullptr, TypePtr cod = nullptr,
                  TermPtr len = nullptr) {
  return std::make_shared<const Type>(Type{k, std::move(binder), std::move(dom),
                                           std::move(cod), std::move(len), s});
}

}  // namespace

namespace ty {
TypePtr qubit(Span s) { return make_type(TypeKind::Qubit, s); }
TypePtr bit(Span s) { return make_type(TypeKind::Bit, s); }
TypePtr unit(Span s) { return make_type(TypeKind::Unit, s); }
TypePtr nat(Span s) { return make_type(TypeKind::Nat, s); }
TypePtr list(TypePtr elem, Span s) {
  return make_type(TypeKind::List, s, {}, std::move(elem));
}
TypePtr vec(TypePtr elem, TermPtr len, Span s) {
  return make_type(TypeKind::Vec, s, {}, std::move(elem), nullptr,
                   std::move(len));
}
TypePtr bang(TypePtr inner, Span s) {
  return make_type(TypeKind::Bang, s, {}, std::move(inner));
}
TypePtr lin_pi(std::string binder, TypePtr dom, TypePtr cod, Span s) {
  return make_type(TypeKind::LinPi, s, std::move(binder), std::move(dom),
                   std::move(cod));
}
TypePtr tensor(std::string binder, TypePtr dom, TypePtr cod, Span s) {
  return make_type(TypeKind::Tensor, s, std::move(binder), std::move(dom),
                   std::move(cod));
}
TypePtr int_pi(std::string binder, TypePtr dom, TypePtr cod, Span s) {
  return make_type(TypeKind::IntPi, s, std::move(binder), std::move(dom),
                   std::move(cod));
}
TypePtr circ(TypePtr in, TypePtr out, Span s) {
  return make_type(TypeKind::Circ, s, {}, std::move(in), std::move(out));
}
TypePtr arrow(TypePtr dom, TypePtr cod) {
  return lin_pi(std::string(kAnon), std::move(dom), std::move(cod));
}
TypePtr pair(TypePtr left, TypePtr right) {
  return tensor(std::string(kAnon), std::move(left), std::move(right));
}
TypePtr of_sort(Sort sort) { return sort == Sort::Qubit ? qubit() : bit(); }
}  // namespace ty

// ---------------------------------------------------------------------------
// Term builders

namespace {

TermPtr make_term(Term t) { return std::make_shared<const Term>(std::move(t)); }

Term blank(TermKind k, Span s) {
  Term t{};
  t.kind = k;
  t.span = s;
  return t;
}

}  // namespace

namespace tm {
TermPtr unit(Span s) { return make_term(blank(TermKind::Unit, s)); }
TermPtr var(std::string name, Span s) {
  Term t = blank(TermKind::Var, s);
  t.name = std::move(name);
  return make_term(std::move(t));
}
TermPtr label(LabelId id, Sort sort, Span s) {
  Term t = blank(TermKind::Label, s);
  t.label = id;
  t.sort = sort;
  return make_term(std::move(t));
}
TermPtr cnst(std::string name, Span s) {
  Term t = blank(TermKind::Const, s);
  t.name = std::move(name);
  return make_term(std::move(t));
}
TermPtr lam(std::string x, TermPtr body, Span s) {
  return lam(std::move(x), nullptr, std::move(body), s);
}
TermPtr lam(std::string x, TypePtr annot, TermPtr body, Span s) {
  Term t = blank(TermKind::Lam, s);
  t.name = std::move(x);
  t.type = std::move(annot);
  t.a = std::move(body);
  return make_term(std::move(t));
}
TermPtr app(TermPtr f, TermPtr arg, Span s) {
  Term t = blank(TermKind::App, s);
  t.a = std::move(f);
  t.b = std::move(arg);
  return make_term(std::move(t));
}
TermPtr apps(TermPtr f, std::vector<TermPtr> args) {
  for (auto& a : args) f = app(std::move(f), std::move(a));
  return f;
}
TermPtr lift(TermPtr body, Span s) {
  Term t = blank(TermKind::Lift, s);
  t.a = std::move(body);
  return make_term(std::move(t));
}
TermPtr force(TermPtr body, Span s) {
  Term t = blank(TermKind::Force, s);
  t.a = std::move(body);
  return make_term(std::move(t));
}
TermPtr force_p(TermPtr body, Span s) {
  Term t = blank(TermKind::ForceP, s);
  t.a = std::move(body);
  return make_term(std::move(t));
}
TermPtr pair(TermPtr l, TermPtr r, Span s) {
  Term t = blank(TermKind::Pair, s);
  t.a = std::move(l);
  t.b = std::move(r);
  return make_term(std::move(t));
}
TermPtr let_pair(std::string x, std::string y, TermPtr scrut, TermPtr body,
                 Span s) {
  Term t = blank(TermKind::LetPair, s);
  t.name = std::move(x);
  t.name2 = std::move(y);
  t.a = std::move(scrut);
  t.b = std::move(body);
  return make_term(std::move(t));
}
TermPtr lam_p(std::string x, TypePtr annot, TermPtr body, Span s) {
  Term t = blank(TermKind::LamP, s);
  t.name = std::move(x);
  t.type = std::move(annot);
  t.a = std::move(body);
  return make_term(std::move(t));
}
TermPtr app_p(TermPtr f, TermPtr arg, Span s) {
  Term t = blank(TermKind::AppP, s);
  t.a = std::move(f);
  t.b = std::move(arg);
  return make_term(std::move(t));
}
TermPtr box(TypePtr in, TypePtr out, TermPtr body, Span s) {
  Term t = blank(TermKind::Box, s);
  t.type = std::move(in);
  t.type2 = std::move(out);
  t.a = std::move(body);
  return make_term(std::move(t));
}
TermPtr apply(TermPtr circ, TermPtr arg, Span s) {
  Term t = blank(TermKind::Apply, s);
  t.a = std::move(circ);
  t.b = std::move(arg);
  return make_term(std::move(t));
}
TermPtr apply_p(TermPtr circ, TermPtr arg, Span s) {
  Term t = blank(TermKind::ApplyP, s);
  t.a = std::move(circ);
  t.b = std::move(arg);
  return make_term(std::move(t));
}
TermPtr boxed(std::shared_ptr<const BoxedCircuit> bc, Span s) {
  Term t = blank(TermKind::Boxed, s);
  t.boxed = std::move(bc);
  return make_term(std::move(t));
}
TermPtr case_of(TermPtr scrut, std::vector<Alt> alts, Span s) {
  Term t = blank(TermKind::Case, s);
  t.a = std::move(scrut);
  t.alts = std::move(alts);
  return make_term(std::move(t));
}
TermPtr ann(TermPtr body, TypePtr type, Span s) {
  Term t = blank(TermKind::Ann, s);
  t.a = std::move(body);
  t.type = std::move(type);
  return make_term(std::move(t));
}
TermPtr numeral(std::uint64_t n, Span s) {
  TermPtr r = cnst("Zero", s);
  for (std::uint64_t i = 0; i < n; ++i) r = app(cnst("Succ", s), r, s);
  return r;
}
TermPtr list(const std::vector<TermPtr>& elems, Span s) {
  TermPtr r = cnst("Nil", s);
  for (auto it = elems.rbegin(); it != elems.rend(); ++it)
    r = app(app(cnst("Cons", s), *it, s), r, s);
  return r;
}
TermPtr vec(const std::vector<TermPtr>& elems, Span s) {
  TermPtr r = cnst("VNil", s);
  for (auto it = elems.rbegin(); it != elems.rend(); ++it)
    r = app(app(cnst("VCons", s), *it, s), r, s);
  return r;
}
}  // namespace tm

TermPtr with_span(const TermPtr& t, Span s) {
  Term copy = *t;
  copy.span = s;
  return make_term(std::move(copy));
}

// ---------------------------------------------------------------------------
// Constants

const ConstInfo* lookup_const(std::string_view name) {
  static const std::array<ConstInfo, 7> kData{{
      {"Zero", ConstKind::Constructor, 0},
      {"Succ", ConstKind::Constructor, 1},
      {"Nil", ConstKind::Constructor, 0},
      {"Cons", ConstKind::Constructor, 2},
      {"VNil", ConstKind::Constructor, 0},
      {"VCons", ConstKind::Constructor, 2},
      {"toNat", ConstKind::ToNat, 1},
  }};
  for (const auto& c : kData)
    if (c.name == name) return &c;
  static const std::vector<ConstInfo> kGates = [] {
    std::vector<ConstInfo> v;
    for (const auto& g : gate_table())
      v.push_back(ConstInfo{g.name, ConstKind::Gate, 0});
    return v;
  }();
  for (const auto& c : kGates)
    if (c.name == name) return &c;
  return nullptr;
}

std::optional<Spine> const_spine(const TermPtr& t) {
  std::vector<TermPtr> args;
  const Term* cur = t.get();
  while (cur->kind == TermKind::App || cur->kind == TermKind::AppP) {
    args.push_back(cur->b);
    cur = cur->a.get();
  }
  if (cur->kind != TermKind::Const) return std::nullopt;
  const ConstInfo* info = lookup_const(cur->name);
  if (!info) return std::nullopt;
  std::reverse(args.begin(), args.end());
  return Spine{info, std::move(args)};
}

std::optional<std::uint64_t> as_numeral(const TermPtr& t) {
  std::uint64_t n = 0;
  TermPtr cur = t;
  while (true) {
    auto sp = const_spine(cur);
    if (!sp) return std::nullopt;
    if (sp->head->name == "Zero" && sp->args.empty()) return n;
    if (sp->head->name != "Succ" || sp->args.size() != 1) return std::nullopt;
    ++n;
    cur = sp->args[0];
  }
}

// ---------------------------------------------------------------------------
// Contexts

std::string to_string(const Name& n) {
  if (const auto* s = std::get_if<std::string>(&n)) return *s;
  return label_text(std::get<LabelId>(n));
}

namespace {

void check_omega(const Binding& b) {
  if (b.index == Index::Omega && !is_parameter_type(b.type))
    throw TypeError(ErrorKind::LinearityViolation, b.type ? b.type->span : Span{},
                    "'" + to_string(b.name) +
                        "' would be used more than once but its type is not a "
                        "parameter type");
}

}  // namespace

Context ctx_add(const Context& g1, const Context& g2) {
  if (g1.size() != g2.size())
    throw TypeError(ErrorKind::MismatchedContexts, {},
                    "contexts have different lengths");
  Context out;
  out.reserve(g1.size());
  for (std::size_t i = 0; i < g1.size(); ++i) {
    if (g1[i].name != g2[i].name || !alpha_eq(g1[i].type, g2[i].type))
      throw TypeError(ErrorKind::MismatchedContexts, {},
                      "contexts disagree at '" + to_string(g1[i].name) + "'");
    Binding b{g1[i].name, g1[i].index + g2[i].index, g1[i].type};
    check_omega(b);
    out.push_back(std::move(b));
  }
  return out;
}

Context ctx_scale(Index k, const Context& g) {
  Context out;
  out.reserve(g.size());
  for (const auto& b : g) {
    Binding nb{b.name, k * b.index, b.type};
    check_omega(nb);
    out.push_back(std::move(nb));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Predicates

bool is_parameter_type(const TypePtr& a) {
  switch (a->kind) {
    case TypeKind::Unit:
    case TypeKind::Nat:
    case TypeKind::Bang:
    case TypeKind::Circ:
      return true;
    case TypeKind::Qubit:
    case TypeKind::Bit:
    case TypeKind::LinPi:
      return false;
    case TypeKind::List:
    case TypeKind::Vec:
      return is_parameter_type(a->dom);
    case TypeKind::Tensor:
    case TypeKind::IntPi:
      return is_parameter_type(a->dom) && is_parameter_type(a->cod);
  }
  return false;
}

bool is_simple_type(const TypePtr& a) {
  switch (a->kind) {
    case TypeKind::Unit:
    case TypeKind::Qubit:
    case TypeKind::Bit:
      return true;
    case TypeKind::Tensor:
      return !occurs_free(a->binder, a->cod) && is_simple_type(a->dom) &&
             is_simple_type(a->cod);
    case TypeKind::Vec:
      return is_simple_type(a->dom);
    default:
      return false;
  }
}

bool is_parameter_term(const TermPtr& m) {
  switch (m->kind) {
    case TermKind::Unit:
    case TermKind::Var:
    case TermKind::Const:
    case TermKind::Lift:
    case TermKind::Boxed:
      return true;
    case TermKind::Label:
    case TermKind::Lam:
    case TermKind::Force:
    case TermKind::Apply:
      return false;
    case TermKind::LamP:
    case TermKind::ForceP:
    case TermKind::Box:
      return is_parameter_term(m->a);
    case TermKind::Ann:
      return is_parameter_term(m->a) && is_parameter_type(m->type);
    case TermKind::AppP:
    case TermKind::Pair:
    case TermKind::LetPair:
    case TermKind::ApplyP:
      return is_parameter_term(m->a) && is_parameter_term(m->b);
    case TermKind::App: {
      auto sp = const_spine(m);
      if (!sp || sp->head->kind == ConstKind::Gate ||
          static_cast<int>(sp->args.size()) > sp->head->arity)
        return false;
      return std::all_of(sp->args.begin(), sp->args.end(),
                         [](const TermPtr& t) { return is_parameter_term(t); });
    }
    case TermKind::Case:
      return is_parameter_term(m->a) &&
             std::all_of(m->alts.begin(), m->alts.end(), [](const Alt& a) {
               return is_parameter_term(a.body);
             });
  }
  return false;
}

bool is_value(const TermPtr& m) {
  switch (m->kind) {
    case TermKind::Unit:
    case TermKind::Var:
    case TermKind::Label:
    case TermKind::Lam:
    case TermKind::LamP:
    case TermKind::Lift:
    case TermKind::Boxed:
      return true;
    case TermKind::Pair:
      return is_value(m->a) && is_value(m->b);
    case TermKind::Const:
    case TermKind::App:
    case TermKind::AppP: {
      auto sp = const_spine(m);
      if (!sp || sp->head->kind == ConstKind::Gate) return false;
      const auto n = static_cast<int>(sp->args.size());
      if (n > sp->head->arity) return false;
      if (sp->head->kind == ConstKind::ToNat && n == sp->head->arity)
        return false;
      return std::all_of(sp->args.begin(), sp->args.end(),
                         [](const TermPtr& t) { return is_value(t); });
    }
    default:
      return false;
  }
}

// ---------------------------------------------------------------------------
// Free names

namespace {

void collect(const TypePtr& a, FreeNames& out);

void collect_scoped(const TermPtr& m, std::initializer_list<std::string> bound,
                    FreeNames& out);

void collect(const TermPtr& m, FreeNames& out) {
  if (!m) return;
  switch (m->kind) {
    case TermKind::Var:
      out.vars.insert(m->name);
      return;
    case TermKind::Label:
      out.labels.insert(m->label);
      return;
    case TermKind::Unit:
    case TermKind::Const:
    case TermKind::Boxed:
      return;
    case TermKind::Lam:
    case TermKind::LamP:
      if (m->type) collect(m->type, out);
      collect_scoped(m->a, {m->name}, out);
      return;
    case TermKind::LetPair:
      collect(m->a, out);
      collect_scoped(m->b, {m->name, m->name2}, out);
      return;
    case TermKind::Case:
      collect(m->a, out);
      for (const auto& alt : m->alts) {
        FreeNames inner;
        collect(alt.body, inner);
        for (const auto& v : alt.vars) inner.vars.erase(v);
        out.vars.insert(inner.vars.begin(), inner.vars.end());
        out.labels.insert(inner.labels.begin(), inner.labels.end());
      }
      return;
    default:
      if (m->type) collect(m->type, out);
      if (m->type2) collect(m->type2, out);
      collect(m->a, out);
      collect(m->b, out);
      return;
  }
}

void collect_scoped(const TermPtr& m, std::initializer_list<std::string> bound,
                    FreeNames& out) {
  FreeNames inner;
  collect(m, inner);
  for (const auto& b : bound) inner.vars.erase(b);
  out.vars.insert(inner.vars.begin(), inner.vars.end());
  out.labels.insert(inner.labels.begin(), inner.labels.end());
}

void collect(const TypePtr& a, FreeNames& out) {
  if (!a) return;
  switch (a->kind) {
    case TypeKind::Vec:
      collect(a->dom, out);
      collect(a->len, out);
      return;
    case TypeKind::LinPi:
    case TypeKind::Tensor:
    case TypeKind::IntPi: {
      collect(a->dom, out);
      FreeNames inner;
      collect(a->cod, inner);
      inner.vars.erase(a->binder);
      out.vars.insert(inner.vars.begin(), inner.vars.end());
      out.labels.insert(inner.labels.begin(), inner.labels.end());
      return;
    }
    default:
      collect(a->dom, out);
      collect(a->cod, out);
      return;
  }
}

}  // namespace

FreeNames free_names(const TermPtr& m) {
  FreeNames out;
  collect(m, out);
  return out;
}

FreeNames free_names(const TypePtr& a) {
  FreeNames out;
  collect(a, out);
  return out;
}

bool occurs_free(const std::string& x, const TermPtr& m) {
  return free_names(m).vars.count(x) != 0;
}

bool occurs_free(const std::string& x, const TypePtr& a) {
  return free_names(a).vars.count(x) != 0;
}

std::string fresh_name(const std::string& base,
                       const std::set<std::string>& avoid) {
  std::string stem = base == kAnon || base.empty() ? "x" : base;
  while (!stem.empty() && std::isdigit(static_cast<unsigned char>(stem.back())))
    stem.pop_back();
  if (stem.empty()) stem = "x";
  if (!avoid.count(stem) && stem != base && lookup_const(stem) == nullptr)
    return stem;
  for (std::uint64_t i = 1;; ++i) {
    std::string cand = stem + std::to_string(i);
    if (!avoid.count(cand)) return cand;
  }
}

// ---------------------------------------------------------------------------
// Substitution

namespace {

struct Subst {
  const std::string& x;
  const TermPtr& r;
  std::set<std::string> fv_r;

  // Renames binder `y` if it would capture a free variable of the
  // replacement. Returns the (possibly new) binder and scope.
  template <typename Scope>
  std::pair<std::string, Scope> rebind(const std::string& y, Scope scope,
                                       const std::set<std::string>& extra) {
    if (!fv_r.count(y) || !occurs_free(x, scope)) return {y, scope};
    std::set<std::string> avoid = fv_r;
    auto fs = free_names(scope).vars;
    avoid.insert(fs.begin(), fs.end());
    avoid.insert(extra.begin(), extra.end());
    avoid.insert(x);
    std::string y2 = fresh_name(y, avoid);
    return {y2, pqd::subst(scope, y, tm::var(y2))};
  }

  TypePtr go(const TypePtr& a) {
    if (!a) return a;
    switch (a->kind) {
      case TypeKind::Qubit:
      case TypeKind::Bit:
      case TypeKind::Unit:
      case TypeKind::Nat:
        return a;
      case TypeKind::Vec: {
        auto d = go(a->dom);
        auto l = go(a->len);
        if (d == a->dom && l == a->len) return a;
        return ty::vec(d, l, a->span);
      }
      case TypeKind::List:
      case TypeKind::Bang:
      case TypeKind::Circ: {
        auto d = go(a->dom);
        auto c = go(a->cod);
        if (d == a->dom && c == a->cod) return a;
        Type copy = *a;
        copy.dom = d;
        copy.cod = c;
        return std::make_shared<const Type>(std::move(copy));
      }
      case TypeKind::LinPi:
      case TypeKind::Tensor:
      case TypeKind::IntPi: {
        auto d = go(a->dom);
        std::string binder = a->binder;
        TypePtr cod = a->cod;
        if (binder != x) {
          std::tie(binder, cod) = rebind(binder, cod, {});
          cod = go(cod);
        }
        if (d == a->dom && cod == a->cod && binder == a->binder) return a;
        Type copy = *a;
        copy.binder = binder;
        copy.dom = d;
        copy.cod = cod;
        return std::make_shared<const Type>(std::move(copy));
      }
    }
    return a;
  }

  TermPtr go(const TermPtr& m) {
    if (!m) return m;
    switch (m->kind) {
      case TermKind::Var:
        return m->name == x ? r : m;
      case TermKind::Unit:
      case TermKind::Label:
      case TermKind::Const:
      case TermKind::Boxed:
        return m;
      case TermKind::Lam:
      case TermKind::LamP: {
        auto annot = go(m->type);
        std::string binder = m->name;
        TermPtr body = m->a;
        if (binder != x) {
          std::tie(binder, body) = rebind(binder, body, {});
          body = go(body);
        }
        if (annot == m->type && body == m->a && binder == m->name) return m;
        Term copy = *m;
        copy.name = binder;
        copy.type = annot;
        copy.a = body;
        return make_term(std::move(copy));
      }
      case TermKind::LetPair: {
        auto scrut = go(m->a);
        std::string bx = m->name, by = m->name2;
        TermPtr body = m->b;
        if (bx != x && by != x) {
          std::tie(bx, body) = rebind(bx, body, {by});
          std::tie(by, body) = rebind(by, body, {bx});
          body = go(body);
        }
        if (scrut == m->a && body == m->b && bx == m->name && by == m->name2)
          return m;
        Term copy = *m;
        copy.name = bx;
        copy.name2 = by;
        copy.a = scrut;
        copy.b = body;
        return make_term(std::move(copy));
      }
      case TermKind::Case: {
        Term copy = *m;
        copy.a = go(m->a);
        bool changed = copy.a != m->a;
        for (auto& alt : copy.alts) {
          if (std::find(alt.vars.begin(), alt.vars.end(), x) != alt.vars.end())
            continue;
          TermPtr body = alt.body;
          for (auto& v : alt.vars) {
            std::set<std::string> others(alt.vars.begin(), alt.vars.end());
            std::tie(v, body) = rebind(v, body, others);
          }
          body = go(body);
          if (body != alt.body) changed = true;
          alt.body = body;
        }
        if (!changed) return m;
        return make_term(std::move(copy));
      }
      default: {
        auto a = go(m->a);
        auto b = go(m->b);
        auto t1 = go(m->type);
        auto t2 = go(m->type2);
        if (a == m->a && b == m->b && t1 == m->type && t2 == m->type2) return m;
        Term copy = *m;
        copy.a = a;
        copy.b = b;
        copy.type = t1;
        copy.type2 = t2;
        return make_term(std::move(copy));
      }
    }
  }
};

}  // namespace

TermPtr subst(const TermPtr& body, const std::string& x,
              const TermPtr& replacement) {
  Subst s{x, replacement, free_names(replacement).vars};
  return s.go(body);
}

TypePtr subst(const TypePtr& body, const std::string& x,
              const TermPtr& replacement) {
  Subst s{x, replacement, free_names(replacement).vars};
  return s.go(body);
}

// ---------------------------------------------------------------------------
// Alpha equivalence

namespace {

struct Alpha {
  std::vector<std::pair<std::string, std::string>> env;

  static std::ptrdiff_t find(
      const std::vector<std::pair<std::string, std::string>>& env,
      const std::string& n, bool left) {
    for (std::ptrdiff_t i = static_cast<std::ptrdiff_t>(env.size()) - 1; i >= 0;
         --i) {
      const auto& p = env[static_cast<std::size_t>(i)];
      if ((left ? p.first : p.second) == n) return i;
    }
    return -1;
  }

  bool var(const std::string& a, const std::string& b) const {
    auto i = find(env, a, true);
    auto j = find(env, b, false);
    if (i < 0 && j < 0) return a == b;
    return i == j;
  }

  template <typename T>
  bool scoped(std::vector<std::pair<std::string, std::string>> binders,
              const T& a, const T& b) {
    auto n = env.size();
    env.insert(env.end(), binders.begin(), binders.end());
    bool r = eq(a, b);
    env.resize(n);
    return r;
  }

  bool eq(const TypePtr& a, const TypePtr& b) {
    if (!a || !b) return a == b;
    if (a->kind != b->kind) return false;
    switch (a->kind) {
      case TypeKind::Qubit:
      case TypeKind::Bit:
      case TypeKind::Unit:
      case TypeKind::Nat:
        return true;
      case TypeKind::Vec:
        return eq(a->dom, b->dom) && eq(a->len, b->len);
      case TypeKind::LinPi:
      case TypeKind::Tensor:
      case TypeKind::IntPi:
        return eq(a->dom, b->dom) &&
               scoped({{a->binder, b->binder}}, a->cod, b->cod);
      default:
        return eq(a->dom, b->dom) && eq(a->cod, b->cod);
    }
  }

  bool eq(const TermPtr& a, const TermPtr& b) {
    if (!a || !b) return a == b;
    if (a->kind != b->kind) return false;
    switch (a->kind) {
      case TermKind::Unit:
        return true;
      case TermKind::Var:
        return var(a->name, b->name);
      case TermKind::Label:
        return a->label == b->label && a->sort == b->sort;
      case TermKind::Const:
        return a->name == b->name;
      case TermKind::Lam:
      case TermKind::LamP:
        return eq(a->type, b->type) && scoped({{a->name, b->name}}, a->a, b->a);
      case TermKind::LetPair:
        return eq(a->a, b->a) &&
               scoped({{a->name, b->name}, {a->name2, b->name2}}, a->b, b->b);
      case TermKind::Boxed: {
        const auto& x = *a->boxed;
        const auto& y = *b->boxed;
        return x.circuit == y.circuit && eq(x.in, y.in) && eq(x.out, y.out) &&
               eq(x.in_type, y.in_type) && eq(x.out_type, y.out_type);
      }
      case TermKind::Case: {
        if (!eq(a->a, b->a) || a->alts.size() != b->alts.size()) return false;
        for (std::size_t i = 0; i < a->alts.size(); ++i) {
          const auto& p = a->alts[i];
          const auto& q = b->alts[i];
          if (p.ctor != q.ctor || p.vars.size() != q.vars.size()) return false;
          std::vector<std::pair<std::string, std::string>> bs;
          for (std::size_t k = 0; k < p.vars.size(); ++k)
            bs.emplace_back(p.vars[k], q.vars[k]);
          if (!scoped(bs, p.body, q.body)) return false;
        }
        return true;
      }
      default:
        return eq(a->a, b->a) && eq(a->b, b->b) && eq(a->type, b->type) &&
               eq(a->type2, b->type2);
    }
  }
};

}  // namespace

bool alpha_eq(const TermPtr& a, const TermPtr& b) { return Alpha{}.eq(a, b); }
bool alpha_eq(const TypePtr& a, const TypePtr& b) { return Alpha{}.eq(a, b); }

std::vector<TermPtr> interface_labels(const TermPtr& t) {
  std::vector<TermPtr> out;
  auto walk = [&](auto&& self, const TermPtr& m) -> void {
    switch (m->kind) {
      case TermKind::Label:
        out.push_back(m);
        return;
      case TermKind::Pair:
        self(self, m->a);
        self(self, m->b);
        return;
      case TermKind::App:
      case TermKind::AppP:
        self(self, m->a);
        self(self, m->b);
        return;
      default:
        return;
    }
  };
  walk(walk, t);
  return out;
}

}  // namespace pqd
