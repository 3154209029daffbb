#include "pqd/shape.hpp"

namespace pqd {

TypePtr shape_type(const TypePtr& a) {
  if (is_parameter_type(a)) return a;
  switch (a->kind) {
    case TypeKind::Qubit:
    case TypeKind::Bit:
      return ty::unit(a->span);
    case TypeKind::List:
      return ty::list(shape_type(a->dom), a->span);
    case TypeKind::Vec:
      return ty::vec(shape_type(a->dom), a->len, a->span);
    case TypeKind::LinPi:
    case TypeKind::IntPi:
      return ty::int_pi(a->binder, shape_type(a->dom), shape_type(a->cod),
                        a->span);
    case TypeKind::Tensor:
      return ty::tensor(a->binder, shape_type(a->dom), shape_type(a->cod),
                        a->span);
    default:
      return a;
  }
}

TermPtr shape_term(const TermPtr& m) {
  if (is_parameter_term(m)) return m;
  const Span s = m->span;
  switch (m->kind) {
    case TermKind::Label:
      return tm::unit(s);
    case TermKind::Lam:
    case TermKind::LamP:
      return tm::lam_p(m->name, m->type ? shape_type(m->type) : nullptr,
                       shape_term(m->a), s);
    case TermKind::App:
    case TermKind::AppP:
      return tm::app_p(shape_term(m->a), shape_term(m->b), s);
    case TermKind::Force:
    case TermKind::ForceP:
      return tm::force_p(shape_term(m->a), s);
    case TermKind::Pair:
      return tm::pair(shape_term(m->a), shape_term(m->b), s);
    case TermKind::LetPair:
      return tm::let_pair(m->name, m->name2, shape_term(m->a),
                          shape_term(m->b), s);
    case TermKind::Box:
      return tm::box(m->type, m->type2, shape_term(m->a), s);
    case TermKind::Apply:
    case TermKind::ApplyP:
      return tm::apply_p(shape_term(m->a), shape_term(m->b), s);
    case TermKind::Ann:
      return tm::ann(shape_term(m->a), shape_type(m->type), s);
    case TermKind::Case: {
      std::vector<Alt> alts = m->alts;
      for (auto& alt : alts) alt.body = shape_term(alt.body);
      return tm::case_of(shape_term(m->a), std::move(alts), s);
    }
    default:
      return m;
  }
}

Context shape_ctx(const Context& g) {
  Context out;
  out.reserve(g.size());
  for (const auto& b : g) out.push_back(Binding{b.name, b.index, shape_type(b.type)});
  return out;
}

}  // namespace pqd
