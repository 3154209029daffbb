#include "pqd/circuit.hpp"
#include "pqd/frontend.hpp"

namespace pqd {

namespace {

// Term precedence: 0 binders (\, let, case), 1 `@`, 2 application, 3 atoms.
// Type precedence: 0 arrows, 1 `*`, 2 prefix (!, List, Vec), 3 atoms.

std::string paren(bool wrap, std::string s) { return wrap ? "(" + s + ")" : s; }

std::string type_at(const TypePtr& a, int level);
std::string term_at(const TermPtr& m, int level);

// Numerals and list literals are only folded for plain applications, so the
// printed text reads back as the same tree.
std::optional<std::uint64_t> plain_numeral(const TermPtr& m) {
  std::uint64_t n = 0;
  const Term* cur = m.get();
  while (cur->kind == TermKind::App && cur->a->kind == TermKind::Const &&
         cur->a->name == "Succ") {
    ++n;
    cur = cur->b.get();
  }
  if (cur->kind == TermKind::Const && cur->name == "Zero") return n;
  return std::nullopt;
}

std::optional<std::vector<TermPtr>> plain_list(const TermPtr& m) {
  std::vector<TermPtr> elems;
  const Term* cur = m.get();
  while (cur->kind == TermKind::App && cur->a->kind == TermKind::App &&
         cur->a->a->kind == TermKind::Const && cur->a->a->name == "Cons") {
    elems.push_back(cur->a->b);
    cur = cur->b.get();
  }
  if (elems.empty() || cur->kind != TermKind::Const || cur->name != "Nil")
    return std::nullopt;
  return elems;
}

std::string binder_text(const std::string& x, const TypePtr& annot) {
  return annot ? "(" + x + " : " + type_at(annot, 0) + ")" : x;
}

std::string term_at(const TermPtr& m, int level) {
  switch (m->kind) {
    case TermKind::Unit:
      return "unit";
    case TermKind::Var:
      return m->name;
    case TermKind::Label:
      return std::string(m->sort == Sort::Qubit ? "#q" : "#b") +
             std::to_string(m->label.value);
    case TermKind::Const:
      if (m->name == "Zero") return "0";
      return m->name;
    case TermKind::Lam:
    case TermKind::LamP: {
      const TermKind k = m->kind;
      std::string out = k == TermKind::Lam ? "\\" : "\\'";
      TermPtr cur = m;
      for (bool first = true; cur->kind == k; cur = cur->a, first = false) {
        if (!first) out += " ";
        out += binder_text(cur->name, cur->type);
      }
      return paren(level > 0, out + " -> " + term_at(cur, 0));
    }
    case TermKind::App: {
      if (auto n = plain_numeral(m)) return std::to_string(*n);
      if (auto elems = plain_list(m)) {
        std::string out = "[";
        for (std::size_t i = 0; i < elems->size(); ++i) {
          if (i) out += ", ";
          out += term_at((*elems)[i], 0);
        }
        return out + "]";
      }
      return paren(level > 2, term_at(m->a, 2) + " " + term_at(m->b, 3));
    }
    case TermKind::AppP:
      return paren(level > 1, term_at(m->a, 1) + " @ " + term_at(m->b, 2));
    case TermKind::Lift:
      return paren(level > 2, "lift " + term_at(m->a, 3));
    case TermKind::Force:
      return paren(level > 2, "force " + term_at(m->a, 3));
    case TermKind::ForceP:
      return paren(level > 2, "force' " + term_at(m->a, 3));
    case TermKind::Box: {
      std::string ann = type_at(m->type, 0);
      if (m->type2) ann += "; " + type_at(m->type2, 0);
      return paren(level > 2, "box[" + ann + "] " + term_at(m->a, 3));
    }
    case TermKind::Pair:
      return "(" + term_at(m->a, 0) + ", " +
             (m->b->kind == TermKind::Pair ? term_at(m->b, 0).substr(1, std::string::npos)
                                           : term_at(m->b, 0) + ")");
    case TermKind::LetPair:
      return paren(level > 0, "let (" + m->name + ", " + m->name2 +
                                  ") = " + term_at(m->a, 0) + " in " + term_at(m->b, 0));
    case TermKind::Case: {
      std::string out = "case " + term_at(m->a, 0) + " of { ";
      for (std::size_t i = 0; i < m->alts.size(); ++i) {
        const Alt& alt = m->alts[i];
        if (i) out += " ; ";
        out += alt.ctor;
        for (const auto& v : alt.vars) out += " " + v;
        out += " -> " + term_at(alt.body, 0);
      }
      return paren(level > 0, out + " }");
    }
    case TermKind::Apply:
      return "apply(" + term_at(m->a, 0) + ", " + term_at(m->b, 0) + ")";
    case TermKind::ApplyP:
      return "apply'(" + term_at(m->a, 0) + ", " + term_at(m->b, 0) + ")";
    case TermKind::Boxed: {
      const BoxedCircuit& bc = *m->boxed;
      return "<circuit " + term_at(bc.in, 0) + " => " + term_at(bc.out, 0) + ", " +
             std::to_string(bc.circuit.gates.size()) + " gates>";
    }
    case TermKind::Ann:
      return "(" + term_at(m->a, 0) + " : " + type_at(m->type, 0) + ")";
  }
  return "?";
}

std::string type_at(const TypePtr& a, int level) {
  if (!a) return "?";
  switch (a->kind) {
    case TypeKind::Qubit:
      return "Qubit";
    case TypeKind::Bit:
      return "Bit";
    case TypeKind::Unit:
      return "Unit";
    case TypeKind::Nat:
      return "Nat";
    case TypeKind::List:
      return paren(level > 2, "List " + type_at(a->dom, 3));
    case TypeKind::Vec:
      return paren(level > 2, "Vec " + type_at(a->dom, 3) + " " + term_at(a->len, 3));
    case TypeKind::Bang:
      return paren(level > 2, "!" + type_at(a->dom, 2));
    case TypeKind::Circ:
      return "Circ(" + type_at(a->dom, 0) + ", " + type_at(a->cod, 0) + ")";
    case TypeKind::Tensor:
      if (a->binder == kAnon)
        return paren(level > 1, type_at(a->dom, 2) + " * " + type_at(a->cod, 1));
      return paren(level > 1, "(" + a->binder + " : " + type_at(a->dom, 0) + ") * " +
                                  type_at(a->cod, 1));
    case TypeKind::LinPi:
    case TypeKind::IntPi: {
      const char* arrow = a->kind == TypeKind::LinPi ? " -o " : " -> ";
      if (a->binder == kAnon)
        return paren(level > 0, type_at(a->dom, 1) + arrow + type_at(a->cod, 0));
      return paren(level > 0, "(" + a->binder + " : " + type_at(a->dom, 0) + ")" + arrow +
                                  type_at(a->cod, 0));
    }
  }
  return "?";
}

}  // namespace

std::string print_term(const TermPtr& m) { return term_at(m, 0); }
std::string print_type(const TypePtr& a) { return type_at(a, 0); }

std::string print_program(const std::vector<Declaration>& decls) {
  std::string out;
  for (std::size_t i = 0; i < decls.size(); ++i) {
    const Declaration& d = decls[i];
    if (i) out += "\n";
    if (d.type) out += d.name + " : " + print_type(d.type) + "\n";
    if (d.body) out += d.name + " = " + print_term(d.body) + "\n";
  }
  return out;
}

}  // namespace pqd
