#include "pqd/circuit.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace pqd {

const std::vector<GateInfo>& gate_table() {
  static const std::vector<GateInfo> kGates{
      {"H", {Sort::Qubit}, {Sort::Qubit}, "H"},
      {"X", {Sort::Qubit}, {Sort::Qubit}, "X"},
      {"Y", {Sort::Qubit}, {Sort::Qubit}, "Y"},
      {"Z", {Sort::Qubit}, {Sort::Qubit}, "Z"},
      {"S", {Sort::Qubit}, {Sort::Qubit}, "Sdg"},
      {"Sdg", {Sort::Qubit}, {Sort::Qubit}, "S"},
      {"T", {Sort::Qubit}, {Sort::Qubit}, "Tdg"},
      {"Tdg", {Sort::Qubit}, {Sort::Qubit}, "T"},
      {"CNOT", {Sort::Qubit, Sort::Qubit}, {Sort::Qubit, Sort::Qubit}, "CNOT"},
      {"CZ", {Sort::Qubit, Sort::Qubit}, {Sort::Qubit, Sort::Qubit}, "CZ"},
      {"Init0", {}, {Sort::Qubit}, ""},
      {"Meas", {Sort::Qubit}, {Sort::Bit}, ""},
      {"Discard", {Sort::Bit}, {}, ""},
  };
  return kGates;
}

const GateInfo* lookup_gate(std::string_view name) {
  for (const auto& g : gate_table())
    if (g.name == name) return &g;
  return nullptr;
}

namespace {

TypePtr sorts_type(const std::vector<Sort>& sorts) {
  if (sorts.empty()) return ty::unit();
  TypePtr t = ty::of_sort(sorts.back());
  for (auto it = sorts.rbegin() + 1; it != sorts.rend(); ++it)
    t = ty::pair(ty::of_sort(*it), t);
  return t;
}

std::vector<LabelId> ids(const std::vector<Wire>& ws) {
  std::vector<LabelId> out;
  for (const auto& w : ws) out.push_back(w.id);
  return out;
}

TermPtr rename_labels(const TermPtr& t, const std::map<LabelId, LabelId>& m) {
  switch (t->kind) {
    case TermKind::Label: {
      auto it = m.find(t->label);
      if (it == m.end())
        throw CircuitError(ErrorKind::InterfaceMismatch, t->span,
                           "interface label " + label_text(t->label) +
                               " is not a wire of the circuit");
      return tm::label(it->second, t->sort, t->span);
    }
    case TermKind::Pair:
      return tm::pair(rename_labels(t->a, m), rename_labels(t->b, m), t->span);
    case TermKind::App:
      return tm::app(rename_labels(t->a, m), rename_labels(t->b, m), t->span);
    case TermKind::AppP:
      return tm::app_p(rename_labels(t->a, m), rename_labels(t->b, m), t->span);
    default:
      return t;
  }
}

// Matches the connecting interface `c` against the boxed input interface `a`
// and records a-label -> c-label.
void match_interface(const TermPtr& c, const TermPtr& a,
                     std::map<LabelId, LabelId>& m) {
  auto fail = [&] {
    throw CircuitError(ErrorKind::InterfaceMismatch, c->span,
                       "interface does not match the circuit's input type");
  };
  if (c->kind == TermKind::Label && a->kind == TermKind::Label) {
    if (c->sort != a->sort) fail();
    m[a->label] = c->label;
    return;
  }
  if (c->kind == TermKind::Unit && a->kind == TermKind::Unit) return;
  if (c->kind == TermKind::Pair && a->kind == TermKind::Pair) {
    match_interface(c->a, a->a, m);
    match_interface(c->b, a->b, m);
    return;
  }
  auto sc = const_spine(c);
  auto sa = const_spine(a);
  if (sc && sa && sc->head == sa->head && sc->args.size() == sa->args.size()) {
    for (std::size_t i = 0; i < sc->args.size(); ++i)
      match_interface(sc->args[i], sa->args[i], m);
    return;
  }
  fail();
}

}  // namespace

TypePtr gate_type(const GateInfo& g) {
  return ty::circ(sorts_type(g.inputs), sorts_type(g.outputs));
}

BoxedCircuit gate_circuit(const GateInfo& g, LabelSupply& supply) {
  auto type = gate_type(g);
  TermPtr in = gen(type->dom, supply);
  TermPtr out = gen(type->cod, supply);
  Circuit c;
  c.inputs = interface_wires(in);
  c.outputs = interface_wires(out);
  c.gates.push_back(Gate{std::string(g.name), ids(c.inputs), ids(c.outputs)});
  return BoxedCircuit{in, std::move(c), out, type->dom, type->cod};
}

TermPtr gen(const TypePtr& s, LabelSupply& supply) {
  switch (s->kind) {
    case TypeKind::Unit:
      return tm::unit();
    case TypeKind::Qubit:
      return tm::label(supply.fresh(), Sort::Qubit);
    case TypeKind::Bit:
      return tm::label(supply.fresh(), Sort::Bit);
    case TypeKind::Tensor:
      if (is_simple_type(s)) {
        TermPtr l = gen(s->dom, supply);
        TermPtr r = gen(s->cod, supply);
        return tm::pair(l, r);
      }
      break;
    case TypeKind::Vec: {
      auto n = as_numeral(s->len);
      if (!n || !is_simple_type(s->dom)) break;
      std::vector<TermPtr> elems;
      for (std::uint64_t i = 0; i < *n; ++i) elems.push_back(gen(s->dom, supply));
      return tm::vec(elems);
    }
    default:
      break;
  }
  throw CircuitError(ErrorKind::NotSimpleType, s->span,
                     "cannot generate an interface for a type that is not a "
                     "closed simple type");
}

std::vector<Wire> interface_wires(const TermPtr& iface) {
  std::vector<Wire> out;
  for (const auto& l : interface_labels(iface)) out.push_back(Wire{l->label, l->sort});
  return out;
}

Circuit identity_circuit(const TermPtr& iface) {
  Circuit c;
  c.inputs = interface_wires(iface);
  c.outputs = c.inputs;
  return c;
}

AppendResult append(const Circuit& c, const TermPtr& iface,
                    const BoxedCircuit& boxed, LabelSupply& supply) {
  std::map<LabelId, LabelId> rename;
  match_interface(iface, boxed.in, rename);

  std::set<LabelId> consumed;
  for (const auto& w : interface_wires(iface)) {
    auto live = std::find_if(c.outputs.begin(), c.outputs.end(),
                             [&](const Wire& o) { return o.id == w.id; });
    if (live == c.outputs.end() || live->sort != w.sort ||
        !consumed.insert(w.id).second)
      throw CircuitError(ErrorKind::InterfaceMismatch, iface->span,
                         "label " + label_text(w.id) +
                             " is not a distinct live output of the circuit");
  }

  Circuit d = c;
  std::map<LabelId, Sort> sorts;
  for (const auto& w : boxed.circuit.outputs) sorts[w.id] = w.sort;
  for (const auto& g : boxed.circuit.gates) {
    Gate ng{g.name, {}, {}};
    for (auto in : g.inputs) {
      auto it = rename.find(in);
      if (it == rename.end())
        throw CircuitError(ErrorKind::InvalidCircuit, {},
                           "gate input " + label_text(in) + " is not live");
      ng.inputs.push_back(it->second);
    }
    for (auto out : g.outputs) {
      LabelId f = supply.fresh();
      rename[out] = f;
      ng.outputs.push_back(f);
    }
    d.gates.push_back(std::move(ng));
  }

  TermPtr out = rename_labels(boxed.out, rename);
  d.outputs = interface_wires(out);
  for (const auto& w : c.outputs)
    if (!consumed.count(w.id)) d.outputs.push_back(w);
  return AppendResult{std::move(d), std::move(out)};
}

BoxedCircuit reverse(const BoxedCircuit& boxed) {
  Circuit r;
  r.inputs = boxed.circuit.outputs;
  r.outputs = boxed.circuit.inputs;
  for (auto it = boxed.circuit.gates.rbegin(); it != boxed.circuit.gates.rend();
       ++it) {
    const GateInfo* info = lookup_gate(it->name);
    if (!info || info->inverse.empty())
      throw CircuitError(ErrorKind::NotReversible, {},
                         "gate " + it->name + " has no inverse");
    r.gates.push_back(Gate{std::string(info->inverse), it->outputs, it->inputs});
  }
  return BoxedCircuit{boxed.out, std::move(r), boxed.in, boxed.out_type,
                      boxed.in_type};
}

std::map<std::string, std::size_t> gate_count(const Circuit& c) {
  std::map<std::string, std::size_t> counts;
  for (const auto& g : c.gates) ++counts[g.name];
  return counts;
}

void validate(const Circuit& c) {
  auto fail = [](const std::string& msg) {
    throw CircuitError(ErrorKind::InvalidCircuit, {}, msg);
  };
  std::map<LabelId, Sort> live;
  std::set<LabelId> seen;
  for (const auto& w : c.inputs) {
    if (!seen.insert(w.id).second) fail("duplicate input " + label_text(w.id));
    live[w.id] = w.sort;
  }
  for (const auto& g : c.gates) {
    const GateInfo* info = lookup_gate(g.name);
    if (!info) fail("unknown gate " + g.name);
    if (g.inputs.size() != info->inputs.size() ||
        g.outputs.size() != info->outputs.size())
      fail("gate " + g.name + " has the wrong arity");
    for (std::size_t i = 0; i < g.inputs.size(); ++i) {
      auto it = live.find(g.inputs[i]);
      if (it == live.end() || it->second != info->inputs[i])
        fail("gate " + g.name + " consumes dead wire " + label_text(g.inputs[i]));
      live.erase(it);
    }
    for (std::size_t i = 0; i < g.outputs.size(); ++i) {
      if (!seen.insert(g.outputs[i]).second)
        fail("gate " + g.name + " reuses label " + label_text(g.outputs[i]));
      live[g.outputs[i]] = info->outputs[i];
    }
  }
  std::map<LabelId, Sort> expected;
  for (const auto& w : c.outputs)
    if (!expected.emplace(w.id, w.sort).second)
      fail("duplicate output " + label_text(w.id));
  if (expected != live) fail("declared outputs differ from the live wires");
}

BoxedCircuit canonical_relabel(const BoxedCircuit& boxed) {
  std::map<LabelId, LabelId> m;
  std::uint32_t next = 0;
  auto visit = [&](LabelId id) {
    if (!m.count(id)) m[id] = LabelId{next++};
  };
  for (const auto& l : interface_labels(boxed.in)) visit(l->label);
  for (const auto& w : boxed.circuit.inputs) visit(w.id);
  for (const auto& g : boxed.circuit.gates)
    for (auto o : g.outputs) visit(o);
  for (const auto& w : boxed.circuit.outputs) visit(w.id);

  auto map_wires = [&](const std::vector<Wire>& ws) {
    std::vector<Wire> out;
    for (const auto& w : ws) out.push_back(Wire{m.at(w.id), w.sort});
    return out;
  };
  Circuit c;
  c.inputs = map_wires(boxed.circuit.inputs);
  c.outputs = map_wires(boxed.circuit.outputs);
  for (const auto& g : boxed.circuit.gates) {
    Gate ng{g.name, {}, {}};
    for (auto i : g.inputs) ng.inputs.push_back(m.at(i));
    for (auto o : g.outputs) ng.outputs.push_back(m.at(o));
    c.gates.push_back(std::move(ng));
  }
  return BoxedCircuit{rename_labels(boxed.in, m), std::move(c),
                      rename_labels(boxed.out, m), boxed.in_type,
                      boxed.out_type};
}

std::string label_text(LabelId id) { return "l" + std::to_string(id.value); }

namespace {

std::string join_labels(const std::vector<LabelId>& ls) {
  std::string out;
  for (std::size_t i = 0; i < ls.size(); ++i) {
    if (i) out += ", ";
    out += label_text(ls[i]);
  }
  return out;
}

std::string wire_line(std::string_view head, const std::vector<Wire>& ws) {
  std::string out(head);
  for (std::size_t i = 0; i < ws.size(); ++i) {
    out += i ? ", " : " ";
    out += label_text(ws[i].id);
    out += ws[i].sort == Sort::Qubit ? ":Q" : ":B";
  }
  return out + "\n";
}

}  // namespace

std::string export_text(const BoxedCircuit& boxed) {
  std::string out = wire_line("INPUTS", interface_wires(boxed.in));
  for (const auto& g : boxed.circuit.gates) {
    out += "GATE " + g.name;
    if (!g.inputs.empty()) out += " " + join_labels(g.inputs);
    out += " ->";
    if (!g.outputs.empty()) out += " " + join_labels(g.outputs);
    out += "\n";
  }
  out += wire_line("OUTPUTS", interface_wires(boxed.out));
  return out;
}

std::string export_gate_count(const std::map<std::string, std::size_t>& counts) {
  std::ostringstream os;
  for (const auto& [name, n] : counts) os << name << ' ' << n << '\n';
  return os.str();
}

}  // namespace pqd
