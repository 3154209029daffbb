#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "pqd/syntax.hpp"

namespace pqd {

/// A live wire: label plus its sort.
struct Wire {
  LabelId id;
  Sort sort = Sort::Qubit;
  friend bool operator==(const Wire&, const Wire&) = default;
};

struct Gate {
  std::string name;
  std::vector<LabelId> inputs;
  std::vector<LabelId> outputs;
  friend bool operator==(const Gate&, const Gate&) = default;
};

/// A flat sequential gate list from `inputs` to `outputs`.
struct Circuit {
  std::vector<Wire> inputs;
  std::vector<Wire> outputs;
  std::vector<Gate> gates;
  friend bool operator==(const Circuit&, const Circuit&) = default;
};

/// A first-class circuit (a, C, b) with its interface types Circ(S, U).
struct BoxedCircuit {
  TermPtr in;
  Circuit circuit;
  TermPtr out;
  TypePtr in_type;
  TypePtr out_type;
};

/// Monotone source of globally fresh labels. Passed by reference through a
/// single evaluation run.
struct LabelSupply {
  std::uint32_t next = 0;
  LabelId fresh() { return LabelId{next++}; }
};

/// Static description of a built-in gate.
struct GateInfo {
  std::string_view name;
  std::vector<Sort> inputs;
  std::vector<Sort> outputs;
  std::string_view inverse;  // empty when irreversible
};

const GateInfo* lookup_gate(std::string_view name);
const std::vector<GateInfo>& gate_table();

/// Circ(S, U) of a gate constant.
TypePtr gate_type(const GateInfo& g);

/// Boxed circuit holding a single application of gate `g` on fresh labels.
BoxedCircuit gate_circuit(const GateInfo& g, LabelSupply& supply);

/// Globally fresh inhabitant of a simple type whose vector lengths are closed
/// numerals. Throws CircuitError(NotSimpleType) otherwise.
TermPtr gen(const TypePtr& s, LabelSupply& supply);

/// Wires of a closed simple term, in order.
std::vector<Wire> interface_wires(const TermPtr& iface);

Circuit identity_circuit(const TermPtr& iface);

struct AppendResult {
  Circuit circuit;
  TermPtr out;  // the boxed circuit's output interface, renamed
};

/// Connects the input interface of `boxed` to the outputs of `c` named by
/// `iface`. Internal and output wires of the boxed circuit receive fresh
/// labels; wires passing straight through keep the label they connect to.
/// Throws CircuitError(InterfaceMismatch).
AppendResult append(const Circuit& c, const TermPtr& iface,
                    const BoxedCircuit& boxed, LabelSupply& supply);

/// Gate list reversed with each gate replaced by its inverse; interfaces
/// swapped. Throws CircuitError(NotReversible).
BoxedCircuit reverse(const BoxedCircuit& boxed);

std::map<std::string, std::size_t> gate_count(const Circuit& c);

/// Replays the gate list from the inputs. Throws CircuitError(InvalidCircuit)
/// on a dead input, a reused label or an output mismatch.
void validate(const Circuit& c);

/// Renumbers labels in order of first appearance (input interface, then gate
/// outputs) so circuits equal up to label renaming compare equal.
BoxedCircuit canonical_relabel(const BoxedCircuit& boxed);

std::string export_text(const BoxedCircuit& boxed);
std::string export_gate_count(const std::map<std::string, std::size_t>& counts);

std::string label_text(LabelId id);

}  // namespace pqd
