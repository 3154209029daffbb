// pqd: check, run and export circuits from .pqd programs.

#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "pqd/checker.hpp"
#include "pqd/frontend.hpp"
#include "pqd/stack.hpp"

namespace {

struct Config {
  std::string command;
  std::string input;
  std::string output;
  std::uint64_t fuel = 1'000'000;
  std::string format = "text";
  bool no_elab = false;
};

bool is_internal(pqd::ErrorKind k) {
  return k == pqd::ErrorKind::CircuitMutated || k == pqd::ErrorKind::InvalidCircuit ||
         k == pqd::ErrorKind::StuckTerm;
}

void emit(const Config& cfg, const std::string& text) {
  if (cfg.output.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(cfg.output, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + cfg.output);
  out << text;
}

int dispatch(const Config& cfg) {
  std::ifstream in(cfg.input, std::ios::binary);
  if (!in) {
    std::cerr << cfg.input << ": cannot read file\n";
    return 1;
  }
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string source = buf.str();

  try {
    auto decls = pqd::parse_program(source);
    pqd::CheckOptions opts;
    opts.elaborate = !cfg.no_elab;
    opts.fuel = cfg.fuel;
    pqd::Program program = pqd::check_program(decls, opts);

    if (cfg.command == "check") {
      std::string text;
      for (const auto& d : program.decls)
        text += d.name + " : " + pqd::print_type(d.type) + "\n";
      emit(cfg, text);
      return 0;
    }

    pqd::RunResult result = pqd::run_main(program.globals, pqd::EvalOptions{cfg.fuel});
    if (cfg.command == "run") {
      emit(cfg, pqd::print_term(result.final.term) + "\n");
      return 0;
    }
    if (!result.circuit) {
      std::cerr << cfg.input << ": main does not evaluate to a boxed circuit\n";
      return 1;
    }
    pqd::validate(result.circuit->circuit);
    if (cfg.command == "circuit")
      emit(cfg, pqd::export_text(pqd::canonical_relabel(*result.circuit)));
    else
      emit(cfg, pqd::export_gate_count(pqd::gate_count(result.circuit->circuit)));
    return 0;
  } catch (const pqd::Diagnostic& e) {
    std::cerr << e.render(cfg.input) << "\n";
    return is_internal(e.kind()) ? 2 : 1;
  } catch (const std::exception& e) {
    std::cerr << cfg.input << ": internal error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dependently typed Proto-Quipper toolkit"};
  app.require_subcommand(1);
  Config cfg;

  struct Command {
    const char* name;
    const char* help;
  };
  const Command commands[] = {
      {"check", "Type-check a program and print each declaration's type"},
      {"run", "Evaluate main and print the resulting value"},
      {"circuit", "Evaluate main and write its boxed circuit as text"},
      {"count", "Evaluate main and write the gate count of its circuit"},
  };
  for (const auto& c : commands) {
    CLI::App* sub = app.add_subcommand(c.name, c.help);
    sub->add_option("file", cfg.input, "Source file (.pqd)")->required();
    sub->add_option("-o,--output", cfg.output, "Write output here instead of stdout");
    sub->add_option("--fuel", cfg.fuel, "Evaluation step budget");
    sub->add_option("--format", cfg.format, "Output format")
        ->check(CLI::IsMember({"text"}));
    sub->add_flag("--no-elab", cfg.no_elab,
                  "Require fully explicit lift/force (no elaboration)");
    sub->callback([&cfg, name = c.name] { cfg.command = name; });
  }

  CLI11_PARSE(app, argc, argv);
  int rc = 0;
  pqd::run_with_stack(pqd::kLargeStack, [&] { rc = dispatch(cfg); });
  return rc;
}
