#include "support.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "pqd/frontend.hpp"

namespace pqd::tsupport {
namespace {

const std::vector<std::string> kVars{"x", "y", "z", "f", "g", "n"};
const std::vector<std::string> kConsts{"Zero", "Succ", "Nil",  "Cons", "VNil",
                                       "VCons", "toNat", "H",  "CNOT", "Meas"};
const std::vector<std::string> kCtors{"Zero", "Succ", "Nil", "Cons", "Foo"};

int pick(std::mt19937& rng, int n) {
  return std::uniform_int_distribution<int>(0, n - 1)(rng);
}

template <class T>
const T& pick(std::mt19937& rng, const std::vector<T>& xs) {
  return xs[pick(rng, static_cast<int>(xs.size()))];
}

std::string binder(std::mt19937& rng) {
  return pick(rng, 3) == 0 ? std::string(kAnon) : pick(rng, kVars);
}

TermPtr term_at(std::mt19937& rng, int depth, bool internal);

TypePtr type_at(std::mt19937& rng, int depth, bool internal) {
  if (depth <= 0) {
    switch (pick(rng, 4)) {
      case 0: return ty::qubit();
      case 1: return ty::bit();
      case 2: return ty::unit();
      default: return ty::nat();
    }
  }
  auto sub = [&] { return type_at(rng, depth - 1, internal); };
  switch (pick(rng, 10)) {
    case 0: return ty::list(sub());
    case 1: return ty::vec(sub(), term_at(rng, depth - 2, internal));
    case 2: return ty::bang(sub());
    case 3: return ty::lin_pi(binder(rng), sub(), sub());
    case 4: return ty::tensor(binder(rng), sub(), sub());
    case 5: return ty::int_pi(binder(rng), sub(), sub());
    case 6: return ty::circ(sub(), sub());
    default: return type_at(rng, 0, internal);
  }
}

TermPtr term_at(std::mt19937& rng, int depth, bool internal) {
  if (depth <= 0) {
    switch (pick(rng, internal ? 6 : 5)) {
      case 0: return tm::unit();
      case 1: return tm::cnst(pick(rng, kConsts));
      case 2: return tm::numeral(static_cast<std::uint64_t>(pick(rng, 4)));
      case 5: return tm::label(LabelId{static_cast<std::uint32_t>(pick(rng, 20))},
                               pick(rng, 2) ? Sort::Qubit : Sort::Bit);
      default: return tm::var(pick(rng, kVars));
    }
  }
  auto sub = [&] { return term_at(rng, depth - 1, internal); };
  auto sub_ty = [&] { return type_at(rng, depth - 2, internal); };
  int n_cases = internal ? 19 : 15;
  switch (pick(rng, n_cases)) {
    case 0:
      return pick(rng, 2) ? tm::lam(pick(rng, kVars), sub())
                          : tm::lam(pick(rng, kVars), sub_ty(), sub());
    case 1: return tm::app(sub(), sub());
    case 2: return tm::lift(sub());
    case 3: return tm::force(sub());
    case 4: return tm::pair(sub(), sub());
    case 5: return tm::let_pair(pick(rng, kVars), pick(rng, kVars), sub(), sub());
    case 6: return tm::box(sub_ty(), pick(rng, 2) ? sub_ty() : nullptr, sub());
    case 7: return tm::apply(sub(), sub());
    case 8: {
      std::vector<Alt> alts;
      int k = 1 + pick(rng, 2);
      for (int i = 0; i < k; ++i) {
        std::vector<std::string> vars;
        int nv = pick(rng, 3);
        for (int j = 0; j < nv; ++j) vars.push_back(pick(rng, kVars));
        alts.push_back(Alt{pick(rng, kCtors), vars, sub(), {}});
      }
      return tm::case_of(sub(), std::move(alts));
    }
    case 9: return tm::ann(sub(), sub_ty());
    case 10: {
      std::vector<TermPtr> xs;
      int k = pick(rng, 3);
      for (int i = 0; i < k; ++i) xs.push_back(sub());
      return tm::list(xs);
    }
    case 11: return tm::vec({sub(), sub()});
    case 12: return tm::apps(tm::cnst("Cons"), {sub(), sub()});
    case 15: return tm::force_p(sub());
    case 16: return tm::lam_p(pick(rng, kVars), sub_ty(), sub());
    case 17: return tm::app_p(sub(), sub());
    case 18: return tm::apply_p(sub(), sub());
    default: return term_at(rng, 0, internal);
  }
}

}  // namespace

TypePtr random_type(std::mt19937& rng, GenOptions opts) {
  return type_at(rng, opts.depth, opts.internal);
}

TermPtr random_term(std::mt19937& rng, GenOptions opts) {
  return term_at(rng, opts.depth, opts.internal);
}

TermPtr random_param_value(std::mt19937& rng) {
  switch (pick(rng, 3)) {
    case 0: return tm::unit();
    case 1: return tm::numeral(static_cast<std::uint64_t>(pick(rng, 4)));
    default: {
      std::vector<TermPtr> xs(static_cast<std::size_t>(pick(rng, 3)), tm::unit());
      return tm::list(xs);
    }
  }
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

static std::vector<std::filesystem::path> pqd_files(const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> out;
  for (const auto& e : std::filesystem::directory_iterator(dir))
    if (e.path().extension() == ".pqd") out.push_back(e.path());
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::filesystem::path> corpus_files() {
  return pqd_files(std::filesystem::path(PQD_SOURCE_DIR) / "programs");
}

std::vector<std::filesystem::path> negative_files() {
  return pqd_files(std::filesystem::path(PQD_SOURCE_DIR) / "tests" / "negative");
}

NegativeCase read_negative(const std::filesystem::path& p) {
  NegativeCase c;
  c.path = p;
  c.source = read_file(p);
  std::istringstream in(c.source);
  std::string line;
  while (std::getline(in, line) && line.rfind("--", 0) == 0) {
    std::istringstream words(line.substr(2));
    std::string key;
    words >> key;
    if (key == "expect:") words >> c.kind >> c.line;
    if (key == "mode:") {
      std::string mode;
      words >> mode;
      c.strict = mode == "strict";
    }
  }
  return c;
}

Program load_program(const std::filesystem::path& p, CheckOptions opts) {
  return check_program(parse_program(read_file(p)), std::move(opts));
}

}  // namespace pqd::tsupport
