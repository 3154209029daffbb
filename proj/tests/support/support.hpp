#pragma once

#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "pqd/checker.hpp"
#include "pqd/syntax.hpp"

namespace pqd::tsupport {

/// Fixed seed so failures reproduce.
inline constexpr std::uint32_t kSeed = 20240611;

struct GenOptions {
  int depth = 4;
  /// Allow labels and primed forms.
  bool internal = true;
};

/// Arbitrary (not necessarily well-kinded) type over the full grammar.
TypePtr random_type(std::mt19937& rng, GenOptions opts = {});
/// Arbitrary term over the full grammar, excluding boxed circuit values.
TermPtr random_term(std::mt19937& rng, GenOptions opts = {});
/// A closed numeral, unit, or list of units.
TermPtr random_param_value(std::mt19937& rng);

std::string read_file(const std::filesystem::path& p);
/// Sorted paths of the well-typed corpus.
std::vector<std::filesystem::path> corpus_files();
/// Sorted paths of the negative programs.
std::vector<std::filesystem::path> negative_files();

/// Header of a negative program: `-- expect: <Kind> <line>` and optionally
/// `-- mode: strict` to check without elaboration.
struct NegativeCase {
  std::filesystem::path path;
  std::string source;
  std::string kind;
  std::uint32_t line = 0;
  bool strict = false;
};
NegativeCase read_negative(const std::filesystem::path& p);

/// Parses and checks a corpus file.
Program load_program(const std::filesystem::path& p, CheckOptions opts = {});

}  // namespace pqd::tsupport
