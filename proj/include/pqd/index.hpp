#pragma once

#include <array>
#include <ostream>
#include <string_view>

namespace pqd {

/// Usage annotation on a context binding: unused, used exactly once, or
/// used an arbitrary number of times.
enum class Index { Zero, One, Omega };

inline constexpr std::array<Index, 3> kAllIndices{Index::Zero, Index::One,
                                                  Index::Omega};

/// Zero is the unit; any two nonzero operands give Omega.
constexpr Index operator+(Index k, Index l) {
  if (k == Index::Zero) return l;
  if (l == Index::Zero) return k;
  return Index::Omega;
}

/// Zero absorbs, One is the unit, Omega * Omega = Omega.
constexpr Index operator*(Index k, Index l) {
  if (k == Index::Zero || l == Index::Zero) return Index::Zero;
  if (k == Index::One) return l;
  if (l == Index::One) return k;
  return Index::Omega;
}

constexpr Index idx_add(Index k, Index l) { return k + l; }
constexpr Index idx_mul(Index k, Index l) { return k * l; }

/// Least upper bound in the order 0 < 1 < ω.
constexpr Index idx_join(Index k, Index l) {
  return static_cast<int>(k) >= static_cast<int>(l) ? k : l;
}

constexpr std::string_view to_string(Index k) {
  switch (k) {
    case Index::Zero: return "0";
    case Index::One: return "1";
    case Index::Omega: return "w";
  }
  return "?";
}

inline std::ostream& operator<<(std::ostream& os, Index k) {
  return os << to_string(k);
}

}  // namespace pqd
