#pragma once

#include <compare>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace nagaoka {

using cplx = std::complex<double>;

inline constexpr const char* kVersion = "0.1.0";

/// Bad input: malformed files, violated model conditions, out-of-range arguments.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A requested basis or matrix is larger than the configured dimension budget.
class BudgetError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// Solver non-convergence, ambiguous spin, inconsistent positivity certificate.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr std::size_t kDefaultDimensionBudget = 200000;

/// Largest basis dimension any assembly may produce. NAGAOKA_DIM_BUDGET overrides.
inline std::size_t dimension_budget() {
  if (const char* env = std::getenv("NAGAOKA_DIM_BUDGET"); env != nullptr && *env != '\0') {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (end != nullptr && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
  }
  return kDefaultDimensionBudget;
}

inline void check_budget(std::size_t dim, std::string_view what) {
  const std::size_t budget = dimension_budget();
  if (dim > budget) {
    throw BudgetError(std::string(what) + ": dimension " + std::to_string(dim) +
                      " exceeds budget " + std::to_string(budget));
  }
}

/// Total S^3 eigenvalue, stored as the integer 2M so half-integers are exact.
class Magnetization {
 public:
  constexpr Magnetization() = default;
  static constexpr Magnetization from_twice(int twice_m) { return Magnetization(twice_m); }

  /// Accepts "1/2", "-3/2", "0", "1", "0.5", "-1.5".
  static Magnetization parse(std::string_view text) {
    const std::string s(text);
    if (s.empty()) throw ValidationError("empty magnetization");
    if (const auto slash = s.find('/'); slash != std::string::npos) {
      if (s.substr(slash + 1) != "2") throw ValidationError("magnetization must be k/2: " + s);
      return from_twice(parse_int(s.substr(0, slash), s));
    }
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str() || *end != '\0') throw ValidationError("bad magnetization: " + s);
    const double twice = 2.0 * v;
    const auto rounded = static_cast<int>(twice >= 0 ? twice + 0.5 : twice - 0.5);
    if (std::abs(twice - rounded) > 1e-12) throw ValidationError("magnetization must be a half-integer: " + s);
    return from_twice(rounded);
  }

  [[nodiscard]] constexpr int twice() const { return twice_; }
  [[nodiscard]] constexpr double value() const { return 0.5 * twice_; }

  [[nodiscard]] std::string str() const {
    if (twice_ % 2 == 0) return std::to_string(twice_ / 2);
    return std::to_string(twice_) + "/2";
  }

  constexpr auto operator<=>(const Magnetization&) const = default;

 private:
  constexpr explicit Magnetization(int twice_m) : twice_(twice_m) {}

  static int parse_int(const std::string& part, const std::string& whole) {
    char* end = nullptr;
    const long v = std::strtol(part.c_str(), &end, 10);
    if (part.empty() || *end != '\0') throw ValidationError("bad magnetization: " + whole);
    return static_cast<int>(v);
  }

  int twice_ = 0;
};

/// Admissible sectors for |Λ| sites and N = |Λ| - 1 electrons, ascending.
inline std::vector<Magnetization> all_magnetizations(int sites) {
  std::vector<Magnetization> out;
  for (int t = -(sites - 1); t <= sites - 1; t += 2) out.push_back(Magnetization::from_twice(t));
  return out;
}

inline std::uint64_t binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  std::uint64_t r = 1;
  for (int i = 1; i <= k; ++i) r = r * static_cast<std::uint64_t>(n - k + i) / static_cast<std::uint64_t>(i);
  return r;
}

}  // namespace nagaoka
