#pragma once

#include <string>
#include <string_view>

namespace mutdist {

/// Which mutant-growth formulation a computation refers to.
enum class Setting {
  LuriaDelbruck,  ///< deterministic clone growth, m' = (1 + beta) m + eta
  LeaCoulson,     ///< stochastic clone growth, m' = m + Poisson(beta m) + eta
  Simplified,     ///< growth driven by the mean, m' = m + Poisson(beta M(t)) + eta
};

/// Short name used on the command line and in artifacts: "ld", "lc", "simplified".
[[nodiscard]] std::string_view to_string(Setting s) noexcept;

/// Accepts the short names (and the long enumerator names). Throws ValidationError.
[[nodiscard]] Setting parse_setting(std::string_view text);

}  // namespace mutdist
