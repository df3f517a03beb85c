#pragma once

#include <numbers>
#include <vector>

namespace mots {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Samples of an axisymmetric scalar at the interior nodes of a ThetaGrid.
using Field = std::vector<double>;

/// Kernels with independent iterations (azimuthal modes, sweep rows,
/// randomized batteries) come in two flavours. `serial` is the reference
/// implementation; `parallel` distributes iterations with OpenMP and must
/// produce bit-identical results.
enum class Execution { serial, parallel };

}  // namespace mots
