#pragma once

#include <cmath>

namespace collar {

// Absolute constants of the collar model. kEps1 is the Keen area floor;
// everything else is derived from it or recorded from the construction.
inline constexpr double kEps1 = 3.5777087639996635;  // 8/sqrt(5)
inline constexpr double kEps1Sq = 12.8;              // (8/sqrt(5))^2, exact

/// Thick-part injectivity-radius floor, eps1/36. Configurable at call sites.
inline constexpr double kEps2Default = kEps1 / 36.0;

/// Lower injectivity-radius comparison constant; report checks only.
inline constexpr double kEps5 = 0.25;

// The cutoff used everywhere is the quintic smoothstep ramped down on
// [1/2, 1]. Its actual derivative bounds; |eta''| <= 4 is not achievable
// for this support, so the real constants are exported and threaded
// through every bound that cites them.
inline constexpr double kEtaMaxAbsD1 = 3.75;
inline const double kEtaMaxAbsD2 = 40.0 / std::sqrt(3.0);  // ~23.094

/// Recommended upper end of the core-length domain; warn above.
inline constexpr double kDeltaRecommendedMax = 0.5;

/// Largest exponent magnitude convertible to a finite double.
inline constexpr double kMaxExp = 700.0;

inline constexpr double kPi = 3.141592653589793238462643383279502884;

}  // namespace collar
