#pragma once

namespace rtstat {

/// Euler's constant.
inline constexpr double kEulerGamma = 0.57721566490153286060651209008240243;

/// pi^2 / 6, the limiting variance of ln Geom(p) as p -> 0.
inline constexpr double kPiSqOver6 = 1.64493406684822643647241516664602519;

inline constexpr double kLn2 = 0.69314718055994530941723212145817657;

}  // namespace rtstat
