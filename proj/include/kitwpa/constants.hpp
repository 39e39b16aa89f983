#pragma once

#include <numbers>

namespace kitwpa {

// Exact 2019 SI values.
struct PhysicalConstants {
    static constexpr double hbar = 1.054571817e-34;  // J s
    static constexpr double kb = 1.380649e-23;       // J/K
};

inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;

// BCS weak-coupling gap ratio Delta(0) = 1.76 kB Tc.
inline constexpr double bcs_gap_ratio = 1.76;

}  // namespace kitwpa
