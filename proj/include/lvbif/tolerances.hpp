#pragma once

// Every threshold the library compares against lives here.
namespace lvbif::tol {

inline constexpr double kRootCluster = 1e-7;       // merge real roots closer than this
inline constexpr double kEigRel = 1e-8;            // nonhyperbolic if |Re lambda| <= kEigRel * spectral scale
inline constexpr double kSecondEigRel = 1e-6;      // ST2 (both zero) vs BT/ST1 on a fold curve
inline constexpr double kEquilibriumResidual = 1e-10;  // times max(1, |params|_inf)
inline constexpr double kIdentity = 1e-12;         // polynomial identities, times max input coefficient
inline constexpr double kSurface = 1e-10;          // DBT surface residuals
inline constexpr double kCorrector = 1e-11;        // Newton corrector on augmented systems
inline constexpr double kEventArclength = 1e-10;   // bisection width for events
inline constexpr double kConnectionParam = 1e-9;   // find_connection stopping width
inline constexpr double kShooting = 1e-10;         // limit-cycle return residual

}  // namespace lvbif::tol
