#pragma once

#include <optional>
#include <string>
#include <utility>

#include "lvbif/equilibria.hpp"
#include "lvbif/trunc_poly.hpp"

namespace lvbif {

// ---- single zero eigenvalue interaction of the MLV model ----

struct St1Data {
    double b2_star = 0, e_star = 0, x1_star = 0, x2_star = 0;
    double D1 = 0, D2 = 0, D3 = 0;
    double eps = 1;
    double x_scale = 0;  // x = x_scale * z2
    // a = a_z3 z3 + a_z3z3 z3^2 + a_z4 z4,  b = b_z4 z4 + b_z3 z3
    double a_z3 = 0, a_z3z3 = 0, a_z4 = 1;
    double b_z4 = 0, b_z3 = 0;
};

// Throws DegenerateModelError naming the first vanishing guard (D1, D2, a21, a22, a12, b1).
St1Data st1_point(const MlvParams& p);

// Unfolding coordinates of (e, b2) relative to the point: z3 = D2 (e - e*)/(b1 a12 a21), z4 = b2 - b2*.
std::pair<double, double> st1_unfolding_coords(const MlvParams& p, const St1Data& d, double e, double b2);
// (a, b) of the scalar minimal model.
std::pair<double, double> st1_param_map(const St1Data& d, double z3, double z4);

struct St1CentreManifold {
    TruncMultiPoly extended_z1dot;    // z1' from substituting the coordinate change into the MLV field
    TruncMultiPoly extended_z2dot;
    TruncMultiPoly quoted_z1dot;      // the closed-form extended system, for comparison
    TruncMultiPoly psi;               // quadratic centre-manifold graph z1 = psi(z2, z3, z4)
    TruncMultiPoly residual;          // dpsi/dz2 * z2' - z1' on z1 = psi
    TruncMultiPoly reduced_dynamics;  // z2' on z1 = psi, degree <= 3
    TruncMultiPoly quoted_reduced;    // closed-form reduced dynamics
};

// Variables (z1, z2, z3, z4), cap 3. psi_z2z2_delta perturbs the z2^2 coefficient of psi (test hook).
St1CentreManifold verify_st1_centre_manifold(const MlvParams& p, double psi_z2z2_delta = 0.0);

// ---- double zero eigenvalue interaction ----

struct St2Data {
    double x1_star = 0, e_star = 0, b2_star = 0;
    double gamma = 0, D3 = 0, D4 = 0;
    double eps = 1;
    double k1 = 0, k2 = 0, k3 = 0, k4 = 0, k5 = 0;
    std::string dbt_type;  // "saddle", "elliptic" or "focus"
};

// Throws DegenerateModelError naming the first vanishing guard.
St2Data st2_point(const MlvParams& p);
St2Params st2_minimal_params(const St2Data& d, double a, double b, bool with_extension = false);

// Left-hand sides of 2 eps k1^2 - k1 k2 - 1 = 0 and 3 k1 k3 - 1 = 0.
std::pair<double, double> conditions_residual(double k1, double k2, double k3, double eps);

// Residual g' f1 - f2(x, g) in (x, a, b), cap 6, with g = a k1 + b k1 x + eps k1 x^2 + x^3/3.
TruncMultiPoly invariant_manifold_check(double k1, double k2, double k3, double eps);
// f2(x, 0, a, b) - x g(x, a, b)/k1 in (x, a, b).
TruncMultiPoly equilibrium_manifold_identity(double k1, double k3, double eps);

// ---- cusp relation of the scalar model ----

std::pair<double, double> cusp_map(double a, double b);  // (mu, nu)
double cusp_map_jacobian_det(double a, double b);
double cusp_discriminant(double mu, double nu);  // mu^2/4 + nu^3/27

struct St1Nondegeneracy {
    double fold_df_da = 0, fold_d2f_dx2 = 0;                  // at x1 = x2 = -b/2, a = b^2/4
    double tc_df_da = 0, tc_d2f_dadx = 0, tc_d2f_dx2 = 0;     // at x = 0, a = 0
    // the same quantities by central differences of the model field
    double fd_fold_df_da = 0, fd_fold_d2f_dx2 = 0;
    double fd_tc_df_da = 0, fd_tc_d2f_dadx = 0, fd_tc_d2f_dx2 = 0;
};

St1Nondegeneracy st1_nondegeneracy(double b);

struct Min2Fold {
    double a_sn = 0;
    std::optional<double> x_sn;
};

// Fold line of the nontrivial equilibria of ST2_MIN; needs 1 - 3 k3 b >= 0.
Min2Fold min2_sn_curve(double b, double eps, double k3, std::optional<double> k1 = std::nullopt);

// ---- map to the truncated DBT unfolding ----

struct DbtMapData {
    double a_bar = 0, b_bar = 0;
    double mu1 = 0, mu2 = 0, nu = 0;
    // z1 = x + z1_b b + z1_xb x b + z1_bb b^2,  z2 = y + z2_by b y
    double z1_b = 0, z1_xb = 0, z1_bb = 0, z2_by = 0;
};

DbtMapData dbt_map(double a, double b, double eps, double k1, double k2);
std::pair<double, double> dbt_coordinates(const DbtMapData& d, double x, double y, double b);

struct DbtSurfaceResiduals {
    double s = 0;   // embedding surface
    double sn = 0;  // saddle-node surface 27 mu1^2 + 4 eps mu2^3
};

DbtSurfaceResiduals dbt_surfaces(double mu1, double mu2, double nu, double eps, double k1, double k2);

struct GammaCurves {
    double sn_mu1 = 0, sn_mu2 = 0;
    double tc_mu1 = 0, tc_mu2 = 0;
};

// Throws DegenerateModelError when 3 k1 = eps k2.
GammaCurves gamma_curves(double nu, double eps, double k1, double k2);

// Central-difference slope of the saddle-node residual along the embedding surface, moving mu2
// at fixed nu (mu1 solved from the surface equation).
double dbt_sn_slope_on_s(double mu2, double nu, double eps, double k1, double k2, double h);

// ---- Hopf ----

// First Lyapunov coefficient of a planar Hopf point; throws UsageError when the
// eigenvalues are not a purely imaginary pair.
double first_lyapunov(const ParameterSet& p, const StateVector& hopf_state);
// Same, from the Jacobian and the second/third derivative tensors d[i][j][k](l) = d^n f_i / dx_j dx_k (dx_l).
double first_lyapunov(const Matrix2& jac, const SecondDerivs& b, const ThirdDerivs& c);

}  // namespace lvbif
