#include "lvbif/normalform.hpp"

#include <cmath>
#include <complex>

namespace lvbif {

namespace {

void guard(double v, const char* name, const char* where) {
    if (v == 0.0 || !std::isfinite(v))
        throw DegenerateModelError(name, std::string(where) + ": nondegeneracy guard " + name + " != 0 violated");
}

double sign(double v) { return v > 0 ? 1.0 : (v < 0 ? -1.0 : 0.0); }

using Ex = TruncMultiPoly::Exponent;

}  // namespace

St1Data st1_point(const MlvParams& p) {
    St1Data d;
    d.D1 = p.a11 * p.a22 - p.a12 * p.a21;
    d.D2 = 2 * p.a11 * p.a22 - p.a12 * p.a21;
    d.D3 = 2 * p.a11 * p.a22 - p.a12 * p.a21 - p.a22 * p.a21;
    guard(d.D1, "D1", "st1_point");
    guard(d.D2, "D2", "st1_point");
    guard(p.a21, "a21", "st1_point");
    guard(p.a22, "a22", "st1_point");
    guard(p.a12, "a12", "st1_point");
    guard(p.b1, "b1", "st1_point");
    d.b2_star = p.b1 * p.a22 * p.a21 / d.D2;
    d.e_star = p.b1 * p.b1 * p.a22 * d.D1 / (d.D2 * d.D2);
    d.x1_star = -d.b2_star / p.a21;
    d.x2_star = 0;
    d.eps = sign(p.a22 * d.D1 * d.D2 / (p.b1 * p.a12));
    d.x_scale = std::sqrt(std::abs(p.a22 * d.D1 * d.D2 / (p.b1 * p.a12 * p.a21 * p.a21)));
    d.a_z3 = p.a21;
    d.a_z3z3 = p.a11 * d.D2 / (p.b1 * p.a12);
    d.a_z4 = 1;
    // the printed constant "d1" in this coefficient is read as D1
    d.b_z4 = d.eps * p.a21 * d.x_scale / d.D1;
    d.b_z3 = -d.b_z4 * d.D3 / p.a22;
    return d;
}

std::pair<double, double> st1_unfolding_coords(const MlvParams& p, const St1Data& d, double e, double b2) {
    return {d.D2 * (e - d.e_star) / (p.b1 * p.a12 * p.a21), b2 - d.b2_star};
}

std::pair<double, double> st1_param_map(const St1Data& d, double z3, double z4) {
    return {d.a_z3 * z3 + d.a_z3z3 * z3 * z3 + d.a_z4 * z4, d.b_z4 * z4 + d.b_z3 * z3};
}

St1CentreManifold verify_st1_centre_manifold(const MlvParams& p, double psi_z2z2_delta) {
    const St1Data d = st1_point(p);
    const std::vector<std::string> names{"z1", "z2", "z3", "z4"};
    constexpr int cap = 3;
    auto var = [&](const char* n) { return TruncMultiPoly::variable(names, cap, n); };
    auto cst = [&](double c) { return TruncMultiPoly::constant(names, cap, c); };
    const auto z1 = var("z1"), z2 = var("z2"), z3 = var("z3"), z4 = var("z4");

    const auto x1 = cst(d.x1_star) + z1 - (p.a22 / p.a21) * z2 + z3;
    const auto x2 = z2;
    const auto e = cst(d.e_star) + (p.b1 * p.a12 * p.a21 / d.D2) * z3;
    const auto b2 = cst(d.b2_star) + z4;
    const auto x1dot = x1 * (cst(p.b1) + p.a11 * x1 + p.a12 * x2) + e;
    const auto x2dot = x2 * (b2 + p.a21 * x1 + p.a22 * x2);

    St1CentreManifold r{.extended_z1dot = x1dot + (p.a22 / p.a21) * x2dot,
                        .extended_z2dot = x2dot,
                        .quoted_z1dot = cst(0),
                        .psi = cst(0),
                        .residual = cst(0),
                        .reduced_dynamics = cst(0),
                        .quoted_reduced = cst(0)};

    const double lam = -p.b1 * p.a12 * p.a21 / d.D2;
    r.quoted_z1dot = lam * z1 + p.a11 * (z1 * z1) - (d.D3 / p.a21) * (z1 * z2) +
                     (p.a22 * d.D1 / (p.a21 * p.a21)) * (z2 * z2) + p.a11 * (z3 * z3) + 2 * p.a11 * (z1 * z3) -
                     (d.D3 / p.a21) * (z2 * z3) + (p.a22 / p.a21) * (z2 * z4);

    const auto quad = (p.a22 * d.D1 / (p.a21 * p.a21)) * (z2 * z2) + p.a11 * (z3 * z3) -
                      (d.D3 / p.a21) * (z2 * z3) + (p.a22 / p.a21) * (z2 * z4);
    r.psi = (d.D2 / (p.b1 * p.a21 * p.a12)) * quad;
    if (psi_z2z2_delta != 0) r.psi.add_term(Ex{0, 2, 0, 0}, psi_z2z2_delta);

    const std::vector<TruncMultiPoly> subs{r.psi, z2, z3, z4};
    const auto z1dot_on = r.extended_z1dot.compose(subs);
    const auto z2dot_on = r.extended_z2dot.compose(subs);
    r.residual = r.psi.diff("z2") * z2dot_on - z1dot_on;
    r.reduced_dynamics = z2dot_on;
    r.quoted_reduced = (z4 + p.a21 * z3) * z2 + (d.D2 / (p.b1 * p.a12)) * (z2 * quad);
    return r;
}

St2Data st2_point(const MlvParams& p) {
    St2Data d;
    guard(p.a11, "a11", "st2_point");
    d.gamma = -p.b1 * p.a12 / (2 * p.a11);
    d.D3 = 2 * p.a11 * p.a22 - p.a12 * p.a21 - p.a22 * p.a21;
    d.D4 = 2 * p.a11 + p.a21;
    guard(d.gamma, "gamma", "st2_point");
    guard(p.a21, "a21", "st2_point");
    guard(p.a22, "a22", "st2_point");
    guard(d.D3, "D3", "st2_point");
    guard(d.D4, "D4", "st2_point");
    guard(p.a22 + p.a12, "a22+a12", "st2_point");
    guard(p.a11 - p.a21, "a11-a21", "st2_point");
    guard(4 * p.a11 - p.a21, "4a11-a21", "st2_point");
    d.x1_star = -p.b1 / (2 * p.a11);
    d.e_star = p.b1 * p.b1 / (4 * p.a11);
    d.b2_star = p.b1 * p.a21 / (2 * p.a11);
    d.eps = -sign(p.a11 * p.a21);
    const double r = std::sqrt(std::abs(p.a11 * p.a21));
    d.k1 = d.eps * r / p.a21;
    d.k2 = -d.eps * d.D4 / r;
    d.k3 = -r / (3 * p.a11);
    d.k4 = 16 * p.a11 * p.a11 * r / (3 * d.D4);
    d.k5 = 4 * d.eps * (2 * p.a11 - p.a21) * r / (3 * d.D4);
    if (d.eps > 0) d.dbt_type = "saddle";
    else d.dbt_type = d.k2 * d.k2 - 8 > 0 ? "elliptic" : "focus";
    return d;
}

St2Params st2_minimal_params(const St2Data& d, double a, double b, bool with_extension) {
    St2Params q;
    q.a = a;
    q.b = b;
    q.k1 = d.k1;
    q.k2 = d.k2;
    q.k3 = d.k3;
    q.eps = d.eps;
    q.extension = with_extension;
    if (with_extension) {
        q.k4 = d.k4;
        q.k5 = d.k5;
    }
    return q;
}

std::pair<double, double> conditions_residual(double k1, double k2, double k3, double eps) {
    return {2 * eps * k1 * k1 - k1 * k2 - 1, 3 * k1 * k3 - 1};
}

TruncMultiPoly invariant_manifold_check(double k1, double k2, double k3, double eps) {
    const std::vector<std::string> names{"x", "a", "b"};
    constexpr int cap = 6;
    const auto x = TruncMultiPoly::variable(names, cap, "x");
    const auto a = TruncMultiPoly::variable(names, cap, "a");
    const auto b = TruncMultiPoly::variable(names, cap, "b");
    const auto x2 = x * x, x3 = x2 * x;
    const auto g = k1 * a + k1 * (b * x) + (eps * k1) * x2 + (1.0 / 3) * x3;
    // f1 = y, so g' f1 on y = g is g' g
    const auto lhs = g.diff("x") * g;
    const auto f2 = a * x + k1 * (b * g) + b * x2 + k2 * (x * g) + x2 * g + eps * x3 + k3 * (x3 * x);
    return lhs - f2;
}

TruncMultiPoly equilibrium_manifold_identity(double k1, double k3, double eps) {
    const std::vector<std::string> names{"x", "a", "b"};
    constexpr int cap = 6;
    const auto x = TruncMultiPoly::variable(names, cap, "x");
    const auto a = TruncMultiPoly::variable(names, cap, "a");
    const auto b = TruncMultiPoly::variable(names, cap, "b");
    const auto x2 = x * x, x3 = x2 * x;
    const auto g = k1 * a + k1 * (b * x) + (eps * k1) * x2 + (1.0 / 3) * x3;
    const auto f2_axis = a * x + b * x2 + eps * x3 + k3 * (x3 * x);
    return f2_axis - (1.0 / k1) * (x * g);
}

std::pair<double, double> cusp_map(double a, double b) {
    return {-a * b / 3 + 2 * b * b * b / 27, a - b * b / 3};
}

double cusp_map_jacobian_det(double a, double b) {
    const double mu_a = -b / 3, mu_b = -a / 3 + 2 * b * b / 9;
    const double nu_a = 1, nu_b = -2 * b / 3;
    return mu_a * nu_b - mu_b * nu_a;
}

double cusp_discriminant(double mu, double nu) { return mu * mu / 4 + nu * nu * nu / 27; }

St1Nondegeneracy st1_nondegeneracy(double b) {
    if (b == 0) throw DegenerateModelError("b", "st1_nondegeneracy: b = 0 is the codimension-two point");
    St1Nondegeneracy r;
    const double xf = -b / 2, af = b * b / 4;
    r.fold_df_da = xf;
    r.fold_d2f_dx2 = 2 * b + 6 * xf;
    r.tc_df_da = 0;
    r.tc_d2f_dadx = 1;
    r.tc_d2f_dx2 = 2 * b;

    auto f = [b](double x, double a) { return eval_field(St1Params{a, b, 1.0}, StateVector(x))[0]; };
    const double h = 1e-4;
    r.fd_fold_df_da = (f(xf, af + h) - f(xf, af - h)) / (2 * h);
    r.fd_fold_d2f_dx2 = (f(xf + h, af) - 2 * f(xf, af) + f(xf - h, af)) / (h * h);
    r.fd_tc_df_da = (f(0, h) - f(0, -h)) / (2 * h);
    r.fd_tc_d2f_dadx = (f(h, h) - f(h, -h) - f(-h, h) + f(-h, -h)) / (4 * h * h);
    r.fd_tc_d2f_dx2 = (f(h, 0) - 2 * f(0, 0) + f(-h, 0)) / (h * h);
    return r;
}

Min2Fold min2_sn_curve(double b, double eps, double k3, std::optional<double> k1) {
    const double s = 1 - 3 * k3 * b;
    if (!(s >= 0)) throw DomainError("min2_sn_curve: 1 - 3 k3 b < 0");
    Min2Fold r;
    const double root = std::sqrt(s);
    r.a_sn = eps / (27 * k3 * k3) * (2 * root * root * root - 2 + 9 * k3 * b);
    if (k1) r.x_sn = eps * *k1 * (root - 1);
    return r;
}

DbtMapData dbt_map(double a, double b, double eps, double k1, double k2) {
    DbtMapData d;
    d.a_bar = a - eps * b * b / 3;
    d.b_bar = b - b * b / (9 * k1);
    d.mu1 = -(eps / 3) * (d.a_bar + eps * d.b_bar * d.b_bar / 9) * d.b_bar;
    d.mu2 = d.a_bar;
    d.nu = (k1 - eps * k2 / 3) * d.b_bar;
    d.z1_b = eps / 3;
    d.z1_xb = -2 * eps / (3 * k2);
    d.z1_bb = -eps / (27 * k1);
    d.z2_by = -2 * eps / (3 * k2);
    return d;
}

std::pair<double, double> dbt_coordinates(const DbtMapData& d, double x, double y, double b) {
    return {x + d.z1_b * b + d.z1_xb * x * b + d.z1_bb * b * b, y + d.z2_by * b * y};
}

DbtSurfaceResiduals dbt_surfaces(double mu1, double mu2, double nu, double eps, double k1, double k2) {
    const double c = 3 * k1 - eps * k2;
    if (c == 0) throw DegenerateModelError("3k1-eps*k2", "dbt_surfaces: 3 k1 = eps k2");
    return {c * c * c * mu1 + eps * c * c * mu2 * nu + nu * nu * nu, 27 * mu1 * mu1 + 4 * eps * mu2 * mu2 * mu2};
}

GammaCurves gamma_curves(double nu, double eps, double k1, double k2) {
    const double c = 3 * k1 - eps * k2;
    if (c == 0) throw DegenerateModelError("3k1-eps*k2", "gamma_curves: 3 k1 = eps k2");
    const double n3 = nu * nu * nu / (c * c * c), n2 = nu * nu / (c * c);
    // mu2 carries a factor eps; with eps = 1 these are the familiar saddle-case expressions
    return {-0.25 * n3, -0.75 * eps * n2, 2 * n3, -3 * eps * n2};
}

double dbt_sn_slope_on_s(double mu2, double nu, double eps, double k1, double k2, double h) {
    const double c = 3 * k1 - eps * k2;
    if (c == 0) throw DegenerateModelError("3k1-eps*k2", "dbt_sn_slope_on_s: 3 k1 = eps k2");
    auto sn_on_s = [&](double m2) {
        const double m1 = -(eps * c * c * m2 * nu + nu * nu * nu) / (c * c * c);
        return 27 * m1 * m1 + 4 * eps * m2 * m2 * m2;
    };
    return (sn_on_s(mu2 + h) - sn_on_s(mu2 - h)) / (2 * h);
}

double first_lyapunov(const Matrix2& A, const SecondDerivs& B, const ThirdDerivs& C) {
    using cd = std::complex<double>;
    const double tr = A.trace(), det = A.det();
    const double scale = std::max(1.0, A.norm_max());
    if (!(det > 0) || std::abs(tr) > 1e-8 * scale)
        throw UsageError("first_lyapunov: eigenvalues are not a purely imaginary pair");
    const double w = std::sqrt(det);
    const cd iw(0, w);

    std::array<cd, 2> q, p;
    if (std::abs(A.a01) >= std::abs(A.a10)) q = {A.a01, iw - A.a00};
    else q = {iw - A.a11, A.a10};
    // A^T p = -i w p
    if (std::abs(A.a10) >= std::abs(A.a01)) p = {A.a10, -iw - A.a00};
    else p = {-iw - A.a11, A.a01};
    const double qn = std::sqrt(std::norm(q[0]) + std::norm(q[1]));
    q = {q[0] / qn, q[1] / qn};
    const cd pq = std::conj(p[0]) * q[0] + std::conj(p[1]) * q[1];
    const cd s = 1.0 / std::conj(pq);
    p = {p[0] * s, p[1] * s};

    auto bil = [&](const std::array<cd, 2>& x, const std::array<cd, 2>& y) {
        std::array<cd, 2> r{};
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
                for (int k = 0; k < 2; ++k) r[i] += B.d[i][j][k] * x[j] * y[k];
        return r;
    };
    auto tri = [&](const std::array<cd, 2>& x, const std::array<cd, 2>& y, const std::array<cd, 2>& z) {
        std::array<cd, 2> r{};
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
                for (int k = 0; k < 2; ++k)
                    for (int l = 0; l < 2; ++l) r[i] += C.d[i][j][k][l] * x[j] * y[k] * z[l];
        return r;
    };
    auto solve = [](cd m00, cd m01, cd m10, cd m11, const std::array<cd, 2>& r) {
        const cd d = m00 * m11 - m01 * m10;
        return std::array<cd, 2>{(m11 * r[0] - m01 * r[1]) / d, (m00 * r[1] - m10 * r[0]) / d};
    };
    auto inner = [&](const std::array<cd, 2>& x) { return std::conj(p[0]) * x[0] + std::conj(p[1]) * x[1]; };

    const std::array<cd, 2> qb{std::conj(q[0]), std::conj(q[1])};
    const auto h11 = solve(A.a00, A.a01, A.a10, A.a11, bil(q, qb));               // A^{-1} B(q, qbar)
    const auto h20 = solve(2.0 * iw - A.a00, -A.a01, -A.a10, 2.0 * iw - A.a11, bil(q, q));  // (2iw - A)^{-1} B(q, q)
    const cd val = inner(tri(q, q, qb)) - 2.0 * inner(bil(q, h11)) + inner(bil(qb, h20));
    return val.real() / (2 * w);
}

double first_lyapunov(const ParameterSet& p, const StateVector& s) {
    if (dimension(p) != 2) throw UsageError("first_lyapunov: planar models only");
    return first_lyapunov(eval_jacobian(p, s), eval_second_derivs(p, s), eval_third_derivs(p, s));
}

}  // namespace lvbif
