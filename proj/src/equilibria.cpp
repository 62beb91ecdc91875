#include "lvbif/equilibria.hpp"

#include <algorithm>
#include <cmath>

namespace lvbif {

std::string_view to_string(EqClass c) {
    switch (c) {
        case EqClass::Sink: return "sink";
        case EqClass::Source: return "source";
        case EqClass::Saddle: return "saddle";
        case EqClass::FoldType: return "nonhyperbolic-fold-type";
        case EqClass::HopfType: return "nonhyperbolic-Hopf-type";
        case EqClass::DoubleZero: return "double-zero";
        case EqClass::Degenerate: return "degenerate";
    }
    return "?";
}

double spectral_scale(const Matrix2& jac, int dim) {
    const double s = dim == 1 ? std::abs(jac.a00) : jac.norm_max();
    return std::isfinite(s) ? s : 0.0;
}

EqClass classify(const EigenData& eig, double tol_eig) {
    if (!std::isfinite(eig.re[0]) || !std::isfinite(eig.re[1]) || !std::isfinite(eig.im[0]))
        return EqClass::Degenerate;
    if (eig.count == 1) {
        const double l = eig.re[0];
        if (std::abs(l) <= tol_eig) return EqClass::FoldType;
        return l < 0 ? EqClass::Sink : EqClass::Source;
    }
    if (eig.complex) {
        if (std::abs(eig.re[0]) <= tol_eig)
            return std::abs(eig.im[0]) <= tol_eig ? EqClass::DoubleZero : EqClass::HopfType;
        return eig.re[0] < 0 ? EqClass::Sink : EqClass::Source;
    }
    const bool z0 = std::abs(eig.re[0]) <= tol_eig, z1 = std::abs(eig.re[1]) <= tol_eig;
    if (z0 && z1) return EqClass::DoubleZero;
    if (z0 || z1) return EqClass::FoldType;
    if (eig.re[0] < 0 && eig.re[1] < 0) return EqClass::Sink;
    if (eig.re[0] > 0 && eig.re[1] > 0) return EqClass::Source;
    return EqClass::Saddle;
}

Equilibrium make_equilibrium(const ParameterSet& p, const StateVector& s, int multiplicity) {
    Equilibrium eq;
    eq.state = s;
    eq.multiplicity = multiplicity;
    const int dim = dimension(p);
    const Matrix2 jac = eval_jacobian(p, s);
    eq.eigen = eigen_of(jac, dim);
    eq.spectral_scale = spectral_scale(jac, dim);
    eq.residual = eval_field(p, s).norm_inf();
    eq.classification = classify(eq.eigen, tol::kEigRel * eq.spectral_scale);
    if (model_of(p) == ModelId::Mlv) {
        eq.on_axis = (s[1] == 0.0);
        eq.outside_first_quadrant = s[0] < 0 || s[1] < 0;
    }
    return eq;
}

StateVector newton_equilibrium(const ParameterSet& p, StateVector s, int max_iter) {
    StateVector best = s;
    double best_res = eval_field(p, s).norm_inf();
    for (int it = 0; it < max_iter && best_res > 0; ++it) {
        const StateVector f = eval_field(p, s);
        const Matrix2 jac = eval_jacobian(p, s);
        StateVector step;
        if (s.size() == 1) {
            if (jac.a00 == 0) break;
            step = StateVector(f[0] / jac.a00);
        } else {
            if (jac.det() == 0) break;
            step = solve2(jac, f);
        }
        s -= step;
        const double res = eval_field(p, s).norm_inf();
        if (!(res < best_res)) break;
        best = s;
        best_res = res;
    }
    return best;
}

namespace {

// Newton along the invariant axis: x2 stays exactly 0.
double polish_axis(const MlvParams& q, double x) {
    double best = x, best_res = std::abs(x * (q.b1 + q.a11 * x) + q.e);
    for (int it = 0; it < 8 && best_res > 0; ++it) {
        const double d = q.b1 + 2 * q.a11 * x;
        if (d == 0) break;
        x -= (x * (q.b1 + q.a11 * x) + q.e) / d;
        const double res = std::abs(x * (q.b1 + q.a11 * x) + q.e);
        if (!(res < best_res)) break;
        best = x;
        best_res = res;
    }
    return best;
}

}  // namespace

std::vector<Equilibrium> find_equilibria_mlv(const MlvParams& q, double cluster_tol) {
    if (q.a11 == 0) throw DegenerateModelError("a11", "MLV equilibria require a11 != 0");
    if (q.a22 == 0) throw DegenerateModelError("a22", "MLV equilibria require a22 != 0");
    const ParameterSet p = q;
    std::vector<Equilibrium> out;

    for (const auto& r : solve_poly_real(Poly1({q.e, q.b1, q.a11}), cluster_tol)) {
        const double x1 = r.multiplicity == 1 ? polish_axis(q, r.value) : r.value;
        out.push_back(make_equilibrium(p, StateVector(x1, 0.0), r.multiplicity));
    }

    // x2 = -(b2 + a21 x1)/a22 in the prey equation, multiplied through by a22
    const double d1 = q.a11 * q.a22 - q.a12 * q.a21;
    const Poly1 interior({q.a22 * q.e, q.b1 * q.a22 - q.a12 * q.b2, d1});
    if (interior.degree() < 0) throw DegenerateModelError("D1", "MLV has a line of interior equilibria");
    if (interior.degree() == 0) return out;
    for (const auto& r : solve_poly_real(interior, cluster_tol)) {
        StateVector s(r.value, -(q.b2 + q.a21 * r.value) / q.a22);
        if (r.multiplicity == 1) s = newton_equilibrium(p, s);
        // an interior root on the axis is the transcritical collision with an axis equilibrium
        auto same = std::find_if(out.begin(), out.end(), [&](const Equilibrium& a) {
            return a.on_axis && std::abs(a.state[0] - s[0]) < cluster_tol && std::abs(s[1]) < cluster_tol;
        });
        if (same != out.end()) {
            same->multiplicity += r.multiplicity;
            continue;
        }
        out.push_back(make_equilibrium(p, s, r.multiplicity));
    }
    return out;
}

std::vector<Equilibrium> find_equilibria_min(const ParameterSet& p, double cluster_tol) {
    validate(p);
    std::vector<double> coeffs;
    std::visit(
        [&](const auto& q) {
            using P = std::decay_t<decltype(q)>;
            if constexpr (std::is_same_v<P, St1Params>) {
                coeffs = {0.0, q.a, q.b, q.eps};
            } else if constexpr (std::is_same_v<P, St2Params>) {
                const double ext = q.extension ? 1.0 : 0.0;
                coeffs = {0.0, q.a, q.b + ext * q.k4 * q.b * q.b, q.eps + ext * q.k5 * q.b, q.k3};
            } else if constexpr (std::is_same_v<P, CuspParams>) {
                coeffs = {q.mu, q.nu, 0.0, 1.0};
            } else if constexpr (std::is_same_v<P, DbtParams>) {
                coeffs = {q.mu1, q.mu2, 0.0, q.eps};
            } else {
                throw UsageError("find_equilibria_min: use find_equilibria_mlv for MLV");
            }
        },
        p);
    const int dim = dimension(p);
    std::vector<Equilibrium> out;
    for (const auto& r : solve_poly_real(Poly1(coeffs), cluster_tol)) {
        StateVector s = dim == 1 ? StateVector(r.value) : StateVector(r.value, 0.0);
        if (r.multiplicity == 1 && r.value != 0.0) {
            // polish on y = 0 with the scalar equilibrium polynomial
            const Poly1 poly(coeffs);
            const Poly1 dpoly = poly.derivative();
            double x = r.value;
            for (int it = 0; it < 4; ++it) {
                const double d = dpoly(x);
                if (d == 0) break;
                const double nx = x - poly(x) / d;
                if (!(std::abs(poly(nx)) < std::abs(poly(x)))) break;
                x = nx;
            }
            s[0] = x;
        }
        out.push_back(make_equilibrium(p, s, r.multiplicity));
    }
    return out;
}

std::vector<Equilibrium> find_equilibria(const ParameterSet& p, double cluster_tol) {
    if (const auto* q = std::get_if<MlvParams>(&p)) return find_equilibria_mlv(*q, cluster_tol);
    return find_equilibria_min(p, cluster_tol);
}

}  // namespace lvbif
