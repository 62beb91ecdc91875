#include "lvbif/continuation.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>

namespace lvbif {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

std::string_view to_string(CurveKind k) {
    switch (k) {
        case CurveKind::EQ: return "EQ";
        case CurveKind::SN: return "SN";
        case CurveKind::TC: return "TC";
        case CurveKind::HB: return "HB";
        case CurveKind::NS: return "NS";
        case CurveKind::HET: return "Het";
        case CurveKind::HOM: return "Hom";
    }
    return "?";
}

std::string_view to_string(CodimTwoKind k) {
    switch (k) {
        case CodimTwoKind::ST1: return "ST1";
        case CodimTwoKind::ST2: return "ST2";
        case CodimTwoKind::BT: return "BT";
        case CodimTwoKind::CUSP: return "CUSP";
        case CodimTwoKind::SNHET: return "SNHet";
        case CodimTwoKind::T0: return "T0";
    }
    return "?";
}

CurveKind curve_kind_from_string(std::string_view s) {
    for (auto k : {CurveKind::EQ, CurveKind::SN, CurveKind::TC, CurveKind::HB, CurveKind::NS, CurveKind::HET,
                   CurveKind::HOM})
        if (to_string(k) == s) return k;
    if (s == "HET") return CurveKind::HET;
    if (s == "HOM") return CurveKind::HOM;
    throw UsageError("unknown curve kind '" + std::string(s) + "'");
}

std::string_view to_string(Formulation f) {
    switch (f) {
        case Formulation::Full: return "full";
        case Formulation::MlvAxis: return "mlv-axis";
        case Formulation::MlvInterior: return "mlv-interior";
        case Formulation::MinimalNontrivial: return "minimal-nontrivial";
    }
    return "?";
}

Formulation default_formulation(const ParameterSet& p, const StateVector& s) {
    switch (model_of(p)) {
        case ModelId::Mlv: return s[1] == 0.0 ? Formulation::MlvAxis : Formulation::MlvInterior;
        case ModelId::St1Min:
        case ModelId::St2Min: return s[0] == 0.0 ? Formulation::Full : Formulation::MinimalNontrivial;
        default: return Formulation::Full;
    }
}

namespace {

// ---- equilibrium equation in a given formulation ----

int reduced_dim(const ParameterSet& p, Formulation f) {
    if (f == Formulation::MlvAxis) return 1;
    return dimension(p);
}

StateVector to_state(const ParameterSet& p, Formulation f, const Vec& x) {
    if (f == Formulation::MlvAxis) return {x[0], 0.0};
    return dimension(p) == 1 ? StateVector(x[0]) : StateVector(x[0], x[1]);
}

Vec from_state(const ParameterSet& p, Formulation f, const StateVector& s) {
    Vec x(reduced_dim(p, f));
    x[0] = s[0];
    if (x.size() == 2) x[1] = s[1];
    return x;
}

double st2_reduced_poly(const St2Params& q, double x, double* dpdx) {
    const double ext = q.extension ? 1.0 : 0.0;
    const double c1 = q.b + ext * q.k4 * q.b * q.b, c2 = q.eps + ext * q.k5 * q.b;
    if (dpdx) *dpdx = c1 + 2 * c2 * x + 3 * q.k3 * x * x;
    return q.a + x * (c1 + x * (c2 + q.k3 * x));
}

Vec eq_residual(const ParameterSet& p, Formulation f, const Vec& x) {
    const StateVector s = to_state(p, f, x);
    Vec r(x.size());
    switch (f) {
        case Formulation::Full: {
            const StateVector v = eval_field(p, s);
            r[0] = v[0];
            if (r.size() == 2) r[1] = v[1];
            break;
        }
        case Formulation::MlvAxis: {
            const auto& q = std::get<MlvParams>(p);
            r[0] = s[0] * (q.b1 + q.a11 * s[0]) + q.e;
            break;
        }
        case Formulation::MlvInterior: {
            const auto& q = std::get<MlvParams>(p);
            r[0] = eval_field(p, s)[0];
            r[1] = q.b2 + q.a21 * s[0] + q.a22 * s[1];
            break;
        }
        case Formulation::MinimalNontrivial: {
            if (const auto* q = std::get_if<St1Params>(&p)) {
                r[0] = q->a + s[0] * (q->b + q->eps * s[0]);
            } else {
                r[0] = s[1];
                r[1] = st2_reduced_poly(std::get<St2Params>(p), s[0], nullptr);
            }
            break;
        }
    }
    return r;
}

Mat eq_jacobian(const ParameterSet& p, Formulation f, const Vec& x) {
    const StateVector s = to_state(p, f, x);
    Mat m(x.size(), x.size());
    switch (f) {
        case Formulation::Full: {
            const Matrix2 j = eval_jacobian(p, s);
            m(0, 0) = j.a00;
            if (m.rows() == 2) m << j.a00, j.a01, j.a10, j.a11;
            break;
        }
        case Formulation::MlvAxis: {
            const auto& q = std::get<MlvParams>(p);
            m(0, 0) = q.b1 + 2 * q.a11 * s[0];
            break;
        }
        case Formulation::MlvInterior: {
            const auto& q = std::get<MlvParams>(p);
            const Matrix2 j = eval_jacobian(p, s);
            m << j.a00, j.a01, q.a21, q.a22;
            break;
        }
        case Formulation::MinimalNontrivial: {
            if (const auto* q = std::get_if<St1Params>(&p)) {
                m(0, 0) = q->b + 2 * q->eps * s[0];
            } else {
                double dp = 0;
                st2_reduced_poly(std::get<St2Params>(p), s[0], &dp);
                m << 0, 1, dp, 0;
            }
            break;
        }
    }
    return m;
}

Vec eq_dparam(const ParameterSet& p, Formulation f, const Vec& x, const std::string& name) {
    const StateVector s = to_state(p, f, x);
    Vec r = Vec::Zero(x.size());
    switch (f) {
        case Formulation::Full: {
            const StateVector d = eval_param_derivative(p, s, name);
            r[0] = d[0];
            if (r.size() == 2) r[1] = d[1];
            break;
        }
        case Formulation::MlvAxis: {
            const double x1 = s[0];
            if (name == "b1") r[0] = x1;
            else if (name == "a11") r[0] = x1 * x1;
            else if (name == "e") r[0] = 1;
            break;
        }
        case Formulation::MlvInterior: {
            r[0] = eval_param_derivative(p, s, name)[0];
            if (name == "b2") r[1] = 1;
            else if (name == "a21") r[1] = s[0];
            else if (name == "a22") r[1] = s[1];
            break;
        }
        case Formulation::MinimalNontrivial: {
            const double xx = s[0];
            if (const auto* q = std::get_if<St1Params>(&p)) {
                (void)q;
                if (name == "a") r[0] = 1;
                else if (name == "b") r[0] = xx;
                else if (name == "eps") r[0] = xx * xx;
            } else {
                const auto& q2 = std::get<St2Params>(p);
                const double ext = q2.extension ? 1.0 : 0.0;
                if (name == "a") r[1] = 1;
                else if (name == "b") r[1] = xx + ext * (2 * q2.k4 * q2.b * xx + q2.k5 * xx * xx);
                else if (name == "eps") r[1] = xx * xx;
                else if (name == "k3") r[1] = xx * xx * xx;
                else if (name == "k4") r[1] = ext * q2.b * q2.b * xx;
                else if (name == "k5") r[1] = ext * q2.b * xx * xx;
            }
            break;
        }
    }
    return r;
}

struct NullPair {
    StateVector v, w;
};

// Right/left null vectors of the eigenvalue nearest zero. Oriented along `ref` when given so the
// fold coefficient is continuous along a curve; otherwise <w, v> >= 0.
std::optional<NullPair> null_pair(const Matrix2& j, const NullPair* ref) {
    const EigenData e = eigen2(j);
    if (e.complex) return std::nullopt;
    const double lam = std::abs(e.re[0]) <= std::abs(e.re[1]) ? e.re[0] : e.re[1];
    NullPair np{real_eigenvector(j, lam), real_left_eigenvector(j, lam)};
    if (ref) {
        if (dot(np.v, ref->v) < 0) np.v = -np.v;
        if (dot(np.w, ref->w) < 0) np.w = -np.w;
    } else if (dot(np.w, np.v) < 0) {
        np.w = -np.w;
    }
    return np;
}

double fold_coefficient(const ParameterSet& p, const StateVector& s, const NullPair* ref, NullPair* out) {
    const SecondDerivs h = eval_second_derivs(p, s);
    if (s.size() == 1) return 0.5 * h.d[0][0][0];
    const auto np = null_pair(eval_jacobian(p, s), ref);
    if (!np) return std::numeric_limits<double>::quiet_NaN();
    if (out) *out = *np;
    double c = 0;
    for (int i = 0; i < 2; ++i)
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b) c += np->w[i] * h.d[i][a][b] * np->v[a] * np->v[b];
    return 0.5 * c;
}

}  // namespace

TestValues evaluate_tests(const ParameterSet& p, const StateVector& s, Formulation f) {
    TestValues t;
    const Matrix2 j = eval_jacobian(p, s);
    const int dim = dimension(p);
    t.det_j = dim == 1 ? j.a00 : j.det();
    t.tr_j = dim == 1 ? j.a00 : j.trace();
    const Mat je = eq_jacobian(p, f, from_state(p, f, s));
    t.det_reduced = je.determinant();
    t.fold_coeff = fold_coefficient(p, s, nullptr, nullptr);
    if (const auto* q = std::get_if<MlvParams>(&p)) {
        t.axis_distance = s[1];
        t.transverse_eig = q->b2 + q->a21 * s[0];
        t.tangential_eig = q->b1 + 2 * q->a11 * s[0] + q->a12 * s[1];
        t.tc_coeff = q->a22 * t.tangential_eig - q->a12 * q->a21 * s[0];
    } else if (model_of(p) == ModelId::St1Min || model_of(p) == ModelId::St2Min) {
        t.axis_distance = s[0];
    }
    return t;
}

ParameterSet Curve::params_at(const BranchPoint& bp) const {
    ParameterSet q = base;
    if (!param1.empty()) set_param(q, param1, bp.p1);
    if (!param2.empty()) set_param(q, param2, bp.p2);
    return q;
}

namespace detail {

// G: R^{n+1} -> R^n whose zero set is the curve.
class CurveSystem {
public:
    CurveSystem(ParameterSet base, Formulation f, std::vector<std::string> params, CurveKind kind)
        : base_(std::move(base)), f_(f), params_(std::move(params)), kind_(kind) {
        nx_ = reduced_dim(base_, f_);
    }
    virtual ~CurveSystem() = default;

    int unknowns() const { return nx_ + static_cast<int>(params_.size()); }
    int equations() const { return unknowns() - 1; }
    CurveKind kind() const { return kind_; }
    Formulation formulation() const { return f_; }
    const std::vector<std::string>& params() const { return params_; }
    const ParameterSet& base() const { return base_; }

    ParameterSet params_of(const Vec& u) const {
        ParameterSet q = base_;
        for (std::size_t i = 0; i < params_.size(); ++i) set_param(q, params_[i], u[nx_ + static_cast<int>(i)]);
        return q;
    }
    StateVector state_of(const Vec& u) const { return to_state(base_, f_, u.head(nx_)); }

    Vec pack(const StateVector& s, double p1, double p2) const {
        Vec u(unknowns());
        u.head(nx_) = from_state(base_, f_, s);
        u[nx_] = p1;
        if (params_.size() > 1) u[nx_ + 1] = p2;
        return u;
    }

    virtual Vec residual(const Vec& u) const = 0;

    virtual Mat jacobian(const Vec& u) const {
        // equilibrium rows analytic, extra rows by central differences
        const ParameterSet q = params_of(u);
        const Vec x = u.head(nx_);
        Mat m(equations(), unknowns());
        m.block(0, 0, nx_, nx_) = eq_jacobian(q, f_, x);
        for (std::size_t i = 0; i < params_.size(); ++i)
            m.block(0, nx_ + static_cast<int>(i), nx_, 1) = eq_dparam(q, f_, x, params_[i]);
        if (equations() > nx_) {
            for (int k = 0; k < unknowns(); ++k) {
                const double h = 1e-6 * std::max(1.0, std::abs(u[k]));
                Vec up = u, um = u;
                up[k] += h;
                um[k] -= h;
                m.block(nx_, k, equations() - nx_, 1) =
                    (extra(up) - extra(um)) / (up[k] - um[k]);
            }
        }
        return m;
    }

    BranchPoint make_point(const Vec& u) const {
        BranchPoint bp;
        const ParameterSet q = params_of(u);
        bp.state = state_of(u);
        bp.p1 = u[nx_];
        if (params_.size() > 1) bp.p2 = u[nx_ + 1];
        const Matrix2 j = eval_jacobian(q, bp.state);
        bp.eigen = eigen_of(j, dimension(q));
        bp.tests = evaluate_tests(q, bp.state, f_);
        bp.kind = kind_;
        if (kind_ == CurveKind::SN) {
            if (dimension(q) == 1) {
                bp.null_vector = StateVector(1.0);
            } else {
                const double lam = std::abs(bp.eigen.re[0]) <= std::abs(bp.eigen.re[1]) ? bp.eigen.re[0] : bp.eigen.re[1];
                bp.null_vector = real_eigenvector(j, bp.eigen.complex ? 0.0 : lam);
            }
        }
        if (kind_ == CurveKind::HB && bp.tests.det_j < 0) bp.kind = CurveKind::NS;
        return bp;
    }

protected:
    Vec eq_part(const Vec& u) const { return eq_residual(params_of(u), f_, u.head(nx_)); }
    virtual Vec extra(const Vec&) const { return Vec(0); }

    ParameterSet base_;
    Formulation f_;
    std::vector<std::string> params_;
    CurveKind kind_;
    int nx_ = 0;
};

}  // namespace detail

namespace {

using detail::CurveSystem;

class EqSystem : public CurveSystem {
public:
    using CurveSystem::CurveSystem;
    Vec residual(const Vec& u) const override { return eq_part(u); }
};

class FoldSystem : public CurveSystem {
public:
    using CurveSystem::CurveSystem;
    Vec residual(const Vec& u) const override {
        Vec r(equations());
        r.head(nx_) = eq_part(u);
        r[nx_] = extra(u)[0];
        return r;
    }

protected:
    Vec extra(const Vec& u) const override {
        Vec e(1);
        e[0] = eq_jacobian(params_of(u), f_, u.head(nx_)).determinant();
        return e;
    }
};

class HopfSystem : public CurveSystem {
public:
    using CurveSystem::CurveSystem;
    Vec residual(const Vec& u) const override {
        Vec r(equations());
        r.head(nx_) = eq_part(u);
        r[nx_] = extra(u)[0];
        return r;
    }

protected:
    Vec extra(const Vec& u) const override {
        Vec e(1);
        e[0] = eval_jacobian(params_of(u), state_of(u)).trace();
        return e;
    }
};

// MLV transcritical set: axis equilibrium with zero transverse eigenvalue, in (x1, e, b2).
class TcSystem : public CurveSystem {
public:
    explicit TcSystem(const MlvParams& q) : CurveSystem(q, Formulation::MlvAxis, {"e", "b2"}, CurveKind::TC) {}
    Vec residual(const Vec& u) const override {
        const auto q = std::get<MlvParams>(params_of(u));
        Vec r(2);
        r[0] = u[0] * (q.b1 + q.a11 * u[0]) + q.e;
        r[1] = q.b2 + q.a21 * u[0];
        return r;
    }
    Mat jacobian(const Vec& u) const override {
        const auto q = std::get<MlvParams>(params_of(u));
        Mat m(2, 3);
        m << q.b1 + 2 * q.a11 * u[0], 1, 0, q.a21, 0, 1;
        return m;
    }
};

// ---- pseudo-arclength engine ----

struct RawPoint {
    Vec u;
    Vec t;
};

struct CorrectResult {
    bool ok = false;
    int iterations = 0;
    Vec u;
};

double residual_scale(const CurveSystem& sys, const Vec& u) { return std::max(1.0, param_scale(sys.params_of(u))); }

// Newton on [G(u); t.(u - anchor) - s] = 0.
CorrectResult correct(const CurveSystem& sys, Vec u, const Vec& t, const Vec& anchor, double s,
                      const ContinuationOptions& o) {
    CorrectResult res;
    const int n = sys.unknowns();
    const double rscale = residual_scale(sys, u);
    for (int it = 0; it <= o.max_iterations; ++it) {
        const Vec g = sys.residual(u);
        const double con = t.dot(u - anchor) - s;
        if (!g.allFinite()) return res;
        Mat a(n, n);
        a.topRows(n - 1) = sys.jacobian(u);
        a.row(n - 1) = t.transpose();
        Vec rhs(n);
        rhs.head(n - 1) = g;
        rhs[n - 1] = con;
        Eigen::FullPivLU<Mat> lu(a);
        if (!lu.isInvertible()) {
            if (g.lpNorm<Eigen::Infinity>() <= o.tol * rscale && std::abs(con) <= o.tol) {
                res.ok = true;
                res.iterations = it;
                res.u = u;
            }
            return res;
        }
        const Vec du = lu.solve(rhs);
        u -= du;
        res.iterations = it + 1;
        if (!u.allFinite()) return res;
        if (du.lpNorm<Eigen::Infinity>() <= o.tol * std::max(1.0, u.lpNorm<Eigen::Infinity>())) {
            const Vec g2 = sys.residual(u);
            if (g2.lpNorm<Eigen::Infinity>() <= 100 * o.tol * rscale) {
                res.ok = true;
                res.u = u;
            }
            return res;
        }
    }
    return res;
}

// Unit tangent: kernel of G_u, oriented along `orient` (or arbitrary when orient is empty).
std::optional<Vec> tangent(const CurveSystem& sys, const Vec& u, const Vec* orient) {
    const int n = sys.unknowns();
    const Mat gu = sys.jacobian(u);
    Vec t;
    if (orient) {
        Mat a(n, n);
        a.topRows(n - 1) = gu;
        a.row(n - 1) = orient->transpose();
        Vec rhs = Vec::Zero(n);
        rhs[n - 1] = 1;
        Eigen::FullPivLU<Mat> lu(a);
        if (lu.isInvertible()) t = lu.solve(rhs);
    }
    if (t.size() == 0 || !t.allFinite() || t.norm() == 0) {
        Eigen::JacobiSVD<Mat> svd(gu, Eigen::ComputeFullV);
        t = svd.matrixV().col(n - 1);
    }
    t.normalize();
    if (orient && t.dot(*orient) < 0) t = -t;
    if (!t.allFinite()) return std::nullopt;
    return t;
}

bool in_bounds(const CurveSystem& sys, const Vec& u, const ContinuationOptions& o) {
    const int nx = sys.unknowns() - static_cast<int>(sys.params().size());
    if (u.head(nx).lpNorm<Eigen::Infinity>() > o.state_bound) return false;
    const double p1 = u[nx];
    if (p1 < o.p1_min || p1 > o.p1_max) return false;
    if (sys.params().size() > 1) {
        const double p2 = u[nx + 1];
        if (p2 < o.p2_min || p2 > o.p2_max) return false;
    }
    return true;
}

struct RunResult {
    std::vector<RawPoint> pts;  // excludes the seed
    std::string diagnostic;
    bool truncated = false;
};

RunResult run_one_way(const CurveSystem& sys, const RawPoint& seed, const ContinuationOptions& o, int budget) {
    RunResult rr;
    RawPoint cur = seed;
    double h = o.initial_step;
    while (static_cast<int>(rr.pts.size()) < budget) {
        const Vec pred = cur.u + h * cur.t;
        const CorrectResult c = correct(sys, pred, cur.t, cur.u, h, o);
        std::optional<Vec> tn;
        if (c.ok) tn = tangent(sys, c.u, &cur.t);
        if (!c.ok || !tn || tn->dot(cur.t) < o.min_tangent_cos) {
            h *= o.shrink;
            if (h < o.min_step) {
                rr.truncated = true;
                rr.diagnostic = "corrector failed at the minimum step";
                return rr;
            }
            continue;
        }
        rr.pts.push_back({c.u, *tn});
        cur = rr.pts.back();
        if (!in_bounds(sys, cur.u, o)) return rr;
        // closed curve: back near the seed heading the same way
        if (rr.pts.size() > 10 && (cur.u - seed.u).norm() < 0.5 * h && cur.t.dot(seed.t) > 0.9) {
            rr.diagnostic = "closed curve";
            return rr;
        }
        if (c.iterations <= o.fast_iterations) h = std::min(h * o.grow, o.max_step);
    }
    rr.diagnostic = "point budget exhausted";
    return rr;
}

// Runs from the seed in the requested direction(s); returns points ordered along the curve.
std::vector<RawPoint> run(const CurveSystem& sys, const Vec& u0, const ContinuationOptions& o, std::string& diag,
                          bool& truncated) {
    auto t0 = tangent(sys, u0, nullptr);
    if (!t0) throw NumericalError("continuation: no tangent at the seed");
    const int nx = sys.unknowns() - static_cast<int>(sys.params().size());
    Vec t = *t0;
    if (t[nx] < 0 || (t[nx] == 0 && t.sum() < 0)) t = -t;
    if (o.direction < 0) t = -t;
    const RawPoint seed{u0, t};

    std::vector<RawPoint> out;
    RunResult fwd = run_one_way(sys, seed, o, o.max_points);
    if (o.direction == 0 && fwd.diagnostic != "closed curve") {
        RunResult bwd = run_one_way(sys, RawPoint{u0, -t}, o, o.max_points);
        for (auto it = bwd.pts.rbegin(); it != bwd.pts.rend(); ++it) out.push_back({it->u, -it->t});
        if (!bwd.diagnostic.empty()) diag += "backward: " + bwd.diagnostic + "; ";
        truncated = truncated || bwd.truncated;
    }
    out.push_back(seed);
    for (auto& p : fwd.pts) out.push_back(std::move(p));
    if (!fwd.diagnostic.empty()) diag += "forward: " + fwd.diagnostic;
    truncated = truncated || fwd.truncated;
    return out;
}

// Point on the curve at pseudo-arclength s from a, where the chosen test changes sign.
RawPoint locate_zero(const CurveSystem& sys, const RawPoint& a, const Vec& ub,
                     const std::function<double(const Vec&)>& phi, const ContinuationOptions& o) {
    double lo = 0, hi = a.t.dot(ub - a.u);
    double flo = phi(a.u), fhi = phi(ub);
    Vec best = std::abs(flo) < std::abs(fhi) ? a.u : ub;
    int side = 0;
    for (int it = 0; it < 200 && std::abs(hi - lo) > tol::kEventArclength; ++it) {
        double s = (lo * fhi - hi * flo) / (fhi - flo);
        // keep regula falsi honest: fall back to bisection near the ends
        if (!(std::min(lo, hi) < s && s < std::max(lo, hi)) || it % 4 == 3) s = 0.5 * (lo + hi);
        const CorrectResult c = correct(sys, a.u + s * a.t, a.t, a.u, s, o);
        if (!c.ok) {
            s = 0.5 * (lo + hi);
            const CorrectResult c2 = correct(sys, a.u + s * a.t, a.t, a.u, s, o);
            if (!c2.ok) break;
            const double f2 = phi(c2.u);
            best = c2.u;
            if ((f2 < 0) == (flo < 0)) lo = s, flo = f2;
            else hi = s, fhi = f2;
            continue;
        }
        const double fs = phi(c.u);
        best = c.u;
        if (fs == 0) break;
        if ((fs < 0) == (flo < 0)) {
            lo = s;
            flo = fs;
            if (side == -1) fhi *= 0.5;
            side = -1;
        } else {
            hi = s;
            fhi = fs;
            if (side == 1) flo *= 0.5;
            side = 1;
        }
    }
    auto tb = tangent(sys, best, &a.t);
    return {best, tb ? *tb : a.t};
}

bool sign_change(double a, double b) {
    return std::isfinite(a) && std::isfinite(b) && ((a < 0 && b >= 0) || (a > 0 && b <= 0));
}

// Fold coefficients with the null vectors carried continuously along the curve.
struct FoldChain {
    std::vector<double> coeff;
    std::vector<std::optional<NullPair>> pairs;
};

FoldChain fold_chain(const Curve& c) {
    FoldChain fc;
    std::optional<NullPair> prev;
    for (const auto& bp : c.points) {
        NullPair out;
        const double v = fold_coefficient(c.params_at(bp), bp.state, prev ? &*prev : nullptr, &out);
        fc.coeff.push_back(v);
        if (bp.state.size() == 2 && std::isfinite(v)) prev = out;
        fc.pairs.push_back(prev);
    }
    return fc;
}

Curve assemble(std::shared_ptr<const CurveSystem> sys, const std::vector<RawPoint>& raw, std::string diag,
               bool truncated) {
    Curve c;
    c.kind = sys->kind();
    c.param1 = sys->params()[0];
    if (sys->params().size() > 1) c.param2 = sys->params()[1];
    c.base = sys->base();
    c.formulation = sys->formulation();
    c.diagnostic = std::move(diag);
    c.truncated = truncated;
    double s = 0;
    for (std::size_t i = 0; i < raw.size(); ++i) {
        if (i > 0) s += (raw[i].u - raw[i - 1].u).norm();
        BranchPoint bp = sys->make_point(raw[i].u);
        bp.arclength = s;
        c.points.push_back(std::move(bp));
    }
    c.system = std::move(sys);
    if (c.kind == CurveKind::SN) {
        const FoldChain fc = fold_chain(c);
        for (std::size_t i = 0; i < c.points.size(); ++i) c.points[i].tests.fold_coeff = fc.coeff[i];
    }
    return c;
}

Vec raw_u(const Curve& c, std::size_t i) {
    const auto& bp = c.points[i];
    return c.system->pack(bp.state, bp.p1, bp.p2);
}

RawPoint raw_point(const Curve& c, std::size_t i) {
    const Vec u = raw_u(c, i);
    Vec ref = (i + 1 < c.points.size()) ? Vec(raw_u(c, i + 1) - u) : Vec(u - raw_u(c, i - 1));
    auto t = tangent(*c.system, u, &ref);
    return {u, t ? *t : ref.normalized()};
}

void equilibrium_events(Curve& c, const ContinuationOptions& o) {
    const CurveSystem& sys = *c.system;
    const int nx = sys.unknowns() - 1;
    std::vector<CodimOnePoint> ev;
    auto add = [&](CurveKind k, std::size_t i, const Vec& u) {
        BranchPoint bp = sys.make_point(u);
        bp.arclength = c.points[i].arclength + (u - raw_u(c, i)).norm();
        ev.push_back({k, i, bp, sys.params_of(u)});
    };
    for (std::size_t i = 0; i + 1 < c.points.size(); ++i) {
        const auto& a = c.points[i].tests;
        const auto& b = c.points[i + 1].tests;
        if (sign_change(a.det_reduced, b.det_reduced)) {
            const RawPoint ra = raw_point(c, i);
            const Vec ub = raw_u(c, i + 1);
            const RawPoint z = locate_zero(sys, ra, ub, [&](const Vec& u) {
                return eq_jacobian(sys.params_of(u), sys.formulation(), u.head(nx)).determinant();
            }, o);
            // a fold reverses the parameter direction; otherwise the branch passes through another one
            const RawPoint rb = raw_point(c, i + 1);
            const bool fold = (ra.t[nx] > 0) != (rb.t[nx] > 0);
            add(fold ? CurveKind::SN : CurveKind::TC, i, z.u);
        }
        if (sign_change(a.axis_distance, b.axis_distance)) {
            const RawPoint z = locate_zero(sys, raw_point(c, i), raw_u(c, i + 1), [&](const Vec& u) {
                return evaluate_tests(sys.params_of(u), sys.state_of(u), sys.formulation()).axis_distance;
            }, o);
            add(CurveKind::TC, i, z.u);
        }
        if (sign_change(a.transverse_eig, b.transverse_eig) && sys.formulation() == Formulation::MlvAxis) {
            const RawPoint z = locate_zero(sys, raw_point(c, i), raw_u(c, i + 1), [&](const Vec& u) {
                return evaluate_tests(sys.params_of(u), sys.state_of(u), sys.formulation()).transverse_eig;
            }, o);
            add(CurveKind::TC, i, z.u);
        }
        if (dimension(sys.base()) == 2 && sign_change(a.tr_j, b.tr_j)) {
            const RawPoint z = locate_zero(sys, raw_point(c, i), raw_u(c, i + 1), [&](const Vec& u) {
                return eval_jacobian(sys.params_of(u), sys.state_of(u)).trace();
            }, o);
            const BranchPoint bp = sys.make_point(z.u);
            if (bp.tests.det_j > 0) add(CurveKind::HB, i, z.u);
        }
    }
    c.events = std::move(ev);
}

Vec correct_seed(const CurveSystem& sys, Vec u, int fixed_index, const ContinuationOptions& o) {
    // square Newton with one unknown frozen
    const int n = sys.unknowns();
    for (int it = 0; it < 30; ++it) {
        const Vec g = sys.residual(u);
        Mat a(n, n);
        a.topRows(n - 1) = sys.jacobian(u);
        a.row(n - 1) = Vec::Unit(n, fixed_index).transpose();
        Vec rhs(n);
        rhs.head(n - 1) = g;
        rhs[n - 1] = 0;
        Eigen::FullPivLU<Mat> lu(a);
        if (!lu.isInvertible()) break;
        const Vec du = lu.solve(rhs);
        u -= du;
        if (du.lpNorm<Eigen::Infinity>() <= o.tol * std::max(1.0, u.lpNorm<Eigen::Infinity>())) break;
    }
    if (!(sys.residual(u).lpNorm<Eigen::Infinity>() <= 1e-8 * residual_scale(sys, u)))
        throw NumericalError("continuation: seed does not satisfy the defining system");
    return u;
}

Curve continue_two_param(std::shared_ptr<CurveSystem> sys, const ParameterSet& params, const std::string& p,
                         const std::string& q, const StateVector& s, const ContinuationOptions& o) {
    if (p == q) throw UsageError("continuation: the two free parameters must differ");
    if (is_discrete_param(p) || is_discrete_param(q)) throw UsageError("continuation: eps is not continuable");
    Vec u = sys->pack(s, get_param(params, p), get_param(params, q));
    u = correct_seed(*sys, u, sys->unknowns() - 1, o);
    std::string diag;
    bool truncated = false;
    const auto raw = run(*sys, u, o, diag, truncated);
    Curve c = assemble(sys, raw, diag, truncated);
    c.markers = detect_codim2(c);
    return c;
}

}  // namespace

Curve continue_equilibrium_branch(const ParameterSet& params, const std::string& free_param, const StateVector& start,
                                  const ContinuationOptions& o) {
    if (is_discrete_param(free_param)) throw UsageError("continuation: eps is not continuable");
    get_param(params, free_param);  // validates the name
    const Formulation f = default_formulation(params, start);
    auto sys = std::make_shared<EqSystem>(params, f, std::vector<std::string>{free_param}, CurveKind::EQ);
    Vec u = sys->pack(start, get_param(params, free_param), 0);
    if (sys->residual(u).lpNorm<Eigen::Infinity>() > 1e-8 * residual_scale(*sys, u))
        throw UsageError("continue_equilibrium_branch: start is not an equilibrium");
    u = correct_seed(*sys, u, sys->unknowns() - 1, o);
    std::string diag;
    bool truncated = false;
    const auto raw = run(*sys, u, o, diag, truncated);
    Curve c = assemble(sys, raw, diag, truncated);
    if (o.locate_events) equilibrium_events(c, o);
    return c;
}

Curve continue_fold_curve(const ParameterSet& params, const std::string& p, const std::string& q,
                          const StateVector& fold_state, const ContinuationOptions& o) {
    const Formulation f = default_formulation(params, fold_state);
    auto sys = std::make_shared<FoldSystem>(params, f, std::vector<std::string>{p, q}, CurveKind::SN);
    return continue_two_param(sys, params, p, q, fold_state, o);
}

Curve continue_hopf_curve(const ParameterSet& params, const std::string& p, const std::string& q,
                          const StateVector& hopf_state, const ContinuationOptions& o) {
    if (dimension(params) != 2) throw UsageError("continue_hopf_curve: planar models only");
    const Formulation f = default_formulation(params, hopf_state);
    auto sys = std::make_shared<HopfSystem>(params, f, std::vector<std::string>{p, q}, CurveKind::HB);
    return continue_two_param(sys, params, p, q, hopf_state, o);
}

Curve tc_curve_mlv(const MlvParams& params, double x1_lo, double x1_hi, int samples) {
    if (params.a21 == 0) throw DegenerateModelError("a21", "transcritical curve requires a21 != 0");
    if (!(x1_hi > x1_lo) || samples < 2) throw UsageError("tc_curve_mlv: empty x1 range");
    auto sys = std::make_shared<TcSystem>(params);
    std::vector<RawPoint> raw;
    for (int i = 0; i < samples; ++i) {
        const double x1 = x1_lo + (x1_hi - x1_lo) * i / (samples - 1);
        Vec u(3);
        u << x1, -x1 * (params.b1 + params.a11 * x1), -params.a21 * x1;  // same association as the field: residual exactly 0
        raw.push_back({u, Vec()});
    }
    Curve c = assemble(sys, raw, "", false);
    c.markers = detect_codim2(c);
    return c;
}

std::vector<CodimTwoPoint> detect_codim2(const Curve& curve) {
    std::vector<CodimTwoPoint> out;
    if (!curve.system || curve.points.size() < 2) return out;
    const CurveSystem& sys = *curve.system;
    const ContinuationOptions o;
    const int nx = sys.unknowns() - static_cast<int>(sys.params().size());

    auto tests_at = [&](const Vec& u) {
        return evaluate_tests(sys.params_of(u), sys.state_of(u), sys.formulation());
    };
    auto emit = [&](CodimTwoKind k, const Vec& u) {
        CodimTwoPoint m;
        m.kind = k;
        m.p1 = u[nx];
        m.p2 = sys.params().size() > 1 ? u[nx + 1] : std::numeric_limits<double>::quiet_NaN();
        m.state = sys.state_of(u);
        const ParameterSet q = sys.params_of(u);
        const TestValues t = tests_at(u);
        m.residuals = {{"F", eval_field(q, m.state).norm_inf()}, {"det", t.det_j}, {"tr", t.tr_j}};
        if (std::isfinite(t.axis_distance)) m.residuals["axis_distance"] = t.axis_distance;
        m.curve_id = curve.id;
        for (const auto& e : out)
            if (e.kind == k && std::abs(e.p1 - m.p1) < 1e-6 && std::abs(e.p2 - m.p2) < 1e-6) return;
        out.push_back(std::move(m));
    };
    auto second_eig_small = [&](const Vec& u) {
        const ParameterSet q = sys.params_of(u);
        const StateVector s = sys.state_of(u);
        const Matrix2 j = eval_jacobian(q, s);
        if (dimension(q) == 1) return false;
        const EigenData e = eigen2(j);
        const double big = e.complex ? std::hypot(e.re[0], e.im[0]) : std::max(std::abs(e.re[0]), std::abs(e.re[1]));
        return big <= tol::kSecondEigRel * std::max(1.0, j.norm_max());
    };
    // A minimal-model curve posed in full form follows the trivial equilibrium itself, so a double
    // zero there is that model's own Bogdanov-Takens point rather than an interaction.
    const bool tracks_trivial = sys.formulation() == Formulation::Full && model_of(sys.params_of(raw_u(curve, 0))) != ModelId::Mlv;
    auto on_trivial_set = [&](const Vec& u) {
        if (tracks_trivial) return false;
        const double d = tests_at(u).axis_distance;
        return std::isfinite(d) && std::abs(d) <= 1e-8 * std::max(1.0, sys.state_of(u).norm_inf());
    };
    using Getter = double (*)(const TestValues&);
    auto scan = [&](Getter get, const std::function<void(const Vec&)>& classify_at) {
        for (std::size_t i = 0; i + 1 < curve.points.size(); ++i) {
            if (!sign_change(get(curve.points[i].tests), get(curve.points[i + 1].tests))) continue;
            RawPoint a;
            if (curve.kind == CurveKind::TC) {
                a = {raw_u(curve, i), (raw_u(curve, i + 1) - raw_u(curve, i)).normalized()};
            } else {
                a = raw_point(curve, i);
            }
            const RawPoint z = locate_zero(sys, a, raw_u(curve, i + 1), [&](const Vec& u) { return get(tests_at(u)); }, o);
            classify_at(z.u);
        }
    };

    switch (curve.kind) {
        case CurveKind::SN: {
            scan([](const TestValues& t) { return t.tr_j; },
                 [&](const Vec& u) { emit(on_trivial_set(u) ? CodimTwoKind::ST2 : CodimTwoKind::BT, u); });
            scan([](const TestValues& t) { return t.axis_distance; },
                 [&](const Vec& u) { emit(second_eig_small(u) ? CodimTwoKind::ST2 : CodimTwoKind::ST1, u); });
            std::vector<Vec> cusps;
            const FoldChain fc = fold_chain(curve);
            for (std::size_t i = 0; i + 1 < curve.points.size(); ++i) {
                if (!sign_change(fc.coeff[i], fc.coeff[i + 1])) continue;
                const NullPair* ref = fc.pairs[i] ? &*fc.pairs[i] : nullptr;
                const RawPoint z = locate_zero(sys, raw_point(curve, i), raw_u(curve, i + 1), [&](const Vec& u) {
                    return fold_coefficient(sys.params_of(u), sys.state_of(u), ref, nullptr);
                }, o);
                cusps.push_back(z.u);
            }
            for (const Vec& u : cusps) {
                // the fold coefficient also vanishes where the fold meets the invariant set
                const bool at_st = std::any_of(out.begin(), out.end(), [&](const CodimTwoPoint& m) {
                    return (m.kind == CodimTwoKind::ST1 || m.kind == CodimTwoKind::ST2) &&
                           std::abs(m.p1 - u[nx]) < 1e-6 && std::abs(m.p2 - u[nx + 1]) < 1e-6;
                });
                if (!at_st) emit(CodimTwoKind::CUSP, u);
            }
            break;
        }
        case CurveKind::HB:
            scan([](const TestValues& t) { return t.det_j; },
                 [&](const Vec& u) { emit(on_trivial_set(u) ? CodimTwoKind::ST2 : CodimTwoKind::BT, u); });
            scan([](const TestValues& t) { return t.axis_distance; }, [&](const Vec& u) {
                if (second_eig_small(u)) emit(CodimTwoKind::ST2, u);
            });
            break;
        case CurveKind::TC:
            scan([](const TestValues& t) { return t.tangential_eig; }, [&](const Vec& u) { emit(CodimTwoKind::ST2, u); });
            scan([](const TestValues& t) { return t.tc_coeff; }, [&](const Vec& u) { emit(CodimTwoKind::ST1, u); });
            break;
        default: break;
    }
    return out;
}

}  // namespace lvbif
