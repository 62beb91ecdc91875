#include "lvbif/algebra.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace lvbif {

namespace {

constexpr double kNearDegenerate = 1e-10;  // relative discriminant below which we bracket instead
constexpr double kEps = std::numeric_limits<double>::epsilon();

struct Candidates {
    std::vector<double> roots;
    bool near_degenerate = false;
};

// Roots of c0 + c1 x + c2 x^2 with c2 != 0.
void quadratic(double c0, double c1, double c2, Candidates& out) {
    const double disc = c1 * c1 - 4 * c2 * c0;
    const double ref = std::max(c1 * c1, std::abs(4 * c2 * c0));
    if (ref > 0 && std::abs(disc) <= kNearDegenerate * ref) out.near_degenerate = true;
    if (disc < 0) return;
    const double q = -0.5 * (c1 + std::copysign(std::sqrt(disc), c1));
    if (q == 0) {
        out.roots.push_back(0.0);
        out.roots.push_back(0.0);
        return;
    }
    out.roots.push_back(q / c2);
    out.roots.push_back(c0 / q);
}

// Roots of x^3 + a x^2 + b x + c.
void monic_cubic(double a, double b, double c, Candidates& out) {
    const double p = b - a * a / 3;
    const double q = 2 * a * a * a / 27 - a * b / 3 + c;
    const double h = q / 2, r = p / 3;
    const double disc = h * h + r * r * r;
    const double ref = std::max(h * h, std::abs(r * r * r));
    if (ref > 0 && std::abs(disc) <= kNearDegenerate * ref) out.near_degenerate = true;
    if (ref == 0) {
        out.roots.push_back(-a / 3);
        return;
    }
    if (disc > 0) {
        const double u = std::cbrt(-h - std::copysign(std::sqrt(disc), h));
        const double t = (u != 0) ? u - r / u : 0.0;
        out.roots.push_back(t - a / 3);
    } else {
        const double m = 2 * std::sqrt(-r);
        const double arg = std::clamp(-h / std::sqrt(-r * r * r), -1.0, 1.0);
        const double theta = std::acos(arg) / 3;
        for (int k = 0; k < 3; ++k)
            out.roots.push_back(m * std::cos(theta - 2 * std::numbers::pi * k / 3) - a / 3);
    }
}

// Roots of x^4 + a x^3 + b x^2 + c x + d (Ferrari).
void monic_quartic(double a, double b, double c, double d, Candidates& out) {
    const double a2 = a * a;
    const double p = b - 3 * a2 / 8;
    const double q = c - a * b / 2 + a2 * a / 8;
    const double r = d - a * c / 4 + a2 * b / 16 - 3 * a2 * a2 / 256;
    const double shift = -a / 4;
    const double ref = std::max({std::abs(p) * std::abs(p), std::abs(r), std::abs(q) * std::sqrt(std::abs(p) + 1e-300)});
    Candidates y;
    if (std::abs(q) <= 1e-14 * std::max(1.0, ref)) {
        Candidates z;
        quadratic(r, p, 1.0, z);
        y.near_degenerate = z.near_degenerate;
        for (double zi : z.roots) {
            if (zi > 0) {
                y.roots.push_back(std::sqrt(zi));
                y.roots.push_back(-std::sqrt(zi));
            } else if (zi > -kNearDegenerate * std::max(1.0, std::abs(p))) {
                y.roots.push_back(0.0);
                if (zi != 0) y.near_degenerate = true;
            }
        }
    } else {
        // Resolvent 8m^3 + 8p m^2 + (2p^2 - 8r) m - q^2 = 0 has a positive root.
        Candidates res;
        monic_cubic(p, (p * p / 4 - r), -q * q / 8, res);
        double m = 0;
        for (double mi : res.roots) m = std::max(m, mi);
        // polish m on the resolvent
        for (int it = 0; it < 3 && m > 0; ++it) {
            const double f = ((m + p) * m + (p * p / 4 - r)) * m - q * q / 8;
            const double df = (3 * m + 2 * p) * m + (p * p / 4 - r);
            if (df == 0) break;
            const double step = f / df;
            if (m - step <= 0) break;
            m -= step;
        }
        if (m <= 0) {
            out.near_degenerate = true;
            return;
        }
        const double s = std::sqrt(2 * m);
        quadratic(p / 2 + m + q / (2 * s), -s, 1.0, y);
        const bool nd1 = y.near_degenerate;
        quadratic(p / 2 + m - q / (2 * s), s, 1.0, y);
        y.near_degenerate = y.near_degenerate || nd1;
    }
    out.near_degenerate = out.near_degenerate || y.near_degenerate;
    for (double t : y.roots) out.roots.push_back(t + shift);
}

double newton_polish(const Poly1& p, const Poly1& dp, double x) {
    double best = x, best_res = std::abs(p(x));
    for (int it = 0; it < 4 && best_res > 0; ++it) {
        const double d = dp(x);
        if (d == 0 || !std::isfinite(d)) break;
        x -= p(x) / d;
        const double res = std::abs(p(x));
        if (!(res < best_res)) break;
        best = x;
        best_res = res;
    }
    return best;
}

double bisect_root(const Poly1& p, double lo, double hi) {
    double flo = p(lo);
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        const double fm = p(mid);
        if (fm == 0) return mid;
        if ((fm < 0) == (flo < 0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

int rounding_sign(const Poly1& p, double x) {
    const double v = p(x);
    if (std::abs(v) <= 64 * kEps * p.magnitude(x)) return 0;
    return v > 0 ? 1 : -1;
}

std::vector<RealRoot> solve_nonzero_constant(const Poly1& p, double cluster_tol);

// Critical points of p split the line into monotone pieces; bracket each piece.
std::vector<RealRoot> solve_bracketed(const Poly1& p, double cluster_tol) {
    const int n = p.degree();
    const double lead = p.coeff(n);
    double bound = 0;
    for (int i = 0; i < n; ++i) bound = std::max(bound, std::abs(p.coeff(i) / lead));
    bound += 1;

    std::vector<RealRoot> crit;
    if (n >= 2) crit = solve_poly_real(p.derivative(), cluster_tol);

    std::vector<RealRoot> out;
    std::vector<double> knots{-bound};
    for (const auto& c : crit) {
        if (c.value <= -bound || c.value >= bound) continue;
        knots.push_back(c.value);
        if (rounding_sign(p, c.value) == 0) out.push_back({c.value, c.multiplicity + 1});
    }
    knots.push_back(bound);
    for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
        const int s0 = rounding_sign(p, knots[i]), s1 = rounding_sign(p, knots[i + 1]);
        if (s0 != 0 && s1 != 0 && s0 != s1) out.push_back({bisect_root(p, knots[i], knots[i + 1]), 1});
    }
    return out;
}

std::vector<RealRoot> cluster(std::vector<RealRoot> roots, double tol) {
    std::sort(roots.begin(), roots.end(), [](const auto& a, const auto& b) { return a.value < b.value; });
    std::vector<RealRoot> out;
    for (const auto& r : roots) {
        if (!out.empty() && std::abs(r.value - out.back().value) < tol) {
            auto& b = out.back();
            const int m = b.multiplicity + r.multiplicity;
            b.value = (b.value * b.multiplicity + r.value * r.multiplicity) / m;
            b.multiplicity = m;
        } else {
            out.push_back(r);
        }
    }
    return out;
}

std::vector<RealRoot> solve_nonzero_constant(const Poly1& p, double cluster_tol) {
    const int n = p.degree();
    if (n == 0) return {};
    if (n == 1) return {{-p.coeff(0) / p.coeff(1), 1}};

    Candidates cand;
    const double lead = p.coeff(n);
    if (n == 2) quadratic(p.coeff(0), p.coeff(1), p.coeff(2), cand);
    if (n == 3) monic_cubic(p.coeff(2) / lead, p.coeff(1) / lead, p.coeff(0) / lead, cand);
    if (n == 4) monic_quartic(p.coeff(3) / lead, p.coeff(2) / lead, p.coeff(1) / lead, p.coeff(0) / lead, cand);

    const Poly1 dp = p.derivative();
    std::vector<RealRoot> roots;
    bool degenerate = cand.near_degenerate;
    for (double x : cand.roots) {
        if (!std::isfinite(x)) {
            degenerate = true;
            break;
        }
        const double r = newton_polish(p, dp, x);
        // a tiny slope at a polished root signals a near-multiple root
        if (std::abs(dp(r)) <= 1e-5 * std::max(dp.magnitude(r), 1e-300)) degenerate = true;
        roots.push_back({r, 1});
    }
    if (degenerate) return cluster(solve_bracketed(p, cluster_tol), cluster_tol);
    return cluster(std::move(roots), cluster_tol);
}

}  // namespace

Poly1::Poly1(std::vector<double> ascending) : c_(std::move(ascending)) {
    while (!c_.empty() && c_.back() == 0.0) c_.pop_back();
    if (c_.size() > 5) throw UsageError("Poly1 supports degree <= 4");
    for (double c : c_)
        if (!std::isfinite(c)) throw UsageError("Poly1 coefficients must be finite");
}

double Poly1::operator()(double x) const noexcept {
    double v = 0;
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) v = v * x + *it;
    return v;
}

Poly1 Poly1::derivative() const {
    std::vector<double> d;
    for (std::size_t i = 1; i < c_.size(); ++i) d.push_back(static_cast<double>(i) * c_[i]);
    return Poly1(std::move(d));
}

double Poly1::scale() const noexcept {
    double s = 0;
    for (double c : c_) s = std::max(s, std::abs(c));
    return s;
}

double Poly1::magnitude(double x) const noexcept {
    double v = 0;
    const double ax = std::abs(x);
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) v = v * ax + std::abs(*it);
    return v;
}

std::vector<RealRoot> solve_poly_real(const Poly1& p, double cluster_tol) {
    if (p.degree() < 0) throw UsageError("solve_poly_real: zero polynomial");
    if (!(cluster_tol > 0)) throw UsageError("solve_poly_real: tol must be positive");
    // exact zero roots are split off first so that they come back exactly 0
    int zeros = 0;
    while (zeros < p.degree() && p.coeff(zeros) == 0.0) ++zeros;
    std::vector<double> rest(p.coeffs().begin() + zeros, p.coeffs().end());
    auto roots = solve_nonzero_constant(Poly1(std::move(rest)), cluster_tol);
    if (zeros > 0) roots.push_back({0.0, zeros});
    return cluster(std::move(roots), cluster_tol);
}

EigenData eigen2(const Matrix2& m) {
    EigenData e;
    e.count = 2;
    e.trace = m.trace();
    e.det = m.det();
    const double h = 0.5 * e.trace;
    const double disc = h * h - e.det;
    if (disc >= 0) {
        const double s = std::sqrt(disc);
        const double l1 = h + std::copysign(s, h);
        const double l2 = (l1 != 0) ? e.det / l1 : 0.0;
        e.re = {std::min(l1, l2), std::max(l1, l2)};
    } else {
        e.complex = true;
        const double w = std::sqrt(-disc);
        e.re = {h, h};
        e.im = {w, -w};
    }
    return e;
}

EigenData eigen_scalar(double derivative) {
    EigenData e;
    e.count = 1;
    e.trace = e.det = derivative;
    e.re = {derivative, 0};
    return e;
}

EigenData eigen_of(const Matrix2& jac, int dim) { return dim == 1 ? eigen_scalar(jac.a00) : eigen2(jac); }

StateVector real_eigenvector(const Matrix2& m, double lambda) {
    // rows of (m - lambda I) annihilate v; use the row with the larger norm
    const StateVector v1(m.a01, lambda - m.a00);
    const StateVector v2(lambda - m.a11, m.a10);
    StateVector v = v1.norm2() >= v2.norm2() ? v1 : v2;
    const double n = v.norm2();
    if (n == 0) return {1.0, 0.0};  // m = lambda I: any vector
    return (1.0 / n) * v;
}

StateVector real_left_eigenvector(const Matrix2& m, double lambda) { return real_eigenvector(m.transposed(), lambda); }

StateVector solve2(const Matrix2& m, const StateVector& rhs) {
    const double d = m.det();
    if (d == 0 || !std::isfinite(d)) throw NumericalError("singular 2x2 system");
    return {(m.a11 * rhs[0] - m.a01 * rhs[1]) / d, (m.a00 * rhs[1] - m.a10 * rhs[0]) / d};
}

}  // namespace lvbif
