#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "lvbif/equilibria.hpp"
#include "support.hpp"

using namespace lvbif;
using lvbif::test::Rng;

namespace {

MlvParams at(MlvParams p, double e, double b2) {
    p.e = e;
    p.b2 = b2;
    return p;
}

std::vector<double> quadratic_roots(double c0, double c1, double c2, double* disc_out) {
    const double disc = c1 * c1 - 4 * c2 * c0;
    *disc_out = disc;
    if (disc < 0) return {};
    const double s = std::sqrt(disc);
    return {(-c1 - s) / (2 * c2), (-c1 + s) / (2 * c2)};
}

// Grid oracle: cells where both field components take both signs at the corners, grouped
// into 8-connected components. Each simple equilibrium well inside the box gives one component.
struct MeshOracle {
    double x1_lo, x1_hi, x2_lo, x2_hi;
    int n = 256;

    double cell1() const { return (x1_hi - x1_lo) / (n - 1); }
    double cell2() const { return (x2_hi - x2_lo) / (n - 1); }

    static double f1(const MlvParams& p, double x, double y) { return x * (p.b1 + p.a11 * x + p.a12 * y) + p.e; }
    static double f2(const MlvParams& p, double x, double y) { return y * (p.b2 + p.a21 * x + p.a22 * y); }

    // Both components change sign over the corners of [x, x + w] x [y, y + h].
    static bool straddles(const MlvParams& p, double x, double y, double w, double h) {
        double lo1 = 1e300, hi1 = -1e300, lo2 = 1e300, hi2 = -1e300;
        for (double cx : {x, x + w})
            for (double cy : {y, y + h}) {
                const double u = f1(p, cx, cy), v = f2(p, cx, cy);
                lo1 = std::min(lo1, u);
                hi1 = std::max(hi1, u);
                lo2 = std::min(lo2, v);
                hi2 = std::max(hi2, v);
            }
        return lo1 <= 0 && hi1 >= 0 && lo2 <= 0 && hi2 >= 0;
    }

    // Nullclines that pass close without crossing also straddle a coarse cell; keep the cell only if
    // the straddle survives repeated halving.
    static bool confirmed(const MlvParams& p, double x, double y, double w, double h, int depth) {
        if (!straddles(p, x, y, w, h)) return false;
        if (depth == 0) return true;
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
                if (confirmed(p, x + i * w / 2, y + j * h / 2, w / 2, h / 2, depth - 1)) return true;
        return false;
    }

    int count(const MlvParams& p) const {
        const int m = n - 1;
        std::vector<char> mark(static_cast<std::size_t>(m * m), 0);
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j)
                mark[static_cast<std::size_t>(i * m + j)] =
                    confirmed(p, x1_lo + i * cell1(), x2_lo + j * cell2(), cell1(), cell2(), 8);
        int components = 0;
        std::vector<int> stack;
        for (int c = 0; c < m * m; ++c) {
            if (mark[static_cast<std::size_t>(c)] != 1) continue;
            ++components;
            stack.push_back(c);
            mark[static_cast<std::size_t>(c)] = 2;
            while (!stack.empty()) {
                const int k = stack.back();
                stack.pop_back();
                const int i = k / m, j = k % m;
                for (int qi = std::max(0, i - 1); qi <= std::min(m - 1, i + 1); ++qi)
                    for (int qj = std::max(0, j - 1); qj <= std::min(m - 1, j + 1); ++qj) {
                        const int kk = qi * m + qj;
                        if (mark[static_cast<std::size_t>(kk)] == 1) {
                            mark[static_cast<std::size_t>(kk)] = 2;
                            stack.push_back(kk);
                        }
                    }
            }
        }
        return components;
    }

    // Independent closed-form roots; false when two of them (or a near-tangency) lie within three cells
    // of each other or of the box edge, where the mesh cannot separate them.
    bool resolvable(const MlvParams& p) const {
        const double sep = 3 * std::hypot(cell1(), cell2());
        std::vector<std::pair<double, double>> pts;
        double da = 0, di = 0;
        for (double x : quadratic_roots(p.e, p.b1, p.a11, &da)) pts.emplace_back(x, 0.0);
        const double d1 = p.a11 * p.a22 - p.a12 * p.a21;
        for (double x : quadratic_roots(p.a22 * p.e, p.b1 * p.a22 - p.a12 * p.b2, d1, &di))
            pts.emplace_back(x, -(p.b2 + p.a21 * x) / p.a22);
        if (std::sqrt(std::abs(da)) / std::abs(2 * p.a11) < sep) return false;
        if (std::sqrt(std::abs(di)) / std::abs(2 * d1) < sep) return false;
        for (std::size_t i = 0; i < pts.size(); ++i) {
            const auto [x, y] = pts[i];
            if (x < x1_lo + sep || x > x1_hi - sep || y < x2_lo + sep || y > x2_hi - sep) {
                if (x > x1_lo - sep && x < x1_hi + sep && y > x2_lo - sep && y < x2_hi + sep) return false;
            }
            for (std::size_t j = 0; j < i; ++j)
                if (std::hypot(x - pts[j].first, y - pts[j].second) < sep) return false;
        }
        return true;
    }

    bool inside(const StateVector& s) const { return s[0] > x1_lo && s[0] < x1_hi && s[1] > x2_lo && s[1] < x2_hi; }
};

void completeness_on_grid(const MlvParams& base, double e_lo, double e_hi, double b2_lo, double b2_hi,
                          const MeshOracle& oracle, int min_compared) {
    int compared = 0;
    for (int i = 0; i < 50; ++i)
        for (int j = 0; j < 50; ++j) {
            const MlvParams p = at(base, e_lo + (e_hi - e_lo) * i / 49.0, b2_lo + (b2_hi - b2_lo) * j / 49.0);
            if (!oracle.resolvable(p)) continue;
            int inside = 0;
            for (const auto& eq : find_equilibria_mlv(p)) inside += oracle.inside(eq.state);
            CAPTURE(p.e);
            CAPTURE(p.b2);
            CHECK(inside == oracle.count(p));
            ++compared;
        }
    CHECK(compared >= min_compared);
}

}  // namespace

TEST_CASE("MLV axis equilibria") {
    MlvParams p = test::saddle_set();
    p.b2 = -3;
    p.e = -10;
    std::vector<double> axis;
    for (const auto& eq : find_equilibria_mlv(p))
        if (eq.on_axis) {
            CHECK(eq.state[1] == 0.0);
            axis.push_back(eq.state[0]);
        }
    REQUIRE(axis.size() == 2);
    std::sort(axis.begin(), axis.end());
    CHECK(axis[0] == doctest::Approx(1).epsilon(1e-14));
    CHECK(axis[1] == doctest::Approx(2).epsilon(1e-14));

    SUBCASE("vanishing discriminant gives one double axis equilibrium") {
        // b2 = -3 would put the interior equilibrium there too (the double-zero point)
        p.b2 = -1;
        p.e = p.b1 * p.b1 / (4 * p.a11);
        int n = 0;
        for (const auto& eq : find_equilibria_mlv(p))
            if (eq.on_axis) {
                ++n;
                CHECK(eq.multiplicity == 2);
                CHECK(eq.state[0] == doctest::Approx(-p.b1 / (2 * p.a11)));
            }
        CHECK(n == 1);
    }
    SUBCASE("no predator-free equilibrium below the fold") {
        p.e = -12;
        for (const auto& eq : find_equilibria_mlv(p)) CHECK_FALSE(eq.on_axis);
    }
}

TEST_CASE("MLV degenerate coefficients") {
    MlvParams p = test::saddle_set();
    p.a11 = 0;
    CHECK_THROWS_AS(find_equilibria_mlv(p), DegenerateModelError);
    p = test::saddle_set();
    p.a22 = 0;
    CHECK_THROWS_AS(find_equilibria_mlv(p), DegenerateModelError);
}

TEST_CASE("minimal model equilibria") {
    SUBCASE("scalar model at the transcritical line") {
        const auto eqs = find_equilibria_min(St1Params{0, 2, 1});
        REQUIRE(eqs.size() == 2);
        CHECK(eqs[0].state[0] == doctest::Approx(-2));
        CHECK(eqs[0].multiplicity == 1);
        CHECK(eqs[1].state[0] == 0.0);
        CHECK(eqs[1].multiplicity == 2);
    }
    SUBCASE("scalar model at the fold line") {
        const double b = 2;
        const auto eqs = find_equilibria_min(St1Params{b * b / 4, b, 1});
        REQUIRE(eqs.size() == 2);
        CHECK(eqs[0].state[0] == doctest::Approx(-1).epsilon(1e-7));
        CHECK(eqs[0].multiplicity == 2);
        CHECK(std::abs(eqs[0].eigen.re[0]) < 1e-9);
        CHECK(eqs[1].state[0] == 0.0);
    }
    SUBCASE("double-zero model at the organising point") {
        St2Params p = test::st2_saddle();
        p.a = p.b = 0;
        p.k3 = 1 / (3 * p.k1);
        const auto eqs = find_equilibria_min(p);
        REQUIRE(eqs.size() == 2);
        CHECK(eqs[0].state[0] == doctest::Approx(-p.eps / p.k3));
        CHECK(eqs[0].state[1] == 0.0);
        CHECK(eqs[1].state[0] == 0.0);
        CHECK(eqs[1].multiplicity == 3);
    }
    CHECK_THROWS_AS(find_equilibria_min(test::saddle_set()), UsageError);
}

TEST_CASE("classification examples") {
    St2Params p = test::st2_saddle();
    p.a = -1;
    p.b = 0;
    CHECK(make_equilibrium(p, StateVector(0.0, 0.0)).classification == EqClass::HopfType);
    p.a = 0;
    CHECK(make_equilibrium(p, StateVector(0.0, 0.0)).classification == EqClass::DoubleZero);

    MlvParams m = test::saddle_set();
    m.b2 = -3;
    m.e = -10;
    // x1 = 2: b1 + 2 a11 x1 = -5 and b2 + a21 x1 = 1
    CHECK(make_equilibrium(m, StateVector(2.0, 0.0)).classification == EqClass::Saddle);
    // x1 = 1: b1 + 2 a11 x1 = 5 and b2 + a21 x1 = -1
    CHECK(make_equilibrium(m, StateVector(1.0, 0.0)).classification == EqClass::Saddle);

    EigenData e;
    e.count = 2;
    e.re = {-1e-12, -3};
    CHECK(classify(e, 1e-8) == EqClass::FoldType);
    e.re = {-1, -3};
    CHECK(classify(e, 1e-8) == EqClass::Sink);
    e.re = {1, 3};
    CHECK(classify(e, 1e-8) == EqClass::Source);
    e.re = {std::nan(""), 3};
    CHECK(classify(e, 1e-8) == EqClass::Degenerate);
}

TEST_CASE("returned equilibria have small residuals") {
    Rng rng(21);
    for (int k = 0; k < 2000; ++k) {
        MlvParams p{rng.uniform(-20, 20), rng.uniform(-20, 20), rng.uniform(-10, 10), rng.uniform(-10, 10),
                    rng.uniform(-10, 10), rng.uniform(-10, 10), rng.uniform(-20, 20)};
        const auto eqs = find_equilibria_mlv(p);
        CHECK(eqs.size() <= 4);
        const double scale = std::max(1.0, param_scale(p));
        for (const auto& eq : eqs) {
            CHECK(eq.residual < 1e-10 * scale);
            if (eq.on_axis) CHECK(eq.state[1] == 0.0);
            CHECK(eq.outside_first_quadrant == (eq.state[0] < 0 || eq.state[1] < 0));
        }
    }
    for (int k = 0; k < 1000; ++k) {
        St2Params p = test::st2_saddle();
        p.a = rng.uniform(-1, 1);
        p.b = rng.uniform(-1, 1);
        for (const auto& eq : find_equilibria_min(p)) CHECK(eq.residual < 1e-10 * std::max(1.0, std::pow(eq.state.norm_inf(), 4)));
    }
}

TEST_CASE("equilibrium counts agree with a mesh oracle over the saddle-case window") {
    // x2 box offset so that no mesh node sits on the invariant axis
    completeness_on_grid(test::saddle_set(), -14, 16, -8, 0, MeshOracle{-20, 20, -45.1, 44.9}, 1300);
}

TEST_CASE("equilibrium counts agree with a mesh oracle over the elliptic-case window") {
    completeness_on_grid(test::elliptic_set(), -20, 12, -4, 4, MeshOracle{-6, 6, -12.05, 11.95}, 1900);
}
