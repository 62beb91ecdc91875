#include <doctest.h>

#include <cmath>

#include "lvbif/normalform.hpp"
#include "support.hpp"

using namespace lvbif;
using lvbif::test::Rng;

namespace {

using Exp = TruncMultiPoly::Exponent;

double rel(double got, double want) { return std::abs(got - want) / std::max(1.0, std::abs(want)); }

// Random MLV coefficient sets that pass the double-zero guards.
std::vector<St2Data> random_st2(Rng& rng, int n) {
    std::vector<St2Data> out;
    while (static_cast<int>(out.size()) < n) {
        const MlvParams q{rng.uniform(-20, 20), 0, rng.uniform(-10, 10), rng.uniform(-10, 10),
                          rng.uniform(-10, 10), rng.uniform(-10, 10), 0};
        try {
            const St2Data d = st2_point(q);
            if (std::max({std::abs(d.k1), std::abs(d.k2), std::abs(d.k3)}) < 1e3) out.push_back(d);
        } catch (const DegenerateModelError&) {
        }
    }
    return out;
}

double manifold_scale(double k1, double k2, double k3) {
    const double m = std::max({1.0, std::abs(k1), std::abs(k2), std::abs(k3)});
    return m * m;
}

}  // namespace

TEST_CASE("single zero interaction point of the paper sets") {
    SUBCASE("saddle case") {
        const St1Data d = st1_point(test::saddle_set());
        CHECK(d.D1 == 1.0);
        CHECK(d.D2 == -4.0);
        CHECK(d.b2_star == doctest::Approx(-7.5).epsilon(1e-15));
        CHECK(d.e_star == doctest::Approx(14.0625).epsilon(1e-15));
        CHECK(d.x1_star == doctest::Approx(3.75).epsilon(1e-15));
        CHECK(d.x2_star == 0.0);
    }
    SUBCASE("elliptic case") {
        const St1Data d = st1_point(test::elliptic_set());
        CHECK(d.D1 == 13.0);
        CHECK(d.D2 == 20.0);
        CHECK(d.b2_star == doctest::Approx(1.5).epsilon(1e-15));
        CHECK(d.e_star == doctest::Approx(7.3125).epsilon(1e-15));
        CHECK(d.x1_star == doctest::Approx(-0.75).epsilon(1e-15));
    }
    SUBCASE("on the transcritical curve and the interior fold") {
        for (const MlvParams& q : {test::saddle_set(), test::elliptic_set()}) {
            const St1Data d = st1_point(q);
            CHECK(d.b2_star + q.a21 * d.x1_star == 0.0);
            // interior quadratic D1 x1^2 + (b1 a22 - a12 b2) x1 + a22 e has a double root
            const double c1 = q.b1 * q.a22 - q.a12 * d.b2_star;
            CHECK(std::abs(c1 * c1 - 4 * d.D1 * q.a22 * d.e_star) < 1e-8 * c1 * c1);
        }
    }
    SUBCASE("guards") {
        MlvParams q = test::saddle_set();
        q.a12 = 2 * q.a11 * q.a22 / q.a21;  // D2 = 0
        CHECK_THROWS_AS(st1_point(q), DegenerateModelError);
    }
}

TEST_CASE("double zero interaction point of the paper sets") {
    SUBCASE("saddle case") {
        const St2Data d = st2_point(test::saddle_set());
        CHECK(d.x1_star == 1.5);
        CHECK(d.e_star == -11.25);
        CHECK(d.b2_star == -3.0);
        CHECK(d.gamma == -4.5);
        CHECK(d.D3 == -6.0);
        CHECK(d.D4 == -8.0);
        CHECK(d.eps == 1.0);
        CHECK(rel(d.k1, std::sqrt(10.0) / 2) < 1e-15);
        CHECK(rel(d.k2, 8 / std::sqrt(10.0)) < 1e-15);
        CHECK(rel(d.k3, std::sqrt(10.0) / 15) < 1e-15);
        CHECK(d.dbt_type == "saddle");
    }
    SUBCASE("elliptic case") {
        const St2Data d = st2_point(test::elliptic_set());
        CHECK(d.eps == -1.0);
        CHECK(rel(d.k1, -std::sqrt(14.0) / 2) < 1e-15);
        CHECK(rel(d.k2, 16 / std::sqrt(14.0)) < 1e-15);
        CHECK(d.k2 * d.k2 > 8);
        CHECK(d.dbt_type == "elliptic");
    }
    SUBCASE("guards") {
        MlvParams q = test::saddle_set();
        q.a21 = -2 * q.a11;  // D4 = 0
        CHECK_THROWS_AS(st2_point(q), DegenerateModelError);
        q = test::saddle_set();
        q.a12 = 0;  // gamma = 0
        CHECK_THROWS_AS(st2_point(q), DegenerateModelError);
    }
}

TEST_CASE("coefficient conditions") {
    for (const MlvParams& q : {test::saddle_set(), test::elliptic_set()}) {
        const St2Data d = st2_point(q);
        const auto [r1, r2] = conditions_residual(d.k1, d.k2, d.k3, d.eps);
        CHECK(std::abs(r1) < 1e-12);
        CHECK(std::abs(r2) < 1e-12);
        const auto [p1, p2] = conditions_residual(d.k1, d.k2, d.k3 + 1e-3, d.eps);
        CHECK(p1 == r1);
        CHECK(std::abs(p2 - 3 * d.k1 * 1e-3) < 1e-15);
    }
    Rng rng(31);
    for (const St2Data& d : random_st2(rng, 1000)) {
        const auto [r1, r2] = conditions_residual(d.k1, d.k2, d.k3, d.eps);
        const double s = manifold_scale(d.k1, d.k2, d.k3);
        CHECK(std::abs(r1) < 1e-12 * s);
        CHECK(std::abs(r2) < 1e-12 * s);
    }
}

TEST_CASE("invariant manifold residual vanishes exactly when the conditions hold") {
    Rng rng(32);
    const auto sets = random_st2(rng, 100);
    for (const St2Data& d : sets) {
        const double s = manifold_scale(d.k1, d.k2, d.k3);
        CHECK(invariant_manifold_check(d.k1, d.k2, d.k3, d.eps).max_abs_coeff() < 1e-12 * s);
        CHECK(equilibrium_manifold_identity(d.k1, d.k3, d.eps).max_abs_coeff() < 1e-12 * s);
    }
    for (const St2Data& d : sets) {
        const double dk = 1e-3 * std::max(1.0, std::abs(d.k3));
        CHECK(invariant_manifold_check(d.k1, d.k2, d.k3 + dk, d.eps).max_abs_coeff() > 1e-12);
        const double dk2 = 1e-3 * std::max(1.0, std::abs(d.k2));
        CHECK(invariant_manifold_check(d.k1, d.k2 + dk2, d.k3, d.eps).max_abs_coeff() > 1e-12);
    }
}

TEST_CASE("low-order residual coefficients follow the two conditions") {
    // With g = eps k1 x^2 + x^3/3 at a = b = 0, expanding g' g - f2(x, g) by hand gives
    // x^3: eps (2 eps k1^2 - k1 k2 - 1) and, once that vanishes, x^4: -(3 k1 k3 - 1)/(3 k1).
    Rng rng(33);
    for (const St2Data& d : random_st2(rng, 50)) {
        for (const double dk3 : {0.0, 1e-3, -2e-2}) {
            const double k3 = d.k3 + dk3;
            const auto [r1, r2] = conditions_residual(d.k1, d.k2, k3, d.eps);
            const TruncMultiPoly res = invariant_manifold_check(d.k1, d.k2, k3, d.eps);
            const double s = manifold_scale(d.k1, d.k2, k3);
            CHECK(std::abs(res.coeff(Exp{3, 0, 0, 0}) - d.eps * r1) < 1e-12 * s);
            CHECK(std::abs(res.coeff(Exp{4, 0, 0, 0}) + r2 / (3 * d.k1)) < 1e-12 * s);
            // f2(x, 0) - x g / k1 = (k3 - 1/(3 k1)) x^4
            const TruncMultiPoly eq = equilibrium_manifold_identity(d.k1, k3, d.eps);
            CHECK(std::abs(eq.coeff(Exp{4, 0, 0, 0}) - r2 / (3 * d.k1)) < 1e-12 * s);
            CHECK((eq - eq.up_to_degree(4)).max_abs_coeff() == 0.0);
        }
    }
}

TEST_CASE("cusp relation") {
    const auto [mu, nu] = cusp_map(0, 3);
    CHECK(mu == doctest::Approx(2));
    CHECK(nu == doctest::Approx(-3));
    CHECK(std::abs(cusp_discriminant(mu, nu)) < 1e-12);
    CHECK(cusp_map_jacobian_det(1, 2) == doctest::Approx(1.0 / 3));
    for (int i = -20; i <= 20; ++i) {
        const double b = 0.1 * i;
        CHECK(std::abs(cusp_map_jacobian_det(0, b)) < 1e-15);
        CHECK(cusp_map_jacobian_det(b * b / 4, b) == doctest::Approx(b * b / 12).scale(1));
        for (const double a : {0.0, b * b / 4}) {
            const auto [m, n] = cusp_map(a, b);
            CHECK(std::abs(cusp_discriminant(m, n)) < 1e-12);
        }
    }
}

TEST_CASE("scalar model nondegeneracy coefficients") {
    const St1Nondegeneracy n = st1_nondegeneracy(2);
    CHECK(n.fold_df_da == -1.0);
    CHECK(n.fold_d2f_dx2 == -2.0);
    CHECK(n.tc_df_da == 0.0);
    CHECK(n.tc_d2f_dadx == 1.0);
    CHECK(n.tc_d2f_dx2 == 4.0);
    for (const double b : {-3.0, -0.5, 0.7, 2.0}) {
        const St1Nondegeneracy m = st1_nondegeneracy(b);
        CHECK(std::abs(m.fd_fold_df_da - m.fold_df_da) < 1e-6);
        CHECK(std::abs(m.fd_fold_d2f_dx2 - m.fold_d2f_dx2) < 1e-6);
        CHECK(std::abs(m.fd_tc_df_da - m.tc_df_da) < 1e-6);
        CHECK(std::abs(m.fd_tc_d2f_dadx - m.tc_d2f_dadx) < 1e-6);
        CHECK(std::abs(m.fd_tc_d2f_dx2 - m.tc_d2f_dx2) < 1e-6);
    }
    CHECK_THROWS_AS(st1_nondegeneracy(0), DegenerateModelError);
}

TEST_CASE("fold line of the double-zero model") {
    const St2Params s = test::st2_saddle();
    const Min2Fold z = min2_sn_curve(0, s.eps, s.k3, s.k1);
    CHECK(z.a_sn == 0.0);
    REQUIRE(z.x_sn.has_value());
    CHECK(*z.x_sn == 0.0);
    CHECK_FALSE(min2_sn_curve(0.1, s.eps, s.k3).x_sn.has_value());
    CHECK_THROWS_AS(min2_sn_curve(2 / s.k3, s.eps, s.k3), DomainError);
    // a + b x + eps x^2 + k3 x^3 has a double root at (a_SN, x_SN)
    for (const St2Params& p : {test::st2_saddle(), test::st2_elliptic()}) {
        for (int i = -10; i <= 10; ++i) {
            const double b = 0.03 * i;
            const Min2Fold f = min2_sn_curve(b, p.eps, p.k3, p.k1);
            const double x = *f.x_sn;
            CHECK(std::abs(f.a_sn + b * x + p.eps * x * x + p.k3 * x * x * x) < 1e-14);
            CHECK(std::abs(b + 2 * p.eps * x + 3 * p.k3 * x * x) < 1e-14);
        }
    }
}

TEST_CASE("map to the truncated DBT unfolding") {
    for (const MlvParams& q : {test::saddle_set(), test::elliptic_set()}) {
        const St2Data d = st2_point(q);
        const DbtMapData o = dbt_map(0, 0, d.eps, d.k1, d.k2);
        CHECK(o.mu1 == 0.0);
        CHECK(o.mu2 == 0.0);
        CHECK(o.nu == 0.0);
        const auto [z1, z2] = dbt_coordinates(o, 0.3, -0.2, 0);
        CHECK(z1 == 0.3);
        CHECK(z2 == -0.2);
        const double h = 1e-6;
        CHECK((dbt_map(h, 0, d.eps, d.k1, d.k2).mu2 - dbt_map(-h, 0, d.eps, d.k1, d.k2).mu2) / (2 * h) ==
              doctest::Approx(1).epsilon(1e-9));

        const double c = 3 * d.k1 - d.eps * d.k2;
        Rng rng(34);
        for (int k = 0; k < 500; ++k) {
            const DbtMapData m = dbt_map(rng.uniform(-1, 1), rng.uniform(-1, 1), d.eps, d.k1, d.k2);
            const auto s = dbt_surfaces(m.mu1, m.mu2, m.nu, d.eps, d.k1, d.k2);
            const double scale = std::abs(c * c * c * m.mu1) + std::abs(c * c * m.mu2 * m.nu) + std::abs(std::pow(m.nu, 3));
            CHECK(std::abs(s.s) < 1e-10 * std::max(1.0, scale));
        }
    }
}

TEST_CASE("curves where the embedding surface meets the saddle-node surface") {
    for (const MlvParams& q : {test::saddle_set(), test::elliptic_set()}) {
        const St2Data d = st2_point(q);
        const GammaCurves g0 = gamma_curves(0, d.eps, d.k1, d.k2);
        CHECK(g0.sn_mu1 == 0.0);
        CHECK(g0.sn_mu2 == 0.0);
        CHECK(g0.tc_mu1 == 0.0);
        CHECK(g0.tc_mu2 == 0.0);
        for (int i = -10; i <= 10; ++i) {
            if (i == 0) continue;
            const double nu = 0.1 * i;
            const GammaCurves g = gamma_curves(nu, d.eps, d.k1, d.k2);
            for (const auto& [m1, m2] : {std::pair{g.sn_mu1, g.sn_mu2}, std::pair{g.tc_mu1, g.tc_mu2}}) {
                const auto s = dbt_surfaces(m1, m2, nu, d.eps, d.k1, d.k2);
                CHECK(std::abs(s.s) < 1e-10);
                CHECK(std::abs(s.sn) < 1e-10);
            }
            // tangency along the TC curve, transversality along the SN curve
            const double tc = dbt_sn_slope_on_s(g.tc_mu2, nu, d.eps, d.k1, d.k2, 1e-4 * std::abs(g.tc_mu2));
            const double sn = dbt_sn_slope_on_s(g.sn_mu2, nu, d.eps, d.k1, d.k2, 1e-4 * std::abs(g.sn_mu2));
            CHECK(std::abs(tc) < 1e-6 * 12 * g.tc_mu2 * g.tc_mu2);
            CHECK(std::abs(sn) > 1e-2 * 12 * g.sn_mu2 * g.sn_mu2);
        }
    }
    CHECK_THROWS_AS(gamma_curves(0.1, 1, 1, 3), DegenerateModelError);
}

TEST_CASE("centre manifold of the single zero interaction") {
    for (const MlvParams& q : {test::saddle_set(), test::elliptic_set()}) {
        const St1CentreManifold cm = verify_st1_centre_manifold(q);
        CHECK(cm.residual.up_to_degree(2).max_abs_coeff() < 1e-12);
        // linear part of the reduced dynamics in z2 is (z4 + a21 z3) z2
        CHECK(cm.reduced_dynamics.coeff(Exp{0, 1, 0, 1}) == 1.0);
        CHECK(cm.reduced_dynamics.coeff(Exp{0, 1, 1, 0}) == q.a21);
        CHECK(cm.reduced_dynamics.coeff(Exp{0, 1, 0, 0}) == 0.0);

        const St1Data d = st1_point(q);
        const double delta = 1e-3;
        const St1CentreManifold off = verify_st1_centre_manifold(q, delta);
        const double z2z2 = off.residual.coeff(Exp{0, 2, 0, 0});
        CHECK(std::abs(z2z2) == doctest::Approx(delta * std::abs(q.b1 * q.a12 * q.a21 / d.D2)).epsilon(1e-9));
    }
}

TEST_CASE("first Lyapunov coefficient") {
    // x' = -y + x (x^2 + y^2), y' = x + y (x^2 + y^2): r' = r^3 in polar form
    const Matrix2 rot{0, -1, 1, 0};
    SecondDerivs none;
    ThirdDerivs c;
    c.d[0][0][0][0] = 6;
    c.d[0][0][1][1] = c.d[0][1][0][1] = c.d[0][1][1][0] = 2;
    c.d[1][1][1][1] = 6;
    c.d[1][0][0][1] = c.d[1][0][1][0] = c.d[1][1][0][0] = 2;
    const double unit = first_lyapunov(rot, none, c);
    CHECK(unit > 0);

    SUBCASE("linear oscillator") { CHECK(first_lyapunov(rot, none, ThirdDerivs{}) == 0.0); }
    SUBCASE("double-zero model on its Hopf line") {
        // the Guckenheimer-Holmes cubic coefficient at a = -1 is 1/8 in units where r' = r^3 gives 1
        St2Params p = test::st2_saddle();
        p.a = -1;
        p.b = 0;
        CHECK(first_lyapunov(p, StateVector(0.0, 0.0)) == doctest::Approx(unit / 8).epsilon(1e-12));
        p = test::st2_elliptic();
        p.a = -1;
        p.b = 0;
        CHECK(first_lyapunov(p, StateVector(0.0, 0.0)) == doctest::Approx(unit / 8).epsilon(1e-12));
        for (const double a : {-0.01, -0.3, -4.0}) {
            p.a = a;
            CHECK(first_lyapunov(p, StateVector(0.0, 0.0)) > 0);
        }
    }
    SUBCASE("not a Hopf point") {
        St2Params p = test::st2_saddle();
        p.a = 1;
        CHECK_THROWS_AS(first_lyapunov(p, StateVector(0.0, 0.0)), UsageError);
    }
}
