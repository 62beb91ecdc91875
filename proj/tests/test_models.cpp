#include <doctest.h>

#include <cmath>

#include "lvbif/integrator.hpp"
#include "lvbif/models.hpp"
#include "support.hpp"

using namespace lvbif;
using lvbif::test::Rng;

namespace {

MlvParams fig_point() {
    MlvParams p = test::saddle_set();
    p.b2 = -3;
    p.e = -10;
    return p;
}

ParameterSet random_params(ModelId id, Rng& rng) {
    ParameterSet p = default_params(id);
    for (const auto& name : parameter_names(id))
        if (!is_discrete_param(name)) set_param(p, name, rng.uniform(-3, 3));
    return p;
}

}  // namespace

TEST_CASE("MLV field at the origin is the immigration term") {
    const StateVector f = eval_field(fig_point(), StateVector(0.0, 0.0));
    CHECK(f[0] == -10.0);
    CHECK(f[1] == 0.0);
}

TEST_CASE("MLV x1-axis is invariant bitwise") {
    Rng rng(1);
    for (int i = 0; i < 500; ++i) {
        auto p = random_params(ModelId::Mlv, rng);
        CHECK(eval_field(p, StateVector(rng.uniform(-100, 100), 0.0))[1] == 0.0);
    }
}

TEST_CASE("ST2_MIN origin is always an equilibrium") {
    Rng rng(2);
    for (int i = 0; i < 100; ++i) {
        auto p = random_params(ModelId::St2Min, rng);
        const StateVector f = eval_field(p, StateVector(0.0, 0.0));
        CHECK(f[0] == 0.0);
        CHECK(f[1] == 0.0);
    }
}

TEST_CASE("Jacobians at the special points") {
    SUBCASE("MLV axis point is upper triangular") {
        const MlvParams p = fig_point();
        const double x1 = 1.7;
        const Matrix2 j = eval_jacobian(p, StateVector(x1, 0.0));
        CHECK(j.a00 == doctest::Approx(p.b1 + 2 * p.a11 * x1));
        CHECK(j.a01 == doctest::Approx(p.a12 * x1));
        CHECK(j.a10 == 0.0);
        CHECK(j.a11 == doctest::Approx(p.b2 + p.a21 * x1));
    }
    SUBCASE("ST2_MIN origin") {
        St2Params p = test::st2_saddle();
        p.a = -0.7;
        p.b = 0.3;
        const Matrix2 j = eval_jacobian(p, StateVector(0.0, 0.0));
        CHECK(j.a00 == 0.0);
        CHECK(j.a01 == 1.0);
        CHECK(j.a10 == doctest::Approx(-0.7));
        CHECK(j.a11 == doctest::Approx(p.k1 * 0.3));
    }
    SUBCASE("cusp unfolding at zero") {
        CHECK(eval_jacobian(CuspParams{0.4, -1.3}, StateVector(0.0)).a00 == doctest::Approx(-1.3));
    }
}

TEST_CASE("analytic Jacobians match central differences on random points") {
    Rng rng(3);
    for (const ModelId id : {ModelId::Mlv, ModelId::St1Min, ModelId::St2Min, ModelId::CuspUnf, ModelId::DbtTrunc}) {
        CAPTURE(to_string(id));
        for (int k = 0; k < 100; ++k) {
            auto p = random_params(id, rng);
            if (auto* s = std::get_if<St2Params>(&p)) s->extension = k % 2;
            const int n = dimension(id);
            const StateVector x = n == 1 ? StateVector(rng.uniform(-2, 2)) : StateVector(rng.uniform(-2, 2), rng.uniform(-2, 2));
            const Matrix2 j = eval_jacobian(p, x);
            const double h = 1e-6;
            for (int c = 0; c < n; ++c) {
                StateVector up = x, dn = x;
                up[c] += h;
                dn[c] -= h;
                const StateVector col = (1 / (2 * h)) * (eval_field(p, up) - eval_field(p, dn));
                const double scale = std::max(1.0, j.norm_max());
                CHECK(std::abs(col[0] - (c == 0 ? j.a00 : j.a01)) / scale < 1e-6);
                if (n == 2) CHECK(std::abs(col[1] - (c == 0 ? j.a10 : j.a11)) / scale < 1e-6);
            }
        }
    }
}

TEST_CASE("parameter derivatives match central differences") {
    Rng rng(4);
    for (const ModelId id : {ModelId::Mlv, ModelId::St2Min, ModelId::DbtTrunc}) {
        auto p = random_params(id, rng);
        const StateVector x(rng.uniform(-2, 2), rng.uniform(-2, 2));
        for (const auto& name : parameter_names(id)) {
            if (is_discrete_param(name)) continue;
            CAPTURE(name);
            const double v = get_param(p, name), h = 1e-6;
            const StateVector fd = (1 / (2 * h)) * (eval_field(with_param(p, name, v + h), x) -
                                                    eval_field(with_param(p, name, v - h), x));
            const StateVector an = eval_param_derivative(p, x, name);
            CHECK(fd[0] == doctest::Approx(an[0]).epsilon(1e-6).scale(1));
            CHECK(fd[1] == doctest::Approx(an[1]).epsilon(1e-6).scale(1));
        }
    }
}

TEST_CASE("dimension mismatch and unknown names are usage errors") {
    CHECK_THROWS_AS(eval_field(fig_point(), StateVector(1.0)), UsageError);
    CHECK_THROWS_AS(eval_jacobian(St1Params{}, StateVector(1.0, 2.0)), UsageError);
    CHECK_THROWS_AS(get_param(fig_point(), "a33"), UsageError);
    CHECK_THROWS_AS(model_from_string("LV"), UsageError);
}

TEST_CASE("coefficient guards") {
    St2Params p = test::st2_saddle();
    CHECK_NOTHROW(validate(p));
    p.k2 = 2 * std::sqrt(2.0);
    CHECK_THROWS_AS(validate(p), DegenerateModelError);
    p = test::st2_saddle();
    p.k3 = 0;
    CHECK_THROWS_AS(validate(p), DegenerateModelError);
    St1Params s;
    s.eps = 0.5;
    CHECK_THROWS_AS(validate(s), DegenerateModelError);
}

TEST_CASE("scaling symmetry") {
    const MlvParams p = fig_point();
    SUBCASE("identity") {
        const ScaledMlv s = apply_symmetry_scaling(p, 1, 1, 1);
        CHECK(s.params.b1 == p.b1);
        CHECK(s.params.a12 == p.a12);
        CHECK(s.params.e == p.e);
        CHECK(s.scaling.time_factor == 1.0);
    }
    SUBCASE("time scaling doubles every parameter") {
        const ScaledMlv s = apply_symmetry_scaling(p, 1, 1, 2);
        CHECK(s.params.b1 == 2 * p.b1);
        CHECK(s.params.b2 == 2 * p.b2);
        CHECK(s.params.a11 == 2 * p.a11);
        CHECK(s.params.a12 == 2 * p.a12);
        CHECK(s.params.a21 == 2 * p.a21);
        CHECK(s.params.a22 == 2 * p.a22);
        CHECK(s.params.e == 2 * p.e);
        CHECK(s.scaling.time_factor == 0.5);
    }
    SUBCASE("prey scaling") {
        const ScaledMlv s = apply_symmetry_scaling(p, 2, 1, 1);
        CHECK(s.params.a11 == p.a11 / 2);
        CHECK(s.params.a21 == p.a21 / 2);
        CHECK(s.params.e == 2 * p.e);
        CHECK(s.params.b1 == p.b1);
        CHECK(s.params.a12 == p.a12);
        CHECK(s.params.a22 == p.a22);
    }
    CHECK_THROWS_AS(apply_symmetry_scaling(p, 0, 1, 1), UsageError);
}

TEST_CASE("scaled orbits are images of the original orbits") {
    Rng rng(5);
    const MlvParams p{1, -0.5, -1, -1, 1, -0.5, 0.1};
    IntegratorOptions io;
    for (int k = 0; k < 5; ++k) {
        const double lambda = rng.uniform(0.3, 3), mu = rng.uniform(0.3, 3), kappa = rng.uniform(0.3, 3);
        const ScaledMlv s = apply_symmetry_scaling(p, lambda, mu, kappa);
        const StateVector x0(rng.uniform(0.1, 1), rng.uniform(0.1, 1));
        const double T = 5;
        const StateVector a = integrate(p, x0, 0, T, io).final_state();
        const StateVector b =
            integrate(s.params, StateVector(lambda * x0[0], mu * x0[1]), 0, T * s.scaling.time_factor, io).final_state();
        const double tol = 10 * io.rtol * std::max(1.0, b.norm_inf());
        CHECK(std::abs(lambda * a[0] - b[0]) < tol);
        CHECK(std::abs(mu * a[1] - b[1]) < tol);
    }
}

TEST_CASE("reflection of the double-zero model") {
    Rng rng(6);
    for (int k = 0; k < 100; ++k) {
        St2Params p = test::st2_saddle();
        p.a = rng.uniform(-1, 1);
        p.b = rng.uniform(-1, 1);
        p.extension = k % 2;
        p.k4 = rng.uniform(-1, 1);
        p.k5 = rng.uniform(-1, 1);
        const StateVector x(rng.uniform(-1, 1), rng.uniform(-1, 1));
        const ReflectedSt2 r = reflect_st2(x, p);
        // equivariance holds exactly: every term flips sign together with (x, y)
        const StateVector f = eval_field(p, x), g = eval_field(r.params, r.state);
        CHECK(g[0] == -f[0]);
        CHECK(g[1] == -f[1]);
        const ReflectedSt2 back = reflect_st2(r.state, r.params);
        CHECK(back.state == x);
        CHECK(back.params.b == p.b);
        CHECK(back.params.k1 == p.k1);
        CHECK(back.params.k2 == p.k2);
        CHECK(back.params.k3 == p.k3);
        CHECK(back.params.k5 == p.k5);
    }
    CHECK_THROWS_AS(reflect_st2(StateVector(0.0, 0.0), fig_point()), UsageError);
}

TEST_CASE("reflection flips k3 of the elliptic set to positive") {
    St2Params raw = test::st2_elliptic();
    raw = reflect_st2(StateVector(0.0, 0.0), raw).params;  // the orientation st2_point produces
    REQUIRE(raw.k3 < 0);
    const St2Params back = reflect_st2(StateVector(0.0, 0.0), raw).params;
    CHECK(back.k3 > 0);
    CHECK(back.eps == raw.eps);
}

TEST_CASE("reflected orbits are images of the original orbits") {
    St2Params p = test::st2_saddle();
    p.a = -0.02;
    p.b = 0.01;
    const StateVector x0(0.05, 0.01);
    const ReflectedSt2 r = reflect_st2(x0, p);
    IntegratorOptions io;
    // the origin repels here and the orbit escapes after t = 10
    const Trajectory a = integrate(p, x0, 0, 8, io);
    const Trajectory b = integrate(r.params, r.state, 0, 8, io);
    REQUIRE(a.status == TrajStatus::Completed);
    for (double t = 0; t <= 8; t += 0.5) CHECK((a.at(t) + b.at(t)).norm_inf() < 10 * io.rtol);
}
