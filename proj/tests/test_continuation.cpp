#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <optional>

#include "lvbif/continuation.hpp"
#include "lvbif/normalform.hpp"
#include "support.hpp"

using namespace lvbif;

namespace {

ContinuationOptions window(double p1_lo, double p1_hi, double p2_lo, double p2_hi, double max_step) {
    ContinuationOptions o;
    o.p1_min = p1_lo;
    o.p1_max = p1_hi;
    o.p2_min = p2_lo;
    o.p2_max = p2_hi;
    o.max_step = max_step;
    return o;
}

ContinuationOptions mlv_window(double scale = 1) {
    ContinuationOptions o = window(-20, 20, -12, 6, 0.2 * scale);
    o.initial_step *= scale;
    return o;
}

std::optional<CodimTwoPoint> marker(const Curve& c, CodimTwoKind k) {
    for (const auto& m : c.markers)
        if (m.kind == k) return m;
    return std::nullopt;
}

std::vector<const CodimOnePoint*> events_of(const Curve& c, CurveKind k) {
    std::vector<const CodimOnePoint*> out;
    for (const auto& e : c.events)
        if (e.kind == k) out.push_back(&e);
    return out;
}

// Interior fold of the saddle-case set at b2 = -4: x1^2 + 3 x1 + 2.25 = 0 has the double root -1.5.
Curve saddle_interior_fold(double scale = 1) {
    MlvParams q = test::saddle_set();
    q.b2 = -4;
    q.e = 2.25;
    return continue_fold_curve(q, "e", "b2", StateVector(-1.5, 7.0), mlv_window(scale));
}

Curve saddle_axis_fold(double scale = 1) {
    MlvParams q = test::saddle_set();
    q.e = -11.25;
    return continue_fold_curve(q, "e", "b2", StateVector(1.5, 0.0), mlv_window(scale));
}

// Elliptic-case interior fold at b2 = 1: 13 x1^2 + 18 x1 + e = 0 is double at e = 81/13.
Curve elliptic_interior_fold(double scale = 1) {
    MlvParams q = test::elliptic_set();
    q.b2 = 1;
    q.e = 81.0 / 13;
    const double x1 = -9.0 / 13;
    return continue_fold_curve(q, "e", "b2", StateVector(x1, -(q.b2 + 2 * x1)), mlv_window(scale));
}

Curve elliptic_axis_fold(double scale = 1) {
    MlvParams q = test::elliptic_set();
    q.e = -225.0 / 28;
    return continue_fold_curve(q, "e", "b2", StateVector(-15.0 / 14, 0.0), mlv_window(scale));
}

void check_at(const std::optional<CodimTwoPoint>& m, double p1, double p2, double tol) {
    REQUIRE(m.has_value());
    CHECK(std::abs(m->p1 - p1) < tol);
    CHECK(std::abs(m->p2 - p2) < tol);
}

}  // namespace

TEST_CASE("scalar model branches meet the transcritical and fold lines") {
    const St1Params p{-1, 2, 1};
    ContinuationOptions o;
    o.p1_min = -1.5;
    o.p1_max = 1.5;
    SUBCASE("trivial branch") {
        const Curve c = continue_equilibrium_branch(p, "a", StateVector(0.0), o);
        const auto tc = events_of(c, CurveKind::TC);
        REQUIRE(tc.size() == 1);
        CHECK(std::abs(tc[0]->point.p1) < 1e-9);
        CHECK(events_of(c, CurveKind::SN).empty());
    }
    SUBCASE("nontrivial branch") {
        const Curve c = continue_equilibrium_branch(p, "a", StateVector(std::sqrt(2.0) - 1), o);
        const auto sn = events_of(c, CurveKind::SN);
        REQUIRE(sn.size() == 1);
        CHECK(sn[0]->point.p1 == doctest::Approx(1).epsilon(1e-9));
        CHECK(sn[0]->point.state[0] == doctest::Approx(-1).epsilon(1e-6));
        const auto tc = events_of(c, CurveKind::TC);
        REQUIRE(tc.size() == 1);
        CHECK(std::abs(tc[0]->point.p1) < 1e-9);
    }
}

TEST_CASE("double-zero model origin: det J = -a changes sign at a = 0") {
    St2Params p = test::st2_saddle();
    p.a = -0.3;
    p.b = 0;
    ContinuationOptions o;
    o.p1_min = -0.5;
    o.p1_max = 0.5;
    const Curve c = continue_equilibrium_branch(p, "a", StateVector(0.0, 0.0), o);
    for (const auto& bp : c.points) {
        CHECK(bp.state.norm_inf() == 0.0);
        CHECK(bp.tests.det_j == doctest::Approx(-bp.p1).scale(1));
    }
    bool crossing = false;
    for (const auto& e : c.events) crossing = crossing || (e.kind != CurveKind::HB && std::abs(e.point.p1) < 1e-9);
    CHECK(crossing);
}

TEST_CASE("axis fold is the vertical line e = b1^2/(4 a11)") {
    const Curve c = saddle_axis_fold();
    REQUIRE(c.points.size() > 10);
    for (const auto& bp : c.points) {
        CHECK(std::abs(bp.p1 + 11.25) < 1e-10);
        CHECK(bp.state[1] == 0.0);
    }
    CHECK(c.points.front().p2 < -11);
    CHECK(c.points.back().p2 > 5);
}

TEST_CASE("fold curves satisfy their defining system") {
    for (const Curve& c : {saddle_interior_fold(), saddle_axis_fold(), elliptic_interior_fold()}) {
        REQUIRE(c.points.size() > 10);
        for (const auto& bp : c.points) {
            const ParameterSet q = c.params_at(bp);
            const double scale = std::max(1.0, param_scale(q));
            CHECK(std::abs(bp.tests.det_j) < 1e-8 * scale * scale);
            CHECK(eval_field(q, bp.state).norm_inf() < 1e-10 * scale);
            REQUIRE(bp.null_vector.has_value());
            CHECK(bp.null_vector->norm2() == doctest::Approx(1).epsilon(1e-12));
        }
        for (std::size_t i = 1; i < c.points.size(); ++i)
            CHECK(c.points[i].arclength > c.points[i - 1].arclength);
    }
}

TEST_CASE("double-zero model fold curve equals the closed form") {
    for (const St2Params& base : {test::st2_saddle(), test::st2_elliptic()}) {
        St2Params p = base;
        const double b0 = 0.05;
        const double x0 = p.eps * (std::sqrt(1 - 3 * p.k3 * b0) - 1) / (3 * p.k3);
        p.b = b0;
        p.a = -(b0 * x0 + p.eps * x0 * x0 + p.k3 * x0 * x0 * x0);
        ContinuationOptions o = window(-2, 2, -0.3, 0.3, 0.01);
        o.locate_events = false;
        const Curve c = continue_fold_curve(p, "a", "b", StateVector(x0, 0.0), o);
        double blo = 1, bhi = -1, worst = 0;
        for (const auto& bp : c.points) {
            if (std::abs(bp.p2) > 0.3) continue;
            const Min2Fold f = min2_sn_curve(bp.p2, p.eps, p.k3);
            worst = std::max(worst, std::abs(bp.p1 - f.a_sn));
            blo = std::min(blo, bp.p2);
            bhi = std::max(bhi, bp.p2);
        }
        CHECK(worst < 1e-8);
        CHECK(blo < -0.29);
        CHECK(bhi > 0.29);
    }
}

TEST_CASE("closed-form transcritical curve") {
    const MlvParams q = test::saddle_set();
    SUBCASE("examples") {
        Curve c = tc_curve_mlv(q, 1.5, 3.75, 2);
        CHECK(c.points[0].p1 == -11.25);
        CHECK(c.points[0].p2 == -3.0);
        CHECK(c.points[1].p1 == 14.0625);
        CHECK(c.points[1].p2 == -7.5);
        c = tc_curve_mlv(q, 0, 1, 2);
        CHECK(c.points[0].p1 == 0.0);
        CHECK(c.points[0].p2 == 0.0);
    }
    SUBCASE("exact on every sample") {
        const Curve c = tc_curve_mlv(q, -2.3, 6.1, 301);
        for (const auto& bp : c.points) {
            CHECK(bp.state[1] == 0.0);
            CHECK(bp.tests.transverse_eig == 0.0);
            const StateVector f = eval_field(c.params_at(bp), bp.state);
            CHECK(f[0] == 0.0);
            CHECK(f[1] == 0.0);
        }
    }
    MlvParams bad = q;
    bad.a21 = 0;
    CHECK_THROWS_AS(tc_curve_mlv(bad, 0, 1), DegenerateModelError);
    CHECK_THROWS_AS(tc_curve_mlv(q, 1, 1), UsageError);
}

TEST_CASE("double-zero model Hopf line with its Bogdanov-Takens marker") {
    St2Params p = test::st2_saddle();
    p.a = -0.2;
    p.b = 0;
    const Curve c = continue_hopf_curve(p, "a", "b", StateVector(0.0, 0.0), window(-0.5, 0.5, -0.5, 0.5, 0.02));
    REQUIRE(c.points.size() > 10);
    int hb = 0, ns = 0;
    for (const auto& bp : c.points) {
        CHECK(std::abs(bp.p2) < 1e-12);
        if (bp.kind == CurveKind::HB) {
            ++hb;
            CHECK(bp.p1 < 0);
        } else {
            CHECK(bp.kind == CurveKind::NS);
            ++ns;
            CHECK(bp.p1 > 0);
        }
    }
    CHECK(hb > 0);
    CHECK(ns > 0);
    check_at(marker(c, CodimTwoKind::BT), 0, 0, 1e-9);
}

TEST_CASE("MLV Hopf curve ends on the interior fold at the Bogdanov-Takens point") {
    // Hopf seed from an equilibrium branch in e at b2 = -4
    MlvParams q = test::saddle_set();
    q.b2 = -4;
    q.e = -2;
    std::optional<CodimOnePoint> seed;
    ContinuationOptions line;
    line.p1_min = -20;
    line.p1_max = 20;
    line.max_step = 0.2;
    for (const auto& eq : find_equilibria_mlv(q)) {
        if (eq.on_axis) continue;
        const Curve branch = continue_equilibrium_branch(q, "e", eq.state, line);
        for (const auto& ev : branch.events)
            if (ev.kind == CurveKind::HB) seed = ev;
    }
    REQUIRE(seed.has_value());
    const Curve hb = continue_hopf_curve(seed->params, "e", "b2", seed->point.state, mlv_window());
    const Curve sn = saddle_interior_fold();
    const auto a = marker(hb, CodimTwoKind::BT), b = marker(sn, CodimTwoKind::BT);
    REQUIRE(a.has_value());
    REQUIRE(b.has_value());
    CHECK(std::abs(a->p1 - b->p1) < 1e-6);
    CHECK(std::abs(a->p2 - b->p2) < 1e-6);
    // BT of the saddle-case set: b2 = -60/11 from the trace and fold conditions
    CHECK(a->p2 == doctest::Approx(-60.0 / 11).epsilon(1e-8));
}

TEST_CASE("interaction points on the fold curves") {
    SUBCASE("saddle case") {
        check_at(marker(saddle_interior_fold(), CodimTwoKind::ST1), 14.0625, -7.5, 1e-6);
        check_at(marker(saddle_axis_fold(), CodimTwoKind::ST2), -11.25, -3, 1e-6);
    }
    SUBCASE("elliptic case") {
        check_at(marker(elliptic_interior_fold(), CodimTwoKind::ST1), 7.3125, 1.5, 1e-6);
        check_at(marker(elliptic_axis_fold(), CodimTwoKind::ST2), 225.0 / 28, 15.0 / 7, 1e-6);
    }
}

TEST_CASE("interaction points do not move when the step sizes are halved") {
    for (int which = 0; which < 4; ++which) {
        CAPTURE(which);
        auto build = [&](double s) {
            switch (which) {
                case 0: return saddle_interior_fold(s);
                case 1: return saddle_axis_fold(s);
                case 2: return elliptic_interior_fold(s);
                default: return elliptic_axis_fold(s);
            }
        };
        const Curve full = build(1), half = build(0.5);
        REQUIRE(!full.markers.empty());
        REQUIRE(full.markers.size() == half.markers.size());
        for (std::size_t i = 0; i < full.markers.size(); ++i) {
            CHECK(full.markers[i].kind == half.markers[i].kind);
            CHECK(std::abs(full.markers[i].p1 - half.markers[i].p1) < 1e-6);
            CHECK(std::abs(full.markers[i].p2 - half.markers[i].p2) < 1e-6);
        }
    }
}

TEST_CASE("transcritical curve touches the interior fold at the ST1 point") {
    for (const MlvParams& q : {test::saddle_set(), test::elliptic_set()}) {
        const Curve tc = tc_curve_mlv(q, -3, 6);
        const Curve sn = q.a11 < 0 ? saddle_interior_fold() : elliptic_interior_fold();
        const auto a = marker(tc, CodimTwoKind::ST1), b = marker(sn, CodimTwoKind::ST1);
        REQUIRE(a.has_value());
        REQUIRE(b.has_value());
        CHECK(std::abs(a->p1 - b->p1) < 1e-6);
        CHECK(std::abs(a->p2 - b->p2) < 1e-6);
        // the closed form also carries the double-zero point where the axis fold crosses
        const St2Data d = st2_point(q);
        check_at(marker(tc, CodimTwoKind::ST2), d.e_star, d.b2_star, 1e-6);
    }
}
