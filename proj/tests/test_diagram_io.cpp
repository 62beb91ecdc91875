#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "lvbif/io.hpp"
#include "lvbif/normalform.hpp"
#include "support.hpp"

using namespace lvbif;

namespace {

DiagramSpec st2_spec() {
    const RunConfig c = parse_config(load_json_file(std::string(LVBIF_CONFIG_DIR) + "/st2_saddle.json"));
    REQUIRE(c.has_diagram);
    return c.diagram;
}

const Diagram& st2_diagram() {
    static const Diagram d = build_diagram(st2_spec());
    return d;
}

const Curve* first_of(const Diagram& d, CurveKind k) {
    for (const auto& c : d.curves)
        if (c.kind == k) return &c;
    return nullptr;
}

Curve line_curve() {
    Curve c;
    c.kind = CurveKind::SN;
    c.id = "SN1";
    c.param1 = "a";
    c.param2 = "b";
    for (int i = 0; i <= 20; ++i) {
        BranchPoint bp;
        bp.state = StateVector(0.1 * i, 0.0);
        bp.p1 = -1 + 0.1 * i;
        bp.p2 = 0.5;
        c.points.push_back(bp);
    }
    return c;
}

}  // namespace

TEST_CASE("diagram spec validation") {
    DiagramSpec s = st2_spec();
    CHECK_NOTHROW(validate_spec(s));
    s.p2 = "a";
    CHECK_THROWS_AS(validate_spec(s), UsageError);
    s = st2_spec();
    s.p1 = "b2";
    CHECK_THROWS_AS(validate_spec(s), UsageError);
    s = st2_spec();
    s.window.p1_max = s.window.p1_min;
    CHECK_THROWS_AS(validate_spec(s), UsageError);
}

TEST_CASE("double-zero model diagram") {
    const Diagram& d = st2_diagram();
    for (const auto& k : d.status) CHECK(k.found);

    SUBCASE("fold curve matches the closed form") {
        const Curve* sn = first_of(d, CurveKind::SN);
        REQUIRE(sn);
        const St2Params& p = std::get<St2Params>(d.spec.params);
        int compared = 0;
        for (const auto& bp : sn->points) {
            if (std::abs(bp.p2) < 1e-3) continue;  // the fold meets the transcritical line here
            CHECK(std::abs(bp.p1 - min2_sn_curve(bp.p2, p.eps, p.k3, p.k1).a_sn) < 1e-8);
            ++compared;
        }
        CHECK(compared > 50);
    }
    SUBCASE("transcritical line is a = 0 and the Hopf line is a < 0, b = 0") {
        for (const auto& bp : first_of(d, CurveKind::TC)->points) CHECK(bp.p1 == 0.0);
        for (const auto& bp : first_of(d, CurveKind::HB)->points) {
            CHECK(std::abs(bp.p2) < 1e-10);
            if (bp.kind == CurveKind::HB) CHECK(bp.p1 < 1e-10);
        }
    }
    SUBCASE("codim-2 points") {
        bool bt = false;
        for (const auto& pt : d.points)
            if (pt.kind == CodimTwoKind::BT) bt = std::hypot(pt.p1, pt.p2) < 1e-6;
        CHECK(bt);
    }
    SUBCASE("connection curve leaves the BT point on the cycle side of the Hopf line") {
        const Curve* het = first_of(d, CurveKind::HET);
        REQUIRE(het);
        REQUIRE(het->points.size() > 5);
        for (const auto& bp : het->points) {
            CHECK(bp.p1 < 0);
            CHECK(bp.p2 < 0);
        }
        // the curve passes the connection found directly at a = -0.04
        double b_at = std::numeric_limits<double>::quiet_NaN();
        for (std::size_t i = 1; i < het->points.size(); ++i) {
            const auto &u = het->points[i - 1], &v = het->points[i];
            if ((u.p1 + 0.04) * (v.p1 + 0.04) <= 0)
                b_at = u.p2 + (v.p2 - u.p2) * (-0.04 - u.p1) / (v.p1 - u.p1);
        }
        CHECK(std::abs(b_at + 0.0019482696) < 2e-5);
    }
    SUBCASE("walk around the origin starts with Hopf then the connection") {
        REQUIRE(d.regions);
        const auto kinds = event_kinds(*d.regions);
        REQUIRE(kinds.size() >= 4);
        CHECK(kinds[0] == WalkEventKind::HB);
        CHECK(kinds[1] == WalkEventKind::Het);
        CHECK(std::count(kinds.begin(), kinds.end(), WalkEventKind::SN0) == 0);
    }
    SUBCASE("points.json") {
        const Json j = points_json(d);
        CHECK(j["model"] == "ST2_MIN");
        CHECK(j["not_found"].empty());
        bool bt = false;
        for (const auto& pt : j["points"])
            if (pt["kind"] == "BT") bt = std::abs(pt["p1"].get<double>()) < 1e-6 && std::abs(pt["p2"].get<double>()) < 1e-6;
        CHECK(bt);
        CHECK(j["sn_segments"].size() >= 1);
    }
    SUBCASE("SVG is deterministic") {
        const std::string a = diagram_svg(d);
        CHECK(a == diagram_svg(d));
        CHECK(a == diagram_svg(build_diagram(st2_spec())));
        CHECK(a.rfind("<svg", 0) == 0);
        CHECK(a.find("</svg>") != std::string::npos);
    }
}

TEST_CASE("a kind with no curve in the window is reported, output still written") {
    DiagramSpec s = st2_spec();
    s.window = {0.01, 0.05, -0.05, 0.05};  // the fold stays below a = 1e-3 for |b| <= 0.05
    const Diagram d = build_diagram(s);
    for (const auto& k : d.status) {
        CAPTURE(to_string(k.kind));
        CHECK_FALSE(k.found);
        CHECK_FALSE(k.note.empty());
    }
    const Json j = points_json(d);
    CHECK(j["not_found"].size() == 4);
    std::ostringstream csv;
    write_curves_csv(csv, d.curves);
    CHECK(csv.str().rfind(kCurvesHeader, 0) == 0);
    CHECK(diagram_svg(d).find("</svg>") != std::string::npos);
}

TEST_CASE("an empty kind list still gives a valid SVG") {
    DiagramSpec s = st2_spec();
    s.kinds.clear();
    s.codim2 = false;
    const Diagram d = build_diagram(s);
    CHECK(d.curves.empty());
    const std::string svg = diagram_svg(d);
    CHECK(svg.rfind("<svg", 0) == 0);
    CHECK(svg.find("</svg>") != std::string::npos);
}

TEST_CASE("curves.csv round trip is exact") {
    const Diagram& d = st2_diagram();
    std::ostringstream os;
    write_curves_csv(os, d.curves);
    std::istringstream is(os.str());
    const auto rows = read_curves_csv(is);
    std::size_t i = 0;
    for (const auto& c : d.curves)
        for (const auto& bp : c.points) {
            REQUIRE(i < rows.size());
            const CsvRow& r = rows[i++];
            CHECK(r.curve_id == c.id);
            CHECK(r.kind == to_string(bp.kind == CurveKind::NS ? CurveKind::NS : c.kind));
            CHECK(r.param1 == bp.p1);
            CHECK(r.param2 == bp.p2);
            CHECK(r.x1 == bp.state[0]);
            CHECK(r.x2 == bp.state[1]);
        }
    CHECK(i == rows.size());

    std::istringstream bad("curve_id,kind\n");
    CHECK_THROWS_AS(read_curves_csv(bad), UsageError);
}

TEST_CASE("number formatting") {
    CHECK(format_double(std::numeric_limits<double>::quiet_NaN()) == "nan");
    CHECK(format_double(std::numeric_limits<double>::infinity()) == "inf");
    CHECK(format_double(-std::numeric_limits<double>::infinity()) == "-inf");
    for (const double v : {0.1, 1.0 / 3, -2.5e-300, 6.02214076e23})
        CHECK(std::stod(format_double(v)) == v);
}

TEST_CASE("curve clipping") {
    const Curve c = line_curve();
    const auto inside = clip_curve(c, {-0.55, 0.55, 0, 1});
    REQUIRE(inside.size() == 1);
    for (const auto& bp : inside[0].points) CHECK(std::abs(bp.p1) <= 0.55);
    CHECK(clip_curve(c, {2, 3, 0, 1}).empty());
    CHECK(clip_curve(c, {-2, 2, 0, 1})[0].points.size() == c.points.size());
}

TEST_CASE("config overrides and errors") {
    Json j = load_json_file(std::string(LVBIF_CONFIG_DIR) + "/equilibria_saddle.json");
    apply_override(j, "params.e=-12");
    CHECK(j["params"]["e"] == -12);
    apply_override(j, "description=plain text");
    CHECK(j["description"] == "plain text");
    CHECK(std::get<MlvParams>(parse_params(j)).e == -12);
    CHECK_THROWS_AS(apply_override(j, "noequals"), UsageError);
    CHECK_THROWS_AS(apply_override(j, "params..e=1"), UsageError);

    Json bad = j;
    bad["params"]["a33"] = 1;
    CHECK_THROWS_AS(parse_config(bad), UsageError);
    bad = j;
    bad["model"] = "LV";
    CHECK_THROWS_AS(parse_config(bad), UsageError);
    bad = j;
    bad["params"]["e"] = "ten";
    CHECK_THROWS_AS(parse_config(bad), UsageError);
    CHECK_THROWS_AS(load_json_file("/nonexistent/config.json"), UsageError);
}

TEST_CASE("equilibria report on the axis example") {
    Json j = load_json_file(std::string(LVBIF_CONFIG_DIR) + "/equilibria_saddle.json");
    const Json r = equilibria_report(parse_params(j));
    int axis = 0;
    for (const auto& e : r["equilibria"])
        if (e["state"][1] == 0.0) ++axis;
    CHECK(axis == 2);
}
