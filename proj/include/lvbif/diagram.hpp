#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "lvbif/continuation.hpp"
#include "lvbif/global.hpp"
#include "lvbif/regions.hpp"

namespace lvbif {

struct Window {
    double p1_min = 0, p1_max = 1, p2_min = 0, p2_max = 1;
    bool contains(double p1, double p2) const { return p1 >= p1_min && p1 <= p1_max && p2 >= p2_min && p2 <= p2_max; }
    double width1() const { return p1_max - p1_min; }
    double width2() const { return p2_max - p2_min; }
};

// ---- connection specifications for the models in the diagrams ----

// MLV: off-axis connection from the axis saddle with unstable transverse direction to the one with
// stable transverse direction, in the half-plane of the interior antisaddle, measured on the
// vertical line through that antisaddle.
ConnectionSpec mlv_het_spec(const TraceBudget& budget = {}, double delta = 1e-6);
// MLV: homoclinic loop of the interior saddle around the interior antisaddle, measured on the line
// through both beyond the antisaddle. Sides are fixed by the caller (see choose_hom_sides).
ConnectionSpec mlv_hom_spec(const TraceBudget& budget = {}, double delta = 1e-6);

// Sets the manifold branches for a parameter point; false when the connection is not defined there.
using SideChooser = std::function<bool(const ParameterSet&, ConnectionSpec&)>;

// Both branches on the side of the axis where the interior antisaddle lies.
bool choose_het_sides(const ParameterSet& p, ConnectionSpec& spec);
// Picks the manifold branches whose section hits both lie beyond the antisaddle; false when none do.
bool choose_hom_sides(const ParameterSet& p, ConnectionSpec& spec);
// ST2_MIN: the branches off the invariant curve.
bool choose_st2_het_sides(const ParameterSet& p, ConnectionSpec& spec);

struct ConnectionCurveOptions {
    double anchor_radius = 5e-5;  // parameter units; first circle around the anchor
    int circle_samples = 240;
    double max_step = 0.02;        // window-scaled units
    double min_step = 1e-9;
    double growth = 2.0;
    int max_points = 600;
    double join_distance = 2e-3;   // window-scaled; stop at another codim-2 point this close
};

// Connection curve through the (p1, p2) plane starting next to a codim-2 anchor. Each sign change
// of the splitting on the anchor circle starts one curve, marched outward with a secant predictor
// and a splitting solve across the predicted direction.
std::vector<Curve> trace_connection_curves(const ParameterSet& base, const std::string& p1, const std::string& p2,
                                           const CodimTwoPoint& anchor, CurveKind kind, const ConnectionSpec& spec,
                                           const SideChooser& choose, const Window& window, const std::vector<CodimTwoPoint>& stops,
                                           const ConnectionCurveOptions& opts = {});

// ---- assembled diagrams ----

struct SnSegment {
    std::string curve_id;
    std::size_t first = 0, last = 0;  // sample indices on the curve, inclusive
    SnSegmentKind kind = SnSegmentKind::Unclassified;
};

struct KindStatus {
    CurveKind kind;
    bool found = false;
    std::string note;
};

// Where a connection curve ends.
struct CurveEnd {
    std::string curve_id;
    bool at_start = true;
    double p1 = 0, p2 = 0;
    std::optional<CodimTwoKind> nearest_point;
    double point_distance = 0;    // parameter units
    double sn_distance = 0;       // to the nearest SN curve point, parameter units
    bool leaves_window = false;
};

struct DiagramSpec {
    ParameterSet params = MlvParams{};
    std::string p1 = "e", p2 = "b2";
    Window window;
    bool auto_window = false;  // window from the codim-2 points found in `window`, plus margin
    double margin = 0.2;
    std::vector<CurveKind> kinds{CurveKind::SN, CurveKind::TC, CurveKind::HB, CurveKind::HET};
    bool codim2 = true;
    int sweep_lines = 9;     // equilibrium sweeps per parameter direction
    int sweep_starts = 12;   // start points per sweep line
    double continuation_step = 5e-3;  // max step as a fraction of the window diagonal
    ConnectionCurveOptions connection;
    TraceBudget trace_budget{1e5, 1e4, 1e3};
    double connection_delta = 1e-6;
    SnSegmentOptions sn0;
    int sn0_stride = 8;      // classify every n-th fold point
    double local_bound = 0;  // ST2_MIN: radius of the local neighbourhood for saddles (0: window based)
};

struct Diagram {
    DiagramSpec spec;  // with the final window
    std::vector<Curve> curves;
    std::vector<CodimTwoPoint> points;
    std::vector<SnSegment> sn_segments;
    std::vector<KindStatus> status;
    std::vector<CurveEnd> ends;
    std::optional<WalkResult> regions;
};

// Throws UsageError on an invalid spec (unknown or equal parameter names, empty window).
void validate_spec(const DiagramSpec& spec);

Diagram build_diagram(const DiagramSpec& spec);

// Splits a curve into the pieces inside the window; markers are kept with their piece.
std::vector<Curve> clip_curve(const Curve& c, const Window& w);

// Closed-form transcritical line a = 0 of the trivial equilibrium of ST2_MIN, b in [lo, hi].
Curve tc_curve_st2(const St2Params& p, double b_lo, double b_hi, int samples = 201);

}  // namespace lvbif
