#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lvbif/global.hpp"

namespace lvbif {

// Point on the circle of radius r around (a, b) = (0, 0) of ST2_MIN:
// a = -r cos(psi), b = -r sin(psi), psi in degrees. psi = 0 lies on the Hopf half-line of the
// origin and increasing psi turns clockwise in the (b, a) plane.
St2Params circle_point(const St2Params& base, double radius, double psi_deg);

enum class WalkEventKind { HB, SN, SN0, TC, Het, CycleLoss };
std::string_view to_string(WalkEventKind k);

struct WalkEvent {
    WalkEventKind kind = WalkEventKind::CycleLoss;
    double psi = 0;
    std::string detail;
};

struct CycleCensus {
    bool present = false;
    std::optional<CycleRecord> record;
    std::string diagnostic;  // why no cycle was reported
};

struct RegionCensus {
    double psi_lo = 0, psi_hi = 0, psi = 0;  // bounding events and the sample point
    std::vector<Equilibrium> equilibria;     // local ones only
    CycleCensus cycle;
};

struct WalkOptions {
    double radius = 0.02;
    double psi_start = -10;  // degrees; region 1 lies just before the Hopf half-line
    double sweep = 360;
    double step = 0.5;         // equilibrium census sampling, degrees
    double cycle_step = 1.0;   // cycle census sampling, degrees
    double psi_tol = 1e-7;     // event refinement width, degrees
    double local_factor = 20;  // equilibria and cycles within local_factor * sqrt(radius) count as local
    double coincide = 0.05;    // a cycle change this close to an explaining event is attributed to it
    IntegratorOptions integrator;
};

struct WalkResult {
    std::vector<WalkEvent> events;  // ordered by psi
    std::vector<RegionCensus> regions;
    double radius = 0;
    double local_bound = 0;
};

// Equilibria within the local bound, sorted by x.
std::vector<Equilibrium> local_equilibria(const St2Params& p, double bound);

// Cycle around the first local antisaddle (det > 0, not a centre), found by integrating in the
// direction in which it repels and then shooting on a horizontal section.
CycleCensus cycle_census(const St2Params& p, double bound, const IntegratorOptions& io = {});
// Same around a given antisaddle of any planar model; eqs are the equilibria a spiral may settle on.
CycleCensus cycle_around(const ParameterSet& p, const Equilibrium& centre, const std::vector<Equilibrium>& eqs,
                         double bound, const IntegratorOptions& io = {});

// Walks the circle, locating the local codim-one crossings, the connections between the two
// saddles flanking the origin, and the saddle-node crossings (classified SN or SN0). A cycle
// that disappears without such an event is reported as CycleLoss.
WalkResult walk_circle(const St2Params& base, const WalkOptions& opts = {});

// Connection from the left saddle flanking the origin to the right one, off the invariant curve
// through them, measured on the vertical line through the origin. Only saddles with |x| < bound count.
ConnectionSpec st2_het_spec(double bound, const TraceBudget& budget = {}, double delta = 1e-6);
int st2_het_side(const St2Params& p);

std::vector<WalkEventKind> event_kinds(const WalkResult& w);

}  // namespace lvbif
