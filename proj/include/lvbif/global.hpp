#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>

#include "lvbif/equilibria.hpp"
#include "lvbif/integrator.hpp"

namespace lvbif {

// Line through anchor with unit normal; crossings counted where normal.(x - anchor) changes sign.
struct Section {
    StateVector anchor{0.0, 0.0};
    StateVector normal{1.0, 0.0};
    int direction = 0;  // +1: normal.(x - anchor) increasing, -1: decreasing, 0: both

    Section() = default;
    Section(StateVector anchor, StateVector normal, int direction = 0);
    double distance(const StateVector& x) const;
    StateVector tangent() const { return {-normal[1], normal[0]}; }
    double coordinate(const StateVector& x) const;  // position along the line
    StateVector point(double s) const;
};

// Perpendicular bisector of the segment a-b, oriented from a to b.
Section bisector_section(const StateVector& a, const StateVector& b, int direction = 0);

enum class ManifoldKind { Stable, Unstable };

struct TraceBudget {
    double time = 500;
    double arclength = 1e3;
    double state_bound = 1e3;
};

// Unit eigenvector of the saddle for the requested manifold, oriented so that its second
// component is positive (first component when the second vanishes).
StateVector manifold_direction(const ParameterSet& p, const Equilibrium& saddle, ManifoldKind which);

// Integrates from saddle + side*delta*v, forward for the unstable manifold and backward for the
// stable one, until the budget runs out, the state bound is hit, or `stop` is crossed.
Trajectory trace_manifold(const ParameterSet& p, const Equilibrium& saddle, ManifoldKind which, int side, double delta,
                          const TraceBudget& budget = {}, const Section* stop = nullptr,
                          const IntegratorOptions& iopts = {});

struct ConnectionSpec {
    // Saddle whose unstable manifold is traced, and saddle whose stable manifold is traced
    // (the same equilibrium for a homoclinic orbit). nullopt when they do not exist at p.
    std::function<std::optional<std::pair<Equilibrium, Equilibrium>>(const ParameterSet&)> saddles;
    int side_unstable = 1, side_stable = 1;
    // Defaults to the bisector of the two saddles with no direction filter.
    std::function<Section(const ParameterSet&, const Equilibrium&, const Equilibrium&)> section;
    double delta = 1e-6;
    TraceBudget budget;
    IntegratorOptions integrator;
};

struct ConnectionResult {
    bool valid = false;      // both traces reached the section
    double splitting = 0;    // tangent.(hit_unstable - hit_stable) on the section
    StateVector hit_unstable, hit_stable;
    Section section;
    Trajectory unstable, stable;
    std::string diagnostic;
};

// Signed distance between two section hits; swapping the arguments negates it exactly.
double splitting_between(const Section& s, const StateVector& first, const StateVector& second);

ConnectionResult connection_splitting(const ParameterSet& p, const ConnectionSpec& spec);

enum class SearchStatus { Found, NoSignChange, Failed };
std::string_view to_string(SearchStatus s);

struct ConnectionSearch {
    SearchStatus status = SearchStatus::Failed;
    double value = 0;
    double splitting_lo = 0, splitting_hi = 0;
    int evaluations = 0;
    std::string diagnostic;
};

// Bisection then secant on the splitting in free_param over [lo, hi], to tol::kConnectionParam.
ConnectionSearch find_connection(const ParameterSet& p, const std::string& free_param, double lo, double hi,
                                 const ConnectionSpec& spec);
// Same along an arbitrary one-parameter path of parameter sets.
ConnectionSearch find_connection(const std::function<ParameterSet(double)>& path, double lo, double hi,
                                 const ConnectionSpec& spec, const std::string& label = "s");

struct CycleRecord {
    StateVector section_point;
    double period = 0;
    double multiplier = 0;  // nontrivial Floquet multiplier
    bool stable = false;
};

struct CycleOptions {
    double max_return_time = 1e3;
    int max_newton = 30;
    double tol = tol::kShooting;
    IntegratorOptions integrator;
};

struct CycleSearch {
    SearchStatus status = SearchStatus::Failed;  // NoSignChange here means "no return to the section"
    CycleRecord cycle;
    std::string diagnostic;
};

// Newton shooting on the first-return map of the section; guess is projected onto the section.
CycleSearch find_limit_cycle(const ParameterSet& p, const Section& section, const StateVector& guess,
                             const CycleOptions& opts = {});

// First-return map: state after one return to the section from section.point(s), with the time.
std::optional<std::pair<StateVector, double>> first_return(const ParameterSet& p, const Section& section, double s,
                                                           const CycleOptions& opts = {});

enum class SnSegmentKind { SN, SN0, Unclassified };
std::string_view to_string(SnSegmentKind k);

struct SnSegmentOptions {
    double ball_radius = 0;  // 0: 1e-3 * diagram scale
    double diagram_scale = 1;
    double time_budget = 1e4;
    double start_factor = 2;  // departure starts this many ball radii out along the centre direction
};

struct SnSegmentResult {
    SnSegmentKind kind = SnSegmentKind::Unclassified;
    double closest_return = 0;  // min distance to the fold point after leaving 10 r
    double return_time = 0;
    std::string diagnostic;
};

SnSegmentResult classify_sn_segment(const ParameterSet& p, const StateVector& fold_point,
                                    const SnSegmentOptions& opts = {});

}  // namespace lvbif
