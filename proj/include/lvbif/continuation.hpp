#pragma once

#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lvbif/equilibria.hpp"

namespace lvbif {

enum class CurveKind { EQ, SN, TC, HB, NS, HET, HOM };
enum class CodimTwoKind { ST1, ST2, BT, CUSP, SNHET, T0 };

std::string_view to_string(CurveKind k);
std::string_view to_string(CodimTwoKind k);
CurveKind curve_kind_from_string(std::string_view s);

// How the equilibrium condition is posed. The reduced forms divide out the factor
// that vanishes on the invariant set (MLV axis, trivial equilibrium of the minimal
// models), so branches cross that set without meeting a branch point.
enum class Formulation {
    Full,             // F(x) = 0
    MlvAxis,          // x2 = 0 pinned; x1 (b1 + a11 x1) + e = 0
    MlvInterior,      // f1 = 0, b2 + a21 x1 + a22 x2 = 0
    MinimalNontrivial // ST1/ST2: f(x)/x = 0 (with y = 0)
};

std::string_view to_string(Formulation f);
// Reduced form when the state is off the trivial set, Full otherwise.
Formulation default_formulation(const ParameterSet& p, const StateVector& s);

struct TestValues {
    double det_j = 0;          // det of the full Jacobian (scalar derivative for 1-D)
    double tr_j = 0;           // trace of the full Jacobian
    double det_reduced = 0;    // det of the formulation's Jacobian
    double axis_distance = std::numeric_limits<double>::quiet_NaN();   // MLV x2; ST1/ST2 x
    double transverse_eig = std::numeric_limits<double>::quiet_NaN();  // MLV b2 + a21 x1
    double tangential_eig = std::numeric_limits<double>::quiet_NaN();  // MLV b1 + 2 a11 x1 + a12 x2
    double fold_coeff = std::numeric_limits<double>::quiet_NaN();      // <w, D2F(v,v)>/2, <w,v> = 1
    double tc_coeff = std::numeric_limits<double>::quiet_NaN();        // MLV transcritical quadratic coefficient
};

struct BranchPoint {
    StateVector state;
    double p1 = 0;
    double p2 = std::numeric_limits<double>::quiet_NaN();  // unused on EQ curves
    EigenData eigen;
    TestValues tests;
    std::optional<StateVector> null_vector;  // fold curves
    double arclength = 0;
    CurveKind kind = CurveKind::EQ;          // HB curves mark neutral-saddle points NS
};

struct CodimOnePoint {
    CurveKind kind;  // SN, TC or HB
    std::size_t index;  // the point was inserted at this index of the curve
    BranchPoint point;
    ParameterSet params;
};

struct CodimTwoPoint {
    CodimTwoKind kind;
    double p1 = 0, p2 = 0;
    StateVector state;
    std::map<std::string, double> residuals;
    std::string curve_id;
};

namespace detail {
class CurveSystem;
}

struct Curve {
    CurveKind kind = CurveKind::EQ;
    std::string id;
    std::string param1, param2;  // param2 empty on EQ curves
    ParameterSet base;           // values of all inactive parameters
    Formulation formulation = Formulation::Full;
    std::vector<BranchPoint> points;
    std::vector<CodimOnePoint> events;
    std::vector<CodimTwoPoint> markers;
    std::string diagnostic;  // why continuation stopped, when not by reaching a bound
    bool truncated = false;  // corrector failed at the step floor
    std::shared_ptr<const detail::CurveSystem> system;

    ParameterSet params_at(const BranchPoint& bp) const;
};

struct ContinuationOptions {
    double initial_step = 1e-2;
    double max_step = 5e-2;
    double min_step = 1e-10;
    double grow = 1.3;
    double shrink = 0.5;
    int fast_iterations = 3;
    int max_iterations = 12;
    double tol = tol::kCorrector;
    int max_points = 4000;
    int direction = 0;  // 0: both directions from the seed; +1/-1: one way (sign of the first parameter)
    double p1_min = -std::numeric_limits<double>::infinity(), p1_max = std::numeric_limits<double>::infinity();
    double p2_min = -std::numeric_limits<double>::infinity(), p2_max = std::numeric_limits<double>::infinity();
    double state_bound = 1e3;
    double min_tangent_cos = 0.9;  // reject steps that turn more than this
    bool locate_events = true;
};

// Equilibrium branch in one free parameter. Emits SN, TC and HB events.
Curve continue_equilibrium_branch(const ParameterSet& params, const std::string& free_param, const StateVector& start,
                                  const ContinuationOptions& opts = {});

// Fold curve in two parameters, seeded at a fold point (state and params on the fold).
Curve continue_fold_curve(const ParameterSet& params, const std::string& p, const std::string& q,
                          const StateVector& fold_state, const ContinuationOptions& opts = {});

// {F = 0, tr J = 0}; points with det J < 0 are marked NS.
Curve continue_hopf_curve(const ParameterSet& params, const std::string& p, const std::string& q,
                          const StateVector& hopf_state, const ContinuationOptions& opts = {});

// Closed-form MLV transcritical curve e = -b1 x1 - a11 x1^2, b2 = -a21 x1 over x1 in [lo, hi].
Curve tc_curve_mlv(const MlvParams& params, double x1_lo, double x1_hi, int samples = 401);

// Sign-change detection plus bisection on the curve's own defining system.
std::vector<CodimTwoPoint> detect_codim2(const Curve& curve);

// Evaluates all test functions at a state.
TestValues evaluate_tests(const ParameterSet& p, const StateVector& s, Formulation f);

}  // namespace lvbif
