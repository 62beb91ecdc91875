#pragma once

#include <array>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "lvbif/models.hpp"

namespace lvbif {

using Rhs = std::function<StateVector(const StateVector&)>;

struct IntegratorOptions {
    double rtol = 1e-10;
    double atol = 1e-12;
    double initial_step = 0;  // 0: automatic
    double max_step = std::numeric_limits<double>::infinity();
    double fixed_step = 0;    // > 0 disables error control (used for order checks)
    long max_steps = 2'000'000;
    double max_arclength = std::numeric_limits<double>::infinity();
    bool keep_dense = true;
};

// Zero of g(t, y) along the trajectory. direction +1 fires on increasing g only, -1 on decreasing.
struct EventSpec {
    std::function<double(double, const StateVector&)> g;
    int direction = 0;
    bool terminal = true;
};

struct EventHit {
    int index;
    double t;
    StateVector state;
};

enum class TrajStatus { Completed, Event, StepUnderflow, MaxSteps, NonFinite, Arclength };

std::string_view to_string(TrajStatus s);

// Dense-output coefficients of one accepted step (Hairer's contd5 form).
struct DenseStep {
    double t0 = 0, h = 0;
    std::array<StateVector, 5> r;
    StateVector eval(double t) const;
};

struct Trajectory {
    std::vector<double> t;
    std::vector<StateVector> y;
    std::vector<DenseStep> steps;
    std::vector<EventHit> events;
    TrajStatus status = TrajStatus::Completed;
    std::string diagnostic;
    double arclength = 0;
    long rejected = 0;

    const StateVector& final_state() const { return y.back(); }
    double final_time() const { return t.back(); }
    // Dense interpolation; t must lie inside the integrated range.
    StateVector at(double time) const;
};

// Dormand-Prince 5(4) with PI step control; t1 < t0 integrates backwards.
Trajectory integrate(const Rhs& f, const StateVector& y0, double t0, double t1, const IntegratorOptions& opts = {},
                     std::span<const EventSpec> events = {});

Trajectory integrate(const ParameterSet& p, const StateVector& y0, double t0, double t1,
                     const IntegratorOptions& opts = {}, std::span<const EventSpec> events = {});

}  // namespace lvbif
