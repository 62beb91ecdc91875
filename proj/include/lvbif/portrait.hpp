#pragma once

#include <string>
#include <vector>

#include "lvbif/global.hpp"

namespace lvbif {

struct PortraitSpec {
    ParameterSet params = MlvParams{};
    double x1_min = -1, x1_max = 1, x2_min = -1, x2_max = 1;
    std::vector<StateVector> seeds;
    int grid = 0;           // additional grid x grid seeds spread over the window
    double t_max = 50;
    bool backward = true;   // also integrate each seed backwards
    bool manifolds = true;  // both branches of both manifolds of every saddle in the window
    bool cycles = true;     // one period of the cycle around each antisaddle, when shooting finds one
    double manifold_delta = 1e-6;
    IntegratorOptions integrator;
};

struct PortraitCurve {
    std::string id;
    std::string kind;  // orbit, orbit_backward, unstable, stable, cycle
    std::vector<double> t;
    std::vector<StateVector> y;
    std::string diagnostic;  // empty when the curve ended normally (time, window, or section)
};

struct Portrait {
    PortraitSpec spec;
    std::vector<Equilibrium> equilibria;  // those in the window
    std::vector<PortraitCurve> curves;
    std::vector<CycleRecord> cycles;
};

// Trajectories stop on leaving the window enlarged by half its size on every side.
Portrait build_portrait(const PortraitSpec& spec);

}  // namespace lvbif
