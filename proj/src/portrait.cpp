#include "lvbif/portrait.hpp"

#include <cmath>

#include "lvbif/regions.hpp"

namespace lvbif {

namespace {

bool in_window(const PortraitSpec& s, const StateVector& x) {
    return x[0] >= s.x1_min && x[0] <= s.x1_max && x[1] >= s.x2_min && x[1] <= s.x2_max;
}

PortraitCurve to_curve(std::string id, std::string kind, const Trajectory& tr) {
    PortraitCurve c;
    c.id = std::move(id);
    c.kind = std::move(kind);
    c.t = tr.t;
    c.y = tr.y;
    if (tr.status != TrajStatus::Completed && tr.status != TrajStatus::Event)
        c.diagnostic = std::string(to_string(tr.status)) + (tr.diagnostic.empty() ? "" : ": " + tr.diagnostic);
    return c;
}

}  // namespace

Portrait build_portrait(const PortraitSpec& spec) {
    if (dimension(spec.params) != 2) throw UsageError("portrait: planar models only");
    if (!(spec.x1_max > spec.x1_min) || !(spec.x2_max > spec.x2_min)) throw UsageError("portrait: empty window");
    if (!(spec.t_max > 0)) throw UsageError("portrait: t_max must be positive");
    validate(spec.params);

    Portrait out;
    out.spec = spec;
    const double w1 = spec.x1_max - spec.x1_min, w2 = spec.x2_max - spec.x2_min;
    const double lo1 = spec.x1_min - 0.5 * w1, hi1 = spec.x1_max + 0.5 * w1;
    const double lo2 = spec.x2_min - 0.5 * w2, hi2 = spec.x2_max + 0.5 * w2;
    // positive inside the enlarged window
    auto margin = [=](double, const StateVector& y) {
        return std::min({y[0] - lo1, hi1 - y[0], y[1] - lo2, hi2 - y[1]});
    };
    const std::vector<EventSpec> leave{{margin, -1, true}};
    IntegratorOptions io = spec.integrator;
    io.keep_dense = false;

    const auto all = find_equilibria(spec.params);
    for (const auto& e : all)
        if (in_window(spec, e.state)) out.equilibria.push_back(e);

    std::vector<StateVector> seeds = spec.seeds;
    for (int i = 0; i < spec.grid; ++i)
        for (int j = 0; j < spec.grid; ++j)
            seeds.emplace_back(spec.x1_min + w1 * (i + 0.5) / spec.grid, spec.x2_min + w2 * (j + 0.5) / spec.grid);

    for (std::size_t k = 0; k < seeds.size(); ++k) {
        const std::string id = "seed" + std::to_string(k + 1);
        out.curves.push_back(to_curve(id, "orbit", integrate(spec.params, seeds[k], 0, spec.t_max, io, leave)));
        if (spec.backward)
            out.curves.push_back(
                to_curve(id + "b", "orbit_backward", integrate(spec.params, seeds[k], 0, -spec.t_max, io, leave)));
    }

    if (spec.manifolds) {
        int n = 0;
        TraceBudget budget;
        budget.time = spec.t_max;
        budget.state_bound = 2 * std::max({std::abs(lo1), std::abs(hi1), std::abs(lo2), std::abs(hi2)});
        for (const auto& e : out.equilibria) {
            if (e.classification != EqClass::Saddle) continue;
            ++n;
            for (const auto which : {ManifoldKind::Unstable, ManifoldKind::Stable})
                for (const int side : {1, -1}) {
                    const bool unstable = which == ManifoldKind::Unstable;
                    const std::string id = "saddle" + std::to_string(n) + (unstable ? "u" : "s") + (side > 0 ? "+" : "-");
                    const Trajectory tr = trace_manifold(spec.params, e, which, side, spec.manifold_delta, budget,
                                                         nullptr, spec.integrator);
                    out.curves.push_back(to_curve(id, unstable ? "unstable" : "stable", tr));
                }
        }
    }

    if (spec.cycles) {
        const double bound = std::hypot(w1, w2);
        int n = 0;
        for (const auto& e : out.equilibria) {
            if (e.eigen.det <= 0 || e.eigen.trace == 0) continue;
            const auto census = cycle_around(spec.params, e, all, bound, spec.integrator);
            if (!census.present || !census.record) continue;
            const CycleRecord& r = *census.record;
            out.cycles.push_back(r);
            out.curves.push_back(to_curve("cycle" + std::to_string(++n), "cycle",
                                          integrate(spec.params, r.section_point, 0, r.period, io)));
        }
    }
    return out;
}

}  // namespace lvbif
