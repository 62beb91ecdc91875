#include "lvbif/regions.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace lvbif {

St2Params circle_point(const St2Params& base, double radius, double psi_deg) {
    const double t = psi_deg * std::numbers::pi / 180.0;
    St2Params p = base;
    p.a = -radius * std::cos(t);
    p.b = -radius * std::sin(t);
    return p;
}

std::string_view to_string(WalkEventKind k) {
    switch (k) {
        case WalkEventKind::HB: return "HB";
        case WalkEventKind::SN: return "SN";
        case WalkEventKind::SN0: return "SN0";
        case WalkEventKind::TC: return "TC";
        case WalkEventKind::Het: return "Het";
        case WalkEventKind::CycleLoss: return "cycle-loss";
    }
    return "?";
}

std::vector<Equilibrium> local_equilibria(const St2Params& p, double bound) {
    std::vector<Equilibrium> out;
    for (auto& e : find_equilibria(p))
        if (e.state.norm_inf() < bound) out.push_back(std::move(e));
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.state[0] < b.state[0]; });
    return out;
}

namespace {

double det_of(const Equilibrium& e) { return e.eigen.det; }
double trace_of(const Equilibrium& e) { return e.eigen.trace; }

// What the local codim-one tests see at one point of the circle.
struct Signature {
    int count = 0;
    int origin_det = 0;  // sign of det J(0)
    int stable = 0;      // equilibria with det > 0 and trace < 0
    bool operator==(const Signature&) const = default;
};

Signature signature(const St2Params& p, double bound) {
    Signature s;
    const auto eqs = local_equilibria(p, bound);
    for (const auto& e : eqs) s.count += e.multiplicity;  // roots merged at a crossing still count twice
    const double d0 = eval_jacobian(p, StateVector(0.0, 0.0)).det();
    s.origin_det = (d0 > 0) - (d0 < 0);
    for (const auto& e : eqs)
        if (det_of(e) > 0 && trace_of(e) < 0) ++s.stable;
    return s;
}

struct Ctx {
    const St2Params& base;
    const WalkOptions& opts;
    double bound;
    St2Params at(double psi) const { return circle_point(base, opts.radius, psi); }
    Signature sig(double psi) const { return signature(at(psi), bound); }
};

void emit_local(const Ctx& c, double lo, double hi, const Signature& a, const Signature& b, std::vector<WalkEvent>& out) {
    const double psi = 0.5 * (lo + hi);
    if (a.count != b.count) {
        WalkEvent ev{WalkEventKind::SN, psi, {}};
        // fold point: the closest adjacent pair on the side that has them
        const double side = a.count > b.count ? lo : hi;
        const auto eqs = local_equilibria(c.at(side), c.bound);
        double best = std::numeric_limits<double>::infinity();
        StateVector fold;
        for (size_t i = 0; i + 1 < eqs.size(); ++i) {
            const double d = (eqs[i + 1].state - eqs[i].state).norm2();
            if (d < best) {
                best = d;
                fold = 0.5 * (eqs[i].state + eqs[i + 1].state);
            }
        }
        if (std::isfinite(best)) {
            SnSegmentOptions so;
            so.diagram_scale = std::sqrt(c.opts.radius);
            const auto cls = classify_sn_segment(c.at(side), fold, so);
            if (cls.kind == SnSegmentKind::SN0) ev.kind = WalkEventKind::SN0;
            ev.detail = "fold at x=" + std::to_string(fold[0]) + " classified " + std::string(to_string(cls.kind)) +
                        (cls.diagnostic.empty() ? "" : " (" + cls.diagnostic + ")");
        }
        out.push_back(ev);
    }
    if (a.origin_det != b.origin_det) out.push_back({WalkEventKind::TC, psi, "equilibrium crosses the origin"});
    if (a.count == b.count && a.origin_det == b.origin_det && a.stable != b.stable) {
        // a genuine Hopf crossing has an antisaddle with vanishing trace here; merged roots next to
        // a crossing of the origin also flip the count and are skipped
        double best = std::numeric_limits<double>::infinity();
        for (const auto& e : local_equilibria(c.at(psi), c.bound))
            if (det_of(e) > 0) best = std::min(best, std::abs(trace_of(e)) / std::sqrt(det_of(e)));
        if (best < 1e-5) out.push_back({WalkEventKind::HB, psi, "antisaddle changes stability"});
    }
}

void refine_local(const Ctx& c, double lo, double hi, Signature slo, Signature shi, std::vector<WalkEvent>& out,
                  int depth = 0) {
    if (slo == shi) return;
    while (hi - lo > c.opts.psi_tol) {
        const double mid = 0.5 * (lo + hi);
        const Signature sm = c.sig(mid);
        if (sm == slo) {
            lo = mid;
        } else if (sm == shi) {
            hi = mid;
        } else {
            if (depth > 40) break;
            refine_local(c, lo, mid, slo, sm, out, depth + 1);
            refine_local(c, mid, hi, sm, shi, out, depth + 1);
            return;
        }
    }
    emit_local(c, lo, hi, slo, shi, out);
}

// The two saddles adjacent to the origin on either side, when the origin is not a saddle.
std::optional<std::pair<Equilibrium, Equilibrium>> flanking_saddles(const ParameterSet& p, double bound) {
    const auto eqs = local_equilibria(std::get<St2Params>(p), bound);
    std::optional<Equilibrium> left, right, origin;
    for (const auto& e : eqs) {
        if (e.state.norm_inf() == 0) origin = e;
        if (e.classification != EqClass::Saddle) continue;
        if (e.state[0] < 0) left = e;
        if (e.state[0] > 0 && !right) right = e;
    }
    if (!left || !right || !origin || origin->classification == EqClass::Saddle) return std::nullopt;
    return std::make_pair(*left, *right);
}

}  // namespace

ConnectionSpec st2_het_spec(double bound, const TraceBudget& budget, double delta) {
    ConnectionSpec spec;
    spec.saddles = [bound](const ParameterSet& p) { return flanking_saddles(p, bound); };
    spec.section = [](const ParameterSet&, const Equilibrium&, const Equilibrium&) {
        return Section(StateVector(0.0, 0.0), StateVector(1.0, 0.0), 0);
    };
    spec.delta = delta;
    spec.budget = budget;
    spec.budget.state_bound = std::min(budget.state_bound, bound);
    return spec;
}

// The invariant curve passes through (0, k1 a) between the saddles, so the free branches point to
// the opposite sign of y.
int st2_het_side(const St2Params& p) { return p.a * p.k1 < 0 ? 1 : -1; }


CycleCensus cycle_census(const St2Params& p, double bound, const IntegratorOptions& io) {
    CycleCensus res;
    const auto eqs = local_equilibria(p, bound);
    const Equilibrium* centre = nullptr;
    for (const auto& e : eqs) {
        if (det_of(e) <= 0 || trace_of(e) == 0) continue;
        if (!centre || e.state.norm_inf() < centre->state.norm_inf()) centre = &e;
    }
    if (!centre) {
        res.diagnostic = "no local antisaddle";
        return res;
    }
    return cycle_around(p, *centre, eqs, bound, io);
}

CycleCensus cycle_around(const ParameterSet& p, const Equilibrium& centre_eq, const std::vector<Equilibrium>& eqs,
                         double bound, const IntegratorOptions& io) {
    CycleCensus res;
    const Equilibrium* centre = &centre_eq;
    if (det_of(*centre) <= 0 || trace_of(*centre) == 0) {
        res.diagnostic = "not an antisaddle";
        return res;
    }
    const double tr = trace_of(*centre);
    const double dir = tr > 0 ? 1.0 : -1.0;  // the direction in which the antisaddle repels
    const double rate = std::max(std::abs(tr), 1e-3 * std::sqrt(det_of(*centre)));
    const double horizon = 60.0 / rate;
    const StateVector x0 = centre->state + StateVector(1e-4 * bound, 0.0);
    IntegratorOptions o = io;
    o.keep_dense = false;
    const StateVector xc = centre->state;
    std::vector<EventSpec> ev{{[xc, bound](double, const StateVector& y) { return (y - xc).norm_inf() - bound; }, 1, true}};
    const Trajectory tr_out = integrate(p, x0, 0.0, dir * horizon, o, ev);
    if (tr_out.status == TrajStatus::Event) {
        res.diagnostic = "orbit from the antisaddle leaves the local neighbourhood";
        return res;
    }
    if (tr_out.status != TrajStatus::Completed) {
        res.diagnostic = "integration stopped: " + std::string(to_string(tr_out.status));
        return res;
    }
    const StateVector xf = tr_out.final_state();
    for (const auto& e : eqs)
        if ((xf - e.state).norm_inf() < 1e-6 * bound) {
            res.diagnostic = "orbit from the antisaddle converges to an equilibrium";
            return res;
        }
    // last upward-or-downward crossing of the horizontal through the antisaddle, right of it
    StateVector guess;
    bool have = false;
    for (size_t i = tr_out.y.size() - 1; i > tr_out.y.size() / 2 && !have; --i) {
        const StateVector& u = tr_out.y[i - 1];
        const StateVector& v = tr_out.y[i];
        const double du = u[1] - xc[1], dv = v[1] - xc[1];
        if ((du < 0) != (dv < 0) && u[0] > xc[0]) {
            const double s = du / (du - dv);
            guess = u + s * (v - u);
            have = true;
        }
    }
    if (!have) {
        res.diagnostic = "orbit from the antisaddle does not wind around it";
        return res;
    }
    CycleOptions co;
    co.integrator = io;
    co.max_return_time = 20 * horizon;
    const Section sec(xc, StateVector(0.0, 1.0), 0);
    const auto found = find_limit_cycle(p, sec, guess, co);
    if (found.status != SearchStatus::Found) {
        res.diagnostic = "shooting failed: " + found.diagnostic;
        return res;
    }
    res.present = true;
    res.record = found.cycle;
    return res;
}

WalkResult walk_circle(const St2Params& base, const WalkOptions& opts) {
    if (!(opts.radius > 0) || !(opts.step > 0) || !(opts.cycle_step > 0) || !(opts.sweep > 0))
        throw UsageError("walk_circle: radius, steps and sweep must be positive");
    WalkResult res;
    const double bound = opts.local_factor * std::sqrt(opts.radius);
    res.local_bound = bound;
    res.radius = opts.radius;
    const Ctx c{base, opts, bound};
    const int n = static_cast<int>(std::ceil(opts.sweep / opts.step));
    const double end = opts.psi_start + opts.sweep;
    auto grid = [&](int i, int m) { return i == m ? end : opts.psi_start + i * (opts.sweep / m); };

    // local crossings
    std::vector<WalkEvent> events;
    Signature prev = c.sig(grid(0, n));
    for (int i = 1; i <= n; ++i) {
        const Signature cur = c.sig(grid(i, n));
        refine_local(c, grid(i - 1, n), grid(i, n), prev, cur, events);
        prev = cur;
    }

    // connections between the flanking saddles
    auto split = [&](double psi) {
        const St2Params p = c.at(psi);
        ConnectionSpec s = st2_het_spec(bound, {200 / opts.radius, 1e3, bound});
        s.integrator = opts.integrator;
        s.side_unstable = s.side_stable = st2_het_side(p);
        return std::make_pair(connection_splitting(p, s), s);
    };
    std::optional<std::pair<double, double>> last;  // (psi, splitting)
    for (int i = 0; i <= n; ++i) {
        const double psi = grid(i, n);
        const auto [r, s] = split(psi);
        if (!r.valid) {
            last.reset();
            continue;
        }
        if (last && (last->second < 0) != (r.splitting < 0)) {
            const auto found = find_connection([&](double v) { return ParameterSet(c.at(v)); }, last->first, psi, s,
                                               "psi");
            if (found.status == SearchStatus::Found)
                events.push_back({WalkEventKind::Het, found.value, "left saddle to right saddle off the invariant curve"});
        }
        last = std::make_pair(psi, r.splitting);
    }

    // cycle census: any appearance or disappearance needs an explaining event nearby
    const int m = static_cast<int>(std::ceil(opts.sweep / opts.cycle_step));
    auto has_cycle = [&](double psi) { return cycle_census(c.at(psi), bound, opts.integrator).present; };
    bool cprev = has_cycle(grid(0, m));
    for (int i = 1; i <= m; ++i) {
        const bool ccur = has_cycle(grid(i, m));
        if (ccur != cprev) {
            double lo = grid(i - 1, m), hi = grid(i, m);
            while (hi - lo > 1e-4) {
                const double mid = 0.5 * (lo + hi);
                (has_cycle(mid) == cprev ? lo : hi) = mid;
            }
            const double psi = 0.5 * (lo + hi);
            const bool explained = std::any_of(events.begin(), events.end(), [&](const WalkEvent& e) {
                return (e.kind == WalkEventKind::HB || e.kind == WalkEventKind::Het || e.kind == WalkEventKind::SN0) &&
                       std::abs(e.psi - psi) <= opts.coincide;
            });
            if (!explained)
                events.push_back({WalkEventKind::CycleLoss, psi,
                                  cprev ? "cycle disappears without a local event or connection"
                                        : "cycle appears without a local event or connection"});
        }
        cprev = ccur;
    }

    std::sort(events.begin(), events.end(), [](const auto& a, const auto& b) { return a.psi < b.psi; });
    res.events = events;

    // one census per region between consecutive events
    std::vector<double> cuts{opts.psi_start};
    for (const auto& e : events) cuts.push_back(e.psi);
    cuts.push_back(end);
    for (size_t i = 0; i + 1 < cuts.size(); ++i) {
        if (cuts[i + 1] - cuts[i] <= 0) continue;
        RegionCensus rc;
        rc.psi_lo = cuts[i];
        rc.psi_hi = cuts[i + 1];
        rc.psi = 0.5 * (rc.psi_lo + rc.psi_hi);
        const St2Params p = c.at(rc.psi);
        rc.equilibria = local_equilibria(p, bound);
        rc.cycle = cycle_census(p, bound, opts.integrator);
        res.regions.push_back(std::move(rc));
    }
    return res;
}

std::vector<WalkEventKind> event_kinds(const WalkResult& w) {
    std::vector<WalkEventKind> k;
    for (const auto& e : w.events) k.push_back(e.kind);
    return k;
}

}  // namespace lvbif
