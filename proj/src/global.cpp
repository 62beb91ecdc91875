#include "lvbif/global.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace lvbif {

Section::Section(StateVector a, StateVector n, int dir) : anchor(std::move(a)), normal(std::move(n)), direction(dir) {
    const double len = normal.norm2();
    if (!(len > 0) || !anchor.finite()) throw UsageError("Section: normal must be nonzero and anchor finite");
    normal = (1.0 / len) * normal;
}

double Section::distance(const StateVector& x) const {
    return normal[0] * (x[0] - anchor[0]) + normal[1] * (x[1] - anchor[1]);
}

double Section::coordinate(const StateVector& x) const {
    const StateVector t = tangent();
    return t[0] * (x[0] - anchor[0]) + t[1] * (x[1] - anchor[1]);
}

StateVector Section::point(double s) const { return anchor + s * tangent(); }

Section bisector_section(const StateVector& a, const StateVector& b, int direction) {
    return Section(0.5 * (a + b), b - a, direction);
}

StateVector manifold_direction(const ParameterSet& p, const Equilibrium& saddle, ManifoldKind which) {
    if (dimension(p) != 2) throw UsageError("manifold_direction: planar models only");
    const Matrix2 j = eval_jacobian(p, saddle.state);
    const EigenData e = eigen2(j);
    if (e.complex || !(e.re[0] < 0 && e.re[1] > 0)) throw UsageError("trace_manifold: equilibrium is not a saddle");
    const double lam = which == ManifoldKind::Unstable ? e.re[1] : e.re[0];
    StateVector v = real_eigenvector(j, lam);
    if (v[1] < 0 || (v[1] == 0 && v[0] < 0)) v = -v;
    return v;
}

Trajectory trace_manifold(const ParameterSet& p, const Equilibrium& saddle, ManifoldKind which, int side, double delta,
                          const TraceBudget& budget, const Section* stop, const IntegratorOptions& iopts) {
    if (!(delta >= 1e-8 && delta <= 1e-4)) throw UsageError("trace_manifold: delta must lie in [1e-8, 1e-4]");
    if (side != 1 && side != -1) throw UsageError("trace_manifold: side must be +1 or -1");
    const StateVector v = manifold_direction(p, saddle, which);
    const StateVector x0 = saddle.state + (side * delta) * v;
    const bool backward = which == ManifoldKind::Stable;

    std::vector<EventSpec> ev;
    if (stop) {
        const Section s = *stop;
        // section directions are given in forward time
        ev.push_back({[s](double, const StateVector& y) { return s.distance(y); }, backward ? -s.direction : s.direction,
                      true});
    }
    const double bound = budget.state_bound;
    ev.push_back({[bound](double, const StateVector& y) { return y.norm_inf() - bound; }, 1, true});

    IntegratorOptions o = iopts;
    o.max_arclength = budget.arclength;
    o.keep_dense = false;
    return integrate(p, x0, 0.0, backward ? -budget.time : budget.time, o, ev);
}

double splitting_between(const Section& s, const StateVector& first, const StateVector& second) {
    const StateVector t = s.tangent();
    return t[0] * (first[0] - second[0]) + t[1] * (first[1] - second[1]);
}

namespace {

bool hit_section(const Trajectory& tr, bool has_section) {
    return has_section && tr.status == TrajStatus::Event && !tr.events.empty() && tr.events.back().index == 0;
}

}  // namespace

ConnectionResult connection_splitting(const ParameterSet& p, const ConnectionSpec& spec) {
    ConnectionResult r;
    if (!spec.saddles) throw UsageError("connection_splitting: no saddle selector");
    const auto pair = spec.saddles(p);
    if (!pair) {
        r.diagnostic = "saddles absent";
        return r;
    }
    const auto& [a, b] = *pair;
    r.section = spec.section ? spec.section(p, a, b) : bisector_section(a.state, b.state);
    r.unstable = trace_manifold(p, a, ManifoldKind::Unstable, spec.side_unstable, spec.delta, spec.budget, &r.section,
                                spec.integrator);
    r.stable = trace_manifold(p, b, ManifoldKind::Stable, spec.side_stable, spec.delta, spec.budget, &r.section,
                              spec.integrator);
    const bool hu = hit_section(r.unstable, true), hs = hit_section(r.stable, true);
    if (!hu || !hs) {
        r.diagnostic = std::string(hu ? "" : "unstable trace missed the section; ") +
                       (hs ? "" : "stable trace missed the section");
        return r;
    }
    r.hit_unstable = r.unstable.final_state();
    r.hit_stable = r.stable.final_state();
    r.splitting = splitting_between(r.section, r.hit_unstable, r.hit_stable);
    r.valid = true;
    return r;
}

std::string_view to_string(SearchStatus s) {
    switch (s) {
        case SearchStatus::Found: return "found";
        case SearchStatus::NoSignChange: return "not-found";
        case SearchStatus::Failed: return "failed";
    }
    return "?";
}

ConnectionSearch find_connection(const ParameterSet& p, const std::string& free_param, double lo, double hi,
                                 const ConnectionSpec& spec) {
    get_param(p, free_param);  // throws on an unknown name
    return find_connection([&](double v) { return with_param(p, free_param, v); }, lo, hi, spec, free_param);
}

ConnectionSearch find_connection(const std::function<ParameterSet(double)>& path, double lo, double hi,
                                 const ConnectionSpec& spec, const std::string& label) {
    ConnectionSearch res;
    if (!(hi > lo)) throw UsageError("find_connection: empty bracket");
    auto f = [&](double v) {
        ++res.evaluations;
        return connection_splitting(path(v), spec);
    };
    const auto rlo = f(lo), rhi = f(hi);
    if (!rlo.valid || !rhi.valid) {
        res.diagnostic = "splitting undefined at the bracket ends: " + (rlo.valid ? rhi.diagnostic : rlo.diagnostic);
        return res;
    }
    double flo = rlo.splitting, fhi = rhi.splitting;
    res.splitting_lo = flo;
    res.splitting_hi = fhi;
    if (flo == 0 || fhi == 0) {
        res.status = SearchStatus::Found;
        res.value = flo == 0 ? lo : hi;
        return res;
    }
    if ((flo < 0) == (fhi < 0)) {
        res.status = SearchStatus::NoSignChange;
        res.diagnostic = "splitting has one sign on the bracket";
        return res;
    }
    const double width0 = hi - lo;
    int side = 0;
    for (int it = 0; it < 200 && hi - lo > tol::kConnectionParam; ++it) {
        const bool secant = hi - lo < 1e-3 * width0;
        double m = secant ? (lo * fhi - hi * flo) / (fhi - flo) : 0.5 * (lo + hi);
        if (!(m > lo && m < hi)) m = 0.5 * (lo + hi);
        auto rm = f(m);
        if (!rm.valid) {
            m = 0.5 * (lo + hi);
            rm = f(m);
            if (!rm.valid) {
                res.diagnostic = "splitting undefined inside the bracket at " + label + "=" + std::to_string(m) +
                                 ": " + rm.diagnostic;
                res.value = m;
                return res;
            }
        }
        const double fm = rm.splitting;
        if (fm == 0) {
            lo = hi = m;
            break;
        }
        if ((fm < 0) == (flo < 0)) {
            lo = m;
            flo = fm;
            if (secant && side == -1) fhi *= 0.5;
            side = -1;
        } else {
            hi = m;
            fhi = fm;
            if (secant && side == 1) flo *= 0.5;
            side = 1;
        }
    }
    res.status = SearchStatus::Found;
    res.value = std::abs(flo) <= std::abs(fhi) ? lo : hi;
    return res;
}

std::optional<std::pair<StateVector, double>> first_return(const ParameterSet& p, const Section& section, double s,
                                                           const CycleOptions& opts) {
    const StateVector x0 = section.point(s);
    const StateVector f0 = eval_field(p, x0);
    const double flux = section.normal[0] * f0[0] + section.normal[1] * f0[1];
    if (flux == 0) return std::nullopt;
    const double sigma = flux > 0 ? 1.0 : -1.0;
    if (section.direction != 0 && section.direction != static_cast<int>(sigma)) return std::nullopt;
    std::vector<EventSpec> ev{
        // at t = 0 the orbit sits on the section; report the post-crossing sign
        {[section, sigma](double t, const StateVector& y) { return t <= 0 ? sigma : section.distance(y); },
         static_cast<int>(sigma), true},
        {[](double, const StateVector& y) { return y.norm_inf() - 1e6; }, 1, true}};
    IntegratorOptions o = opts.integrator;
    o.keep_dense = false;
    const Trajectory tr = integrate(p, x0, 0.0, opts.max_return_time, o, ev);
    if (tr.status != TrajStatus::Event || tr.events.back().index != 0) return std::nullopt;
    return std::make_pair(tr.final_state(), tr.final_time());
}

CycleSearch find_limit_cycle(const ParameterSet& p, const Section& section, const StateVector& guess,
                             const CycleOptions& opts) {
    CycleSearch res;
    double s = section.coordinate(guess);
    auto P = [&](double v) -> std::optional<std::pair<double, double>> {
        const auto r = first_return(p, section, v, opts);
        if (!r) return std::nullopt;
        return std::make_pair(section.coordinate(r->first), r->second);
    };
    for (int it = 0; it < opts.max_newton; ++it) {
        const auto ps = P(s);
        if (!ps) {
            res.status = it == 0 ? SearchStatus::NoSignChange : SearchStatus::Failed;
            res.diagnostic = "no return to the section from s=" + std::to_string(s);
            return res;
        }
        const double F = ps->first - s;
        const double h = 1e-6 * std::max(1.0, std::abs(s));
        const auto pp = P(s + h), pm = P(s - h);
        if (!pp || !pm) {
            res.diagnostic = "return map undefined next to s=" + std::to_string(s);
            return res;
        }
        const double dP = (pp->first - pm->first) / (2 * h);
        if (std::abs(F) <= opts.tol * std::max(1.0, std::abs(s))) {
            res.status = SearchStatus::Found;
            res.cycle = {section.point(s), ps->second, dP, std::abs(dP) < 1};
            return res;
        }
        if (dP == 1 || !std::isfinite(dP)) break;
        double step = -F / (dP - 1);
        const double cap = 0.5 * std::max(1.0, std::abs(s));
        if (std::abs(step) > cap) step = std::copysign(cap, step);
        s += step;
    }
    res.diagnostic = "shooting Newton did not converge";
    return res;
}

std::string_view to_string(SnSegmentKind k) {
    switch (k) {
        case SnSegmentKind::SN: return "SN";
        case SnSegmentKind::SN0: return "SN0";
        case SnSegmentKind::Unclassified: return "unclassified";
    }
    return "?";
}

SnSegmentResult classify_sn_segment(const ParameterSet& p, const StateVector& xf, const SnSegmentOptions& opts) {
    SnSegmentResult res;
    if (dimension(p) != 2) throw UsageError("classify_sn_segment: planar models only");
    const Matrix2 j = eval_jacobian(p, xf);
    const EigenData e = eigen2(j);
    if (e.complex) throw UsageError("classify_sn_segment: not a fold point");
    const double lam = std::abs(e.re[0]) <= std::abs(e.re[1]) ? e.re[0] : e.re[1];
    const StateVector v = real_eigenvector(j, lam);
    const StateVector w = real_left_eigenvector(j, lam);
    const double wv = dot(w, v);
    if (std::abs(wv) < 1e-8) {
        res.diagnostic = "double zero eigenvalue";
        return res;
    }
    const SecondDerivs h = eval_second_derivs(p, xf);
    double c = 0;
    for (int i = 0; i < 2; ++i)
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b) c += w[i] * h.d[i][a][b] * v[a] * v[b];
    const double coeff = 0.5 * c / wv;  // centre dynamics c' = coeff c^2
    if (coeff == 0) {
        res.diagnostic = "degenerate fold";
        return res;
    }
    const double r = opts.ball_radius > 0 ? opts.ball_radius : 1e-3 * opts.diagram_scale;
    const double side = coeff > 0 ? 1.0 : -1.0;
    const StateVector x0 = xf + (side * opts.start_factor * r) * v;
    auto dist = [xf](const StateVector& y) { return (y - xf).norm2(); };

    IntegratorOptions io;
    io.keep_dense = false;
    const double bound = 1e3 * std::max(1.0, opts.diagram_scale);
    std::vector<EventSpec> leave{{[&](double, const StateVector& y) { return dist(y) - 10 * r; }, 1, true},
                                 {[bound](double, const StateVector& y) { return y.norm_inf() - bound; }, 1, true}};
    const Trajectory t1 = integrate(p, x0, 0.0, opts.time_budget, io, leave);
    if (t1.status != TrajStatus::Event) {
        res.kind = t1.status == TrajStatus::Completed ? SnSegmentKind::SN : SnSegmentKind::Unclassified;
        res.diagnostic = "departure stays within 10 r: " + std::string(to_string(t1.status));
        res.closest_return = dist(t1.final_state());
        return res;
    }
    if (t1.events.back().index == 1) {
        res.kind = SnSegmentKind::SN;
        res.diagnostic = "departure escapes";
        res.closest_return = std::numeric_limits<double>::infinity();
        return res;
    }
    std::vector<EventSpec> back{{[&](double, const StateVector& y) { return dist(y) - r; }, -1, true},
                                {[bound](double, const StateVector& y) { return y.norm_inf() - bound; }, 1, true}};
    const double t_left = t1.final_time();
    const Trajectory t2 = integrate(p, t1.final_state(), t_left, opts.time_budget, io, back);
    double closest = std::numeric_limits<double>::infinity();
    for (const auto& y : t2.y) closest = std::min(closest, dist(y));
    res.closest_return = closest;
    if (t2.status == TrajStatus::Event && t2.events.back().index == 0) {
        // must come back through the attracting (node) side of the centre direction
        const StateVector d = t2.final_state() - xf;
        const double along = dot(w, d) / wv;
        res.return_time = t2.final_time();
        if (along * side < 0) {
            res.kind = SnSegmentKind::SN0;
        } else {
            res.diagnostic = "returned on the repelling side";
        }
        return res;
    }
    if (t2.status == TrajStatus::Completed || t2.status == TrajStatus::Event) {
        res.kind = SnSegmentKind::SN;
        res.diagnostic = t2.status == TrajStatus::Event ? "departure escapes" : "no return within the time budget";
        return res;
    }
    res.diagnostic = "integration failed: " + t2.diagnostic;
    return res;
}

}  // namespace lvbif
