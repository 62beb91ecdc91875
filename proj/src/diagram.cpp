#include "lvbif/diagram.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "lvbif/algebra.hpp"

namespace lvbif {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::optional<Equilibrium> interior_antisaddle(const ParameterSet& p) {
    std::optional<Equilibrium> f;
    for (const auto& e : find_equilibria(p))
        if (!e.on_axis && e.eigen.det > 0 && (!f || e.eigen.det > f->eigen.det)) f = e;
    return f;
}

std::optional<Equilibrium> interior_saddle(const ParameterSet& p) {
    for (const auto& e : find_equilibria(p))
        if (!e.on_axis && e.classification == EqClass::Saddle) return e;
    return std::nullopt;
}

// Scaled coordinates of the window: both parameters mapped to [0, 1].
struct Frame {
    Window w;
    StateVector to(double p1, double p2) const { return {(p1 - w.p1_min) / w.width1(), (p2 - w.p2_min) / w.width2()}; }
    std::pair<double, double> from(const StateVector& u) const {
        return {w.p1_min + u[0] * w.width1(), w.p2_min + u[1] * w.width2()};
    }
};

double segment_distance(const StateVector& x, const StateVector& a, const StateVector& b) {
    const StateVector d = b - a;
    const double l2 = dot(d, d);
    const double t = l2 > 0 ? std::clamp(dot(x - a, d) / l2, 0.0, 1.0) : 0.0;
    return (x - (a + t * d)).norm2();
}

double polyline_distance(const Curve& c, const StateVector& x, const Frame& f) {
    double best = kInf;
    for (std::size_t i = 0; i < c.points.size(); ++i) {
        const StateVector a = f.to(c.points[i].p1, c.points[i].p2);
        if (i + 1 == c.points.size()) {
            best = std::min(best, (x - a).norm2());
            break;
        }
        best = std::min(best, segment_distance(x, a, f.to(c.points[i + 1].p1, c.points[i + 1].p2)));
    }
    return best;
}

StateVector unit(const StateVector& v) {
    const double n = v.norm2();
    return n > 0 ? (1.0 / n) * v : v;
}

void swap_axes(Curve& c) {
    std::swap(c.param1, c.param2);
    for (auto& bp : c.points) std::swap(bp.p1, bp.p2);
    for (auto& m : c.markers) std::swap(m.p1, m.p2);
}

}  // namespace

ConnectionSpec mlv_het_spec(const TraceBudget& budget, double delta) {
    ConnectionSpec spec;
    spec.saddles = [](const ParameterSet& p) -> std::optional<std::pair<Equilibrium, Equilibrium>> {
        std::optional<Equilibrium> from, to;
        const auto& q = std::get<MlvParams>(p);
        for (const auto& e : find_equilibria(p)) {
            if (!e.on_axis || e.classification != EqClass::Saddle) continue;
            const double transverse = q.b2 + q.a21 * e.state[0];
            if (transverse > 0) from = e;
            if (transverse < 0) to = e;
        }
        if (!from || !to || !interior_antisaddle(p)) return std::nullopt;
        return std::make_pair(*from, *to);
    };
    spec.section = [](const ParameterSet& p, const Equilibrium&, const Equilibrium&) {
        const auto f = interior_antisaddle(p);
        return Section(f ? f->state : StateVector(0.0, 0.0), StateVector(1.0, 0.0), 0);
    };
    spec.delta = delta;
    spec.budget = budget;
    return spec;
}

ConnectionSpec mlv_hom_spec(const TraceBudget& budget, double delta) {
    ConnectionSpec spec;
    spec.saddles = [](const ParameterSet& p) -> std::optional<std::pair<Equilibrium, Equilibrium>> {
        const auto s = interior_saddle(p);
        if (!s || !interior_antisaddle(p)) return std::nullopt;
        return std::make_pair(*s, *s);
    };
    spec.section = [](const ParameterSet& p, const Equilibrium& s, const Equilibrium&) {
        const auto f = interior_antisaddle(p);
        if (!f) return bisector_section(s.state, s.state + StateVector(1.0, 0.0));
        const StateVector d = f->state - s.state;
        return Section(f->state, unit(StateVector(-d[1], d[0])), 0);
    };
    spec.delta = delta;
    spec.budget = budget;
    return spec;
}

bool choose_het_sides(const ParameterSet& p, ConnectionSpec& spec) {
    const auto f = interior_antisaddle(p);
    if (!f || f->state[1] == 0) return false;
    spec.side_unstable = spec.side_stable = f->state[1] > 0 ? 1 : -1;
    return true;
}

bool choose_hom_sides(const ParameterSet& p, ConnectionSpec& spec) {
    const auto s = interior_saddle(p);
    const auto f = interior_antisaddle(p);
    if (!s || !f) return false;
    const StateVector d = f->state - s->state;
    for (int su : {1, -1})
        for (int ss : {1, -1}) {
            ConnectionSpec trial = spec;
            trial.side_unstable = su;
            trial.side_stable = ss;
            const auto r = connection_splitting(p, trial);
            if (r.valid && dot(r.hit_unstable - f->state, d) > 0 && dot(r.hit_stable - f->state, d) > 0) {
                spec.side_unstable = su;
                spec.side_stable = ss;
                return true;
            }
        }
    return false;
}

bool choose_st2_het_sides(const ParameterSet& p, ConnectionSpec& spec) {
    const auto* q = std::get_if<St2Params>(&p);
    if (!q || q->a == 0) return false;
    spec.side_unstable = spec.side_stable = st2_het_side(*q);
    return true;
}

std::vector<Curve> trace_connection_curves(const ParameterSet& base, const std::string& p1, const std::string& p2,
                                           const CodimTwoPoint& anchor, CurveKind kind, const ConnectionSpec& spec,
                                           const SideChooser& choose, const Window& window,
                                           const std::vector<CodimTwoPoint>& stops, const ConnectionCurveOptions& o) {
    const Frame frame{window};
    auto params_at = [&](double x, double y) { return with_param(with_param(base, p1, x), p2, y); };

    struct Sample {
        bool valid = false;
        double f = 0;
        int su = 0, ss = 0;
    };
    auto sample = [&](const ParameterSet& q) {
        Sample s;
        ConnectionSpec sp = spec;
        if (choose && !choose(q, sp)) return s;
        const auto r = connection_splitting(q, sp);
        s.valid = r.valid;
        s.f = r.splitting;
        s.su = sp.side_unstable;
        s.ss = sp.side_stable;
        return s;
    };
    // Root of the splitting along path on [lo, hi]; rejects jumps that only look like sign changes.
    auto solve = [&](const std::function<ParameterSet(double)>& path, double lo, const Sample& a, double hi,
                     const Sample& b) -> std::optional<double> {
        if (!a.valid || !b.valid || a.su != b.su || a.ss != b.ss || (a.f < 0) == (b.f < 0)) return std::nullopt;
        ConnectionSpec sp = spec;
        sp.side_unstable = a.su;
        sp.side_stable = a.ss;
        const auto found = find_connection(path, lo, hi, sp);
        if (found.status != SearchStatus::Found) return std::nullopt;
        const auto r = connection_splitting(path(found.value), sp);
        if (!r.valid || std::abs(r.splitting) > 0.05 * std::max(std::abs(a.f), std::abs(b.f))) return std::nullopt;
        return found.value;
    };
    auto make_point = [&](double x, double y) {
        const ParameterSet q = params_at(x, y);
        BranchPoint bp;
        bp.p1 = x;
        bp.p2 = y;
        bp.kind = kind;
        ConnectionSpec sp = spec;
        if (choose) choose(q, sp);
        const auto r = connection_splitting(q, sp);
        bp.state = r.valid ? 0.5 * (r.hit_unstable + r.hit_stable) : StateVector::zeros(dimension(q));
        if (const auto pair = spec.saddles(q)) bp.eigen = pair->first.eigen;
        return bp;
    };
    const double r0_scaled = o.anchor_radius / std::max(window.width1(), window.width2());
    auto nearest_stop = [&](const StateVector& u) {
        double best = kInf;
        for (const auto& s : stops) {
            const StateVector x = frame.to(s.p1, s.p2);
            if ((x - frame.to(anchor.p1, anchor.p2)).norm2() < 0.5 * r0_scaled) continue;  // the anchor itself
            best = std::min(best, (u - x).norm2());
        }
        return best;
    };

    // roots on the anchor circle
    const int n = std::max(8, o.circle_samples);
    const double r0 = o.anchor_radius;
    auto circle = [&](double th) { return params_at(anchor.p1 + r0 * std::cos(th), anchor.p2 + r0 * std::sin(th)); };
    std::vector<Sample> ring(n);
    for (int i = 0; i < n; ++i) ring[i] = sample(circle(2 * M_PI * i / n));
    std::vector<double> starts;
    for (int i = 0; i < n; ++i) {
        const int j = (i + 1) % n;
        const double lo = 2 * M_PI * i / n, hi = 2 * M_PI * (i + 1) / n;
        if (const auto th = solve(circle, lo, ring[i], hi, ring[j])) starts.push_back(*th);
    }

    std::vector<Curve> out;
    for (const double th : starts) {
        Curve c;
        c.kind = kind;
        c.param1 = p1;
        c.param2 = p2;
        c.base = base;
        const double x0 = anchor.p1 + r0 * std::cos(th), y0 = anchor.p2 + r0 * std::sin(th);
        c.points.push_back(make_point(x0, y0));
        StateVector prev = frame.to(anchor.p1, anchor.p2);
        StateVector cur = frame.to(x0, y0);
        StateVector t = unit(cur - prev);
        double h = (cur - prev).norm2();
        std::string why = "reached the point limit";
        while (static_cast<int>(c.points.size()) < o.max_points) {
            const double near = nearest_stop(cur);
            if (near < 2 * r0_scaled) {
                why = "reached a codim-2 point";
                break;
            }
            double hs = std::min({h * o.growth, o.max_step, 0.5 * near});
            std::optional<StateVector> next;
            while (!next && hs >= o.min_step) {
                const StateVector pred = cur + hs * t;
                const StateVector nrm(-t[1], t[0]);
                for (const double beta : {0.3, 1.0}) {
                    auto path = [&](double s) {
                        const auto [x, y] = frame.from(pred + s * nrm);
                        return params_at(x, y);
                    };
                    // pull the bracket ends in while the connection is undefined there (a fold nearby)
                    auto probe = [&](double b, Sample& out) {
                        for (int k = 0; k < 40; ++k, b *= 0.5) {
                            out = sample(path(b));
                            if (out.valid) return b;
                        }
                        return b;
                    };
                    // last valid point between a valid end and an invalid one
                    auto edge = [&](double good, double bad, Sample& out) {
                        for (int k = 0; k < 50; ++k) {
                            const double mid = 0.5 * (good + bad);
                            const Sample sm = sample(path(mid));
                            (sm.valid ? good : bad) = mid;
                        }
                        out = sample(path(good));
                        return good;
                    };
                    Sample sm = sample(path(0)), sl, sr;
                    const double bl = probe(-beta * hs, sl), br = probe(beta * hs, sr);
                    std::optional<double> s;
                    if (sm.valid) {
                        s = solve(path, bl, sl, 0, sm);
                        if (!s) s = solve(path, 0, sm, br, sr);
                    } else {
                        // the predictor overshot into the region where the connection is undefined
                        if (sl.valid) {
                            const double el = edge(bl, 0, sm);
                            s = solve(path, bl, sl, el, sm);
                        }
                        if (!s && sr.valid) {
                            const double er = edge(br, 0, sm);
                            s = solve(path, er, sm, br, sr);
                        }
                    }
                    if (!s) continue;
                    const StateVector cand = pred + *s * nrm;
                    if (dot(unit(cand - cur), t) < 0.8) continue;
                    next = cand;
                    break;
                }
                if (!next) hs /= 4;
            }
            if (!next) {
                why = "lost the connection";
                break;
            }
            const auto [x, y] = frame.from(*next);
            if (!window.contains(x, y)) {
                why = "left the window";
                break;
            }
            c.points.push_back(make_point(x, y));
            t = unit(*next - cur);
            h = (*next - cur).norm2();
            cur = *next;
        }
        c.diagnostic = why;
        out.push_back(std::move(c));
    }
    return out;
}

void validate_spec(const DiagramSpec& spec) {
    const ModelId m = model_of(spec.params);
    const auto names = parameter_names(m);
    for (const auto& n : {spec.p1, spec.p2}) {
        if (std::find(names.begin(), names.end(), n) == names.end())
            throw UsageError("diagram: unknown parameter '" + n + "' for model " + std::string(to_string(m)));
        if (is_discrete_param(n)) throw UsageError("diagram: parameter '" + n + "' is discrete");
    }
    if (spec.p1 == spec.p2) throw UsageError("diagram: the two parameters must differ");
    if (!(spec.window.width1() > 0) || !(spec.window.width2() > 0)) throw UsageError("diagram: empty parameter range");
    if (dimension(m) != 2) throw UsageError("diagram: planar models only");
    if (spec.sweep_lines < 1 || spec.sweep_starts < 1) throw UsageError("diagram: sweep counts must be positive");
    for (const auto k : spec.kinds) {
        if (k == CurveKind::EQ || k == CurveKind::NS)
            throw UsageError("diagram: curve kind " + std::string(to_string(k)) + " cannot be requested");
        if (k == CurveKind::HOM && m != ModelId::Mlv) throw UsageError("diagram: HOM curves are traced for MLV only");
        if (k == CurveKind::HET && m != ModelId::Mlv && m != ModelId::St2Min)
            throw UsageError("diagram: HET curves need MLV or ST2_MIN");
    }
}

std::vector<Curve> clip_curve(const Curve& c, const Window& w) {
    std::vector<Curve> out;
    auto inside = [&](const BranchPoint& bp) { return w.contains(bp.p1, std::isnan(bp.p2) ? w.p2_min : bp.p2); };
    std::size_t i = 0;
    while (i < c.points.size()) {
        while (i < c.points.size() && !inside(c.points[i])) ++i;
        if (i == c.points.size()) break;
        const std::size_t first = i;
        while (i < c.points.size() && inside(c.points[i])) ++i;
        Curve piece = c;
        piece.points.assign(c.points.begin() + static_cast<std::ptrdiff_t>(first),
                            c.points.begin() + static_cast<std::ptrdiff_t>(i));
        piece.events.clear();
        for (const auto& e : c.events)
            if (e.index >= first && e.index < i) {
                piece.events.push_back(e);
                piece.events.back().index -= first;
            }
        piece.markers.clear();
        out.push_back(std::move(piece));
    }
    // markers go to the piece passing closest to them
    const Frame f{w};
    for (const auto& m : c.markers) {
        if (!w.contains(m.p1, m.p2) || out.empty()) continue;
        std::size_t best = 0;
        double bd = kInf;
        for (std::size_t k = 0; k < out.size(); ++k) {
            const double d = polyline_distance(out[k], f.to(m.p1, m.p2), f);
            if (d < bd) {
                bd = d;
                best = k;
            }
        }
        out[best].markers.push_back(m);
    }
    return out;
}

Curve tc_curve_st2(const St2Params& p, double b_lo, double b_hi, int samples) {
    if (!(b_hi > b_lo) || samples < 2) throw UsageError("tc_curve_st2: empty b range");
    Curve c;
    c.kind = CurveKind::TC;
    c.param1 = "a";
    c.param2 = "b";
    c.base = p;
    const StateVector origin(0.0, 0.0);
    for (int i = 0; i < samples; ++i) {
        BranchPoint bp;
        bp.p1 = 0;
        bp.p2 = b_lo + (b_hi - b_lo) * i / (samples - 1);
        bp.state = origin;
        bp.kind = CurveKind::TC;
        const ParameterSet q = c.params_at(bp);
        bp.eigen = eigen2(eval_jacobian(q, origin));
        bp.tests = evaluate_tests(q, origin, Formulation::Full);
        if (i > 0) {
            const auto& pr = c.points.back();
            bp.arclength = pr.arclength + std::abs(bp.p2 - pr.p2);
        }
        c.points.push_back(bp);
    }
    if (b_lo < 0 && 0 < b_hi) {
        CodimTwoPoint m;
        m.kind = CodimTwoKind::ST2;
        m.p1 = 0;
        m.p2 = 0;
        m.state = origin;
        const ParameterSet q = with_param(with_param(ParameterSet(p), "a", 0), "b", 0);
        const Matrix2 j = eval_jacobian(q, origin);
        m.residuals = {{"F", eval_field(q, origin).norm_inf()}, {"det", j.det()}, {"tr", j.trace()}};
        c.markers.push_back(m);
    }
    return c;
}

namespace {

struct Builder {
    const DiagramSpec& spec;
    Window w;
    Frame frame{w};
    Diagram d;
    ContinuationOptions copts;

    Builder(const DiagramSpec& s, const Window& win) : spec(s), w(win) {
        copts.p1_min = w.p1_min;
        copts.p1_max = w.p1_max;
        copts.p2_min = w.p2_min;
        copts.p2_max = w.p2_max;
        const double diag = std::hypot(w.width1(), w.width2());
        copts.max_step = spec.continuation_step * diag;
        copts.initial_step = std::min(copts.initial_step, copts.max_step);
        d.spec = spec;
        d.spec.window = w;
    }

    bool wants(CurveKind k) const { return std::find(spec.kinds.begin(), spec.kinds.end(), k) != spec.kinds.end(); }
    ModelId model() const { return model_of(spec.params); }
    bool plane_is(const std::string& x, const std::string& y) const {
        return (spec.p1 == x && spec.p2 == y) || (spec.p1 == y && spec.p2 == x);
    }

    void add(Curve c) {
        if (c.param1 != spec.p1) swap_axes(c);
        for (auto& piece : clip_curve(c, w)) d.curves.push_back(std::move(piece));
    }

    bool covered(CurveKind k, double p1, double p2) const {
        const StateVector u = frame.to(p1, p2);
        for (const auto& c : d.curves)
            if (c.kind == k && polyline_distance(c, u, frame) < 1e-4) return true;
        return false;
    }

    struct Seed {
        CurveKind kind;
        ParameterSet params;
        StateVector state;
    };

    static bool on_branch(const Curve& c, double v, const StateVector& s) {
        for (std::size_t i = 0; i + 1 < c.points.size(); ++i) {
            const auto& a = c.points[i];
            const auto& b = c.points[i + 1];
            if ((a.p1 - v) * (b.p1 - v) > 0 || a.p1 == b.p1) continue;
            const double t = (v - a.p1) / (b.p1 - a.p1);
            const StateVector x = a.state + t * (b.state - a.state);
            if ((x - s).norm_inf() < 1e-3 * (1 + s.norm_inf())) return true;
        }
        return false;
    }

    // Equilibrium branches along rows and columns of the window; their folds and Hopf points seed
    // the two-parameter curves.
    std::vector<Seed> sweep() {
        std::vector<Seed> seeds;
        const int lines = spec.sweep_lines, starts = spec.sweep_starts;
        for (int dir = 0; dir < 2; ++dir) {
            const std::string& free = dir == 0 ? spec.p1 : spec.p2;
            const std::string& fixed = dir == 0 ? spec.p2 : spec.p1;
            const double flo = dir == 0 ? w.p1_min : w.p2_min, fhi = dir == 0 ? w.p1_max : w.p2_max;
            const double xlo = dir == 0 ? w.p2_min : w.p1_min, xhi = dir == 0 ? w.p2_max : w.p1_max;
            ContinuationOptions o = copts;
            o.p1_min = flo;
            o.p1_max = fhi;
            o.max_step = spec.continuation_step * (fhi - flo) * 2;
            o.initial_step = std::min(o.initial_step, o.max_step);
            for (int j = 0; j < lines; ++j) {
                const double fv = xlo + (xhi - xlo) * (j + 0.5) / lines;
                std::vector<Curve> line;
                for (int i = 0; i < starts; ++i) {
                    const double v = flo + (fhi - flo) * (i + 0.5) / starts;
                    const ParameterSet q = with_param(with_param(spec.params, fixed, fv), free, v);
                    std::vector<Equilibrium> eqs;
                    try {
                        eqs = find_equilibria(q);
                    } catch (const std::exception&) {
                        continue;
                    }
                    for (const auto& e : eqs) {
                        if (e.multiplicity > 1 || e.state.norm_inf() > copts.state_bound) continue;
                        if (std::any_of(line.begin(), line.end(),
                                        [&](const Curve& c) { return on_branch(c, v, e.state); }))
                            continue;
                        try {
                            line.push_back(continue_equilibrium_branch(q, free, e.state, o));
                        } catch (const std::exception&) {
                            continue;
                        }
                        for (const auto& ev : line.back().events)
                            if (ev.kind == CurveKind::SN || ev.kind == CurveKind::HB)
                                seeds.push_back({ev.kind, ev.params, ev.point.state});
                    }
                }
            }
        }
        return seeds;
    }

    // The fold of the axis equilibria, x1 (b1 + a11 x1) + e = 0, is the line e = b1^2 / (4 a11).
    void axis_fold() {
        if (model() != ModelId::Mlv || (spec.p1 != "e" && spec.p2 != "e")) return;
        const std::string& other = spec.p1 == "e" ? spec.p2 : spec.p1;
        if (other == "b1" || other == "a11") return;
        const auto& q = std::get<MlvParams>(spec.params);
        if (q.a11 == 0) return;
        const double e = q.b1 * q.b1 / (4 * q.a11);
        const double lo = spec.p1 == "e" ? w.p2_min : w.p1_min, hi = spec.p1 == "e" ? w.p2_max : w.p1_max;
        const double elo = spec.p1 == "e" ? w.p1_min : w.p2_min, ehi = spec.p1 == "e" ? w.p1_max : w.p2_max;
        if (e < elo || e > ehi) return;
        const ParameterSet seed = with_param(with_param(spec.params, "e", e), other, 0.5 * (lo + hi));
        add(continue_fold_curve(seed, spec.p1, spec.p2, StateVector(-q.b1 / (2 * q.a11), 0.0), copts));
    }

    void local_curves() {
        const bool sn = wants(CurveKind::SN), hb = wants(CurveKind::HB);
        if (sn) axis_fold();
        if (sn || hb) {
            for (const auto& s : sweep()) {
                if (s.kind == CurveKind::SN && !sn) continue;
                if (s.kind == CurveKind::HB && !hb) continue;
                const double x = get_param(s.params, spec.p1), y = get_param(s.params, spec.p2);
                if (covered(s.kind, x, y)) continue;
                try {
                    add(s.kind == CurveKind::SN ? continue_fold_curve(s.params, spec.p1, spec.p2, s.state, copts)
                                                : continue_hopf_curve(s.params, spec.p1, spec.p2, s.state, copts));
                } catch (const std::exception&) {
                    // a seed the corrector rejects is dropped; another sweep usually finds the curve
                }
            }
        }
        if (wants(CurveKind::TC)) tc_curves();
    }

    void tc_curves() {
        if (model() == ModelId::Mlv && plane_is("e", "b2")) {
            const auto& q = std::get<MlvParams>(spec.params);
            if (q.a21 == 0) return;
            const double b2lo = spec.p2 == "b2" ? w.p2_min : w.p1_min;
            const double b2hi = spec.p2 == "b2" ? w.p2_max : w.p1_max;
            const double x1a = -b2lo / q.a21, x1b = -b2hi / q.a21;
            add(tc_curve_mlv(q, std::min(x1a, x1b), std::max(x1a, x1b)));
        } else if (model() == ModelId::St2Min && plane_is("a", "b")) {
            const double blo = spec.p2 == "b" ? w.p2_min : w.p1_min;
            const double bhi = spec.p2 == "b" ? w.p2_max : w.p1_max;
            add(tc_curve_st2(std::get<St2Params>(spec.params), blo, bhi));
        }
    }

    void assign_ids() {
        std::map<CurveKind, int> count;
        for (auto& c : d.curves) {
            c.id = std::string(to_string(c.kind)) + std::to_string(++count[c.kind]);
            for (auto& m : c.markers) m.curve_id = c.id;
        }
    }

    void collect_points() {
        d.points.clear();
        for (const auto& c : d.curves)
            for (const auto& m : c.markers) {
                const StateVector u = frame.to(m.p1, m.p2);
                const bool dup = std::any_of(d.points.begin(), d.points.end(), [&](const CodimTwoPoint& o) {
                    return o.kind == m.kind && (frame.to(o.p1, o.p2) - u).norm2() < 1e-4;
                });
                if (!dup) d.points.push_back(m);
            }
    }

    void connection_curves() {
        const ModelId m = model();
        struct Job {
            CurveKind kind;
            ConnectionSpec spec;
            SideChooser choose;
            std::vector<CodimTwoKind> anchors;
        };
        std::vector<Job> jobs;
        double bound = spec.local_bound;
        if (bound <= 0) bound = 20 * std::sqrt(std::max(w.width1(), w.width2()));
        if (m == ModelId::Mlv) {
            if (wants(CurveKind::HET))
                jobs.push_back({CurveKind::HET, mlv_het_spec(spec.trace_budget, spec.connection_delta), choose_het_sides,
                                {CodimTwoKind::ST2}});
            if (wants(CurveKind::HOM))
                jobs.push_back({CurveKind::HOM, mlv_hom_spec(spec.trace_budget, spec.connection_delta), choose_hom_sides,
                                {CodimTwoKind::BT, CodimTwoKind::ST2}});
        } else if (m == ModelId::St2Min && wants(CurveKind::HET)) {
            jobs.push_back({CurveKind::HET, st2_het_spec(bound, spec.trace_budget, spec.connection_delta),
                            choose_st2_het_sides, {CodimTwoKind::ST2}});
        }
        ConnectionCurveOptions co = spec.connection;
        for (const auto& job : jobs) {
            for (const auto& a : d.points) {
                if (std::find(job.anchors.begin(), job.anchors.end(), a.kind) == job.anchors.end()) continue;
                auto curves = trace_connection_curves(spec.params, spec.p1, spec.p2, a, job.kind, job.spec, job.choose,
                                                      w, d.points, co);
                for (auto& c : curves) {
                    const auto& first = c.points.front();
                    if (covered(job.kind, first.p1, first.p2)) continue;  // already traced from its other end
                    d.curves.push_back(std::move(c));
                }
            }
        }
    }

    double sn_distance(double p1, double p2) const {
        double best = kInf;
        for (const auto& c : d.curves) {
            if (c.kind != CurveKind::SN) continue;
            for (std::size_t i = 0; i + 1 < c.points.size(); ++i) {
                const StateVector a(c.points[i].p1, c.points[i].p2), b(c.points[i + 1].p1, c.points[i + 1].p2);
                best = std::min(best, segment_distance(StateVector(p1, p2), a, b));
            }
        }
        return best;
    }

    void curve_ends() {
        for (const auto& c : d.curves) {
            if (c.kind != CurveKind::HET && c.kind != CurveKind::HOM) continue;
            for (const bool start : {true, false}) {
                const auto& bp = start ? c.points.front() : c.points.back();
                CurveEnd e;
                e.curve_id = c.id;
                e.at_start = start;
                e.p1 = bp.p1;
                e.p2 = bp.p2;
                e.point_distance = kInf;
                for (const auto& p : d.points) {
                    const double dist = std::hypot(p.p1 - bp.p1, p.p2 - bp.p2);
                    if (dist < e.point_distance) {
                        e.point_distance = dist;
                        e.nearest_point = p.kind;
                    }
                }
                e.sn_distance = sn_distance(bp.p1, bp.p2);
                e.leaves_window = !start && c.diagnostic == "left the window";
                d.ends.push_back(e);
            }
        }
        // connections ending on a fold away from any codim-2 point, and homoclinic curves ending on a
        // heteroclinic one
        const double scale = std::max(w.width1(), w.width2());
        for (const auto& e : d.ends) {
            if (e.at_start || e.leaves_window || e.point_distance < 1e-3 * scale) continue;
            const Curve* c = nullptr;
            for (const auto& x : d.curves)
                if (x.id == e.curve_id) c = &x;
            CodimTwoPoint m;
            m.p1 = e.p1;
            m.p2 = e.p2;
            m.state = c->points.back().state;
            m.curve_id = e.curve_id;
            if (c->kind == CurveKind::HET && e.sn_distance < 1e-3 * scale) {
                m.kind = CodimTwoKind::SNHET;
                m.residuals = {{"sn_distance", e.sn_distance}};
                d.points.push_back(m);
            } else if (c->kind == CurveKind::HOM) {
                for (const auto& h : d.curves)
                    if (h.kind == CurveKind::HET && polyline_distance(h, frame.to(e.p1, e.p2), frame) < 1e-3) {
                        m.kind = CodimTwoKind::T0;
                        m.residuals = {{"het_distance", polyline_distance(h, frame.to(e.p1, e.p2), frame) * scale}};
                        d.points.push_back(m);
                        break;
                    }
            }
        }
    }

    void sn0_segments() {
        SnSegmentOptions so = spec.sn0;
        if (model() == ModelId::St2Min && so.ball_radius == 0 && so.diagram_scale == 1)
            so.diagram_scale = std::sqrt(std::max(w.width1(), w.width2()));
        const int stride = std::max(1, spec.sn0_stride);
        for (const auto& c : d.curves) {
            if (c.kind != CurveKind::SN || c.points.empty()) continue;
            std::vector<std::pair<std::size_t, SnSegmentKind>> marks;
            for (std::size_t i = 0; i < c.points.size(); i += static_cast<std::size_t>(stride)) {
                SnSegmentKind k = SnSegmentKind::Unclassified;
                try {
                    k = classify_sn_segment(c.params_at(c.points[i]), c.points[i].state, so).kind;
                } catch (const std::exception&) {
                }
                marks.emplace_back(i, k);
            }
            std::size_t first = 0;
            for (std::size_t j = 1; j <= marks.size(); ++j) {
                if (j < marks.size() && marks[j].second == marks[first].second) continue;
                const std::size_t last = j < marks.size() ? marks[j].first - 1 : c.points.size() - 1;
                d.sn_segments.push_back({c.id, marks[first].first, last, marks[first].second});
                first = j;
            }
        }
    }

    void status() {
        for (const auto k : spec.kinds) {
            KindStatus s;
            s.kind = k;
            s.found = std::any_of(d.curves.begin(), d.curves.end(), [&](const Curve& c) { return c.kind == k; });
            if (!s.found) {
                switch (k) {
                    case CurveKind::SN: s.note = "no fold on any equilibrium sweep"; break;
                    case CurveKind::HB: s.note = "no Hopf point on any equilibrium sweep"; break;
                    case CurveKind::TC: s.note = "no transcritical curve in this parameter plane"; break;
                    default: s.note = "no sign change of the splitting around any anchor point"; break;
                }
            }
            d.status.push_back(s);
        }
    }

    void regions() {
        if (model() != ModelId::St2Min || !plane_is("a", "b") || !w.contains(0, 0)) return;
        const double half = 0.5 * std::min(w.width1(), w.width2());
        WalkOptions wo;
        wo.radius = std::min(wo.radius, 0.4 * half);
        St2Params base = std::get<St2Params>(spec.params);
        base.a = 0;
        base.b = 0;
        d.regions = walk_circle(base, wo);
    }

    Diagram run() {
        local_curves();
        assign_ids();
        collect_points();
        if (!spec.codim2) {
            for (auto& c : d.curves) c.markers.clear();
            d.points.clear();
        }
        connection_curves();
        assign_ids();
        if (spec.codim2) curve_ends();
        sn0_segments();
        status();
        regions();
        return std::move(d);
    }
};

}  // namespace

Diagram build_diagram(const DiagramSpec& spec) {
    validate_spec(spec);
    validate(spec.params);
    if (!spec.auto_window) return Builder(spec, spec.window).run();

    // first pass over the search window locates the codim-2 points
    DiagramSpec probe = spec;
    probe.kinds.clear();
    for (const auto k : spec.kinds)
        if (k == CurveKind::SN || k == CurveKind::TC || k == CurveKind::HB) probe.kinds.push_back(k);
    probe.codim2 = true;
    Builder b(probe, spec.window);
    b.local_curves();
    b.assign_ids();
    b.collect_points();
    if (b.d.points.empty()) return Builder(spec, spec.window).run();
    double lo1 = kInf, hi1 = -kInf, lo2 = kInf, hi2 = -kInf;
    for (const auto& p : b.d.points) {
        lo1 = std::min(lo1, p.p1);
        hi1 = std::max(hi1, p.p1);
        lo2 = std::min(lo2, p.p2);
        hi2 = std::max(hi2, p.p2);
    }
    const double s1 = hi1 > lo1 ? hi1 - lo1 : 0.1 * spec.window.width1();
    const double s2 = hi2 > lo2 ? hi2 - lo2 : 0.1 * spec.window.width2();
    Window w{lo1 - spec.margin * s1, hi1 + spec.margin * s1, lo2 - spec.margin * s2, hi2 + spec.margin * s2};
    return Builder(spec, w).run();
}

}  // namespace lvbif
