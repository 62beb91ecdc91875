#include "lvbif/integrator.hpp"

#include <algorithm>
#include <cmath>

namespace lvbif {

namespace {

constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784, a76 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200, e6 = 22.0 / 525,
                 e7 = -1.0 / 40;
constexpr double d1 = -12715105075.0 / 11282082432, d3 = 87487479700.0 / 32700410799,
                 d4 = -10690763975.0 / 1880347072, d5 = 701980252875.0 / 199316789632,
                 d6 = -1453857185.0 / 822651844, d7 = 69997945.0 / 29380423;

double error_norm(const StateVector& err, const StateVector& y0, const StateVector& y1, const IntegratorOptions& o) {
    double s = 0;
    for (int i = 0; i < y0.size(); ++i) {
        const double sk = o.atol + o.rtol * std::max(std::abs(y0[i]), std::abs(y1[i]));
        s += (err[i] / sk) * (err[i] / sk);
    }
    return std::sqrt(s / y0.size());
}

double initial_step(const Rhs& f, const StateVector& y0, const StateVector& f0, double dir, const IntegratorOptions& o) {
    double dnf = 0, dny = 0;
    for (int i = 0; i < y0.size(); ++i) {
        const double sk = o.atol + o.rtol * std::abs(y0[i]);
        dnf += (f0[i] / sk) * (f0[i] / sk);
        dny += (y0[i] / sk) * (y0[i] / sk);
    }
    double h = (dnf <= 1e-10 || dny <= 1e-10) ? 1e-6 : std::sqrt(dny / dnf) * 0.01;
    h = std::min(h, o.max_step);
    const StateVector f1 = f(y0 + (dir * h) * f0);
    double der2 = 0;
    for (int i = 0; i < y0.size(); ++i) {
        const double sk = o.atol + o.rtol * std::abs(y0[i]);
        der2 += ((f1[i] - f0[i]) / sk) * ((f1[i] - f0[i]) / sk);
    }
    der2 = std::sqrt(der2) / h;
    const double der12 = std::max(std::abs(der2), std::sqrt(dnf));
    const double h1 = der12 <= 1e-15 ? std::max(1e-6, std::abs(h) * 1e-3) : std::pow(0.01 / der12, 0.2);
    return std::min({100 * h, h1, o.max_step});
}

// Root of the event function inside one step, by Illinois-modified regula falsi.
double locate(const EventSpec& ev, const DenseStep& st, double ta, double ga, double tb, double gb) {
    int side = 0;
    for (int it = 0; it < 100; ++it) {
        const double tc = (ta * gb - tb * ga) / (gb - ga);
        const double gc = ev.g(tc, st.eval(tc));
        if (gc == 0 || std::abs(tb - ta) <= 4e-16 * std::max(1.0, std::abs(tc))) return tc;
        if ((gc > 0) == (gb > 0)) {
            tb = tc;
            gb = gc;
            if (side == -1) ga *= 0.5;
            side = -1;
        } else {
            ta = tc;
            ga = gc;
            if (side == 1) gb *= 0.5;
            side = 1;
        }
    }
    return 0.5 * (ta + tb);
}

bool fires(int direction, double g0, double g1) {
    if (g0 == 0) return false;
    const bool crossing = (g0 < 0 && g1 >= 0) || (g0 > 0 && g1 <= 0);
    if (!crossing) return false;
    if (direction > 0) return g0 < 0;
    if (direction < 0) return g0 > 0;
    return true;
}

}  // namespace

std::string_view to_string(TrajStatus s) {
    switch (s) {
        case TrajStatus::Completed: return "completed";
        case TrajStatus::Event: return "event";
        case TrajStatus::StepUnderflow: return "step-underflow";
        case TrajStatus::MaxSteps: return "max-steps";
        case TrajStatus::NonFinite: return "non-finite";
        case TrajStatus::Arclength: return "arclength-budget";
    }
    return "?";
}

StateVector DenseStep::eval(double t) const {
    const double th = (t - t0) / h, th1 = 1 - th;
    return r[0] + th * (r[1] + th1 * (r[2] + th * (r[3] + th1 * r[4])));
}

StateVector Trajectory::at(double time) const {
    if (steps.empty()) return y.front();
    for (const auto& st : steps) {
        const double lo = std::min(st.t0, st.t0 + st.h), hi = std::max(st.t0, st.t0 + st.h);
        if (time >= lo && time <= hi) return st.eval(time);
    }
    throw UsageError("Trajectory::at: time outside integrated range or dense output disabled");
}

Trajectory integrate(const Rhs& f, const StateVector& y0, double t0, double t1, const IntegratorOptions& o,
                     std::span<const EventSpec> events) {
    if (!(o.rtol > 0) || !(o.atol > 0)) throw UsageError("integrate: tolerances must be positive");
    if (!y0.finite()) throw UsageError("integrate: non-finite initial state");
    Trajectory tr;
    tr.t.push_back(t0);
    tr.y.push_back(y0);
    if (t1 == t0) return tr;
    const double dir = t1 > t0 ? 1.0 : -1.0;

    std::vector<double> gprev(events.size());
    for (std::size_t i = 0; i < events.size(); ++i) gprev[i] = events[i].g(t0, y0);

    double t = t0;
    StateVector y = y0;
    StateVector k1 = f(y);
    double h = o.fixed_step > 0 ? o.fixed_step
                                : (o.initial_step > 0 ? o.initial_step : initial_step(f, y, k1, dir, o));
    double facold = 1e-4;
    constexpr double beta = 0.04, safe = 0.9, facc1 = 5.0, facc2 = 0.1;
    const double expo1 = 0.2 - beta * 0.75;
    bool last_rejected = false;

    for (long n = 0;; ++n) {
        if (n >= o.max_steps) {
            tr.status = TrajStatus::MaxSteps;
            tr.diagnostic = "step budget exhausted at t=" + std::to_string(t);
            return tr;
        }
        if (h < 1e-14 * std::max(1.0, std::abs(t))) {
            tr.status = TrajStatus::StepUnderflow;
            tr.diagnostic = "step size underflow at t=" + std::to_string(t);
            return tr;
        }
        bool final_step = false;
        if ((t + dir * h - t1) * dir >= 0) {
            h = std::abs(t1 - t);
            final_step = true;
        }
        const double hs = dir * h;
        const StateVector k2 = f(y + hs * (a21 * k1));
        const StateVector k3 = f(y + hs * (a31 * k1 + a32 * k2));
        const StateVector k4 = f(y + hs * (a41 * k1 + a42 * k2 + a43 * k3));
        const StateVector k5 = f(y + hs * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
        const StateVector k6 = f(y + hs * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
        const StateVector y1 = y + hs * (a71 * k1 + a73 * k3 + a74 * k4 + a75 * k5 + a76 * k6);
        const StateVector k7 = f(y1);

        if (!y1.finite() || !k7.finite()) {
            if (o.fixed_step > 0 || h < 1e-10) {
                tr.status = TrajStatus::NonFinite;
                tr.diagnostic = "solution left the finite range near t=" + std::to_string(t);
                return tr;
            }
            h *= 0.1;
            ++tr.rejected;
            continue;
        }

        double err = 0;
        if (o.fixed_step <= 0) {
            const StateVector e = hs * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
            err = error_norm(e, y, y1, o);
        }
        if (err > 1.0) {
            const double fac11 = std::pow(err, expo1);
            h /= std::min(facc1, fac11 / safe);
            last_rejected = true;
            ++tr.rejected;
            continue;
        }

        DenseStep st;
        st.t0 = t;
        st.h = hs;
        const StateVector ydiff = y1 - y;
        const StateVector bspl = hs * k1 - ydiff;
        st.r = {y, ydiff, bspl, ydiff - hs * k7 - bspl,
                hs * (d1 * k1 + d3 * k3 + d4 * k4 + d5 * k5 + d6 * k6 + d7 * k7)};
        const double tnew = final_step ? t1 : t + hs;

        // events inside this step: earliest terminal one wins
        int term_idx = -1;
        double term_t = tnew;
        std::vector<EventHit> hits;
        std::vector<double> gnew(events.size());
        for (std::size_t i = 0; i < events.size(); ++i) {
            gnew[i] = events[i].g(tnew, y1);
            if (!fires(events[i].direction, gprev[i], gnew[i])) continue;
            const double te = gnew[i] == 0 ? tnew : locate(events[i], st, t, gprev[i], tnew, gnew[i]);
            hits.push_back({static_cast<int>(i), te, st.eval(te)});
            if (events[i].terminal && (term_idx < 0 || (te - term_t) * dir < 0)) {
                term_t = te;
                term_idx = static_cast<int>(i);
            }
        }
        std::sort(hits.begin(), hits.end(), [&](const auto& a, const auto& b) { return (a.t - b.t) * dir < 0; });
        for (const auto& hit : hits)
            if (term_idx < 0 || (hit.t - term_t) * dir <= 0) tr.events.push_back(hit);

        const StateVector yend = term_idx >= 0 ? st.eval(term_t) : y1;
        const double tend = term_idx >= 0 ? term_t : tnew;
        tr.arclength += (yend - y).norm2();
        if (o.keep_dense) tr.steps.push_back(st);
        tr.t.push_back(tend);
        tr.y.push_back(yend);
        if (term_idx >= 0) {
            tr.status = TrajStatus::Event;
            return tr;
        }
        if (final_step) return tr;
        if (tr.arclength > o.max_arclength) {
            tr.status = TrajStatus::Arclength;
            return tr;
        }

        gprev = std::move(gnew);
        t = tnew;
        y = y1;
        k1 = k7;
        if (o.fixed_step > 0) continue;
        const double fac11 = std::pow(err, expo1);
        double fac = fac11 / std::pow(facold, beta);
        fac = std::max(facc2, std::min(facc1, fac / safe));
        double hnew = h / fac;
        if (last_rejected) hnew = std::min(hnew, h);
        facold = std::max(err, 1e-4);
        last_rejected = false;
        h = std::min(hnew, o.max_step);
    }
}

Trajectory integrate(const ParameterSet& p, const StateVector& y0, double t0, double t1, const IntegratorOptions& opts,
                     std::span<const EventSpec> events) {
    if (y0.size() != dimension(p)) throw UsageError("integrate: state dimension does not match model");
    return integrate([&p](const StateVector& s) { return eval_field(p, s); }, y0, t0, t1, opts, events);
}

}  // namespace lvbif
