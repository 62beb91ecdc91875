#include "lvbif/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

namespace lvbif {

namespace {

[[noreturn]] void config_error(const std::string& field, const std::string& what) {
    throw UsageError("config: " + field + ": " + what);
}

void check_keys(const Json& obj, const std::string& where, std::initializer_list<const char*> allowed) {
    if (!obj.is_object()) config_error(where, "expected an object");
    for (const auto& [k, v] : obj.items())
        if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return k == a; }))
            config_error(where.empty() ? k : where + "." + k, "unknown key");
}

double num(const Json& obj, const std::string& where, const char* key, double fallback) {
    if (!obj.contains(key)) return fallback;
    const auto& v = obj.at(key);
    if (!v.is_number()) config_error(where + "." + key, "expected a number");
    return v.get<double>();
}

int integer(const Json& obj, const std::string& where, const char* key, int fallback) {
    if (!obj.contains(key)) return fallback;
    const auto& v = obj.at(key);
    if (!v.is_number_integer()) config_error(where + "." + key, "expected an integer");
    return v.get<int>();
}

bool flag(const Json& obj, const std::string& where, const char* key, bool fallback) {
    if (!obj.contains(key)) return fallback;
    const auto& v = obj.at(key);
    if (!v.is_boolean()) config_error(where + "." + key, "expected true or false");
    return v.get<bool>();
}

std::string text(const Json& obj, const std::string& where, const char* key, const std::string& fallback) {
    if (!obj.contains(key)) return fallback;
    const auto& v = obj.at(key);
    if (!v.is_string()) config_error(where + "." + key, "expected a string");
    return v.get<std::string>();
}

std::pair<double, double> range(const Json& obj, const std::string& where, const char* key,
                                std::pair<double, double> fallback) {
    if (!obj.contains(key)) return fallback;
    const auto& v = obj.at(key);
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
        config_error(where + "." + key, "expected [min, max]");
    const double lo = v[0].get<double>(), hi = v[1].get<double>();
    if (!(hi > lo)) config_error(where + "." + key, "empty range");
    return {lo, hi};
}

DiagramSpec parse_diagram(const Json& j, const ParameterSet& params) {
    const std::string w = "diagram";
    check_keys(j, w,
               {"p1", "p2", "window", "auto_window", "margin", "kinds", "codim2", "sweep_lines", "sweep_starts",
                "continuation_step", "connection", "trace_budget", "connection_delta", "sn0", "sn0_stride",
                "local_bound"});
    DiagramSpec s;
    s.params = params;
    s.p1 = text(j, w, "p1", s.p1);
    s.p2 = text(j, w, "p2", s.p2);
    if (j.contains("window")) {
        const auto& win = j.at("window");
        check_keys(win, w + ".window", {"p1", "p2"});
        const auto r1 = range(win, w + ".window", "p1", {s.window.p1_min, s.window.p1_max});
        const auto r2 = range(win, w + ".window", "p2", {s.window.p2_min, s.window.p2_max});
        s.window = {r1.first, r1.second, r2.first, r2.second};
    }
    s.auto_window = flag(j, w, "auto_window", s.auto_window);
    s.margin = num(j, w, "margin", s.margin);
    if (j.contains("kinds")) {
        const auto& k = j.at("kinds");
        if (!k.is_array()) config_error(w + ".kinds", "expected a list of curve kinds");
        s.kinds.clear();
        for (const auto& x : k) {
            if (!x.is_string()) config_error(w + ".kinds", "expected a list of curve kinds");
            try {
                s.kinds.push_back(curve_kind_from_string(x.get<std::string>()));
            } catch (const UsageError&) {
                config_error(w + ".kinds", "unknown curve kind '" + x.get<std::string>() + "'");
            }
        }
    }
    s.codim2 = flag(j, w, "codim2", s.codim2);
    s.sweep_lines = integer(j, w, "sweep_lines", s.sweep_lines);
    s.sweep_starts = integer(j, w, "sweep_starts", s.sweep_starts);
    s.continuation_step = num(j, w, "continuation_step", s.continuation_step);
    if (j.contains("connection")) {
        const auto& c = j.at("connection");
        const std::string cw = w + ".connection";
        check_keys(c, cw, {"anchor_radius", "circle_samples", "max_step", "min_step", "growth", "max_points",
                           "join_distance"});
        auto& o = s.connection;
        o.anchor_radius = num(c, cw, "anchor_radius", o.anchor_radius);
        o.circle_samples = integer(c, cw, "circle_samples", o.circle_samples);
        o.max_step = num(c, cw, "max_step", o.max_step);
        o.min_step = num(c, cw, "min_step", o.min_step);
        o.growth = num(c, cw, "growth", o.growth);
        o.max_points = integer(c, cw, "max_points", o.max_points);
        o.join_distance = num(c, cw, "join_distance", o.join_distance);
    }
    if (j.contains("trace_budget")) {
        const auto& b = j.at("trace_budget");
        const std::string bw = w + ".trace_budget";
        check_keys(b, bw, {"time", "arclength", "state_bound"});
        s.trace_budget.time = num(b, bw, "time", s.trace_budget.time);
        s.trace_budget.arclength = num(b, bw, "arclength", s.trace_budget.arclength);
        s.trace_budget.state_bound = num(b, bw, "state_bound", s.trace_budget.state_bound);
    }
    s.connection_delta = num(j, w, "connection_delta", s.connection_delta);
    if (j.contains("sn0")) {
        const auto& b = j.at("sn0");
        const std::string bw = w + ".sn0";
        check_keys(b, bw, {"ball_radius", "diagram_scale", "time_budget", "start_factor"});
        s.sn0.ball_radius = num(b, bw, "ball_radius", s.sn0.ball_radius);
        s.sn0.diagram_scale = num(b, bw, "diagram_scale", s.sn0.diagram_scale);
        s.sn0.time_budget = num(b, bw, "time_budget", s.sn0.time_budget);
        s.sn0.start_factor = num(b, bw, "start_factor", s.sn0.start_factor);
    }
    s.sn0_stride = integer(j, w, "sn0_stride", s.sn0_stride);
    s.local_bound = num(j, w, "local_bound", s.local_bound);
    validate_spec(s);
    return s;
}

PortraitSpec parse_portrait(const Json& j, const ParameterSet& params) {
    const std::string w = "portrait";
    check_keys(j, w, {"window", "seeds", "grid", "t_max", "backward", "manifolds", "cycles", "manifold_delta"});
    PortraitSpec s;
    s.params = params;
    if (j.contains("window")) {
        const auto& win = j.at("window");
        check_keys(win, w + ".window", {"x1", "x2"});
        std::tie(s.x1_min, s.x1_max) = range(win, w + ".window", "x1", {s.x1_min, s.x1_max});
        std::tie(s.x2_min, s.x2_max) = range(win, w + ".window", "x2", {s.x2_min, s.x2_max});
    }
    if (j.contains("seeds")) {
        const auto& seeds = j.at("seeds");
        if (!seeds.is_array()) config_error(w + ".seeds", "expected a list of [x1, x2]");
        for (const auto& x : seeds) {
            if (!x.is_array() || x.size() != 2 || !x[0].is_number() || !x[1].is_number())
                config_error(w + ".seeds", "expected a list of [x1, x2]");
            s.seeds.emplace_back(x[0].get<double>(), x[1].get<double>());
        }
    }
    s.grid = integer(j, w, "grid", s.grid);
    s.t_max = num(j, w, "t_max", s.t_max);
    s.backward = flag(j, w, "backward", s.backward);
    s.manifolds = flag(j, w, "manifolds", s.manifolds);
    s.cycles = flag(j, w, "cycles", s.cycles);
    s.manifold_delta = num(j, w, "manifold_delta", s.manifold_delta);
    if (s.grid < 0) config_error(w + ".grid", "must not be negative");
    if (!(s.t_max > 0)) config_error(w + ".t_max", "must be positive");
    return s;
}

// ---- svg helpers ----

struct Plot {
    double x0, x1, y0, y1;  // data window
    double left = 80, top = 40, width = 640, height = 480;
    double sx(double x) const { return left + (x - x0) / (x1 - x0) * width; }
    double sy(double y) const { return top + height - (y - y0) / (y1 - y0) * height; }
};

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

std::string escape(const std::string& s) {
    std::string out;
    for (const char c : s) {
        if (c == '<') out += "&lt;";
        else if (c == '>') out += "&gt;";
        else if (c == '&') out += "&amp;";
        else out += c;
    }
    return out;
}

void svg_header(std::ostringstream& os, const Plot& p, const std::string& title, const std::string& xl,
                const std::string& yl) {
    const double W = p.left + p.width + 140, H = p.top + p.height + 60;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" viewBox=\"0 0 "
       << W << " " << H << "\">\n";
    os << "<rect x=\"0\" y=\"0\" width=\"" << W << "\" height=\"" << H << "\" fill=\"white\"/>\n";
    os << "<defs><clipPath id=\"plot\"><rect x=\"" << p.left << "\" y=\"" << p.top << "\" width=\"" << p.width
       << "\" height=\"" << p.height << "\"/></clipPath></defs>\n";
    os << "<rect x=\"" << p.left << "\" y=\"" << p.top << "\" width=\"" << p.width << "\" height=\"" << p.height
       << "\" fill=\"none\" stroke=\"black\"/>\n";
    for (int i = 0; i <= 4; ++i) {
        const double xv = p.x0 + (p.x1 - p.x0) * i / 4, yv = p.y0 + (p.y1 - p.y0) * i / 4;
        const std::string X = fmt("%.2f", p.sx(xv)), Y = fmt("%.2f", p.sy(yv));
        const std::string bottom = fmt("%.2f", p.top + p.height), left = fmt("%.2f", p.left);
        os << "<line x1=\"" << X << "\" y1=\"" << bottom << "\" x2=\"" << X << "\" y2=\"" << fmt("%.2f", p.top + p.height + 5)
           << "\" stroke=\"black\"/>\n";
        os << "<text x=\"" << X << "\" y=\"" << fmt("%.2f", p.top + p.height + 20)
           << "\" font-size=\"12\" text-anchor=\"middle\">" << fmt("%.4g", xv) << "</text>\n";
        os << "<line x1=\"" << fmt("%.2f", p.left - 5) << "\" y1=\"" << Y << "\" x2=\"" << left << "\" y2=\"" << Y
           << "\" stroke=\"black\"/>\n";
        os << "<text x=\"" << fmt("%.2f", p.left - 8) << "\" y=\"" << fmt("%.2f", p.sy(yv) + 4)
           << "\" font-size=\"12\" text-anchor=\"end\">" << fmt("%.4g", yv) << "</text>\n";
    }
    os << "<text x=\"" << fmt("%.2f", p.left + p.width / 2) << "\" y=\"" << fmt("%.2f", p.top + p.height + 42)
       << "\" font-size=\"14\" text-anchor=\"middle\">" << escape(xl) << "</text>\n";
    os << "<text x=\"20\" y=\"" << fmt("%.2f", p.top + p.height / 2) << "\" font-size=\"14\" text-anchor=\"middle\">"
       << escape(yl) << "</text>\n";
    os << "<text x=\"" << fmt("%.2f", p.left) << "\" y=\"24\" font-size=\"14\">" << escape(title) << "</text>\n";
}

void polyline(std::ostringstream& os, const Plot& p, const std::vector<std::pair<double, double>>& pts,
              const std::string& colour, double width, bool dashed) {
    if (pts.size() < 2) return;
    os << "<polyline clip-path=\"url(#plot)\" fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"" << width
       << "\"";
    if (dashed) os << " stroke-dasharray=\"6 4\"";
    os << " points=\"";
    for (std::size_t i = 0; i < pts.size(); ++i) {
        if (i) os << ' ';
        os << fmt("%.2f", p.sx(pts[i].first)) << ',' << fmt("%.2f", p.sy(pts[i].second));
    }
    os << "\"/>\n";
}

std::string colour_of(CurveKind k) {
    switch (k) {
        case CurveKind::SN: return "#1f77b4";
        case CurveKind::TC: return "#2ca02c";
        case CurveKind::HB:
        case CurveKind::NS: return "#d62728";
        case CurveKind::HET: return "#9467bd";
        case CurveKind::HOM: return "#8c564b";
        case CurveKind::EQ: return "#7f7f7f";
    }
    return "black";
}

Json num_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

Json state_json(const StateVector& s) {
    Json a = Json::array();
    for (int i = 0; i < s.size(); ++i) a.push_back(num_or_null(s[i]));
    return a;
}

}  // namespace

// ---- configuration ----

Json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("config: cannot open '" + path + "'");
    try {
        return Json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw UsageError("config: '" + path + "' is not valid JSON: " + e.what());
    }
}

void apply_override(Json& config, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0) throw UsageError("override '" + assignment + "': expected key=value");
    const std::string key = assignment.substr(0, eq), value = assignment.substr(eq + 1);
    Json v;
    try {
        v = Json::parse(value);
    } catch (const nlohmann::json::parse_error&) {
        v = value;
    }
    Json* node = &config;
    std::size_t start = 0;
    while (true) {
        const auto dot = key.find('.', start);
        const std::string part = key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
        if (part.empty()) throw UsageError("override '" + assignment + "': empty key segment");
        if (!node->is_object()) *node = Json::object();
        if (dot == std::string::npos) {
            (*node)[part] = v;
            return;
        }
        node = &(*node)[part];
        start = dot + 1;
    }
}

ParameterSet parse_params(const Json& config) {
    if (!config.is_object()) config_error("", "expected a JSON object");
    if (!config.contains("model")) config_error("model", "missing");
    if (!config.at("model").is_string()) config_error("model", "expected a string");
    ModelId id;
    try {
        id = model_from_string(config.at("model").get<std::string>());
    } catch (const std::exception&) {
        config_error("model", "unknown model '" + config.at("model").get<std::string>() + "'");
    }
    ParameterSet p = default_params(id);
    if (!config.contains("params")) return p;
    const auto& ps = config.at("params");
    if (!ps.is_object()) config_error("params", "expected an object");
    const auto names = parameter_names(id);
    for (const auto& [k, v] : ps.items()) {
        if (k == "extension" && id == ModelId::St2Min) {
            if (!v.is_boolean()) config_error("params.extension", "expected true or false");
            std::get<St2Params>(p).extension = v.get<bool>();
            continue;
        }
        if (std::find(names.begin(), names.end(), k) == names.end())
            config_error("params." + k, "unknown parameter for model " + std::string(to_string(id)));
        if (!v.is_number()) config_error("params." + k, "expected a number");
        set_param(p, k, v.get<double>());
    }
    try {
        validate(p);
    } catch (const std::exception& e) {
        config_error("params", e.what());
    }
    return p;
}

RunConfig parse_config(const Json& config) {
    check_keys(config, "", {"model", "params", "diagram", "portrait", "output_dir", "description"});
    RunConfig rc;
    rc.raw = config;
    rc.params = parse_params(config);
    if (config.contains("diagram")) {
        rc.diagram = parse_diagram(config.at("diagram"), rc.params);
        rc.has_diagram = true;
    }
    if (config.contains("portrait")) {
        rc.portrait = parse_portrait(config.at("portrait"), rc.params);
        rc.has_portrait = true;
    }
    rc.out_dir = text(config, "", "output_dir", rc.out_dir);
    return rc;
}

// ---- curves.csv ----

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    return fmt("%.17g", v);
}

void write_curves_csv(std::ostream& os, const std::vector<Curve>& curves) {
    os << kCurvesHeader << '\n';
    for (const auto& c : curves)
        for (const auto& bp : c.points) {
            const auto& e = bp.eigen;
            const double re2 = e.count > 1 ? e.re[1] : std::nan(""), im2 = e.count > 1 ? e.im[1] : std::nan("");
            const double re1 = e.count > 0 ? e.re[0] : std::nan(""), im1 = e.count > 0 ? e.im[0] : std::nan("");
            os << c.id << ',' << to_string(bp.kind) << ',' << c.param1 << ',' << format_double(bp.p1) << ','
               << c.param2 << ',' << format_double(bp.p2) << ',' << format_double(bp.state[0]) << ','
               << format_double(bp.state.size() > 1 ? bp.state[1] : std::nan("")) << ',' << format_double(re1) << ','
               << format_double(im1) << ',' << format_double(re2) << ',' << format_double(im2) << '\n';
        }
}

std::vector<CsvRow> read_curves_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line) || line != kCurvesHeader) throw UsageError("curves.csv: unexpected header");
    std::vector<CsvRow> rows;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::vector<std::string> f;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) f.push_back(cell);
        if (f.size() != 12) throw UsageError("curves.csv: expected 12 columns in '" + line + "'");
        auto d = [](const std::string& s) { return std::strtod(s.c_str(), nullptr); };
        rows.push_back({f[0], f[1], f[2], f[4], d(f[3]), d(f[5]), d(f[6]), d(f[7]), d(f[8]), d(f[9]), d(f[10]),
                        d(f[11])});
    }
    return rows;
}

// ---- points.json ----

Json equilibrium_json(const Equilibrium& e) {
    Json j;
    j["state"] = state_json(e.state);
    j["classification"] = std::string(to_string(e.classification));
    Json eig = Json::array();
    for (int i = 0; i < e.eigen.count; ++i) eig.push_back({num_or_null(e.eigen.re[i]), num_or_null(e.eigen.im[i])});
    j["eigenvalues"] = eig;
    j["trace"] = num_or_null(e.eigen.trace);
    j["det"] = num_or_null(e.eigen.det);
    j["multiplicity"] = e.multiplicity;
    j["residual"] = num_or_null(e.residual);
    j["on_axis"] = e.on_axis;
    j["outside_first_quadrant"] = e.outside_first_quadrant;
    return j;
}

Json params_json(const ParameterSet& p) {
    Json j;
    for (const auto& n : parameter_names(model_of(p))) j[n] = get_param(p, n);
    if (const auto* s = std::get_if<St2Params>(&p)) j["extension"] = s->extension;
    return j;
}

Json equilibria_report(const ParameterSet& p) {
    Json j;
    j["model"] = std::string(to_string(model_of(p)));
    j["params"] = params_json(p);
    Json eqs = Json::array();
    for (const auto& e : find_equilibria(p)) eqs.push_back(equilibrium_json(e));
    j["count"] = eqs.size();
    j["equilibria"] = eqs;
    return j;
}

Json verify_json(const SuiteReport& r) {
    Json j;
    j["suite"] = r.suite;
    j["pass"] = r.pass();
    j["seconds"] = r.seconds;
    Json cs = Json::array();
    for (const auto& c : r.criteria) {
        Json checks = Json::array();
        for (const auto& k : c.checks)
            checks.push_back({{"name", k.name},
                              {"pass", k.pass},
                              {"value", num_or_null(k.value)},
                              {"tolerance", num_or_null(k.tolerance)},
                              {"detail", k.detail}});
        cs.push_back({{"criterion", c.number}, {"title", c.title}, {"pass", c.pass()}, {"checks", checks}});
    }
    j["criteria"] = cs;
    Json failed = Json::array();
    for (const auto& c : r.criteria)
        for (const auto& k : c.checks)
            if (!k.pass) failed.push_back(k.name);
    j["failed_checks"] = failed;
    return j;
}

Json points_json(const Diagram& d) {
    Json j;
    j["model"] = std::string(to_string(model_of(d.spec.params)));
    j["params"] = params_json(d.spec.params);
    j["param1"] = d.spec.p1;
    j["param2"] = d.spec.p2;
    const auto& w = d.spec.window;
    j["window"] = {{"p1", {w.p1_min, w.p1_max}}, {"p2", {w.p2_min, w.p2_max}}};
    Json pts = Json::array();
    for (const auto& p : d.points) {
        Json r;
        for (const auto& [k, v] : p.residuals) r[k] = num_or_null(v);
        pts.push_back({{"kind", std::string(to_string(p.kind))},
                       {"p1", num_or_null(p.p1)},
                       {"p2", num_or_null(p.p2)},
                       {"state", state_json(p.state)},
                       {"curve_id", p.curve_id},
                       {"residuals", r}});
    }
    j["points"] = pts;
    Json kinds = Json::array(), missing = Json::array();
    for (const auto& s : d.status) {
        kinds.push_back({{"kind", std::string(to_string(s.kind))}, {"status", s.found ? "found" : "not found"},
                         {"note", s.note}});
        if (!s.found) missing.push_back(std::string(to_string(s.kind)));
    }
    j["curve_kinds"] = kinds;
    j["not_found"] = missing;
    Json curves = Json::array();
    for (const auto& c : d.curves)
        curves.push_back({{"curve_id", c.id},
                          {"kind", std::string(to_string(c.kind))},
                          {"points", c.points.size()},
                          {"stopped", c.diagnostic}});
    j["curves"] = curves;
    Json segs = Json::array();
    for (const auto& s : d.sn_segments)
        segs.push_back({{"curve_id", s.curve_id}, {"first", s.first}, {"last", s.last},
                        {"kind", std::string(to_string(s.kind))}});
    j["sn_segments"] = segs;
    Json ends = Json::array();
    for (const auto& e : d.ends)
        ends.push_back({{"curve_id", e.curve_id},
                        {"end", e.at_start ? "start" : "end"},
                        {"p1", e.p1},
                        {"p2", e.p2},
                        {"nearest_point", e.nearest_point ? Json(std::string(to_string(*e.nearest_point))) : Json()},
                        {"point_distance", num_or_null(e.point_distance)},
                        {"sn_distance", num_or_null(e.sn_distance)},
                        {"leaves_window", e.leaves_window}});
    j["connection_ends"] = ends;
    if (d.regions) {
        Json walk;
        walk["local_bound"] = d.regions->local_bound;
        Json evs = Json::array();
        for (const auto& e : d.regions->events)
            evs.push_back({{"kind", std::string(to_string(e.kind))}, {"psi", e.psi}, {"detail", e.detail}});
        walk["events"] = evs;
        Json regs = Json::array();
        for (const auto& r : d.regions->regions) {
            Json eqs = Json::array();
            for (const auto& e : r.equilibria) eqs.push_back(equilibrium_json(e));
            Json cyc = {{"present", r.cycle.present}, {"diagnostic", r.cycle.diagnostic}};
            if (r.cycle.record) {
                cyc["period"] = r.cycle.record->period;
                cyc["multiplier"] = r.cycle.record->multiplier;
                cyc["stable"] = r.cycle.record->stable;
            }
            regs.push_back({{"psi_lo", r.psi_lo}, {"psi_hi", r.psi_hi}, {"psi", r.psi}, {"equilibria", eqs},
                            {"cycle", cyc}});
        }
        walk["regions"] = regs;
        j["regions"] = walk;
    }
    return j;
}

// ---- diagram.svg ----

std::string diagram_svg(const Diagram& d) {
    const auto& w = d.spec.window;
    const Plot p{w.p1_min, w.p1_max, w.p2_min, w.p2_max};
    std::ostringstream os;
    svg_header(os, p, std::string(to_string(model_of(d.spec.params))) + " bifurcation diagram", d.spec.p1, d.spec.p2);
    for (const auto& c : d.curves) {
        // runs of equal point kind, so neutral-saddle stretches of Hopf curves are drawn dashed
        std::size_t i = 0;
        while (i < c.points.size()) {
            std::size_t j = i;
            std::vector<std::pair<double, double>> pts;
            while (j < c.points.size() && c.points[j].kind == c.points[i].kind) {
                pts.emplace_back(c.points[j].p1, c.points[j].p2);
                ++j;
            }
            if (j < c.points.size()) pts.emplace_back(c.points[j].p1, c.points[j].p2);
            polyline(os, p, pts, colour_of(c.points[i].kind), 1.5, c.points[i].kind == CurveKind::NS);
            i = j;
        }
        if (!c.points.empty()) {
            const auto& m = c.points[c.points.size() / 2];
            os << "<text x=\"" << fmt("%.2f", p.sx(m.p1) + 4) << "\" y=\"" << fmt("%.2f", p.sy(m.p2) - 4)
               << "\" font-size=\"12\" fill=\"" << colour_of(c.kind) << "\">" << escape(c.id) << "</text>\n";
        }
    }
    for (const auto& s : d.sn_segments) {
        if (s.kind != SnSegmentKind::SN0) continue;
        for (const auto& c : d.curves) {
            if (c.id != s.curve_id) continue;
            std::vector<std::pair<double, double>> pts;
            for (std::size_t i = s.first; i <= s.last && i < c.points.size(); ++i)
                pts.emplace_back(c.points[i].p1, c.points[i].p2);
            polyline(os, p, pts, "#ff7f0e", 4, false);
        }
    }
    if (d.regions && model_of(d.spec.params) == ModelId::St2Min) {
        // walk events on their circle
        const double R = d.regions->radius;
        for (const auto& e : d.regions->events) {
            const double psi = e.psi * M_PI / 180;
            double a = -R * std::cos(psi), b = -R * std::sin(psi);
            if (d.spec.p1 != "a") std::swap(a, b);
            os << "<circle cx=\"" << fmt("%.2f", p.sx(a)) << "\" cy=\"" << fmt("%.2f", p.sy(b))
               << "\" r=\"2.5\" fill=\"#17becf\"/>\n";
            os << "<text x=\"" << fmt("%.2f", p.sx(a) + 4) << "\" y=\"" << fmt("%.2f", p.sy(b) + 12)
               << "\" font-size=\"10\" fill=\"#17becf\">" << to_string(e.kind) << "</text>\n";
        }
    }
    for (const auto& pt : d.points) {
        if (!w.contains(pt.p1, pt.p2)) continue;
        os << "<circle cx=\"" << fmt("%.2f", p.sx(pt.p1)) << "\" cy=\"" << fmt("%.2f", p.sy(pt.p2))
           << "\" r=\"4\" fill=\"black\"/>\n";
        os << "<text x=\"" << fmt("%.2f", p.sx(pt.p1) + 6) << "\" y=\"" << fmt("%.2f", p.sy(pt.p2) - 6)
           << "\" font-size=\"13\" font-weight=\"bold\">" << to_string(pt.kind) << "</text>\n";
    }
    // legend
    double y = p.top + 10;
    const double lx = p.left + p.width + 15;
    for (const auto k : {CurveKind::SN, CurveKind::TC, CurveKind::HB, CurveKind::NS, CurveKind::HET, CurveKind::HOM}) {
        os << "<line x1=\"" << lx << "\" y1=\"" << y << "\" x2=\"" << lx + 25 << "\" y2=\"" << y << "\" stroke=\""
           << colour_of(k) << "\" stroke-width=\"2\"" << (k == CurveKind::NS ? " stroke-dasharray=\"6 4\"" : "")
           << "/>\n";
        os << "<text x=\"" << lx + 32 << "\" y=\"" << y + 4 << "\" font-size=\"12\">" << to_string(k) << "</text>\n";
        y += 18;
    }
    os << "<line x1=\"" << lx << "\" y1=\"" << y << "\" x2=\"" << lx + 25 << "\" y2=\"" << y
       << "\" stroke=\"#ff7f0e\" stroke-width=\"4\"/>\n";
    os << "<text x=\"" << lx + 32 << "\" y=\"" << y + 4 << "\" font-size=\"12\">SN0</text>\n";
    os << "</svg>\n";
    return os.str();
}

// ---- portraits ----

void write_trajectories_csv(std::ostream& os, const Portrait& p) {
    os << "curve_id,kind,index,t,x1,x2,note\n";
    for (const auto& c : p.curves) {
        for (std::size_t i = 0; i < c.y.size(); ++i)
            os << c.id << ',' << c.kind << ',' << i << ',' << format_double(c.t[i]) << ','
               << format_double(c.y[i][0]) << ',' << format_double(c.y[i][1]) << ",\n";
        if (!c.diagnostic.empty()) {
            std::string note = c.diagnostic;
            std::replace(note.begin(), note.end(), ',', ';');
            const double t = c.t.empty() ? std::nan("") : c.t.back();
            const StateVector y = c.y.empty() ? StateVector(std::nan(""), std::nan("")) : c.y.back();
            os << c.id << ',' << c.kind << ",-1," << format_double(t) << ',' << format_double(y[0]) << ','
               << format_double(y[1]) << ',' << note << '\n';
        }
    }
}

std::string portrait_svg(const Portrait& pt) {
    const auto& s = pt.spec;
    const Plot p{s.x1_min, s.x1_max, s.x2_min, s.x2_max};
    std::ostringstream os;
    svg_header(os, p, std::string(to_string(model_of(s.params))) + " phase portrait", "x1", "x2");
    auto style = [](const std::string& kind) -> std::pair<std::string, double> {
        if (kind == "orbit") return {"#555555", 0.8};
        if (kind == "orbit_backward") return {"#aaaaaa", 0.8};
        if (kind == "unstable") return {"#d62728", 1.5};
        if (kind == "stable") return {"#1f77b4", 1.5};
        if (kind == "cycle") return {"#2ca02c", 2.5};
        return {"black", 1};
    };
    for (const auto& c : pt.curves) {
        std::vector<std::pair<double, double>> pts;
        for (const auto& y : c.y) pts.emplace_back(y[0], y[1]);
        const auto [col, wid] = style(c.kind);
        polyline(os, p, pts, col, wid, false);
    }
    for (const auto& e : pt.equilibria) {
        std::string fill = "#7f7f7f";
        if (e.classification == EqClass::Sink) fill = "black";
        if (e.classification == EqClass::Source) fill = "white";
        if (e.classification == EqClass::Saddle) fill = "#ff7f0e";
        os << "<circle cx=\"" << fmt("%.2f", p.sx(e.state[0])) << "\" cy=\"" << fmt("%.2f", p.sy(e.state[1]))
           << "\" r=\"4\" fill=\"" << fill << "\" stroke=\"black\"/>\n";
        os << "<text x=\"" << fmt("%.2f", p.sx(e.state[0]) + 6) << "\" y=\"" << fmt("%.2f", p.sy(e.state[1]) - 6)
           << "\" font-size=\"11\">" << to_string(e.classification) << "</text>\n";
    }
    os << "</svg>\n";
    return os.str();
}

}  // namespace lvbif
