// Command-line front end: equilibria, diagram, portrait, verify.
// Exit codes: 0 success, 1 verification failure, 2 usage or config error, 3 numerical failure.
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "lvbif/io.hpp"
#include "lvbif/verify.hpp"

namespace fs = std::filesystem;
using namespace lvbif;

namespace {

constexpr int kExitVerify = 1, kExitUsage = 2, kExitNumerical = 3;

struct Options {
    std::string config;
    std::string out_dir;
    std::string suite = "all";
    std::string config_dir = LVBIF_CONFIG_DIR;
    std::vector<std::string> overrides;
};

RunConfig load(const Options& o) {
    Json j = load_json_file(o.config);
    for (const auto& a : o.overrides) apply_override(j, a);
    return parse_config(j);
}

fs::path output_dir(const Options& o, const RunConfig& rc) {
    const fs::path dir = o.out_dir.empty() ? fs::path(rc.out_dir) : fs::path(o.out_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw UsageError("cannot create output directory '" + dir.string() + "': " + ec.message());
    return dir;
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    out << content;
    if (!out) throw UsageError("cannot write '" + path.string() + "'");
}

int cmd_equilibria(const Options& o) {
    const RunConfig rc = load(o);
    std::cout << equilibria_report(rc.params).dump(2) << "\n";
    return 0;
}

int cmd_diagram(const Options& o) {
    const RunConfig rc = load(o);
    if (!rc.has_diagram) throw UsageError("config: diagram: section missing");
    const Diagram d = build_diagram(rc.diagram);
    const fs::path dir = output_dir(o, rc);
    std::ostringstream csv;
    write_curves_csv(csv, d.curves);
    write_file(dir / "curves.csv", csv.str());
    write_file(dir / "points.json", points_json(d).dump(2) + "\n");
    write_file(dir / "diagram.svg", diagram_svg(d));
    std::size_t n = 0;
    for (const auto& c : d.curves) n += c.points.size();
    std::printf("%zu curves (%zu points), %zu codim-2 points written to %s\n", d.curves.size(), n, d.points.size(),
                dir.string().c_str());
    for (const auto& s : d.status)
        if (!s.found)
            std::fprintf(stderr, "warning: %s not found: %s\n", std::string(to_string(s.kind)).c_str(), s.note.c_str());
    return 0;
}

int cmd_portrait(const Options& o) {
    const RunConfig rc = load(o);
    if (!rc.has_portrait) throw UsageError("config: portrait: section missing");
    const Portrait p = build_portrait(rc.portrait);
    const fs::path dir = output_dir(o, rc);
    std::ostringstream csv;
    write_trajectories_csv(csv, p);
    write_file(dir / "trajectories.csv", csv.str());
    write_file(dir / "portrait.svg", portrait_svg(p));
    int bad = 0;
    for (const auto& c : p.curves) bad += !c.diagnostic.empty();
    std::printf("%zu trajectories, %zu equilibria, %zu cycles written to %s\n", p.curves.size(), p.equilibria.size(),
                p.cycles.size(), dir.string().c_str());
    if (bad) std::fprintf(stderr, "warning: %d trajectories stopped early, see the diagnostic rows\n", bad);
    return 0;
}

int cmd_verify(const Options& o) {
    VerifyContext ctx;
    ctx.config_dir = o.config_dir;
    for (const auto& a : o.overrides) {
        const auto eq = a.find('=');
        if (eq == std::string::npos) throw UsageError("override '" + a + "': expected key=value");
        const std::string key = a.substr(0, eq), value = a.substr(eq + 1);
        double v = 0;
        try {
            std::size_t used = 0;
            v = std::stod(value, &used);
            if (used != value.size()) throw std::invalid_argument(value);
        } catch (const std::exception&) {
            throw UsageError("override '" + a + "': value must be a number");
        }
        if (key == "seed")
            ctx.seed = static_cast<unsigned>(v);
        else if (key.rfind("fault.", 0) != 0 || !apply_fault(ctx.faults, key.substr(6), v))
            throw UsageError("override '" + a + "': verify accepts seed=N and fault.k3=DELTA");
    }
    const SuiteReport rep = run_suite(o.suite, ctx);
    const std::string text = verify_json(rep).dump(2) + "\n";
    std::cout << text;
    if (!o.out_dir.empty()) {
        fs::create_directories(o.out_dir);
        write_file(fs::path(o.out_dir) / "verify.json", text);
    }
    return rep.pass() ? 0 : kExitVerify;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Bifurcation analysis of a Lotka-Volterra model with prey immigration"};
    app.require_subcommand(1);
    Options o;

    auto* eq = app.add_subcommand("equilibria", "equilibria with eigenvalues and classification, as JSON");
    auto* dg = app.add_subcommand("diagram", "two-parameter bifurcation diagram: curves.csv, points.json, diagram.svg");
    auto* pt = app.add_subcommand("portrait", "phase portrait: trajectories.csv, portrait.svg");
    auto* vf = app.add_subcommand("verify", "run an acceptance suite; JSON report on stdout");

    for (auto* s : {eq, dg, pt}) {
        s->add_option("--config", o.config, "JSON configuration file")->required();
        s->add_option("--seed-override", o.overrides, "override a config entry, e.g. params.e=-10 (repeatable)");
    }
    for (auto* s : {dg, pt}) s->add_option("--out-dir", o.out_dir, "output directory (default: the config's output_dir)");
    vf->add_option("--suite", o.suite, "all, normalform, continuation or global")
        ->check(CLI::IsMember(suite_names()));
    vf->add_option("--config-dir", o.config_dir, "directory holding saddle.json and elliptic.json");
    vf->add_option("--seed-override", o.overrides, "seed=N, or a fault hook such as fault.k3=1e-3 (repeatable)");
    vf->add_option("--out-dir", o.out_dir, "also write verify.json here");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitUsage;
    }

    try {
        if (eq->parsed()) return cmd_equilibria(o);
        if (dg->parsed()) return cmd_diagram(o);
        if (pt->parsed()) return cmd_portrait(o);
        return cmd_verify(o);
    } catch (const UsageError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitUsage;
    } catch (const DegenerateModelError& e) {
        std::fprintf(stderr, "error: degenerate model (%s): %s\n", e.guard().c_str(), e.what());
        return kExitUsage;
    } catch (const DomainError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitUsage;
    } catch (const NumericalError& e) {
        std::fprintf(stderr, "numerical failure: %s\n", e.what());
        return kExitNumerical;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "failure: %s\n", e.what());
        return kExitNumerical;
    }
}
