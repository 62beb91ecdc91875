#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "lvbif/diagram.hpp"
#include "lvbif/portrait.hpp"
#include "lvbif/verify.hpp"

namespace lvbif {

using Json = nlohmann::ordered_json;

// ---- configuration ----

struct RunConfig {
    Json raw;
    ParameterSet params;
    DiagramSpec diagram;  // meaningful when has_diagram
    bool has_diagram = false;
    PortraitSpec portrait;
    bool has_portrait = false;
    std::string out_dir = ".";
};

Json load_json_file(const std::string& path);
// "a.b.c=value": value is parsed as JSON when it parses, as a string otherwise.
void apply_override(Json& config, const std::string& assignment);
ParameterSet parse_params(const Json& config);
RunConfig parse_config(const Json& config);

// ---- curves.csv ----

inline constexpr const char* kCurvesHeader =
    "curve_id,kind,param1_name,param1,param2_name,param2,x1,x2,eig_re1,eig_im1,eig_re2,eig_im2";

std::string format_double(double v);  // 17 significant digits, "nan"/"inf" spelled out

void write_curves_csv(std::ostream& os, const std::vector<Curve>& curves);

struct CsvRow {
    std::string curve_id, kind, param1_name, param2_name;
    double param1 = 0, param2 = 0, x1 = 0, x2 = 0;
    double eig_re1 = 0, eig_im1 = 0, eig_re2 = 0, eig_im2 = 0;
};
std::vector<CsvRow> read_curves_csv(std::istream& is);

// ---- points.json, diagram.svg ----

Json params_json(const ParameterSet& p);
Json equilibrium_json(const Equilibrium& e);
// Every equilibrium at p with eigenvalues and classification.
Json equilibria_report(const ParameterSet& p);
Json verify_json(const SuiteReport& r);
Json points_json(const Diagram& d);
std::string diagram_svg(const Diagram& d);

// ---- portraits ----

void write_trajectories_csv(std::ostream& os, const Portrait& p);
std::string portrait_svg(const Portrait& p);

}  // namespace lvbif
