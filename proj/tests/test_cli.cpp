#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "lvbif/io.hpp"

namespace fs = std::filesystem;
using lvbif::Json;

namespace {

struct Run {
    int code = -1;
    std::string out, err;
};

fs::path scratch() {
    static const fs::path dir = [] {
        fs::path d = fs::temp_directory_path() / ("lvbif_cli_" + std::to_string(::getpid()));
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Run run(const std::string& args) {
    const fs::path out = scratch() / "stdout.txt", err = scratch() / "stderr.txt";
    const std::string cmd = std::string(LVBIF_CLI) + " " + args + " >" + out.string() + " 2>" + err.string();
    const int status = std::system(cmd.c_str());
    Run r;
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = slurp(out);
    r.err = slurp(err);
    return r;
}

std::string config(const std::string& name) { return std::string(LVBIF_CONFIG_DIR) + "/" + name; }

}  // namespace

TEST_CASE("cli usage errors exit with 2") {
    CHECK(run("").code == 2);
    CHECK(run("frobnicate").code == 2);
    CHECK(run("equilibria").code == 2);
    CHECK(run("equilibria --config /nonexistent.json").code == 2);
    CHECK(run("verify --suite nonsense").code == 2);
    CHECK(run("verify --seed-override fault.q=1").code == 2);

    const Run bad = run("equilibria --config " + config("equilibria_saddle.json") + " --seed-override params.a33=1");
    CHECK(bad.code == 2);
    CHECK(bad.err.find("a33") != std::string::npos);
    CHECK(bad.err.find("unknown parameter") != std::string::npos);
}

TEST_CASE("cli degenerate coefficients exit with 2") {
    const fs::path cfg = scratch() / "degenerate.json";
    std::ofstream(cfg) << R"({"model": "ST2_MIN", "params": {"k1": 1, "k2": 1, "k3": 0, "eps": 1}})";
    const Run r = run("equilibria --config " + cfg.string());
    CHECK(r.code == 2);
    CHECK(r.err.find("k3 != 0") != std::string::npos);
}

TEST_CASE("cli equilibria") {
    const Run r = run("equilibria --config " + config("equilibria_saddle.json"));
    REQUIRE(r.code == 0);
    const Json j = Json::parse(r.out);
    int axis = 0;
    for (const auto& e : j["equilibria"]) axis += e["on_axis"].get<bool>();
    CHECK(axis == 2);

    const Run none = run("equilibria --config " + config("equilibria_saddle.json") + " --seed-override params.e=-12");
    REQUIRE(none.code == 0);
    axis = 0;
    for (const auto& e : Json::parse(none.out)["equilibria"]) axis += e["on_axis"].get<bool>();
    CHECK(axis == 0);
}

TEST_CASE("cli verify and fault injection") {
    const Run ok = run("verify --suite normalform");
    CHECK(ok.code == 0);
    CHECK(Json::parse(ok.out)["pass"] == true);

    const Run bad = run("verify --suite normalform --seed-override fault.k3=1e-3");
    CHECK(bad.code == 1);
    const Json j = Json::parse(bad.out);
    CHECK(j["pass"] == false);
    bool named = false;
    for (const auto& c : j["criteria"])
        for (const auto& k : c["checks"])
            if (!k["pass"].get<bool>() && k["name"] == "conditions_residual") named = true;
    CHECK(named);
}

TEST_CASE("cli portrait keeps axis seeds on the axis") {
    const fs::path dir = scratch() / "axis";
    const Run r = run("portrait --config " + config("portrait_mlv_axis.json") + " --out-dir " + dir.string());
    REQUIRE(r.code == 0);
    std::ifstream in(dir / "trajectories.csv");
    std::string line;
    std::getline(in, line);
    CHECK(line == "curve_id,kind,index,t,x1,x2,note");
    // seeds 1-3 start on the x1-axis
    int rows = 0;
    while (std::getline(in, line)) {
        const auto id = line.substr(0, line.find(','));
        if (id != "seed1" && id != "seed2" && id != "seed3") continue;
        const auto last = line.rfind(',');
        const auto prev = line.rfind(',', last - 1);
        CHECK(std::stod(line.substr(prev + 1, last - prev - 1)) == 0.0);
        ++rows;
    }
    CHECK(rows > 100);
    CHECK(slurp(dir / "portrait.svg").find("</svg>") != std::string::npos);
}

TEST_CASE("cli portrait finds the cycle") {
    const fs::path dir = scratch() / "cycle";
    const Run r = run("portrait --config " + config("portrait_st2_cycle.json") + " --out-dir " + dir.string());
    REQUIRE(r.code == 0);
    CHECK(r.out.find("1 cycles") != std::string::npos);
    CHECK(slurp(dir / "trajectories.csv").find(",cycle,") != std::string::npos);
}

TEST_CASE("cli diagram writes all three files") {
    const fs::path dir = scratch() / "diagram";
    const Run r = run("diagram --config " + config("st2_saddle.json") + " --seed-override 'diagram.kinds=[\"SN\",\"TC\"]'" +
                      " --out-dir " + dir.string());
    REQUIRE(r.code == 0);
    CHECK(slurp(dir / "curves.csv").rfind(lvbif::kCurvesHeader, 0) == 0);
    CHECK(Json::parse(slurp(dir / "points.json"))["curve_kinds"].size() == 2);
    CHECK(slurp(dir / "diagram.svg").find("</svg>") != std::string::npos);
}
