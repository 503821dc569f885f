#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <regex>
#include <set>
#include <sstream>

#include "ergo/cli.hpp"
#include "ergo/csv.hpp"
#include "ergo/diagnostics.hpp"
#include "ergo/digest.hpp"
#include "ergo/error.hpp"
#include "ergo/svg.hpp"

namespace fs = std::filesystem;
using namespace ergo;

namespace {

struct Outcome
{
    int code;
    std::string out;
    std::string err;
};

Outcome invoke(const std::vector<std::string>& args)
{
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& path)
{
    std::ifstream in(path, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text)
{
    std::vector<std::vector<std::string>> rows;
    std::istringstream is(text);
    std::string line;
    while (std::getline(is, line))
    {
        std::vector<std::string> fields;
        std::stringstream ls(line);
        std::string f;
        while (std::getline(ls, f, ','))
            fields.push_back(f);
        rows.push_back(fields);
    }
    return rows;
}

std::size_t count(const std::string& text, const std::string& needle)
{
    std::size_t n = 0;
    for (auto pos = text.find(needle); pos != std::string::npos; pos = text.find(needle, pos + 1))
        ++n;
    return n;
}

fs::path scratch(const std::string& name)
{
    const auto dir = fs::current_path() / "cli_scratch" / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

} // namespace

TEST_CASE("number formatting round-trips doubles")
{
    for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, 0.0})
        CHECK(std::stod(csv::format_number(v)) == v);
    CHECK(csv::format_number(std::nan("")) == "nan");
    CHECK(csv::format_number(1.0) == "1");
}

TEST_CASE("simulate: noiseless line")
{
    const auto r = invoke({"simulate", "brownian", "--scale", "0", "--drift", "1", "--t", "1",
                           "--dt", "0.5", "--n", "1", "--seed", "0"});
    CHECK(r.code == 0);
    CHECK(r.out == "time,inst_0\n0,0\n0.5,0.5\n1,1\n");
}

TEST_CASE("simulate: API-example shape and byte determinism")
{
    const std::vector<std::string> args{"simulate", "brownian", "--drift", "0", "--scale", "1",
                                        "--t", "3", "--dt", "0.01", "--n", "240", "--seed", "7"};
    const auto a = invoke(args);
    REQUIRE(a.code == 0);
    const auto rows = parse_csv(a.out);
    CHECK(rows.size() == 302);
    CHECK(rows[0].size() == 241);
    CHECK(rows[0][240] == "inst_239");
    CHECK(rows.back().size() == 241);
    CHECK(invoke(args).out == a.out);

    auto threaded = args;
    threaded.insert(threaded.end(), {"--threads", "5"});
    CHECK(invoke(threaded).out == a.out);
}

TEST_CASE("usage errors exit with code 2")
{
    CHECK(invoke({"simulate", "brownian", "--bogus", "1"}).code == 2);
    CHECK(invoke({"simulate"}).code == 2);
    CHECK(invoke({"simulate", "gbm", "--sigma", "-1"}).code == 2);
    CHECK(invoke({"simulate", "brownian", "--n", "0"}).code == 2);
    CHECK(invoke({"simulate", "ou", "--theta", "200", "--dt", "0.01"}).code == 2);
    CHECK(invoke({"nonsense"}).code == 2);
    CHECK(invoke({"evolve", "--survivor-share", "1.5"}).code == 2);
    CHECK(invoke({"evolve", "--f-min", "2", "--f-max", "1"}).code == 2);
    CHECK(invoke({"--help"}).code == 0);
}

TEST_CASE("diagnose: fan, summary, growth, preasym from CSV")
{
    const auto dir = scratch("diagnose");
    const auto csv_path = (dir / "gbm.csv").string();
    REQUIRE(invoke({"simulate", "gbm", "--mu", "0.05", "--sigma", "0.2", "--t", "10", "--dt",
                    "0.01", "--n", "2000", "--seed", "3", "--out", csv_path})
                .code
            == 0);
    const auto prefix = (dir / "d").string();
    const auto r = invoke({"diagnose", "--in", csv_path, "--fan", "--summary", "--growth",
                           "--preasym", "--preasym-log", "--window", "25", "--svg",
                           "--out-prefix", prefix});
    REQUIRE(r.code == 0);
    for (const char* suffix : {"_fan.csv", "_summary.csv", "_growth.csv", "_preasym.csv",
                               "_fan.svg", "_summary.svg", "_preasym.svg"})
        CHECK(fs::exists(prefix + suffix));

    CHECK(parse_csv(slurp(prefix + "_fan.csv"))[0]
          == std::vector<std::string>{"time", "q05", "q25", "q50", "q75", "q95"});
    CHECK(parse_csv(slurp(prefix + "_summary.csv"))[0]
          == std::vector<std::string>{"time", "amean", "median", "gmean"});
    const auto pre = parse_csv(slurp(prefix + "_preasym.csv"));
    CHECK(pre[0] == std::vector<std::string>{"time", "distance", "fluctuation"});
    CHECK(pre[1][2] == "nan");
    CHECK(pre[26][2] != "nan");

    // Round trip: CSV-driven growth equals the in-process pipeline.
    std::ifstream in(csv_path);
    const auto rates = growth_rates(csv::read_ensemble(in));
    const auto growth = parse_csv(slurp(prefix + "_growth.csv"));
    REQUIRE(growth.size() == 3);
    CHECK(growth[1][0] == "time_average");
    CHECK(std::stod(growth[1][1]) == doctest::Approx(rates.time_average).epsilon(1e-12));
    CHECK(std::stod(growth[2][1]) == doctest::Approx(rates.ensemble_average).epsilon(1e-12));
    CHECK(std::abs(rates.time_average - 0.03) < 0.01);

    const auto direct = simulate(GeometricBrownian(0.05, 0.2), 10.0, 0.01, 2000, 3);
    const auto direct_rates = growth_rates(direct);
    CHECK(direct_rates.time_average == doctest::Approx(rates.time_average).epsilon(1e-12));
}

TEST_CASE("diagnose: constant ensemble and inline simulation")
{
    const auto dir = scratch("constant");
    const auto csv_path = dir / "c.csv";
    std::ofstream(csv_path) << "time,inst_0,inst_1,inst_2\n0,2,2,2\n0.5,2,2,2\n1,2,2,2\n";
    const auto prefix = (dir / "c").string();
    REQUIRE(invoke({"diagnose", "--in", csv_path.string(), "--out-prefix", prefix}).code == 0);
    const auto fan = parse_csv(slurp(prefix + "_fan.csv"));
    for (std::size_t r = 1; r < fan.size(); ++r)
        for (std::size_t c = 1; c < fan[r].size(); ++c)
            CHECK(fan[r][c] == "2");

    const auto inline_prefix = (dir / "i").string();
    CHECK(invoke({"diagnose", "--fan-levels", "0.1,0.9", "--out-prefix", inline_prefix, "brownian",
                  "--t", "1", "--n", "50"})
              .code
          == 0);
    CHECK(parse_csv(slurp(inline_prefix + "_fan.csv"))[0]
          == std::vector<std::string>{"time", "q10", "q90"});
}

TEST_CASE("diagnose: validation and runtime errors")
{
    const auto dir = scratch("errors");
    CHECK(invoke({"diagnose", "--fan-levels", "0.9,0.1", "brownian"}).code == 2);
    CHECK(invoke({"diagnose"}).code == 2);

    const auto neg = dir / "neg.csv";
    std::ofstream(neg) << "time,inst_0,inst_1\n0,1,-1\n1,2,3\n";
    const auto r = invoke({"diagnose", "--in", neg.string(), "--summary", "--out-prefix",
                           (dir / "n").string()});
    CHECK(r.code == 1);
    CHECK(r.err.find("geometric mean requires strictly positive values") != std::string::npos);

    const auto bad = dir / "bad.csv";
    std::ofstream(bad) << "time,inst_0\n0,1\n1,abc\n";
    CHECK(invoke({"diagnose", "--in", bad.string()}).code == 1);
    CHECK(invoke({"diagnose", "--in", (dir / "missing.csv").string()}).code == 1);
}

TEST_CASE("ensemble CSV reader rejects malformed input")
{
    auto read = [](const std::string& text) {
        std::istringstream is(text);
        return csv::read_ensemble(is);
    };
    CHECK_THROWS_AS(read(""), SchemaError);
    CHECK_THROWS_AS(read("t,inst_0\n0,1\n1,1\n"), SchemaError);
    CHECK_THROWS_AS(read("time,inst_1\n0,1\n1,1\n"), SchemaError);
    CHECK_THROWS_AS(read("time,inst_0\n0,1\n"), SchemaError);
    CHECK_THROWS_AS(read("time,inst_0\n0,1\n1,1,2\n"), SchemaError);
    CHECK_THROWS_AS(read("time,inst_0\n0,1\n1,1\n3,1\n"), SchemaError);
    const auto e = read("time,inst_0,inst_1\n0,1,2\n0.25,3,4\n0.5,5,6\n");
    CHECK(e.num_instances() == 2);
    CHECK(e.grid().dt() == 0.25);
    CHECK(e.values()(1, 2) == 6.0);
}

TEST_CASE("spde command")
{
    const auto dir = scratch("spde");
    const auto prefix = (dir / "sine").string();
    const auto r = invoke({"spde", "--kappa", "0.1", "--sigma", "0", "--L", "1", "--dx", "0.0078125",
                           "--dt", "2e-5", "--t", "0.5", "--init", "sine", "--save-every", "1000",
                           "--svg", "--out-prefix", prefix});
    REQUIRE(r.code == 0);
    CHECK(fs::exists(prefix + ".svg"));
    const auto profiles = parse_csv(slurp(prefix + "_profiles.csv"));
    CHECK(profiles[0] == std::vector<std::string>{"x", "initial", "final"});
    const double decay = std::exp(-0.1 * std::numbers::pi * std::numbers::pi * 0.5);
    double err = 0.0;
    for (std::size_t i = 1; i < profiles.size(); ++i)
        err = std::max(err, std::abs(std::stod(profiles[i][2])
                                     - decay * std::sin(std::numbers::pi * std::stod(profiles[i][0]))));
    CHECK(err < 1e-3);
    CHECK(parse_csv(slurp(prefix + "_field.csv")).size() == 27);

    const auto zero = (dir / "zero").string();
    REQUIRE(invoke({"spde", "--init", "zero", "--sigma", "0", "--t", "0.1", "--out-prefix", zero}).code == 0);
    const auto field = parse_csv(slurp(zero + "_field.csv"));
    for (std::size_t r2 = 1; r2 < field.size(); ++r2)
        for (std::size_t c = 1; c < field[r2].size(); ++c)
            REQUIRE(field[r2][c] == "0");

    const auto unstable = invoke({"spde", "--kappa", "1", "--dx", "0.1", "--dt", "0.006",
                                  "--out-prefix", (dir / "u").string()});
    CHECK(unstable.code == 2);
    CHECK(unstable.err.find("0.6") != std::string::npos);
    CHECK(invoke({"spde", "--boundary", "periodic"}).code == 2);
    CHECK(invoke({"spde", "--L", "1", "--dx", "0.3", "--dt", "1e-4"}).code == 2);
}

TEST_CASE("evolve command")
{
    const std::vector<std::string> flat{"evolve", "--mutation-sd", "0", "--init-fraction", "0.7",
                                        "--agents", "5", "--generations", "3", "--t", "5",
                                        "--paths", "2", "gbm"};
    const auto r = invoke(flat);
    REQUIRE(r.code == 0);
    const auto rows = parse_csv(r.out);
    CHECK(rows[0] == std::vector<std::string>{"generation", "best_fraction", "best_fitness"});
    for (std::size_t i = 1; i <= 3; ++i)
        CHECK(rows[i][1] == "0.69999999999999996");
    CHECK(rows.back()[0] == "best_fraction=0.69999999999999996");
    CHECK(invoke(flat).out == r.out);
}

TEST_CASE("evolve command recovers Kelly")
{
    const auto r = invoke({"evolve", "gbm", "--mu", "0.05", "--sigma", "0.2"});
    REQUIRE(r.code == 0);
    const auto last = r.out.substr(r.out.rfind("best_fraction=") + 14);
    CHECK(std::abs(std::stod(last) - 1.25) < 0.15);
}

TEST_CASE("render: polylines, determinism and heatmap colors")
{
    svg::Panel single{"one", "x", "y", {{"s", {0.0, 1.0}, {0.0, 1.0}}}, std::nullopt, false};
    const auto text = svg::render(single);
    CHECK(count(text, "<polyline") == 1);
    CHECK(text.rfind("<?xml", 0) == 0);
    CHECK(text.find("version=\"1.1\"") != std::string::npos);
    CHECK(svg::render(single) == text);

    Matrix values(3, 3);
    const double cells[9] = {0.0, 1.0, 2.0, 1.0, 5.0, 2.0, 0.0, 5.0, 3.0};
    for (std::size_t i = 0; i < 9; ++i)
        values(i / 3, i % 3) = cells[i];
    svg::Panel heat{"heat", "x", "t", {}, svg::Heatmap{{0, 1, 2}, {0, 1, 2}, values}, false};
    const auto map = svg::render(heat);
    const std::regex cell_re("<rect [^>]*fill=\"(#[0-9a-f]{6})\"");
    std::vector<std::string> colors;
    for (auto it = std::sregex_iterator(map.begin(), map.end(), cell_re); it != std::sregex_iterator(); ++it)
        if ((*it)[1] != "#ffffff")
            colors.push_back((*it)[1]);
    REQUIRE(colors.size() == 9);
    for (std::size_t a = 0; a < 9; ++a)
        for (std::size_t b = 0; b < 9; ++b)
            if (cells[a] == cells[b])
                CHECK(colors[a] == colors[b]);
            else
                CHECK(colors[a] != colors[b]);

    // Ramp is monotone in each channel's luminance proxy.
    double prev = -1.0;
    for (int i = 0; i <= 20; ++i)
    {
        const auto c = svg::ramp_color(i / 20.0);
        const double lum = 0.3 * std::stoi(c.substr(1, 2), nullptr, 16)
                           + 0.59 * std::stoi(c.substr(3, 2), nullptr, 16)
                           + 0.11 * std::stoi(c.substr(5, 2), nullptr, 16);
        CHECK(lum >= prev);
        prev = lum;
    }
}

TEST_CASE("render rejects bad input")
{
    svg::Panel nan_panel{"bad", "x", "y", {{"s", {0.0, 1.0}, {0.0, std::nan("")}}}, std::nullopt, false};
    CHECK_THROWS_AS(svg::render(nan_panel), DomainError);
    svg::Panel inf_panel{"bad", "x", "y", {{"s", {0.0, HUGE_VAL}, {0.0, 1.0}}}, std::nullopt, false};
    CHECK_THROWS_AS(svg::render(inf_panel), DomainError);
    svg::Panel empty{"empty", "x", "y", {}, std::nullopt, false};
    CHECK_THROWS_AS(svg::render(empty), DomainError);
    svg::Panel log_panel{"log", "x", "y", {{"s", {0.0, 1.0}, {1.0, 0.0}}}, std::nullopt, true};
    CHECK_THROWS_AS(svg::render(log_panel), DomainError);
}

TEST_CASE("sha256 known answers")
{
    CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("replicate writes five figure bundles and a manifest")
{
    const auto dir = scratch("replicate");
    const auto r = invoke({"replicate", "--outdir", dir.string(), "--seed", "12345"});
    REQUIRE(r.code == 0);

    std::set<std::string> csvs, svgs;
    for (const auto& entry : fs::directory_iterator(dir))
    {
        const auto ext = entry.path().extension();
        if (ext == ".csv")
            csvs.insert(entry.path().filename().string());
        else if (ext == ".svg")
            svgs.insert(entry.path().filename().string());
    }
    CHECK(csvs.size() == 5);
    CHECK(svgs.size() == 5);
    REQUIRE(fs::exists(dir / "MANIFEST.txt"));

    const auto manifest = slurp(dir / "MANIFEST.txt");
    CHECK(manifest.rfind("# ergosim 0.1.0\n# command: ergosim replicate", 0) == 0);
    std::istringstream lines(manifest);
    std::string line;
    std::size_t listed = 0;
    while (std::getline(lines, line))
    {
        if (line.empty() || line[0] == '#')
            continue;
        const auto tab = line.find('\t');
        REQUIRE(tab != std::string::npos);
        CHECK(sha256_file(dir / line.substr(0, tab)) == line.substr(tab + 1));
        ++listed;
    }
    CHECK(listed == 10);

    const auto fig1 = parse_csv(slurp(dir / "fig1_quantile_fans.csv"));
    CHECK(fig1[0] == std::vector<std::string>{"series", "time", "q05", "q25", "q50", "q75", "q95"});
    std::size_t bm_rows = 0, glp_rows = 0;
    for (std::size_t i = 1; i < fig1.size(); ++i)
    {
        bm_rows += fig1[i][0] == "brownian";
        glp_rows += fig1[i][0] == "geometric_levy";
    }
    CHECK(bm_rows == 301);
    CHECK(glp_rows == 401);
    CHECK(manifest.find("n=240") != std::string::npos);
    CHECK(manifest.find("n=360") != std::string::npos);
}
