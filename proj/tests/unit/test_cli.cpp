#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "fairshare/cli.hpp"
#include "fairshare/estimation.hpp"
#include "fairshare/simulator.hpp"

using namespace fairshare;

namespace {

struct Run {
    int code = 0;
    std::string out;
    std::string err;
};

Run cli(std::vector<std::string> args)
{
    args.insert(args.begin(), "fairshare");
    std::ostringstream out, err;
    Run r;
    r.code = run_cli(args, out, err);
    r.out = out.str();
    r.err = err.str();
    return r;
}

std::string temp_path(const std::string& name)
{
    return (std::filesystem::temp_directory_path() / ("fairshare_cli_" + name)).string();
}

std::string slurp(const std::string& path)
{
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::vector<std::string>> csv_rows(const std::string& text)
{
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(text);
    std::string line;
    bool header = false;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (!header) {
            header = true;
            continue;
        }
        std::vector<std::string> f;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) f.push_back(cell);
        if (!line.empty() && line.back() == ',') f.push_back("");
        rows.push_back(f);
    }
    return rows;
}

}  // namespace

TEST_CASE("solve")
{
    const auto vac = cli({"solve", "--preset", "facebook", "--delta-lo", "1e-12", "--delta-hi", "1e12"});
    REQUIRE(vac.code == 0);
    const auto j = nlohmann::json::parse(vac.out);
    for (const char* k : {"A_a", "B_a"}) {
        const double v = j["theta"][k];
        CHECK((v == 0.0 || v == 1.0));
    }
    CHECK(j["manifest"]["command"] == "solve");
    CHECK(j["manifest"]["version"] == kToolVersion);

    const auto def = nlohmann::json::parse(cli({"solve", "--preset", "facebook"}).out);
    CHECK(def["feasible"] == true);
    CHECK(def["pof"].is_number());
    CHECK(def["binding_constraints"].is_array());

    const auto tight = cli({"solve", "--preset", "facebook", "--delta-lo", "0.999", "--delta-hi", "1.001"});
    CHECK(tight.code == kExitInfeasible);
    CHECK(nlohmann::json::parse(tight.out)["feasible"] == false);

    const auto grid = nlohmann::json::parse(cli({"solve", "--preset", "facebook", "--mode", "grid", "--grid", "101"}).out);
    CHECK(grid["mode"] == "grid");
}

TEST_CASE("input errors exit with 2")
{
    CHECK(cli({}).code == kExitInput);
    CHECK(cli({"solve"}).code == kExitInput);
    CHECK(cli({"solve", "--preset", "nosuch"}).code == kExitInput);
    CHECK(cli({"solve", "--preset", "facebook", "--delta-lo", "1.5"}).code == kExitInput);
    CHECK(cli({"solve", "--config", "/nonexistent.json"}).code == kExitInput);
    CHECK(cli({"sweep", "--preset", "facebook", "--delta-lo", "0.5,1.2"}).code == kExitInput);
    CHECK(cli({"--version"}).code == kExitOk);
}

TEST_CASE("sweep")
{
    const auto r = cli({"sweep", "--preset", "facebook"});
    REQUIRE(r.code == 0);
    const auto rows = csv_rows(r.out);
    REQUIRE(rows.size() == 100);
    int feasible = 0, near_one = 0;
    std::map<std::string, int> feasible_by_hi;
    for (const auto& f : rows) {
        feasible_by_hi[f[1]] += f[2] == "1";
        if (f[2] == "1") {
            ++feasible;
            near_one += std::stod(f[3]) >= 0.99;
        }
    }
    CHECK(near_one >= 0.8 * feasible);
    CHECK(feasible_by_hi["1.01"] == 0);

    const auto one = csv_rows(cli({"sweep", "--preset", "facebook", "--delta-lo", "1e-12", "--delta-hi", "1e12"}).out);
    REQUIRE(one.size() == 1);
    const auto agn = nlohmann::json::parse(cli({"solve", "--preset", "facebook", "--mode", "agnostic"}).out);
    CHECK(std::stod(one[0][3]) == agn["theta"]["A_a"].get<double>());
    CHECK(std::stod(one[0][4]) == agn["theta"]["B_a"].get<double>());
}

TEST_CASE("simulate")
{
    const auto half_out = temp_path("half.csv"), ratio_out = temp_path("ratio.csv");
    REQUIRE(cli({"simulate", "--preset", "facebook", "--policy", "half", "--agents", "20000", "--trials", "10", "--out",
                 half_out})
                .code == 0);
    REQUIRE(cli({"simulate", "--preset", "facebook", "--policy", "ratio", "--agents", "20000", "--trials", "10",
                 "--out", ratio_out})
                .code == 0);
    const auto half = nlohmann::json::parse(slurp(temp_path("half_summary.json")));
    const auto ratio = nlohmann::json::parse(slurp(temp_path("ratio_summary.json")));
    CHECK(half["disparity"]["outgroup_exposure"]["median"].get<double>() >
          ratio["disparity"]["outgroup_exposure"]["median"].get<double>());
    CHECK(half["pof_empirical"].get<double>() > 1.0);
    CHECK(csv_rows(slurp(half_out)).size() == 10 * 10 * 4);

    const auto first = slurp(half_out);
    REQUIRE(cli({"simulate", "--preset", "facebook", "--policy", "half", "--agents", "20000", "--trials", "10", "--out",
                 half_out})
                .code == 0);
    CHECK(slurp(half_out) == first);

    const auto broad = cli({"simulate", "--preset", "twitter-abortion", "--policy", "half", "--mode", "broadcast",
                            "--agents", "3000", "--trials", "3"});
    REQUIRE(broad.code == 0);
    std::vector<double> per_t(10, 0.0);
    for (const auto& f : csv_rows(broad.out)) per_t[std::stoul(f[1]) - 1] += std::stod(f[6]);
    bool up = false, down = false;
    for (std::size_t i = 1; i < per_t.size(); ++i) up |= per_t[i] > per_t[i - 1], down |= per_t[i] < per_t[i - 1];
    CHECK((up && down));

    for (const auto& p : {half_out, ratio_out, temp_path("half_summary.json"), temp_path("ratio_summary.json")})
        std::remove(p.c_str());
}

TEST_CASE("fit")
{
    const auto events = temp_path("events.csv"), out = temp_path("fit.json");
    REQUIRE(cli({"simulate", "--preset", "facebook", "--policy", "half", "--agents", "40000", "--trials", "1",
                 "--events", events, "--out", temp_path("sim.csv")})
                .code == 0);
    const auto r = cli({"fit", events, "--out", out});
    REQUIRE(r.code == 0);
    const auto j = nlohmann::json::parse(slurp(out));
    CHECK(j["manifest"]["command"] == "fit");
    CHECK(std::abs(j["q_A"].get<double>() - 0.72) <= 0.02);
    CHECK(std::abs(j["preferences"][0][0]["alpha"].get<double>() - 0.95) <= 0.1);
    CHECK(j["diagnostics"]["cells"]["Aa"]["samples"].get<long>() > 1000);

    // The fitted file is itself a valid config.
    CHECK(cli({"solve", "--config", out}).code != kExitInput);

    const auto empty = temp_path("empty.csv");
    std::ofstream(empty).close();
    CHECK(cli({"fit", empty}).code == kExitInput);

    const auto boundary = temp_path("boundary.csv");
    {
        std::ofstream f(boundary);
        f << "t,sharer_group,receiver_group,article,clicked,liked,like_prob_sample\n";
        for (int i = 0; i < 40; ++i)
            for (const char* cell : {"A,a", "A,b", "B,a", "B,b"}) {
                const double p = i == 0 ? 0.0 : (i == 1 ? 1.0 : 0.05 + 0.02 * i);
                f << (i < 10 ? "1,," : (i % 2 ? "2,A," : "2,B,")) << cell << ",1," << (p > 0.5) << "," << p << "\n";
            }
    }
    const auto b = cli({"fit", boundary});
    CHECK(b.code == 0);
    CHECK(b.err.find("clip") != std::string::npos);

    const auto no_b = temp_path("no_b.csv");
    {
        std::ofstream f(no_b);
        f << "t,sharer_group,receiver_group,article,clicked,liked,like_prob_sample\n";
        for (int i = 0; i < 40; ++i)
            for (const char* cell : {"A,a", "A,b", "B,a", "B,b"})
                f << 2 << ",A," << cell << ",1,0," << 0.1 + 0.01 * i << "\n";
    }
    CHECK(cli({"fit", no_b}).code == kExitEstimation);

    for (const auto& p : {events, out, temp_path("sim.csv"), temp_path("sim_summary.json"), empty, boundary, no_b})
        std::remove(p.c_str());
}

TEST_CASE("propagate")
{
    const auto r = cli({"propagate", "--preset", "facebook", "--theta-aa", "0.6", "--theta-ba", "0.3"});
    REQUIRE(r.code == 0);
    const auto rows = csv_rows(r.out);
    REQUIRE(rows.size() == 40);
    CHECK(rows[0][0] == "1");
    CHECK(std::stod(rows[0][3]) == doctest::Approx(0.5 * 0.6 * preset("facebook").params.psi(Group::A, Article::a)));
    CHECK(cli({"propagate", "--preset", "facebook", "--theta-aa", "1.5"}).code == kExitInput);
}
