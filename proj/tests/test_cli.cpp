#include <catch2/catch_amalgamated.hpp>

#include "cli.hpp"
#include "scatterlab/graph.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

using scatterlab::cli::run;

namespace {

struct Outcome {
    int code;
    std::string out, err;
};

Outcome call(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    const int code = run(args, out, err);
    return {code, out.str(), err.str()};
}

std::size_t data_rows(const std::string& csv) {
    std::istringstream in(csv);
    std::string line;
    std::size_t n = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (!header_seen) {
            header_seen = true;
            continue;
        }
        ++n;
    }
    return n;
}

std::filesystem::path scratch(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / "scatterlab_cli_test";
    std::filesystem::create_directories(dir);
    return dir / name;
}

}  // namespace

TEST_CASE("git blob hashes") {
    CHECK(scatterlab::cli::git_blob_hash("") == "e69de29bb2d1d6434b8b29ae775ad8c2e48c5391");
    CHECK(scatterlab::cli::git_blob_hash("hello\n") == "ce013625030ba8dba906f756967f9e9ca394464a");
}

TEST_CASE("phase curve emits one row per grid point") {
    const auto r = call({"phase-curve", "--model", "tj", "--k1", "0.7853981633974483", "--k2", "1.5707963267948966",
                         "--grid", "0:8:65"});
    REQUIRE(r.code == 0);
    CHECK(data_rows(r.out) == 65);
    CHECK(r.out.find("coupling,theta_unwrapped,re_R,im_R\n") != std::string::npos);
    CHECK(r.out.find("# config.k1=0.7853981633974483\n") != std::string::npos);
    CHECK(r.out.find("# tool=scatterlab ") == 0);
}

TEST_CASE("identical invocations write identical bytes") {
    const auto a = scratch("curve_a.csv"), b = scratch("curve_b.csv");
    REQUIRE(call({"phase-curve", "--model", "hubbard", "--grid", "0:4:33", "-o", a.string()}).code == 0);
    REQUIRE(call({"phase-curve", "--model", "hubbard", "--grid", "0:4:33", "-o", b.string(), "--threads", "2"}).code == 0);
    CHECK(scatterlab::read_text_file(a.string()) == scatterlab::read_text_file(b.string()));

    const auto m1 = call({"measure", "--shots", "20000", "--seed", "9"});
    const auto m2 = call({"measure", "--shots", "20000", "--seed", "9"});
    REQUIRE(m1.code == 0);
    CHECK(m1.out == m2.out);

    const auto s1 = call({"scatter-2p", "--L", "16", "--line-length", "256", "--J", "2"});
    const auto s2 = call({"scatter-2p", "--L", "16", "--line-length", "256", "--J", "2", "--threads", "1"});
    REQUIRE(s1.code == 0);
    CHECK(s1.out == s2.out);
}

TEST_CASE("malformed inputs exit with code 2") {
    const auto bad = scratch("bad_graph.json");
    {
        std::ofstream f(bad);
        f << "{\"vertices\": 3,\n \"edges\": [[0, 1],\n [1, 7]], \"terminals\": [0]}";
    }
    const auto r = call({"scatter-1p", "--graph", bad.string(), "--k", "1.0"});
    CHECK(r.code == 2);
    CHECK(r.err.find("edges[1]") != std::string::npos);

    const auto trunc = scratch("truncated_graph.json");
    {
        std::ofstream f(trunc);
        f << "{\"vertices\": 3,\n \"edges\": [[0, 1],\n";
    }
    const auto t = call({"scatter-1p", "--graph", trunc.string(), "--k", "1.0"});
    CHECK(t.code == 2);
    CHECK(t.err.find(trunc.string() + ":3") != std::string::npos);

    CHECK(call({"no-such-command"}).code == 2);
    CHECK(call({"phase-curve", "--grid", "0:1:3", "--colour", "red"}).code == 2);
    CHECK(call({"phase-curve", "--grid", "0:1"}).code == 2);
    CHECK(call({"phase-curve", "--model", "ising", "--grid", "0:1:3"}).code == 2);
    CHECK(call({"cnot-sim", "--schedule", scratch("missing.json").string()}).code == 2);
    CHECK(call({}).code == 2);
}

TEST_CASE("numerical failures exit with code 3") {
    const auto r = call({"synth", "--theta", "0.7853981633974483", "--gamma-t", "1", "--epsilon", "1e-6"});
    CHECK(r.code == 3);
    CHECK(r.err.find("period 4") != std::string::npos);

    // A path with three terminals is no switch.
    const auto g = scratch("not_a_switch.json");
    {
        std::ofstream f(g);
        f << R"({"vertices": 3, "edges": [[0, 1], [1, 2]], "terminals": [0, 1, 2]})";
    }
    const auto v = call({"switch-verify", "--graph", g.string()});
    CHECK(v.code == 3);
    CHECK(v.out.find("\"passed\": false") != std::string::npos);
}

TEST_CASE("structured results") {
    const auto sv = call({"switch-verify"});
    REQUIRE(sv.code == 0);
    const auto j = nlohmann::json::parse(sv.out);
    CHECK(j["passed"] == true);
    CHECK(j["metadata"]["input.switch_catalog.sha1"].get<std::string>().size() == 40);

    const auto sy = call({"synth", "--J", "2", "--gamma-t", "0.5", "--epsilon", "1e-3"});
    REQUIRE(sy.code == 0);
    const auto p = nlohmann::json::parse(sy.out);
    CHECK(p["k"].get<long long>() >= 1);
    CHECK(p["achieved_error"].get<double>() <= 1e-3);
    CHECK(p.contains("convergents_used"));

    const auto cs = call({"cnot-sim", "--schedule", std::string(SCATTERLAB_EXAMPLES_DIR) + "/swap_schedule.json",
                          "--epsilon", "1e-3", "--J", "2"});
    REQUIRE(cs.code == 0);
    const auto c = nlohmann::json::parse(cs.out);
    CHECK(c["per_step_k"].size() == 3);
    CHECK(c["exact"]["max_element_error"].get<double>() < 1e-12);
    CHECK(c["max_element_error"].get<double>() < 1e-2);

    const auto s1 = call({"scatter-1p", "--grid", "0.5:2.5:5"});
    REQUIRE(s1.code == 0);
    CHECK(data_rows(s1.out) == 5 * 9);
}
