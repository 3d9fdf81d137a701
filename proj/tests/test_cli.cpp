#include "lwo/cli.hpp"
#include "lwo/json_io.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

namespace fs = std::filesystem;
using lwo::io::json;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result lwo_run(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = lwo::cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / ("lwo_cli_" + std::to_string(std::hash<std::string>{}(
                                                              doctest::getContextOptions()->currentTest
                                                                  ? doctest::getContextOptions()->currentTest->m_name
                                                                  : "x")));
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string file(const std::string& name, const std::string& content) const {
        const auto p = path / name;
        std::ofstream(p) << content;
        return p.string();
    }
    std::string at(const std::string& name) const { return (path / name).string(); }
};

std::string slurp(const std::string& p) {
    std::ifstream in(p);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

}  // namespace

TEST_CASE("concentration of {1,2,3}") {
    TempDir t;
    const auto r = lwo_run({"concentration", "--mu", "1", "--input", t.file("v.txt", "1\n2\n3\n")});
    REQUIRE(r.code == 0);
    const json j = json::parse(r.out);
    CHECK(j["a"] == 0);
    CHECK(j["p"] == "1/4");
    CHECK(lwo_run({"concentration", "--values", "1,1"}).out.find("\"1/2\"") != std::string::npos);
}

TEST_CASE("usage errors exit 1 with usage text") {
    auto r = lwo_run({"concentration", "--mu", "1"});
    CHECK(r.code == 1);
    r = lwo_run({"inverse1", "--values", "1,2"});
    CHECK(r.code == 1);
    CHECK(r.err.find("--d") != std::string::npos);
    CHECK(r.err.find("Usage") != std::string::npos);
    CHECK(lwo_run({}).code == 1);
    CHECK(lwo_run({"bogus"}).code == 1);
    CHECK(lwo_run({"concentration", "--values", "1", "--mu", "3/2"}).code == 1);
    CHECK(lwo_run({"concentration", "--values", "1", "--mu", "x"}).code == 1);
    CHECK(lwo_run({"concentration", "--input", "/nonexistent/v.txt"}).code == 1);
    CHECK(lwo_run({"concentration", "--values", "1", "--format", "csv"}).code == 1);
    CHECK(lwo_run({"mc-sing", "--n", "0", "--trials", "10"}).code == 1);
    CHECK(lwo_run({"--help"}).code == 0);
}

TEST_CASE("exit codes for verification and resource failures") {
    // default K = 8 makes s = 8! exceed k^(d+eps)
    auto r = lwo_run({"inverse2", "--values", "1x100", "--mu", "1/2", "--d", "2", "--k", "10"});
    CHECK(r.code == 2);
    r = lwo_run({"inverse1", "--values", "1099511627791,1099511627833,1099511627877,1099511627869,1099511627787,"
                                         "1099511627773,1099511627761,1099511627767,1099511627753,1099511627749,"
                                         "1099511627737,1099511627731,1099511627729,1099511627719,1099511627711,"
                                         "1099511627701,1099511627697",
                 "--d", "2", "--k", "4"});
    CHECK(r.code == 2);
    CHECK(json::parse(r.out)["failure"]["kind"] == "rank_overflow");
    r = lwo_run({"concentration", "--values", "1,1000000000000"});
    CHECK(r.code == 3);
}

TEST_CASE("artifacts round-trip through verify") {
    TempDir t;
    const auto v = t.file("v.txt", "1x40\n2x30\n3x10\n");
    const std::vector<std::vector<std::string>> runs = {
        {"inverse0", "--input", v, "--d", "3"},
        {"inverse1", "--input", v, "--mu", "1/2", "--d", "3", "--k", "4"},
        {"inverse2", "--input", v, "--mu", "1/2", "--d", "3", "--k", "8", "--K", "2"},
    };
    int i = 0;
    for (auto args : runs) {
        const auto out = t.at("c" + std::to_string(i++) + ".json");
        args.push_back("--output");
        args.push_back(out);
        const auto r = lwo_run(args);
        INFO(args[0] << ": " << r.err);
        REQUIRE(r.code == 0);
        CHECK(r.out.empty());
        CHECK_FALSE(fs::exists(out + ".tmp"));
        const auto report = json::parse(slurp(out))["report"];
        const auto again = lwo_run({"verify", "--cert", out});
        CHECK(again.code == 0);
        CHECK(json::parse(again.out)["report"] == report);
    }

    const auto g = t.file("g.json", R"({"offset":"0","generators":["1","1000000000"],"lower":[-5,-5],"upper":[5,5]})");
    const auto d = t.at("d.json");
    REQUIRE(lwo_run({"discretize", "--input", g, "--r0", "10000", "--s", "100", "--output", d}).code == 0);
    const auto again = lwo_run({"verify", "--cert", d});
    CHECK(again.code == 0);
    CHECK(json::parse(again.out)["report"]["passed"] == true);

    // a tampered certificate fails re-verification with exit 2
    json cert = json::parse(slurp(t.at("c1.json")));
    cert["certificate"]["coverage"]["entries"][0]["witness"][0] = 7;
    const auto bad = t.file("bad.json", cert.dump());
    CHECK(lwo_run({"verify", "--cert", bad}).code == 2);
    CHECK(lwo_run({"verify", "--cert", t.file("junk.json", "{\"command\": 3")}).code == 1);
}

TEST_CASE("a failing command leaves no output file") {
    TempDir t;
    const auto out = t.at("never.json");
    CHECK(lwo_run({"concentration", "--values", "1,1000000000000", "--output", out}).code == 3);
    CHECK_FALSE(fs::exists(out));
    CHECK_FALSE(fs::exists(out + ".tmp"));
}

TEST_CASE("mc-sing row and seed echo") {
    auto r = lwo_run({"mc-sing", "--n", "2", "--mu", "1", "--trials", "100000", "--seed", "7"});
    REQUIRE(r.code == 0);
    std::istringstream lines(r.out);
    std::string header, row;
    std::getline(lines, header);
    std::getline(lines, row);
    CHECK(header == "n,mu,trials,seed,quantity,estimate,ci_low,ci_high,comparator_value,runtime_ms");
    std::vector<std::string> cells;
    std::stringstream cs(row);
    for (std::string c; std::getline(cs, c, ',');) {
        cells.push_back(c);
    }
    REQUIRE(cells.size() == 9);  // trailing runtime_ms is empty
    CHECK(cells[3] == "7");
    CHECK(std::stod(cells[6]) <= 0.5);
    CHECK(std::stod(cells[7]) >= 0.5);
    CHECK(std::stod(cells[8]) == 0.5);

    setenv("LWO_SEED", "11", 1);
    r = lwo_run({"mc-sing", "--n", "2", "--trials", "10", "--format", "json"});
    unsetenv("LWO_SEED");
    CHECK(json::parse(r.out)["seed"] == 11);
    setenv("LWO_SEED", "nope", 1);
    CHECK(lwo_run({"mc-sing", "--n", "2", "--trials", "10"}).code == 1);
    unsetenv("LWO_SEED");
}

TEST_CASE("sweeps") {
    TempDir t;
    auto r = lwo_run({"sweep", "--config", t.file("a.json", R"({"quantity":"concentration","n":[20,40,80]})")});
    REQUIRE(r.code == 0);
    std::istringstream lines(r.out);
    std::string line;
    std::getline(lines, line);
    std::vector<double> p;
    while (std::getline(lines, line)) {
        std::stringstream cs(line);
        std::string c;
        for (int i = 0; i < 6; ++i) {
            std::getline(cs, c, ',');
        }
        p.push_back(std::stod(c));
    }
    REQUIRE(p.size() == 3);
    CHECK(p[0] > p[1]);
    CHECK(p[1] > p[2]);

    CHECK(lwo_run({"sweep", "--config", t.file("b.json", R"({"quantity":"concentration","n":[]})")}).code == 1);
    CHECK(lwo_run({"sweep", "--config", t.file("c.json", R"({"quantity":"volume","n":[3]})")}).code == 1);

    const auto cfg = t.file("d.json", R"({"quantity":"singularity","n":[2,3],"mu":["1","1/2"],"trials":3000,"seed":4})");
    r = lwo_run({"sweep", "--config", cfg});
    CHECK(r.code == 0);
    CHECK(std::count(r.out.begin(), r.out.end(), '\n') == 5);
    CHECK(lwo_run({"sweep", "--config", cfg}).out == r.out);
}

TEST_CASE("identical invocations give identical bytes") {
    TempDir t;
    const auto v = t.file("v.txt", "1x20\n2x12\n5x6\n");
    const auto g = t.file("g.json", R"({"offset":"0","generators":["3","70000"],"lower":[-4,-4],"upper":[4,4]})");
    const std::vector<std::vector<std::string>> cmds = {
        {"concentration", "--input", v, "--mu", "1/3"},
        {"inverse0", "--input", v, "--d", "2"},
        {"inverse1", "--input", v, "--mu", "1/2", "--d", "3", "--k", "3"},
        {"inverse2", "--input", v, "--mu", "1/2", "--d", "3", "--k", "8", "--K", "2"},
        {"discretize", "--input", g, "--r0", "100", "--s", "10"},
        {"mc-sing", "--n", "4", "--mu", "1/2", "--trials", "2000", "--seed", "3", "--threads", "3"},
        {"mc-tail", "--n", "5", "--trials", "500", "--seed", "3", "--B", "1.5", "--format", "json"},
    };
    for (const auto& args : cmds) {
        const auto a = lwo_run(args);
        const auto b = lwo_run(args);
        INFO(args[0]);
        CHECK(a.code == b.code);
        CHECK_FALSE(a.out.empty());
        CHECK(a.out == b.out);
    }
}
