#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "mvdyn/cli.hpp"

namespace {

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run run(std::vector<std::string> args) {
    std::ostringstream out, err;
    int code = mvdyn::cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
    auto dir = fs::temp_directory_path() / "mvdyn_cli_test";
    fs::create_directories(dir);
    return dir / name;
}

void write(const fs::path& p, const std::string& text) {
    std::ofstream f(p);
    f << text;
}

std::string read(const fs::path& p) {
    std::ifstream f(p);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

const std::vector<std::string> kBN = {"--p1", "-1,-1", "--p0", "1,-2,1"};
const std::vector<std::string> kObstruction = {"--p1", "0,1", "--p0", "0,-1,1"};

std::vector<std::string> with(std::vector<std::string> head, const std::vector<std::string>& dyn,
                              std::vector<std::string> tail = {}) {
    head.insert(head.end(), dyn.begin(), dyn.end());
    head.insert(head.end(), tail.begin(), tail.end());
    return head;
}

// One invocation per subcommand, all cheap.
std::vector<std::vector<std::string>> all_commands() {
    return {
        with({"eval"}, kBN, {"--z", "9"}),
        with({"compose"}, kObstruction, {"--seed", "5"}),
        with({"trace"}, {"--p1", "0", "--p0", "0,-1"}),
        with({"trace"}, kObstruction, {"--family", "TT", "--center", "1", "--radius", "0.1"}),
        with({"classify"}, kObstruction, {"--center", "1", "--radius", "0.1"}),
        with({"verdict"}, kObstruction),
        {"check-group", "--bound", "8"},
        {"check-action", "--pairs", "4"},
        with({"invertibility"}, kObstruction),
        {"sufficiency-probe"},
    };
}

json first_document(const std::string& out) {
    std::string first = out.substr(0, out.find('\n'));
    if (!first.empty() && first.front() == '{' && first.back() == '}') return json::parse(first);
    return json::parse(out);
}

}  // namespace

TEST_CASE("eval on (1 +- sqrt z)^2") {
    auto r0 = run(with({"eval"}, kBN, {"--z", "0"}));
    CHECK(r0.code == 0);
    CHECK(json::parse(r0.out)["images"] == "[1, 1]");
    auto r9 = run(with({"eval"}, kBN, {"--z", "9"}));
    CHECK(r9.code == 0);
    CHECK(json::parse(r9.out)["images"] == "[16, 4]");
}

TEST_CASE("exit codes") {
    CHECK(run({"eval", "--p1", "1,x", "--p0", "1", "--z", "0"}).code == mvdyn::cli::kExitParse);
    CHECK(run({"eval", "--p1", "1", "--p0", "1", "--z", "1+"}).code == mvdyn::cli::kExitParse);
    CHECK(run({"eval", "--p1", "1", "--p0", "1"}).code == mvdyn::cli::kExitParse);
    CHECK(run({"eval", "--bogus"}).code == mvdyn::cli::kExitParse);
    CHECK(run({}).code == mvdyn::cli::kExitParse);
    CHECK(run({"trace", "--p1", "0", "--p0", "0,-1", "--center", "1", "--radius", "1"}).code == mvdyn::cli::kExitNumeric);
    CHECK(run({"sufficiency-probe", "--gamma", "0,0,1"}).code == mvdyn::cli::kExitNumeric);
    auto help = run({"eval", "--help"});
    CHECK(help.code == 0);
    CHECK(help.out.find("--p1") != std::string::npos);
}

TEST_CASE("config rejects unknown keys") {
    auto p = scratch("unknown.json");
    write(p, R"({"dynamics": {"p1": "0", "p0": "0,-1"}, "colour": "red"})");
    CHECK(run({"eval", "--config", p.string(), "--z", "1"}).code == mvdyn::cli::kExitParse);
    write(p, R"({"dynamics": {"p1": "0", "p0": "0,-1", "p2": "1"}})");
    CHECK(run({"eval", "--config", p.string(), "--z", "1"}).code == mvdyn::cli::kExitParse);
    write(p, R"({"tolerances": {"match": 1e-6, "slack": 1}})");
    CHECK(run({"check-action"}).code == 0);
    CHECK(run({"check-action", "--config", p.string()}).code == mvdyn::cli::kExitParse);
    write(p, "{ not json");
    CHECK(run({"check-action", "--config", p.string()}).code == mvdyn::cli::kExitParse);
}

TEST_CASE("config file and flags agree") {
    auto p = scratch("bn.json");
    write(p, R"({"dynamics": {"p1": "-1,-1", "p0": "1,-2,1"}, "z": "9"})");
    auto from_file = run({"eval", "--config", p.string()});
    auto from_flags = run(with({"eval"}, kBN, {"--z", "9"}));
    CHECK(from_file.code == 0);
    CHECK(from_file.out == from_flags.out);
}

TEST_CASE("every command is deterministic and round-trips its config echo") {
    for (auto& args : all_commands()) {
        CAPTURE(args[0]);
        auto a = run(args);
        auto b = run(args);
        REQUIRE(a.code == 0);
        CHECK(a.out == b.out);

        json echo = first_document(a.out)["config"];
        auto p = scratch("echo_" + args[0] + ".json");
        write(p, echo.dump(2));
        auto c = run({args[0], "--config", p.string()});
        CHECK(c.code == 0);
        CHECK(c.out == a.out);
    }
}

TEST_CASE("trace emits NDJSON with a summary") {
    auto r = run({"trace", "--p1", "0", "--p0", "0,-1"});
    REQUIRE(r.code == 0);
    std::istringstream in(r.out);
    std::string line;
    std::vector<json> rows;
    while (std::getline(in, line)) rows.push_back(json::parse(line));
    REQUIRE(rows.size() > 3);
    CHECK(rows.front()["command"] == "trace");
    CHECK(rows[1]["step"] == 0);
    auto summary = rows.back()["summary"];
    CHECK(summary["permutation"] == json::array({1, 0}));
    CHECK(summary["cycle_windings"] == json::array({1}));
}

TEST_CASE("verdicts for the reference dynamics") {
    CHECK(json::parse(run(with({"verdict"}, kBN)).out)["verdict"] == "KNOWN_GROUP_DEFINABLE");
    CHECK(json::parse(run(with({"verdict"}, kObstruction)).out)["verdict"] == "NOT_GROUP_DEFINABLE");
    auto ca = json::parse(run({"verdict", "--p1", "-1,1,-1", "--p0", "1,2,-1,-2,1"}).out);
    CHECK(ca["verdict"] == "NOT_GROUP_DEFINABLE");
    CHECK(ca["sufficiency"]["certificate"] == true);
}

TEST_CASE("classify, groups, action, invertibility, probe") {
    auto cl = json::parse(run(with({"classify"}, kObstruction, {"--center", "1", "--radius", "0.1"})).out);
    CHECK(cl["splitting"]["classification"] == "Type1");

    auto g = json::parse(run({"check-group", "--bound", "20"}).out);
    CHECK(g["ok"] == true);
    CHECK(g["associativity"]["checked"] == 21 * 21 * 21);

    auto tp = scratch("broken.table");
    write(tp, "carrier: e a\nunit: e\ninv: e e, a e\ne,e -> [e, e]\ne,a -> [a, a]\na,e -> [a, a]\na,a -> [a, a]\n");
    auto broken = json::parse(run({"check-group", "--table", tp.string()}).out);
    CHECK(broken["ok"] == false);
    CHECK_FALSE(broken["unit_inverse"]["violations"].empty());

    auto act = json::parse(run({"check-action"}).out);
    CHECK(act["ok"] == true);
    CHECK(act["max_distance"].get<double>() < 1e-9);

    auto inv = json::parse(run(with({"invertibility"}, kBN, {"--grid-corner=-2.25-2.25i", "--grid-step", "0.75"})).out);
    CHECK(inv["strongly_invertible_on_grid"] == false);
    CHECK(inv["violations"] == json::array({"0"}));

    auto pr = json::parse(run({"sufficiency-probe"}).out);
    CHECK(pr["probe"]["certificate"] == true);
}

TEST_CASE("--out writes the document to a file") {
    auto p = scratch("out.json");
    fs::remove(p);
    auto r = run(with({"eval"}, kBN, {"--z", "0", "--out", p.string()}));
    CHECK(r.code == 0);
    CHECK(r.out.empty());
    CHECK(json::parse(read(p))["images"] == "[1, 1]");
}
