#include <doctest.h>

#include "stratum/cli.hpp"

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

using namespace stratum;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    int code;
    std::string out;
    std::string err;
};

Outcome cli(std::vector<std::string> args) {
    args.insert(args.begin(), "stratum");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out;
    std::ostringstream err;
    const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::string fx(const std::string& name) { return (fs::path(STRATUM_FIXTURES) / name).string(); }

fs::path scratch(const std::string& name) {
    const auto dir = fs::temp_directory_path() / ("stratum_cli_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

void write(const fs::path& path, const std::string& text) {
    std::ofstream(path) << text;
}

std::string plan_file(const fs::path& dir) {
    const auto r = cli({"plan", fx("smart_traffic.stratum"), "--topology", fx("topology_3node.json")});
    REQUIRE(r.code == 0);
    const auto path = dir / "plan.json";
    write(path, r.out);
    return path.string();
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("validate") {
    auto ok = cli({"validate", fx("smart_traffic.stratum")});
    CHECK(ok.code == 0);
    CHECK(nlohmann::json::parse(ok.out)["ok"] == true);

    auto cyclic = cli({"validate", fx("cyclic.stratum")});
    CHECK(cyclic.code == 1);
    const auto doc = nlohmann::json::parse(cyclic.out);
    CHECK(doc["ok"] == false);
    CHECK(doc["errors"][0]["code"] == "E_CYCLE");
    CHECK(cyclic.err.find("E_CYCLE a") != std::string::npos);

    const auto dir = scratch("validate");
    write(dir / "bad.stratum", "pipeline p { component a { cpu: -1 } }");
    CHECK(cli({"validate", (dir / "bad.stratum").string()}).code == 1);
    CHECK(cli({"validate", (dir / "missing.stratum").string()}).code == 3);
    fs::remove_all(dir);
}

TEST_CASE("usage errors exit with 1") {
    CHECK(cli({}).code == 1);
    CHECK(cli({"bogus"}).code == 1);
    CHECK(cli({"plan", fx("smart_traffic.stratum")}).code == 1);
    CHECK(cli({"plan", fx("smart_traffic.stratum"), "--topology", fx("topology_3node.json"), "--exact", "--heuristic"})
              .code == 1);
    CHECK(cli({"--help"}).code == 0);
}

TEST_CASE("plan") {
    const auto r = cli({"plan", fx("smart_traffic.stratum"), "--topology", fx("topology_3node.json")});
    REQUIRE(r.code == 0);
    const auto doc = nlohmann::json::parse(r.out);
    CHECK(doc["cost_per_hour"].get<double>() == doctest::Approx(3.45).epsilon(1e-12));
    CHECK(doc["mode"] == "exact");
    CHECK(doc["assignments"]["trainer"] == "cloud1");

    auto greedy = cli({"plan", fx("adversarial.stratum"), "--topology", fx("adversarial_topology.json"), "--heuristic"});
    CHECK(greedy.code == 2);
    CHECK(greedy.err.find("not a proof of infeasibility") != std::string::npos);
    auto exact = cli({"plan", fx("adversarial.stratum"), "--topology", fx("adversarial_topology.json"), "--exact"});
    CHECK(exact.code == 0);

    auto none = cli({"plan", fx("smart_traffic.stratum"), "--topology", fx("topology_no_gpu.json"), "--exact"});
    CHECK(none.code == 2);
    CHECK(none.err.find("proven by exhaustive search") != std::string::npos);

    const auto dir = scratch("plan");
    write(dir / "topo.json", "{\"nodes\": 7}");
    CHECK(cli({"plan", fx("smart_traffic.stratum"), "--topology", (dir / "topo.json").string()}).code == 3);
    fs::remove_all(dir);
}

TEST_CASE("generate") {
    const auto dir = scratch("generate");
    const auto plan = plan_file(dir);
    const auto out = dir / "manifests";
    auto r = cli({"generate", fx("smart_traffic.stratum"), "--topology", fx("topology_3node.json"), "--plan", plan,
                  "--registry", fx("registry.json"), "--out", out.string()});
    REQUIRE(r.code == 0);
    CHECK(nlohmann::json::parse(r.out)["files"].size() == 4);
    std::ifstream edge(out / "edge1.deploy.yaml");
    std::stringstream text;
    text << edge.rdbuf();
    CHECK(text.str().find("model: detector@v2") != std::string::npos);

    auto min_latency = cli({"generate", fx("smart_traffic.stratum"), "--topology", fx("topology_3node.json"), "--plan",
                            plan, "--registry", fx("registry.json"), "--strategy", "minimize:latency_ms", "--out",
                            (dir / "m2").string()});
    CHECK(min_latency.code == 0);

    write(dir / "empty.json", "{\"models\": []}");
    CHECK(cli({"generate", fx("smart_traffic.stratum"), "--topology", fx("topology_3node.json"), "--plan", plan,
               "--registry", (dir / "empty.json").string(), "--out", (dir / "m3").string()})
              .code == 2);

    write(dir / "blocker", "x");
    CHECK(cli({"generate", fx("smart_traffic.stratum"), "--topology", fx("topology_3node.json"), "--plan", plan,
               "--registry", fx("registry.json"), "--out", (dir / "blocker" / "sub").string()})
              .code == 3);

    write(dir / "foreign.json", R"({"assignments":{"x":"edge1"},"cost_per_hour":0,"mode":"exact","replicas":{"x":1}})");
    CHECK(cli({"generate", fx("smart_traffic.stratum"), "--topology", fx("topology_3node.json"), "--plan",
               (dir / "foreign.json").string(), "--registry", fx("registry.json"), "--out", (dir / "m4").string()})
              .code == 3);
    fs::remove_all(dir);
}

TEST_CASE("simulate") {
    const auto dir = scratch("simulate");
    const auto plan = plan_file(dir);
    auto r = cli({"simulate", fx("smart_traffic.stratum"), "--topology", fx("topology_3node.json"), "--plan", plan,
                  "--ticks", "12", "--controller", "--override", "camera_ingest:0:60", "--out", (dir / "sim").string()});
    REQUIRE(r.code == 0);
    CHECK(r.out.rfind("tick,component,host,replicas,in_rate,utilization,queue,completions\n", 0) == 0);
    std::ifstream log(dir / "sim" / "actions.log");
    std::stringstream text;
    text << log.rdbuf();
    CHECK(text.str() == "t=3 recognizer saturated gpu\nt=8 recognizer saturated gpu\n");
    CHECK(fs::exists(dir / "sim" / "flows.csv"));
    CHECK(fs::exists(dir / "sim" / "metrics.csv"));

    CHECK(cli({"simulate", fx("smart_traffic.stratum"), "--topology", fx("topology_3node.json"), "--plan", plan,
               "--ticks", "3", "--override", "recognizer:0:5"})
              .code == 1);
    CHECK(cli({"simulate", fx("smart_traffic.stratum"), "--topology", fx("topology_3node.json"), "--plan", plan,
               "--ticks", "0"})
              .code == 1);
    CHECK(cli({"simulate", fx("smart_traffic.stratum"), "--topology", fx("topology_no_gpu.json"), "--plan", plan,
               "--ticks", "3"})
              .code == 2);
    fs::remove_all(dir);
}

TEST_CASE("registry") {
    const auto dir = scratch("registry");
    const std::string reg = (dir / "models.json").string();
    auto add = cli({"registry", "--registry", reg, "add", "--name", "det", "--version", "1", "--metric", "accuracy=0.8"});
    REQUIRE(add.code == 0);
    CHECK(nlohmann::json::parse(add.out)["created_seq"] == 0);
    CHECK(cli({"registry", "--registry", reg, "add", "--name", "det", "--version", "2", "--metric", "accuracy=0.9"}).code == 0);
    CHECK(cli({"registry", "--registry", reg, "add", "--name", "det", "--version", "2"}).code == 1);

    auto list = cli({"registry", "--registry", reg, "list"});
    CHECK(list.code == 0);
    CHECK(nlohmann::json::parse(list.out)["models"].size() == 2);

    auto best = cli({"registry", "--registry", reg, "select", "--name", "det", "--strategy", "maximize:accuracy"});
    CHECK(best.code == 0);
    CHECK(nlohmann::json::parse(best.out)["version"] == "2");
    CHECK(cli({"registry", "--registry", reg, "select", "--name", "det", "--strategy", "maximize:f1"}).code == 1);
    CHECK(cli({"registry", "--registry", reg, "select", "--name", "nope", "--strategy", "maximize:accuracy"}).code == 1);
    CHECK(cli({"registry", "--registry", (dir / "absent.json").string(), "list"}).code == 3);
    fs::remove_all(dir);
}

}
