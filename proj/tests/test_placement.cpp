#include <doctest.h>

#include "stratum/placement.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"

#include <fstream>
#include <sstream>

using namespace stratum;

namespace {

std::string fixture(const std::string& name) {
    std::ifstream in(std::string(STRATUM_FIXTURES) + "/" + name);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

Component comp(const std::string& name, Quantity cpu, std::int64_t mem, bool gpu = false) {
    Component c;
    c.name = name;
    c.kind = ComponentKind::ingestion;
    c.cpu = cpu;
    c.mem_mb = mem;
    if (gpu) c.gpu = GpuNeed::required;
    return c;
}

std::vector<std::string> hosts_of(const PipelineSpec& spec, const PlacementPlan& plan) {
    std::vector<std::string> out;
    for (const auto& c : spec.components) out.push_back(plan.assignments.at(c.name));
    return out;
}

const PipelineSpec& smart_traffic() {
    static const PipelineSpec spec = parse_spec(fixture("smart_traffic.stratum"));
    return spec;
}

const ResourceTopology& three_node() {
    static const ResourceTopology topology = load_topology(fixture("topology_3node.json"));
    return topology;
}

}  // namespace

TEST_SUITE("placement") {

TEST_CASE("exact fit on a single node is feasible") {
    const ResourceTopology t({{"n", Tier::edge, 2, 1024, 0, Quantity(1, 10)}}, {});
    const PipelineSpec spec{"p", {comp("a", 1, 512), comp("b", 1, 512)}, {{"a", "b", {}}}};
    const auto plan = make_plan(spec, t, {"n", "n"}, PlanMode::exact);
    CHECK(check_feasible(spec, t, plan).feasible());
    CHECK(plan.cost_per_hour == Quantity(1, 5));

    auto heavier = spec;
    heavier.components[1].mem_mb = 513;
    const auto verdict = check_feasible(heavier, t, make_plan(heavier, t, {"n", "n"}, PlanMode::exact));
    CHECK(verdict.violations == std::vector<Violation>{{Rule::cap_mem, "n"}});
}

TEST_CASE("gpu demand on a gpu-less node") {
    const ResourceTopology t({{"n", Tier::edge, 8, 8192, 0, 0}}, {});
    const PipelineSpec spec{"p", {comp("g", 1, 1, true)}, {}};
    const auto verdict = check_feasible(spec, t, make_plan(spec, t, {"n"}, PlanMode::exact));
    CHECK(verdict.violations == std::vector<Violation>{{Rule::cap_gpu, "n"}});
    CHECK_FALSE(plan_exact(spec, t).has_value());
}

TEST_CASE("tier, latency and reachability violations") {
    const ResourceTopology t({{"e", Tier::edge, 8, 8192, 0, 0}, {"c", Tier::cloud, 8, 8192, 0, 0},
                              {"f", Tier::fog, 8, 8192, 0, 0}},
                             {{"e", "c", 30, 10}});
    auto a = comp("a", 1, 1);
    a.tier_hint = TierHint::edge;
    const PipelineSpec spec{"p", {a, comp("b", 1, 1), comp("x", 1, 1)}, {{"a", "b", Quantity(20)}, {"a", "x", Quantity(20)}}};
    const auto verdict = check_feasible(spec, t, make_plan(spec, t, {"c", "e", "f"}, PlanMode::exact));
    CHECK(verdict.has(Rule::tier));
    CHECK(verdict.violations == std::vector<Violation>{{Rule::tier, "a"}, {Rule::latency, "a->b"}, {Rule::unreachable, "a->x"}});
}

TEST_CASE("malformed plans are rejected") {
    const auto& spec = smart_traffic();
    const auto& t = three_node();
    auto plan = *plan_exact(spec, t);
    auto missing = plan;
    missing.assignments.erase("trainer");
    CHECK_THROWS_AS(check_feasible(spec, t, missing), PlanError);
    auto unknown_node = plan;
    unknown_node.assignments["trainer"] = "moon";
    CHECK_THROWS_AS(check_feasible(spec, t, unknown_node), PlanError);
    auto extra = plan;
    extra.assignments["ghost"] = "edge1";
    CHECK_THROWS_AS(check_feasible(spec, t, extra), PlanError);
}

TEST_CASE("cheapest node wins when both fit") {
    const ResourceTopology t({{"pricey", Tier::cloud, 4, 4096, 0, Quantity(4, 10)},
                              {"cheap", Tier::edge, 4, 4096, 0, Quantity(1, 20)}},
                             {});
    const PipelineSpec spec{"p", {comp("a", 1, 100)}, {}};
    const auto plan = plan_exact(spec, t);
    REQUIRE(plan);
    CHECK(plan->assignments.at("a") == "cheap");
    CHECK(plan->cost_per_hour == Quantity(1, 20));
}

TEST_CASE("gpu requirement forces the expensive node") {
    const ResourceTopology t({{"cheap", Tier::edge, 4, 4096, 0, Quantity(1, 20)},
                              {"pricey", Tier::cloud, 4, 4096, 1, Quantity(4, 10)}},
                             {});
    const PipelineSpec spec{"p", {comp("a", 1, 100, true)}, {}};
    const auto plan = plan_exact(spec, t);
    REQUIRE(plan);
    CHECK(plan->assignments.at("a") == "pricey");
}

TEST_CASE("equal cost ties go to the smallest node id") {
    const ResourceTopology t({{"zeta", Tier::edge, 4, 4096, 0, 1}, {"alpha", Tier::edge, 4, 4096, 0, 1}}, {});
    const PipelineSpec spec{"p", {comp("a", 1, 100), comp("b", 1, 100)}, {}};
    const auto plan = plan_exact(spec, t);
    REQUIRE(plan);
    CHECK(hosts_of(spec, *plan) == std::vector<std::string>{"alpha", "alpha"});
}

TEST_CASE("smart traffic costs 3.45 per hour under both solvers") {
    const auto& spec = smart_traffic();
    const auto& t = three_node();
    const std::vector<std::string> expected = {"edge1", "edge1", "fog1", "cloud1", "edge1"};
    const auto exact = plan_exact(spec, t);
    REQUIRE(exact);
    CHECK(hosts_of(spec, *exact) == expected);
    CHECK(exact->cost_per_hour == Quantity(345, 100));
    CHECK(format_decimal(exact->cost_per_hour) == "3.45");
    CHECK(exact->mode == PlanMode::exact);

    const auto greedy = plan_heuristic(spec, t);
    REQUIRE(greedy);
    CHECK(hosts_of(spec, *greedy) == expected);
    CHECK(greedy->cost_per_hour == Quantity(345, 100));
    CHECK(greedy->mode == PlanMode::heuristic);

    const auto reference = testing::brute_force_optimum(spec, t);
    REQUIRE(reference);
    CHECK(reference->hosts == expected);
    CHECK(reference->cost == Quantity(345, 100));
}

TEST_CASE("smart traffic loads per node") {
    const auto& spec = smart_traffic();
    const auto& t = three_node();
    const auto plan = *plan_exact(spec, t);
    Quantity edge_cpu = 0;
    std::int64_t edge_mem = 0;
    for (const auto& c : spec.components) {
        if (plan.assignments.at(c.name) != "edge1") continue;
        edge_cpu += c.cpu * plan.replicas.at(c.name);
        edge_mem += c.mem_mb * plan.replicas.at(c.name);
    }
    CHECK(edge_cpu == 3);
    CHECK(edge_mem == 2816);
}

TEST_CASE("greedy misses the co-location the exact solver finds") {
    const auto spec = parse_spec(fixture("adversarial.stratum"));
    const auto t = load_topology(fixture("adversarial_topology.json"));
    CHECK_FALSE(plan_heuristic(spec, t).has_value());
    const auto exact = plan_exact(spec, t);
    REQUIRE(exact);
    CHECK(hosts_of(spec, *exact) == std::vector<std::string>{"pricey", "pricey"});
    CHECK(exact->cost_per_hour == Quantity(4, 5));
}

TEST_CASE("assignment count saturates") {
    const ResourceTopology t({{"a", Tier::edge, 1, 1, 0, 0}, {"b", Tier::edge, 1, 1, 0, 0}}, {});
    PipelineSpec spec{"p", {}, {}};
    for (int i = 0; i < 70; ++i) spec.components.push_back(comp("c" + std::to_string(i), 1, 1));
    CHECK(assignment_count(spec, t) == UINT64_MAX);
    spec.components.resize(20);
    CHECK(assignment_count(spec, t) == (1ULL << 20));
}

TEST_CASE("plan JSON round trip") {
    const auto plan = *plan_exact(smart_traffic(), three_node());
    CHECK(plan_from_json(plan_to_json(plan)) == plan);
    CHECK_THROWS_AS(plan_from_json("{\"assignments\": 1}"), std::invalid_argument);
    CHECK_THROWS_AS(plan_from_json("nope"), std::invalid_argument);
}

TEST_CASE("exact solver agrees with exhaustive enumeration") {
    testing::Gen g(2024);
    int feasible = 0;
    for (int i = 0; i < 300; ++i) {
        const auto spec = testing::random_placement_spec(g);
        const auto t = testing::random_topology(g);
        const auto reference = testing::brute_force_optimum(spec, t);
        const auto exact = plan_exact(spec, t);
        REQUIRE(reference.has_value() == exact.has_value());
        if (!exact) continue;
        ++feasible;
        CHECK(exact->cost_per_hour == reference->cost);
        CHECK(hosts_of(spec, *exact) == reference->hosts);
        CHECK(check_feasible(spec, t, *exact).feasible());
    }
    CHECK(feasible > 50);
}

TEST_CASE("heuristic plans are feasible and never beat the optimum") {
    testing::Gen g(99);
    for (int i = 0; i < 300; ++i) {
        const auto spec = testing::random_placement_spec(g);
        const auto t = testing::random_topology(g);
        const auto greedy = plan_heuristic(spec, t);
        if (!greedy) continue;
        CHECK(check_feasible(spec, t, *greedy).feasible());
        std::vector<int> replicas;
        for (const auto& c : spec.components) replicas.push_back(c.replicas);
        CHECK(testing::reference_feasible(spec, t, hosts_of(spec, *greedy), replicas));
        const auto exact = plan_exact(spec, t);
        REQUIRE(exact);
        CHECK(exact->cost_per_hour <= greedy->cost_per_hour);
    }
}

TEST_CASE("solvers are deterministic") {
    testing::Gen g(5);
    for (int i = 0; i < 50; ++i) {
        const auto spec = testing::random_placement_spec(g);
        const auto t = testing::random_topology(g);
        CHECK(plan_exact(spec, t) == plan_exact(spec, t));
        CHECK(plan_heuristic(spec, t) == plan_heuristic(spec, t));
    }
}

TEST_CASE("dropping a sink never raises the optimum") {
    testing::Gen g(31);
    for (int i = 0; i < 200; ++i) {
        auto spec = testing::random_placement_spec(g);
        const auto t = testing::random_topology(g);
        const auto full = plan_exact(spec, t);
        if (!full || spec.components.size() < 2) continue;
        // The last component has no outgoing flows in generated specs.
        const std::string last = spec.components.back().name;
        spec.components.pop_back();
        std::erase_if(spec.flows, [&](const Flow& f) { return f.dst == last || f.src == last; });
        const auto reduced = plan_exact(spec, t);
        REQUIRE(reduced);
        CHECK(reduced->cost_per_hour <= full->cost_per_hour);
    }
}

}
