#include <doctest.h>

#include "stratum/spec_lang.hpp"
#include "support/generators.hpp"

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

ParseError parse_failure(const std::string& source) {
    try {
        parse_spec(source);
    } catch (const ParseError& e) {
        return e;
    }
    FAIL("expected a parse error for: " << source);
    return ParseError(0, 0, "");
}

}  // namespace

TEST_SUITE("spec_lang") {

TEST_CASE("minimal component gets defaults") {
    const auto spec = parse_spec("pipeline p { component a { kind: ingestion cpu: 1 mem: 128 } }");
    CHECK(spec.name == "p");
    REQUIRE(spec.components.size() == 1);
    const auto& a = spec.components[0];
    CHECK(a.kind == ComponentKind::ingestion);
    CHECK(a.cpu == 1);
    CHECK(a.mem_mb == 128);
    CHECK(a.gpu == GpuNeed::none);
    CHECK(a.tier_hint == TierHint::any);
    CHECK(a.replicas == 1);
    CHECK(a.rate == 0);
    CHECK(a.service_rate == 10);
    CHECK_FALSE(a.model.has_value());
    CHECK(spec.flows.empty());
}

TEST_CASE("empty body is legal") {
    const auto spec = parse_spec("pipeline p { }");
    CHECK(spec.components.empty());
    CHECK(spec.flows.empty());
}

TEST_CASE("smart traffic fixture") {
    const auto spec = parse_spec(fixture("smart_traffic.stratum"));
    REQUIRE(spec.components.size() == 5);
    REQUIRE(spec.flows.size() == 4);

    const auto* camera = spec.find("camera_ingest");
    const auto* recognizer = spec.find("recognizer");
    const auto* controller = spec.find("signal_controller");
    const auto* trainer = spec.find("trainer");
    const auto* dashboard = spec.find("dashboard");
    REQUIRE((camera && recognizer && controller && trainer && dashboard));

    CHECK(camera->kind == ComponentKind::ingestion);
    CHECK(camera->tier_hint == TierHint::edge);
    CHECK(recognizer->kind == ComponentKind::inference);
    CHECK(recognizer->tier_hint == TierHint::edge);
    CHECK(recognizer->gpu == GpuNeed::required);
    CHECK(recognizer->model == ModelRef{"detector", "latest"});
    CHECK(controller->kind == ComponentKind::stream);
    CHECK(controller->tier_hint == TierHint::fog);
    CHECK(trainer->kind == ComponentKind::batch);
    CHECK(trainer->tier_hint == TierHint::cloud);
    CHECK(dashboard->kind == ComponentKind::visualization);
    CHECK(dashboard->tier_hint == TierHint::any);

    CHECK(spec.flows[0] == Flow{"camera_ingest", "recognizer", Quantity(50)});
    CHECK(spec.flows[1] == Flow{"recognizer", "signal_controller", Quantity(100)});
    CHECK_FALSE(spec.flows[2].max_latency_ms.has_value());
}

TEST_CASE("negative cpu is reported at the literal") {
    const auto e = parse_failure("pipeline p { component a { cpu: -1 kind: stream mem: 1 } }");
    CHECK(e.line() == 1);
    CHECK(e.column() == 33);
}

TEST_CASE("error positions across lines") {
    const std::string source =
        "pipeline p {\n"
        "  component a {\n"
        "    kind: ingestion\n"
        "    colour: red\n"
        "  }\n"
        "}\n";
    const auto e = parse_failure(source);
    CHECK(e.line() == 4);
    CHECK(e.column() == 5);
    CHECK(e.message().find("unknown keyword") != std::string::npos);
}

TEST_CASE("rejected inputs") {
    // missing required property
    CHECK_THROWS_AS(parse_spec("pipeline p { component a { kind: stream cpu: 1 } }"), ParseError);
    // inference without a model
    CHECK_THROWS_AS(parse_spec("pipeline p { component a { kind: inference cpu: 1 mem: 1 } }"), ParseError);
    // model on a non-inference component
    const auto e = parse_failure("pipeline p { component a { kind: stream cpu: 1 mem: 1 model: m@1 } }");
    CHECK(e.column() == 55);
    // mem must be integral
    CHECK_THROWS_AS(parse_spec("pipeline p { component a { kind: stream cpu: 1 mem: 1.5 } }"), ParseError);
    CHECK_THROWS_AS(parse_spec("pipeline p { component a { kind: stream cpu: 1 mem: 1 replicas: 0 } }"), ParseError);
    CHECK_THROWS_AS(parse_spec("pipeline p { component a { kind: stream cpu: 1 mem: 1 service_rate: 0 } }"),
                    ParseError);
    CHECK_THROWS_AS(parse_spec("pipeline p { component a { kind: stream cpu: 1 mem: 1 gpu: maybe } }"), ParseError);
    CHECK_THROWS_AS(parse_spec("pipeline p { component a { kind: stream cpu: 1 mem: 1 cpu: 2 } }"), ParseError);
    CHECK_THROWS_AS(parse_spec("pipeline p { flow a -> b { max_latency_ms: 0 } }"), ParseError);
    CHECK_THROWS_AS(parse_spec("pipeline p { flow a -> b { weight: 3 } }"), ParseError);
    // lexical
    CHECK_THROWS_AS(parse_spec("pipeline p { $ }"), ParseError);
    CHECK_THROWS_AS(parse_spec("pipeline p { component a { kind: stream cpu: 1MB mem: 1 } }"), ParseError);
    // trailing garbage and truncation
    CHECK_THROWS_AS(parse_spec("pipeline p { } extra"), ParseError);
    CHECK_THROWS_AS(parse_spec("pipeline p { component a {"), ParseError);
    CHECK_THROWS_AS(parse_spec(""), ParseError);
}

TEST_CASE("duplicate components and self loops are left to the validator") {
    const auto spec = parse_spec(
        "pipeline p { component a { kind: ingestion cpu: 1 mem: 1 } component a { kind: stream cpu: 1 mem: 1 } "
        "flow a -> a }");
    CHECK(spec.components.size() == 2);
    CHECK(spec.flows.size() == 1);
}

TEST_CASE("model versions") {
    const auto spec = parse_spec(
        "pipeline p { component a { kind: inference cpu: 1 mem: 1 model: det @ 1.2 } "
        "component b { kind: inference cpu: 1 mem: 1 model: det@latest } }");
    CHECK(spec.components[0].model == ModelRef{"det", "1.2"});
    CHECK(spec.components[1].model->is_latest());
}

TEST_CASE("canonical printing elides defaults") {
    const auto spec = parse_spec("pipeline p { component a { kind: ingestion cpu: 1 mem: 128 } }");
    CHECK(pretty_print(spec) ==
          "pipeline p {\n"
          "  component a {\n"
          "    kind: ingestion\n"
          "    cpu: 1\n"
          "    mem: 128\n"
          "  }\n"
          "}\n");
}

TEST_CASE("whitespace and comments do not change canonical text") {
    const std::string tidy = "pipeline p {\n  component a {\n    kind: ingestion\n    cpu: 0.5\n    mem: 64\n  }\n"
                             "  component b {\n    kind: visualization\n    cpu: 1\n    mem: 64\n  }\n"
                             "  flow a -> b {\n    max_latency_ms: 20\n  }\n}\n";
    const std::string messy = "#header\npipeline   p{flow a->b{max_latency_ms:20.0}component a{mem:64 kind:ingestion "
                              "cpu:.50 # half\n}\ncomponent b{kind:visualization cpu:1 mem:64 replicas: 1}}";
    CHECK(pretty_print(parse_spec(messy)) == tidy);
    CHECK(pretty_print(parse_spec(tidy)) == tidy);
}

TEST_CASE("smart traffic reaches a fixed point after one canonicalization") {
    const auto spec = parse_spec(fixture("smart_traffic.stratum"));
    const std::string once = pretty_print(spec);
    const std::string twice = pretty_print(parse_spec(once));
    CHECK(once == twice);
    CHECK(parse_spec(once) == spec);
}

TEST_CASE("round trip on random specs") {
    testing::Gen g(0x5eed);
    for (int i = 0; i < 100; ++i) {
        const auto spec = testing::random_valid_spec(g);
        const auto parsed = parse_spec(testing::messy_source(g, spec));
        REQUIRE(parsed == spec);
        const std::string canonical = pretty_print(parsed);
        CHECK(parse_spec(canonical) == parsed);
        CHECK(pretty_print(parse_spec(canonical)) == canonical);
    }
}

TEST_CASE("single-token corruption is reported at or before the corruption") {
    const std::string source = fixture("smart_traffic.stratum");
    const auto reference = parse_spec(source);
    (void)reference;

    // Corrupt each "word" with a value the grammar cannot accept there.
    struct Position { std::size_t offset; int line; int column; };
    std::vector<Position> starts;
    int line = 1;
    int column = 1;
    bool in_comment = false;
    for (std::size_t i = 0; i < source.size(); ++i) {
        const char c = source[i];
        const bool word = std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.';
        const bool prev_word = i > 0 && (std::isalnum(static_cast<unsigned char>(source[i - 1])) ||
                                         source[i - 1] == '_' || source[i - 1] == '.');
        if (c == '#') in_comment = true;
        if (!in_comment && word && !prev_word) starts.push_back({i, line, column});
        if (c == '\n') {
            ++line;
            column = 1;
            in_comment = false;
        } else {
            ++column;
        }
    }
    REQUIRE(starts.size() > 50);
    int corrupted = 0;
    for (const auto& at : starts) {
        std::string broken = source;
        broken.insert(at.offset, "$");
        try {
            parse_spec(broken);
            FAIL("corruption accepted at offset " << at.offset);
        } catch (const ParseError& e) {
            const bool at_or_before = e.line() < at.line || (e.line() == at.line && e.column() <= at.column);
            CHECK(at_or_before);
            ++corrupted;
        }
    }
    CHECK(corrupted == static_cast<int>(starts.size()));
}

TEST_CASE("parse is deterministic") {
    const std::string source = fixture("smart_traffic.stratum");
    CHECK(parse_spec(source) == parse_spec(source));
}

}
