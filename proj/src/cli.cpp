#include "stratum/cli.hpp"

#include "stratum/codegen.hpp"
#include "stratum/controller.hpp"
#include "stratum/placement.hpp"
#include "stratum/registry.hpp"
#include "stratum/simulator.hpp"
#include "stratum/spec_lang.hpp"
#include "stratum/topology.hpp"
#include "stratum/validator.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

namespace stratum {

namespace {

using nlohmann::json;

struct CliFailure {
    ExitCode code;
    std::string message;
};

[[noreturn]] void fail(ExitCode code, std::string message) {
    throw CliFailure{code, std::move(message)};
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ExitCode::io_error, "cannot read '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_text(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << content;
    out.flush();
    if (!out) fail(ExitCode::io_error, "cannot write '" + path.string() + "'");
}

PipelineSpec load_valid_spec(const std::string& path, std::ostream& err) {
    const std::string source = read_file(path);
    PipelineSpec spec;
    try {
        spec = parse_spec(source);
    } catch (const ParseError& e) {
        fail(ExitCode::invalid, path + ":" + e.what());
    }
    const ValidationReport report = validate(spec);
    if (!report.ok()) {
        err << report.render();
        fail(ExitCode::invalid, "specification '" + path + "' failed validation");
    }
    return spec;
}

ResourceTopology load_topology_file(const std::string& path) {
    try {
        return load_topology(read_file(path));
    } catch (const TopologyError& e) {
        fail(ExitCode::io_error, path + ": " + e.what());
    }
}

PlacementPlan load_plan_file(const std::string& path, const PipelineSpec& spec, const ResourceTopology& topology) {
    PlacementPlan plan;
    try {
        plan = plan_from_json(read_file(path));
        plan.cost_per_hour = plan_cost(spec, topology, plan);
    } catch (const std::invalid_argument& e) {
        fail(ExitCode::io_error, path + ": " + e.what());
    } catch (const PlanError& e) {
        fail(ExitCode::io_error, path + ": " + e.what());
    }
    if (plan.assignments.size() != spec.components.size()) {
        fail(ExitCode::io_error, path + ": plan does not match the pipeline's components");
    }
    return plan;
}

std::string registry_path_or_env(const std::string& flag) {
    if (!flag.empty()) return flag;
    if (const char* env = std::getenv("STRATUM_REGISTRY"); env && *env) return env;
    return {};
}

ModelRegistry load_registry(const std::string& path, bool must_exist) {
    if (path.empty()) {
        if (must_exist) fail(ExitCode::invalid, "no registry given (use --registry or STRATUM_REGISTRY)");
        return {};
    }
    if (must_exist && !std::filesystem::exists(path)) fail(ExitCode::io_error, "registry '" + path + "' not found");
    try {
        return ModelRegistry::load(path);
    } catch (const RegistryError& e) {
        fail(ExitCode::io_error, path + ": " + e.what());
    } catch (const std::runtime_error& e) {
        fail(ExitCode::io_error, e.what());
    }
}

EvalStrategy parse_strategy(const std::string& text) {
    try {
        return EvalStrategy::parse(text);
    } catch (const std::invalid_argument& e) {
        fail(ExitCode::invalid, e.what());
    }
}

json record_json(const ModelRecord& r) {
    return {{"name", r.name},           {"version", r.version},         {"metrics", r.metrics},
            {"size_mb", r.size_mb},     {"gpu_required", r.gpu_required}, {"created_seq", r.created_seq}};
}

RateOverride parse_override(const std::string& text) {
    const auto first = text.find(':');
    const auto second = first == std::string::npos ? first : text.find(':', first + 1);
    if (second == std::string::npos) fail(ExitCode::invalid, "override must look like component:tick:rate");
    RateOverride o;
    o.component = text.substr(0, first);
    const std::string tick = text.substr(first + 1, second - first - 1);
    auto rate = parse_decimal(text.substr(second + 1));
    auto tick_value = parse_decimal(tick);
    if (!rate || !tick_value || !is_integer(*tick_value) || *tick_value < 0 || *tick_value > 1'000'000'000) {
        fail(ExitCode::invalid, "override must look like component:tick:rate");
    }
    o.tick = static_cast<int>(boost::multiprecision::numerator(*tick_value));
    o.rate = *rate;
    return o;
}

Quantity parse_threshold(const std::string& text, const char* flag) {
    auto value = parse_decimal(text);
    if (!value) fail(ExitCode::invalid, std::string(flag) + " expects a decimal number");
    return *value;
}

// ---- commands ----------------------------------------------------------

int cmd_validate(const std::string& spec_path, std::ostream& out, std::ostream& err) {
    const std::string source = read_file(spec_path);
    PipelineSpec spec;
    try {
        spec = parse_spec(source);
    } catch (const ParseError& e) {
        fail(ExitCode::invalid, spec_path + ":" + e.what());
    }
    const ValidationReport report = validate(spec);
    err << report.render();
    json errors = json::array();
    for (const auto& e : report.errors) {
        errors.push_back({{"code", std::string(to_string(e.code))}, {"subject", e.subject}, {"message", e.message}});
    }
    out << json{{"ok", report.ok()}, {"errors", errors}}.dump() << "\n";
    return report.ok() ? 0 : 1;
}

enum class SolverChoice { automatic, exact, heuristic };

int cmd_plan(const std::string& spec_path, const std::string& topology_path, SolverChoice choice, std::ostream& out,
             std::ostream& err) {
    const PipelineSpec spec = load_valid_spec(spec_path, err);
    const ResourceTopology topology = load_topology_file(topology_path);
    if (choice == SolverChoice::automatic) {
        choice = assignment_count(spec, topology) <= exact_search_limit ? SolverChoice::exact : SolverChoice::heuristic;
    }
    const auto plan = choice == SolverChoice::exact ? plan_exact(spec, topology) : plan_heuristic(spec, topology);
    if (!plan) {
        if (choice == SolverChoice::exact) {
            fail(ExitCode::infeasible, "infeasible: no assignment satisfies the constraints (proven by exhaustive search)");
        }
        fail(ExitCode::infeasible, "infeasible: greedy heuristic found no placement (not a proof of infeasibility)");
    }
    out << plan_to_json(*plan);
    return 0;
}

int cmd_generate(const std::string& spec_path, const std::string& topology_path, const std::string& plan_path,
                 const std::string& registry_flag, const std::string& strategy_text, const std::string& out_dir,
                 std::ostream& out, std::ostream& err) {
    const PipelineSpec spec = load_valid_spec(spec_path, err);
    const ResourceTopology topology = load_topology_file(topology_path);
    const PlacementPlan plan = load_plan_file(plan_path, spec, topology);
    const ModelRegistry registry = load_registry(registry_path_or_env(registry_flag), false);
    const EvalStrategy strategy = parse_strategy(strategy_text);

    std::vector<DeploymentManifest> manifests;
    try {
        manifests = generate(spec, topology, plan, registry, strategy);
    } catch (const CodegenError& e) {
        fail(e.kind() == CodegenError::Kind::plan_mismatch ? ExitCode::io_error : ExitCode::infeasible, e.what());
    }
    try {
        write_manifests(out_dir, spec, plan, manifests);
    } catch (const std::exception& e) {
        fail(ExitCode::io_error, std::string("cannot write manifests: ") + e.what());
    }
    json files = json::array({"index.yaml"});
    for (const auto& m : manifests) files.push_back(m.file_name());
    out << json{{"out", out_dir}, {"files", files}}.dump() << "\n";
    return 0;
}

struct SimulateArgs {
    std::string spec;
    std::string topology;
    std::string plan;
    int ticks = 0;
    bool controller = false;
    std::vector<std::string> overrides;
    std::string out_dir;
    std::string high_util = "0.8";
    std::string low_util = "0.3";
    int high_window = 3;
    int low_window = 10;
    int cooldown = 5;
};

int cmd_simulate(const SimulateArgs& args, std::ostream& out, std::ostream& err) {
    const PipelineSpec spec = load_valid_spec(args.spec, err);
    const ResourceTopology topology = load_topology_file(args.topology);
    const PlacementPlan plan = load_plan_file(args.plan, spec, topology);
    if (!check_feasible(spec, topology, plan).feasible()) fail(ExitCode::infeasible, "plan is infeasible");

    SimConfig config;
    config.ticks = args.ticks;
    for (const auto& o : args.overrides) config.overrides.push_back(parse_override(o));

    std::optional<PolicyConfig> policy;
    if (args.controller) {
        PolicyConfig p;
        p.high_util = parse_threshold(args.high_util, "--high-util");
        p.low_util = parse_threshold(args.low_util, "--low-util");
        p.high_window = args.high_window;
        p.low_window = args.low_window;
        p.cooldown = args.cooldown;
        policy = p;
    }

    SimReport report;
    try {
        report = run(spec, topology, plan, config, policy);
    } catch (const std::invalid_argument& e) {
        fail(ExitCode::invalid, e.what());
    }

    if (!args.out_dir.empty()) {
        std::error_code ec;
        std::filesystem::create_directories(args.out_dir, ec);
        if (ec) fail(ExitCode::io_error, "cannot create '" + args.out_dir + "': " + ec.message());
        const std::filesystem::path dir(args.out_dir);
        write_text(dir / "metrics.csv", report.metrics_csv());
        write_text(dir / "flows.csv", report.flows_csv());
        write_text(dir / "actions.log", report.action_log());
    }
    out << report.metrics_csv();
    if (!report.conservation.balanced()) err << "warning: conservation check failed\n";
    return 0;
}

int cmd_registry_add(const std::string& path_flag, const std::string& name, const std::string& version,
                     const std::vector<std::string>& metrics, double size_mb, bool gpu, std::ostream& out) {
    const std::string path = registry_path_or_env(path_flag);
    if (path.empty()) fail(ExitCode::invalid, "no registry given (use --registry or STRATUM_REGISTRY)");
    ModelRegistry registry = load_registry(path, false);

    ModelRecord record;
    record.name = name;
    record.version = version;
    record.size_mb = size_mb;
    record.gpu_required = gpu;
    for (const auto& m : metrics) {
        const auto eq = m.find('=');
        auto value = eq == std::string::npos ? std::nullopt : parse_decimal(m.substr(eq + 1));
        if (!value) fail(ExitCode::invalid, "metric must look like name=value");
        record.metrics[m.substr(0, eq)] = to_double(*value);
    }
    ModelRecord stored;
    try {
        stored = registry.add(std::move(record));
    } catch (const RegistryError& e) {
        fail(ExitCode::invalid, e.what());
    }
    try {
        registry.save(path);
    } catch (const std::exception& e) {
        fail(ExitCode::io_error, std::string("cannot save registry: ") + e.what());
    }
    out << record_json(stored).dump() << "\n";
    return 0;
}

int cmd_registry_list(const std::string& path_flag, std::ostream& out) {
    const ModelRegistry registry = load_registry(registry_path_or_env(path_flag), true);
    json models = json::array();
    for (const auto& r : registry.records()) models.push_back(record_json(r));
    out << json{{"models", models}}.dump() << "\n";
    return 0;
}

int cmd_registry_select(const std::string& path_flag, const std::string& name, const std::string& strategy_text,
                        std::ostream& out) {
    const ModelRegistry registry = load_registry(registry_path_or_env(path_flag), true);
    const EvalStrategy strategy = parse_strategy(strategy_text);
    try {
        out << record_json(registry.select_best(name, strategy)).dump() << "\n";
    } catch (const RegistryError& e) {
        fail(ExitCode::invalid, e.what());
    }
    return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"stratum: pipeline specification, placement, manifest generation and simulation", "stratum"};
    app.require_subcommand(1);

    std::string spec_path;
    std::string topology_path;
    std::string plan_path;

    auto* validate_cmd = app.add_subcommand("validate", "Parse and check a pipeline specification");
    validate_cmd->add_option("spec", spec_path, "Pipeline specification (.stratum)")->required();

    auto* plan_cmd = app.add_subcommand("plan", "Compute a placement plan (JSON on stdout)");
    plan_cmd->add_option("spec", spec_path, "Pipeline specification")->required();
    plan_cmd->add_option("--topology", topology_path, "Topology JSON")->required();
    bool exact = false;
    bool heuristic = false;
    auto* exact_flag = plan_cmd->add_flag("--exact", exact, "Exhaustive cost-minimal search");
    auto* heuristic_flag = plan_cmd->add_flag("--heuristic", heuristic, "Greedy placement");
    exact_flag->excludes(heuristic_flag);

    auto* generate_cmd = app.add_subcommand("generate", "Emit deployment manifests");
    std::string registry_flag;
    std::string strategy = "maximize:accuracy";
    std::string out_dir;
    generate_cmd->add_option("spec", spec_path, "Pipeline specification")->required();
    generate_cmd->add_option("--topology", topology_path, "Topology JSON")->required();
    generate_cmd->add_option("--plan", plan_path, "Plan JSON")->required();
    generate_cmd->add_option("--registry", registry_flag, "Model registry JSON (default: $STRATUM_REGISTRY)");
    generate_cmd->add_option("--strategy", strategy, "Model selection strategy")->capture_default_str();
    generate_cmd->add_option("--out", out_dir, "Output directory")->required();

    auto* simulate_cmd = app.add_subcommand("simulate", "Run the fluid simulation (metrics CSV on stdout)");
    SimulateArgs sim;
    simulate_cmd->add_option("spec", sim.spec, "Pipeline specification")->required();
    simulate_cmd->add_option("--topology", sim.topology, "Topology JSON")->required();
    simulate_cmd->add_option("--plan", sim.plan, "Plan JSON")->required();
    simulate_cmd->add_option("--ticks", sim.ticks, "Number of 1 s ticks")->required()->check(CLI::PositiveNumber);
    simulate_cmd->add_flag("--controller", sim.controller, "Enable the elasticity controller");
    simulate_cmd->add_option("--override", sim.overrides, "Rate change component:tick:rate (repeatable)");
    simulate_cmd->add_option("--out", sim.out_dir, "Write metrics.csv, flows.csv and actions.log here");
    simulate_cmd->add_option("--high-util", sim.high_util, "Scale-out threshold")->capture_default_str();
    simulate_cmd->add_option("--low-util", sim.low_util, "Scale-in threshold")->capture_default_str();
    simulate_cmd->add_option("--high-window", sim.high_window, "Ticks above high-util")->capture_default_str();
    simulate_cmd->add_option("--low-window", sim.low_window, "Ticks below low-util")->capture_default_str();
    simulate_cmd->add_option("--cooldown", sim.cooldown, "Ticks between actions")->capture_default_str();

    auto* registry_cmd = app.add_subcommand("registry", "Model registry operations");
    registry_cmd->require_subcommand(1);
    registry_cmd->add_option("--registry", registry_flag, "Registry JSON (default: $STRATUM_REGISTRY)");
    std::string model_name;
    std::string model_version;
    std::vector<std::string> metrics;
    double size_mb = 1;
    bool gpu = false;
    auto* add_cmd = registry_cmd->add_subcommand("add", "Register a model version");
    add_cmd->add_option("--name", model_name)->required();
    add_cmd->add_option("--version", model_version)->required();
    add_cmd->add_option("--metric", metrics, "name=value (repeatable)");
    add_cmd->add_option("--size-mb", size_mb)->capture_default_str();
    add_cmd->add_flag("--gpu", gpu, "Model needs a GPU");
    auto* list_cmd = registry_cmd->add_subcommand("list", "List registered models (JSON)");
    auto* select_cmd = registry_cmd->add_subcommand("select", "Select the best version (JSON)");
    select_cmd->add_option("--name", model_name)->required();
    select_cmd->add_option("--strategy", strategy, "maximize:<metric> or minimize:<metric>")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return static_cast<int>(ExitCode::invalid);
    }

    try {
        if (*validate_cmd) return cmd_validate(spec_path, out, err);
        if (*plan_cmd) {
            const SolverChoice choice =
                exact ? SolverChoice::exact : heuristic ? SolverChoice::heuristic : SolverChoice::automatic;
            return cmd_plan(spec_path, topology_path, choice, out, err);
        }
        if (*generate_cmd) {
            return cmd_generate(spec_path, topology_path, plan_path, registry_flag, strategy, out_dir, out, err);
        }
        if (*simulate_cmd) return cmd_simulate(sim, out, err);
        if (*add_cmd) return cmd_registry_add(registry_flag, model_name, model_version, metrics, size_mb, gpu, out);
        if (*list_cmd) return cmd_registry_list(registry_flag, out);
        if (*select_cmd) return cmd_registry_select(registry_flag, model_name, strategy, out);
    } catch (const CliFailure& f) {
        err << "error: " << f.message << "\n";
        return static_cast<int>(f.code);
    }
    return static_cast<int>(ExitCode::invalid);
}

}  // namespace stratum
