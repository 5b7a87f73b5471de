#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "helios/output.hpp"
#include "helios/scenario.hpp"
#include "helios/sim_engine.hpp"

namespace {

namespace fs = std::filesystem;
using namespace helios;

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open scenario file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

Scenario flipped_topology(const Scenario& scenario) {
    Scenario other = scenario;
    if (scenario.topology == TopologyKind::direct_mesh) {
        other.topology = TopologyKind::hierarchical;
        if (other.routers.empty()) other.routers = {{-1}};
        if (other.access_points.empty()) {
            Point2 centroid{0.0, 0.0};
            for (const SensorNode& node : other.sensors) centroid += node.position;
            if (!other.sensors.empty()) centroid /= static_cast<double>(other.sensors.size());
            other.access_points = {{centroid, 0}};
        }
    } else {
        other.topology = TopologyKind::direct_mesh;
    }
    return other;
}

void append_compare_row(std::ostringstream& out, const Scenario& scenario,
                        const RunResult& result) {
    double hub = 0.0;
    for (const auto& [hop, volume] : result.traffic.hop_load) hub = std::max(hub, volume);
    int max_delay = 0;
    double delay_sum = 0.0;
    for (const auto& [node, delay] : result.traffic.delay_by_node) {
        max_delay = std::max(max_delay, delay);
        delay_sum += delay;
    }
    const double mean_delay = result.traffic.delay_by_node.empty()
                                  ? 0.0
                                  : delay_sum / static_cast<double>(result.traffic.delay_by_node.size());
    out << (scenario.topology == TopologyKind::direct_mesh ? "direct_mesh" : "hierarchical") << ','
        << format_number(result.traffic.total) << ',' << format_number(hub) << ',' << max_delay
        << ',' << format_number(mean_delay) << '\n';
}

int cmd_run(const std::string& path, const std::string& out_dir, bool compare, bool ab) {
    const Scenario scenario = load_scenario(path);
    const fs::path dir(out_dir);

    RunResult result;
    RunResult uncontrolled;
    const RunResult* twin = nullptr;
    if (ab) {
        RunPair pair = run_pair(scenario);
        result = std::move(pair.controlled);
        uncontrolled = std::move(pair.uncontrolled);
        twin = &uncontrolled;
    } else {
        result = run(scenario);
    }

    write_series_csv((dir / "series.csv").string(), result);
    write_forecasts_csv((dir / "forecasts.csv").string(), result);
    write_actions_csv((dir / "actions.csv").string(), result);
    write_traffic_csv((dir / "traffic.csv").string(), scenario, result);
    write_summary_json((dir / "summary.json").string(), scenario, result, twin);

    if (compare) {
        const Scenario other = flipped_topology(scenario);
        const RunResult other_result = run(other);
        std::ostringstream out;
        out << "topology,total_messages,hub_relayed_volume,max_delay_ticks,mean_delay_ticks\n";
        append_compare_row(out, scenario, result);
        append_compare_row(out, other, other_result);
        write_text_atomic((dir / "compare.csv").string(), out.str());
    }

    std::cout << "wrote results to " << dir.string() << "\n";
    return 0;
}

int cmd_sweep(const std::string& path, const std::string& out_dir, const std::string& param,
              const std::vector<double>& values) {
    const std::string base_text = read_file(path);
    std::ostringstream out;
    out << param
        << ",ramp_uncontrolled_w_per_s,ramp_controlled_w_per_s,reduction_fraction,"
           "max_drop_fraction,total_messages,delta_e_total_j\n";
    for (double value : values) {
        const Scenario scenario = parse_scenario(set_scenario_param(base_text, param, value));
        const RunResult result = run(scenario);
        double max_drop = 0.0;
        for (const auto& [plant, drop] : realized_drop(scenario, result))
            max_drop = std::max(max_drop, drop);
        Joules delta_total = 0.0;
        for (const auto& [plant, joules] : result.delta_e) delta_total += joules;
        out << format_number(value) << ',' << format_number(result.report.ramp_uncontrolled)
            << ',' << format_number(result.report.ramp_controlled) << ','
            << format_number(result.report.reduction_fraction) << ',' << format_number(max_drop)
            << ',' << format_number(result.traffic.total) << ',' << format_number(delta_total)
            << '\n';
    }
    const fs::path dir(out_dir);
    write_text_atomic((dir / "sweep.csv").string(), out.str());
    std::cout << "wrote " << (dir / "sweep.csv").string() << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"solar nowcast and demand-shift grid simulator"};
    app.require_subcommand(1);

    std::string path;
    std::string out_dir = "out";
    std::string param;
    std::vector<double> values;
    bool compare = false;
    bool ab = false;

    CLI::App* validate = app.add_subcommand("validate", "check a scenario file and exit");
    validate->add_option("path", path, "scenario JSON file")->required();

    CLI::App* run_sub = app.add_subcommand("run", "simulate a scenario and write CSV/JSON results");
    run_sub->add_option("path", path, "scenario JSON file")->required();
    run_sub->add_option("--out", out_dir, "output directory (default: out)");
    run_sub->add_flag("--compare-topologies", compare,
                      "rerun with the other topology and write compare.csv");
    run_sub->add_flag("--ab-control", ab, "run the scenario with control off and on");

    CLI::App* sweep = app.add_subcommand("sweep", "rerun a scenario across one parameter");
    sweep->add_option("path", path, "scenario JSON file")->required();
    sweep->add_option("--param", param, "numeric scenario key or /json/pointer")->required();
    sweep->add_option("--values", values, "comma-separated values")->required()->delimiter(',');
    sweep->add_option("--out", out_dir, "output directory (default: out)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 1;
    }

    if (const char* env_out = std::getenv("HELIOS_OUT"); env_out && *env_out) out_dir = env_out;

    try {
        if (validate->parsed()) {
            load_scenario(path);
            std::cout << "OK\n";
            return 0;
        }
        if (run_sub->parsed()) return cmd_run(path, out_dir, compare, ab);
        if (sweep->parsed()) return cmd_sweep(path, out_dir, param, values);
        return 1;
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return 2;
    } catch (const SchemaError& e) {
        std::cerr << "schema error: " << e.what() << "\n";
        return 2;
    } catch (const InvariantError& e) {
        std::cerr << "invariant error: " << e.what() << "\n";
        return 2;
    } catch (const UnknownParamError& e) {
        std::cerr << "unknown parameter: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
