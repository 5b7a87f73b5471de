#include "helios/output.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace helios {

std::string format_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

void write_text_atomic(const std::string& path, const std::string& content) {
    const std::filesystem::path target(path);
    if (target.has_parent_path()) std::filesystem::create_directories(target.parent_path());
    const std::filesystem::path tmp = target.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot write " + tmp.string());
        out << content;
    }
    std::filesystem::rename(tmp, target);
}

void write_series_csv(const std::string& path, const RunResult& result) {
    std::ostringstream out;
    out << "t_s,pv_w,load_w,net_w,net_controlled_w\n";
    for (Eigen::Index i = 0; i < result.net.size(); ++i) {
        out << format_number(result.net.t(i)) << ',' << format_number(result.pv.p(i)) << ','
            << format_number(result.load.p(i)) << ',' << format_number(result.net.p(i)) << ','
            << format_number(result.net_controlled.p(i)) << '\n';
    }
    write_text_atomic(path, out.str());
}

void write_forecasts_csv(const std::string& path, const RunResult& result) {
    std::ostringstream out;
    out << "target_id,t_issue_s,t_arrival_s,depth,confidence\n";
    for (const IssuedForecast& issued : result.forecasts) {
        out << issued.forecast.target_id << ',' << format_number(issued.t_issue) << ','
            << format_number(issued.forecast.t_arrival) << ','
            << format_number(issued.forecast.depth) << ','
            << format_number(issued.forecast.confidence) << '\n';
    }
    write_text_atomic(path, out.str());
}

void write_actions_csv(const std::string& path, const RunResult& result) {
    std::ostringstream out;
    out << "load_id,t_start_s,duration_s,power_delta_w\n";
    for (const ControlAction& action : result.actions) {
        out << action.load_id << ',' << format_number(action.t_start) << ','
            << format_number(action.duration) << ',' << format_number(action.power_delta) << '\n';
    }
    write_text_atomic(path, out.str());
}

namespace {

const char* kind_name(NodeKind kind) {
    switch (kind) {
        case NodeKind::sensor: return "sensor";
        case NodeKind::access_point: return "access_point";
        default: return "router";
    }
}

}  // namespace

void write_traffic_csv(const std::string& path, const Scenario& scenario,
                       const RunResult& result) {
    std::ostringstream out;
    out << "element_kind,element_id,sent_messages,relayed_volume\n";

    std::map<Hop, double> sent;
    for (std::size_t i = 0; i < scenario.sensors.size(); ++i) {
        const Hop hop{NodeKind::sensor, scenario.sensors[i].id};
        sent[hop] = result.traffic.matrix.row(static_cast<Eigen::Index>(i)).sum();
    }
    std::set<Hop> hops;
    for (const auto& entry : sent) hops.insert(entry.first);
    for (const auto& entry : result.traffic.hop_load) hops.insert(entry.first);

    for (const Hop& hop : hops) {
        const auto relay = result.traffic.hop_load.find(hop);
        out << kind_name(hop.kind) << ',' << hop.id << ','
            << format_number(sent.count(hop) ? sent.at(hop) : 0.0) << ','
            << format_number(relay == result.traffic.hop_load.end() ? 0.0 : relay->second) << '\n';
    }
    write_text_atomic(path, out.str());
}

std::map<int, double> realized_drop(const Scenario& scenario, const RunResult& result) {
    std::map<int, double> drops;
    for (const PvPlant& plant : scenario.plants) {
        const PowerSeries& irr = result.plant_irradiance.at(plant.id);
        double worst = 0.0;
        for (Eigen::Index i = 0; i < irr.size(); ++i) {
            const double clear =
                clear_sky_irradiance(scenario.field.clear_sky, irr.t(i)) * scenario.field.ambient;
            const Watts clear_pv = pv_power(plant, clear);
            if (clear_pv <= 0.0) continue;
            worst = std::max(worst, 1.0 - pv_power(plant, irr.p(i)) / clear_pv);
        }
        drops[plant.id] = worst;
    }
    return drops;
}

void write_summary_json(const std::string& path, const Scenario& scenario,
                        const RunResult& result, const RunResult* uncontrolled_twin) {
    nlohmann::ordered_json j;
    j["scenario"] = {{"duration_s", scenario.duration},
                     {"dt_s", scenario.dt},
                     {"seed", scenario.seed},
                     {"topology", scenario.topology == TopologyKind::direct_mesh
                                      ? "direct_mesh"
                                      : "hierarchical"},
                     {"control_enabled", scenario.control_enabled}};

    const std::map<int, double> drops = realized_drop(scenario, result);
    nlohmann::ordered_json plants = nlohmann::ordered_json::object();
    for (const PvPlant& plant : scenario.plants) {
        plants[std::to_string(plant.id)] = {
            {"delta_e_j", result.delta_e.at(plant.id)},
            {"realized_drop_fraction", drops.at(plant.id)},
        };
    }
    j["plants"] = plants;

    j["ramp"] = {{"ramp_uncontrolled_w_per_s", result.report.ramp_uncontrolled},
                 {"ramp_controlled_w_per_s", result.report.ramp_controlled},
                 {"reduction_fraction", result.report.reduction_fraction}};
    j["ramp"]["note"] = "ramp metric doubles as the hot-reserve proxy";

    double max_relayed = 0.0;
    for (const auto& [hop, volume] : result.traffic.hop_load)
        max_relayed = std::max(max_relayed, volume);
    j["traffic"] = {{"total_messages", result.traffic.total},
                    {"max_relayed_volume", max_relayed}};

    j["energy"] = {{"net_uncontrolled_j", series_energy(result.net)},
                   {"net_controlled_j", series_energy(result.net_controlled)}};

    if (uncontrolled_twin) {
        const ControlReport ab = evaluate(result.net_controlled, uncontrolled_twin->net);
        j["ab"] = {{"ramp_uncontrolled_w_per_s", ab.ramp_uncontrolled},
                   {"ramp_controlled_w_per_s", ab.ramp_controlled},
                   {"reduction_fraction", ab.reduction_fraction},
                   {"energy_uncontrolled_j", series_energy(uncontrolled_twin->net)},
                   {"energy_controlled_j", series_energy(result.net_controlled)}};
    }

    write_text_atomic(path, j.dump(2) + "\n");
}

}  // namespace helios
