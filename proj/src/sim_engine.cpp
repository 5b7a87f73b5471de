#include "helios/sim_engine.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <sstream>
#include <string>

namespace helios {

std::optional<std::pair<Seconds, double>> first_cover(const CloudField& field, const Point2& p,
                                                      Seconds horizon) {
    Seconds entry = std::numeric_limits<double>::infinity();
    for (const CloudDisc& disc : field.discs) {
        const Point2 d0 = p - disc.center;
        if (d0.norm() <= disc.radius) {
            entry = 0.0;
            break;
        }
        const double v2 = disc.velocity.squaredNorm();
        if (v2 == 0.0) continue;
        // |d0 - v*t| = r  ->  v2*t^2 - 2(d0.v)t + (|d0|^2 - r^2) = 0
        const double b = d0.dot(disc.velocity);
        const double c = d0.squaredNorm() - disc.radius * disc.radius;
        const double disc_b = b * b - v2 * c;
        if (disc_b < 0.0) continue;
        const double t_in = (b - std::sqrt(disc_b)) / v2;
        if (t_in >= 0.0 && t_in <= horizon) entry = std::min(entry, t_in);
    }
    if (!std::isfinite(entry)) return std::nullopt;

    const CloudField at_entry = advect(field, std::min(entry + 1e-6, horizon));
    double clear_fraction = 1.0;
    for (const CloudDisc& disc : at_entry.discs)
        if ((p - disc.center).norm() <= disc.radius) clear_fraction *= 1.0 - disc.opacity;
    return std::make_pair(entry, 1.0 - clear_fraction);
}

namespace {

struct MeshState {
    Topology topology;
    int controller_index = -1;
    std::vector<int> delay_ticks;  // per sensor index, hops to the controller
};

std::string format_seconds(Seconds t) {
    std::ostringstream out;
    out << t;
    return out.str();
}

}  // namespace

RunResult run(const Scenario& scenario) {
    validate_scenario(scenario);

    const Seconds dt = scenario.dt;
    const auto n_steps = static_cast<Eigen::Index>(std::floor(scenario.duration / dt + 1e-9));
    const Eigen::Index n_samples = n_steps + 1;
    const Seconds horizon = static_cast<double>(n_samples) * dt;  // end of the last slab

    RunResult result;
    auto blank = [&] {
        PowerSeries s;
        s.t0 = 0.0;
        s.dt = dt;
        s.p = Eigen::VectorXd::Zero(n_samples);
        return s;
    };
    result.pv = blank();
    result.load = blank();
    result.net = blank();
    for (const PvPlant& plant : scenario.plants) result.plant_irradiance[plant.id] = blank();

    const std::size_t n_sensors = scenario.sensors.size();
    MeshState mesh;
    if (n_sensors > 0) {
        mesh.topology = scenario.build_topology();
        const int controller = scenario.controller_id();
        mesh.controller_index = mesh.topology.index_of(controller);
        mesh.delay_ticks.assign(n_sensors, 0);
        for (std::size_t i = 0; i < n_sensors; ++i) {
            if (static_cast<int>(i) != mesh.controller_index)
                mesh.delay_ticks[i] =
                    hop_count(route(mesh.topology, scenario.sensors[i].id, controller));
            result.traffic.delay_by_node[scenario.sensors[i].id] = mesh.delay_ticks[i];
        }
    }
    result.traffic.matrix = TrafficMatrix::Zero(static_cast<Eigen::Index>(n_sensors),
                                                static_cast<Eigen::Index>(n_sensors));

    std::mt19937_64 rng(scenario.seed);
    std::normal_distribution<double> noise(0.0, scenario.noise_std > 0.0 ? scenario.noise_std : 1.0);

    std::vector<std::vector<Measurement>> inbox(static_cast<std::size_t>(n_samples));
    std::vector<std::vector<Measurement>> history(n_sensors);
    std::map<int, FrontEvent> events;  // node id -> first crossing
    std::vector<bool> detected(n_sensors, false);
    bool events_changed = false;

    Seconds min_sample_period = 0.0;
    for (const SensorNode& node : scenario.sensors)
        min_sample_period = min_sample_period == 0.0
                                ? node.sample_period
                                : std::min(min_sample_period, node.sample_period);

    std::map<int, RampForecast> latest_forecast;  // plant id -> newest credible forecast
    std::set<int> committed_plants;
    std::map<int, Watts> spent;  // load id -> deferral already booked

    if (scenario.oracle_forecasts) {
        for (const PvPlant& plant : scenario.plants) {
            const auto cover = first_cover(scenario.field, plant.position, horizon);
            if (!cover) continue;
            RampForecast fc;
            fc.target_id = plant.id;
            fc.t_arrival = cover->first;
            fc.depth = cover->second;
            fc.confidence = 1.0;
            result.forecasts.push_back({0.0, fc});
            latest_forecast[plant.id] = fc;
        }
    }

    for (Eigen::Index k = 0; k < n_samples; ++k) {
        const Seconds t = static_cast<double>(k) * dt;
        try {
            const CloudField field_now = advect(scenario.field, t);

            // sample due sensors and ship readings toward the controller
            for (std::size_t i = 0; i < n_sensors; ++i) {
                const SensorNode& node = scenario.sensors[i];
                const auto period_ticks =
                    static_cast<Eigen::Index>(std::llround(node.sample_period / dt));
                if (k % period_ticks != 0) continue;
                Measurement m = sample(node, field_now, t);
                if (scenario.noise_std > 0.0)
                    m.irradiance = std::max(0.0, m.irradiance + noise(rng));
                if (static_cast<int>(i) == mesh.controller_index) {
                    history[i].push_back(m);
                } else {
                    result.traffic.matrix(static_cast<Eigen::Index>(i), mesh.controller_index) +=
                        1.0;
                    const Eigen::Index arrive = k + mesh.delay_ticks[i];
                    if (arrive < n_samples) inbox[static_cast<std::size_t>(arrive)].push_back(m);
                }
            }
            for (const Measurement& m : inbox[static_cast<std::size_t>(k)])
                history[static_cast<std::size_t>(mesh.topology.index_of(m.node_id))].push_back(m);

            // nowcast over everything delivered so far
            if (!scenario.oracle_forecasts) {
                for (std::size_t i = 0; i < n_sensors; ++i) {
                    if (detected[i] || history[i].empty()) continue;
                    const auto event =
                        detect_front(history[i], scenario.sensors[i].position,
                                     scenario.field.clear_sky, scenario.detect_threshold);
                    if (event) {
                        detected[i] = true;
                        events[event->node_id] = *event;
                        events_changed = true;
                    }
                }
                if (events_changed && events.size() >= 3) {
                    events_changed = false;
                    std::vector<FrontEvent> fit_events;
                    for (const auto& [id, ev] : events) fit_events.push_back(ev);
                    try {
                        const MotionEstimate estimate = estimate_motion(fit_events);
                        const FrontEvent* ref = &fit_events.front();
                        for (const FrontEvent& ev : fit_events)
                            if (ev.t_cross < ref->t_cross) ref = &ev;
                        for (const PvPlant& plant : scenario.plants) {
                            try {
                                const RampForecast fc =
                                    predict_arrival(estimate, *ref, plant.id, plant.position,
                                                    min_sample_period);
                                if (fc.t_arrival < t) continue;  // already stale when issued
                                result.forecasts.push_back({t, fc});
                                latest_forecast[plant.id] = fc;
                            } catch (const AlreadyPassedError&) {
                            }
                        }
                    } catch (const DegenerateGeometryError&) {
                        events_changed = true;  // retry once more events arrive
                    }
                }
            }

            // commit deferral plans for forecasts entering the lead window
            if (scenario.control_enabled && !latest_forecast.empty()) {
                std::vector<RampForecast> pending;
                for (const auto& [plant_id, fc] : latest_forecast)
                    if (!committed_plants.count(plant_id)) pending.push_back(fc);
                if (!pending.empty()) {
                    std::vector<Load> available = scenario.loads;
                    for (Load& load : available) {
                        const auto it = spent.find(load.id);
                        if (it != spent.end())
                            load.deferrable_power = std::max(0.0, load.deferrable_power - it->second);
                    }
                    std::map<int, Watts> plant_power_now;
                    for (const PvPlant& plant : scenario.plants)
                        plant_power_now[plant.id] =
                            pv_power(plant, irradiance_at(field_now, plant.position, t));
                    const ControlPlan plan =
                        plan_actions(pending, available, scenario.plants, scenario.policy,
                                     plant_power_now, dt, t, horizon);
                    result.actions.insert(result.actions.end(), plan.actions.begin(),
                                          plan.actions.end());
                    for (const auto& [load_id, watts] : plan.committed_by_load)
                        spent[load_id] += watts;
                    for (int plant_id : plan.planned_targets) committed_plants.insert(plant_id);
                }
            }

            // power accounting
            const double clear =
                clear_sky_irradiance(scenario.field.clear_sky, t) * scenario.field.ambient;
            double pv_total = 0.0;
            for (const PvPlant& plant : scenario.plants) {
                const double irr = irradiance_at(field_now, plant.position, t);
                result.plant_irradiance[plant.id].p(k) = irr;
                pv_total += pv_power(plant, irr);
            }
            double load_total = 0.0;
            for (const Load& load : scenario.loads) {
                const double irr = irradiance_at(field_now, load.position, t);
                const double occlusion = clear > 0.0 ? 1.0 - irr / clear : 0.0;
                load_total += load_power(load, irr, clear, scenario.temperature.at(occlusion));
            }
            result.pv.p(k) = pv_total;
            result.load.p(k) = load_total;
            result.net.p(k) = load_total - pv_total;
        } catch (const Error& e) {
            throw Error("at t=" + format_seconds(t) + " s: " + e.what());
        }
    }

    result.net_controlled =
        scenario.control_enabled ? apply_actions(result.net, result.actions) : result.net;
    result.report = evaluate(result.net_controlled, result.net);

    for (const PvPlant& plant : scenario.plants)
        result.delta_e[plant.id] = delta_energy(plant, result.plant_irradiance.at(plant.id), 0.0,
                                                static_cast<double>(n_steps) * dt);

    result.traffic.total = central_node_traffic(result.traffic.matrix);
    if (n_sensors > 0)
        result.traffic.hop_load = accumulate_traffic(mesh.topology, result.traffic.matrix);

    return result;
}

RunPair run_pair(const Scenario& scenario) {
    Scenario off = scenario;
    off.control_enabled = false;
    Scenario on = scenario;
    on.control_enabled = true;
    RunPair pair{run(off), run(on)};
    return pair;
}

}  // namespace helios
