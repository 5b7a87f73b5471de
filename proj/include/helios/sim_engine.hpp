#pragma once

#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "helios/control.hpp"
#include "helios/energy_balance.hpp"
#include "helios/nowcast.hpp"
#include "helios/scenario.hpp"
#include "helios/sensor_mesh.hpp"
#include "helios/types.hpp"

namespace helios {

struct IssuedForecast {
    Seconds t_issue = 0.0;
    RampForecast forecast;
};

struct TrafficSummary {
    TrafficMatrix matrix;  // messages sent, sensor index -> controller column
    std::map<Hop, double> hop_load;  // volume relayed per intermediate element
    std::map<int, int> delay_by_node;  // node id -> delivery delay in ticks
    double total = 0.0;                // central-node equivalent of `matrix`
};

struct RunResult {
    PowerSeries pv;       // W
    PowerSeries load;     // W
    PowerSeries net;      // W, load - pv, control never applied
    PowerSeries net_controlled;  // equals net when control is disabled
    std::map<int, PowerSeries> plant_irradiance;  // W/m^2 at each plant

    std::vector<IssuedForecast> forecasts;
    std::vector<ControlAction> actions;
    TrafficSummary traffic;
    std::map<int, Joules> delta_e;  // per plant over the full horizon
    ControlReport report;
};

struct RunPair {
    RunResult uncontrolled;
    RunResult controlled;
};

// Exact first time within [0, horizon] at which any advected disc covers
// `p`, with the occlusion depth just after that instant. Empty when the
// point stays clear.
std::optional<std::pair<Seconds, double>> first_cover(const CloudField& field, const Point2& p,
                                                      Seconds horizon);

// Fixed-step loop: advect field, sample due sensors, deliver measurements
// over the topology at one hop per tick, detect fronts, fit motion, plan
// and apply deferrals, account power. Bit-identical results for identical
// (scenario, seed).
RunResult run(const Scenario& scenario);

// Same weather and sampling twice, control off then on.
RunPair run_pair(const Scenario& scenario);

}  // namespace helios
