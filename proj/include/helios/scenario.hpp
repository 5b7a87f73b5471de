#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "helios/cloud_field.hpp"
#include "helios/control.hpp"
#include "helios/energy_balance.hpp"
#include "helios/sensor_mesh.hpp"
#include "helios/types.hpp"

namespace helios {

struct Scenario {
    Seconds duration = 0.0;
    Seconds dt = 10.0;
    std::uint64_t seed = 0;

    CloudField field;
    std::vector<SensorNode> sensors;

    TopologyKind topology = TopologyKind::direct_mesh;
    std::vector<AccessPoint> access_points;
    std::vector<RouterSpec> routers;

    std::vector<PvPlant> plants;
    std::vector<Load> loads;

    ControlPolicy policy;
    bool control_enabled = true;
    TemperatureProfile temperature;

    double detect_threshold = 0.2;
    int controller_node = -1;    // -1: lowest sensor id acts as controller
    bool oracle_forecasts = false;  // forecasts from field geometry instead of the mesh
    double noise_std = 0.0;         // sensor noise sigma, W/m^2

    Topology build_topology() const;
    int controller_id() const;  // resolves the -1 default
};

// Strict parse: unknown keys raise SchemaError with the nearest valid key,
// malformed JSON raises ParseError, violated value constraints raise
// InvariantError naming the field. Comments (// and /* */) are allowed.
Scenario parse_scenario(const std::string& text);
Scenario load_scenario(const std::string& path);

// Value-level checks shared by parse and the validate command.
void validate_scenario(const Scenario& scenario);

// Sets every occurrence of key `name` in the scenario JSON to `value`
// (or one location when `name` is a /json/pointer). Throws
// UnknownParamError when nothing matches. Returns the patched text.
std::string set_scenario_param(const std::string& text, const std::string& name, double value);

}  // namespace helios
