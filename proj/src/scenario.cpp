#include "helios/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include <json.hpp>

namespace helios {

namespace {

using json = nlohmann::json;

int edit_distance(const std::string& a, const std::string& b) {
    std::vector<int> row(b.size() + 1);
    for (std::size_t j = 0; j <= b.size(); ++j) row[j] = static_cast<int>(j);
    for (std::size_t i = 1; i <= a.size(); ++i) {
        int diag = row[0];
        row[0] = static_cast<int>(i);
        for (std::size_t j = 1; j <= b.size(); ++j) {
            const int subst = diag + (a[i - 1] == b[j - 1] ? 0 : 1);
            diag = row[j];
            row[j] = std::min({row[j] + 1, row[j - 1] + 1, subst});
        }
    }
    return row[b.size()];
}

std::string nearest(const std::string& key, const std::vector<std::string>& candidates) {
    std::string best;
    int best_d = std::numeric_limits<int>::max();
    for (const std::string& c : candidates) {
        const int d = edit_distance(key, c);
        if (d < best_d) {
            best_d = d;
            best = c;
        }
    }
    return best;
}

// Strict view over one JSON object: every key must be claimed by a
// require/get call before finish(), else SchemaError suggests the nearest
// valid key.
class Fields {
  public:
    Fields(const json& obj, std::string path) : obj_(obj), path_(std::move(path)) {
        if (!obj_.is_object()) throw SchemaError(path_ + " must be a JSON object");
    }

    const json* find(const std::string& key) {
        known_.push_back(key);
        const auto it = obj_.find(key);
        return it == obj_.end() ? nullptr : &*it;
    }

    template <typename T>
    T require(const std::string& key) {
        const json* v = find(key);
        if (!v) throw SchemaError(path_ + " is missing required key \"" + key + "\"");
        return convert<T>(*v, key);
    }

    template <typename T>
    T get(const std::string& key, T fallback) {
        const json* v = find(key);
        return v ? convert<T>(*v, key) : fallback;
    }

    void finish() const {
        for (const auto& [key, value] : obj_.items()) {
            if (std::find(known_.begin(), known_.end(), key) == known_.end())
                throw SchemaError(path_ + " has unknown key \"" + key + "\"; nearest valid key is \"" +
                                  nearest(key, known_) + "\"");
        }
    }

    const std::string& path() const { return path_; }

  private:
    template <typename T>
    T convert(const json& v, const std::string& key) const {
        try {
            return v.get<T>();
        } catch (const json::exception&) {
            throw SchemaError(path_ + "." + key + " has the wrong type");
        }
    }

    const json& obj_;
    std::string path_;
    std::vector<std::string> known_;
};

const json& element(const json& arr, std::size_t i) { return arr.at(i); }

std::string indexed(const std::string& base, std::size_t i) {
    return base + "[" + std::to_string(i) + "]";
}

ClearSkyModel parse_clear_sky(const json& j) {
    Fields f(j, "clear_sky");
    ClearSkyModel m;
    m.i_max = f.get<double>("i_max_w_m2", m.i_max);
    m.t_sunrise = f.get<double>("sunrise_s", m.t_sunrise);
    m.t_sunset = f.get<double>("sunset_s", m.t_sunset);
    f.finish();
    return m;
}

CloudDisc parse_cloud(const json& j, std::size_t i) {
    Fields f(j, indexed("clouds", i));
    CloudDisc d;
    d.center = {f.require<double>("x_m"), f.require<double>("y_m")};
    d.radius = f.require<double>("radius_m");
    d.opacity = f.require<double>("opacity");
    d.velocity = {f.get<double>("vx_m_s", 0.0), f.get<double>("vy_m_s", 0.0)};
    f.finish();
    return d;
}

ChannelSet parse_channels(const json& j, const std::string& path) {
    if (!j.is_array()) throw SchemaError(path + " must be an array of channel names");
    ChannelSet set;
    set.irradiance = false;
    const std::vector<std::string> names = {"irradiance", "temperature", "pressure", "wind",
                                            "humidity"};
    for (const json& entry : j) {
        if (!entry.is_string()) throw SchemaError(path + " entries must be strings");
        const std::string name = entry.get<std::string>();
        if (name == "irradiance") set.irradiance = true;
        else if (name == "temperature") set.temperature = true;
        else if (name == "pressure") set.pressure = true;
        else if (name == "wind") set.wind = true;
        else if (name == "humidity") set.humidity = true;  // accepted, never consumed
        else
            throw SchemaError(path + " has unknown channel \"" + name +
                              "\"; nearest valid channel is \"" + nearest(name, names) + "\"");
    }
    return set;
}

SensorNode parse_sensor(const json& j, std::size_t i) {
    Fields f(j, indexed("sensors", i));
    SensorNode n;
    n.id = f.require<int>("id");
    n.position = {f.require<double>("x_m"), f.require<double>("y_m")};
    n.radio_range = f.require<double>("range_m");
    n.sample_period = f.get<double>("sample_period_s", 10.0);
    if (const json* channels = f.find("channels"))
        n.channels = parse_channels(*channels, f.path() + ".channels");
    f.finish();
    return n;
}

PvPlant parse_plant(const json& j, std::size_t i) {
    Fields f(j, indexed("plants", i));
    PvPlant p;
    p.id = f.require<int>("id");
    p.position = {f.require<double>("x_m"), f.require<double>("y_m")};
    p.area_s = f.require<double>("area_m2");
    p.coeff_k = f.require<double>("coeff_k");
    p.rated_power = f.require<double>("rated_w");
    f.finish();
    return p;
}

Load parse_load(const json& j, std::size_t i) {
    Fields f(j, indexed("loads", i));
    Load l;
    l.id = f.require<int>("id");
    l.position = {f.require<double>("x_m"), f.require<double>("y_m")};
    l.base_power = f.require<double>("base_w");
    l.lighting_coeff = f.get<double>("lighting_w", 0.0);
    l.hvac_coeff = f.get<double>("hvac_w_per_c", 0.0);
    l.t_setpoint = f.get<double>("setpoint_c", 20.0);
    l.deferrable_power = f.get<double>("deferrable_w", 0.0);
    l.deferrable_window = f.get<double>("deferrable_window_s", 0.0);
    f.finish();
    return l;
}

void parse_topology(const json& j, Scenario& s) {
    Fields f(j, "topology");
    const std::string kind = f.require<std::string>("kind");
    if (kind == "direct_mesh") {
        s.topology = TopologyKind::direct_mesh;
    } else if (kind == "hierarchical") {
        s.topology = TopologyKind::hierarchical;
    } else {
        throw SchemaError("topology.kind must be \"direct_mesh\" or \"hierarchical\", got \"" +
                          kind + "\"");
    }
    if (const json* aps = f.find("access_points")) {
        if (!aps->is_array()) throw SchemaError("topology.access_points must be an array");
        for (std::size_t i = 0; i < aps->size(); ++i) {
            Fields fa(element(*aps, i), indexed("topology.access_points", i));
            AccessPoint ap;
            ap.position = {fa.require<double>("x_m"), fa.require<double>("y_m")};
            ap.router = fa.get<int>("router", 0);
            fa.finish();
            s.access_points.push_back(ap);
        }
    }
    if (const json* routers = f.find("routers")) {
        if (!routers->is_array()) throw SchemaError("topology.routers must be an array");
        for (std::size_t i = 0; i < routers->size(); ++i) {
            Fields fr(element(*routers, i), indexed("topology.routers", i));
            s.routers.push_back({fr.get<int>("parent", -1)});
            fr.finish();
        }
    }
    f.finish();
}

ControlPolicy parse_policy(const json& j) {
    Fields f(j, "policy");
    ControlPolicy p;
    p.lead_time = f.get<double>("lead_time_s", p.lead_time);
    p.spread = f.get<double>("spread_s", p.spread);
    p.confidence_threshold = f.get<double>("confidence_threshold", p.confidence_threshold);
    f.finish();
    return p;
}

TemperatureProfile parse_temperature(const json& j) {
    Fields f(j, "temperature");
    TemperatureProfile t;
    t.base_c = f.get<double>("base_c", t.base_c);
    t.cloud_step_c = f.get<double>("cloud_step_c", t.cloud_step_c);
    f.finish();
    return t;
}

void require_field(bool ok, const std::string& field, const std::string& rule) {
    if (!ok) throw InvariantError("field \"" + field + "\" " + rule);
}

}  // namespace

Topology Scenario::build_topology() const {
    return topology == TopologyKind::direct_mesh
               ? build_direct_topology(sensors)
               : build_hierarchical_topology(sensors, access_points, routers);
}

int Scenario::controller_id() const {
    if (controller_node >= 0) return controller_node;
    if (sensors.empty()) throw InvariantError("field \"controller_node\" needs at least one sensor");
    int best = sensors.front().id;
    for (const SensorNode& n : sensors) best = std::min(best, n.id);
    return best;
}

Scenario parse_scenario(const std::string& text) {
    json j;
    try {
        j = json::parse(text, nullptr, true, /*ignore_comments=*/true);
    } catch (const json::parse_error& e) {
        throw ParseError(e.what());
    }

    Fields f(j, "scenario");
    Scenario s;
    s.duration = f.require<double>("duration_s");
    s.dt = f.get<double>("dt_s", s.dt);
    s.seed = f.get<std::uint64_t>("seed", s.seed);
    if (const json* clear = f.find("clear_sky")) s.field.clear_sky = parse_clear_sky(*clear);
    s.field.ambient = f.get<double>("ambient", s.field.ambient);
    if (const json* clouds = f.find("clouds")) {
        if (!clouds->is_array()) throw SchemaError("clouds must be an array");
        for (std::size_t i = 0; i < clouds->size(); ++i)
            s.field.discs.push_back(parse_cloud(element(*clouds, i), i));
    }
    if (const json* sensors = f.find("sensors")) {
        if (!sensors->is_array()) throw SchemaError("sensors must be an array");
        for (std::size_t i = 0; i < sensors->size(); ++i)
            s.sensors.push_back(parse_sensor(element(*sensors, i), i));
    }
    if (const json* topo = f.find("topology")) parse_topology(*topo, s);
    if (const json* plants = f.find("plants")) {
        if (!plants->is_array()) throw SchemaError("plants must be an array");
        for (std::size_t i = 0; i < plants->size(); ++i)
            s.plants.push_back(parse_plant(element(*plants, i), i));
    }
    if (const json* loads = f.find("loads")) {
        if (!loads->is_array()) throw SchemaError("loads must be an array");
        for (std::size_t i = 0; i < loads->size(); ++i)
            s.loads.push_back(parse_load(element(*loads, i), i));
    }
    if (const json* policy = f.find("policy")) s.policy = parse_policy(*policy);
    s.control_enabled = f.get<bool>("control_enabled", s.control_enabled);
    if (const json* temp = f.find("temperature")) s.temperature = parse_temperature(*temp);
    s.detect_threshold = f.get<double>("detect_threshold", s.detect_threshold);
    s.controller_node = f.get<int>("controller_node", s.controller_node);
    s.oracle_forecasts = f.get<bool>("oracle_forecasts", s.oracle_forecasts);
    s.noise_std = f.get<double>("noise_std_w_m2", s.noise_std);
    f.finish();

    validate_scenario(s);
    return s;
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open scenario file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_scenario(buf.str());
}

void validate_scenario(const Scenario& s) {
    require_field(s.duration > 0.0, "duration_s", "must be positive");
    require_field(s.dt > 0.0, "dt_s", "must be positive");
    require_field(s.duration >= s.dt, "duration_s", "must be at least dt_s");
    require_field(s.field.clear_sky.i_max >= 0.0, "clear_sky.i_max_w_m2", "must be nonnegative");
    require_field(s.field.clear_sky.t_sunset > s.field.clear_sky.t_sunrise, "clear_sky.sunset_s",
                  "must exceed sunrise_s");
    require_field(s.field.ambient >= 0.0 && s.field.ambient <= 1.0, "ambient",
                  "must lie in [0, 1]");
    for (std::size_t i = 0; i < s.field.discs.size(); ++i) {
        const CloudDisc& d = s.field.discs[i];
        require_field(d.radius > 0.0, indexed("clouds", i) + ".radius_m", "must be positive");
        require_field(d.opacity >= 0.0 && d.opacity <= 1.0, indexed("clouds", i) + ".opacity",
                      "must lie in [0, 1]");
    }

    std::set<int> sensor_ids;
    for (std::size_t i = 0; i < s.sensors.size(); ++i) {
        const SensorNode& n = s.sensors[i];
        require_field(sensor_ids.insert(n.id).second, indexed("sensors", i) + ".id",
                      "duplicates another sensor id");
        require_field(n.radio_range >= 0.0, indexed("sensors", i) + ".range_m",
                      "must be nonnegative");
        require_field(n.sample_period > 0.0, indexed("sensors", i) + ".sample_period_s",
                      "must be positive");
        const double cycles = n.sample_period / s.dt;
        require_field(std::abs(cycles - std::round(cycles)) < 1e-9,
                      indexed("sensors", i) + ".sample_period_s", "must be a multiple of dt_s");
        require_field(n.channels.irradiance, indexed("sensors", i) + ".channels",
                      "must include \"irradiance\"");
    }
    require_field(s.controller_node < 0 || sensor_ids.count(s.controller_node) > 0,
                  "controller_node", "does not match any sensor id");

    std::set<int> plant_ids;
    for (std::size_t i = 0; i < s.plants.size(); ++i) {
        const PvPlant& p = s.plants[i];
        require_field(plant_ids.insert(p.id).second, indexed("plants", i) + ".id",
                      "duplicates another plant id");
        require_field(p.area_s > 0.0, indexed("plants", i) + ".area_m2", "must be positive");
        require_field(p.coeff_k > 0.0 && p.coeff_k <= 1.0, indexed("plants", i) + ".coeff_k",
                      "must lie in (0, 1]");
        require_field(p.rated_power >= 0.0, indexed("plants", i) + ".rated_w",
                      "must be nonnegative");
    }

    std::set<int> load_ids;
    for (std::size_t i = 0; i < s.loads.size(); ++i) {
        const Load& l = s.loads[i];
        require_field(load_ids.insert(l.id).second, indexed("loads", i) + ".id",
                      "duplicates another load id");
        require_field(l.base_power >= 0.0, indexed("loads", i) + ".base_w", "must be nonnegative");
        require_field(l.lighting_coeff >= 0.0, indexed("loads", i) + ".lighting_w",
                      "must be nonnegative");
        require_field(l.hvac_coeff >= 0.0, indexed("loads", i) + ".hvac_w_per_c",
                      "must be nonnegative");
        require_field(l.deferrable_power >= 0.0, indexed("loads", i) + ".deferrable_w",
                      "must be nonnegative");
        require_field(l.deferrable_power <=
                          l.base_power + l.lighting_coeff + l.hvac_coeff * 50.0,
                      indexed("loads", i) + ".deferrable_w",
                      "exceeds base_w + lighting_w + 50*hvac_w_per_c");
        require_field(l.deferrable_window >= 0.0, indexed("loads", i) + ".deferrable_window_s",
                      "must be nonnegative");
    }

    require_field(s.policy.lead_time >= 0.0, "policy.lead_time_s", "must be nonnegative");
    require_field(s.policy.spread > 0.0, "policy.spread_s", "must be positive");
    require_field(s.policy.confidence_threshold >= 0.0 && s.policy.confidence_threshold <= 1.0,
                  "policy.confidence_threshold", "must lie in [0, 1]");
    require_field(s.detect_threshold > 0.0 && s.detect_threshold < 1.0, "detect_threshold",
                  "must lie in (0, 1)");
    require_field(s.noise_std >= 0.0, "noise_std_w_m2", "must be nonnegative");

    if (!s.sensors.empty()) {
        try {
            s.build_topology();
        } catch (const Error& e) {
            throw InvariantError(std::string("field \"topology\" is inconsistent: ") + e.what());
        }
    }
}

std::string set_scenario_param(const std::string& text, const std::string& name, double value) {
    json j;
    try {
        j = json::parse(text, nullptr, true, /*ignore_comments=*/true);
    } catch (const json::parse_error& e) {
        throw ParseError(e.what());
    }

    int hits = 0;
    if (!name.empty() && name.front() == '/') {
        const json::json_pointer ptr(name);
        if (!j.contains(ptr)) throw UnknownParamError("no scenario value at pointer " + name);
        j[ptr] = value;
        hits = 1;
    } else {
        const std::function<void(json&)> walk = [&](json& node) {
            if (node.is_object()) {
                for (auto& [key, val] : node.items()) {
                    if (key == name && val.is_number()) {
                        val = value;
                        ++hits;
                    } else {
                        walk(val);
                    }
                }
            } else if (node.is_array()) {
                for (json& val : node) walk(val);
            }
        };
        walk(j);
        if (hits == 0) throw UnknownParamError("no numeric scenario key named \"" + name + "\"");
    }
    return j.dump(2);
}

}  // namespace helios
