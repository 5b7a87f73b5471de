#pragma once

#include <map>
#include <optional>
#include <set>
#include <vector>

#include <Eigen/Core>

#include "helios/cloud_field.hpp"
#include "helios/types.hpp"

namespace helios {

struct ChannelSet {
    bool irradiance = true;
    bool temperature = false;
    bool pressure = false;
    bool wind = false;
    bool humidity = false;  // recorded from scenarios, consumed by nothing
};

struct SensorNode {
    int id = 0;
    Point2 position{0.0, 0.0};
    double radio_range = 0.0;   // m
    Seconds sample_period = 10.0;
    ChannelSet channels;
};

struct Measurement {
    int node_id = 0;
    Seconds t = 0.0;
    WattsPerSquareMeter irradiance = 0.0;
    std::optional<double> temperature;  // degC
    std::optional<double> pressure;     // Pa
};

enum class TopologyKind { direct_mesh, hierarchical };

enum class NodeKind { sensor, access_point, router };

// One vertex on a communication path. Sensor ids are the node ids from the
// scenario; access points and routers are numbered by their list index.
struct Hop {
    NodeKind kind = NodeKind::sensor;
    int id = 0;

    friend bool operator==(const Hop&, const Hop&) = default;
    friend auto operator<=>(const Hop&, const Hop&) = default;
};

struct AccessPoint {
    Point2 position{0.0, 0.0};
    int router = 0;  // index into Topology::routers
};

struct RouterSpec {
    int parent = -1;  // index of parent router, -1 for a root
};

struct Topology {
    TopologyKind kind = TopologyKind::direct_mesh;
    std::vector<SensorNode> nodes;

    // direct mesh: adjacency[i] holds neighbor indices, sorted by node id
    std::vector<std::vector<int>> adjacency;

    // hierarchical: node_ap[i] is the access-point index serving node i
    std::vector<AccessPoint> access_points;
    std::vector<RouterSpec> routers;
    std::vector<int> node_ap;

    int index_of(int node_id) const;  // throws Error for unknown ids
};

// Volume sent from element i to element j, in abstract message units.
// Square, nonnegative, zero diagonal.
using TrafficMatrix = Eigen::MatrixXd;

Measurement sample(const SensorNode& node, const CloudField& field, Seconds t,
                   std::optional<double> temperature = std::nullopt,
                   std::optional<double> pressure = std::nullopt);

// Peer-to-peer mesh: an edge exists iff the pair distance is within both
// radio ranges.
Topology build_direct_topology(std::vector<SensorNode> nodes);

// Each node attaches to its nearest access point (tie -> lowest AP index);
// access points hang off the router tree given by `routers`.
Topology build_hierarchical_topology(std::vector<SensorNode> nodes,
                                     std::vector<AccessPoint> access_points,
                                     std::vector<RouterSpec> routers);

// Full hop list from src to dst, endpoints included. Direct mesh routes by
// BFS shortest path (tie -> lexicographically smallest node-id sequence);
// hierarchical routes up to the common ancestor and back down.
std::vector<Hop> route(const Topology& topology, int src_id, int dst_id);

inline int hop_count(const std::vector<Hop>& path) {
    return static_cast<int>(path.size()) - 1;
}

// M = sum over all i,j of M_ij: the load seen by a single central node.
double central_node_traffic(const TrafficMatrix& tm);

// Cross-subnet volume sum over i in subnet1, j in subnet2 (one direction).
double router_traffic(const TrafficMatrix& tm, const std::set<int>& subnet1,
                      const std::set<int>& subnet2);

// Routes every nonzero M_ij and charges the volume to each intermediate
// hop; endpoints carry nothing.
std::map<Hop, double> accumulate_traffic(const Topology& topology, const TrafficMatrix& tm);

}  // namespace helios
