#include "helios/sensor_mesh.hpp"

#include <algorithm>
#include <deque>
#include <limits>
#include <string>
#include <unordered_set>

namespace helios {

namespace {

void check_unique_ids(const std::vector<SensorNode>& nodes) {
    std::unordered_set<int> seen;
    for (const SensorNode& node : nodes) {
        if (!seen.insert(node.id).second)
            throw Error("duplicate sensor node id " + std::to_string(node.id));
    }
}

}  // namespace

int Topology::index_of(int node_id) const {
    for (std::size_t i = 0; i < nodes.size(); ++i)
        if (nodes[i].id == node_id) return static_cast<int>(i);
    throw Error("unknown sensor node id " + std::to_string(node_id));
}

Measurement sample(const SensorNode& node, const CloudField& field, Seconds t,
                   std::optional<double> temperature, std::optional<double> pressure) {
    Measurement m;
    m.node_id = node.id;
    m.t = t;
    m.irradiance = node.channels.irradiance ? irradiance_at(field, node.position, t) : 0.0;
    if (node.channels.temperature) m.temperature = temperature;
    if (node.channels.pressure) m.pressure = pressure;
    return m;
}

Topology build_direct_topology(std::vector<SensorNode> nodes) {
    check_unique_ids(nodes);
    Topology topo;
    topo.kind = TopologyKind::direct_mesh;
    topo.nodes = std::move(nodes);
    const std::size_t n = topo.nodes.size();
    topo.adjacency.assign(n, {});
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double d = (topo.nodes[i].position - topo.nodes[j].position).norm();
            if (d <= topo.nodes[i].radio_range && d <= topo.nodes[j].radio_range) {
                topo.adjacency[i].push_back(static_cast<int>(j));
                topo.adjacency[j].push_back(static_cast<int>(i));
            }
        }
    }
    for (std::vector<int>& nbrs : topo.adjacency) {
        std::sort(nbrs.begin(), nbrs.end(), [&](int a, int b) {
            return topo.nodes[a].id < topo.nodes[b].id;
        });
    }
    return topo;
}

Topology build_hierarchical_topology(std::vector<SensorNode> nodes,
                                     std::vector<AccessPoint> access_points,
                                     std::vector<RouterSpec> routers) {
    check_unique_ids(nodes);
    if (access_points.empty()) throw Error("hierarchical topology needs at least one access point");
    if (routers.empty()) throw Error("hierarchical topology needs at least one router");
    for (const AccessPoint& ap : access_points) {
        if (ap.router < 0 || ap.router >= static_cast<int>(routers.size()))
            throw Error("access point references unknown router " + std::to_string(ap.router));
    }
    for (std::size_t r = 0; r < routers.size(); ++r) {
        const int parent = routers[r].parent;
        if (parent == static_cast<int>(r) || parent < -1 ||
            parent >= static_cast<int>(routers.size()))
            throw Error("router " + std::to_string(r) + " has invalid parent");
        // walk to a root; a revisit means the parent pointers form a cycle
        int cur = static_cast<int>(r);
        std::size_t steps = 0;
        while (routers[cur].parent != -1) {
            cur = routers[cur].parent;
            if (++steps > routers.size())
                throw Error("router parent pointers form a cycle");
        }
    }

    Topology topo;
    topo.kind = TopologyKind::hierarchical;
    topo.nodes = std::move(nodes);
    topo.access_points = std::move(access_points);
    topo.routers = std::move(routers);
    topo.node_ap.reserve(topo.nodes.size());
    for (const SensorNode& node : topo.nodes) {
        int best = 0;
        double best_d = std::numeric_limits<double>::infinity();
        for (std::size_t a = 0; a < topo.access_points.size(); ++a) {
            const double d = (node.position - topo.access_points[a].position).norm();
            if (d < best_d) {
                best_d = d;
                best = static_cast<int>(a);
            }
        }
        topo.node_ap.push_back(best);
    }
    return topo;
}

namespace {

std::vector<Hop> route_direct(const Topology& topo, int src, int dst) {
    const std::size_t n = topo.nodes.size();
    // BFS from dst gives the remaining distance at every node; walking from
    // src and always taking the lowest-id neighbor that decreases it yields
    // the lexicographically smallest shortest path.
    std::vector<int> dist(n, -1);
    std::deque<int> queue{dst};
    dist[dst] = 0;
    while (!queue.empty()) {
        const int cur = queue.front();
        queue.pop_front();
        for (int nbr : topo.adjacency[cur]) {
            if (dist[nbr] == -1) {
                dist[nbr] = dist[cur] + 1;
                queue.push_back(nbr);
            }
        }
    }
    if (dist[src] == -1)
        throw NoRouteError("no path between node " + std::to_string(topo.nodes[src].id) +
                           " and node " + std::to_string(topo.nodes[dst].id));

    std::vector<Hop> path{{NodeKind::sensor, topo.nodes[src].id}};
    int cur = src;
    while (cur != dst) {
        for (int nbr : topo.adjacency[cur]) {  // sorted by node id
            if (dist[nbr] == dist[cur] - 1) {
                cur = nbr;
                break;
            }
        }
        path.push_back({NodeKind::sensor, topo.nodes[cur].id});
    }
    return path;
}

// Access point followed by its router chain up to the root.
std::vector<Hop> chain_up(const Topology& topo, int ap_index) {
    std::vector<Hop> chain{{NodeKind::access_point, ap_index}};
    int r = topo.access_points[ap_index].router;
    while (r != -1) {
        chain.push_back({NodeKind::router, r});
        r = topo.routers[r].parent;
    }
    return chain;
}

std::vector<Hop> route_hierarchical(const Topology& topo, int src, int dst) {
    const std::vector<Hop> up_src = chain_up(topo, topo.node_ap[src]);
    const std::vector<Hop> up_dst = chain_up(topo, topo.node_ap[dst]);

    std::map<Hop, std::size_t> dst_pos;
    for (std::size_t k = 0; k < up_dst.size(); ++k) dst_pos.emplace(up_dst[k], k);

    std::vector<Hop> path{{NodeKind::sensor, topo.nodes[src].id}};
    for (const Hop& hop : up_src) {
        path.push_back(hop);
        auto it = dst_pos.find(hop);
        if (it != dst_pos.end()) {
            for (std::size_t k = it->second; k-- > 0;) path.push_back(up_dst[k]);
            path.push_back({NodeKind::sensor, topo.nodes[dst].id});
            return path;
        }
    }
    throw NoRouteError("node " + std::to_string(topo.nodes[src].id) + " and node " +
                       std::to_string(topo.nodes[dst].id) + " share no router");
}

}  // namespace

std::vector<Hop> route(const Topology& topology, int src_id, int dst_id) {
    if (src_id == dst_id)
        throw Error("route endpoints must differ, got node " + std::to_string(src_id) + " twice");
    const int src = topology.index_of(src_id);
    const int dst = topology.index_of(dst_id);
    return topology.kind == TopologyKind::direct_mesh ? route_direct(topology, src, dst)
                                                      : route_hierarchical(topology, src, dst);
}

double central_node_traffic(const TrafficMatrix& tm) {
    if (tm.rows() != tm.cols()) throw Error("traffic matrix must be square");
    return tm.sum();
}

double router_traffic(const TrafficMatrix& tm, const std::set<int>& subnet1,
                      const std::set<int>& subnet2) {
    if (tm.rows() != tm.cols()) throw Error("traffic matrix must be square");
    for (int i : subnet1) {
        if (i < 0 || i >= tm.rows()) throw OutOfRangeError("subnet index out of range");
        if (subnet2.count(i)) throw Error("subnets overlap at index " + std::to_string(i));
    }
    for (int j : subnet2)
        if (j < 0 || j >= tm.rows()) throw OutOfRangeError("subnet index out of range");
    double total = 0.0;
    for (int i : subnet1)
        for (int j : subnet2) total += tm(i, j);
    return total;
}

std::map<Hop, double> accumulate_traffic(const Topology& topology, const TrafficMatrix& tm) {
    const auto n = static_cast<Eigen::Index>(topology.nodes.size());
    if (tm.rows() != n || tm.cols() != n)
        throw GridMismatchError("traffic matrix size does not match node count");
    std::map<Hop, double> load;
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            if (i == j || tm(i, j) == 0.0) continue;
            const std::vector<Hop> path =
                route(topology, topology.nodes[i].id, topology.nodes[j].id);
            for (std::size_t k = 1; k + 1 < path.size(); ++k) load[path[k]] += tm(i, j);
        }
    }
    return load;
}

}  // namespace helios
