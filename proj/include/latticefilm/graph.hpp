#pragma once

#include "latticefilm/geometry.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <unordered_map>
#include <vector>

namespace latticefilm {

struct Node {
    std::int64_t id = 0;
    Vec3 position{0, 0, 0};
};

struct Edge {
    std::int64_t id = 0;
    std::int64_t a = 0;
    std::int64_t b = 0;
    std::optional<double> radius;  // falls back to LatticeGraph::default_radius
};

// Validated lattice graph. Immutable after load; safe for concurrent reads.
class LatticeGraph {
public:
    LatticeGraph(std::vector<Node> nodes, std::vector<Edge> edges, double default_radius);

    const std::vector<Node>& nodes() const { return nodes_; }
    const std::vector<Edge>& edges() const { return edges_; }
    double default_radius() const { return default_radius_; }

    const Node& node(std::int64_t id) const;
    bool has_node(std::int64_t id) const { return node_index_.count(id) != 0; }
    std::size_t node_index(std::int64_t id) const;

    double edge_radius(const Edge& e) const { return e.radius.value_or(default_radius_); }
    double edge_length(const Edge& e) const {
        return (node(e.a).position - node(e.b).position).norm();
    }

    // Edge indices incident to a node, sorted by edge id.
    const std::vector<std::size_t>& incident_edges(std::int64_t node_id) const;

private:
    std::vector<Node> nodes_;
    std::vector<Edge> edges_;
    double default_radius_;
    std::unordered_map<std::int64_t, std::size_t> node_index_;
    std::vector<std::vector<std::size_t>> incidence_;  // by node index
};

struct StarStrut {
    std::int64_t edge_id = 0;
    Vec3 direction{0, 0, 1};  // unit, from the node toward the other endpoint
    double length = 0.0;
    double radius = 0.0;
};

// Per-node view of the incident struts; input to cutting and film building.
struct NodeStar {
    Node node;
    std::vector<StarStrut> incident;  // sorted by edge id

    std::size_t valence() const { return incident.size(); }
    double radius() const { return incident.empty() ? 0.0 : incident.front().radius; }
};

enum class GraphFormat { json };

// Parses and validates a lattice graph. Throws ValidationError with the
// offending element id on dangling edges, duplicate edges or bad radii.
LatticeGraph load_graph(std::istream& in, GraphFormat format = GraphFormat::json);

// Star of an existing node. Rejects unknown ids, coincident strut directions
// (angle < 1e-6 rad) and mixed radii within one star.
NodeStar node_star(const LatticeGraph& graph, std::int64_t node_id);

}  // namespace latticefilm
