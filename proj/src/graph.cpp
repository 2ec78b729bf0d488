#include "latticefilm/graph.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <istream>
#include <set>
#include <utility>

namespace latticefilm {

namespace {

std::string elem(const char* kind, std::int64_t id) {
    return std::string(kind) + " " + std::to_string(id);
}

}  // namespace

LatticeGraph::LatticeGraph(std::vector<Node> nodes, std::vector<Edge> edges,
                           double default_radius)
    : nodes_(std::move(nodes)), edges_(std::move(edges)), default_radius_(default_radius) {
    if (!(default_radius_ > 0.0))
        throw ValidationError("default_radius must be positive");

    node_index_.reserve(nodes_.size());
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        const Node& n = nodes_[i];
        if (!n.position.allFinite())
            throw ValidationError(elem("node", n.id) + " has non-finite coordinates");
        if (!node_index_.emplace(n.id, i).second)
            throw ValidationError(elem("node", n.id) + " has a duplicate id");
    }

    incidence_.resize(nodes_.size());
    std::set<std::pair<std::int64_t, std::int64_t>> seen;
    for (std::size_t i = 0; i < edges_.size(); ++i) {
        const Edge& e = edges_[i];
        if (e.a == e.b)
            throw ValidationError(elem("edge", e.id) + " joins a node to itself");
        for (std::int64_t end : {e.a, e.b})
            if (!node_index_.count(end))
                throw ValidationError(elem("edge", e.id) + " references missing node " +
                                      std::to_string(end));
        if (!seen.emplace(std::min(e.a, e.b), std::max(e.a, e.b)).second)
            throw ValidationError(elem("edge", e.id) + " duplicates another edge");
        if (e.radius && !(*e.radius > 0.0))
            throw ValidationError(elem("edge", e.id) + " has nonpositive radius");
        if (!(edge_length(e) > 0.0))
            throw ValidationError(elem("edge", e.id) + " has zero length");
        incidence_[node_index_.at(e.a)].push_back(i);
        incidence_[node_index_.at(e.b)].push_back(i);
    }
    for (auto& inc : incidence_)
        std::sort(inc.begin(), inc.end(),
                  [&](std::size_t x, std::size_t y) { return edges_[x].id < edges_[y].id; });
}

const Node& LatticeGraph::node(std::int64_t id) const {
    return nodes_[node_index(id)];
}

std::size_t LatticeGraph::node_index(std::int64_t id) const {
    auto it = node_index_.find(id);
    if (it == node_index_.end())
        throw ValidationError(elem("node", id) + " does not exist");
    return it->second;
}

const std::vector<std::size_t>& LatticeGraph::incident_edges(std::int64_t node_id) const {
    return incidence_[node_index(node_id)];
}

LatticeGraph load_graph(std::istream& in, GraphFormat format) {
    if (format != GraphFormat::json)
        throw ValidationError("unsupported graph format");

    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("graph parse error: ") + e.what());
    }

    try {
        std::vector<Node> nodes;
        for (const auto& jn : doc.at("nodes")) {
            Node n;
            n.id = jn.at("id").get<std::int64_t>();
            n.position = Vec3(jn.at("x").get<double>(), jn.at("y").get<double>(),
                              jn.at("z").get<double>());
            nodes.push_back(n);
        }
        std::vector<Edge> edges;
        for (const auto& je : doc.at("edges")) {
            Edge e;
            e.id = je.at("id").get<std::int64_t>();
            e.a = je.at("a").get<std::int64_t>();
            e.b = je.at("b").get<std::int64_t>();
            if (je.contains("radius")) e.radius = je.at("radius").get<double>();
            edges.push_back(e);
        }
        const double default_radius = doc.value("default_radius", 1.0);
        return LatticeGraph(std::move(nodes), std::move(edges), default_radius);
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("graph schema error: ") + e.what());
    }
}

NodeStar node_star(const LatticeGraph& graph, std::int64_t node_id) {
    NodeStar star;
    star.node = graph.nodes()[graph.node_index(node_id)];
    for (std::size_t ei : graph.incident_edges(node_id)) {
        const Edge& e = graph.edges()[ei];
        const Node& other = graph.node(e.a == node_id ? e.b : e.a);
        StarStrut s;
        s.edge_id = e.id;
        s.length = (other.position - star.node.position).norm();
        s.direction = (other.position - star.node.position) / s.length;
        s.radius = graph.edge_radius(e);
        star.incident.push_back(s);
    }
    if (star.incident.empty())
        throw ValidationError(elem("node", node_id) + " has no incident edges");

    const double r0 = star.incident.front().radius;
    for (const StarStrut& s : star.incident)
        if (std::abs(s.radius - r0) > 1e-12 * std::max(1.0, r0))
            throw ValidationError(elem("node", node_id) +
                                  " mixes strut radii; uniform radii per node required");

    for (std::size_t i = 0; i < star.incident.size(); ++i)
        for (std::size_t j = i + 1; j < star.incident.size(); ++j)
            if (angle_between(star.incident[i].direction, star.incident[j].direction) < 1e-6)
                throw ValidationError(
                    elem("node", node_id) + " has coincident strut directions (edges " +
                    std::to_string(star.incident[i].edge_id) + ", " +
                    std::to_string(star.incident[j].edge_id) + ")");
    return star;
}

}  // namespace latticefilm
