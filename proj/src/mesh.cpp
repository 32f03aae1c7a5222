#include "tentkit/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <map>
#include <numbers>
#include <set>
#include <sstream>
#include <unordered_map>

namespace tentkit {

const char* to_string(BoundaryTag tag) {
    switch (tag) {
        case BoundaryTag::inflow: return "inflow";
        case BoundaryTag::outflow: return "outflow";
        case BoundaryTag::reflect: return "reflect";
        case BoundaryTag::generic: return "generic";
    }
    return "generic";
}

BoundaryTag boundary_tag_from_string(const std::string& name) {
    if (name == "inflow") return BoundaryTag::inflow;
    if (name == "outflow") return BoundaryTag::outflow;
    if (name == "reflect") return BoundaryTag::reflect;
    if (name == "generic") return BoundaryTag::generic;
    throw Error("unknown boundary tag '" + name + "'");
}

namespace {

double signed_area(const Vec& a, const Vec& b, const Vec& c) {
    return 0.5 * ((b - a).x() * (c - a).y() - (b - a).y() * (c - a).x());
}

std::uint64_t edge_key(Index a, Index b) {
    if (a > b) std::swap(a, b);
    return (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint32_t>(b);
}

double interior_angle(const Vec& at, const Vec& b, const Vec& c) {
    const Vec u = b - at, w = c - at;
    return std::atan2(std::abs(u.x() * w.y() - u.y() * w.x()), u.dot(w));
}

}  // namespace

SpatialMesh SpatialMesh::build(std::vector<Vec> vertices, std::vector<Element> elements,
                               const std::vector<std::pair<Edge, BoundaryTag>>& tags,
                               BoundaryTag default_tag) {
    SpatialMesh m;
    const Index nv = static_cast<Index>(vertices.size());
    for (const auto& el : elements)
        for (Index v : el)
            if (v < 0 || v >= nv)
                throw InvariantViolation("element references vertex " + std::to_string(v) +
                                         " outside [0," + std::to_string(nv) + ")");

    // Orientation and positive area.
    for (std::size_t e = 0; e < elements.size(); ++e) {
        auto& el = elements[e];
        double a = signed_area(vertices[el[0]], vertices[el[1]], vertices[el[2]]);
        const double scale = std::max({(vertices[el[1]] - vertices[el[0]]).squaredNorm(),
                                       (vertices[el[2]] - vertices[el[0]]).squaredNorm(),
                                       (vertices[el[2]] - vertices[el[1]]).squaredNorm()});
        if (!(std::abs(a) > 1e-14 * scale))
            throw InvariantViolation("positive area: element " + std::to_string(e) + " is degenerate");
        if (a < 0) std::swap(el[1], el[2]);
    }

    // Duplicated elements.
    {
        std::set<std::array<Index, 3>> seen;
        for (std::size_t e = 0; e < elements.size(); ++e) {
            auto key = elements[e];
            std::sort(key.begin(), key.end());
            if (!seen.insert(key).second)
                throw InvariantViolation("conformity: element " + std::to_string(e) + " is duplicated");
        }
    }

    m.vertices_ = std::move(vertices);
    m.elements_ = std::move(elements);
    const Index ne = m.num_elements();

    // Edges.
    std::unordered_map<std::uint64_t, Index> edge_index;
    m.element_edges_.resize(ne);
    for (Index e = 0; e < ne; ++e) {
        const auto& el = m.elements_[e];
        for (int k = 0; k < 3; ++k) {
            Index a = el[(k + 1) % 3], b = el[(k + 2) % 3];
            auto [it, inserted] = edge_index.try_emplace(edge_key(a, b), static_cast<Index>(m.edges_.size()));
            if (inserted) {
                m.edges_.push_back({std::min(a, b), std::max(a, b)});
                m.edge_elements_.push_back({e, -1});
            } else {
                auto& adj = m.edge_elements_[it->second];
                if (adj[1] >= 0)
                    throw InvariantViolation("conformity: edge (" + std::to_string(a) + "," + std::to_string(b) +
                                             ") shared by more than two elements");
                adj[1] = e;
            }
            m.element_edges_[e][k] = it->second;
        }
    }
    const Index nedges = m.num_edges();
    m.edge_length_.resize(nedges);
    for (Index i = 0; i < nedges; ++i)
        m.edge_length_[i] = (m.vertices_[m.edges_[i][1]] - m.vertices_[m.edges_[i][0]]).norm();

    // Adjacency.
    m.vertex_elements_.assign(nv, {});
    m.vertex_edges_.assign(nv, {});
    for (Index e = 0; e < ne; ++e)
        for (Index v : m.elements_[e]) m.vertex_elements_[v].push_back(e);
    for (Index i = 0; i < nedges; ++i) {
        m.vertex_edges_[m.edges_[i][0]].push_back(i);
        m.vertex_edges_[m.edges_[i][1]].push_back(i);
    }
    m.boundary_vertex_.assign(nv, false);
    for (Index i = 0; i < nedges; ++i)
        if (m.edge_elements_[i][1] < 0) m.boundary_vertex_[m.edges_[i][0]] = m.boundary_vertex_[m.edges_[i][1]] = true;

    // Local fan check: interior vertices see 2π, boundary vertices strictly less.
    {
        std::vector<double> angle_sum(nv, 0.0);
        for (Index e = 0; e < ne; ++e) {
            const auto& el = m.elements_[e];
            for (int k = 0; k < 3; ++k)
                angle_sum[el[k]] += interior_angle(m.vertices_[el[k]], m.vertices_[el[(k + 1) % 3]],
                                                   m.vertices_[el[(k + 2) % 3]]);
        }
        const double two_pi = 2.0 * std::numbers::pi;
        for (Index v = 0; v < nv; ++v) {
            if (m.vertex_elements_[v].empty()) continue;
            if (!m.boundary_vertex_[v] && std::abs(angle_sum[v] - two_pi) > 1e-9)
                throw InvariantViolation("conformity: elements around interior vertex " + std::to_string(v) +
                                         " overlap or leave a gap");
            if (m.boundary_vertex_[v] && angle_sum[v] > two_pi - 1e-9)
                throw InvariantViolation("conformity: boundary vertex " + std::to_string(v) +
                                         " is surrounded (hanging node or overlap)");
        }
    }

    // Hanging vertices: brute force on moderate meshes.
    if (ne <= 10000) {
        for (Index i = 0; i < nedges; ++i) {
            if (m.edge_elements_[i][1] >= 0) continue;
            const Vec& a = m.vertices_[m.edges_[i][0]];
            const Vec& b = m.vertices_[m.edges_[i][1]];
            const Vec d = b - a;
            const double len2 = d.squaredNorm();
            for (Index v = 0; v < nv; ++v) {
                if (v == m.edges_[i][0] || v == m.edges_[i][1] || m.vertex_elements_[v].empty()) continue;
                const Vec w = m.vertices_[v] - a;
                const double s = w.dot(d) / len2;
                if (s <= 1e-12 || s >= 1 - 1e-12) continue;
                const double cross = d.x() * w.y() - d.y() * w.x();
                if (std::abs(cross) <= 1e-12 * len2)
                    throw InvariantViolation("conformity: vertex " + std::to_string(v) +
                                             " lies inside boundary edge " + std::to_string(i));
            }
        }
    }

    // Boundary facets.
    m.edge_boundary_slot_.assign(nedges, -1);
    std::vector<std::optional<BoundaryTag>> assigned(nedges);
    for (const auto& [ev, tag] : tags) {
        auto it = edge_index.find(edge_key(ev[0], ev[1]));
        if (it == edge_index.end() || m.edge_elements_[it->second][1] >= 0)
            throw InvariantViolation("boundary facets: (" + std::to_string(ev[0]) + "," + std::to_string(ev[1]) +
                                     ") is not a boundary edge");
        assigned[it->second] = tag;
    }
    for (Index i = 0; i < nedges; ++i) {
        if (m.edge_elements_[i][1] >= 0) continue;
        m.edge_boundary_slot_[i] = static_cast<Index>(m.boundary_facets_.size());
        m.boundary_facets_.push_back({i, assigned[i].value_or(default_tag)});
    }

    m.area_.resize(ne);
    m.diameter_.resize(ne);
    for (Index e = 0; e < ne; ++e) {
        const auto& el = m.elements_[e];
        m.area_[e] = signed_area(m.vertices_[el[0]], m.vertices_[el[1]], m.vertices_[el[2]]);
        double d = 0;
        for (int k = 0; k < 3; ++k) d = std::max(d, m.edge_length_[m.element_edges_[e][k]]);
        m.diameter_[e] = d;
    }
    return m;
}

std::optional<BoundaryTag> SpatialMesh::edge_tag(Index i) const {
    const Index slot = edge_boundary_slot_[i];
    if (slot < 0) return std::nullopt;
    return boundary_facets_[slot].tag;
}

Index SpatialMesh::find_edge(Index a, Index b) const {
    for (Index i : vertex_edges_[a])
        if (edges_[i][0] == b || edges_[i][1] == b) return i;
    return -1;
}

Vec SpatialMesh::element_centroid(Index e) const {
    const auto& el = elements_[e];
    return (vertices_[el[0]] + vertices_[el[1]] + vertices_[el[2]]) / 3.0;
}

Mat SpatialMesh::element_jacobian(Index e) const {
    const auto& el = elements_[e];
    Mat j;
    j.col(0) = vertices_[el[1]] - vertices_[el[0]];
    j.col(1) = vertices_[el[2]] - vertices_[el[0]];
    return j;
}

Vec SpatialMesh::outward_normal(Index e, int k) const {
    const auto& el = elements_[e];
    const Vec t = vertices_[el[(k + 2) % 3]] - vertices_[el[(k + 1) % 3]];
    // Counter-clockwise element: outward normal is the tangent rotated clockwise.
    return Vec(t.y(), -t.x()).normalized();
}

bool SpatialMesh::operator==(const SpatialMesh& other) const {
    if (vertices_.size() != other.vertices_.size() || elements_ != other.elements_) return false;
    for (std::size_t i = 0; i < vertices_.size(); ++i)
        if (vertices_[i] != other.vertices_[i]) return false;
    if (boundary_facets_.size() != other.boundary_facets_.size()) return false;
    for (std::size_t i = 0; i < boundary_facets_.size(); ++i)
        if (boundary_facets_[i].edge != other.boundary_facets_[i].edge ||
            boundary_facets_[i].tag != other.boundary_facets_[i].tag)
            return false;
    return true;
}

int VertexPatch::local_vertex(Index v) const {
    for (std::size_t i = 0; i < vertices.size(); ++i)
        if (vertices[i] == v) return static_cast<int>(i);
    return -1;
}

VertexPatch vertex_patch(const SpatialMesh& mesh, Index v) {
    if (v < 0 || v >= mesh.num_vertices())
        throw std::out_of_range("vertex_patch: vertex " + std::to_string(v) + " out of range");
    VertexPatch patch;
    patch.center = v;
    auto els = mesh.vertex_elements(v);
    patch.elements.assign(els.begin(), els.end());
    std::sort(patch.elements.begin(), patch.elements.end());
    std::vector<Index> others;
    std::vector<Index> edges;
    for (Index e : patch.elements) {
        for (Index w : mesh.element(e))
            if (w != v) others.push_back(w);
        for (Index i : mesh.element_edges(e)) edges.push_back(i);
    }
    std::sort(others.begin(), others.end());
    others.erase(std::unique(others.begin(), others.end()), others.end());
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    patch.vertices.push_back(v);
    patch.vertices.insert(patch.vertices.end(), others.begin(), others.end());
    patch.edges = std::move(edges);
    return patch;
}

MeshQuality mesh_quality(const SpatialMesh& mesh) {
    MeshQuality q{std::numbers::pi, std::numeric_limits<double>::infinity(), 0.0,
                  std::numeric_limits<double>::infinity(), 0.0};
    for (Index e = 0; e < mesh.num_elements(); ++e) {
        const auto& el = mesh.element(e);
        double perimeter = 0;
        for (int k = 0; k < 3; ++k) {
            q.theta_min = std::min(q.theta_min, interior_angle(mesh.vertex(el[k]), mesh.vertex(el[(k + 1) % 3]),
                                                               mesh.vertex(el[(k + 2) % 3])));
            const double len = mesh.edge_length(mesh.element_edge(e, k));
            q.shortest_edge = std::min(q.shortest_edge, len);
            perimeter += len;
        }
        const double diam = mesh.element_diameter(e);
        q.h_min = std::min(q.h_min, diam);
        q.h_max = std::max(q.h_max, diam);
        const double inradius = 2.0 * mesh.element_area(e) / perimeter;
        q.shape_ratio = std::max(q.shape_ratio, diam / inradius);
    }
    return q;
}

// ---------------------------------------------------------------------------
// Generators
// ---------------------------------------------------------------------------

namespace {

/// Newest-vertex bisection on triangles stored apex-first: (apex; b, c) with
/// refinement edge (b,c). Starting from squares split along a diagonal with the
/// right angle as apex, refinement stays conforming and all triangles similar.
class BisectionMesh {
public:
    std::vector<Vec> vertices;
    std::vector<Element> tris;
    std::vector<bool> active;

    void add(const Element& t) {
        const Index id = static_cast<Index>(tris.size());
        tris.push_back(t);
        active.push_back(true);
        for (int k = 0; k < 3; ++k) edge_tris_[edge_key(t[(k + 1) % 3], t[(k + 2) % 3])].push_back(id);
    }

    void refine(Index t) {
        if (!active[t]) return;
        const Index b = tris[t][1], c = tris[t][2];
        Index nbr = neighbor(t, b, c);
        if (nbr >= 0 && !has_refinement_edge(nbr, b, c)) {
            refine(nbr);
            nbr = neighbor(t, b, c);
            if (nbr >= 0 && !has_refinement_edge(nbr, b, c))
                throw MeshGenerationError("bisection closure failed: incompatible refinement edges");
        }
        const Index mid = midpoint(b, c);
        bisect(t, mid);
        if (nbr >= 0) bisect(nbr, mid);
    }

    double diameter(Index t) const {
        const auto& el = tris[t];
        return (vertices[el[1]] - vertices[el[2]]).norm();
    }

    Vec centroid(Index t) const {
        const auto& el = tris[t];
        return (vertices[el[0]] + vertices[el[1]] + vertices[el[2]]) / 3.0;
    }

private:
    std::unordered_map<std::uint64_t, std::vector<Index>> edge_tris_;
    std::unordered_map<std::uint64_t, Index> midpoints_;

    Index neighbor(Index t, Index b, Index c) const {
        auto it = edge_tris_.find(edge_key(b, c));
        if (it == edge_tris_.end()) return -1;
        for (Index o : it->second)
            if (o != t && active[o]) return o;
        return -1;
    }

    bool has_refinement_edge(Index t, Index b, Index c) const {
        return edge_key(tris[t][1], tris[t][2]) == edge_key(b, c);
    }

    Index midpoint(Index b, Index c) {
        auto [it, inserted] = midpoints_.try_emplace(edge_key(b, c), static_cast<Index>(vertices.size()));
        if (inserted) vertices.push_back(0.5 * (vertices[b] + vertices[c]));
        return it->second;
    }

    void bisect(Index t, Index mid) {
        active[t] = false;
        const Element el = tris[t];
        for (int k = 0; k < 3; ++k) {
            auto& list = edge_tris_[edge_key(el[(k + 1) % 3], el[(k + 2) % 3])];
            list.erase(std::remove(list.begin(), list.end(), t), list.end());
        }
        add({mid, el[0], el[1]});
        add({mid, el[2], el[0]});
    }
};

/// Adds the two triangles of the square with lower-left grid corner (i,j).
void add_square(BisectionMesh& bm, Index v00, Index v10, Index v01, Index v11) {
    bm.add({v10, v11, v00});
    bm.add({v01, v00, v11});
}

SpatialMesh finish(BisectionMesh& bm, const std::function<BoundaryTag(const Vec&, const Vec&)>& tagger) {
    std::vector<Index> remap(bm.vertices.size(), -1);
    std::vector<Vec> verts;
    std::vector<Element> elements;
    for (std::size_t t = 0; t < bm.tris.size(); ++t) {
        if (!bm.active[t]) continue;
        Element el = bm.tris[t];
        for (auto& v : el) {
            if (remap[v] < 0) {
                remap[v] = static_cast<Index>(verts.size());
                verts.push_back(bm.vertices[v]);
            }
            v = remap[v];
        }
        elements.push_back(el);
    }
    SpatialMesh untagged = SpatialMesh::build(verts, elements);
    std::vector<std::pair<Edge, BoundaryTag>> tags;
    for (const auto& bf : untagged.boundary_facets()) {
        const Edge& e = untagged.edge(bf.edge);
        tags.push_back({e, tagger(untagged.vertex(e[0]), untagged.vertex(e[1]))});
    }
    return SpatialMesh::build(std::move(verts), std::move(elements), tags);
}

}  // namespace

SpatialMesh generate_structured_square(int level) {
    if (level < 0 || level > 12) throw std::invalid_argument("generate_structured_square: level must be in [0,12]");
    const Index n = Index{1} << level;
    std::vector<Vec> verts;
    verts.reserve(static_cast<std::size_t>(n + 1) * (n + 1));
    for (Index j = 0; j <= n; ++j)
        for (Index i = 0; i <= n; ++i) verts.emplace_back(double(i) / n, double(j) / n);
    auto id = [n](Index i, Index j) { return j * (n + 1) + i; };
    std::vector<Element> elements;
    elements.reserve(2 * static_cast<std::size_t>(n) * n);
    std::vector<std::pair<Edge, BoundaryTag>> tags;
    for (Index j = 0; j < n; ++j)
        for (Index i = 0; i < n; ++i) {
            elements.push_back({id(i + 1, j), id(i + 1, j + 1), id(i, j)});
            elements.push_back({id(i, j + 1), id(i, j), id(i + 1, j + 1)});
        }
    return SpatialMesh::build(std::move(verts), std::move(elements), tags, BoundaryTag::reflect);
}

SpatialMesh generate_step_channel(double h_target, double h_corner) {
    if (!(h_corner > 0) || !(h_corner <= h_target))
        throw std::invalid_argument("generate_step_channel: need 0 < h_corner <= h_target");
    if (h_target > 0.2 + 1e-12 || h_corner < 1e-4)
        throw MeshGenerationError("generate_step_channel: sizes would produce degenerate triangles (need h_target <= 0.2, "
                                  "h_corner >= 1e-4)");
    // Base grid: squares of side 1/(5n) so that x = 0.6, 3 and y = 0.2, 1 are grid lines.
    const Index n = std::max<Index>(1, static_cast<Index>(std::lround(0.2 / h_target)));
    const Index nx = 15 * n, ny = 5 * n;
    BisectionMesh bm;
    std::vector<Index> grid(static_cast<std::size_t>(nx + 1) * (ny + 1), -1);
    auto vid = [&](Index i, Index j) {
        Index& slot = grid[static_cast<std::size_t>(j) * (nx + 1) + i];
        if (slot < 0) {
            slot = static_cast<Index>(bm.vertices.size());
            bm.vertices.emplace_back(double(i) / double(5 * n), double(j) / double(5 * n));
        }
        return slot;
    };
    for (Index j = 0; j < ny; ++j)
        for (Index i = 0; i < nx; ++i) {
            if (i >= 3 * n && j < n) continue;  // inside the step
            add_square(bm, vid(i, j), vid(i + 1, j), vid(i, j + 1), vid(i + 1, j + 1));
        }

    const Vec corner(0.6, 0.2);
    const double grading = 0.5;
    auto size_at = [&](double dist) { return h_corner + grading * dist; };
    for (bool changed = true; changed;) {
        changed = false;
        const std::size_t count = bm.tris.size();
        for (std::size_t t = 0; t < count; ++t) {
            if (!bm.active[t]) continue;
            const double d = bm.diameter(static_cast<Index>(t));
            // distance from the element to the corner, not its centroid
            const double dist = std::max(0.0, (bm.centroid(static_cast<Index>(t)) - corner).norm() - d);
            if (d > 1.0001 * size_at(dist)) {
                bm.refine(static_cast<Index>(t));
                changed = true;
            }
        }
        if (bm.tris.size() > 4'000'000) throw MeshGenerationError("generate_step_channel: mesh too large");
    }
    return finish(bm, [](const Vec& a, const Vec& b) {
        if (a.x() == 0.0 && b.x() == 0.0) return BoundaryTag::inflow;
        if (a.x() == 3.0 && b.x() == 3.0) return BoundaryTag::outflow;
        return BoundaryTag::reflect;
    });
}

// ---------------------------------------------------------------------------
// Text format
// ---------------------------------------------------------------------------

namespace {

struct LineReader {
    std::istream& in;
    int line_no = 0;

    /// Next non-empty line with comments stripped; false at EOF.
    bool next(std::string& out) {
        std::string raw;
        while (std::getline(in, raw)) {
            ++line_no;
            if (auto pos = raw.find('#'); pos != std::string::npos) raw.erase(pos);
            if (raw.find_first_not_of(" \t\r") == std::string::npos) continue;
            out = raw;
            return true;
        }
        return false;
    }

    std::string require(const char* what) {
        std::string s;
        if (!next(s)) throw ParseError(std::string("unexpected end of file, expected ") + what, line_no + 1);
        return s;
    }
};

template <class... T>
void parse_fields(const std::string& s, int line, const char* what, T&... fields) {
    std::istringstream is(s);
    (is >> ... >> fields);
    std::string extra;
    if (is.fail() || (is >> extra)) throw ParseError(std::string("malformed ") + what + ": '" + s + "'", line);
}

std::size_t parse_section(LineReader& r, const char* keyword) {
    const std::string s = r.require(keyword);
    std::string kw;
    long long count = -1;
    parse_fields(s, r.line_no, keyword, kw, count);
    if (kw != keyword || count < 0)
        throw ParseError(std::string("expected '") + keyword + " <count>', got '" + s + "'", r.line_no);
    return static_cast<std::size_t>(count);
}

}  // namespace

SpatialMesh read_mesh(std::istream& in) {
    LineReader r{in};
    {
        const std::string header = r.require("header");
        std::string magic, dimkw;
        int version = 0, dim = 0;
        parse_fields(header, r.line_no, "header", magic, version, dimkw, dim);
        if (magic != "mtpmesh" || version != 1 || dimkw != "dim")
            throw ParseError("expected header 'mtpmesh 1 dim 2'", r.line_no);
        if (dim != kSpaceDim) throw ParseError("unsupported dimension " + std::to_string(dim), r.line_no);
    }
    std::vector<Vec> verts(parse_section(r, "vertices"));
    for (auto& v : verts) {
        const std::string s = r.require("vertex");
        double x, y;
        parse_fields(s, r.line_no, "vertex", x, y);
        v = Vec(x, y);
    }
    std::vector<Element> elements(parse_section(r, "elements"));
    for (auto& el : elements) {
        const std::string s = r.require("element");
        long long a, b, c;
        parse_fields(s, r.line_no, "element", a, b, c);
        el = {static_cast<Index>(a), static_cast<Index>(b), static_cast<Index>(c)};
    }
    std::vector<std::pair<Edge, BoundaryTag>> tags(parse_section(r, "boundary"));
    for (auto& t : tags) {
        const std::string s = r.require("boundary facet");
        long long a, b;
        std::string tag;
        parse_fields(s, r.line_no, "boundary facet", a, b, tag);
        try {
            t = {{static_cast<Index>(a), static_cast<Index>(b)}, boundary_tag_from_string(tag)};
        } catch (const Error& e) {
            throw ParseError(e.what(), r.line_no);
        }
    }
    std::string trailing;
    if (r.next(trailing)) throw ParseError("unexpected trailing content '" + trailing + "'", r.line_no);
    return SpatialMesh::build(std::move(verts), std::move(elements), tags);
}

void write_mesh(const SpatialMesh& mesh, std::ostream& out) {
    out << "mtpmesh 1 dim 2\n";
    out << std::setprecision(17);
    out << "vertices " << mesh.num_vertices() << "\n";
    for (const auto& v : mesh.vertices()) out << v.x() << " " << v.y() << "\n";
    out << "elements " << mesh.num_elements() << "\n";
    for (const auto& el : mesh.elements()) out << el[0] << " " << el[1] << " " << el[2] << "\n";
    out << "boundary " << mesh.boundary_facets().size() << "\n";
    for (const auto& bf : mesh.boundary_facets()) {
        const Edge& e = mesh.edge(bf.edge);
        out << e[0] << " " << e[1] << " " << to_string(bf.tag) << "\n";
    }
}

SpatialMesh load_mesh(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open mesh file '" + path + "'");
    return read_mesh(in);
}

void save_mesh(const SpatialMesh& mesh, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write mesh file '" + path + "'");
    write_mesh(mesh, out);
    if (!out) throw Error("write failed for '" + path + "'");
}

}  // namespace tentkit
