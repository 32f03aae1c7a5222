#pragma once

/// @file mesh.hpp
/// @brief Conforming simplicial meshes of a 2D domain and their derived entities.
///
/// A SpatialMesh is immutable after construction. Construction validates:
///   - strictly positive signed area of every element (clockwise input is reoriented),
///   - conformity (no duplicated elements, edge multiplicity ≤ 2, no hanging or
///     overlapping vertices),
///   - boundary facets are exactly the edges of multiplicity 1.

#include "tentkit/common.hpp"

#include <array>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace tentkit {

enum class BoundaryTag { inflow, outflow, reflect, generic };

const char* to_string(BoundaryTag tag);
BoundaryTag boundary_tag_from_string(const std::string& name);

using Element = std::array<Index, kSpaceDim + 1>;
using Edge = std::array<Index, 2>;  ///< sorted: e[0] < e[1]

struct BoundaryFacet {
    Index edge;
    BoundaryTag tag;
};

class SpatialMesh {
public:
    SpatialMesh() = default;

    /// Validates the input and derives edges and adjacency.
    /// `tags` lists boundary edges by vertex pair (any order); boundary edges not
    /// listed receive `default_tag`. Throws InvariantViolation.
    static SpatialMesh build(std::vector<Vec> vertices, std::vector<Element> elements,
                             const std::vector<std::pair<Edge, BoundaryTag>>& tags = {},
                             BoundaryTag default_tag = BoundaryTag::generic);

    Index num_vertices() const { return static_cast<Index>(vertices_.size()); }
    Index num_elements() const { return static_cast<Index>(elements_.size()); }
    Index num_edges() const { return static_cast<Index>(edges_.size()); }

    const Vec& vertex(Index v) const { return vertices_[v]; }
    const std::vector<Vec>& vertices() const { return vertices_; }
    const Element& element(Index e) const { return elements_[e]; }
    const std::vector<Element>& elements() const { return elements_; }
    const Edge& edge(Index i) const { return edges_[i]; }
    double edge_length(Index i) const { return edge_length_[i]; }

    /// Edge opposite local vertex k of element e.
    Index element_edge(Index e, int k) const { return element_edges_[e][k]; }
    const std::array<Index, 3>& element_edges(Index e) const { return element_edges_[e]; }
    /// Elements sharing edge i; second entry is -1 on the boundary.
    const std::array<Index, 2>& edge_elements(Index i) const { return edge_elements_[i]; }
    bool is_boundary_edge(Index i) const { return edge_elements_[i][1] < 0; }
    std::optional<BoundaryTag> edge_tag(Index i) const;

    const std::vector<BoundaryFacet>& boundary_facets() const { return boundary_facets_; }

    std::span<const Index> vertex_elements(Index v) const { return vertex_elements_[v]; }
    std::span<const Index> vertex_edges(Index v) const { return vertex_edges_[v]; }
    bool is_boundary_vertex(Index v) const { return boundary_vertex_[v]; }

    /// Index of the edge joining a and b, or -1.
    Index find_edge(Index a, Index b) const;

    double element_area(Index e) const { return area_[e]; }
    double element_diameter(Index e) const { return diameter_[e]; }
    Vec element_centroid(Index e) const;

    /// Affine map x = x0 + J (ξ,η) from the reference triangle.
    Mat element_jacobian(Index e) const;

    /// Outward unit normal of element e on its local edge k.
    Vec outward_normal(Index e, int k) const;

    bool operator==(const SpatialMesh& other) const;

private:
    std::vector<Vec> vertices_;
    std::vector<Element> elements_;
    std::vector<Edge> edges_;
    std::vector<double> edge_length_;
    std::vector<std::array<Index, 3>> element_edges_;
    std::vector<std::array<Index, 2>> edge_elements_;
    std::vector<BoundaryFacet> boundary_facets_;
    std::vector<Index> edge_boundary_slot_;  // index into boundary_facets_ or -1
    std::vector<std::vector<Index>> vertex_elements_;
    std::vector<std::vector<Index>> vertex_edges_;
    std::vector<bool> boundary_vertex_;
    std::vector<double> area_;
    std::vector<double> diameter_;
};

/// Union of the elements containing one vertex, with local numbering.
struct VertexPatch {
    Index center = -1;
    std::vector<Index> elements;  ///< global element ids
    std::vector<Index> vertices;  ///< global vertex ids; vertices[0] == center
    std::vector<Index> edges;     ///< global edge ids touched by the patch elements

    /// Local position of a global vertex, or -1.
    int local_vertex(Index v) const;
};

VertexPatch vertex_patch(const SpatialMesh& mesh, Index v);

struct MeshQuality {
    double theta_min;      ///< smallest interior angle [rad]
    double h_min;          ///< smallest element diameter
    double h_max;          ///< largest element diameter
    double shortest_edge;
    double shape_ratio;    ///< max over elements of diameter / inradius
};

MeshQuality mesh_quality(const SpatialMesh& mesh);

/// Unit square split into 2^l × 2^l squares, each cut along its positively
/// sloped diagonal. All boundary facets are tagged reflect.
SpatialMesh generate_structured_square(int level);

/// Forward-facing step channel [0,3]×[0,1] \ [0.6,3]×[0,0.2], graded towards the
/// step corner. x=0 is inflow, x=3 outflow, all other boundary reflect.
SpatialMesh generate_step_channel(double h_target, double h_corner);

SpatialMesh read_mesh(std::istream& in);
void write_mesh(const SpatialMesh& mesh, std::ostream& out);
SpatialMesh load_mesh(const std::string& path);
void save_mesh(const SpatialMesh& mesh, const std::string& path);

}  // namespace tentkit
