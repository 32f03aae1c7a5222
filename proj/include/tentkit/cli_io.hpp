#pragma once

/// @file cli_io.hpp
/// @brief Output writers: legacy ASCII VTK snapshots of fields on the triangulation
/// and the CSV table of a convergence study. Output is a pure function of the input.

#include "tentkit/common.hpp"
#include "tentkit/dg.hpp"
#include "tentkit/mesh.hpp"
#include "tentkit/mixedfem.hpp"

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace tentkit {

using NamedField = std::pair<std::string, std::vector<double>>;

struct FieldSnapshot {
    double time = 0.0;
    const SpatialMesh* mesh = nullptr;
    std::vector<NamedField> point_data;  ///< one value per vertex
    std::vector<NamedField> cell_data;   ///< one value per element

    /// Throws InvariantViolation on length mismatch, negative time or a missing mesh.
    void validate() const;
    const std::vector<double>* cell_field(const std::string& name) const;
    const std::vector<double>* point_field(const std::string& name) const;
};

/// Vertex values are the average of the adjacent element polynomials at the vertex;
/// cell values are the exact element means. Names default to u0, u1, ...
FieldSnapshot dg_snapshot(const DGSpace& space, const Eigen::VectorXd& dofs, double time,
                          std::vector<std::string> names = {});
/// Components q1, q2, mu of a broken wave front, sampled the same way.
FieldSnapshot mixed_snapshot(const MixedSpace& space, const Eigen::VectorXd& broken, double time);

void write_vtk(const FieldSnapshot& snapshot, std::ostream& out);
/// Throws Error on I/O failure.
void write_vtk(const FieldSnapshot& snapshot, const std::string& path);

/// What read_vtk recovers from a file written by write_vtk.
struct VtkContents {
    double time = 0.0;
    std::vector<Vec> points;
    std::vector<Element> cells;
    std::vector<NamedField> point_data;
    std::vector<NamedField> cell_data;
};

/// Parses the subset of legacy VTK written by write_vtk. Throws ParseError.
VtkContents read_vtk(std::istream& in);

struct RateRow {
    int p = 0;
    int level = 0;
    double h = 0.0;
    double e = 0.0;
    double slope = 0.0;
};

/// Header `p,h,e,slope`, numbers with 17 significant digits.
void write_rates_csv(const std::vector<RateRow>& rows, std::ostream& out);
void write_rates_csv(const std::vector<RateRow>& rows, const std::string& path);
/// Throws ParseError.
std::vector<RateRow> read_rates_csv(std::istream& in);

}  // namespace tentkit
