#include "tentkit/cli_io.hpp"

#include <doctest.h>

#include <random>
#include <sstream>

using namespace tentkit;

namespace {

SpatialMesh two_triangles() {
    return SpatialMesh::build({Vec(0, 0), Vec(1, 0), Vec(1, 1), Vec(0, 1)}, {Element{0, 1, 2}, Element{0, 2, 3}},
                              {});
}

FieldSnapshot snapshot_of(const SpatialMesh& mesh, double time) {
    FieldSnapshot s;
    s.time = time;
    s.mesh = &mesh;
    std::vector<double> pv(mesh.num_vertices()), cv(mesh.num_elements());
    for (Index v = 0; v < mesh.num_vertices(); ++v) pv[v] = 1.0 / 3.0 + v;
    for (Index e = 0; e < mesh.num_elements(); ++e) cv[e] = std::exp(-0.1 * e);
    s.point_data.emplace_back("a", pv);
    s.cell_data.emplace_back("b", cv);
    return s;
}

std::string to_string(const FieldSnapshot& s) {
    std::ostringstream os;
    write_vtk(s, os);
    return os.str();
}

}  // namespace

TEST_CASE("vtk: two triangles") {
    const SpatialMesh mesh = two_triangles();
    const std::string text = to_string(snapshot_of(mesh, 0.5));
    CHECK(text.find("POINTS 4 double") != std::string::npos);
    CHECK(text.find("CELLS 2 8") != std::string::npos);
    CHECK(text.find("CELL_TYPES 2") != std::string::npos);
    std::istringstream in(text);
    const VtkContents c = read_vtk(in);
    CHECK(c.points.size() == 4);
    REQUIRE(c.cells.size() == 2);
    CHECK(c.cells[1] == Element{0, 2, 3});
    CHECK(c.time == 0.5);
}

TEST_CASE("vtk: round trip is bit exact") {
    const SpatialMesh mesh = generate_structured_square(3);
    const FieldSnapshot s = snapshot_of(mesh, 1.0 / 7.0);
    std::istringstream in(to_string(s));
    const VtkContents c = read_vtk(in);
    CHECK(c.cells.size() == 128);
    CHECK(c.time == s.time);
    REQUIRE(c.points.size() == static_cast<std::size_t>(mesh.num_vertices()));
    for (Index v = 0; v < mesh.num_vertices(); ++v) CHECK(c.points[v] == mesh.vertex(v));
    REQUIRE(c.point_data.size() == 1);
    REQUIRE(c.cell_data.size() == 1);
    CHECK(c.point_data[0] == s.point_data[0]);
    CHECK(c.cell_data[0] == s.cell_data[0]);
}

TEST_CASE("vtk: output is deterministic") {
    const SpatialMesh mesh = generate_structured_square(2);
    CHECK(to_string(snapshot_of(mesh, 0.25)) == to_string(snapshot_of(mesh, 0.25)));
}

TEST_CASE("vtk: invalid snapshots and input are rejected") {
    const SpatialMesh mesh = two_triangles();
    FieldSnapshot s = snapshot_of(mesh, 0.0);
    s.cell_data[0].second.pop_back();
    std::ostringstream os;
    CHECK_THROWS_AS(write_vtk(s, os), InvariantViolation);
    s = snapshot_of(mesh, 0.0);
    s.point_data[0].first = "two words";
    CHECK_THROWS_AS(write_vtk(s, os), InvariantViolation);
    s = snapshot_of(mesh, -1.0);
    CHECK_THROWS_AS(write_vtk(s, os), InvariantViolation);
    std::istringstream bad("# vtk DataFile Version 3.0\nx\nBINARY\n");
    CHECK_THROWS_AS(read_vtk(bad), ParseError);
}

TEST_CASE("csv: empty table is the header") {
    std::ostringstream os;
    write_rates_csv({}, os);
    CHECK(os.str() == "p,h,e,slope\n");
    std::istringstream in(os.str());
    CHECK(read_rates_csv(in).empty());
}

TEST_CASE("csv: 17 digits round trip bit exactly") {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> U(-10.0, 0.0);
    std::vector<RateRow> rows;
    for (int i = 0; i < 50; ++i) {
        RateRow r;
        r.p = 1 + i % 3;
        r.h = std::pow(10.0, U(rng));
        r.e = std::pow(10.0, U(rng));
        r.slope = -U(rng) / 3.0;
        rows.push_back(r);
    }
    std::ostringstream os;
    write_rates_csv(rows, os);
    std::istringstream in(os.str());
    const auto back = read_rates_csv(in);
    REQUIRE(back.size() == rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        CHECK(back[i].p == rows[i].p);
        CHECK(back[i].h == rows[i].h);
        CHECK(back[i].e == rows[i].e);
        CHECK(back[i].slope == rows[i].slope);
    }
    std::istringstream bad("p,h,e,slope\n1,0.5,x,1\n");
    CHECK_THROWS_AS(read_rates_csv(bad), ParseError);
}

TEST_CASE("snapshots of discrete fields") {
    const SpatialMesh mesh = generate_structured_square(2);
    SUBCASE("dg: linear field") {
        const DGSpace space(mesh, 1, 1);
        const auto dofs = space.project([](const Vec& x) {
            State s(1);
            s[0] = 2.0 * x.x() - x.y();
            return s;
        });
        const FieldSnapshot s = dg_snapshot(space, dofs, 0.0, {"u"});
        const auto* pv = s.point_field("u");
        const auto* cv = s.cell_field("u");
        REQUIRE(pv != nullptr);
        REQUIRE(cv != nullptr);
        for (Index v = 0; v < mesh.num_vertices(); ++v)
            CHECK((*pv)[v] == doctest::Approx(2.0 * mesh.vertex(v).x() - mesh.vertex(v).y()).epsilon(1e-12));
        for (Index e = 0; e < mesh.num_elements(); ++e) {
            const Vec c = mesh.element_centroid(e);
            CHECK((*cv)[e] == doctest::Approx(2.0 * c.x() - c.y()).epsilon(1e-12));
        }
    }
    SUBCASE("mixed: broken wave front") {
        // q·n = 0 on the boundary, so the constrained moments vanish
        const MixedSpace space(mesh, 2);
        auto exact = [](const Vec& x) {
            State s(3);
            s << x.x() * (1.0 - x.x()), -x.y() * (1.0 - x.y()), x.x() + x.y();
            return s;
        };
        const auto broken = space.to_broken(space.project(exact));
        const FieldSnapshot s = mixed_snapshot(space, broken, 0.3);
        CHECK(s.time == 0.3);
        for (Index v = 0; v < mesh.num_vertices(); ++v) {
            const State u = exact(mesh.vertex(v));
            CHECK((*s.point_field("q1"))[v] == doctest::Approx(u[0]).epsilon(1e-12));
            CHECK((*s.point_field("q2"))[v] == doctest::Approx(u[1]).epsilon(1e-12));
            CHECK((*s.point_field("mu"))[v] == doctest::Approx(u[2]).epsilon(1e-12));
        }
        for (Index e = 0; e < mesh.num_elements(); ++e) {
            const Vec c = mesh.element_centroid(e);
            CHECK((*s.cell_field("mu"))[e] == doctest::Approx(c.x() + c.y()).epsilon(1e-12));
        }
        CHECK_THROWS_AS(mixed_snapshot(space, Eigen::VectorXd::Zero(3), 0.0), InvariantViolation);
    }
}
