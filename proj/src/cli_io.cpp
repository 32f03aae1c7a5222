#include "tentkit/cli_io.hpp"

#include "tentkit/basis.hpp"

#include <charconv>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

namespace tentkit {

namespace {

const std::vector<double>* find_field(const std::vector<NamedField>& fields, const std::string& name) {
    for (const auto& f : fields)
        if (f.first == name) return &f.second;
    return nullptr;
}

std::string check_name(const std::string& name) {
    if (name.empty() || name.find_first_of(" \t\n") != std::string::npos)
        throw InvariantViolation("snapshot: field names must be non-empty without whitespace: '" + name + "'");
    return name;
}

/// P1 vertex averages of element values and the element means, for one evaluator.
template <class Eval, class Mean>
void sample(const SpatialMesh& mesh, int components, Eval&& eval, Mean&& mean, std::vector<NamedField>& points,
            std::vector<NamedField>& cells) {
    const Index nv = mesh.num_vertices(), ne = mesh.num_elements();
    for (int c = 0; c < components; ++c) {
        points[c].second.assign(nv, 0.0);
        cells[c].second.assign(ne, 0.0);
    }
    std::vector<int> count(nv, 0);
    for (Index e = 0; e < ne; ++e) {
        const State m = mean(e);
        for (int c = 0; c < components; ++c) cells[c].second[e] = m[c];
        for (Index v : mesh.element(e)) {
            const State u = eval(e, mesh.vertex(v));
            for (int c = 0; c < components; ++c) points[c].second[v] += u[c];
            ++count[v];
        }
    }
    for (Index v = 0; v < nv; ++v)
        for (int c = 0; c < components; ++c) points[c].second[v] /= std::max(count[v], 1);
}

}  // namespace

void FieldSnapshot::validate() const {
    if (!mesh) throw InvariantViolation("snapshot: no mesh");
    if (!(time >= 0.0)) throw InvariantViolation("snapshot: negative time");
    for (const auto& f : point_data) {
        check_name(f.first);
        if (static_cast<Index>(f.second.size()) != mesh->num_vertices())
            throw InvariantViolation("snapshot: point field '" + f.first + "' has the wrong length");
    }
    for (const auto& f : cell_data) {
        check_name(f.first);
        if (static_cast<Index>(f.second.size()) != mesh->num_elements())
            throw InvariantViolation("snapshot: cell field '" + f.first + "' has the wrong length");
    }
}

const std::vector<double>* FieldSnapshot::cell_field(const std::string& name) const {
    return find_field(cell_data, name);
}

const std::vector<double>* FieldSnapshot::point_field(const std::string& name) const {
    return find_field(point_data, name);
}

FieldSnapshot dg_snapshot(const DGSpace& space, const Eigen::VectorXd& dofs, double time,
                          std::vector<std::string> names) {
    const int L = space.components();
    for (int c = static_cast<int>(names.size()); c < L; ++c) names.push_back("u" + std::to_string(c));
    FieldSnapshot s;
    s.time = time;
    s.mesh = &space.mesh();
    for (int c = 0; c < L; ++c) {
        s.point_data.emplace_back(names[c], std::vector<double>{});
        s.cell_data.emplace_back(names[c], std::vector<double>{});
    }
    sample(
        space.mesh(), L, [&](Index e, const Vec& x) { return space.evaluate(dofs, e, x); },
        [&](Index e) { return space.mean(dofs, e); }, s.point_data, s.cell_data);
    return s;
}

FieldSnapshot mixed_snapshot(const MixedSpace& space, const Eigen::VectorXd& broken, double time) {
    if (broken.size() != space.broken_size()) throw InvariantViolation("snapshot: wrong wave front size");
    const auto& mesh = space.mesh();
    FieldSnapshot s;
    s.time = time;
    s.mesh = &mesh;
    for (const char* n : {"q1", "q2", "mu"}) {
        s.point_data.emplace_back(n, std::vector<double>{});
        s.cell_data.emplace_back(n, std::vector<double>{});
    }
    auto mean = [&](Index e) {
        const ElementQuadrature q = element_quadrature(mesh, e, 2 * space.degree() + 2);
        State m = State::Zero(3);
        for (std::size_t i = 0; i < q.points.size(); ++i)
            m += q.weights[i] * space.evaluate_broken(broken, e, q.points[i]);
        return State(m / mesh.element_area(e));
    };
    sample(
        mesh, 3, [&](Index e, const Vec& x) { return space.evaluate_broken(broken, e, x); }, mean, s.point_data,
        s.cell_data);
    return s;
}

void write_vtk(const FieldSnapshot& snapshot, std::ostream& out) {
    snapshot.validate();
    const SpatialMesh& mesh = *snapshot.mesh;
    out << std::setprecision(17);
    out << "# vtk DataFile Version 3.0\n";
    out << "tentkit snapshot\n";
    out << "ASCII\n";
    out << "DATASET UNSTRUCTURED_GRID\n";
    out << "FIELD FieldData 1\nTIME 1 1 double\n" << snapshot.time << "\n";
    out << "POINTS " << mesh.num_vertices() << " double\n";
    for (const Vec& x : mesh.vertices()) out << x.x() << ' ' << x.y() << " 0\n";
    out << "CELLS " << mesh.num_elements() << ' ' << 4 * mesh.num_elements() << "\n";
    for (const auto& el : mesh.elements()) out << "3 " << el[0] << ' ' << el[1] << ' ' << el[2] << "\n";
    out << "CELL_TYPES " << mesh.num_elements() << "\n";
    for (Index e = 0; e < mesh.num_elements(); ++e) out << "5\n";
    auto section = [&](const char* kind, Index n, const std::vector<NamedField>& fields) {
        if (fields.empty()) return;
        out << kind << ' ' << n << "\n";
        for (const auto& [name, values] : fields) {
            out << "SCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
            for (double v : values) out << v << "\n";
        }
    };
    section("POINT_DATA", mesh.num_vertices(), snapshot.point_data);
    section("CELL_DATA", mesh.num_elements(), snapshot.cell_data);
    if (!out) throw Error("vtk: write failed");
}

void write_vtk(const FieldSnapshot& snapshot, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw Error("vtk: cannot open " + path);
    write_vtk(snapshot, f);
    f.close();
    if (!f) throw Error("vtk: write failed for " + path);
}

VtkContents read_vtk(std::istream& in) {
    VtkContents c;
    int line_no = 0;
    std::string line;
    auto next = [&]() -> std::string {
        while (std::getline(in, line)) {
            ++line_no;
            if (line.find_first_not_of(" \t\r") != std::string::npos) return line;
        }
        throw ParseError("unexpected end of file", line_no);
    };
    auto expect = [&](const std::string& prefix) {
        const std::string l = next();
        if (l.rfind(prefix, 0) != 0) throw ParseError("expected '" + prefix + "'", line_no);
        return l;
    };
    auto number = [&](std::istringstream& is) {
        double v;
        if (!(is >> v)) throw ParseError("expected a number", line_no);
        return v;
    };
    expect("# vtk DataFile");
    next();
    expect("ASCII");
    expect("DATASET UNSTRUCTURED_GRID");
    std::vector<NamedField>* target = nullptr;
    std::size_t count = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::istringstream is(line);
        std::string key;
        if (!(is >> key)) continue;
        if (key == "FIELD") {
            expect("TIME");
            std::istringstream v(next());
            c.time = number(v);
        } else if (key == "POINTS") {
            std::size_t n;
            is >> n;
            for (std::size_t i = 0; i < n; ++i) {
                std::istringstream v(next());
                const double x = number(v), y = number(v);
                c.points.emplace_back(x, y);
            }
        } else if (key == "CELLS") {
            std::size_t n;
            is >> n;
            for (std::size_t i = 0; i < n; ++i) {
                std::istringstream v(next());
                int k;
                Element el;
                if (!(v >> k >> el[0] >> el[1] >> el[2]) || k != 3) throw ParseError("bad cell", line_no);
                c.cells.push_back(el);
            }
        } else if (key == "CELL_TYPES") {
            std::size_t n;
            is >> n;
            for (std::size_t i = 0; i < n; ++i) next();
        } else if (key == "POINT_DATA" || key == "CELL_DATA") {
            target = key == "POINT_DATA" ? &c.point_data : &c.cell_data;
            is >> count;
        } else if (key == "SCALARS") {
            if (!target) throw ParseError("SCALARS outside a data section", line_no);
            std::string name;
            is >> name;
            expect("LOOKUP_TABLE");
            std::vector<double> values(count);
            for (std::size_t i = 0; i < count; ++i) {
                std::istringstream v(next());
                values[i] = number(v);
            }
            target->emplace_back(name, std::move(values));
        } else {
            throw ParseError("unknown section '" + key + "'", line_no);
        }
    }
    return c;
}

void write_rates_csv(const std::vector<RateRow>& rows, std::ostream& out) {
    out << "p,h,e,slope\n";
    out << std::setprecision(17);
    for (const auto& r : rows) out << r.p << ',' << r.h << ',' << r.e << ',' << r.slope << "\n";
    if (!out) throw Error("csv: write failed");
}

void write_rates_csv(const std::vector<RateRow>& rows, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw Error("csv: cannot open " + path);
    write_rates_csv(rows, f);
    f.close();
    if (!f) throw Error("csv: write failed for " + path);
}

std::vector<RateRow> read_rates_csv(std::istream& in) {
    std::string line;
    int line_no = 1;
    if (!std::getline(in, line) || line != "p,h,e,slope") throw ParseError("expected header 'p,h,e,slope'", line_no);
    std::vector<RateRow> rows;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (cells.size() != 4) throw ParseError("expected 4 columns", line_no);
        RateRow r;
        auto parse = [&](const std::string& s, auto& v) {
            const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
            if (res.ec != std::errc() || res.ptr != s.data() + s.size())
                throw ParseError("bad number '" + s + "'", line_no);
        };
        parse(cells[0], r.p);
        parse(cells[1], r.h);
        parse(cells[2], r.e);
        parse(cells[3], r.slope);
        rows.push_back(r);
    }
    return rows;
}

}  // namespace tentkit
