#include "tdaf/diagnostics.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "tdaf/errors.hpp"

namespace tdaf {

double energy(const State& state, const SparseMatrix& vel_mass, const SparseMatrix& temp_mass) {
  if (state.u.size() != vel_mass.rows() || state.T.size() != temp_mass.rows()) {
    throw StructuralError("energy: state does not match the mass matrices");
  }
  return 0.5 * (state.u.dot(vel_mass * state.u) + state.T.dot(temp_mass * state.T));
}

double energy(const Problem& problem, const State& state) {
  return energy(state, problem.vel_mass(), problem.temp_mass());
}

DivergenceResidual divergence_residual(const State& state, const SparseMatrix& divergence) {
  if (state.u.size() != divergence.cols() || state.w.size() != divergence.cols()) {
    throw StructuralError("divergence_residual: state does not match the operator");
  }
  DivergenceResidual r;
  r.u = (divergence * state.u).lpNorm<Eigen::Infinity>();
  r.w = (divergence * state.w).lpNorm<Eigen::Infinity>();
  return r;
}

namespace {

int field_index(const RateTable& t, const std::string& field) {
  for (size_t i = 0; i < t.fields.size(); ++i) {
    if (t.fields[i] == field) return static_cast<int>(i);
  }
  throw ConfigError("rate table: unknown field '" + field + "'");
}

}  // namespace

double RateTable::rate(const std::string& field, int row) const {
  const int f = field_index(*this, field);
  if (row < 1 || row >= static_cast<int>(rows.size())) throw ConfigError("rate table: row has no rate");
  return *rows[row].rates[f];
}

double RateTable::error(const std::string& field, int row) const {
  const int f = field_index(*this, field);
  if (row < 0 || row >= static_cast<int>(rows.size())) throw ConfigError("rate table: row out of range");
  return rows[row].errors[f];
}

RateTable compute_rates(const std::vector<std::string>& fields, const std::vector<double>& resolutions,
                        const std::vector<std::vector<double>>& errors) {
  if (resolutions.size() < 2) throw ConfigError("compute_rates: need at least two resolutions");
  if (errors.size() != resolutions.size()) throw ConfigError("compute_rates: one error row per resolution");
  RateTable t;
  t.fields = fields;
  for (size_t r = 0; r < resolutions.size(); ++r) {
    if (errors[r].size() != fields.size()) throw ConfigError("compute_rates: error row has wrong width");
    if (!(resolutions[r] > 0.0)) throw ConfigError("compute_rates: resolutions must be positive");
    if (r > 0 && std::abs(resolutions[r] - 0.5 * resolutions[r - 1]) > 1e-12 * resolutions[r - 1]) {
      throw ConfigError("compute_rates: each resolution must halve the previous one");
    }
    RateRow row;
    row.resolution = resolutions[r];
    row.errors = errors[r];
    row.rates.resize(fields.size());
    if (r > 0) {
      for (size_t f = 0; f < fields.size(); ++f) row.rates[f] = std::log2(errors[r - 1][f] / errors[r][f]);
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

void write_rate_csv(const RateTable& table, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  out << "resolution";
  for (const auto& f : table.fields) out << ",err_" << f << ",rate_" << f;
  out << "\n" << std::setprecision(10);
  for (const RateRow& row : table.rows) {
    const double inv = 1.0 / row.resolution;
    if (std::abs(inv - std::round(inv)) < 1e-9 * inv) {
      out << static_cast<long long>(std::llround(inv));
    } else {
      out << row.resolution;
    }
    for (size_t f = 0; f < table.fields.size(); ++f) {
      out << "," << row.errors[f] << ",";
      if (row.rates[f]) out << *row.rates[f];
    }
    out << "\n";
  }
  if (!out) throw IoError("failed writing " + path);
}

void export_fields(const Problem& problem, const State& state, const std::string& path) {
  const Mesh& mesh = problem.mesh();
  pack_state(problem, state);  // size check
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  const int nv = mesh.num_vertices();
  out << "# vtk DataFile Version 3.0\n"
      << "tdaf fields t=" << state.t << "\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  out << std::setprecision(12);
  out << "POINTS " << nv << " double\n";
  for (const Vec2& v : mesh.vertices) out << v.x() << " " << v.y() << " 0\n";
  out << "CELLS " << mesh.num_triangles() << " " << 4 * mesh.num_triangles() << "\n";
  for (const auto& t : mesh.triangles) out << "3 " << t[0] << " " << t[1] << " " << t[2] << "\n";
  out << "CELL_TYPES " << mesh.num_triangles() << "\n";
  for (int t = 0; t < mesh.num_triangles(); ++t) out << "5\n";
  out << "POINT_DATA " << nv << "\n";
  // Vertices are the first nodes of every space.
  out << "VECTORS velocity double\n";
  for (int i = 0; i < nv; ++i) out << state.u[2 * i] << " " << state.u[2 * i + 1] << " 0\n";
  out << "SCALARS temperature double 1\nLOOKUP_TABLE default\n";
  for (int i = 0; i < nv; ++i) out << state.T[i] << "\n";
  out << "SCALARS pressure double 1\nLOOKUP_TABLE default\n";
  for (int i = 0; i < nv; ++i) out << state.p[i] << "\n";
  out << "VECTORS w double\n";
  for (int i = 0; i < nv; ++i) out << state.w[2 * i] << " " << state.w[2 * i + 1] << " 0\n";
  if (!out) throw IoError("failed writing " + path);
}

}  // namespace tdaf
