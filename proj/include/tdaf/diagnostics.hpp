#pragma once

#include <optional>
#include <string>
#include <vector>

#include "tdaf/stepper.hpp"

namespace tdaf {

/// E = 1/2 (|u|^2 + |T|^2) with the L2 inner products given by the mass matrices.
double energy(const State& state, const SparseMatrix& vel_mass, const SparseMatrix& temp_mass);
double energy(const Problem& problem, const State& state);

struct DivergenceResidual {
  double u = 0.0;  ///< max |B u|
  double w = 0.0;  ///< max |B w|
};

DivergenceResidual divergence_residual(const State& state, const SparseMatrix& divergence);

struct RateRow {
  double resolution = 0.0;  ///< h or time step
  std::vector<double> errors;
  /// log2(e_prev / e_this); absent on the first row.
  std::vector<std::optional<double>> rates;
};

struct RateTable {
  std::vector<std::string> fields;
  std::vector<RateRow> rows;

  /// Rate of `field` between row `row - 1` and `row`.
  double rate(const std::string& field, int row) const;
  double error(const std::string& field, int row) const;
};

/// Throws ConfigError unless there are at least two rows and each resolution
/// halves the previous one.
RateTable compute_rates(const std::vector<std::string>& fields, const std::vector<double>& resolutions,
                        const std::vector<std::vector<double>>& errors);

/// Columns: resolution, then err_<field>, rate_<field> per field. The
/// resolution column holds 1/h (or 1/dt) rounded to an integer when exact.
void write_rate_csv(const RateTable& table, const std::string& path);

/// Legacy ASCII VTK unstructured grid with vertex values of velocity,
/// temperature, pressure and w.
void export_fields(const Problem& problem, const State& state, const std::string& path);

}  // namespace tdaf
