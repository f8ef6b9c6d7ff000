#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mconv/spaces.hpp"

namespace mconv {

/// One row of the per-step time series. Quantities that are not available for
/// a run (l2_error without an analytic solution) are NaN.
struct DiagnosticsRecord {
  int step = 0;
  double time = 0.0;
  double kinetic_energy = 0.0;   // 1/2 int |u|^2
  double momentum_x = 0.0;
  double momentum_y = 0.0;
  double momentum_sum = 0.0;     // momentum_x + momentum_y
  double angular_momentum = 0.0; // int (u_1 y - u_2 x)
  double enstrophy = 0.0;        // 1/2 int w^2
  double total_vorticity = 0.0;  // int w
  double l2_error = 0.0;
  double div_l2 = 0.0;           // || div u ||
  double div_rec_max = 0.0;      // max |div a| of the advecting field
  double solver_residual = 0.0;
};

/// Column names in file order.
const std::vector<std::string>& csv_columns();

/// Energy, momenta and vorticity integrals. Without `w`, the vorticity
/// quantities are taken from curl u.
DiagnosticsRecord conserved_quantities(const Field& u, const Field* w = nullptr,
                                       const QuadratureRule& rule = triangle_rule());

double l2_error(const Field& u, const VectorFunction& exact, const QuadratureRule& rule = triangle_rule());

struct BlowupMarker {
  int step = 0;
  double time = 0.0;
};

/// Header plus one line per record, 17 significant digits. A blow-up marker
/// is appended as a trailing '#' comment line.
void write_csv(const std::vector<DiagnosticsRecord>& records, const std::string& path,
               const std::optional<BlowupMarker>& blowup = std::nullopt);

/// Parses a file written by write_csv; '#' lines are skipped.
std::vector<DiagnosticsRecord> read_csv(const std::string& path);

/// Legacy ASCII VTK 3.0 unstructured grid: vertex velocity, speed, cell pressure.
void export_vtk(const Field& u, const Field& p, const std::string& path);

}  // namespace mconv
