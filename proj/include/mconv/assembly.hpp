#pragma once

#include <string>
#include <vector>

#include "mconv/linalg.hpp"
#include "mconv/spaces.hpp"

namespace mconv {

enum class ConvectiveForm { CONV, SKEW, EMAC_LIN, MOD_CONV };

std::string to_string(ConvectiveForm form);
/// Accepts the CLI spellings conv, skew, emac, modconv.
ConvectiveForm parse_form(const std::string& name);

// Every velocity-velocity matrix below stores the full local block of every
// cell (zeros included), so all of them share one sparsity pattern and can be
// combined with SparseMatrix::combine.

SparseMatrix assemble_mass(const Space& space, const QuadratureRule& rule = triangle_rule());
/// Rectangular (test, trial) mass matrix on a shared mesh.
SparseMatrix assemble_mass(const Space& test, const Space& trial, const QuadratureRule& rule = triangle_rule());

SparseMatrix assemble_stiffness(const Space& space, const QuadratureRule& rule = triangle_rule());
SparseMatrix assemble_stiffness(const Space& test, const Space& trial, const QuadratureRule& rule = triangle_rule());

/// b(v, q) = (div v, q); rows are pressure dofs. Only inf-sup pairs are accepted.
SparseMatrix assemble_div(const Space& velocity, const Space& pressure, const QuadratureRule& rule = triangle_rule());

/// N[i][j] = c(a, phi_j, phi_i) for the chosen convective form.
/// MOD_CONV expects `a` in an H(div) space; the other forms expect the velocity space.
SparseMatrix assemble_convection(ConvectiveForm form, const Field& a, const Space& trial, const Space& test,
                                 const QuadratureRule& rule = triangle_rule());

/// Scalar transport ((a . grad) w, v) for an H(div) advecting field.
SparseMatrix assemble_vorticity_operator(const Field& a, const Space& w_space,
                                         const QuadratureRule& rule = triangle_rule());

/// (f, phi_i). Scalar spaces read component 0 of f.
std::vector<double> assemble_load(const Space& space, const CellFunction& f, const QuadratureRule& rule = triangle_rule());

/// (curl u, psi_i) with curl u = d_x u_2 - d_y u_1.
std::vector<double> assemble_curl_load(const Field& u, const Space& scalar_space,
                                       const QuadratureRule& rule = triangle_rule());

/// Integrals of the basis functions of a scalar space (the mean-value row).
std::vector<double> basis_integrals(const Space& space, const QuadratureRule& rule = triangle_rule());

/// True for the three inf-sup pairs used here.
bool compatible_pair(ElementKind velocity, ElementKind pressure);

}  // namespace mconv
