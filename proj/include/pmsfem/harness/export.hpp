#pragma once

#include "pmsfem/fem/assembly.hpp"
#include "pmsfem/harness/experiment.hpp"

#include <string>

namespace pmsfem::harness {

/// 6 significant digits, independent of the locale.
std::string format_number(double value);

/// `N_c,dim,L2,H1` header and one row per sweep entry, LF line endings.
std::string format_csv(const ErrorReport& report);
/// Throws IoError.
void export_csv(const ErrorReport& report, const std::string& path);
/// Inverse of format_csv for the numeric rows. Throws InvalidConfig.
std::vector<ErrorRow> parse_csv(std::string_view text);

/// Legacy ASCII VTK of the mesh vertices with the solution at the vertices
/// (`u`, scalar or vector) and the pressure (`pressure`, point data for P1
/// pressure, cell data for piecewise constant pressure).
std::string format_vtk(const fem::Solution& solution, const fem::FineSystem& system, const mesher::FineMesh& mesh);
void export_vtk(const fem::Solution& solution, const fem::FineSystem& system, const mesher::FineMesh& mesh, const std::string& path);

/// Plain-text solution file used by the CLI between runs.
std::string format_solution(const fem::Solution& solution);
fem::Solution parse_solution(std::string_view text);
void save_solution(const fem::Solution& solution, const std::string& path);
fem::Solution load_solution(const std::string& path);

} // namespace pmsfem::harness
