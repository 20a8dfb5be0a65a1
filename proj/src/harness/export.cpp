#include "pmsfem/harness/export.hpp"

#include "pmsfem/error.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace pmsfem::harness {

namespace {

std::string full_precision(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write '" + path + "'");
  out << content;
  if (!out) throw Error(ErrorCode::IoError, "write to '" + path + "' failed");
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

template <class T>
T parse_field(std::string_view s, const char* what) {
  T v{};
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty())
    throw Error(ErrorCode::InvalidConfig, std::string("malformed ") + what + " '" + std::string(s) + "'");
  return v;
}

std::vector<std::string_view> lines_of(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start < text.size()) {
    const auto end = text.find('\n', start);
    lines.push_back(text.substr(start, end == std::string_view::npos ? std::string_view::npos : end - start));
    if (end == std::string_view::npos) break;
    start = end + 1;
  }
  return lines;
}

std::vector<std::string_view> fields_of(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto end = line.find(sep, start);
    out.push_back(line.substr(start, end == std::string_view::npos ? std::string_view::npos : end - start));
    if (end == std::string_view::npos) break;
    start = end + 1;
  }
  return out;
}

} // namespace

std::string format_number(double value) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::general, 6);
  return std::string(buf, res.ptr);
}

std::string format_csv(const ErrorReport& report) {
  std::string out = "N_c,dim,L2,H1\n";
  for (const auto& r : report.rows)
    out += std::to_string(r.nc) + "," + std::to_string(r.dim) + "," + format_number(r.l2) + "," + format_number(r.h1) + "\n";
  return out;
}

void export_csv(const ErrorReport& report, const std::string& path) { write_file(path, format_csv(report)); }

std::vector<ErrorRow> parse_csv(std::string_view text) {
  const auto lines = lines_of(text);
  if (lines.empty() || lines.front() != "N_c,dim,L2,H1") throw Error(ErrorCode::InvalidConfig, "missing CSV header");
  std::vector<ErrorRow> rows;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    const auto f = fields_of(lines[i], ',');
    if (f.size() != 4) throw Error(ErrorCode::InvalidConfig, "CSV row " + std::to_string(i) + " has " + std::to_string(f.size()) + " fields");
    rows.push_back({parse_field<int>(f[0], "N_c"), parse_field<std::size_t>(f[1], "dim"), parse_field<double>(f[2], "L2"),
                    parse_field<double>(f[3], "H1")});
  }
  return rows;
}

std::string format_vtk(const fem::Solution& sol, const fem::FineSystem& system, const mesher::FineMesh& mesh) {
  const int comps = system.space.components;
  const std::size_t nv = mesh.num_nodes(), nt = mesh.num_triangles();
  std::string out;
  out += "# vtk DataFile Version 3.0\n";
  out += "pmsfem " + std::string(fem::to_string(sol.kind)) + " solution\n";
  out += "ASCII\nDATASET UNSTRUCTURED_GRID\n";
  out += "POINTS " + std::to_string(nv) + " double\n";
  for (const auto& p : mesh.nodes) out += full_precision(p.x) + " " + full_precision(p.y) + " 0\n";
  out += "CELLS " + std::to_string(nt) + " " + std::to_string(4 * nt) + "\n";
  for (const auto& t : mesh.triangles)
    out += "3 " + std::to_string(t[0]) + " " + std::to_string(t[1]) + " " + std::to_string(t[2]) + "\n";
  out += "CELL_TYPES " + std::to_string(nt) + "\n";
  for (std::size_t t = 0; t < nt; ++t) out += "5\n";

  out += "POINT_DATA " + std::to_string(nv) + "\n";
  if (comps == 1) {
    out += "SCALARS u double 1\nLOOKUP_TABLE default\n";
    for (std::size_t v = 0; v < nv; ++v) out += full_precision(sol.u[v]) + "\n";
  } else {
    out += "VECTORS u double\n";
    for (std::size_t v = 0; v < nv; ++v)
      out += full_precision(sol.u[2 * v]) + " " + full_precision(sol.u[2 * v + 1]) + " 0\n";
  }
  if (!sol.pressure.empty() && !sol.pressure_per_cell) {
    out += "SCALARS pressure double 1\nLOOKUP_TABLE default\n";
    for (const double p : sol.pressure) out += full_precision(p) + "\n";
  }
  if (!sol.pressure.empty() && sol.pressure_per_cell) {
    out += "CELL_DATA " + std::to_string(nt) + "\n";
    out += "SCALARS pressure double 1\nLOOKUP_TABLE default\n";
    for (const double p : sol.pressure) out += full_precision(p) + "\n";
  }
  return out;
}

void export_vtk(const fem::Solution& solution, const fem::FineSystem& system, const mesher::FineMesh& mesh, const std::string& path) {
  write_file(path, format_vtk(solution, system, mesh));
}

std::string format_solution(const fem::Solution& sol) {
  std::string out = "solution " + std::string(fem::to_string(sol.kind)) + "\n";
  out += "u " + std::to_string(sol.u.size()) + "\n";
  for (const double v : sol.u) out += full_precision(v) + "\n";
  out += "pressure " + std::to_string(sol.pressure.size()) + (sol.pressure_per_cell ? " cell" : " node") + "\n";
  for (const double v : sol.pressure) out += full_precision(v) + "\n";
  return out;
}

fem::Solution parse_solution(std::string_view text) {
  const auto lines = lines_of(text);
  std::size_t at = 0;
  const auto next = [&]() -> std::string_view {
    if (at >= lines.size()) throw Error(ErrorCode::InvalidConfig, "solution file ends early");
    return lines[at++];
  };
  fem::Solution sol;
  const auto header = fields_of(next(), ' ');
  if (header.size() != 2 || header[0] != "solution") throw Error(ErrorCode::InvalidConfig, "not a solution file");
  const auto kind = fem::parse_operator(header[1]);
  if (!kind) throw Error(ErrorCode::InvalidConfig, "unknown operator in solution file");
  sol.kind = *kind;
  const auto uh = fields_of(next(), ' ');
  if (uh.size() != 2 || uh[0] != "u") throw Error(ErrorCode::InvalidConfig, "missing 'u' section");
  sol.u.resize(parse_field<std::size_t>(uh[1], "count"));
  for (double& v : sol.u) v = parse_field<double>(next(), "value");
  const auto ph = fields_of(next(), ' ');
  if (ph.size() != 3 || ph[0] != "pressure") throw Error(ErrorCode::InvalidConfig, "missing 'pressure' section");
  sol.pressure.resize(parse_field<std::size_t>(ph[1], "count"));
  sol.pressure_per_cell = ph[2] == "cell";
  for (double& v : sol.pressure) v = parse_field<double>(next(), "value");
  return sol;
}

void save_solution(const fem::Solution& solution, const std::string& path) { write_file(path, format_solution(solution)); }

fem::Solution load_solution(const std::string& path) { return parse_solution(read_file(path)); }

} // namespace pmsfem::harness
