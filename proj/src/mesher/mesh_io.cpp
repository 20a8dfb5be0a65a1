#include "pmsfem/mesher/mesh_io.hpp"

#include "pmsfem/error.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string_view>
#include <vector>

namespace pmsfem::mesher {
namespace {

std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

class LineReader {
public:
  explicit LineReader(std::istream& in) : in_(in) {}

  /// Next non-empty line split on whitespace.
  std::vector<std::string_view> next() {
    while (std::getline(in_, line_)) {
      ++number_;
      if (!line_.empty() && line_.back() == '\r') line_.pop_back();
      std::vector<std::string_view> tokens;
      std::string_view rest(line_);
      while (true) {
        const auto b = rest.find_first_not_of(" \t");
        if (b == std::string_view::npos) break;
        rest.remove_prefix(b);
        const auto e = rest.find_first_of(" \t");
        tokens.push_back(rest.substr(0, e));
        if (e == std::string_view::npos) break;
        rest.remove_prefix(e);
      }
      if (!tokens.empty()) return tokens;
    }
    fail("unexpected end of file");
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw Error(ErrorCode::MalformedMeshFile, "line " + std::to_string(number_) + ": " + what);
  }

  template <class T>
  T parse(std::string_view tok) const {
    T value{};
    const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), value);
    if (res.ec != std::errc() || res.ptr != tok.data() + tok.size()) fail("cannot parse '" + std::string(tok) + "'");
    return value;
  }

  std::size_t header(std::string_view name) {
    const auto tok = next();
    if (tok.size() != 2 || tok[0] != name) fail("expected '" + std::string(name) + " <count>'");
    const long long n = parse<long long>(tok[1]);
    if (n < 0) fail("negative count");
    return static_cast<std::size_t>(n);
  }

private:
  std::istream& in_;
  std::string line_;
  std::size_t number_ = 0;
};

} // namespace

void write_mesh(std::ostream& out, const FineMesh& mesh) {
  out << "NODES " << mesh.nodes.size() << '\n';
  for (std::size_t i = 0; i < mesh.nodes.size(); ++i)
    out << i << ' ' << format_double(mesh.nodes[i].x) << ' ' << format_double(mesh.nodes[i].y) << ' '
        << static_cast<int>(mesh.node_markers[i]) << '\n';
  out << "TRIANGLES " << mesh.triangles.size() << '\n';
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    const auto& tri = mesh.triangles[t];
    out << t << ' ' << tri[0] << ' ' << tri[1] << ' ' << tri[2] << ' ' << mesh.coarse_parent[t] << '\n';
  }
  out << "EDGES " << mesh.boundary_edges.size() << '\n';
  for (const auto& e : mesh.boundary_edges) out << e.a << ' ' << e.b << ' ' << static_cast<int>(e.marker) << '\n';
}

FineMesh read_mesh(std::istream& in) {
  LineReader r(in);
  FineMesh mesh;
  const std::size_t n = r.header("NODES");
  for (std::size_t i = 0; i < n; ++i) {
    const auto tok = r.next();
    if (tok.size() != 4) r.fail("node line needs 'index x y marker'");
    if (r.parse<std::size_t>(tok[0]) != i) r.fail("node index out of sequence");
    mesh.nodes.push_back({r.parse<double>(tok[1]), r.parse<double>(tok[2])});
    const int marker = r.parse<int>(tok[3]);
    if (marker < 0 || marker > 2) r.fail("unknown node marker " + std::to_string(marker));
    mesh.node_markers.push_back(static_cast<NodeMarker>(marker));
  }
  const std::size_t m = r.header("TRIANGLES");
  for (std::size_t t = 0; t < m; ++t) {
    const auto tok = r.next();
    if (tok.size() != 5) r.fail("triangle line needs 'index a b c coarse_parent'");
    if (r.parse<std::size_t>(tok[0]) != t) r.fail("triangle index out of sequence");
    std::array<int, 3> tri{};
    for (std::size_t k = 0; k < 3; ++k) {
      tri[k] = r.parse<int>(tok[k + 1]);
      if (tri[k] < 0 || static_cast<std::size_t>(tri[k]) >= n) r.fail("triangle references missing node " + std::to_string(tri[k]));
    }
    mesh.triangles.push_back(tri);
    if (!(mesh.triangle_area(t) > 0.0)) r.fail("triangle " + std::to_string(t) + " has nonpositive area");
    mesh.coarse_parent.push_back(r.parse<int>(tok[4]));
  }
  const std::size_t k = r.header("EDGES");
  for (std::size_t e = 0; e < k; ++e) {
    const auto tok = r.next();
    if (tok.size() != 3) r.fail("edge line needs 'a b marker'");
    const int a = r.parse<int>(tok[0]), b = r.parse<int>(tok[1]), marker = r.parse<int>(tok[2]);
    if (a < 0 || b < 0 || static_cast<std::size_t>(a) >= n || static_cast<std::size_t>(b) >= n) r.fail("edge references missing node");
    if (marker != 1 && marker != 2) r.fail("unknown edge marker " + std::to_string(marker));
    mesh.boundary_edges.push_back({a, b, static_cast<EdgeMarker>(marker)});
  }
  return mesh;
}

void save_mesh(const FineMesh& mesh, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot open " + path + " for writing");
  write_mesh(out, mesh);
  if (!out) throw Error(ErrorCode::IoError, "failed writing " + path);
}

FineMesh load_mesh(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path);
  return read_mesh(in);
}

} // namespace pmsfem::mesher
