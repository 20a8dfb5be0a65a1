#include "pmsfem/harness/config.hpp"

#include "pmsfem/error.hpp"
#include "pmsfem/harness/presets.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace pmsfem::harness {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

template <class T>
T parse_number(std::string_view key, std::string_view text) {
  text = trim(text);
  T value{};
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty())
    throw Error(ErrorCode::InvalidConfig, "'" + std::string(key) + "' expects a number, got '" + std::string(text) + "'");
  return value;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (start <= s.size()) {
    const auto end = s.find(sep, start);
    const auto piece = trim(s.substr(start, end == std::string_view::npos ? std::string_view::npos : end - start));
    if (!piece.empty()) parts.push_back(piece);
    if (end == std::string_view::npos) break;
    start = end + 1;
  }
  return parts;
}

} // namespace

void set_config_value(ExperimentConfig& c, std::string_view key, std::string_view value) {
  value = trim(value);
  if (key == "preset") {
    if (!find_preset(value)) throw Error(ErrorCode::InvalidConfig, "unknown preset '" + std::string(value) + "'");
    c.preset = std::string(value);
  } else if (key == "inclusion") {
    const auto parts = split(value, ' ');
    if (parts.size() != 3) throw Error(ErrorCode::InvalidConfig, "'inclusion' expects <x> <y> <r>");
    c.inclusions.push_back({{parse_number<double>(key, parts[0]), parse_number<double>(key, parts[1])}, parse_number<double>(key, parts[2])});
  } else if (key == "polygon_segments") {
    c.polygon_segments = parse_number<int>(key, value);
  } else if (key == "domain_seed") {
    c.domain_seed = parse_number<std::uint64_t>(key, value);
  } else if (key == "coarse_h") {
    c.coarse_h = parse_number<double>(key, value);
  } else if (key == "h_target") {
    c.h_target = parse_number<double>(key, value);
  } else if (key == "min_angle") {
    c.min_angle = parse_number<double>(key, value);
  } else if (key == "operator") {
    const auto kind = fem::parse_operator(value);
    if (!kind) throw Error(ErrorCode::InvalidConfig, "unknown operator '" + std::string(value) + "'");
    c.op.kind = *kind;
  } else if (key == "young") {
    c.op.young = parse_number<double>(key, value);
  } else if (key == "poisson") {
    c.op.poisson = parse_number<double>(key, value);
  } else if (key == "viscosity") {
    c.op.viscosity = parse_number<double>(key, value);
  } else if (key == "snapshots") {
    const auto kind = gmsfem::parse_snapshots(value);
    if (!kind) throw Error(ErrorCode::InvalidConfig, "unknown snapshot mode '" + std::string(value) + "'");
    c.snapshots = *kind;
  } else if (key == "nc") {
    c.nc_sweep.clear();
    for (const auto part : split(value, ',')) c.nc_sweep.push_back(parse_number<int>(key, part));
  } else if (key == "oversample") {
    c.oversample = parse_number<int>(key, value);
  } else if (key == "buffer") {
    c.buffer = parse_number<int>(key, value);
  } else if (key == "seed") {
    c.seed = parse_number<std::uint64_t>(key, value);
  } else if (key == "out_dir") {
    c.out_dir = std::string(value);
  } else {
    throw Error(ErrorCode::InvalidConfig, "unknown key '" + std::string(key) + "'");
  }
}

ExperimentConfig parse_config(std::string_view text) {
  ExperimentConfig c;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start < text.size()) {
    const auto end = text.find('\n', start);
    std::string_view line = text.substr(start, end == std::string_view::npos ? std::string_view::npos : end - start);
    start = end == std::string_view::npos ? text.size() : end + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    try {
      if (eq == std::string_view::npos) throw Error(ErrorCode::InvalidConfig, "expected 'key = value'");
      set_config_value(c, trim(line.substr(0, eq)), line.substr(eq + 1));
    } catch (const Error& e) {
      throw Error(ErrorCode::InvalidConfig, "line " + std::to_string(line_no) + ": " + e.detail());
    }
  }
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open config '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

void validate(const ExperimentConfig& c) {
  c.op.validate();
  if (c.inclusions.empty() && !find_preset(c.preset)) throw Error(ErrorCode::InvalidConfig, "unknown preset '" + c.preset + "'");
  if (c.polygon_segments != 0 && c.polygon_segments < 8) throw Error(ErrorCode::InvalidConfig, "polygon_segments must be >= 8");
  if (!(c.coarse_h > 0.0)) throw Error(ErrorCode::InvalidConfig, "coarse_h must be positive");
  if (!(c.h_target > 0.0 && c.h_target < c.coarse_h)) throw Error(ErrorCode::InvalidConfig, "h_target must lie in (0, coarse_h)");
  if (!(c.min_angle > 0.0 && c.min_angle <= 30.0)) throw Error(ErrorCode::InvalidConfig, "min_angle must lie in (0, 30]");
  for (std::size_t i = 0; i < c.nc_sweep.size(); ++i) {
    if (c.nc_sweep[i] < 1) throw Error(ErrorCode::InvalidConfig, "nc values must be positive");
    if (i > 0 && c.nc_sweep[i] <= c.nc_sweep[i - 1]) throw Error(ErrorCode::InvalidConfig, "nc values must be strictly ascending");
  }
  if (c.oversample < 0) throw Error(ErrorCode::InvalidConfig, "oversample must be >= 0");
  if (c.buffer < 0) throw Error(ErrorCode::InvalidConfig, "buffer must be >= 0");
  if (c.op.perforation_bc == fem::PerforationBc::Neumann && c.op.kind == fem::OperatorKind::Stokes)
    throw Error(ErrorCode::InvalidConfig, "Stokes requires no-slip perforations");
}

} // namespace pmsfem::harness
