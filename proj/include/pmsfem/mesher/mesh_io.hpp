#pragma once

#include "pmsfem/mesher/fine_mesh.hpp"

#include <iosfwd>
#include <string>

namespace pmsfem::mesher {

/// Text format:
///   NODES n      then n lines `index x y marker`
///   TRIANGLES m  then m lines `index a b c coarse_parent`
///   EDGES k      then k lines `a b marker`
/// Coordinates use 17 significant digits, so a round trip is exact.
void write_mesh(std::ostream& out, const FineMesh& mesh);
FineMesh read_mesh(std::istream& in);

/// Throws IoError when the file cannot be opened or written.
void save_mesh(const FineMesh& mesh, const std::string& path);
/// Throws IoError or MalformedMeshFile (with the offending line number).
FineMesh load_mesh(const std::string& path);

} // namespace pmsfem::mesher
