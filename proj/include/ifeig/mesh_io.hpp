#pragma once

#include <iosfwd>
#include <string>

#include "ifeig/mesh.hpp"

namespace ifeig {

// Text format:
//   meshfmt 1
//   nodes N
//   x y boundary_flag        (N lines, %.17g)
//   triangles M
//   i j k region_tag         (M lines, 0-based)
void write_mesh(const Mesh& mesh, std::ostream& out);
void write_mesh(const Mesh& mesh, const std::string& path);

// Throws ParseError carrying the offending line number.
Mesh read_mesh(std::istream& in);
Mesh read_mesh(const std::string& path);

}  // namespace ifeig
