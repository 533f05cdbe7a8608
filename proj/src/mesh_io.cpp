#include "ifeig/mesh_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "ifeig/error.hpp"

namespace ifeig {

namespace {

std::string fmt17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

class LineReader {
 public:
  explicit LineReader(std::istream& in) : in_(in) {}

  std::istringstream next(const char* what) {
    std::string line;
    if (!std::getline(in_, line)) throw ParseError(std::string("unexpected end of file, expected ") + what, line_no_ + 1);
    ++line_no_;
    return std::istringstream(line);
  }
  std::size_t line() const { return line_no_; }

 private:
  std::istream& in_;
  std::size_t line_no_ = 0;
};

void expect_end(std::istringstream& ss, std::size_t line) {
  std::string extra;
  if (ss >> extra) throw ParseError("trailing content '" + extra + "'", line);
}

std::size_t read_count(LineReader& r, const std::string& keyword) {
  auto ss = r.next(keyword.c_str());
  std::string word;
  long long n = -1;
  if (!(ss >> word) || word != keyword || !(ss >> n) || n < 0)
    throw ParseError("expected '" + keyword + " <count>'", r.line());
  expect_end(ss, r.line());
  return static_cast<std::size_t>(n);
}

}  // namespace

void write_mesh(const Mesh& mesh, std::ostream& out) {
  out << "meshfmt 1\n";
  out << "nodes " << mesh.nodes.size() << "\n";
  for (std::size_t n = 0; n < mesh.nodes.size(); ++n) {
    out << fmt17(mesh.nodes[n].x) << ' ' << fmt17(mesh.nodes[n].y) << ' ' << int(mesh.boundary[n]) << "\n";
  }
  out << "triangles " << mesh.triangles.size() << "\n";
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    const auto& tri = mesh.triangles[t];
    out << tri[0] << ' ' << tri[1] << ' ' << tri[2] << ' ' << mesh.region[t] << "\n";
  }
}

void write_mesh(const Mesh& mesh, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  write_mesh(mesh, out);
  if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

Mesh read_mesh(std::istream& in) {
  LineReader r(in);
  {
    auto ss = r.next("header");
    std::string magic;
    int version = 0;
    if (!(ss >> magic >> version) || magic != "meshfmt" || version != 1)
      throw ParseError("expected header 'meshfmt 1'", r.line());
    expect_end(ss, r.line());
  }

  Mesh mesh;
  const std::size_t n_nodes = read_count(r, "nodes");
  mesh.nodes.reserve(n_nodes);
  for (std::size_t n = 0; n < n_nodes; ++n) {
    auto ss = r.next("node");
    Point p;
    int flag = -1;
    if (!(ss >> p.x >> p.y >> flag) || (flag != 0 && flag != 1))
      throw ParseError("expected 'x y boundary_flag'", r.line());
    expect_end(ss, r.line());
    mesh.nodes.push_back(p);
    mesh.boundary.push_back(static_cast<std::uint8_t>(flag));
  }

  const std::size_t n_tris = read_count(r, "triangles");
  mesh.triangles.reserve(n_tris);
  for (std::size_t t = 0; t < n_tris; ++t) {
    auto ss = r.next("triangle");
    long long i = -1, j = -1, k = -1;
    int tag = 0;
    if (!(ss >> i >> j >> k >> tag)) throw ParseError("expected 'i j k region_tag'", r.line());
    expect_end(ss, r.line());
    for (long long v : {i, j, k}) {
      if (v < 0 || static_cast<std::size_t>(v) >= n_nodes)
        throw ParseError("node index " + std::to_string(v) + " out of range", r.line());
    }
    mesh.triangles.push_back({static_cast<int>(i), static_cast<int>(j), static_cast<int>(k)});
    mesh.region.push_back(tag);
  }
  mesh.interface_circle.assign(mesh.nodes.size(), kNoInterface);
  mesh.update_h_max();
  return mesh;
}

Mesh read_mesh(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path + "'", 0);
  return read_mesh(in);
}

}  // namespace ifeig
