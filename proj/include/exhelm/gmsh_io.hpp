#pragma once

// Gmsh MSH 2.2 ASCII subset: $MeshFormat / $Nodes / $Elements with
// 2-node lines (type 1) as tagged boundary facets and 3-node triangles
// (type 2) as cells.  Physical tag 1 maps to Gamma, 2 to Sigma.  Parse
// errors carry the offending line number; structural problems surface
// through Mesh::validate.

#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "exhelm/mesh.hpp"

namespace exhelm {

class GmshError : public std::runtime_error {
 public:
  GmshError(int line, const std::string& what)
      : std::runtime_error("gmsh line " + std::to_string(line) + ": " + what) {}
};

namespace detail {
struct LineReader {
  std::istream& in;
  int lineno = 0;
  bool next(std::string& out) {
    while (std::getline(in, out)) {
      ++lineno;
      if (!out.empty() && out.back() == '\r') out.pop_back();
      if (!out.empty()) return true;
    }
    return false;
  }
};
}  // namespace detail

inline Mesh read_gmsh_subset(std::istream& in) {
  detail::LineReader rd{in};
  std::string line;

  auto expect = [&](const std::string& want) {
    if (!rd.next(line)) throw GmshError(rd.lineno + 1, "unexpected end of file, wanted " + want);
    if (line != want) throw GmshError(rd.lineno, "expected '" + want + "', got '" + line + "'");
  };

  expect("$MeshFormat");
  if (!rd.next(line)) throw GmshError(rd.lineno + 1, "missing format line");
  {
    std::istringstream ss(line);
    std::string version;
    int filetype = -1, datasize = -1;
    ss >> version >> filetype >> datasize;
    if (!ss || version.substr(0, 3) != "2.2" || filetype != 0)
      throw GmshError(rd.lineno, "unsupported format '" + line + "' (need MSH 2.2 ASCII)");
  }
  expect("$EndMeshFormat");

  expect("$Nodes");
  if (!rd.next(line)) throw GmshError(rd.lineno + 1, "missing node count");
  std::size_t n_nodes = 0;
  {
    std::istringstream ss(line);
    ss >> n_nodes;
    if (!ss) throw GmshError(rd.lineno, "malformed node count '" + line + "'");
  }
  Mesh mesh;
  std::map<long, int> node_index;
  for (std::size_t i = 0; i < n_nodes; ++i) {
    if (!rd.next(line)) throw GmshError(rd.lineno + 1, "unexpected end of $Nodes");
    std::istringstream ss(line);
    long id;
    double x, y, z;
    ss >> id >> x >> y >> z;
    if (!ss) throw GmshError(rd.lineno, "malformed node '" + line + "'");
    if (z != 0.0) throw GmshError(rd.lineno, "node has nonzero z-coordinate");
    if (!node_index.emplace(id, static_cast<int>(mesh.vertices.size())).second)
      throw GmshError(rd.lineno, "duplicate node id " + std::to_string(id));
    mesh.vertices.push_back({x, y});
  }
  expect("$EndNodes");

  expect("$Elements");
  if (!rd.next(line)) throw GmshError(rd.lineno + 1, "missing element count");
  std::size_t n_elems = 0;
  {
    std::istringstream ss(line);
    ss >> n_elems;
    if (!ss) throw GmshError(rd.lineno, "malformed element count '" + line + "'");
  }
  struct PendingFacet {
    std::array<int, 2> v;
    BoundaryTag tag;
    int lineno;
  };
  std::vector<PendingFacet> facets;
  auto lookup = [&](long id) {
    auto it = node_index.find(id);
    if (it == node_index.end())
      throw GmshError(rd.lineno, "element references unknown node " + std::to_string(id));
    return it->second;
  };
  for (std::size_t i = 0; i < n_elems; ++i) {
    if (!rd.next(line)) throw GmshError(rd.lineno + 1, "unexpected end of $Elements");
    std::istringstream ss(line);
    long id;
    int type = 0, ntags = 0;
    ss >> id >> type >> ntags;
    if (!ss) throw GmshError(rd.lineno, "malformed element '" + line + "'");
    std::vector<int> tags(ntags);
    for (int& t : tags) ss >> t;
    if (!ss) throw GmshError(rd.lineno, "malformed element tags '" + line + "'");
    if (type == 1) {
      long a, b;
      ss >> a >> b;
      if (!ss) throw GmshError(rd.lineno, "malformed line element '" + line + "'");
      const int phys = ntags > 0 ? tags[0] : 0;
      BoundaryTag tag;
      if (phys == 1)
        tag = BoundaryTag::gamma;
      else if (phys == 2)
        tag = BoundaryTag::sigma;
      else
        throw GmshError(rd.lineno, "unknown physical tag " + std::to_string(phys) +
                                       " on boundary line (1=Gamma, 2=Sigma)");
      facets.push_back({{lookup(a), lookup(b)}, tag, rd.lineno});
    } else if (type == 2) {
      long a, b, c;
      ss >> a >> b >> c;
      if (!ss) throw GmshError(rd.lineno, "malformed triangle '" + line + "'");
      std::array<int, 3> tri = {lookup(a), lookup(b), lookup(c)};
      mesh.triangles.push_back(tri);
    } else {
      throw GmshError(rd.lineno, "unsupported element type " + std::to_string(type) +
                                     " (only 1=line and 2=triangle)");
    }
  }
  expect("$EndElements");

  // normalize orientation, then resolve facet ownership
  for (auto& tr : mesh.triangles) {
    const Vec2 a = mesh.vertices[tr[0]], b = mesh.vertices[tr[1]], c = mesh.vertices[tr[2]];
    if (cross(b - a, c - a) < 0) std::swap(tr[1], tr[2]);
  }
  std::map<std::pair<int, int>, std::pair<int, int>> edges;  // -> (count, owner)
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    const auto& tr = mesh.triangles[t];
    for (int e = 0; e < 3; ++e) {
      auto key = std::minmax(tr[e], tr[(e + 1) % 3]);
      auto& rec = edges[key];
      rec.first += 1;
      rec.second = static_cast<int>(t);
    }
  }
  for (const auto& f : facets) {
    auto it = edges.find(std::minmax(f.v[0], f.v[1]));
    if (it == edges.end() || it->second.first != 1)
      throw GmshError(f.lineno, "boundary line is not a boundary edge of the triangulation");
    mesh.boundary.push_back({f.v, f.tag, it->second.second});
  }

  mesh.validate();
  return mesh;
}

/// Writes the same subset read_gmsh_subset accepts; coordinates carry 17
/// significant digits so a round-trip is bit-faithful.
inline void write_gmsh_subset(const Mesh& mesh, std::ostream& out) {
  out << "$MeshFormat\n2.2 0 8\n$EndMeshFormat\n";
  out << "$Nodes\n" << mesh.vertices.size() << "\n";
  char buf[128];
  for (std::size_t i = 0; i < mesh.vertices.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%zu %.17g %.17g 0\n", i + 1, mesh.vertices[i].x,
                  mesh.vertices[i].y);
    out << buf;
  }
  out << "$EndNodes\n";
  out << "$Elements\n" << (mesh.boundary.size() + mesh.triangles.size()) << "\n";
  std::size_t eid = 1;
  for (const auto& f : mesh.boundary) {
    const int phys = f.tag == BoundaryTag::gamma ? 1 : 2;
    out << eid++ << " 1 2 " << phys << " 0 " << f.v[0] + 1 << " " << f.v[1] + 1 << "\n";
  }
  for (const auto& tr : mesh.triangles)
    out << eid++ << " 2 2 3 0 " << tr[0] + 1 << " " << tr[1] + 1 << " " << tr[2] + 1 << "\n";
  out << "$EndElements\n";
}

}  // namespace exhelm
