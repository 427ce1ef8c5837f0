#include "hwg/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <random>
#include <sstream>
#include <stdexcept>

namespace hwg {

namespace {

double loop_signed_area(const std::vector<Vec2>& verts, const std::vector<int>& loop) {
  double a = 0.0;
  const int m = static_cast<int>(loop.size());
  for (int i = 0; i < m; ++i) {
    const Vec2& p = verts[loop[i]];
    const Vec2& q = verts[loop[(i + 1) % m]];
    a += p.x() * q.y() - q.x() * p.y();
  }
  return 0.5 * a;
}

Vec2 loop_centroid(const std::vector<Vec2>& verts, const std::vector<int>& loop, double area) {
  Vec2 c = Vec2::Zero();
  const int m = static_cast<int>(loop.size());
  for (int i = 0; i < m; ++i) {
    const Vec2& p = verts[loop[i]];
    const Vec2& q = verts[loop[(i + 1) % m]];
    const double cross = p.x() * q.y() - q.x() * p.y();
    c += cross * (p + q);
  }
  return c / (6.0 * area);
}

}  // namespace

PolygonalMesh::PolygonalMesh(std::vector<Vec2> vertices,
                             std::vector<std::vector<int>> cells)
    : vertices_(std::move(vertices)), cells_(std::move(cells)) {
  const int nv = n_vertices();
  // Edge table: canonical orientation = lower vertex index first.
  std::map<std::array<int, 2>, int> edge_index;
  cell_edges_.resize(cells_.size());
  cell_edge_sign_.resize(cells_.size());
  geom_.resize(cells_.size());

  for (int c = 0; c < n_cells(); ++c) {
    const auto& loop = cells_[c];
    const int m = static_cast<int>(loop.size());
    if (m < 3) throw std::invalid_argument("cell " + std::to_string(c) + " has fewer than 3 vertices");
    for (int i : loop) {
      if (i < 0 || i >= nv)
        throw std::invalid_argument("cell " + std::to_string(c) + ": vertex index out of range");
    }
    const double area = loop_signed_area(vertices_, loop);
    if (area <= 0.0)
      throw std::invalid_argument("cell " + std::to_string(c) + " has nonpositive area (clockwise or degenerate loop)");

    CellGeometry& g = geom_[c];
    g.area = area;
    g.centroid = loop_centroid(vertices_, loop, area);
    g.diameter = 0.0;
    for (int i = 0; i < m; ++i)
      for (int j = i + 1; j < m; ++j)
        g.diameter = std::max(g.diameter, (vertices_[loop[i]] - vertices_[loop[j]]).norm());

    for (int i = 0; i < m; ++i) {
      const int a = loop[i];
      const int b = loop[(i + 1) % m];
      if (a == b) throw std::invalid_argument("cell " + std::to_string(c) + ": repeated vertex in loop");
      const Vec2 pa = vertices_[a];
      const Vec2 pb = vertices_[b];
      const Vec2 t = pb - pa;
      const double len = t.norm();
      if (len < 1e-14 * g.diameter)
        throw std::invalid_argument("cell " + std::to_string(c) + ": degenerate edge");
      // Star-shapedness w.r.t. the centroid: every fan triangle
      // (centroid, a, b) must have positive area.
      const double tri2 = (pa - g.centroid).x() * (pb - g.centroid).y() -
                          (pb - g.centroid).x() * (pa - g.centroid).y();
      if (tri2 <= 1e-14 * g.diameter * g.diameter)
        throw std::invalid_argument("cell " + std::to_string(c) + " is not star-shaped w.r.t. its centroid");

      g.edge_length.push_back(len);
      g.edge_midpoint.push_back(0.5 * (pa + pb));
      // Outward normal for a ccw loop: rotate the tangent by -90 degrees.
      g.edge_normal.push_back(Vec2(t.y() / len, -t.x() / len));

      const std::array<int, 2> key{std::min(a, b), std::max(a, b)};
      auto [it, inserted] = edge_index.try_emplace(key, static_cast<int>(edges_.size()));
      if (inserted) {
        edges_.push_back(key);
        edge_cells_.push_back({c, -1});
      } else {
        auto& adj = edge_cells_[it->second];
        if (adj[1] != -1)
          throw std::invalid_argument("edge (" + std::to_string(key[0]) + "," +
                                      std::to_string(key[1]) + ") has more than two adjacent cells");
        adj[1] = c;
      }
      cell_edges_[c].push_back(it->second);
      cell_edge_sign_[c].push_back(a == key[0] ? +1 : -1);
    }
    total_area_ += area;
    mesh_size_ = std::max(mesh_size_, g.diameter);
  }

  boundary_flag_.resize(edges_.size());
  edge_length_.resize(edges_.size());
  for (int e = 0; e < n_edges(); ++e) {
    boundary_flag_[e] = (edge_cells_[e][1] == -1);
    if (!boundary_flag_[e]) ++n_interior_edges_;
    edge_length_[e] = (edge_vertex(e, 1) - edge_vertex(e, 0)).norm();
  }
}

Vec2 PolygonalMesh::edge_tangent(int e) const {
  Vec2 t = edge_vertex(e, 1) - edge_vertex(e, 0);
  return t / t.norm();
}

PolygonalMesh gen_triangular(int n) {
  if (n < 1) throw std::invalid_argument("gen_triangular: n must be >= 1");
  std::vector<Vec2> verts;
  verts.reserve((n + 1) * (n + 1));
  for (int j = 0; j <= n; ++j)
    for (int i = 0; i <= n; ++i)
      verts.emplace_back(double(i) / n, double(j) / n);
  auto id = [n](int i, int j) { return j * (n + 1) + i; };
  std::vector<std::vector<int>> cells;
  cells.reserve(2 * n * n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      // Negative-slope diagonal: from (i, j+1) down to (i+1, j).
      cells.push_back({id(i, j), id(i + 1, j), id(i, j + 1)});
      cells.push_back({id(i + 1, j), id(i + 1, j + 1), id(i, j + 1)});
    }
  }
  return PolygonalMesh(std::move(verts), std::move(cells));
}

PolygonalMesh gen_rectangular(int n) {
  if (n < 1) throw std::invalid_argument("gen_rectangular: n must be >= 1");
  std::vector<Vec2> verts;
  verts.reserve((n + 1) * (n + 1));
  for (int j = 0; j <= n; ++j)
    for (int i = 0; i <= n; ++i)
      verts.emplace_back(double(i) / n, double(j) / n);
  auto id = [n](int i, int j) { return j * (n + 1) + i; };
  std::vector<std::vector<int>> cells;
  cells.reserve(n * n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i)
      cells.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1)});
  return PolygonalMesh(std::move(verts), std::move(cells));
}

PolygonalMesh refine_quad_barycentric(const PolygonalMesh& mesh) {
  std::vector<Vec2> verts = mesh.vertices();
  // Shared edge midpoints are identified through the global edge index.
  std::vector<int> midpoint_id(mesh.n_edges());
  for (int e = 0; e < mesh.n_edges(); ++e) {
    midpoint_id[e] = static_cast<int>(verts.size());
    verts.push_back(mesh.edge_midpoint(e));
  }
  std::vector<std::vector<int>> cells;
  cells.reserve(4 * mesh.n_cells());
  for (int c = 0; c < mesh.n_cells(); ++c) {
    const auto& loop = mesh.cell(c);
    if (loop.size() != 4)
      throw std::invalid_argument("refine_quad_barycentric: cell " + std::to_string(c) +
                                  " is not a quadrilateral");
    Vec2 bary = Vec2::Zero();
    for (int v : loop) bary += mesh.vertex(v);
    bary /= 4.0;
    const int bc = static_cast<int>(verts.size());
    verts.push_back(bary);
    const auto& ce = mesh.cell_edges()[c];
    for (int i = 0; i < 4; ++i) {
      const int prev = (i + 3) % 4;
      cells.push_back({bc, midpoint_id[ce[prev]], loop[i], midpoint_id[ce[i]]});
    }
  }
  return PolygonalMesh(std::move(verts), std::move(cells));
}

std::vector<PolygonalMesh> gen_quad_family(int n0, int levels, double rho) {
  if (n0 < 1) throw std::invalid_argument("gen_quad_family: n0 must be >= 1");
  if (levels < 1) throw std::invalid_argument("gen_quad_family: levels must be >= 1");
  if (rho < 0.0 || rho > 0.3)
    throw std::invalid_argument("gen_quad_family: rho must lie in [0, 0.3]");

  std::vector<Vec2> verts;
  std::mt19937 rng(20240815u);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  const double h0 = 1.0 / n0;
  for (int j = 0; j <= n0; ++j) {
    for (int i = 0; i <= n0; ++i) {
      Vec2 p(double(i) / n0, double(j) / n0);
      const bool interior = (i > 0 && i < n0 && j > 0 && j < n0);
      // Draw for every vertex so the layout is seed-stable, displace only
      // interior ones.
      const double dx = unif(rng), dy = unif(rng);
      if (interior) p += rho * h0 * Vec2(dx, dy);
      verts.push_back(p);
    }
  }
  auto id = [n0](int i, int j) { return j * (n0 + 1) + i; };
  std::vector<std::vector<int>> cells;
  for (int j = 0; j < n0; ++j)
    for (int i = 0; i < n0; ++i)
      cells.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1)});

  std::vector<PolygonalMesh> family;
  family.emplace_back(std::move(verts), std::move(cells));
  for (int l = 1; l < levels; ++l)
    family.push_back(refine_quad_barycentric(family.back()));
  return family;
}

// ---------------------------------------------------------------------------
// Mesh file format

namespace {

[[noreturn]] void parse_error(int line, const std::string& msg) {
  throw std::runtime_error("mesh parse error at line " + std::to_string(line) + ": " + msg);
}

bool next_content_line(std::istream& in, std::string& line, int& lineno) {
  while (std::getline(in, line)) {
    ++lineno;
    const auto pos = line.find('#');
    if (pos != std::string::npos) line.erase(pos);
    if (line.find_first_not_of(" \t\r\n") != std::string::npos) return true;
  }
  return false;
}

}  // namespace

PolygonalMesh read_mesh(std::istream& in, std::vector<std::string>* warnings) {
  std::string line;
  int lineno = 0;

  if (!next_content_line(in, line, lineno)) parse_error(lineno, "empty file");
  {
    std::istringstream ss(line);
    std::string magic;
    int version = 0;
    ss >> magic >> version;
    if (magic != "hwg-mesh" || version != 1)
      parse_error(lineno, "expected header 'hwg-mesh 1'");
  }

  int nv = 0;
  if (!next_content_line(in, line, lineno)) parse_error(lineno, "missing 'vertices' section");
  {
    std::istringstream ss(line);
    std::string kw;
    ss >> kw >> nv;
    if (kw != "vertices" || ss.fail() || nv < 0)
      parse_error(lineno, "expected 'vertices <nv>'");
  }
  std::vector<Vec2> verts(nv);
  for (int i = 0; i < nv; ++i) {
    if (!next_content_line(in, line, lineno)) parse_error(lineno, "unexpected end of vertex list");
    std::istringstream ss(line);
    ss >> verts[i].x() >> verts[i].y();
    if (ss.fail()) parse_error(lineno, "expected 'x y'");
  }

  int nc = 0;
  if (!next_content_line(in, line, lineno)) parse_error(lineno, "missing 'cells' section");
  {
    std::istringstream ss(line);
    std::string kw;
    ss >> kw >> nc;
    if (kw != "cells" || ss.fail() || nc < 0)
      parse_error(lineno, "expected 'cells <nc>'");
  }
  std::vector<std::vector<int>> cells(nc);
  for (int c = 0; c < nc; ++c) {
    if (!next_content_line(in, line, lineno)) parse_error(lineno, "unexpected end of cell list");
    std::istringstream ss(line);
    int m = 0;
    ss >> m;
    if (ss.fail() || m < 3) parse_error(lineno, "expected 'm i0 ... i{m-1}' with m >= 3");
    cells[c].resize(m);
    for (int i = 0; i < m; ++i) {
      ss >> cells[c][i];
      if (ss.fail()) parse_error(lineno, "too few vertex indices");
      if (cells[c][i] < 0 || cells[c][i] >= nv)
        parse_error(lineno, "index out of range: vertex " + std::to_string(cells[c][i]) +
                                " of " + std::to_string(nv));
    }
    if (loop_signed_area(verts, cells[c]) < 0.0) {
      std::reverse(cells[c].begin(), cells[c].end());
      if (warnings)
        warnings->push_back("cell " + std::to_string(c) +
                            ": clockwise loop reoriented counterclockwise (line " +
                            std::to_string(lineno) + ")");
    }
  }
  return PolygonalMesh(std::move(verts), std::move(cells));
}

PolygonalMesh read_mesh_file(const std::string& path, std::vector<std::string>* warnings) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open mesh file: " + path);
  return read_mesh(in, warnings);
}

void write_mesh(std::ostream& out, const PolygonalMesh& mesh) {
  out.precision(17);
  out << "hwg-mesh 1\n";
  out << "vertices " << mesh.n_vertices() << "\n";
  for (const Vec2& v : mesh.vertices()) out << v.x() << " " << v.y() << "\n";
  out << "cells " << mesh.n_cells() << "\n";
  for (const auto& loop : mesh.cells()) {
    out << loop.size();
    for (int i : loop) out << " " << i;
    out << "\n";
  }
}

void write_mesh_file(const std::string& path, const PolygonalMesh& mesh) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  write_mesh(out, mesh);
}

}  // namespace hwg
