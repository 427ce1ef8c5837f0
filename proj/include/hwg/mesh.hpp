// Polygonal mesh data model: vertices, counterclockwise cell loops, and
// derived edge topology (canonical edges, adjacency, boundary flags) plus
// per-cell geometry (centroid, diameter, outward normals).
//
// Meshes are immutable after construction and safe to share across threads.

#ifndef HWG_MESH_HPP
#define HWG_MESH_HPP

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace hwg {

using Vec2 = Eigen::Vector2d;

/// Per-cell geometric quantities derived from the vertex loop.
struct CellGeometry {
  Vec2 centroid = Vec2::Zero();   // area centroid
  double diameter = 0.0;          // max pairwise vertex distance
  double area = 0.0;
  std::vector<Vec2> edge_normal;      // outward unit normal, per local edge
  std::vector<double> edge_length;
  std::vector<Vec2> edge_midpoint;
};

class PolygonalMesh {
public:
  /// Builds topology and geometry from vertices and ccw cell loops.
  /// Throws std::invalid_argument on nonpositive cell area, an edge with
  /// more than two adjacent cells, or a cell not star-shaped w.r.t. its
  /// centroid.
  PolygonalMesh(std::vector<Vec2> vertices,
                std::vector<std::vector<int>> cells);

  int n_vertices() const { return static_cast<int>(vertices_.size()); }
  int n_cells() const { return static_cast<int>(cells_.size()); }
  int n_edges() const { return static_cast<int>(edges_.size()); }
  int n_interior_edges() const { return n_interior_edges_; }

  const std::vector<Vec2>& vertices() const { return vertices_; }
  const std::vector<std::vector<int>>& cells() const { return cells_; }

  /// Edges stored once with canonical orientation: lower vertex index first.
  const std::vector<std::array<int, 2>>& edges() const { return edges_; }
  /// Adjacent cells per edge; second entry is -1 on the boundary.
  const std::vector<std::array<int, 2>>& edge_cells() const { return edge_cells_; }
  /// Per cell, global edge index for each local edge (local edge i joins
  /// loop vertices i and i+1).
  const std::vector<std::vector<int>>& cell_edges() const { return cell_edges_; }
  /// +1 if the cell traverses the edge in its canonical direction, else -1.
  const std::vector<std::vector<int>>& cell_edge_sign() const { return cell_edge_sign_; }
  bool is_boundary_edge(int e) const { return boundary_flag_[e]; }

  const CellGeometry& geometry(int cell) const { return geom_[cell]; }
  const std::vector<int>& cell(int c) const { return cells_[c]; }

  Vec2 vertex(int v) const { return vertices_[v]; }
  Vec2 edge_vertex(int e, int which) const { return vertices_[edges_[e][which]]; }
  double edge_length(int e) const { return edge_length_[e]; }
  Vec2 edge_midpoint(int e) const { return 0.5 * (edge_vertex(e, 0) + edge_vertex(e, 1)); }
  /// Unit tangent along the canonical edge direction.
  Vec2 edge_tangent(int e) const;

  /// Global mesh size h = max over cells of h_T.
  double mesh_size() const { return mesh_size_; }
  double total_area() const { return total_area_; }

private:
  std::vector<Vec2> vertices_;
  std::vector<std::vector<int>> cells_;
  std::vector<std::array<int, 2>> edges_;
  std::vector<std::array<int, 2>> edge_cells_;
  std::vector<std::vector<int>> cell_edges_;
  std::vector<std::vector<int>> cell_edge_sign_;
  std::vector<bool> boundary_flag_;
  std::vector<double> edge_length_;
  std::vector<CellGeometry> geom_;
  int n_interior_edges_ = 0;
  double mesh_size_ = 0.0;
  double total_area_ = 0.0;
};

/// Unit square split into n x n squares, each cut by the negative-slope
/// diagonal into two triangles. h = 1/n.
PolygonalMesh gen_triangular(int n);

/// Unit square split into n x n axis-aligned squares of side 1/n.
PolygonalMesh gen_rectangular(int n);

/// Replaces every quadrilateral by four quadrilaterals joining its
/// barycenter (vertex average) to the edge midpoints. Rejects
/// non-quadrilateral cells.
PolygonalMesh refine_quad_barycentric(const PolygonalMesh& mesh);

/// Quadrilateral mesh family: an n0 x n0 grid whose interior vertices are
/// displaced by up to rho/n0 with a fixed seed, then refined
/// (levels - 1) times barycentrically.
std::vector<PolygonalMesh> gen_quad_family(int n0, int levels, double rho);

/// Parses the line-oriented mesh format. Clockwise cell loops are accepted
/// and reoriented; a note per reoriented cell is appended to `warnings` if
/// given. Throws std::runtime_error with a line number on malformed input.
PolygonalMesh read_mesh(std::istream& in, std::vector<std::string>* warnings = nullptr);
PolygonalMesh read_mesh_file(const std::string& path, std::vector<std::string>* warnings = nullptr);

void write_mesh(std::ostream& out, const PolygonalMesh& mesh);
void write_mesh_file(const std::string& path, const PolygonalMesh& mesh);

}  // namespace hwg

#endif
