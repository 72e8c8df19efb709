#pragma once

#include <array>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace robinlab {

using Point = Eigen::Vector3d;  // 2D meshes keep z = 0

/// Vertex indices of a simplex; only the first `dim + 1` (cells) or `dim`
/// (facets) entries are meaningful, the rest hold -1.
using Simplex = std::array<int, 4>;
using Facet = std::array<int, 3>;

/// Simplicial mesh of a bounded polygonal (n = 2) or polyhedral (n = 3) domain.
///
/// Immutable after construction. Boundary facets are derived from the cells,
/// oriented so that the stored normal points away from the adjacent cell.
class Mesh {
 public:
  /// Validates and derives boundary data. Throws ValidationError on inverted or
  /// degenerate cells, non-manifold facets, unused vertices or a disconnected
  /// cell complex, and ParseError on out-of-range vertex indices.
  static Mesh from_cells(int dim, std::vector<Point> vertices, std::vector<Simplex> cells);

  int dim() const noexcept { return dim_; }
  int vertex_count() const noexcept { return static_cast<int>(vertices_.size()); }
  int cell_count() const noexcept { return static_cast<int>(cells_.size()); }
  int vertices_per_cell() const noexcept { return dim_ + 1; }

  const std::vector<Point>& vertices() const noexcept { return vertices_; }
  const Point& vertex(int i) const { return vertices_[static_cast<std::size_t>(i)]; }
  const std::vector<Simplex>& cells() const noexcept { return cells_; }
  const std::vector<double>& cell_volumes() const noexcept { return cell_volumes_; }

  const std::vector<Facet>& boundary_facets() const noexcept { return boundary_facets_; }
  const std::vector<int>& boundary_facet_cells() const noexcept { return boundary_facet_cells_; }
  const std::vector<Point>& boundary_normals() const noexcept { return boundary_normals_; }

  double volume() const noexcept { return volume_; }
  double diameter() const noexcept { return diameter_; }
  double min_edge_length() const noexcept { return min_edge_; }
  double max_edge_length() const noexcept { return max_edge_; }

  Point cell_centroid(int c) const;
  /// Unique undirected edges (i < j), sorted.
  const std::vector<std::array<int, 2>>& edges() const noexcept { return edges_; }

 private:
  Mesh() = default;

  int dim_ = 0;
  std::vector<Point> vertices_;
  std::vector<Simplex> cells_;
  std::vector<double> cell_volumes_;
  std::vector<Facet> boundary_facets_;
  std::vector<int> boundary_facet_cells_;
  std::vector<Point> boundary_normals_;
  std::vector<std::array<int, 2>> edges_;
  double volume_ = 0.0;
  double diameter_ = 0.0;
  double min_edge_ = 0.0;
  double max_edge_ = 0.0;
};

/// The boundary of a Mesh as a codimension-one simplicial complex with its
/// own (local) vertex numbering.
struct BoundaryMesh {
  int dim = 0;                        // ambient dimension n
  std::vector<Point> vertices;        // local boundary vertices
  std::vector<int> to_global;         // local -> mesh vertex index
  std::vector<int> to_local;          // mesh vertex index -> local, -1 if interior
  std::vector<Facet> facets;          // local indices, first `dim` entries used
  std::vector<double> measures;       // length (2D) or area (3D)
  std::vector<Point> midpoints;       // facet centroids
  std::vector<Point> normals;         // unit outward normals

  int vertex_count() const noexcept { return static_cast<int>(vertices.size()); }
  int facet_count() const noexcept { return static_cast<int>(facets.size()); }
  int vertices_per_facet() const noexcept { return dim; }
  double total_measure() const;
  double diameter() const;
};

BoundaryMesh extract_boundary(const Mesh& mesh);

/// Uniform triangulation of [0,1]^2 with one diagonal per square: 2 s^2 cells.
Mesh generate_unit_square_mesh(int subdivisions);
/// [0,1]^2 minus (1/2,1]^2 with grid spacing 1/(2 s): 6 s^2 cells.
Mesh generate_lshape_mesh(int subdivisions);
/// [0,1]^3, each of the s^3 subcubes split into 6 Kuhn tetrahedra.
Mesh generate_cube_mesh(int subdivisions);
/// Regular polygon with `segments` sides inscribed in a circle of `radius`,
/// fanned from the centre.
Mesh generate_disk_mesh(int segments, double radius);
/// Icosphere of the given refinement level inscribed in a sphere of `radius`,
/// coned to the centre.
Mesh generate_ball_mesh(int refinements, double radius);

enum class MeshFormat { PlainText };

/// Plain-text format: `dim <n>`, `vertices <count>` + coordinate lines,
/// `cells <count>` + 0-based index lines. Boundary facets are derived.
Mesh load_mesh(const std::filesystem::path& path, MeshFormat format = MeshFormat::PlainText);
Mesh parse_mesh(const std::string& text);
void save_mesh(const Mesh& mesh, const std::filesystem::path& path);
std::string format_mesh(const Mesh& mesh);

/// Bucket grid for point-in-mesh queries.
class CellLocator {
 public:
  explicit CellLocator(const Mesh& mesh, int buckets_per_axis = 0);
  /// Index of a cell containing `p` (barycentric tolerance `tol`), or -1.
  int locate(const Point& p, double tol = 1e-10) const;
  bool contains(const Point& p, double tol = 1e-10) const { return locate(p, tol) >= 0; }

 private:
  std::array<int, 3> bucket_of(const Point& p) const;
  bool in_cell(int c, const Point& p, double tol) const;

  const Mesh* mesh_;
  Point lo_, hi_;
  int nb_;
  std::vector<std::vector<int>> buckets_;
};

}  // namespace robinlab
