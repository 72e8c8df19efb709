#include "robinlab/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>

#include <Eigen/Dense>

#include "robinlab/error.hpp"

namespace robinlab {

namespace {

constexpr double kPi = 3.14159265358979323846;

double signed_volume(int dim, const std::vector<Point>& v, const Simplex& c) {
  if (dim == 2) {
    const Point a = v[c[1]] - v[c[0]];
    const Point b = v[c[2]] - v[c[0]];
    return 0.5 * (a.x() * b.y() - a.y() * b.x());
  }
  const Point a = v[c[1]] - v[c[0]];
  const Point b = v[c[2]] - v[c[0]];
  const Point d = v[c[3]] - v[c[0]];
  return a.dot(b.cross(d)) / 6.0;
}

struct UnionFind {
  explicit UnionFind(int n) : parent(static_cast<std::size_t>(n)) {
    std::iota(parent.begin(), parent.end(), 0);
  }
  int find(int x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  }
  void unite(int a, int b) { parent[find(a)] = find(b); }
  std::vector<int> parent;
};

Point facet_normal(int dim, const std::vector<Point>& v, const Facet& f) {
  if (dim == 2) {
    const Point t = v[f[1]] - v[f[0]];
    return Point(t.y(), -t.x(), 0.0).normalized();
  }
  return (v[f[1]] - v[f[0]]).cross(v[f[2]] - v[f[0]]).normalized();
}

Point facet_centroid(int dim, const std::vector<Point>& v, const Facet& f) {
  Point c = Point::Zero();
  for (int k = 0; k < dim; ++k) c += v[f[k]];
  return c / dim;
}

}  // namespace

Mesh Mesh::from_cells(int dim, std::vector<Point> vertices, std::vector<Simplex> cells) {
  if (dim != 2 && dim != 3) throw ValidationError("mesh dimension must be 2 or 3");
  if (cells.empty()) throw ValidationError("mesh has no cells");
  const int nv = static_cast<int>(vertices.size());
  const int per_cell = dim + 1;

  for (std::size_t c = 0; c < cells.size(); ++c) {
    for (int k = 0; k < per_cell; ++k) {
      if (cells[c][k] < 0 || cells[c][k] >= nv) {
        throw ParseError("cell " + std::to_string(c) + " references missing vertex " +
                         std::to_string(cells[c][k]));
      }
    }
    for (int k = per_cell; k < 4; ++k) cells[c][k] = -1;
  }

  Mesh m;
  m.dim_ = dim;
  m.vertices_ = std::move(vertices);
  m.cells_ = std::move(cells);
  if (dim == 2) {
    for (auto& p : m.vertices_) p.z() = 0.0;
  }

  m.cell_volumes_.resize(m.cells_.size());
  for (std::size_t c = 0; c < m.cells_.size(); ++c) {
    const double vol = signed_volume(dim, m.vertices_, m.cells_[c]);
    if (!(vol > 0.0)) {
      throw ValidationError("cell " + std::to_string(c) + " is inverted or degenerate (signed volume " +
                            std::to_string(vol) + ")");
    }
    m.cell_volumes_[c] = vol;
    m.volume_ += vol;
  }

  std::vector<char> used(static_cast<std::size_t>(nv), 0);
  for (const auto& c : m.cells_)
    for (int k = 0; k < per_cell; ++k) used[c[k]] = 1;
  for (int i = 0; i < nv; ++i) {
    if (!used[i]) throw ValidationError("vertex " + std::to_string(i) + " is not used by any cell");
  }

  // facet key -> (cell, omitted local vertex) occurrences
  std::map<Facet, std::vector<std::pair<int, int>>> facet_map;
  for (int c = 0; c < m.cell_count(); ++c) {
    for (int omit = 0; omit < per_cell; ++omit) {
      Facet key{-1, -1, -1};
      int n = 0;
      for (int k = 0; k < per_cell; ++k)
        if (k != omit) key[n++] = m.cells_[c][k];
      std::sort(key.begin(), key.begin() + dim);
      facet_map[key].emplace_back(c, omit);
    }
  }

  UnionFind uf(m.cell_count());
  for (const auto& [key, owners] : facet_map) {
    if (owners.size() > 2) {
      throw ValidationError("non-manifold facet shared by " + std::to_string(owners.size()) + " cells");
    }
    if (owners.size() == 2) {
      uf.unite(owners[0].first, owners[1].first);
      continue;
    }
    const int cell = owners[0].first;
    Facet f = key;
    Point normal = facet_normal(dim, m.vertices_, f);
    const Point outward = facet_centroid(dim, m.vertices_, f) - m.cell_centroid(cell);
    if (normal.dot(outward) < 0.0) {
      std::swap(f[dim - 2], f[dim - 1]);
      normal = -normal;
    }
    m.boundary_facets_.push_back(f);
    m.boundary_facet_cells_.push_back(cell);
    m.boundary_normals_.push_back(normal);
  }

  const int root = uf.find(0);
  for (int c = 1; c < m.cell_count(); ++c) {
    if (uf.find(c) != root) throw ValidationError("mesh is not connected");
  }

  std::vector<std::array<int, 2>> edges;
  for (const auto& c : m.cells_) {
    for (int a = 0; a < per_cell; ++a)
      for (int b = a + 1; b < per_cell; ++b)
        edges.push_back({std::min(c[a], c[b]), std::max(c[a], c[b])});
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  m.edges_ = std::move(edges);
  m.min_edge_ = std::numeric_limits<double>::infinity();
  for (const auto& e : m.edges_) {
    const double len = (m.vertices_[e[0]] - m.vertices_[e[1]]).norm();
    m.min_edge_ = std::min(m.min_edge_, len);
    m.max_edge_ = std::max(m.max_edge_, len);
  }

  // the diameter is attained on the boundary
  std::vector<int> bverts;
  for (const auto& f : m.boundary_facets_)
    for (int k = 0; k < dim; ++k) bverts.push_back(f[k]);
  std::sort(bverts.begin(), bverts.end());
  bverts.erase(std::unique(bverts.begin(), bverts.end()), bverts.end());
  for (std::size_t a = 0; a < bverts.size(); ++a)
    for (std::size_t b = a + 1; b < bverts.size(); ++b)
      m.diameter_ = std::max(m.diameter_, (m.vertices_[bverts[a]] - m.vertices_[bverts[b]]).norm());

  return m;
}

Point Mesh::cell_centroid(int c) const {
  Point p = Point::Zero();
  for (int k = 0; k <= dim_; ++k) p += vertices_[cells_[c][k]];
  return p / (dim_ + 1);
}

double BoundaryMesh::total_measure() const {
  double s = 0.0;
  for (double m : measures) s += m;
  return s;
}

double BoundaryMesh::diameter() const {
  double d = 0.0;
  for (std::size_t a = 0; a < vertices.size(); ++a)
    for (std::size_t b = a + 1; b < vertices.size(); ++b) d = std::max(d, (vertices[a] - vertices[b]).norm());
  return d;
}

BoundaryMesh extract_boundary(const Mesh& mesh) {
  BoundaryMesh b;
  b.dim = mesh.dim();
  b.to_local.assign(static_cast<std::size_t>(mesh.vertex_count()), -1);
  std::vector<int> globals;
  for (const auto& f : mesh.boundary_facets())
    for (int k = 0; k < mesh.dim(); ++k) globals.push_back(f[k]);
  std::sort(globals.begin(), globals.end());
  globals.erase(std::unique(globals.begin(), globals.end()), globals.end());
  b.to_global = globals;
  for (std::size_t i = 0; i < globals.size(); ++i) {
    b.to_local[globals[i]] = static_cast<int>(i);
    b.vertices.push_back(mesh.vertex(globals[i]));
  }
  for (std::size_t f = 0; f < mesh.boundary_facets().size(); ++f) {
    const Facet& gf = mesh.boundary_facets()[f];
    Facet lf{-1, -1, -1};
    for (int k = 0; k < mesh.dim(); ++k) lf[k] = b.to_local[gf[k]];
    b.facets.push_back(lf);
    b.normals.push_back(mesh.boundary_normals()[f]);
    Point mid = Point::Zero();
    for (int k = 0; k < mesh.dim(); ++k) mid += mesh.vertex(gf[k]);
    b.midpoints.push_back(mid / mesh.dim());
    if (mesh.dim() == 2) {
      b.measures.push_back((mesh.vertex(gf[1]) - mesh.vertex(gf[0])).norm());
    } else {
      const Point e1 = mesh.vertex(gf[1]) - mesh.vertex(gf[0]);
      const Point e2 = mesh.vertex(gf[2]) - mesh.vertex(gf[0]);
      b.measures.push_back(0.5 * e1.cross(e2).norm());
    }
  }
  return b;
}

Mesh generate_unit_square_mesh(int subdivisions) {
  if (subdivisions < 1) throw InvalidArgument("subdivisions must be >= 1");
  const int s = subdivisions;
  const double h = 1.0 / s;
  std::vector<Point> v;
  v.reserve(static_cast<std::size_t>((s + 1) * (s + 1)));
  for (int j = 0; j <= s; ++j)
    for (int i = 0; i <= s; ++i) v.emplace_back(i * h, j * h, 0.0);
  auto id = [s](int i, int j) { return j * (s + 1) + i; };
  std::vector<Simplex> cells;
  for (int j = 0; j < s; ++j) {
    for (int i = 0; i < s; ++i) {
      const int a = id(i, j), b = id(i + 1, j), c = id(i + 1, j + 1), d = id(i, j + 1);
      cells.push_back({a, b, c, -1});
      cells.push_back({a, c, d, -1});
    }
  }
  return Mesh::from_cells(2, std::move(v), std::move(cells));
}

Mesh generate_lshape_mesh(int subdivisions) {
  if (subdivisions < 1) throw InvalidArgument("subdivisions must be >= 1");
  const int s = subdivisions;
  const int g = 2 * s;
  const double h = 1.0 / g;
  std::vector<int> index(static_cast<std::size_t>((g + 1) * (g + 1)), -1);
  std::vector<Point> v;
  for (int j = 0; j <= g; ++j) {
    for (int i = 0; i <= g; ++i) {
      if (i > s && j > s) continue;
      index[j * (g + 1) + i] = static_cast<int>(v.size());
      v.emplace_back(i * h, j * h, 0.0);
    }
  }
  auto id = [&](int i, int j) { return index[j * (g + 1) + i]; };
  std::vector<Simplex> cells;
  for (int j = 0; j < g; ++j) {
    for (int i = 0; i < g; ++i) {
      if (i >= s && j >= s) continue;
      const int a = id(i, j), b = id(i + 1, j), c = id(i + 1, j + 1), d = id(i, j + 1);
      cells.push_back({a, b, c, -1});
      cells.push_back({a, c, d, -1});
    }
  }
  return Mesh::from_cells(2, std::move(v), std::move(cells));
}

Mesh generate_cube_mesh(int subdivisions) {
  if (subdivisions < 1) throw InvalidArgument("subdivisions must be >= 1");
  const int s = subdivisions;
  const double h = 1.0 / s;
  std::vector<Point> v;
  for (int k = 0; k <= s; ++k)
    for (int j = 0; j <= s; ++j)
      for (int i = 0; i <= s; ++i) v.emplace_back(i * h, j * h, k * h);
  auto id = [s](int i, int j, int k) { return (k * (s + 1) + j) * (s + 1) + i; };
  constexpr std::array<std::array<int, 3>, 6> perms{{{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}}};
  std::vector<Simplex> cells;
  for (int k = 0; k < s; ++k) {
    for (int j = 0; j < s; ++j) {
      for (int i = 0; i < s; ++i) {
        for (const auto& p : perms) {
          std::array<int, 3> step{0, 0, 0};
          Simplex t{id(i, j, k), -1, -1, -1};
          for (int q = 0; q < 3; ++q) {
            step[p[q]] = 1;
            t[q + 1] = id(i + step[0], j + step[1], k + step[2]);
          }
          if (signed_volume(3, v, t) < 0.0) std::swap(t[2], t[3]);
          cells.push_back(t);
        }
      }
    }
  }
  return Mesh::from_cells(3, std::move(v), std::move(cells));
}

Mesh generate_disk_mesh(int segments, double radius) {
  if (segments < 3) throw InvalidArgument("a polygon needs at least 3 segments");
  if (!(radius > 0.0)) throw InvalidArgument("radius must be positive");
  std::vector<Point> v{Point::Zero()};
  for (int k = 0; k < segments; ++k) {
    const double a = 2.0 * kPi * k / segments;
    v.emplace_back(radius * std::cos(a), radius * std::sin(a), 0.0);
  }
  std::vector<Simplex> cells;
  for (int k = 0; k < segments; ++k) cells.push_back({0, 1 + k, 1 + (k + 1) % segments, -1});
  return Mesh::from_cells(2, std::move(v), std::move(cells));
}

Mesh generate_ball_mesh(int refinements, double radius) {
  if (refinements < 0) throw InvalidArgument("refinements must be >= 0");
  if (!(radius > 0.0)) throw InvalidArgument("radius must be positive");
  const double t = (1.0 + std::sqrt(5.0)) / 2.0;
  std::vector<Point> sv{{-1, t, 0}, {1, t, 0}, {-1, -t, 0}, {1, -t, 0}, {0, -1, t}, {0, 1, t},
                        {0, -1, -t}, {0, 1, -t}, {t, 0, -1}, {t, 0, 1}, {-t, 0, -1}, {-t, 0, 1}};
  for (auto& p : sv) p.normalize();
  std::vector<std::array<int, 3>> faces{{0, 11, 5}, {0, 5, 1}, {0, 1, 7}, {0, 7, 10}, {0, 10, 11},
                                        {1, 5, 9}, {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
                                        {3, 9, 4}, {3, 4, 2}, {3, 2, 6}, {3, 6, 8}, {3, 8, 9},
                                        {4, 9, 5}, {2, 4, 11}, {6, 2, 10}, {8, 6, 7}, {9, 8, 1}};
  for (int r = 0; r < refinements; ++r) {
    std::map<std::pair<int, int>, int> mid;
    auto midpoint = [&](int a, int b) {
      const auto key = std::minmax(a, b);
      auto it = mid.find(key);
      if (it != mid.end()) return it->second;
      sv.push_back((sv[a] + sv[b]).normalized());
      const int idx = static_cast<int>(sv.size()) - 1;
      mid.emplace(key, idx);
      return idx;
    };
    std::vector<std::array<int, 3>> next;
    for (const auto& f : faces) {
      const int ab = midpoint(f[0], f[1]), bc = midpoint(f[1], f[2]), ca = midpoint(f[2], f[0]);
      next.push_back({f[0], ab, ca});
      next.push_back({f[1], bc, ab});
      next.push_back({f[2], ca, bc});
      next.push_back({ab, bc, ca});
    }
    faces = std::move(next);
  }
  std::vector<Point> v{Point::Zero()};
  for (const auto& p : sv) v.push_back(radius * p);
  std::vector<Simplex> cells;
  for (const auto& f : faces) {
    Simplex c{0, f[0] + 1, f[1] + 1, f[2] + 1};
    if (signed_volume(3, v, c) < 0.0) std::swap(c[2], c[3]);
    cells.push_back(c);
  }
  return Mesh::from_cells(3, std::move(v), std::move(cells));
}

Mesh parse_mesh(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  auto next_line = [&](const char* what) {
    while (std::getline(in, line)) {
      ++line_no;
      const auto first = line.find_first_not_of(" \t\r");
      if (first == std::string::npos || line[first] == '#') continue;
      return;
    }
    throw ParseError(std::string("unexpected end of mesh file while reading ") + what);
  };
  auto fail = [&](const std::string& msg) {
    throw ParseError("mesh line " + std::to_string(line_no) + ": " + msg);
  };
  auto header = [&](const char* keyword) {
    next_line(keyword);
    std::istringstream ls(line);
    std::string kw;
    long long value = -1;
    if (!(ls >> kw >> value) || kw != keyword || value < 0) fail(std::string("expected '") + keyword + " <count>'");
    std::string rest;
    if (ls >> rest) fail("trailing tokens after header");
    return value;
  };

  const long long dim = header("dim");
  if (dim != 2 && dim != 3) fail("dimension must be 2 or 3");
  const long long nv = header("vertices");
  std::vector<Point> vertices;
  vertices.reserve(static_cast<std::size_t>(nv));
  for (long long i = 0; i < nv; ++i) {
    next_line("vertices");
    std::istringstream ls(line);
    Point p = Point::Zero();
    for (int k = 0; k < dim; ++k)
      if (!(ls >> p[k])) fail("expected " + std::to_string(dim) + " coordinates");
    std::string rest;
    if (ls >> rest) fail("trailing tokens after vertex coordinates");
    vertices.push_back(p);
  }
  const long long nc = header("cells");
  std::vector<Simplex> cells;
  cells.reserve(static_cast<std::size_t>(nc));
  for (long long c = 0; c < nc; ++c) {
    next_line("cells");
    std::istringstream ls(line);
    Simplex s{-1, -1, -1, -1};
    for (int k = 0; k <= dim; ++k) {
      long long idx = 0;
      if (!(ls >> idx)) fail("expected " + std::to_string(dim + 1) + " vertex indices");
      if (idx < 0 || idx >= nv) fail("cell references missing vertex " + std::to_string(idx));
      s[k] = static_cast<int>(idx);
    }
    std::string rest;
    if (ls >> rest) fail("trailing tokens after cell indices");
    cells.push_back(s);
  }
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") != std::string::npos) fail("unexpected content after cells");
  }
  return Mesh::from_cells(static_cast<int>(dim), std::move(vertices), std::move(cells));
}

Mesh load_mesh(const std::filesystem::path& path, MeshFormat format) {
  if (format != MeshFormat::PlainText) throw InvalidArgument("unsupported mesh format");
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open mesh file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_mesh(buf.str());
}

std::string format_mesh(const Mesh& mesh) {
  std::ostringstream out;
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  out << "dim " << mesh.dim() << "\n";
  out << "vertices " << mesh.vertex_count() << "\n";
  for (const auto& p : mesh.vertices()) {
    for (int k = 0; k < mesh.dim(); ++k) out << (k ? " " : "") << p[k];
    out << "\n";
  }
  out << "cells " << mesh.cell_count() << "\n";
  for (const auto& c : mesh.cells()) {
    for (int k = 0; k <= mesh.dim(); ++k) out << (k ? " " : "") << c[k];
    out << "\n";
  }
  return out.str();
}

void save_mesh(const Mesh& mesh, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write mesh file " + path.string());
  out << format_mesh(mesh);
  if (!out) throw Error("failed writing mesh file " + path.string());
}

CellLocator::CellLocator(const Mesh& mesh, int buckets_per_axis) : mesh_(&mesh) {
  lo_ = Point::Constant(std::numeric_limits<double>::infinity());
  hi_ = -lo_;
  for (const auto& p : mesh.vertices()) {
    lo_ = lo_.cwiseMin(p);
    hi_ = hi_.cwiseMax(p);
  }
  if (mesh.dim() == 2) lo_.z() = hi_.z() = 0.0;
  if (buckets_per_axis <= 0) {
    buckets_per_axis = std::max(1, static_cast<int>(std::pow(mesh.cell_count(), 1.0 / mesh.dim())));
  }
  nb_ = buckets_per_axis;
  const int zb = mesh.dim() == 3 ? nb_ : 1;
  buckets_.resize(static_cast<std::size_t>(nb_ * nb_ * zb));
  for (int c = 0; c < mesh.cell_count(); ++c) {
    Point clo = mesh.vertex(mesh.cells()[c][0]), chi = clo;
    for (int k = 1; k <= mesh.dim(); ++k) {
      clo = clo.cwiseMin(mesh.vertex(mesh.cells()[c][k]));
      chi = chi.cwiseMax(mesh.vertex(mesh.cells()[c][k]));
    }
    const auto a = bucket_of(clo), b = bucket_of(chi);
    for (int z = a[2]; z <= b[2]; ++z)
      for (int y = a[1]; y <= b[1]; ++y)
        for (int x = a[0]; x <= b[0]; ++x) buckets_[(z * nb_ + y) * nb_ + x].push_back(c);
  }
}

std::array<int, 3> CellLocator::bucket_of(const Point& p) const {
  std::array<int, 3> b{0, 0, 0};
  for (int k = 0; k < mesh_->dim(); ++k) {
    const double span = hi_[k] - lo_[k];
    const double r = span > 0.0 ? (p[k] - lo_[k]) / span : 0.0;
    b[k] = std::clamp(static_cast<int>(std::floor(r * nb_)), 0, nb_ - 1);
  }
  return b;
}

bool CellLocator::in_cell(int c, const Point& p, double tol) const {
  const int d = mesh_->dim();
  const auto& cell = mesh_->cells()[c];
  const Point& o = mesh_->vertex(cell[0]);
  if (d == 2) {
    Eigen::Matrix2d J;
    J.col(0) = (mesh_->vertex(cell[1]) - o).head<2>();
    J.col(1) = (mesh_->vertex(cell[2]) - o).head<2>();
    const Eigen::Vector2d l = J.partialPivLu().solve((p - o).head<2>());
    return l.minCoeff() >= -tol && l.sum() <= 1.0 + tol;
  }
  Eigen::Matrix3d J;
  for (int k = 0; k < 3; ++k) J.col(k) = mesh_->vertex(cell[k + 1]) - o;
  const Eigen::Vector3d l = J.partialPivLu().solve(p - o);
  return l.minCoeff() >= -tol && l.sum() <= 1.0 + tol;
}

int CellLocator::locate(const Point& p, double tol) const {
  const double slack = tol * std::max(1.0, (hi_ - lo_).norm());
  for (int k = 0; k < mesh_->dim(); ++k) {
    if (p[k] < lo_[k] - slack || p[k] > hi_[k] + slack) return -1;
  }
  const auto b = bucket_of(p);
  for (int c : buckets_[(b[2] * nb_ + b[1]) * nb_ + b[0]]) {
    if (in_cell(c, p, tol)) return c;
  }
  return -1;
}

}  // namespace robinlab
