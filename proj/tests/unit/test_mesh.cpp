#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>

#include "robinlab/error.hpp"
#include "robinlab/mesh.hpp"

using namespace robinlab;

TEST(Mesh, SquareCountsAndMeasures) {
  const Mesh m = generate_unit_square_mesh(8);
  EXPECT_EQ(m.dim(), 2);
  EXPECT_EQ(m.vertex_count(), 81);
  EXPECT_EQ(m.cell_count(), 128);
  EXPECT_EQ(m.boundary_facets().size(), 32u);
  EXPECT_NEAR(m.volume(), 1.0, 1e-14);
  EXPECT_NEAR(m.min_edge_length(), 0.125, 1e-14);
  EXPECT_NEAR(m.max_edge_length(), 0.125 * std::sqrt(2.0), 1e-14);
  const BoundaryMesh b = extract_boundary(m);
  EXPECT_EQ(b.vertex_count(), 32);
  EXPECT_NEAR(b.total_measure(), 4.0, 1e-13);
}

TEST(Mesh, LShapeHasSixteenBoundaryEdgesAtTwoSubdivisions) {
  const Mesh m = generate_lshape_mesh(2);
  EXPECT_EQ(m.boundary_facets().size(), 16u);
  EXPECT_NEAR(m.volume(), 0.75, 1e-14);
  EXPECT_NEAR(extract_boundary(m).total_measure(), 4.0, 1e-13);
}

TEST(Mesh, CubeVolumeAndSurface) {
  const Mesh m = generate_cube_mesh(3);
  EXPECT_EQ(m.dim(), 3);
  EXPECT_EQ(m.vertex_count(), 64);
  EXPECT_EQ(m.cell_count(), 6 * 27);
  EXPECT_NEAR(m.volume(), 1.0, 1e-13);
  EXPECT_EQ(m.boundary_facets().size(), 6u * 9u * 2u);
  EXPECT_NEAR(extract_boundary(m).total_measure(), 6.0, 1e-12);
}

TEST(Mesh, CellVolumesPositive) {
  for (const Mesh& m : {generate_unit_square_mesh(5), generate_cube_mesh(2), generate_ball_mesh(1, 1.0),
                        generate_disk_mesh(12, 0.4)}) {
    for (double v : m.cell_volumes()) EXPECT_GT(v, 0.0);
  }
}

TEST(Mesh, OutwardNormals) {
  const Mesh m = generate_unit_square_mesh(4);
  const Point c(0.5, 0.5, 0.0);
  for (std::size_t f = 0; f < m.boundary_facets().size(); ++f) {
    const auto& facet = m.boundary_facets()[f];
    const Point mid = 0.5 * (m.vertex(facet[0]) + m.vertex(facet[1]));
    EXPECT_GT(m.boundary_normals()[f].dot(mid - c), 0.0);
    EXPECT_NEAR(m.boundary_normals()[f].norm(), 1.0, 1e-14);
  }
}

TEST(Mesh, DiskPolygonPerimeter) {
  const int n = 64;
  const double r = 0.4;
  const BoundaryMesh b = extract_boundary(generate_disk_mesh(n, r));
  EXPECT_NEAR(b.total_measure(), 2.0 * n * r * std::sin(M_PI / n), 1e-13);
}

TEST(Mesh, BallVerticesOnSphere) {
  const Mesh m = generate_ball_mesh(1, 2.0);
  const BoundaryMesh b = extract_boundary(m);
  for (const auto& p : b.vertices) EXPECT_NEAR(p.norm(), 2.0, 1e-12);
  EXPECT_GT(m.volume(), 0.0);
  EXPECT_LT(m.volume(), 4.0 / 3.0 * M_PI * 8.0);
}

TEST(Mesh, TextRoundTrip) {
  const Mesh m = generate_lshape_mesh(2);
  const Mesh back = parse_mesh(format_mesh(m));
  ASSERT_EQ(back.vertex_count(), m.vertex_count());
  ASSERT_EQ(back.cell_count(), m.cell_count());
  for (int i = 0; i < m.vertex_count(); ++i) EXPECT_EQ(back.vertex(i), m.vertex(i));
  EXPECT_EQ(back.cells(), m.cells());

  const auto path = std::filesystem::temp_directory_path() / "robinlab_mesh_roundtrip.txt";
  save_mesh(m, path);
  EXPECT_EQ(load_mesh(path).cell_count(), m.cell_count());
  std::filesystem::remove(path);
}

TEST(Mesh, RejectsBadInput) {
  EXPECT_THROW(parse_mesh("dim 2\nvertices 1\n0 0\ncells 1\n0 1 2\n"), Error);
  EXPECT_THROW(parse_mesh("garbage"), ParseError);
  EXPECT_THROW(load_mesh("/nonexistent/robinlab.mesh"), ParseError);
  EXPECT_THROW(generate_unit_square_mesh(0), InvalidArgument);
  // degenerate (zero-area) cell
  std::vector<Point> v{{0, 0, 0}, {1, 0, 0}, {2, 0, 0}};
  EXPECT_THROW(Mesh::from_cells(2, v, {{0, 1, 2, -1}}), ValidationError);
}

TEST(Mesh, CellLocator) {
  const Mesh m = generate_lshape_mesh(4);
  const CellLocator loc(m);
  EXPECT_TRUE(loc.contains(Point(0.25, 0.25, 0)));
  EXPECT_TRUE(loc.contains(Point(0.25, 0.9, 0)));
  EXPECT_FALSE(loc.contains(Point(0.75, 0.75, 0)));
  EXPECT_FALSE(loc.contains(Point(1.5, 0.2, 0)));
  EXPECT_TRUE(loc.contains(Point(0.5, 0.5, 0)));  // re-entrant corner
}
