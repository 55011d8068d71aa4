#pragma once

#include <array>
#include <memory>
#include <string>
#include <vector>

#include "curvem/geometry.hpp"
#include "curvem/types.hpp"

namespace curvem {

class SpatialGrid;

// A sampled compact embedded m-submanifold of R^n without boundary:
// closed polylines (m=1, cells are vertex pairs) or closed triangle meshes
// (m=2, cells are vertex triples). Immutable after construction.
class DiscreteManifold {
 public:
  DiscreteManifold(int m, int n, std::vector<Vec> vertices,
                   std::vector<std::array<int, 3>> cells);

  int m() const { return m_; }
  int n() const { return n_; }
  int vertex_count() const { return static_cast<int>(vertices_.size()); }
  int cell_count() const { return static_cast<int>(cells_.size()); }
  const std::vector<Vec>& vertices() const { return vertices_; }
  const Vec& vertex(int i) const { return vertices_[i]; }
  const std::vector<std::array<int, 3>>& cells() const { return cells_; }
  int cell_size() const { return m_ + 1; }

  const std::vector<int>& vertex_components() const { return vertex_component_; }
  int component_count() const { return component_count_; }

  double cell_measure(int c) const { return cell_measures_[c]; }
  double total_measure() const { return total_measure_; }
  double median_edge_length() const { return median_edge_; }
  double max_cell_diameter() const { return max_cell_diameter_; }

  // Cells incident to a vertex.
  const std::vector<int>& incident_cells(int v) const { return vertex_cells_[v]; }
  bool cells_adjacent(int a, int b) const;

  // Unit tangent basis of a cell (n x m): edge direction for m=1, an
  // orthonormal in-plane pair for m=2.
  Mat cell_tangent_basis(int c) const;

  // Measure-weighted average of incident cell tangent planes at a vertex,
  // re-orthonormalized via spectral rounding of the averaged projector.
  Mat vertex_tangent_basis(int v) const;

  // Exact distance from a point to the manifold (point-to-cell via grid).
  double distance_to(const Vec& p) const;
  // Nearest cell index and parameter-free closest point.
  std::pair<int, Vec> closest_point(const Vec& p) const;
  // Cells whose bounding boxes intersect a ball.
  std::vector<int> cells_near(const Vec& p, double radius) const;

  const SpatialGrid& grid() const { return *grid_; }

 private:
  int m_, n_;
  std::vector<Vec> vertices_;
  std::vector<std::array<int, 3>> cells_;
  std::vector<double> cell_measures_;
  std::vector<std::vector<int>> vertex_cells_;
  std::vector<int> vertex_component_;
  int component_count_ = 0;
  double total_measure_ = 0, median_edge_ = 0, max_cell_diameter_ = 0;
  std::shared_ptr<const SpatialGrid> grid_;

  void validate_closed() const;
  void build_components();
};

enum class FileFormat { CurveJson, Obj };

DiscreteManifold load_manifold(const std::string& path);
DiscreteManifold load_manifold(const std::string& path, FileFormat format);
void save_manifold(const DiscreteManifold& M, const std::string& path);

// Builders used by tests and tools.
DiscreteManifold manifold_from_loops(int n, const std::vector<std::vector<Vec>>& loops);
DiscreteManifold manifold_from_triangles(const std::vector<Vec>& vertices,
                                         const std::vector<std::array<int, 3>>& triangles);

// Quadrature nodes with weights and tangent planes.
struct SampleSet {
  int m = 0, n = 0;
  std::vector<Vec> points;
  std::vector<double> weights;
  std::vector<Mat> tangents;  // n x m orthonormal basis per node
  double resolution = 0;      // max sub-cell diameter

  double total_weight() const;
  Plane tangent_plane(int i) const { return Plane::from_orthonormal(tangents[i]); }
};

// Midpoint-rule nodes: density sub-cells per cell (m=1: any density >= 1;
// m=2: density must be a power of 4, realized by midpoint subdivision).
// Nodes of sub-cells touching an original vertex average the incident cell
// tangents, measure weighted.
SampleSet sample(const DiscreteManifold& M, int density);

// Nodes at the vertices, weights = share of incident cell measures,
// tangents = vertex-averaged planes. Nested under midpoint refinement of the
// manifold itself.
SampleSet vertex_samples(const DiscreteManifold& M);

double diameter(const DiscreteManifold& M);

// Minimal distance between non-adjacent cells; 0 indicates a self-crossing.
double min_nonadjacent_distance(const DiscreteManifold& M);

// Simple rigid/affine helpers.
DiscreteManifold translated(const DiscreteManifold& M, const Vec& t);
DiscreteManifold scaled(const DiscreteManifold& M, double factor);
DiscreteManifold transformed(const DiscreteManifold& M, const Mat& Q, const Vec& t);

struct HausdorffBreakdown {
  double sum = 0;       // one_sided_ab + one_sided_ba
  double a_to_b = 0;    // sup_{y in A} dist(y, B)
  double b_to_a = 0;
  double max_convention = 0;  // diagnostic only
  double resolution = 0;
};

// Hausdorff distance with the SUM of the two one-sided sup-distances.
// Source cells are subdivided until sub-edges are shorter than `resolution`
// (0 = auto: half the smaller median edge length); distances to the target
// are exact point-to-cell distances.
HausdorffBreakdown hausdorff_breakdown(const DiscreteManifold& A, const DiscreteManifold& B,
                                       double resolution = 0);
double hausdorff_distance(const DiscreteManifold& A, const DiscreteManifold& B,
                          double resolution = 0);

// Exact distance between two cells (segment-segment / triangle-triangle).
double cell_distance(const DiscreteManifold& A, int ca, const DiscreteManifold& B, int cb);

}  // namespace curvem
