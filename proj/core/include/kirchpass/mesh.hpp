// Piecewise-linear finite elements on an interval (1D) or an axis-aligned
// rectangle (2D), with homogeneous Dirichlet boundary conditions.  The mesh
// owns the geometry and the nodal (lumped) quadrature weights; StiffnessForm
// owns the gradient quadratic form Q together with a cached factorization so
// that dual norms and Riesz representatives are cheap.
//
// Conventions:
//  * Degrees of freedom are the interior nodes only; boundary values are
//    identically zero and never stored.
//  * In 2D every grid cell is split into two triangles along the same
//    diagonal, so the mesh is non-obtuse and Q is an M-matrix.
//  * The discrete H^1_0 norm of u is sqrt(u^T Q u); all radii, windows and
//    gradient norms in the other modules refer to this norm.
#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <array>
#include <functional>
#include <memory>
#include <vector>

#include "kirchpass/errors.hpp"

namespace kirchpass {

class Mesh {
 public:
  /// Uniform mesh on (0, length) with `nodes` grid points including the two
  /// boundary points.  Requires length > 0 and nodes >= 3.
  static std::shared_ptr<const Mesh> interval(double length, int nodes);

  /// Uniform mesh on (0, lx) x (0, ly) with nx-by-ny grid points including
  /// the boundary.  Requires lx, ly > 0 and nx, ny >= 3.
  static std::shared_ptr<const Mesh> rectangle(double lx, double ly, int nx,
                                               int ny);

  /// Factory used by the configuration layer.
  static std::shared_ptr<const Mesh> create(int dimension,
                                            const std::vector<double>& extents,
                                            const std::vector<int>& nodes_per_axis);

  int dimension() const { return dim_; }
  const std::vector<double>& extents() const { return extents_; }
  const std::vector<int>& nodes_per_axis() const { return nodes_; }

  /// Measure of the domain (length or area).
  double measure() const { return measure_; }

  int node_count() const { return node_count_; }
  int interior_dof_count() const { return static_cast<int>(dof_to_node_.size()); }

  /// Coordinates of a global node; the second entry is 0 in 1D.
  std::array<double, 2> node_coordinate(int node) const;

  /// Global node id of an interior degree of freedom.
  int node_of_dof(int dof) const { return dof_to_node_[dof]; }

  /// Interior dof id of a global node, or -1 on the boundary.
  int dof_of_node(int node) const { return node_to_dof_[node]; }

  /// Element connectivity.  1D elements store {left node, right node, -1};
  /// 2D elements are triangles {n0, n1, n2} with positive orientation.
  const std::vector<std::array<int, 3>>& elements() const { return elements_; }

  /// Nodal quadrature weight of each interior dof (row sums of the lumped
  /// mass matrix).  Weights of boundary nodes are not stored; their total is
  /// measure() - interior_weight_sum().
  const Eigen::VectorXd& lumped_weights() const { return weights_; }
  double interior_weight_sum() const { return interior_weight_sum_; }

 private:
  Mesh() = default;
  void build_interval(double length, int nodes);
  void build_rectangle(double lx, double ly, int nx, int ny);

  int dim_ = 0;
  std::vector<double> extents_;
  std::vector<int> nodes_;
  double measure_ = 0.0;
  int node_count_ = 0;
  std::vector<int> dof_to_node_;
  std::vector<int> node_to_dof_;
  std::vector<std::array<int, 3>> elements_;
  Eigen::VectorXd weights_;
  double interior_weight_sum_ = 0.0;
};

/// A finite element function with homogeneous boundary values: one nodal
/// value per interior dof.
struct GridFunction {
  std::shared_ptr<const Mesh> mesh;
  Eigen::VectorXd values;

  GridFunction() = default;
  GridFunction(std::shared_ptr<const Mesh> m, Eigen::VectorXd v);

  static GridFunction zero(std::shared_ptr<const Mesh> m);

  int size() const { return static_cast<int>(values.size()); }
  double min_value() const;
  double max_value() const;
};

/// Nodal interpolant of a callable given in domain coordinates.
GridFunction nodal_interpolant(std::shared_ptr<const Mesh> mesh,
                               const std::function<double(double, double)>& g);

/// The symmetric positive definite form Q with u^T Q u = |grad u|_{L^2}^2,
/// plus a cached sparse Cholesky factorization for Q^{-1} applications.
class StiffnessForm {
 public:
  explicit StiffnessForm(std::shared_ptr<const Mesh> mesh);

  StiffnessForm(const StiffnessForm&) = delete;
  StiffnessForm& operator=(const StiffnessForm&) = delete;
  StiffnessForm(StiffnessForm&&) = default;
  StiffnessForm& operator=(StiffnessForm&&) = default;

  const Mesh& mesh() const { return *mesh_; }
  std::shared_ptr<const Mesh> mesh_ptr() const { return mesh_; }

  const Eigen::SparseMatrix<double>& matrix() const { return matrix_; }

  Eigen::VectorXd apply(const Eigen::VectorXd& u) const;
  double inner(const GridFunction& u, const GridFunction& v) const;
  double norm_sq(const GridFunction& u) const;

  /// Solves Q x = rhs (Riesz representative of a dual vector).
  Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const;

  /// rhs^T Q^{-1} rhs; the squared dual norm of a linear functional given in
  /// the nodal dual basis.
  double dual_norm_sq(const Eigen::VectorXd& rhs) const;

 private:
  std::shared_ptr<const Mesh> mesh_;
  Eigen::SparseMatrix<double> matrix_;
  std::unique_ptr<Eigen::SimplicialLLT<Eigen::SparseMatrix<double>>> llt_;
};

/// Assembles Q for a mesh.
std::shared_ptr<const StiffnessForm> assemble_stiffness(
    std::shared_ptr<const Mesh> mesh);

/// Squared discrete H^1_0 norm, |grad u|^2.
double h01_norm_sq(const StiffnessForm& q, const GridFunction& u);

/// Nodal quadrature of g(u) over the domain.  Boundary nodes contribute with
/// value g(0) so that constants integrate exactly: g == 1 yields measure().
double integrate_composed(const GridFunction& u,
                          const std::function<double(double)>& g);

/// Load vector of the nodal quadrature: entry i is w_i * g(u_i).  This is the
/// exact gradient of u -> integrate_composed(u, G) when g = G'.
Eigen::VectorXd assemble_load(const GridFunction& u,
                              const std::function<double(double)>& g);

/// Dual norm of the weak residual coeff * Q u - load(g(u)).
double weak_residual(const StiffnessForm& q, const GridFunction& u,
                     double coeff, const std::function<double(double)>& g);

/// Copy of u with nodal values clamped to [lo, hi].
GridFunction clipped(const GridFunction& u, double lo, double hi);

}  // namespace kirchpass
