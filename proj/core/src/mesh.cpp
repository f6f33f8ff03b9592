#include "kirchpass/mesh.hpp"

#include <cmath>
#include <string>

namespace kirchpass {

namespace {

void require(bool ok, const std::string& message) {
  if (!ok) throw ConfigError(message);
}

}  // namespace

std::shared_ptr<const Mesh> Mesh::interval(double length, int nodes) {
  require(length > 0.0, "mesh: interval length must be positive");
  require(nodes >= 3, "mesh: interval needs at least 3 nodes");
  auto mesh = std::shared_ptr<Mesh>(new Mesh());
  mesh->build_interval(length, nodes);
  return mesh;
}

std::shared_ptr<const Mesh> Mesh::rectangle(double lx, double ly, int nx,
                                            int ny) {
  require(lx > 0.0 && ly > 0.0, "mesh: rectangle extents must be positive");
  require(nx >= 3 && ny >= 3, "mesh: rectangle needs at least 3 nodes per axis");
  auto mesh = std::shared_ptr<Mesh>(new Mesh());
  mesh->build_rectangle(lx, ly, nx, ny);
  return mesh;
}

std::shared_ptr<const Mesh> Mesh::create(int dimension,
                                         const std::vector<double>& extents,
                                         const std::vector<int>& nodes_per_axis) {
  require(dimension == 1 || dimension == 2, "mesh: dimension must be 1 or 2");
  require(static_cast<int>(extents.size()) == dimension,
          "mesh: extents size must match dimension");
  require(static_cast<int>(nodes_per_axis.size()) == dimension,
          "mesh: nodes_per_axis size must match dimension");
  if (dimension == 1) return interval(extents[0], nodes_per_axis[0]);
  return rectangle(extents[0], extents[1], nodes_per_axis[0], nodes_per_axis[1]);
}

void Mesh::build_interval(double length, int nodes) {
  dim_ = 1;
  extents_ = {length};
  nodes_ = {nodes};
  measure_ = length;
  node_count_ = nodes;

  node_to_dof_.assign(nodes, -1);
  for (int i = 1; i + 1 < nodes; ++i) {
    node_to_dof_[i] = static_cast<int>(dof_to_node_.size());
    dof_to_node_.push_back(i);
  }

  elements_.reserve(nodes - 1);
  for (int i = 0; i + 1 < nodes; ++i) elements_.push_back({i, i + 1, -1});

  const double h = length / (nodes - 1);
  weights_ = Eigen::VectorXd::Constant(interior_dof_count(), h);
  interior_weight_sum_ = weights_.sum();
}

void Mesh::build_rectangle(double lx, double ly, int nx, int ny) {
  dim_ = 2;
  extents_ = {lx, ly};
  nodes_ = {nx, ny};
  measure_ = lx * ly;
  node_count_ = nx * ny;

  node_to_dof_.assign(node_count_, -1);
  for (int j = 1; j + 1 < ny; ++j) {
    for (int i = 1; i + 1 < nx; ++i) {
      const int node = j * nx + i;
      node_to_dof_[node] = static_cast<int>(dof_to_node_.size());
      dof_to_node_.push_back(node);
    }
  }

  // Two triangles per cell, all cut along the same diagonal.
  elements_.reserve(2 * (nx - 1) * (ny - 1));
  for (int j = 0; j + 1 < ny; ++j) {
    for (int i = 0; i + 1 < nx; ++i) {
      const int n00 = j * nx + i;
      const int n10 = n00 + 1;
      const int n01 = n00 + nx;
      const int n11 = n01 + 1;
      elements_.push_back({n00, n10, n11});
      elements_.push_back({n00, n11, n01});
    }
  }

  const double hx = lx / (nx - 1);
  const double hy = ly / (ny - 1);
  const double cell_area = hx * hy;

  // Lumped weights: each triangle assigns a third of its area to each vertex.
  std::vector<double> nodal(node_count_, 0.0);
  for (const auto& e : elements_) {
    for (int v = 0; v < 3; ++v) nodal[e[v]] += cell_area / 6.0;
  }
  weights_.resize(interior_dof_count());
  for (int d = 0; d < interior_dof_count(); ++d) {
    weights_[d] = nodal[dof_to_node_[d]];
  }
  interior_weight_sum_ = weights_.sum();
}

std::array<double, 2> Mesh::node_coordinate(int node) const {
  if (dim_ == 1) {
    const double h = extents_[0] / (nodes_[0] - 1);
    return {node * h, 0.0};
  }
  const int nx = nodes_[0];
  const int i = node % nx;
  const int j = node / nx;
  const double hx = extents_[0] / (nx - 1);
  const double hy = extents_[1] / (nodes_[1] - 1);
  return {i * hx, j * hy};
}

GridFunction::GridFunction(std::shared_ptr<const Mesh> m, Eigen::VectorXd v)
    : mesh(std::move(m)), values(std::move(v)) {
  if (!mesh) throw Error("grid function: mesh is null");
  if (values.size() != mesh->interior_dof_count()) {
    throw Error("grid function: value count does not match interior dofs");
  }
}

GridFunction GridFunction::zero(std::shared_ptr<const Mesh> m) {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(m->interior_dof_count());
  return GridFunction(std::move(m), std::move(v));
}

double GridFunction::min_value() const {
  return values.size() ? values.minCoeff() : 0.0;
}

double GridFunction::max_value() const {
  return values.size() ? values.maxCoeff() : 0.0;
}

GridFunction nodal_interpolant(std::shared_ptr<const Mesh> mesh,
                               const std::function<double(double, double)>& g) {
  Eigen::VectorXd v(mesh->interior_dof_count());
  for (int d = 0; d < mesh->interior_dof_count(); ++d) {
    const auto xy = mesh->node_coordinate(mesh->node_of_dof(d));
    v[d] = g(xy[0], xy[1]);
  }
  return GridFunction(std::move(mesh), std::move(v));
}

StiffnessForm::StiffnessForm(std::shared_ptr<const Mesh> mesh)
    : mesh_(std::move(mesh)) {
  if (!mesh_) throw Error("stiffness: mesh is null");
  const int n = mesh_->interior_dof_count();

  std::vector<Eigen::Triplet<double>> triplets;
  if (mesh_->dimension() == 1) {
    triplets.reserve(3 * n);
    const double h = mesh_->extents()[0] / (mesh_->nodes_per_axis()[0] - 1);
    const double k = 1.0 / h;
    for (const auto& e : mesh_->elements()) {
      const int a = mesh_->dof_of_node(e[0]);
      const int b = mesh_->dof_of_node(e[1]);
      if (a >= 0) triplets.emplace_back(a, a, k);
      if (b >= 0) triplets.emplace_back(b, b, k);
      if (a >= 0 && b >= 0) {
        triplets.emplace_back(a, b, -k);
        triplets.emplace_back(b, a, -k);
      }
    }
  } else {
    triplets.reserve(12 * n);
    for (const auto& e : mesh_->elements()) {
      std::array<std::array<double, 2>, 3> p;
      std::array<int, 3> dof;
      for (int v = 0; v < 3; ++v) {
        p[v] = mesh_->node_coordinate(e[v]);
        dof[v] = mesh_->dof_of_node(e[v]);
      }
      const double det = (p[1][0] - p[0][0]) * (p[2][1] - p[0][1]) -
                         (p[2][0] - p[0][0]) * (p[1][1] - p[0][1]);
      if (det <= 0.0) throw Error("stiffness: degenerate element");
      const double area = 0.5 * det;
      // Barycentric gradients from opposite edges.
      std::array<double, 3> bx, by;
      for (int v = 0; v < 3; ++v) {
        const auto& pj = p[(v + 1) % 3];
        const auto& pk = p[(v + 2) % 3];
        bx[v] = (pj[1] - pk[1]) / det;
        by[v] = (pk[0] - pj[0]) / det;
      }
      for (int a = 0; a < 3; ++a) {
        if (dof[a] < 0) continue;
        for (int b = 0; b < 3; ++b) {
          if (dof[b] < 0) continue;
          const double kab = area * (bx[a] * bx[b] + by[a] * by[b]);
          triplets.emplace_back(dof[a], dof[b], kab);
        }
      }
    }
  }

  matrix_.resize(n, n);
  matrix_.setFromTriplets(triplets.begin(), triplets.end());
  matrix_.makeCompressed();

  llt_ = std::make_unique<Eigen::SimplicialLLT<Eigen::SparseMatrix<double>>>();
  llt_->compute(matrix_);
  if (llt_->info() != Eigen::Success) {
    throw Error("stiffness: Cholesky factorization failed");
  }
}

Eigen::VectorXd StiffnessForm::apply(const Eigen::VectorXd& u) const {
  if (u.size() != matrix_.rows()) {
    throw Error("stiffness: dimension mismatch in apply");
  }
  return matrix_ * u;
}

double StiffnessForm::inner(const GridFunction& u, const GridFunction& v) const {
  if (u.mesh.get() != mesh_.get() || v.mesh.get() != mesh_.get()) {
    throw Error("stiffness: grid function mesh mismatch");
  }
  return u.values.dot(matrix_ * v.values);
}

double StiffnessForm::norm_sq(const GridFunction& u) const {
  return inner(u, u);
}

Eigen::VectorXd StiffnessForm::solve(const Eigen::VectorXd& rhs) const {
  if (rhs.size() != matrix_.rows()) {
    throw Error("stiffness: dimension mismatch in solve");
  }
  return llt_->solve(rhs);
}

double StiffnessForm::dual_norm_sq(const Eigen::VectorXd& rhs) const {
  return rhs.dot(solve(rhs));
}

std::shared_ptr<const StiffnessForm> assemble_stiffness(
    std::shared_ptr<const Mesh> mesh) {
  return std::make_shared<StiffnessForm>(std::move(mesh));
}

double h01_norm_sq(const StiffnessForm& q, const GridFunction& u) {
  return q.norm_sq(u);
}

double integrate_composed(const GridFunction& u,
                          const std::function<double(double)>& g) {
  const Mesh& mesh = *u.mesh;
  double acc = 0.0;
  for (int d = 0; d < mesh.interior_dof_count(); ++d) {
    acc += mesh.lumped_weights()[d] * g(u.values[d]);
  }
  // Boundary nodes carry the remaining quadrature mass at value zero.
  acc += (mesh.measure() - mesh.interior_weight_sum()) * g(0.0);
  return acc;
}

Eigen::VectorXd assemble_load(const GridFunction& u,
                              const std::function<double(double)>& g) {
  const Mesh& mesh = *u.mesh;
  Eigen::VectorXd b(mesh.interior_dof_count());
  for (int d = 0; d < mesh.interior_dof_count(); ++d) {
    b[d] = mesh.lumped_weights()[d] * g(u.values[d]);
  }
  return b;
}

double weak_residual(const StiffnessForm& q, const GridFunction& u,
                     double coeff, const std::function<double(double)>& g) {
  if (u.mesh.get() != &q.mesh()) {
    throw Error("weak residual: grid function mesh mismatch");
  }
  const Eigen::VectorXd r = coeff * q.apply(u.values) - assemble_load(u, g);
  return std::sqrt(q.dual_norm_sq(r));
}

GridFunction clipped(const GridFunction& u, double lo, double hi) {
  if (!(lo <= hi)) throw Error("clip: empty interval");
  GridFunction out = u;
  for (int i = 0; i < out.values.size(); ++i) {
    out.values[i] = std::min(hi, std::max(lo, out.values[i]));
  }
  return out;
}

}  // namespace kirchpass
