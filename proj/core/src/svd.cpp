#include "pcgcn/svd.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

namespace pcgcn {
namespace {

using ColMatrix = Eigen::MatrixXd;

ColMatrix orthonormalize(const ColMatrix& y) {
  Eigen::HouseholderQR<ColMatrix> qr(y);
  return qr.householderQ() * ColMatrix::Identity(y.rows(), y.cols());
}

}  // namespace

SvdResult truncated_svd(const SparseMatrix& a, const SvdOptions& options) {
  if (options.dim < 1) throw std::invalid_argument("svd: dim must be >= 1");
  if (a.rows() != a.cols()) throw std::invalid_argument("svd: matrix must be square");
  const Eigen::Index n = a.rows();
  const Eigen::Index want = std::min<Eigen::Index>(options.dim, n);
  const Eigen::Index block = std::min<Eigen::Index>(n, want + std::max(options.oversample, 0));

  SvdResult result;
  result.vectors = Matrix::Zero(n, options.dim);
  result.values = Vector::Zero(options.dim);
  if (n == 0) return result;

  Rng rng(options.seed);
  ColMatrix q(n, block);
  for (Eigen::Index j = 0; j < block; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) q(i, j) = 2.0 * uniform01(rng) - 1.0;
  }
  q = orthonormalize(q);

  // For a symmetric matrix the left singular vectors are eigenvectors ordered
  // by |eigenvalue|, so plain subspace iteration on A suffices.
  ColMatrix ritz;
  Vector theta;
  for (int iter = 1; iter <= options.max_iterations; ++iter) {
    const ColMatrix aq = a * q;
    const ColMatrix b = q.transpose() * aq;
    Eigen::SelfAdjointEigenSolver<ColMatrix> eig(0.5 * (b + b.transpose()));
    std::vector<Eigen::Index> order(static_cast<std::size_t>(block));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](Eigen::Index x, Eigen::Index y) {
      return std::abs(eig.eigenvalues()(x)) > std::abs(eig.eigenvalues()(y));
    });
    ColMatrix s(block, block);
    theta.resize(block);
    for (Eigen::Index j = 0; j < block; ++j) {
      s.col(j) = eig.eigenvectors().col(order[static_cast<std::size_t>(j)]);
      theta(j) = eig.eigenvalues()(order[static_cast<std::size_t>(j)]);
    }
    ritz = q * s;
    const ColMatrix residual = aq * s - ritz * theta.asDiagonal();
    const double scale = std::max(std::abs(theta(0)), 1e-300);
    double worst = 0.0;
    for (Eigen::Index j = 0; j < want; ++j) worst = std::max(worst, residual.col(j).norm() / scale);
    result.iterations = iter;
    if (worst <= options.tolerance || block == n || theta.cwiseAbs().maxCoeff() == 0.0) break;
    if (iter == options.max_iterations) {
      std::ostringstream msg;
      msg << "svd: no convergence to tolerance " << options.tolerance << " after " << options.max_iterations
          << " iterations (residual " << worst << ")";
      throw std::runtime_error(msg.str());
    }
    q = orthonormalize(a * ritz);
  }

  for (Eigen::Index j = 0; j < want; ++j) {
    Vector v = ritz.col(j);
    Eigen::Index arg = 0;
    for (Eigen::Index i = 1; i < n; ++i) {
      if (std::abs(v(i)) > std::abs(v(arg))) arg = i;
    }
    if (v(arg) < 0) v = -v;
    result.vectors.col(j) = v;
    result.values(j) = std::abs(theta(j));
  }
  return result;
}

Matrix svd_features(const Graph& g, const SvdOptions& options) {
  return truncated_svd(adjacency_matrix(g), options).vectors;
}

}  // namespace pcgcn
