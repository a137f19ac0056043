#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <mutex>

#include "smoothbench/error.hpp"
#include "smoothbench/smoothers.hpp"

namespace smoothbench {

namespace {

// Cubic regression spline basis parameterized by the function values at k evenly spaced
// knots on [0, n-1], with natural end conditions, plus its wiggliness penalty
// S = D^T B^-1 D (so beta^T S beta = int f''^2).
struct SplineBasis {
  Eigen::MatrixXd design;   // n x k
  Eigen::MatrixXd gram;     // X^T X
  Eigen::MatrixXd penalty;  // S
  // Joint diagonalization for the GCV path: fitted = G diag(1 / (1 + lambda ev)) G^T y.
  Eigen::MatrixXd g;
  Eigen::VectorXd eigenvalues;
};

SplineBasis build_basis(int n, int k) {
  const double h = static_cast<double>(n - 1) / (k - 1);
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(k - 2, k);
  Eigen::MatrixXd b = Eigen::MatrixXd::Zero(k - 2, k - 2);
  for (int i = 0; i < k - 2; ++i) {
    d(i, i) = 1.0 / h;
    d(i, i + 1) = -2.0 / h;
    d(i, i + 2) = 1.0 / h;
    b(i, i) = 2.0 * h / 3.0;
    if (i + 1 < k - 2) {
      b(i, i + 1) = h / 6.0;
      b(i + 1, i) = h / 6.0;
    }
  }
  const Eigen::LDLT<Eigen::MatrixXd> bfac(b);
  Eigen::MatrixXd f = Eigen::MatrixXd::Zero(k, k);  // knot second derivatives = F beta
  f.block(1, 0, k - 2, k) = bfac.solve(d);

  SplineBasis basis;
  basis.penalty = d.transpose() * bfac.solve(d);
  basis.design.resize(n, k);
  for (int i = 0; i < n; ++i) {
    const double x = i;
    const int j = std::min(static_cast<int>(std::floor(x / h)), k - 2);
    const double left = j * h, right = (j + 1) * h;
    const double am = (right - x) / h, ap = (x - left) / h;
    const double cm = ((right - x) * (right - x) * (right - x) / h - h * (right - x)) / 6.0;
    const double cp = ((x - left) * (x - left) * (x - left) / h - h * (x - left)) / 6.0;
    Eigen::RowVectorXd row = cm * f.row(j) + cp * f.row(j + 1);
    row(j) += am;
    row(j + 1) += ap;
    basis.design.row(i) = row;
  }
  basis.gram = basis.design.transpose() * basis.design;

  Eigen::MatrixXd ridge = basis.gram;
  ridge.diagonal().array() += 1e-12 * basis.gram.trace() / k;
  const Eigen::LLT<Eigen::MatrixXd> chol(ridge);
  const Eigen::MatrixXd linv = chol.matrixL().solve(Eigen::MatrixXd::Identity(k, k));
  Eigen::MatrixXd m = linv * basis.penalty * linv.transpose();
  m = 0.5 * (m + m.transpose());
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(m);
  basis.eigenvalues = eig.eigenvalues().cwiseMax(0.0);
  basis.g = basis.design * linv.transpose() * eig.eigenvectors();
  return basis;
}

// Depends only on (n, k), so it is shared across calls.
const SplineBasis& cached_basis(int n, int k) {
  static std::mutex mutex;
  static std::map<std::pair<int, int>, std::unique_ptr<SplineBasis>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[{n, k}];
  if (!slot) slot = std::make_unique<SplineBasis>(build_basis(n, k));
  return *slot;
}

struct GcvPoint {
  double gcv;
  double rss;
  double edf;
};

}  // namespace

GamFit gam_smooth(std::span<const double> y, int basis_dim, double log10_lambda, bool auto_lambda) {
  const int n = static_cast<int>(y.size());
  if (n < 4) throw Error(ErrorKind::SeriesTooShort, "GAM needs at least 4 samples");
  if (basis_dim < 4) throw Error(ErrorKind::InvalidParams, "GAM basis dimension must be at least 4");
  const int k = std::min(basis_dim, n);
  const SplineBasis& basis = cached_basis(n, k);
  const Eigen::Map<const Eigen::VectorXd> yv(y.data(), n);

  const Eigen::VectorXd b = basis.g.transpose() * yv;
  const double rss0 = (yv - basis.g * b).squaredNorm();
  auto evaluate = [&](double log_lambda) {
    const double lambda = std::pow(10.0, log_lambda);
    double rss = rss0, edf = 0.0;
    for (int i = 0; i < k; ++i) {
      const double s = 1.0 / (1.0 + lambda * basis.eigenvalues(i));
      rss += (1.0 - s) * (1.0 - s) * b(i) * b(i);
      edf += s;
    }
    const double denom = n - edf;
    const double gcv = denom > 1e-8 ? n * rss / (denom * denom) : std::numeric_limits<double>::infinity();
    return GcvPoint{gcv, rss, edf};
  };

  GamFit fit;
  if (auto_lambda) {
    double best = 0.0;
    double best_gcv = std::numeric_limits<double>::infinity();
    constexpr double lo = -6.0, hi = 6.0, step = 0.1;
    for (int i = 0; lo + i * step <= hi + 1e-9; ++i) {
      const double l = lo + i * step;
      const double v = evaluate(l).gcv;
      if (v < best_gcv) {
        best_gcv = v;
        best = l;
      }
    }
    // Golden-section refinement inside the bracketing grid cells.
    double a = std::max(lo, best - step), c = std::min(hi, best + step);
    const double ratio = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = c - ratio * (c - a), x2 = a + ratio * (c - a);
    double f1 = evaluate(x1).gcv, f2 = evaluate(x2).gcv;
    for (int it = 0; it < 40; ++it) {
      if (f1 <= f2) {
        c = x2;
        x2 = x1;
        f2 = f1;
        x1 = c - ratio * (c - a);
        f1 = evaluate(x1).gcv;
      } else {
        a = x1;
        x1 = x2;
        f1 = f2;
        x2 = a + ratio * (c - a);
        f2 = evaluate(x2).gcv;
      }
    }
    const double refined = 0.5 * (a + c);
    if (evaluate(refined).gcv < best_gcv) best = refined;
    log10_lambda = best;

    const double lambda = std::pow(10.0, log10_lambda);
    Eigen::VectorXd scaled = b;
    for (int i = 0; i < k; ++i) scaled(i) /= (1.0 + lambda * basis.eigenvalues(i));
    const Eigen::VectorXd fitted = basis.g * scaled;
    fit.fitted.assign(fitted.data(), fitted.data() + n);
  } else {
    const double lambda = std::pow(10.0, log10_lambda);
    const Eigen::MatrixXd system = basis.gram + lambda * basis.penalty;
    const Eigen::VectorXd beta = system.ldlt().solve(basis.design.transpose() * yv);
    const Eigen::VectorXd fitted = basis.design * beta;
    fit.fitted.assign(fitted.data(), fitted.data() + n);
  }
  const auto summary = evaluate(log10_lambda);
  fit.lambda = std::pow(10.0, log10_lambda);
  fit.edf = summary.edf;
  fit.gcv = summary.gcv;
  return fit;
}

}  // namespace smoothbench
