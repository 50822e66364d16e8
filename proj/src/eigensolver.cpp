#include "bhcone/eigensolver.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <string>

namespace bhcone {

namespace {

double residual_of(const SparseOperator& op, const Eigen::VectorXcd& v, double lambda) {
  return (op.apply(v) - lambda * v).norm();
}

void orthogonalize(Eigen::VectorXcd& w, const std::vector<Eigen::VectorXcd>& basis) {
  for (const auto& q : basis) w -= q * q.dot(w);
}

SpectrumResult sorted(SpectrumResult r) {
  std::vector<std::size_t> order(r.eigenvalues.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return r.eigenvalues[a] < r.eigenvalues[b]; });
  SpectrumResult out;
  out.basis = r.basis;
  out.iterations = r.iterations;
  for (auto k : order) {
    out.eigenvalues.push_back(r.eigenvalues[k]);
    out.eigenvectors.push_back(std::move(r.eigenvectors[k]));
    out.residuals.push_back(r.residuals[k]);
  }
  return out;
}

}  // namespace

double SpectrumResult::gap() const {
  return eigenvalues.size() < 2 ? 0.0 : eigenvalues[1] - eigenvalues[0];
}

SpectrumResult dense_spectrum(const SparseOperator& op, std::ptrdiff_t dimension_cap) {
  if (op.dimension() > dimension_cap)
    throw SectorTooLarge("dense diagonalization capped at dimension " + std::to_string(dimension_cap));

  const Eigen::MatrixXcd h = op.to_dense();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
  if (es.info() != Eigen::Success) throw std::runtime_error("dense diagonalization failed");

  SpectrumResult out;
  out.basis = op.basis();
  for (Eigen::Index k = 0; k < h.rows(); ++k) {
    const double lambda = es.eigenvalues()[k];
    Eigen::VectorXcd v = es.eigenvectors().col(k);
    out.eigenvalues.push_back(lambda);
    out.residuals.push_back((h * v - lambda * v).norm());
    out.eigenvectors.push_back(std::move(v));
  }
  return out;
}

SpectrumResult lanczos_lowest(const SparseOperator& op, const LanczosOptions& options) {
  const std::ptrdiff_t n = op.dimension();
  if (options.k < 1) throw std::invalid_argument("lanczos_lowest needs k >= 1");
  if (n == 0) throw std::invalid_argument("lanczos_lowest on an empty operator");
  const std::ptrdiff_t k = std::min<std::ptrdiff_t>(options.k, n);
  const double hnorm = std::max(op.norm_bound(), 1e-300);
  const double target = options.tol * hnorm;

  std::mt19937_64 rng(options.seed);
  std::normal_distribution<double> gauss;

  SpectrumResult locked;
  locked.basis = op.basis();

  while (static_cast<std::ptrdiff_t>(locked.size()) < k) {
    const std::ptrdiff_t remaining = n - static_cast<std::ptrdiff_t>(locked.size());

    Eigen::VectorXcd start(n);
    double start_norm = 0.0;
    for (int attempt = 0; attempt < 8 && start_norm < 1e-8; ++attempt) {
      for (std::ptrdiff_t i = 0; i < n; ++i) start[i] = cplx(gauss(rng), gauss(rng));
      orthogonalize(start, locked.eigenvectors);
      orthogonalize(start, locked.eigenvectors);
      start_norm = start.norm();
    }
    if (start_norm < 1e-8) throw std::runtime_error("lanczos: cannot draw a start vector in the complement");

    std::vector<Eigen::VectorXcd> krylov{start / start_norm};
    std::vector<double> alpha;
    std::vector<double> beta;

    bool done = false;
    double best_theta = 0.0;
    Eigen::VectorXcd best_vector = krylov.front();
    double best_residual = std::numeric_limits<double>::infinity();

    for (int j = 0; j < options.max_iter && !done; ++j) {
      ++locked.iterations;
      Eigen::VectorXcd w = op.apply(krylov[j]);
      alpha.push_back(krylov[j].dot(w).real());
      w -= alpha.back() * krylov[j];
      if (j > 0) w -= beta.back() * krylov[j - 1];
      for (int pass = 0; pass < 2; ++pass) {
        orthogonalize(w, locked.eigenvectors);
        orthogonalize(w, krylov);
      }
      const double b = w.norm();

      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> tri;
      const Eigen::VectorXd diag = Eigen::Map<const Eigen::VectorXd>(alpha.data(), alpha.size());
      const Eigen::VectorXd sub = Eigen::Map<const Eigen::VectorXd>(beta.data(), beta.size());
      tri.computeFromTridiagonal(diag, sub);
      const Eigen::VectorXd s = tri.eigenvectors().col(0);
      const double estimate = std::abs(b * s[j]);
      const bool exhausted = b <= 1e-12 * hnorm || j + 1 >= remaining;

      if (estimate <= target || exhausted || j + 1 == options.max_iter) {
        Eigen::VectorXcd y = Eigen::VectorXcd::Zero(n);
        for (int i = 0; i <= j; ++i) y += s[i] * krylov[i];
        orthogonalize(y, locked.eigenvectors);
        y.normalize();
        const double theta = y.dot(op.apply(y)).real();
        const double res = residual_of(op, y, theta);
        if (res < best_residual) {
          best_residual = res;
          best_theta = theta;
          best_vector = y;
        }
        if (res <= target || exhausted) {
          done = true;
          break;
        }
      }
      krylov.push_back(w / b);
      beta.push_back(b);
    }

    locked.eigenvalues.push_back(best_theta);
    locked.eigenvectors.push_back(best_vector);
    locked.residuals.push_back(best_residual);
    if (!done) {
      throw LanczosNonConvergence("lanczos: eigenpair " + std::to_string(locked.size() - 1) +
                                      " not converged after " + std::to_string(options.max_iter) +
                                      " steps (residual " + std::to_string(best_residual) + ")",
                                  sorted(std::move(locked)));
    }
  }
  return sorted(std::move(locked));
}

Degeneracy degeneracy_count(const SpectrumResult& result, double tol) {
  Degeneracy d;
  if (result.eigenvalues.empty()) return d;
  d.underdetermined = result.eigenvalues.size() < 2;
  const double e0 = *std::min_element(result.eigenvalues.begin(), result.eigenvalues.end());
  d.count = static_cast<int>(std::count_if(result.eigenvalues.begin(), result.eigenvalues.end(),
                                           [&](double e) { return e - e0 <= tol; }));
  return d;
}

SpectrumResult lowest_eigenpairs(const SparseOperator& op, int k, std::uint64_t seed,
                                 std::ptrdiff_t dense_threshold) {
  if (op.dimension() <= dense_threshold) {
    SpectrumResult full = dense_spectrum(op);
    const std::size_t keep = std::min<std::size_t>(std::max(k, 1), full.size());
    full.eigenvalues.resize(keep);
    full.eigenvectors.resize(keep);
    full.residuals.resize(keep);
    return full;
  }
  LanczosOptions options;
  options.k = k;
  options.seed = seed;
  return lanczos_lowest(op, options);
}

}  // namespace bhcone
