#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "bhcone/hamiltonian.hpp"

namespace bhcone {

struct SpectrumResult {
  BasisPtr basis;
  std::vector<double> eigenvalues;              // ascending
  std::vector<Eigen::VectorXcd> eigenvectors;   // orthonormal
  std::vector<double> residuals;                // ||H v - lambda v||
  int iterations = 0;

  std::size_t size() const { return eigenvalues.size(); }
  SectorVector eigenvector(std::size_t k) const { return {basis, eigenvectors.at(k)}; }
  // E_1 - E_0, or 0 when only one eigenvalue is known.
  double gap() const;
};

inline constexpr std::ptrdiff_t kDenseDimensionCap = 4096;

// Full spectrum by dense Hermitian diagonalization.
SpectrumResult dense_spectrum(const SparseOperator& op,
                              std::ptrdiff_t dimension_cap = kDenseDimensionCap);

struct LanczosOptions {
  int k = 6;              // clipped to the dimension
  double tol = 1e-10;     // residual target relative to the norm bound
  int max_iter = 2000;    // Krylov steps per locked eigenpair
  std::uint64_t seed = 0;
};

class LanczosNonConvergence : public std::runtime_error {
 public:
  LanczosNonConvergence(const std::string& what, SpectrumResult best)
      : std::runtime_error(what), best_(std::move(best)) {}
  const SpectrumResult& best() const { return best_; }

 private:
  SpectrumResult best_;
};

// Lowest k eigenpairs. Each pass runs Lanczos with full reorthogonalization
// from a random start orthogonal to the pairs already locked, and locks the
// lowest Ritz pair once its residual is below tol * ||H||. Restarting in the
// orthogonal complement is what lets degenerate copies appear one at a time.
SpectrumResult lanczos_lowest(const SparseOperator& op, const LanczosOptions& options = {});

struct Degeneracy {
  int count = 1;
  bool underdetermined = false;  // fewer than two eigenvalues were available
};

// Number of eigenvalues within tol of the minimum.
Degeneracy degeneracy_count(const SpectrumResult& result, double tol);

inline double default_degeneracy_tolerance(double ground_energy) {
  return 1e-8 * std::max(1.0, std::abs(ground_energy));
}

// Dense for small sectors, Lanczos above `dense_threshold`.
SpectrumResult lowest_eigenpairs(const SparseOperator& op, int k, std::uint64_t seed = 0,
                                 std::ptrdiff_t dense_threshold = 512);

}  // namespace bhcone
