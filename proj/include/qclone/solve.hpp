#pragma once

#include <optional>
#include <string>

#include "qclone/tasks.hpp"

namespace qclone {

enum class Method { Auto, Dense, Blocked, Subspace, ClosedForm };

std::string to_string(Method m);
std::optional<Method> method_from_string(const std::string& s);

struct SolveOptions {
  std::size_t dense_cap = kDenseEigCap;
  std::size_t blocked_qubit_cap = 16;      // clone cap for the qubit variants
  std::size_t block_dense_threshold = 512; // larger sector blocks use Lanczos
  double degeneracy_tol = 1e-9;            // relative
  std::size_t lanczos_max_iter = 600;
  double lanczos_tol = 1e-12;
};

// Result of one optimal-fidelity computation.
struct FidelityReport {
  CloningTask task;
  Method method = Method::Dense;
  double fidelity = 0.0;
  std::vector<double> per_clone;
  std::optional<double> lambda_sub;  // dominant eigenvalue of the reduced matrix
  std::size_t degeneracy = 0;        // top-eigenspace dimension (0 = not computed)
  double residual = 0.0;
  std::optional<long> sector;        // blocked route: reporting sector label
};

struct BlockedResult {
  double value = 0.0;
  PureState vector;
  long sector = 0;
  std::size_t degeneracy = 0;
  double residual = 0.0;
};

// Reduced-subspace solve for the universal and M->N variants. beta is the
// dominant eigenvector of the coefficient matrix (nonnegative, unit 2-norm),
// indexed over kept clones / weight-M strings.
struct SubspaceSolution {
  SubspaceProblem problem;
  double lambda = 0.0;
  std::vector<double> beta;
  double fidelity = 0.0;
  double residual = 0.0;
};

// Symmetric qubit-star fidelity as a function of the concentration Gamma;
// evaluates the excitation-sector maximum in the singularity-free form, so
// Gamma = 0 is exact.
double symmetric_star_fidelity(double gamma, std::size_t n);

// Analytic optimal fidelity where a closed form is known (symmetric weights).
std::optional<double> closed_form_fidelity(const CloningTask& task);

SubspaceSolution solve_subspace(const CloningTask& task);

// Per-sector diagonalization under the conserved J_Z grading; the global
// maximum is reported with the smallest-|M_Z| sector attaining it. Sector
// blocks above the dense threshold are solved by Lanczos iteration with full
// reorthogonalization.
BlockedResult blocked_max_eigenpair(const CloningTask& task,
                                    const SolveOptions& opts = {});

FidelityReport optimal_fidelity(const CloningTask& task,
                                Method method = Method::Auto,
                                const SolveOptions& opts = {});

// Smallest eigenvector entry (after phase fixing) of each sector's dominant
// eigenvector; nonnegativity of these is the Perron-Frobenius property of
// the sector blocks.
struct SectorPerron {
  long label = 0;
  double min_real = 0.0;
  double max_imag = 0.0;
};
std::vector<SectorPerron> sector_perron_entries(const CloningTask& task,
                                                const SolveOptions& opts = {});

// Expand a kept-clone beta vector back to one entry per clone (zeros for the
// dropped clones), in clone order.
std::vector<double> expand_beta(const std::vector<double>& beta,
                                const std::vector<std::size_t>& clone_ids,
                                std::size_t n);

}  // namespace qclone
