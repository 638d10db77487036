#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qclone/dense.hpp"

namespace qclone {

// Convex asymmetry weights over the clones.
struct Weights {
  std::vector<double> alpha;

  explicit Weights(std::vector<double> a);
  static Weights symmetric(std::size_t n);
  static Weights unit(std::size_t n, std::size_t which);  // e_which (1-based)

  std::size_t size() const { return alpha.size(); }
  bool is_symmetric(double tol = 1e-12) const;
};

enum class TaskKind {
  UniversalQudit,
  StateDependentQubit,
  Equatorial,
  ManyToN,
  ChshPair,
};

std::string to_string(TaskKind k);

// One cloning problem: variant, dimensions and asymmetry weights.
struct CloningTask {
  TaskKind kind;
  std::size_t d;     // qudit dimension (2 for the qubit variants)
  std::size_t n;     // number of clones
  std::size_t m;     // input copies (ManyToN only)
  double gamma;      // concentration parameter (StateDependentQubit only)
  Weights weights;

  static CloningTask universal(std::size_t d, std::size_t n, Weights w);
  static CloningTask universal(std::size_t d, std::size_t n);  // symmetric
  static CloningTask state_dependent(double gamma, std::size_t n, Weights w);
  static CloningTask state_dependent(double gamma, std::size_t n);
  static CloningTask equatorial(std::size_t n, Weights w);
  static CloningTask equatorial(std::size_t n);
  static CloningTask many_to_n(std::size_t m, std::size_t n, Weights w);
  static CloningTask many_to_n(std::size_t m, std::size_t n);
  static CloningTask chsh_pair(Weights w);

  std::size_t input_dim() const;  // d for 1->N variants, m+1 for ManyToN
  std::vector<std::size_t> space_dims() const;
  std::size_t space_dim() const;
  // Effective concentration for the qubit-star variants (Equatorial and
  // ChshPair sit at 1/4).
  double coupling_gamma() const;
};

// phi-independent input distribution over the Bloch sphere; density f(theta)
// with respect to d(theta) d(phi).
struct Distribution {
  enum class Preset { UniformSphere, Equator, Poles, Belt, Knots };

  Preset preset = Preset::UniformSphere;
  double belt_lo = 0.0, belt_hi = 0.0;
  std::vector<std::pair<double, double>> knots;  // (theta, f) ascending

  static Distribution uniform_sphere();
  static Distribution equator();
  static Distribution poles();
  static Distribution belt(double theta_lo, double theta_hi);
  static Distribution from_knots(std::vector<std::pair<double, double>> knots);

  bool is_dirac() const {
    return preset == Preset::Equator || preset == Preset::Poles;
  }
};

// Concentration parameter Gamma = (1/4) integral f sin^2(theta).
// Throws std::invalid_argument when the distribution is not normalized
// within 1e-8.
double gamma_of(const Distribution& dist);

// The four integrals that must vanish for the qubit R parametrization to
// apply. phi-dependent integrals vanish identically here; the first entry
// is |integral f cos(theta)|.
std::array<double, 4> validate_phase_covariance(const Distribution& dist);

// ---------------------------------------------------------------------------
// Cloning operators
// ---------------------------------------------------------------------------

// Two-site coupling between the input factor and one clone.
struct CouplingTerm {
  std::size_t clone;  // 1-based clone index; acts on factors (0, clone)
  ComplexMatrix op;   // (d_in * d) x (d_in * d), Hermitian
};

// R as an identity coefficient plus input-clone couplings; applied sparsely
// or materialized densely.
struct TaskOperator {
  std::vector<std::size_t> dims;
  double identity_coeff = 0.0;
  std::vector<CouplingTerm> terms;

  std::size_t dim() const { return dims_product(dims); }
  void apply(std::span<const cplx> x, std::span<cplx> y) const;
  std::vector<cplx> apply(std::span<const cplx> x) const;
  double expectation(std::span<const cplx> psi) const;
  HermitianOperator dense(std::size_t side_cap = kDenseEigCap) const;
};

TaskOperator task_operator(const CloningTask& task);
// Single-clone fidelity operator R_n (1-based clone index).
TaskOperator clone_operator(const CloningTask& task, std::size_t clone);

HermitianOperator build_R(const CloningTask& task,
                          std::size_t side_cap = kDenseEigCap);

PureState bell_state(std::size_t d);

// ---------------------------------------------------------------------------
// Reduced subspace problems
// ---------------------------------------------------------------------------

// Reduced eigenproblem on the closed subspace spanned by the Bell-times-
// symmetric basis states; coeff is real nonnegative, gram is the (positive
// definite) basis overlap matrix.
struct SubspaceProblem {
  ComplexMatrix coeff;
  ComplexMatrix gram;
  std::vector<std::size_t> clone_ids;      // kept clones, 1-based (1->N variant)
  std::vector<std::uint64_t> bitstrings;   // weight-m strings (M->N variant)
};

// Eq.-(6)-type reduced matrix for 1->N universal qudit cloning. Zero-weight
// clones are dropped before construction.
SubspaceProblem subspace_matrix_1N(std::size_t d, std::size_t n,
                                   const Weights& alpha);

// Reduced matrix for M->N universal qubit cloning over weight-m bit strings.
SubspaceProblem subspace_matrix_MN(std::size_t m, std::size_t n,
                                   const Weights& alpha);

// ---------------------------------------------------------------------------
// Optimal-state embeddings
// ---------------------------------------------------------------------------

// Choice of the symmetric blank state |Phi> carried by the clone factors.
struct PhiChoice {
  enum class Kind { GhzType, DickeLadder, Custom };
  Kind kind = Kind::GhzType;
  std::optional<PureState> custom;

  static PhiChoice ghz() { return {Kind::GhzType, std::nullopt}; }
  static PhiChoice dicke() { return {Kind::DickeLadder, std::nullopt}; }
  static PhiChoice custom_state(PureState phi) {
    return {Kind::Custom, std::move(phi)};
  }
};

// |Psi> = sum_n beta_n |B>_{0,n} |Phi>, with beta rescaled to the exact
// normalization (sum beta)^2 + (d-1) sum beta^2 = d. The sector index picks
// the ladder state for the DickeLadder choice and is ignored otherwise.
PureState embed_state_1N(std::size_t d, std::size_t n, std::vector<double> beta,
                         std::size_t sector, const PhiChoice& phi);

// |Psi_i> = sum_x beta_x |psi_{x,i}> for M->N qubit cloning, normalized via
// the Gram matrix.
PureState embed_state_MN(std::size_t m, std::size_t n, std::vector<double> beta,
                         std::size_t sector);

// Weight-m bit strings over n clones, ascending integer order, clone 1 at the
// most significant bit.
std::vector<std::uint64_t> weight_m_strings(std::size_t m, std::size_t n);

std::uint64_t binomial(std::size_t n, std::size_t k);

}  // namespace qclone
