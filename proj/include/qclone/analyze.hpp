#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string>

#include "qclone/rng.hpp"
#include "qclone/solve.hpp"

namespace qclone {

// F_n = <psi|R_n|psi> for each clone.
std::vector<double> per_clone_fidelities(const PureState& psi,
                                         const CloningTask& task);

// Closed-form per-clone fidelities of a 1->N universal state with real
// subspace coefficients beta (any scaling; the exact normalization is applied
// internally).
std::vector<double> per_clone_from_beta(std::size_t d,
                                        const std::vector<double>& beta);

// Fidelity <-> singlet fraction conversion, p = (F (d+1) - 1) / d.
double singlet_fraction(double fidelity, std::size_t d);
double fidelity_of_singlet_fraction(double p, std::size_t d);

// Slack of the singlet-monogamy inequality: nonnegative iff satisfied.
double monogamy_slack_1N(const std::vector<double>& p, std::size_t d);

// Slack of the (N-1)->N fidelity trade-off: nonnegative iff satisfied.
double tradeoff_slack_NminusOne(const std::vector<double>& f);

struct ChshMonogamy {
  double lambda = 0.0;         // (1 + sqrt(a1^2 + a2^2)) / 2
  double weighted_bound = 0.0; // 4 sqrt(2) (lambda - 1/2)
  double dense_lambda = 0.0;   // cross-check from the 8x8 R
};
ChshMonogamy chsh_monogamy(double alpha1, double alpha2);

// Economy classification of the optimal cloner.
struct EconomyReport {
  enum class Kind { Economical, Ancilla };

  Kind kind = Kind::Economical;
  std::size_t ancilla_dim = 1;  // Hilbert dimension of the required ancilla
  bool heuristic = false;       // result from the search fallback, not a
                                // constructive argument
  std::optional<PureState> pure_witness;
  std::vector<PureState> mixture_states;
  std::vector<double> mixture_probs;
  std::vector<double> schmidt_spectrum;  // pure witness / best pure candidate
  double input_marginal_residual = 0.0;
  double eigenspace_residual = 0.0;
  double heuristic_deviation = std::numeric_limits<double>::quiet_NaN();
  double fidelity = 0.0;
};

EconomyReport economy_report(const CloningTask& task,
                             std::uint64_t seed = 0x5eed5eedULL,
                             const SolveOptions& opts = {});

// Equal mixture of the two optimal (N-1)->N states; its input marginal is
// exactly maximally mixed.
struct MnMixture {
  PureState psi0, psi1;
  double marginal_residual = 0.0;
};
MnMixture mn_mixture_witness(std::size_t m, std::size_t n, const Weights& alpha);

// One point of a fidelity trade-off sweep.
struct TradeoffRecord {
  Weights alpha;
  std::vector<double> fidelities;
  std::optional<std::vector<double>> singlet_fractions;
  std::optional<double> slack;
  bool failed = false;
  std::string error;
};

// A task with the weights left open.
struct TaskFamily {
  TaskKind kind = TaskKind::UniversalQudit;
  std::size_t d = 2, n = 2, m = 1;
  double gamma = 0.0;

  static TaskFamily of(const CloningTask& task);
  CloningTask with_weights(Weights w) const;
};

std::vector<TradeoffRecord> pareto_sweep(const TaskFamily& family,
                                         const std::vector<Weights>& grid,
                                         std::size_t threads = 1,
                                         const SolveOptions& opts = {});

// Largest deviation of a Schmidt spectrum from the maximally entangled one.
double schmidt_uniform_deviation(const std::vector<double>& schmidt,
                                 std::size_t d_in);

}  // namespace qclone
