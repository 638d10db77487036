#include "qclone/solve.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>

#include "qclone/analyze.hpp"
#include "qclone/spin.hpp"

namespace qclone {

namespace {

void require(bool cond, const char* msg) {
  if (!cond) throw std::invalid_argument(msg);
}

bool is_qubit_star(TaskKind k) {
  return k == TaskKind::StateDependentQubit || k == TaskKind::Equatorial ||
         k == TaskKind::ChshPair;
}

}  // namespace

std::string to_string(Method m) {
  switch (m) {
    case Method::Auto: return "auto";
    case Method::Dense: return "dense";
    case Method::Blocked: return "blocked";
    case Method::Subspace: return "subspace";
    case Method::ClosedForm: return "closed_form";
  }
  return "?";
}

std::optional<Method> method_from_string(const std::string& s) {
  if (s == "auto") return Method::Auto;
  if (s == "dense") return Method::Dense;
  if (s == "blocked") return Method::Blocked;
  if (s == "subspace") return Method::Subspace;
  if (s == "closed" || s == "closed_form") return Method::ClosedForm;
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Closed forms
// ---------------------------------------------------------------------------

double symmetric_star_fidelity(double gamma, std::size_t n) {
  require(gamma >= 0.0 && gamma <= 0.25, "Gamma must lie in [0, 1/4]");
  require(n >= 1, "need at least one clone");
  const double nn = static_cast<double>(n);
  const double gd = 0.5 * (1.0 - 4.0 * gamma);  // Gamma * Delta, finite at 0
  double best = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double a = 4.0 * static_cast<double>((i + 1) * (n - i));
    const double b = static_cast<double>(n) - 2.0 * static_cast<double>(i) - 1.0;
    best = std::max(best, std::sqrt(a * gamma * gamma + gd * gd * b * b));
  }
  return 0.5 + gd / nn + best / nn;
}

std::optional<double> closed_form_fidelity(const CloningTask& task) {
  if (!task.weights.is_symmetric()) return std::nullopt;
  const double nn = static_cast<double>(task.n);
  switch (task.kind) {
    case TaskKind::UniversalQudit:
      return 1.0 / nn +
             2.0 * (nn - 1.0) / (nn * static_cast<double>(task.d + 1));
    case TaskKind::StateDependentQubit:
      return symmetric_star_fidelity(task.gamma, task.n);
    case TaskKind::Equatorial:
      return symmetric_star_fidelity(0.25, task.n);
    case TaskKind::ChshPair:
      return symmetric_star_fidelity(0.25, 2);
    case TaskKind::ManyToN:
      if (task.m + 1 == task.n)
        return (nn * nn + nn - 1.0) / (nn * nn + nn);
      return std::nullopt;
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Reduced subspace route
// ---------------------------------------------------------------------------

std::vector<double> expand_beta(const std::vector<double>& beta,
                                const std::vector<std::size_t>& clone_ids,
                                std::size_t n) {
  std::vector<double> full(n, 0.0);
  for (std::size_t i = 0; i < clone_ids.size(); ++i)
    full[clone_ids[i] - 1] = beta[i];
  return full;
}

SubspaceSolution solve_subspace(const CloningTask& task) {
  SubspaceSolution sol;
  switch (task.kind) {
    case TaskKind::UniversalQudit:
      sol.problem = subspace_matrix_1N(task.d, task.n, task.weights);
      break;
    case TaskKind::ManyToN:
      sol.problem = subspace_matrix_MN(task.m, task.n, task.weights);
      break;
    default:
      throw std::invalid_argument(
          "the subspace route applies to the universal and M->N variants");
  }

  const RealEigenpair pair = general_max_real_eigenpair(sol.problem.coeff);
  sol.lambda = pair.value;
  sol.beta.resize(pair.vector.size());
  for (std::size_t i = 0; i < pair.vector.size(); ++i) {
    // Perron vector of a nonnegative matrix: real up to the fixed phase.
    sol.beta[i] = pair.vector[i].real();
    if (std::abs(pair.vector[i].imag()) > 1e-10)
      throw NumericalError("subspace eigenvector is not real",
                           std::abs(pair.vector[i].imag()));
  }

  // residual of the returned pair
  double res = 0.0, scale = std::max(1.0, std::abs(sol.lambda));
  const std::vector<cplx> mv = sol.problem.coeff.apply(pair.vector);
  for (std::size_t i = 0; i < mv.size(); ++i)
    res += std::norm(mv[i] - sol.lambda * pair.vector[i]);
  sol.residual = std::sqrt(res) / scale;

  sol.fidelity = task.kind == TaskKind::UniversalQudit
                     ? (1.0 + sol.lambda) / static_cast<double>(task.d + 1)
                     : sol.lambda;
  return sol;
}

// ---------------------------------------------------------------------------
// Blocked route
// ---------------------------------------------------------------------------

namespace {

// Sparse matrix of one J_Z sector in CSR-ish triplet form.
struct SectorMatrix {
  std::size_t size = 0;
  std::vector<std::vector<std::pair<std::uint32_t, cplx>>> rows;

  std::vector<cplx> apply(std::span<const cplx> x) const {
    std::vector<cplx> y(size, cplx{0.0});
    for (std::size_t r = 0; r < size; ++r) {
      cplx acc = 0.0;
      for (const auto& [c, v] : rows[r]) acc += v * x[c];
      y[r] = acc;
    }
    return y;
  }
};

SectorMatrix sector_matrix(const TaskOperator& op,
                           const std::vector<std::size_t>& indices,
                           const std::vector<std::int32_t>& pos) {
  SectorMatrix sm;
  sm.size = indices.size();
  sm.rows.assign(sm.size, {});
  for (std::size_t p = 0; p < sm.size; ++p)
    sm.rows[p].push_back({static_cast<std::uint32_t>(p), cplx{op.identity_coeff}});

  const auto strides = dim_strides(op.dims);
  for (const CouplingTerm& term : op.terms) {
    const std::size_t d0 = op.dims[0], dc = op.dims[term.clone];
    const std::size_t s0 = strides[0], sc = strides[term.clone];
    for (std::size_t q = 0; q < sm.size; ++q) {
      const std::size_t g = indices[q];
      const std::size_t a = (g / s0) % d0;
      const std::size_t b = (g / sc) % dc;
      const std::size_t col = a * dc + b;
      const std::size_t base = g - a * s0 - b * sc;
      for (std::size_t a2 = 0; a2 < d0; ++a2)
        for (std::size_t b2 = 0; b2 < dc; ++b2) {
          const cplx e = term.op(a2 * dc + b2, col);
          if (e == cplx{}) continue;
          const std::size_t dest = base + a2 * s0 + b2 * sc;
          const std::int32_t p = pos[dest];
          if (p < 0)
            throw NumericalError("operator leaks across J_Z sectors", std::abs(e));
          sm.rows[static_cast<std::size_t>(p)].push_back(
              {static_cast<std::uint32_t>(q), e});
        }
    }
  }
  return sm;
}

struct BlockEig {
  double value = -std::numeric_limits<double>::infinity();
  std::vector<cplx> vector;
  std::vector<double> eigenvalues;  // full block spectrum when solved densely
  bool dense = false;
};

BlockEig dense_block_eig(const SectorMatrix& sm) {
  ComplexMatrix b(sm.size, sm.size);
  for (std::size_t r = 0; r < sm.size; ++r)
    for (const auto& [c, v] : sm.rows[r]) b(r, c) += v;
  const Spectrum spec = hermitian_eig(HermitianOperator(std::move(b), {sm.size}));
  BlockEig out;
  out.value = spec.max_value;
  out.vector = spec.eigenvectors.column(sm.size - 1);
  out.eigenvalues = spec.eigenvalues;
  out.dense = true;
  return out;
}

// Lanczos with full reorthogonalization from the all-ones start vector. The
// sector blocks are entrywise nonnegative, so the start overlaps the Perron
// vector of every component and the global block maximum is always reached.
BlockEig lanczos_block_eig(const SectorMatrix& sm, std::size_t max_iter,
                           double tol) {
  const std::size_t n = sm.size;
  std::vector<std::vector<cplx>> basis;
  basis.emplace_back(n, cplx{1.0 / std::sqrt(static_cast<double>(n))});
  std::vector<double> alphas, betas;
  double theta = 0.0;
  std::vector<double> ritz;

  const std::size_t cap = std::min(max_iter, n);
  for (std::size_t j = 0;; ++j) {
    std::vector<cplx> w = sm.apply(basis[j]);
    const double alpha = vec_dot(basis[j], w).real();
    alphas.push_back(alpha);
    for (std::size_t i = 0; i < n; ++i) w[i] -= alpha * basis[j][i];
    if (j > 0)
      for (std::size_t i = 0; i < n; ++i) w[i] -= betas[j - 1] * basis[j - 1][i];
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& v : basis) {
        const cplx c = vec_dot(v, w);
        for (std::size_t i = 0; i < n; ++i) w[i] -= c * v[i];
      }
    const double beta = vec_norm(w);

    // Ritz values of the current tridiagonal.
    std::vector<double> diag = alphas;
    ComplexMatrix z = ComplexMatrix::identity(diag.size());
    detail::tql2(diag, betas, z);
    std::size_t top = 0;
    for (std::size_t i = 1; i < diag.size(); ++i)
      if (diag[i] > diag[top]) top = i;
    theta = diag[top];
    ritz.assign(diag.size(), 0.0);
    for (std::size_t i = 0; i < diag.size(); ++i) ritz[i] = z(i, top).real();

    const double res_est = beta * std::abs(ritz.back());
    const bool exhausted = beta <= 1e-14 || basis.size() == n;
    if (res_est <= tol * std::max(1.0, std::abs(theta)) || exhausted ||
        basis.size() >= cap) {
      std::vector<cplx> x(n, cplx{0.0});
      for (std::size_t i = 0; i < basis.size(); ++i)
        for (std::size_t k = 0; k < n; ++k) x[k] += ritz[i] * basis[i][k];
      vec_normalize(x);
      BlockEig out;
      out.value = theta;
      out.vector = std::move(x);
      return out;
    }
    for (std::size_t i = 0; i < n; ++i) w[i] /= beta;
    betas.push_back(beta);
    basis.push_back(std::move(w));
  }
}

struct SectorSolve {
  long label = 0;
  BlockEig eig;
};

std::vector<SectorSolve> solve_sectors(const CloningTask& task,
                                       const SolveOptions& opts,
                                       const TaskOperator& op) {
  if (is_qubit_star(task.kind) || task.kind == TaskKind::ManyToN) {
    if (task.n > opts.blocked_qubit_cap)
      throw SizeError("clone count exceeds the blocked qubit cap");
  }
  const std::size_t total = op.dim();
  if (total > kKronSideCap)
    throw SizeError("task dimension exceeds the configured cap");

  const SectorPartition part = sector_partition(op.dims, /*flipped_input=*/true);
  std::vector<std::int32_t> pos(total, -1);

  std::vector<SectorSolve> out;
  out.reserve(part.labels.size());
  for (std::size_t s = 0; s < part.labels.size(); ++s) {
    const auto& indices = part.groups[s];
    for (std::size_t p = 0; p < indices.size(); ++p)
      pos[indices[p]] = static_cast<std::int32_t>(p);
    const SectorMatrix sm = sector_matrix(op, indices, pos);
    for (const std::size_t idx : indices) pos[idx] = -1;

    SectorSolve solve;
    solve.label = part.labels[s];
    solve.eig = sm.size <= opts.block_dense_threshold
                    ? dense_block_eig(sm)
                    : lanczos_block_eig(sm, opts.lanczos_max_iter,
                                        opts.lanczos_tol);
    out.push_back(std::move(solve));
  }
  return out;
}

}  // namespace

BlockedResult blocked_max_eigenpair(const CloningTask& task,
                                    const SolveOptions& opts) {
  const TaskOperator op = task_operator(task);
  const SectorPartition part = sector_partition(op.dims, true);
  const auto solves = solve_sectors(task, opts, op);

  double best = -std::numeric_limits<double>::infinity();
  for (const auto& s : solves) best = std::max(best, s.eig.value);
  const double cut = best - opts.degeneracy_tol * std::max(1.0, std::abs(best));

  // Reporting sector: smallest |M_Z| attaining the maximum; ties toward the
  // positive label.
  std::size_t pick = solves.size();
  std::size_t degeneracy = 0;
  for (std::size_t s = 0; s < solves.size(); ++s) {
    if (solves[s].eig.value < cut) continue;
    if (solves[s].eig.dense) {
      for (double ev : solves[s].eig.eigenvalues)
        if (ev >= cut) ++degeneracy;
    } else {
      ++degeneracy;
    }
    if (pick == solves.size() ||
        std::abs(solves[s].label) < std::abs(solves[pick].label) ||
        (std::abs(solves[s].label) == std::abs(solves[pick].label) &&
         solves[s].label > solves[pick].label))
      pick = s;
  }

  const auto& chosen = solves[pick];
  std::vector<cplx> full(op.dim(), cplx{0.0});
  for (std::size_t p = 0; p < part.groups[pick].size(); ++p)
    full[part.groups[pick][p]] = chosen.eig.vector[p];
  phase_fix_largest(full);

  // Residual of the expanded pair under the full operator.
  const std::vector<cplx> rv = op.apply(full);
  double res = 0.0;
  for (std::size_t i = 0; i < full.size(); ++i)
    res += std::norm(rv[i] - chosen.eig.value * full[i]);
  res = std::sqrt(res);
  if (res > 1e-9 * std::max(1.0, std::abs(chosen.eig.value)))
    throw NumericalError("blocked eigenpair residual too large", res);

  BlockedResult result{chosen.eig.value,
                       PureState(std::move(full), op.dims),
                       chosen.label, degeneracy, res};
  return result;
}

std::vector<SectorPerron> sector_perron_entries(const CloningTask& task,
                                                const SolveOptions& opts) {
  const TaskOperator op = task_operator(task);
  const auto solves = solve_sectors(task, opts, op);
  std::vector<SectorPerron> out;
  out.reserve(solves.size());
  for (const auto& s : solves) {
    std::vector<cplx> v = s.eig.vector;
    phase_fix_largest(v);
    SectorPerron sp;
    sp.label = s.label;
    sp.min_real = std::numeric_limits<double>::infinity();
    for (const cplx& x : v) {
      sp.min_real = std::min(sp.min_real, x.real());
      sp.max_imag = std::max(sp.max_imag, std::abs(x.imag()));
    }
    out.push_back(sp);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Entry point
// ---------------------------------------------------------------------------

FidelityReport optimal_fidelity(const CloningTask& task, Method method,
                                const SolveOptions& opts) {
  FidelityReport report{task, method, 0.0, {}, std::nullopt, 0, 0.0, std::nullopt};

  if (method == Method::Auto)
    method = task.space_dim() <= opts.dense_cap ? Method::Dense : Method::Blocked;
  report.method = method;

  const bool has_subspace =
      task.kind == TaskKind::UniversalQudit || task.kind == TaskKind::ManyToN;

  std::optional<PureState> vector;
  switch (method) {
    case Method::Dense: {
      const HermitianOperator r = build_R(task, opts.dense_cap);
      const Spectrum spec = hermitian_eig(r, opts.degeneracy_tol);
      report.fidelity = spec.max_value;
      report.degeneracy = spec.degeneracy();
      report.residual = spec.max_residual;
      std::vector<cplx> v = spec.max_space.column(0);
      phase_fix_largest(v);
      vector = PureState(std::move(v), r.dims);
      break;
    }
    case Method::Blocked: {
      BlockedResult b = blocked_max_eigenpair(task, opts);
      report.fidelity = b.value;
      report.degeneracy = b.degeneracy;
      report.residual = b.residual;
      report.sector = b.sector;
      vector = std::move(b.vector);
      break;
    }
    case Method::Subspace: {
      if (!has_subspace)
        throw std::invalid_argument(
            "the subspace route applies to the universal and M->N variants");
      const SubspaceSolution sol = solve_subspace(task);
      report.fidelity = sol.fidelity;
      report.lambda_sub = sol.lambda;
      report.residual = sol.residual;
      report.degeneracy =
          task.kind == TaskKind::UniversalQudit
              ? (task.d - 1) * (task.n - 1) + 1
              : task.n - task.m + 1;
      break;
    }
    case Method::ClosedForm: {
      const std::optional<double> f = closed_form_fidelity(task);
      if (!f)
        throw std::invalid_argument("no closed form is known for this task");
      report.fidelity = *f;
      report.per_clone.assign(task.n, *f);
      return report;
    }
    case Method::Auto:
      break;  // unreachable
  }

  // Per-clone fidelities from the canonical optimal state.
  if (task.kind == TaskKind::UniversalQudit) {
    const SubspaceSolution sol = solve_subspace(task);
    if (!report.lambda_sub) report.lambda_sub = sol.lambda;
    const std::vector<double> beta =
        expand_beta(sol.beta, sol.problem.clone_ids, task.n);
    report.per_clone = per_clone_from_beta(task.d, beta);
  } else if (task.kind == TaskKind::ManyToN) {
    const SubspaceSolution sol = solve_subspace(task);
    if (!report.lambda_sub) report.lambda_sub = sol.lambda;
    const PureState psi = embed_state_MN(task.m, task.n, sol.beta, 0);
    report.per_clone.resize(task.n);
    for (std::size_t c = 1; c <= task.n; ++c)
      report.per_clone[c - 1] = clone_operator(task, c).expectation(psi.amp);
  } else {
    report.per_clone.resize(task.n);
    for (std::size_t c = 1; c <= task.n; ++c)
      report.per_clone[c - 1] = clone_operator(task, c).expectation(vector->amp);
  }
  return report;
}

}  // namespace qclone
