#include "qclone/analyze.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include "qclone/spin.hpp"

namespace qclone {

namespace {

void require(bool cond, const char* msg) {
  if (!cond) throw std::invalid_argument(msg);
}

constexpr double kEntangledTol = 1e-8;

}  // namespace

// ---------------------------------------------------------------------------
// Per-clone fidelities and conversions
// ---------------------------------------------------------------------------

std::vector<double> per_clone_fidelities(const PureState& psi,
                                         const CloningTask& task) {
  require(psi.dims == task.space_dims(), "state does not live on the task space");
  std::vector<double> f(task.n);
  for (std::size_t c = 1; c <= task.n; ++c)
    f[c - 1] = clone_operator(task, c).expectation(psi.amp);
  return f;
}

std::vector<double> per_clone_from_beta(std::size_t d,
                                        const std::vector<double>& beta) {
  require(d >= 2, "per_clone_from_beta needs d >= 2");
  require(!beta.empty(), "beta must be nonempty");
  double s1 = 0.0, s2 = 0.0;
  for (double b : beta) {
    s1 += b;
    s2 += b * b;
  }
  const double norm = s1 * s1 + static_cast<double>(d - 1) * s2;
  require(norm > 0.0, "beta must not vanish identically");
  const double scale = std::sqrt(static_cast<double>(d) / norm);
  const double dd = static_cast<double>(d);
  std::vector<double> f(beta.size());
  for (std::size_t i = 0; i < beta.size(); ++i) {
    const double t = ((dd - 1.0) * beta[i] + s1) * scale;
    f[i] = 1.0 / (dd + 1.0) + t * t / (dd * (dd + 1.0));
  }
  return f;
}

double singlet_fraction(double fidelity, std::size_t d) {
  return (fidelity * static_cast<double>(d + 1) - 1.0) / static_cast<double>(d);
}

double fidelity_of_singlet_fraction(double p, std::size_t d) {
  return (p * static_cast<double>(d) + 1.0) / static_cast<double>(d + 1);
}

double monogamy_slack_1N(const std::vector<double>& p, std::size_t d) {
  require(!p.empty(), "need at least one singlet fraction");
  double sum = 0.0, roots = 0.0;
  for (double x : p) {
    require(x >= -1e-12 && x <= 1.0 + 1e-12, "singlet fractions must lie in [0, 1]");
    const double xc = std::clamp(x, 0.0, 1.0);
    sum += xc;
    roots += std::sqrt(xc);
  }
  const double dd = static_cast<double>(d);
  const double nn = static_cast<double>(p.size());
  return (dd - 1.0) / dd + roots * roots / (nn + dd - 1.0) - sum;
}

double tradeoff_slack_NminusOne(const std::vector<double>& f) {
  require(!f.empty(), "need at least one fidelity");
  double sum = 0.0, roots = 0.0;
  for (double x : f) {
    require(x <= 1.0 + 1e-12, "fidelities must not exceed 1");
    sum += x;
    roots += std::sqrt(std::max(0.0, 1.0 - x));
  }
  return sum - roots * roots - (static_cast<double>(f.size()) - 1.0);
}

ChshMonogamy chsh_monogamy(double alpha1, double alpha2) {
  const CloningTask task = CloningTask::chsh_pair(Weights({alpha1, alpha2}));
  ChshMonogamy out;
  out.lambda = 0.5 * (std::sqrt(alpha1 * alpha1 + alpha2 * alpha2) + 1.0);
  out.weighted_bound = 4.0 * std::sqrt(2.0) * (out.lambda - 0.5);
  const Spectrum spec = hermitian_eig(build_R(task));
  out.dense_lambda = spec.max_value;
  if (std::abs(out.dense_lambda - out.lambda) > 1e-10)
    throw NumericalError("CHSH eigenvalue formula disagrees with diagonalization",
                         std::abs(out.dense_lambda - out.lambda));
  return out;
}

// ---------------------------------------------------------------------------
// Economy analysis
// ---------------------------------------------------------------------------

double schmidt_uniform_deviation(const std::vector<double>& schmidt,
                                 std::size_t d_in) {
  const double target = 1.0 / std::sqrt(static_cast<double>(d_in));
  double dev = 0.0;
  for (std::size_t i = 0; i < schmidt.size(); ++i) {
    const double want = i < d_in ? target : 0.0;
    dev = std::max(dev, std::abs(schmidt[i] - want));
  }
  if (schmidt.size() < d_in) dev = std::max(dev, target);
  return dev;
}

namespace {

double pure_marginal_residual(const PureState& psi) {
  const std::size_t d0 = psi.dims[0];
  const HermitianOperator rho = reduced_density(psi, {0});
  double res = 0.0;
  for (std::size_t a = 0; a < d0; ++a)
    for (std::size_t b = 0; b < d0; ++b) {
      const cplx want = a == b ? cplx{1.0 / static_cast<double>(d0)} : cplx{0.0};
      res = std::max(res, std::abs(rho.mat(a, b) - want));
    }
  return res;
}

double mixture_marginal_residual(const std::vector<PureState>& states,
                                 const std::vector<double>& probs) {
  const std::size_t d0 = states.front().dims[0];
  ComplexMatrix acc(d0, d0);
  for (std::size_t i = 0; i < states.size(); ++i) {
    const HermitianOperator rho = reduced_density(states[i], {0});
    for (std::size_t a = 0; a < d0; ++a)
      for (std::size_t b = 0; b < d0; ++b) acc(a, b) += probs[i] * rho.mat(a, b);
  }
  double res = 0.0;
  for (std::size_t a = 0; a < d0; ++a)
    for (std::size_t b = 0; b < d0; ++b) {
      const cplx want = a == b ? cplx{1.0 / static_cast<double>(d0)} : cplx{0.0};
      res = std::max(res, std::abs(acc(a, b) - want));
    }
  return res;
}

double pair_residual(const TaskOperator& op, double value,
                     std::span<const cplx> psi) {
  const std::vector<cplx> rv = op.apply(psi);
  double res = 0.0;
  for (std::size_t i = 0; i < psi.size(); ++i)
    res += std::norm(rv[i] - value * psi[i]);
  return std::sqrt(res);
}

// X^(N+1) image of a qubit-register state: every bit flips.
std::vector<cplx> flip_all(const std::vector<cplx>& v) {
  std::vector<cplx> out(v.size());
  for (std::size_t g = 0; g < v.size(); ++g) out[v.size() - 1 - g] = v[g];
  return out;
}

struct PureCandidate {
  PureState state;
  std::vector<double> schmidt;
  double deviation;
};

PureCandidate best_entangled_candidate(const std::vector<PureState>& candidates) {
  PureCandidate best{candidates.front(), {}, 0.0};
  bool first = true;
  for (const PureState& s : candidates) {
    std::vector<double> sc = schmidt_coefficients(s, {0});
    const double dev = schmidt_uniform_deviation(sc, s.dims[0]);
    if (first || dev < best.deviation) {
      best = {s, std::move(sc), dev};
      first = false;
    }
  }
  return best;
}

// (M x I) psi with M acting on the input factor (the most significant digit).
std::vector<cplx> apply_input_operator(const ComplexMatrix& m,
                                       std::span<const cplx> psi,
                                       std::size_t d0) {
  const std::size_t rest = psi.size() / d0;
  std::vector<cplx> out(psi.size(), cplx{0.0});
  for (std::size_t a = 0; a < d0; ++a)
    for (std::size_t a2 = 0; a2 < d0; ++a2) {
      const cplx e = m(a, a2);
      if (e == cplx{}) continue;
      for (std::size_t r = 0; r < rest; ++r) out[a * rest + r] += e * psi[a2 * rest + r];
    }
  return out;
}

ComplexMatrix input_density(std::span<const cplx> psi, std::size_t d0) {
  const std::size_t rest = psi.size() / d0;
  ComplexMatrix rho(d0, d0);
  for (std::size_t a = 0; a < d0; ++a)
    for (std::size_t b = 0; b < d0; ++b) {
      cplx acc = 0.0;
      for (std::size_t r = 0; r < rest; ++r)
        acc += psi[a * rest + r] * std::conj(psi[b * rest + r]);
      rho(a, b) = acc;
    }
  return rho;
}

// Projected gradient search for a maximally entangled vector inside the top
// eigenspace: minimizes ||rho_in - 1/d|| over unit combinations of the
// eigenspace basis columns. Seeded restarts keep the result deterministic.
struct HeuristicResult {
  double deviation = 1.0;
  std::optional<PureState> state;
};

HeuristicResult heuristic_entangled_search(const ComplexMatrix& basis,
                                           const std::vector<std::size_t>& dims,
                                           std::uint64_t seed,
                                           std::size_t restarts = 32) {
  const std::size_t dim = basis.rows(), k = basis.cols(), d0 = dims[0];

  const auto objective = [&](std::span<const cplx> psi) {
    ComplexMatrix rho = input_density(psi, d0);
    for (std::size_t a = 0; a < d0; ++a)
      rho(a, a) -= 1.0 / static_cast<double>(d0);
    const double f = rho.frobenius_norm();
    return f * f;
  };

  Rng root(seed);
  std::vector<cplx> best_psi;
  double best_obj = std::numeric_limits<double>::infinity();

  for (std::size_t r = 0; r < restarts; ++r) {
    Rng rng = root.fork(r);
    std::vector<cplx> c = rng.haar_state(k);
    std::vector<cplx> psi(dim);
    const auto sync_psi = [&] {
      std::fill(psi.begin(), psi.end(), cplx{0.0});
      for (std::size_t j = 0; j < k; ++j)
        for (std::size_t i = 0; i < dim; ++i) psi[i] += c[j] * basis(i, j);
    };
    sync_psi();
    double h = objective(psi);
    double step = 0.5;

    for (std::size_t it = 0; it < 400 && h > 1e-26 && step > 1e-13; ++it) {
      ComplexMatrix m = input_density(psi, d0);
      for (std::size_t a = 0; a < d0; ++a)
        m(a, a) -= 1.0 / static_cast<double>(d0);
      const std::vector<cplx> g = apply_input_operator(m, psi, d0);
      // project the gradient onto the eigenspace coefficients
      std::vector<cplx> cg(k, cplx{0.0});
      for (std::size_t j = 0; j < k; ++j) {
        cplx acc = 0.0;
        for (std::size_t i = 0; i < dim; ++i) acc += std::conj(basis(i, j)) * g[i];
        cg[j] = 2.0 * acc;
      }
      std::vector<cplx> trial(k);
      for (std::size_t j = 0; j < k; ++j) trial[j] = c[j] - step * cg[j];
      vec_normalize(trial);
      std::swap(c, trial);
      sync_psi();
      const double h2 = objective(psi);
      if (h2 < h - 1e-20) {
        h = h2;
        step *= 1.25;
      } else {
        std::swap(c, trial);  // revert
        sync_psi();
        step *= 0.5;
      }
    }
    if (h < best_obj) {
      best_obj = h;
      best_psi = psi;
    }
  }

  HeuristicResult out;
  if (!best_psi.empty()) {
    vec_normalize(best_psi);
    PureState st(best_psi, dims);
    out.deviation =
        schmidt_uniform_deviation(schmidt_coefficients(st, {0}), d0);
    out.state = std::move(st);
  }
  return out;
}

// Small real linear solve (Gaussian elimination with partial pivoting).
std::vector<double> solve_linear(std::vector<std::vector<double>> a,
                                 std::vector<double> b) {
  const std::size_t n = b.size();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
    std::swap(a[piv], a[col]);
    std::swap(b[piv], b[col]);
    const double diag = a[col][col];
    if (std::abs(diag) < 1e-14) continue;  // rank-deficient direction
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col) continue;
      const double f = a[r][col] / diag;
      if (f == 0.0) continue;
      for (std::size_t cc = col; cc < n; ++cc) a[r][cc] -= f * a[col][cc];
      b[r] -= f * b[col];
    }
  }
  std::vector<double> x(n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    x[i] = std::abs(a[i][i]) < 1e-14 ? 0.0 : b[i] / a[i][i];
  return x;
}

struct MixtureFit {
  std::vector<PureState> states;
  std::vector<double> probs;
  double residual = 0.0;
  std::size_t rank = 0;
};

// Feasible mixture over the top eigenspace with Tr_O rho as close to 1/d as
// the space allows; positivity repaired by mixing toward the maximally mixed
// eigenspace state.
MixtureFit fit_marginal_mixture(const ComplexMatrix& basis,
                                const std::vector<std::size_t>& dims) {
  const std::size_t dim = basis.rows(), k = basis.cols(), d0 = dims[0];
  const std::size_t rest = dim / d0;

  // T[p][q](a,b) = Tr_O |v_p><v_q| as a d0 x d0 block
  std::vector<ComplexMatrix> cross(k * k);
  for (std::size_t p = 0; p < k; ++p)
    for (std::size_t q = 0; q < k; ++q) {
      ComplexMatrix t(d0, d0);
      for (std::size_t a = 0; a < d0; ++a)
        for (std::size_t b = 0; b < d0; ++b) {
          cplx acc = 0.0;
          for (std::size_t r = 0; r < rest; ++r)
            acc += basis(a * rest + r, p) * std::conj(basis(b * rest + r, q));
          t(a, b) = acc;
        }
      cross[p * k + q] = std::move(t);
    }

  // Traceless Hermitian basis of k x k matrices.
  std::vector<ComplexMatrix> hbasis;
  for (std::size_t i = 0; i + 1 < k; ++i) {
    ComplexMatrix b(k, k);
    b(i, i) = 1.0;
    b(i + 1, i + 1) = -1.0;
    hbasis.push_back(std::move(b));
  }
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = i + 1; j < k; ++j) {
      ComplexMatrix br(k, k), bi(k, k);
      br(i, j) = 1.0;
      br(j, i) = 1.0;
      bi(i, j) = cplx{0.0, 1.0};
      bi(j, i) = cplx{0.0, -1.0};
      hbasis.push_back(std::move(br));
      hbasis.push_back(std::move(bi));
    }

  const auto lmap = [&](const ComplexMatrix& m) {
    ComplexMatrix out(d0, d0);
    for (std::size_t p = 0; p < k; ++p)
      for (std::size_t q = 0; q < k; ++q) {
        const cplx e = m(p, q);
        if (e == cplx{}) continue;
        for (std::size_t a = 0; a < d0; ++a)
          for (std::size_t b = 0; b < d0; ++b)
            out(a, b) += e * cross[p * k + q](a, b);
      }
    return out;
  };

  ComplexMatrix m0(k, k);
  for (std::size_t i = 0; i < k; ++i) m0(i, i) = 1.0 / static_cast<double>(k);
  ComplexMatrix target = lmap(m0);
  for (std::size_t a = 0; a < d0; ++a)
    target(a, a) -= 1.0 / static_cast<double>(d0);
  target *= cplx{-1.0};  // want L(M0 + sum t B) = 1/d0

  std::vector<ComplexMatrix> images;
  images.reserve(hbasis.size());
  for (const auto& b : hbasis) images.push_back(lmap(b));

  const auto inner = [](const ComplexMatrix& x, const ComplexMatrix& y) {
    double s = 0.0;
    for (std::size_t a = 0; a < x.rows(); ++a)
      for (std::size_t b = 0; b < x.cols(); ++b)
        s += (std::conj(x(a, b)) * y(a, b)).real();
    return s;
  };

  const std::size_t nb = hbasis.size();
  std::vector<std::vector<double>> normal(nb, std::vector<double>(nb, 0.0));
  std::vector<double> rhs(nb, 0.0);
  for (std::size_t i = 0; i < nb; ++i) {
    rhs[i] = inner(images[i], target);
    for (std::size_t j = 0; j < nb; ++j) normal[i][j] = inner(images[i], images[j]);
  }
  const std::vector<double> coeff = solve_linear(std::move(normal), std::move(rhs));

  ComplexMatrix m = m0;
  for (std::size_t i = 0; i < nb; ++i) {
    if (coeff[i] == 0.0) continue;
    ComplexMatrix scaled = hbasis[i];
    scaled *= cplx{coeff[i]};
    m += scaled;
  }

  Spectrum ms = hermitian_eig(HermitianOperator(m, {k}));
  double tau = 0.0;
  for (double ev : ms.eigenvalues)
    if (ev < 0.0) tau = std::max(tau, -ev / (1.0 / static_cast<double>(k) - ev));
  MixtureFit fit;
  for (std::size_t j = 0; j < k; ++j) {
    const double ev = (1.0 - tau) * ms.eigenvalues[j] +
                      tau / static_cast<double>(k);
    if (ev <= 1e-12) continue;
    std::vector<cplx> state(dim, cplx{0.0});
    for (std::size_t p = 0; p < k; ++p) {
      const cplx cp = ms.eigenvectors(p, j);
      if (cp == cplx{}) continue;
      for (std::size_t i = 0; i < dim; ++i) state[i] += cp * basis(i, p);
    }
    vec_normalize(state);
    fit.states.emplace_back(std::move(state), dims);
    fit.probs.push_back(ev);
  }
  fit.rank = fit.states.size();
  double psum = 0.0;
  for (double p : fit.probs) psum += p;
  for (double& p : fit.probs) p /= psum;
  fit.residual = mixture_marginal_residual(fit.states, fit.probs);
  return fit;
}

std::size_t ancilla_qudits_dim(std::size_t d0, std::size_t rank) {
  std::size_t dim = 1;
  while (dim < rank) dim *= d0;
  return dim;
}

}  // namespace

MnMixture mn_mixture_witness(std::size_t m, std::size_t n, const Weights& alpha) {
  const CloningTask task = CloningTask::many_to_n(m, n, alpha);
  const SubspaceSolution sol = solve_subspace(task);
  MnMixture out{embed_state_MN(m, n, sol.beta, 0), embed_state_MN(m, n, sol.beta, 1),
                0.0};
  out.marginal_residual =
      mixture_marginal_residual({out.psi0, out.psi1}, {0.5, 0.5});
  return out;
}

EconomyReport economy_report(const CloningTask& task, std::uint64_t seed,
                             const SolveOptions& opts) {
  const TaskOperator op = task_operator(task);
  const std::size_t d0 = task.input_dim();

  EconomyReport rep;

  const auto finish_pure = [&](PureState w, bool heuristic) {
    rep.kind = EconomyReport::Kind::Economical;
    rep.ancilla_dim = 1;
    rep.heuristic = heuristic;
    rep.schmidt_spectrum = schmidt_coefficients(w, {0});
    rep.input_marginal_residual = pure_marginal_residual(w);
    rep.eigenspace_residual = pair_residual(op, rep.fidelity, w.amp);
    rep.pure_witness = std::move(w);
  };

  const auto finish_mixture = [&](std::vector<PureState> states,
                                  std::vector<double> probs,
                                  std::size_t ancilla_dim, bool heuristic) {
    rep.kind = EconomyReport::Kind::Ancilla;
    rep.ancilla_dim = ancilla_dim;
    rep.heuristic = heuristic;
    rep.input_marginal_residual = mixture_marginal_residual(states, probs);
    double worst = 0.0;
    for (const PureState& s : states)
      worst = std::max(worst, pair_residual(op, rep.fidelity, s.amp));
    rep.eigenspace_residual = worst;
    rep.mixture_states = std::move(states);
    rep.mixture_probs = std::move(probs);
  };

  // Generic search fallback: look for a maximally entangled vector in the
  // top eigenspace; otherwise fit a feasible mixture. Results are labeled
  // heuristic.
  const auto generic_fallback = [&] {
    const HermitianOperator r = build_R(task, opts.dense_cap);
    const Spectrum spec = hermitian_eig(r, opts.degeneracy_tol);
    rep.fidelity = spec.max_value;
    const HeuristicResult h =
        heuristic_entangled_search(spec.max_space, r.dims, seed);
    rep.heuristic_deviation = h.deviation;
    if (h.state && h.deviation <= kEntangledTol) {
      finish_pure(*h.state, /*heuristic=*/true);
      return;
    }
    if (h.state) rep.schmidt_spectrum = schmidt_coefficients(*h.state, {0});
    MixtureFit fit = fit_marginal_mixture(spec.max_space, r.dims);
    finish_mixture(std::move(fit.states), std::move(fit.probs),
                   ancilla_qudits_dim(d0, fit.rank), /*heuristic=*/true);
  };

  switch (task.kind) {
    case TaskKind::Equatorial:
    case TaskKind::ChshPair: {
      const BlockedResult blk = blocked_max_eigenpair(task, opts);
      rep.fidelity = blk.value;
      const PureCandidate cand = best_entangled_candidate({blk.vector});
      if (cand.deviation <= kEntangledTol) {
        finish_pure(cand.state, false);
        return rep;
      }
      generic_fallback();
      return rep;
    }

    case TaskKind::StateDependentQubit: {
      const BlockedResult blk = blocked_max_eigenpair(task, opts);
      rep.fidelity = blk.value;

      // Candidates: the sector eigenvector and its X^(N+1) symmetrizations.
      std::vector<PureState> cands{blk.vector};
      for (const double sign : {1.0, -1.0}) {
        std::vector<cplx> v = blk.vector.amp;
        const std::vector<cplx> image = flip_all(blk.vector.amp);
        for (std::size_t i = 0; i < v.size(); ++i) v[i] += sign * image[i];
        const double nv = vec_norm(v);
        if (nv < 1e-8) continue;
        for (cplx& x : v) x /= nv;
        cands.emplace_back(std::move(v), blk.vector.dims);
      }
      const PureCandidate cand = best_entangled_candidate(cands);
      if (cand.deviation <= kEntangledTol) {
        finish_pure(cand.state, false);
        return rep;
      }

      if (task.n % 2 == 0) {
        // Even N: solve at N+1 with an appended zero weight; the odd-N
        // cloner is economical and tracing its extra clone leaves a rank-2
        // mixture, i.e. one ancilla qubit.
        std::vector<double> a2 = task.weights.alpha;
        a2.push_back(0.0);
        const CloningTask task2 =
            CloningTask::state_dependent(task.gamma, task.n + 1, Weights(a2));
        const BlockedResult blk2 = blocked_max_eigenpair(task2, opts);
        std::vector<PureState> cands2{blk2.vector};
        for (const double sign : {1.0, -1.0}) {
          std::vector<cplx> v = blk2.vector.amp;
          const std::vector<cplx> image = flip_all(blk2.vector.amp);
          for (std::size_t i = 0; i < v.size(); ++i) v[i] += sign * image[i];
          const double nv = vec_norm(v);
          if (nv < 1e-8) continue;
          for (cplx& x : v) x /= nv;
          cands2.emplace_back(std::move(v), blk2.vector.dims);
        }
        const PureCandidate c2 = best_entangled_candidate(cands2);
        if (c2.deviation <= kEntangledTol) {
          rep.schmidt_spectrum = cand.schmidt;  // best pure attempt at size N
          // Trace out the appended clone and eigendecompose the leftover.
          std::vector<std::size_t> keep(task.n + 1);
          for (std::size_t f = 0; f <= task.n; ++f) keep[f] = f;
          const HermitianOperator rho = reduced_density(c2.state, keep);
          const Spectrum rs = hermitian_eig(rho);
          std::vector<PureState> states;
          std::vector<double> probs;
          for (std::size_t j = rs.eigenvalues.size(); j-- > 0;) {
            if (rs.eigenvalues[j] <= 1e-12) break;
            std::vector<cplx> v = rs.eigenvectors.column(j);
            vec_normalize(v);
            states.emplace_back(std::move(v), task.space_dims());
            probs.push_back(rs.eigenvalues[j]);
          }
          finish_mixture(std::move(states), std::move(probs), 2, false);
          return rep;
        }
      }
      generic_fallback();
      return rep;
    }

    case TaskKind::UniversalQudit: {
      const SubspaceSolution sol = solve_subspace(task);
      rep.fidelity = sol.fidelity;
      const std::vector<double> beta =
          expand_beta(sol.beta, sol.problem.clone_ids, task.n);

      if (task.n == 1 || sol.problem.clone_ids.size() == 1 || task.n > 2) {
        const PureState w =
            embed_state_1N(task.d, task.n, beta, 0, PhiChoice::ghz());
        const double dev =
            schmidt_uniform_deviation(schmidt_coefficients(w, {0}), d0);
        if (dev <= kEntangledTol) {
          finish_pure(w, false);
          return rep;
        }
        generic_fallback();
        return rep;
      }

      // N = 2 with two active clones: no pure maximally entangled optimal
      // vector exists; record the search deviation, then build the d-state
      // sector mixture.
      {
        const HermitianOperator r = build_R(task, opts.dense_cap);
        const Spectrum spec = hermitian_eig(r, opts.degeneracy_tol);
        const HeuristicResult h =
            heuristic_entangled_search(spec.max_space, r.dims, seed);
        rep.heuristic_deviation = h.deviation;
        if (h.state && h.deviation <= kEntangledTol) {
          finish_pure(*h.state, true);
          return rep;
        }
        if (h.state) rep.schmidt_spectrum = schmidt_coefficients(*h.state, {0});
      }
      std::vector<PureState> states;
      std::vector<double> probs;
      for (std::size_t i = 0; i <= (task.d - 1) * (task.n - 1); ++i) {
        states.push_back(
            embed_state_1N(task.d, task.n, beta, i, PhiChoice::dicke()));
        probs.push_back(1.0 / static_cast<double>(task.d));
      }
      finish_mixture(std::move(states), std::move(probs), task.d, false);
      return rep;
    }

    case TaskKind::ManyToN: {
      const SubspaceSolution sol = solve_subspace(task);
      rep.fidelity = sol.fidelity;
      if (task.m + 1 == task.n) {
        MnMixture mix = mn_mixture_witness(task.m, task.n, task.weights);
        rep.schmidt_spectrum = schmidt_coefficients(mix.psi0, {0});
        finish_mixture({std::move(mix.psi0), std::move(mix.psi1)}, {0.5, 0.5}, 2,
                       false);
        return rep;
      }
      generic_fallback();
      return rep;
    }
  }
  generic_fallback();
  return rep;
}

// ---------------------------------------------------------------------------
// Trade-off sweeps
// ---------------------------------------------------------------------------

TaskFamily TaskFamily::of(const CloningTask& task) {
  return {task.kind, task.d, task.n, task.m, task.gamma};
}

CloningTask TaskFamily::with_weights(Weights w) const {
  switch (kind) {
    case TaskKind::UniversalQudit: return CloningTask::universal(d, n, std::move(w));
    case TaskKind::StateDependentQubit:
      return CloningTask::state_dependent(gamma, n, std::move(w));
    case TaskKind::Equatorial: return CloningTask::equatorial(n, std::move(w));
    case TaskKind::ManyToN: return CloningTask::many_to_n(m, n, std::move(w));
    case TaskKind::ChshPair: return CloningTask::chsh_pair(std::move(w));
  }
  throw std::logic_error("unknown task kind");
}

std::vector<TradeoffRecord> pareto_sweep(const TaskFamily& family,
                                         const std::vector<Weights>& grid,
                                         std::size_t threads,
                                         const SolveOptions& opts) {
  std::vector<TradeoffRecord> records;
  records.reserve(grid.size());
  for (const Weights& w : grid)
    records.push_back({w, {}, std::nullopt, std::nullopt, false, ""});

  const auto eval_point = [&](std::size_t i) {
    TradeoffRecord& rec = records[i];
    try {
      const CloningTask task = family.with_weights(rec.alpha);
      const FidelityReport report = optimal_fidelity(task, Method::Auto, opts);
      rec.fidelities = report.per_clone;
      if (family.kind == TaskKind::UniversalQudit) {
        std::vector<double> p(report.per_clone.size());
        for (std::size_t j = 0; j < p.size(); ++j)
          p[j] = singlet_fraction(report.per_clone[j], task.d);
        rec.slack = monogamy_slack_1N(p, task.d);
        rec.singlet_fractions = std::move(p);
      } else if (family.kind == TaskKind::ManyToN && family.m + 1 == family.n) {
        rec.slack = tradeoff_slack_NminusOne(report.per_clone);
      }
    } catch (const std::exception& e) {
      rec.failed = true;
      rec.error = e.what();
    }
  };

  if (threads <= 1 || grid.size() <= 1) {
    for (std::size_t i = 0; i < grid.size(); ++i) eval_point(i);
    return records;
  }

  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  const std::size_t nthreads = std::min(threads, grid.size());
  pool.reserve(nthreads);
  for (std::size_t t = 0; t < nthreads; ++t)
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= grid.size()) return;
        eval_point(i);
      }
    });
  for (auto& th : pool) th.join();
  return records;
}

}  // namespace qclone
