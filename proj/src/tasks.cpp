#include "qclone/tasks.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <functional>

#include "qclone/spin.hpp"

namespace qclone {

namespace {

constexpr double kPi = 3.14159265358979323846264338327950288;

void require(bool cond, const char* msg) {
  if (!cond) throw std::invalid_argument(msg);
}

}  // namespace

// ---------------------------------------------------------------------------
// Weights and tasks
// ---------------------------------------------------------------------------

Weights::Weights(std::vector<double> a) : alpha(std::move(a)) {
  require(!alpha.empty(), "weights must be nonempty");
  double sum = 0.0;
  for (double x : alpha) {
    require(std::isfinite(x), "weights must be finite");
    require(x >= 0.0, "weights must be nonnegative");
    sum += x;
  }
  require(std::abs(sum - 1.0) <= 1e-12, "weights must sum to 1 within 1e-12");
}

Weights Weights::symmetric(std::size_t n) {
  require(n >= 1, "weights must be nonempty");
  return Weights(std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

Weights Weights::unit(std::size_t n, std::size_t which) {
  require(which >= 1 && which <= n, "unit weight index out of range");
  std::vector<double> a(n, 0.0);
  a[which - 1] = 1.0;
  return Weights(std::move(a));
}

bool Weights::is_symmetric(double tol) const {
  const double target = 1.0 / static_cast<double>(alpha.size());
  for (double x : alpha)
    if (std::abs(x - target) > tol) return false;
  return true;
}

std::string to_string(TaskKind k) {
  switch (k) {
    case TaskKind::UniversalQudit: return "universal";
    case TaskKind::StateDependentQubit: return "statedep";
    case TaskKind::Equatorial: return "equatorial";
    case TaskKind::ManyToN: return "mn";
    case TaskKind::ChshPair: return "chsh";
  }
  return "?";
}

CloningTask CloningTask::universal(std::size_t d, std::size_t n, Weights w) {
  require(d >= 2, "universal cloning needs d >= 2");
  require(n >= 1, "universal cloning needs N >= 1");
  require(w.size() == n, "weight count must equal the clone count");
  return {TaskKind::UniversalQudit, d, n, 1, 0.0, std::move(w)};
}

CloningTask CloningTask::universal(std::size_t d, std::size_t n) {
  return universal(d, n, Weights::symmetric(n));
}

CloningTask CloningTask::state_dependent(double gamma, std::size_t n, Weights w) {
  require(gamma >= 0.0 && gamma <= 0.25, "Gamma must lie in [0, 1/4]");
  require(n >= 1, "state-dependent cloning needs N >= 1");
  require(w.size() == n, "weight count must equal the clone count");
  return {TaskKind::StateDependentQubit, 2, n, 1, gamma, std::move(w)};
}

CloningTask CloningTask::state_dependent(double gamma, std::size_t n) {
  return state_dependent(gamma, n, Weights::symmetric(n));
}

CloningTask CloningTask::equatorial(std::size_t n, Weights w) {
  require(n >= 1, "equatorial cloning needs N >= 1");
  require(w.size() == n, "weight count must equal the clone count");
  return {TaskKind::Equatorial, 2, n, 1, 0.25, std::move(w)};
}

CloningTask CloningTask::equatorial(std::size_t n) {
  return equatorial(n, Weights::symmetric(n));
}

CloningTask CloningTask::many_to_n(std::size_t m, std::size_t n, Weights w) {
  require(m >= 1 && m < n, "M->N cloning needs 1 <= M < N");
  require(w.size() == n, "weight count must equal the clone count");
  return {TaskKind::ManyToN, 2, n, m, 0.0, std::move(w)};
}

CloningTask CloningTask::many_to_n(std::size_t m, std::size_t n) {
  return many_to_n(m, n, Weights::symmetric(n));
}

CloningTask CloningTask::chsh_pair(Weights w) {
  require(w.size() == 2, "the CHSH pair has exactly two clones");
  return {TaskKind::ChshPair, 2, 2, 1, 0.25, std::move(w)};
}

std::size_t CloningTask::input_dim() const {
  return kind == TaskKind::ManyToN ? m + 1 : d;
}

std::vector<std::size_t> CloningTask::space_dims() const {
  std::vector<std::size_t> dims(n + 1, d);
  dims[0] = input_dim();
  return dims;
}

std::size_t CloningTask::space_dim() const {
  return dims_product(space_dims());
}

double CloningTask::coupling_gamma() const {
  switch (kind) {
    case TaskKind::StateDependentQubit: return gamma;
    case TaskKind::Equatorial:
    case TaskKind::ChshPair: return 0.25;
    default:
      throw std::logic_error("coupling_gamma applies to the qubit-star variants");
  }
}

// ---------------------------------------------------------------------------
// Distributions and quadrature
// ---------------------------------------------------------------------------

Distribution Distribution::uniform_sphere() {
  Distribution d;
  d.preset = Preset::UniformSphere;
  return d;
}

Distribution Distribution::equator() {
  Distribution d;
  d.preset = Preset::Equator;
  return d;
}

Distribution Distribution::poles() {
  Distribution d;
  d.preset = Preset::Poles;
  return d;
}

Distribution Distribution::belt(double theta_lo, double theta_hi) {
  require(theta_lo >= 0.0 && theta_hi <= kPi && theta_lo < theta_hi,
          "belt needs 0 <= theta_lo < theta_hi <= pi");
  Distribution d;
  d.preset = Preset::Belt;
  d.belt_lo = theta_lo;
  d.belt_hi = theta_hi;
  return d;
}

Distribution Distribution::from_knots(
    std::vector<std::pair<double, double>> knots) {
  require(knots.size() >= 2, "knot table needs at least two knots");
  for (std::size_t i = 0; i < knots.size(); ++i) {
    require(std::isfinite(knots[i].first) && std::isfinite(knots[i].second),
            "knots must be finite");
    require(knots[i].first >= 0.0 && knots[i].first <= kPi,
            "knot angles must lie in [0, pi]");
    require(knots[i].second >= 0.0, "knot densities must be nonnegative");
    if (i > 0)
      require(knots[i].first > knots[i - 1].first,
              "knot angles must be strictly increasing");
  }
  Distribution d;
  d.preset = Preset::Knots;
  d.knots = std::move(knots);
  return d;
}

namespace {

// 256-point Gauss-Legendre rule on [-1, 1].
const std::vector<std::pair<double, double>>& gl_rule() {
  static const std::vector<std::pair<double, double>> rule = [] {
    const int n = 256;
    std::vector<std::pair<double, double>> out(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
      double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
      double pn = 0.0, pn1 = 0.0, deriv = 0.0;
      for (int it = 0; it < 100; ++it) {
        double p1 = 1.0, p2 = 0.0;
        for (int j = 0; j < n; ++j) {
          const double p3 = p2;
          p2 = p1;
          p1 = ((2.0 * j + 1.0) * x * p2 - j * p3) / (j + 1.0);
        }
        pn = p1;
        pn1 = p2;
        deriv = n * (x * pn - pn1) / (x * x - 1.0);
        const double dx = pn / deriv;
        x -= dx;
        if (std::abs(dx) < 1e-16) break;
      }
      const double w = 2.0 / ((1.0 - x * x) * deriv * deriv);
      out[i] = {x, w};
      out[n - 1 - i] = {-x, w};
    }
    return out;
  }();
  return rule;
}

struct Piece {
  double a, b;
  std::function<double(double)> f;
};

std::vector<Piece> smooth_pieces(const Distribution& dist) {
  std::vector<Piece> pieces;
  switch (dist.preset) {
    case Distribution::Preset::UniformSphere:
      pieces.push_back({0.0, kPi, [](double t) { return std::sin(t) / (4.0 * kPi); }});
      break;
    case Distribution::Preset::Belt: {
      const double denom =
          2.0 * kPi * (std::cos(dist.belt_lo) - std::cos(dist.belt_hi));
      pieces.push_back(
          {dist.belt_lo, dist.belt_hi,
           [denom](double t) { return std::sin(t) / denom; }});
      break;
    }
    case Distribution::Preset::Knots:
      for (std::size_t i = 0; i + 1 < dist.knots.size(); ++i) {
        const auto [t0, f0] = dist.knots[i];
        const auto [t1, f1] = dist.knots[i + 1];
        pieces.push_back({t0, t1, [t0, f0, t1, f1](double t) {
                            return f0 + (f1 - f0) * (t - t0) / (t1 - t0);
                          }});
      }
      break;
    default:
      throw std::logic_error("Dirac presets have no smooth pieces");
  }
  return pieces;
}

// integral of f(theta) g(theta) d(theta) over all pieces
double integrate(const std::vector<Piece>& pieces,
                 const std::function<double(double)>& g) {
  double total = 0.0;
  for (const Piece& p : pieces) {
    const double mid = 0.5 * (p.a + p.b), half = 0.5 * (p.b - p.a);
    double acc = 0.0;
    for (const auto& [x, w] : gl_rule()) {
      const double t = mid + half * x;
      acc += w * p.f(t) * g(t);
    }
    total += half * acc;
  }
  return total;
}

double norm_integral(const Distribution& dist) {
  return 2.0 * kPi * integrate(smooth_pieces(dist), [](double) { return 1.0; });
}

}  // namespace

double gamma_of(const Distribution& dist) {
  switch (dist.preset) {
    case Distribution::Preset::Equator: return 0.25;
    case Distribution::Preset::Poles: return 0.0;
    default: break;
  }
  const double norm = norm_integral(dist);
  if (std::abs(norm - 1.0) > 1e-8)
    throw std::invalid_argument("distribution is not normalized within 1e-8");
  return 0.25 * 2.0 * kPi *
         integrate(smooth_pieces(dist),
                   [](double t) { return std::sin(t) * std::sin(t); });
}

std::array<double, 4> validate_phase_covariance(const Distribution& dist) {
  // phi-independence makes the three phi-weighted integrals vanish exactly;
  // only integral f cos(theta) can survive.
  switch (dist.preset) {
    case Distribution::Preset::Equator:
    case Distribution::Preset::Poles:
      return {0.0, 0.0, 0.0, 0.0};
    default: break;
  }
  const double r1 = std::abs(
      2.0 * kPi * integrate(smooth_pieces(dist), [](double t) { return std::cos(t); }));
  return {r1, 0.0, 0.0, 0.0};
}

// ---------------------------------------------------------------------------
// Cloning operators
// ---------------------------------------------------------------------------

PureState bell_state(std::size_t d) {
  require(d >= 2, "Bell state needs d >= 2");
  std::vector<cplx> amp(d * d, cplx{0.0});
  const double w = 1.0 / std::sqrt(static_cast<double>(d));
  for (std::size_t i = 0; i < d; ++i) amp[i * d + i] = w;
  return PureState(std::move(amp), {d, d});
}

namespace {

// |B><B| on the two-site space (d x d).
ComplexMatrix bell_projector(std::size_t d) {
  ComplexMatrix p(d * d, d * d);
  const double w = 1.0 / static_cast<double>(d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) p(i * d + i, j * d + j) = w;
  return p;
}

// Gamma (XX - YY) + ((1-4 Gamma)/2) ZZ on two qubits; the Gamma -> 0 limit
// is taken by assembling from the three scaled terms.
ComplexMatrix star_coupling(double gamma) {
  ComplexMatrix op(4, 4);
  op(0, 3) = 2.0 * gamma;
  op(3, 0) = 2.0 * gamma;
  const double zz = 0.5 * (1.0 - 4.0 * gamma);
  op(0, 0) = zz;
  op(1, 1) = -zz;
  op(2, 2) = -zz;
  op(3, 3) = zz;
  return op;
}

// (1/(2(M+2))) (S^X x X - S^Y x Y + S^Z x Z) on the (M+1)x2 input-clone pair.
ComplexMatrix mn_coupling(std::size_t m) {
  const SpinOps in = spin_operators(m + 1);
  const SpinOps pauli = spin_operators(2);
  ComplexMatrix op = kron(in.sx, pauli.sx);
  op -= kron(in.sy, pauli.sy);
  op += kron(in.sz, pauli.sz);
  op *= 1.0 / (2.0 * static_cast<double>(m + 2));
  return op;
}

}  // namespace

TaskOperator task_operator(const CloningTask& task) {
  TaskOperator op;
  op.dims = task.space_dims();
  const auto& alpha = task.weights.alpha;

  switch (task.kind) {
    case TaskKind::UniversalQudit: {
      op.identity_coeff = 1.0 / static_cast<double>(task.d + 1);
      const ComplexMatrix proj = bell_projector(task.d);
      const double scale =
          static_cast<double>(task.d) / static_cast<double>(task.d + 1);
      for (std::size_t c = 1; c <= task.n; ++c) {
        if (alpha[c - 1] == 0.0) continue;
        op.terms.push_back({c, cplx{scale * alpha[c - 1]} * proj});
      }
      break;
    }
    case TaskKind::StateDependentQubit:
    case TaskKind::Equatorial:
    case TaskKind::ChshPair: {
      op.identity_coeff = 0.5;
      const ComplexMatrix coupling = star_coupling(task.coupling_gamma());
      for (std::size_t c = 1; c <= task.n; ++c) {
        if (alpha[c - 1] == 0.0) continue;
        op.terms.push_back({c, cplx{alpha[c - 1]} * coupling});
      }
      break;
    }
    case TaskKind::ManyToN: {
      op.identity_coeff = 0.5;
      const ComplexMatrix coupling = mn_coupling(task.m);
      for (std::size_t c = 1; c <= task.n; ++c) {
        if (alpha[c - 1] == 0.0) continue;
        op.terms.push_back({c, cplx{alpha[c - 1]} * coupling});
      }
      break;
    }
  }
  return op;
}

TaskOperator clone_operator(const CloningTask& task, std::size_t clone) {
  require(clone >= 1 && clone <= task.n, "clone index out of range");
  CloningTask single = task;
  single.weights = Weights::unit(task.n, clone);
  return task_operator(single);
}

void TaskOperator::apply(std::span<const cplx> x, std::span<cplx> y) const {
  const std::size_t total = dim();
  require(x.size() == total && y.size() == total, "operator-vector shape mismatch");
  for (std::size_t i = 0; i < total; ++i) y[i] = identity_coeff * x[i];

  const auto strides = dim_strides(dims);
  for (const CouplingTerm& term : terms) {
    const std::size_t d0 = dims[0], dc = dims[term.clone];
    const std::size_t s0 = strides[0], sc = strides[term.clone];
    for (std::size_t g = 0; g < total; ++g) {
      const std::size_t a = (g / s0) % d0;
      const std::size_t b = (g / sc) % dc;
      const std::size_t row = a * dc + b;
      const std::size_t base = g - a * s0 - b * sc;
      cplx acc = 0.0;
      for (std::size_t a2 = 0; a2 < d0; ++a2)
        for (std::size_t b2 = 0; b2 < dc; ++b2) {
          const cplx e = term.op(row, a2 * dc + b2);
          if (e == cplx{}) continue;
          acc += e * x[base + a2 * s0 + b2 * sc];
        }
      y[g] += acc;
    }
  }
}

std::vector<cplx> TaskOperator::apply(std::span<const cplx> x) const {
  std::vector<cplx> y(x.size());
  apply(x, y);
  return y;
}

double TaskOperator::expectation(std::span<const cplx> psi) const {
  const std::vector<cplx> rp = apply(psi);
  const cplx v = vec_dot(psi, rp);
  if (std::abs(v.imag()) > 1e-9)
    throw NumericalError("expectation value has a nonreal part", std::abs(v.imag()));
  return v.real();
}

HermitianOperator TaskOperator::dense(std::size_t side_cap) const {
  const std::size_t total = dim();
  if (total > side_cap)
    throw SizeError("cloning operator exceeds the configured dense cap");

  ComplexMatrix mat(total, total);
  for (std::size_t i = 0; i < total; ++i) mat(i, i) = identity_coeff;

  const auto strides = dim_strides(dims);
  for (const CouplingTerm& term : terms) {
    const std::size_t d0 = dims[0], dc = dims[term.clone];
    const std::size_t s0 = strides[0], sc = strides[term.clone];
    for (std::size_t g = 0; g < total; ++g) {
      const std::size_t a = (g / s0) % d0;
      const std::size_t b = (g / sc) % dc;
      const std::size_t col = a * dc + b;
      const std::size_t base = g - a * s0 - b * sc;
      for (std::size_t a2 = 0; a2 < d0; ++a2)
        for (std::size_t b2 = 0; b2 < dc; ++b2) {
          const cplx e = term.op(a2 * dc + b2, col);
          if (e == cplx{}) continue;
          mat(base + a2 * s0 + b2 * sc, g) += e;
        }
    }
  }
  return HermitianOperator(std::move(mat), dims);
}

HermitianOperator build_R(const CloningTask& task, std::size_t side_cap) {
  return task_operator(task).dense(side_cap);
}

// ---------------------------------------------------------------------------
// Reduced subspace problems
// ---------------------------------------------------------------------------

std::uint64_t binomial(std::size_t n, std::size_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  std::uint64_t r = 1;
  for (std::size_t i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

std::vector<std::uint64_t> weight_m_strings(std::size_t m, std::size_t n) {
  require(n >= 1 && n < 64, "bit-string length out of range");
  require(m <= n, "weight exceeds string length");
  std::vector<std::uint64_t> out;
  out.reserve(binomial(n, m));
  for (std::uint64_t v = 0; v < (std::uint64_t{1} << n); ++v)
    if (static_cast<std::size_t>(std::popcount(v)) == m) out.push_back(v);
  return out;
}

namespace {

// Bit of clone k (1-based) in a weight string; clone 1 is the MSB.
bool clone_bit(std::uint64_t x, std::size_t k, std::size_t n) {
  return (x >> (n - k)) & 1;
}

}  // namespace

SubspaceProblem subspace_matrix_1N(std::size_t d, std::size_t n,
                                   const Weights& alpha) {
  require(d >= 2, "subspace matrix needs d >= 2");
  require(alpha.size() == n, "weight count must equal the clone count");

  std::vector<std::size_t> kept;
  for (std::size_t i = 0; i < n; ++i)
    if (alpha.alpha[i] > 0.0) kept.push_back(i + 1);
  require(!kept.empty(), "all clone weights vanish");

  const std::size_t k = kept.size();
  SubspaceProblem sp;
  sp.clone_ids = kept;
  sp.coeff = ComplexMatrix(k, k);
  sp.gram = ComplexMatrix(k, k);
  const double dm1 = static_cast<double>(d - 1);
  for (std::size_t i = 0; i < k; ++i) {
    const double ai = alpha.alpha[kept[i] - 1];
    for (std::size_t j = 0; j < k; ++j) {
      sp.coeff(i, j) = ai * (1.0 + (i == j ? dm1 : 0.0));
      sp.gram(i, j) = (1.0 + (i == j ? dm1 : 0.0)) / static_cast<double>(d);
    }
  }
  return sp;
}

SubspaceProblem subspace_matrix_MN(std::size_t m, std::size_t n,
                                   const Weights& alpha) {
  require(m >= 1 && m < n, "M->N subspace needs 1 <= M < N");
  require(alpha.size() == n, "weight count must equal the clone count");
  const std::uint64_t count = binomial(n, m);
  if (count > kDenseEigCap)
    throw SizeError("M->N subspace dimension exceeds the configured cap");

  SubspaceProblem sp;
  sp.bitstrings = weight_m_strings(m, n);
  const std::size_t k = sp.bitstrings.size();
  sp.coeff = ComplexMatrix(k, k);
  sp.gram = ComplexMatrix(k, k);

  const double inv = 1.0 / static_cast<double>(m + 2);
  for (std::size_t i = 0; i < k; ++i) {
    const std::uint64_t x = sp.bitstrings[i];
    double present = 0.0;
    for (std::size_t c = 1; c <= n; ++c)
      if (clone_bit(x, c, n)) present += alpha.alpha[c - 1];
    sp.coeff(i, i) = inv + static_cast<double>(m + 1) * inv * present;
    sp.gram(i, i) = 1.0;
    for (std::size_t j = 0; j < k; ++j) {
      if (i == j) continue;
      const std::uint64_t y = sp.bitstrings[j];
      const std::size_t dot = std::popcount(x & y);
      sp.gram(i, j) = 1.0 / static_cast<double>(m + 1 - dot);
      if (dot == m - 1) {
        // unique clone with x_k = 0, y_k = 1
        const std::uint64_t bit = y & ~x;
        const std::size_t c = n - static_cast<std::size_t>(std::countr_zero(bit));
        sp.coeff(i, j) = inv * alpha.alpha[c - 1];
      }
    }
  }
  return sp;
}

// ---------------------------------------------------------------------------
// Optimal-state embeddings
// ---------------------------------------------------------------------------

namespace {

void check_symmetric_phi(const PureState& phi, std::size_t d, std::size_t sites) {
  require(phi.dims.size() == sites, "custom Phi must live on N-1 clone factors");
  for (std::size_t dim : phi.dims)
    require(dim == d, "custom Phi factors must have the clone dimension");
  if (sites < 2) return;
  const auto strides = dim_strides(phi.dims);
  double worst = 0.0;
  for (std::size_t s = 0; s + 1 < sites; ++s) {
    for (std::size_t g = 0; g < phi.amp.size(); ++g) {
      const std::size_t a = (g / strides[s]) % d;
      const std::size_t b = (g / strides[s + 1]) % d;
      const std::size_t swapped = g + b * strides[s] + a * strides[s + 1] -
                                  a * strides[s] - b * strides[s + 1];
      worst = std::max(worst, std::abs(phi.amp[g] - phi.amp[swapped]));
    }
  }
  if (worst > 1e-10)
    throw std::invalid_argument("custom Phi is not permutation invariant");
}

}  // namespace

PureState embed_state_1N(std::size_t d, std::size_t n, std::vector<double> beta,
                         std::size_t sector, const PhiChoice& phi) {
  require(d >= 2 && n >= 1, "embedding needs d >= 2 and N >= 1");
  require(beta.size() == n, "beta must list one coefficient per clone");
  for (double b : beta) require(std::isfinite(b), "beta must be finite");
  if (phi.kind == PhiChoice::Kind::DickeLadder)
    require(sector <= (d - 1) * (n - 1), "sector index out of range");

  // Rescale to (sum beta)^2 + (d-1) sum beta^2 = d.
  double s1 = 0.0, s2 = 0.0;
  for (double b : beta) {
    s1 += b;
    s2 += b * b;
  }
  const double s = s1 * s1 + static_cast<double>(d - 1) * s2;
  require(s > 0.0, "beta must not vanish identically");
  const double scale = std::sqrt(static_cast<double>(d) / s);
  for (double& b : beta) b *= scale;

  // Amplitudes of |Phi> over the N-1 spectator clones.
  const std::size_t spect = n - 1;
  std::vector<cplx> phi_amp;
  if (spect == 0) {
    phi_amp = {cplx{1.0}};
  } else {
    switch (phi.kind) {
      case PhiChoice::Kind::GhzType: {
        const std::size_t total = dims_product(std::vector<std::size_t>(spect, d));
        phi_amp.assign(total, cplx{0.0});
        std::size_t rep = 0;  // index of |c...c> advances by this per c
        for (std::size_t f = 0, stride = 1; f < spect; ++f, stride *= d) rep += stride;
        const double w = 1.0 / std::sqrt(static_cast<double>(d));
        for (std::size_t c = 0; c < d; ++c) phi_amp[c * rep] = w;
        break;
      }
      case PhiChoice::Kind::DickeLadder:
        phi_amp = dicke_state(spect, d, sector).amp;
        break;
      case PhiChoice::Kind::Custom:
        require(phi.custom.has_value(), "custom Phi state missing");
        check_symmetric_phi(*phi.custom, d, spect);
        phi_amp = phi.custom->amp;
        break;
    }
  }

  const std::vector<std::size_t> dims(n + 1, d);
  const auto strides = dim_strides(dims);
  std::vector<cplx> amp(dims_product(dims), cplx{0.0});
  const double bell_w = 1.0 / std::sqrt(static_cast<double>(d));

  const std::vector<std::size_t> phi_dims(spect, d);
  const auto phi_strides = dim_strides(phi_dims);
  for (std::size_t c = 1; c <= n; ++c) {
    if (beta[c - 1] == 0.0) continue;
    std::vector<std::size_t> sites;  // clone factors hosting |Phi>
    for (std::size_t f = 1; f <= n; ++f)
      if (f != c) sites.push_back(f);
    for (std::size_t a = 0; a < d; ++a) {
      const std::size_t base = a * strides[0] + a * strides[c];
      for (std::size_t p = 0; p < phi_amp.size(); ++p) {
        if (phi_amp[p] == cplx{}) continue;
        std::size_t g = base;
        for (std::size_t f = 0; f < spect; ++f)
          g += ((p / phi_strides[f]) % d) * strides[sites[f]];
        amp[g] += beta[c - 1] * bell_w * phi_amp[p];
      }
    }
  }
  vec_normalize(amp);
  return PureState(std::move(amp), dims);
}

PureState embed_state_MN(std::size_t m, std::size_t n, std::vector<double> beta,
                         std::size_t sector) {
  require(m >= 1 && m < n, "M->N embedding needs 1 <= M < N");
  if (n > 20) throw SizeError("M->N embedding exceeds the configured cap");
  require(sector <= n - m, "sector index out of range");
  const auto strings = weight_m_strings(m, n);
  require(beta.size() == strings.size(),
          "beta must list one coefficient per weight-M string");
  for (double b : beta) require(std::isfinite(b), "beta must be finite");

  std::vector<std::size_t> dims(n + 1, 2);
  dims[0] = m + 1;
  const auto strides = dim_strides(dims);
  if (dims_product(dims) > kKronSideCap)
    throw SizeError("M->N embedding exceeds the configured cap");

  std::vector<cplx> amp(dims_product(dims), cplx{0.0});
  const double wi = 1.0 / std::sqrt(static_cast<double>(m + 1));
  const double w0 =
      1.0 / std::sqrt(static_cast<double>(binomial(n - m, sector)));

  for (std::size_t si = 0; si < strings.size(); ++si) {
    if (beta[si] == 0.0) continue;
    const std::uint64_t x = strings[si];
    std::vector<std::size_t> ones, zeros;  // clone factors by string bit
    for (std::size_t c = 1; c <= n; ++c)
      (clone_bit(x, c, n) ? ones : zeros).push_back(c);

    for (std::size_t exc = 0; exc <= m; ++exc) {
      const double w1 = 1.0 / std::sqrt(static_cast<double>(binomial(m, exc)));
      const std::size_t in_off = exc * strides[0];
      for (std::uint64_t a = 0; a < (std::uint64_t{1} << m); ++a) {
        if (static_cast<std::size_t>(std::popcount(a)) != exc) continue;
        std::size_t off1 = in_off;
        for (std::size_t p = 0; p < m; ++p)
          if ((a >> p) & 1) off1 += strides[ones[p]];
        for (std::uint64_t b = 0; b < (std::uint64_t{1} << (n - m)); ++b) {
          if (static_cast<std::size_t>(std::popcount(b)) != sector) continue;
          std::size_t g = off1;
          for (std::size_t p = 0; p < n - m; ++p)
            if ((b >> p) & 1) g += strides[zeros[p]];
          amp[g] += beta[si] * wi * w1 * w0;
        }
      }
    }
  }
  vec_normalize(amp);
  return PureState(std::move(amp), std::move(dims));
}

}  // namespace qclone
