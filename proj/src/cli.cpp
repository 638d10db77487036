#include "qclone/cli.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "qclone/analyze.hpp"

namespace qclone::cli {

namespace {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Formatting
// ---------------------------------------------------------------------------

std::string fmt(double v, int sig) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", sig, v);
  std::string s = buf;
  if (s == "-0") s = "0";
  return s;
}

// Exact round-trip representation, used inside emitted task blocks.
std::string fmt_exact(double v) { return fmt(v, 17); }

std::string fmt_list(const std::vector<double>& v, int sig) {
  std::string s = "[";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ", ";
    s += fmt(v[i], sig);
  }
  return s + "]";
}

std::string task_json(const CloningTask& task) {
  std::ostringstream os;
  os << "{\"variant\": \"" << to_string(task.kind) << "\"";
  switch (task.kind) {
    case TaskKind::UniversalQudit:
      os << ", \"d\": " << task.d << ", \"n\": " << task.n;
      break;
    case TaskKind::StateDependentQubit:
      os << ", \"n\": " << task.n << ", \"gamma\": " << fmt_exact(task.gamma);
      break;
    case TaskKind::Equatorial:
      os << ", \"n\": " << task.n;
      break;
    case TaskKind::ManyToN:
      os << ", \"m\": " << task.m << ", \"n\": " << task.n;
      break;
    case TaskKind::ChshPair:
      break;
  }
  os << ", \"alpha\": [";
  for (std::size_t i = 0; i < task.weights.size(); ++i) {
    if (i) os << ", ";
    os << fmt_exact(task.weights.alpha[i]);
  }
  os << "]}";
  return os.str();
}

// ---------------------------------------------------------------------------
// Input parsing
// ---------------------------------------------------------------------------

std::vector<double> parse_csv_doubles(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    const double v = std::stod(item, &used);
    while (used < item.size() && std::isspace(static_cast<unsigned char>(item[used])))
      ++used;
    if (used != item.size())
      throw std::invalid_argument("malformed number in list: " + item);
    out.push_back(v);
  }
  if (out.empty()) throw std::invalid_argument("empty number list");
  return out;
}

Distribution dist_from_json(const json& j) {
  if (j.contains("preset")) {
    const std::string name = j.at("preset").get<std::string>();
    if (name == "uniform-sphere") return Distribution::uniform_sphere();
    if (name == "equator") return Distribution::equator();
    if (name == "poles") return Distribution::poles();
    if (name == "belt") {
      const auto params = j.at("params").get<std::vector<double>>();
      if (params.size() != 2)
        throw std::invalid_argument("belt preset needs params [theta_lo, theta_hi]");
      return Distribution::belt(params[0], params[1]);
    }
    throw std::invalid_argument("unknown distribution preset: " + name);
  }
  if (j.contains("knots")) {
    std::vector<std::pair<double, double>> knots;
    for (const auto& k : j.at("knots")) {
      if (!k.is_array() || k.size() != 2)
        throw std::invalid_argument("knots must be [theta, f] pairs");
      knots.emplace_back(k[0].get<double>(), k[1].get<double>());
    }
    return Distribution::from_knots(std::move(knots));
  }
  throw std::invalid_argument("distribution needs a \"preset\" or \"knots\" entry");
}

Distribution parse_dist(const std::string& spec) {
  if (spec.rfind("preset:", 0) == 0) {
    const std::string rest = spec.substr(7);
    if (rest == "uniform-sphere") return Distribution::uniform_sphere();
    if (rest == "equator") return Distribution::equator();
    if (rest == "poles") return Distribution::poles();
    if (rest.rfind("belt:", 0) == 0) {
      const auto params = parse_csv_doubles([&] {
        std::string p = rest.substr(5);
        for (char& c : p)
          if (c == ':') c = ',';
        return p;
      }());
      if (params.size() != 2)
        throw std::invalid_argument("belt preset needs preset:belt:LO:HI");
      return Distribution::belt(params[0], params[1]);
    }
    throw std::invalid_argument("unknown distribution preset: " + rest);
  }
  std::ifstream in(spec);
  if (!in) throw std::invalid_argument("cannot open distribution file: " + spec);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("malformed distribution file: ") +
                                e.what());
  }
  return dist_from_json(j);
}

struct TaskFlags {
  std::string variant;
  std::size_t d = 2;
  std::size_t n = 0;
  std::size_t m = 0;
  double gamma = -1.0;
  std::string dist;
  std::string alpha;

  void add_to(CLI::App* cmd, bool need_variant = true) {
    auto* opt = cmd->add_option("--task", variant,
                                "task variant: universal|statedep|equatorial|mn|chsh");
    if (need_variant) opt->required();
    cmd->add_option("--d", d, "qudit dimension (universal)");
    cmd->add_option("--n", n, "number of clones");
    cmd->add_option("--m", m, "input copies (mn)");
    cmd->add_option("--gamma", gamma, "concentration parameter (statedep)");
    cmd->add_option("--dist", dist, "input distribution (statedep)");
    cmd->add_option("--alpha", alpha, "comma-separated clone weights");
  }

  Weights weights_or_symmetric(std::size_t count) const {
    if (alpha.empty()) return Weights::symmetric(count);
    return Weights(parse_csv_doubles(alpha));
  }

  CloningTask build() const {
    if (variant == "universal") {
      if (n == 0) throw std::invalid_argument("universal task needs --n");
      return CloningTask::universal(d, n, weights_or_symmetric(n));
    }
    if (variant == "statedep") {
      if (n == 0) throw std::invalid_argument("statedep task needs --n");
      if (!dist.empty() && gamma >= 0.0)
        throw std::invalid_argument("--gamma and --dist are mutually exclusive");
      double g = gamma;
      if (!dist.empty()) g = gamma_of(parse_dist(dist));
      if (g < 0.0)
        throw std::invalid_argument("statedep task needs --gamma or --dist");
      return CloningTask::state_dependent(g, n, weights_or_symmetric(n));
    }
    if (variant == "equatorial") {
      if (n == 0) throw std::invalid_argument("equatorial task needs --n");
      return CloningTask::equatorial(n, weights_or_symmetric(n));
    }
    if (variant == "mn") {
      if (n == 0 || m == 0) throw std::invalid_argument("mn task needs --m and --n");
      return CloningTask::many_to_n(m, n, weights_or_symmetric(n));
    }
    if (variant == "chsh") {
      return CloningTask::chsh_pair(weights_or_symmetric(2));
    }
    throw std::invalid_argument("unknown task variant: " + variant);
  }
};

CloningTask task_from_json(const json& j) {
  const std::string variant = j.at("variant").get<std::string>();
  Weights w(j.at("alpha").get<std::vector<double>>());
  if (variant == "universal")
    return CloningTask::universal(j.at("d").get<std::size_t>(),
                                  j.at("n").get<std::size_t>(), std::move(w));
  if (variant == "statedep")
    return CloningTask::state_dependent(j.at("gamma").get<double>(),
                                        j.at("n").get<std::size_t>(), std::move(w));
  if (variant == "equatorial")
    return CloningTask::equatorial(j.at("n").get<std::size_t>(), std::move(w));
  if (variant == "mn")
    return CloningTask::many_to_n(j.at("m").get<std::size_t>(),
                                  j.at("n").get<std::size_t>(), std::move(w));
  if (variant == "chsh") return CloningTask::chsh_pair(std::move(w));
  throw std::invalid_argument("unknown task variant: " + variant);
}

std::size_t env_threads() {
  const char* v = std::getenv("QCLONE_THREADS");
  if (!v) return 1;
  const long t = std::strtol(v, nullptr, 10);
  return t >= 1 ? static_cast<std::size_t>(t) : 1;
}

// ---------------------------------------------------------------------------
// Emission
// ---------------------------------------------------------------------------

void emit_report_json(const FidelityReport& r, int sig, std::ostream& out) {
  out << "{\n";
  out << "  \"task\": " << task_json(r.task) << ",\n";
  out << "  \"method\": \"" << to_string(r.method) << "\",\n";
  out << "  \"fidelity\": " << fmt(r.fidelity, sig) << ",\n";
  out << "  \"per_clone\": " << fmt_list(r.per_clone, sig);
  if (r.lambda_sub) out << ",\n  \"lambda_sub\": " << fmt(*r.lambda_sub, sig);
  if (r.degeneracy > 0) out << ",\n  \"degeneracy\": " << r.degeneracy;
  if (r.sector) out << ",\n  \"sector\": " << *r.sector;
  out << ",\n  \"residual\": " << fmt(r.residual, 3) << "\n";
  out << "}\n";
}

void emit_report_csv(const FidelityReport& r, int sig, std::ostream& out) {
  const std::size_t n = r.task.n;
  for (std::size_t i = 1; i <= n; ++i) out << "alpha_" << i << ",";
  for (std::size_t i = 1; i <= n; ++i) out << "F_" << i << ",";
  out << "F\n";
  for (double a : r.task.weights.alpha) out << fmt(a, sig) << ",";
  for (double f : r.per_clone) out << fmt(f, sig) << ",";
  out << fmt(r.fidelity, sig) << "\n";
}

void emit_sweep_csv(const TaskFamily& family,
                    const std::vector<TradeoffRecord>& records, int sig,
                    std::ostream& out) {
  const std::size_t n = family.kind == TaskKind::ChshPair ? 2 : family.n;
  const bool with_p = family.kind == TaskKind::UniversalQudit;
  const bool with_slack =
      with_p || (family.kind == TaskKind::ManyToN && family.m + 1 == family.n);
  for (std::size_t i = 1; i <= n; ++i) out << "alpha_" << i << ",";
  for (std::size_t i = 1; i <= n; ++i)
    out << "F_" << i << (i < n || with_p || with_slack ? "," : "");
  if (with_p)
    for (std::size_t i = 1; i <= n; ++i)
      out << "p_" << i << (i < n || with_slack ? "," : "");
  if (with_slack) out << "slack";
  out << "\n";

  for (const TradeoffRecord& rec : records) {
    for (std::size_t i = 0; i < n; ++i) out << fmt(rec.alpha.alpha[i], sig) << ",";
    if (rec.failed) {
      for (std::size_t i = 1; i < n; ++i) out << ",";
      if (with_p)
        for (std::size_t i = 0; i < n; ++i) out << ",";
      out << "\n";
      continue;
    }
    for (std::size_t i = 0; i < n; ++i)
      out << fmt(rec.fidelities[i], sig)
          << (i + 1 < n || with_p || with_slack ? "," : "");
    if (with_p)
      for (std::size_t i = 0; i < n; ++i)
        out << fmt((*rec.singlet_fractions)[i], sig)
            << (i + 1 < n || with_slack ? "," : "");
    if (with_slack) out << fmt(rec.slack.value_or(0.0), sig);
    out << "\n";
  }
}

void emit_sweep_json(const TaskFamily& family,
                     const std::vector<TradeoffRecord>& records, int sig,
                     std::ostream& out) {
  out << "{\n  \"variant\": \"" << to_string(family.kind) << "\",\n";
  out << "  \"records\": [\n";
  for (std::size_t i = 0; i < records.size(); ++i) {
    const TradeoffRecord& rec = records[i];
    out << "    {\"alpha\": ";
    std::string alpha = "[";
    for (std::size_t j = 0; j < rec.alpha.size(); ++j) {
      if (j) alpha += ", ";
      alpha += fmt(rec.alpha.alpha[j], sig);
    }
    out << alpha << "]";
    if (rec.failed) {
      out << ", \"error\": " << json(rec.error).dump() << "}";
    } else {
      out << ", \"F\": " << fmt_list(rec.fidelities, sig);
      if (rec.singlet_fractions)
        out << ", \"p\": " << fmt_list(*rec.singlet_fractions, sig);
      if (rec.slack) out << ", \"slack\": " << fmt(*rec.slack, sig);
      out << "}";
    }
    out << (i + 1 < records.size() ? ",\n" : "\n");
  }
  out << "  ]\n}\n";
}

void emit_economy_json(const CloningTask& task, const EconomyReport& rep, int sig,
                       std::ostream& out) {
  out << "{\n";
  out << "  \"task\": " << task_json(task) << ",\n";
  out << "  \"fidelity\": " << fmt(rep.fidelity, sig) << ",\n";
  out << "  \"classification\": \""
      << (rep.kind == EconomyReport::Kind::Economical ? "economical" : "ancilla")
      << "\",\n";
  out << "  \"ancilla_dim\": " << rep.ancilla_dim << ",\n";
  out << "  \"heuristic\": " << (rep.heuristic ? "true" : "false") << ",\n";
  out << "  \"schmidt_spectrum\": " << fmt_list(rep.schmidt_spectrum, sig) << ",\n";
  if (!rep.mixture_probs.empty())
    out << "  \"mixture_probs\": " << fmt_list(rep.mixture_probs, sig) << ",\n";
  if (!std::isnan(rep.heuristic_deviation))
    out << "  \"heuristic_deviation\": " << fmt(rep.heuristic_deviation, 3)
        << ",\n";
  out << "  \"input_marginal_residual\": " << fmt(rep.input_marginal_residual, 3)
      << ",\n";
  out << "  \"eigenspace_residual\": " << fmt(rep.eigenspace_residual, 3) << "\n";
  out << "}\n";
}

// ---------------------------------------------------------------------------
// Sweep grids
// ---------------------------------------------------------------------------

std::vector<Weights> sweep_grid(std::size_t n, std::size_t grid,
                                std::uint64_t seed) {
  std::vector<Weights> out;
  if (n == 2) {
    if (grid < 2) throw std::invalid_argument("grid must have at least 2 points");
    for (std::size_t i = 0; i < grid; ++i) {
      const double a = static_cast<double>(i) / static_cast<double>(grid - 1);
      out.push_back(Weights({a, 1.0 - a}));
    }
    return out;
  }
  // vertices + centroid + seeded Dirichlet bulk
  for (std::size_t i = 1; i <= n; ++i) out.push_back(Weights::unit(n, i));
  out.push_back(Weights::symmetric(n));
  Rng rng(seed);
  for (std::size_t i = out.size(); i < grid; ++i)
    out.push_back(Weights(rng.fork(i).dirichlet(n)));
  return out;
}

// ---------------------------------------------------------------------------
// verify: named invariant suites
// ---------------------------------------------------------------------------

struct SuiteOutcome {
  std::size_t passed = 0;
  std::size_t failed = 0;
};

void check(SuiteOutcome& so, std::ostream& out, const std::string& name,
           bool ok, const std::string& detail) {
  out << (ok ? "[PASS] " : "[FAIL] ") << name << ": " << detail << "\n";
  (ok ? so.passed : so.failed) += 1;
}

void suite_subspace(SuiteOutcome& so, std::size_t samples, std::uint64_t seed,
                    std::ostream& out) {
  const std::pair<std::size_t, std::size_t> configs[] = {{2, 3}, {3, 2}, {3, 3}};
  for (const auto& [d, n] : configs) {
    Rng rng(seed);
    double worst = 0.0;
    for (std::size_t s = 0; s < samples; ++s) {
      const Weights w(rng.fork(s).dirichlet(n));
      const CloningTask task = CloningTask::universal(d, n, w);
      const double dense = optimal_fidelity(task, Method::Dense).fidelity;
      const double sub = optimal_fidelity(task, Method::Subspace).fidelity;
      worst = std::max(worst, std::abs(dense - sub));
    }
    check(so, out, "subspace",
          worst <= 1e-9,
          "d=" + std::to_string(d) + " N=" + std::to_string(n) +
              " max |F_dense - F_subspace| = " + fmt(worst, 3));
  }
}

void suite_degeneracy(SuiteOutcome& so, std::size_t samples, std::uint64_t seed,
                      std::ostream& out) {
  const std::pair<std::size_t, std::size_t> configs[] = {{2, 3}, {3, 2}, {3, 3}};
  for (const auto& [d, n] : configs) {
    Rng rng(seed ^ 0xdeg1);
    bool ok = true;
    const std::size_t expect = (d - 1) * (n - 1) + 1;
    for (std::size_t s = 0; s < samples; ++s) {
      const Weights w(rng.fork(s).dirichlet(n));
      const CloningTask task = CloningTask::universal(d, n, w);
      const FidelityReport rep = optimal_fidelity(task, Method::Dense);
      if (rep.degeneracy != expect) ok = false;
    }
    check(so, out, "degeneracy", ok,
          "d=" + std::to_string(d) + " N=" + std::to_string(n) +
              " top eigenspace dimension = " + std::to_string(expect));
  }
}

void suite_perron(SuiteOutcome& so, std::size_t samples, std::uint64_t seed,
                  std::ostream& out) {
  Rng rng(seed ^ 0x9e22);
  double worst = 0.0;
  for (std::size_t s = 0; s < samples; ++s) {
    const Weights w(rng.fork(s).dirichlet(3));
    const CloningTask task = CloningTask::universal(3, 3, w);
    for (const SectorPerron& sp : sector_perron_entries(task))
      worst = std::min(worst, sp.min_real);
  }
  check(so, out, "perron", worst >= -1e-10,
        "min sector eigenvector entry = " + fmt(worst, 3));
}

void suite_monogamy(SuiteOutcome& so, std::size_t samples, std::uint64_t seed,
                    std::ostream& out) {
  Rng rng(seed ^ 0x3017);
  double worst_opt = 0.0;
  double worst_haar = 0.0;
  const CloningTask base = CloningTask::universal(3, 3);
  for (std::size_t s = 0; s < samples; ++s) {
    const Weights w(rng.fork(s).dirichlet(3));
    const CloningTask task = CloningTask::universal(3, 3, w);
    const FidelityReport rep = optimal_fidelity(task, Method::Subspace);
    std::vector<double> p(rep.per_clone.size());
    for (std::size_t i = 0; i < p.size(); ++i)
      p[i] = singlet_fraction(rep.per_clone[i], task.d);
    worst_opt = std::max(worst_opt, std::abs(monogamy_slack_1N(p, task.d)));
  }
  for (std::size_t s = 0; s < samples; ++s) {
    Rng r2 = rng.fork(1000 + s);
    const PureState psi(r2.haar_state(base.space_dim()), base.space_dims());
    const std::vector<double> f = per_clone_fidelities(psi, base);
    std::vector<double> p(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) p[i] = singlet_fraction(f[i], base.d);
    worst_haar = std::min(worst_haar, monogamy_slack_1N(p, base.d));
  }
  check(so, out, "monogamy", worst_opt <= 1e-8,
        "max |slack| on optimal frontier = " + fmt(worst_opt, 3));
  check(so, out, "monogamy", worst_haar >= -1e-8,
        "min slack over Haar states = " + fmt(worst_haar, 3));
}

void suite_tradeoff(SuiteOutcome& so, std::size_t samples, std::uint64_t seed,
                    std::ostream& out) {
  for (std::size_t n = 2; n <= 4; ++n) {
    Rng rng(seed ^ (0x77aa + n));
    double worst = 0.0, worst_marginal = 0.0;
    for (std::size_t s = 0; s < samples; ++s) {
      const Weights w(rng.fork(s).dirichlet(n));
      const CloningTask task = CloningTask::many_to_n(n - 1, n, w);
      const FidelityReport rep = optimal_fidelity(task, Method::Subspace);
      worst = std::max(worst, std::abs(tradeoff_slack_NminusOne(rep.per_clone)));
    }
    const MnMixture mix = mn_mixture_witness(n - 1, n, Weights::symmetric(n));
    worst_marginal = std::max(worst_marginal, mix.marginal_residual);
    check(so, out, "tradeoff", worst <= 1e-8 && worst_marginal <= 1e-10,
          "N=" + std::to_string(n) + " max |slack| = " + fmt(worst, 3) +
              ", mixture marginal residual = " + fmt(worst_marginal, 3));
  }
}

void suite_symmetry(SuiteOutcome& so, std::size_t, std::uint64_t seed,
                    std::ostream& out) {
  Rng rng(seed ^ 0x55aa);
  double worst_anti = 0.0, worst_pair = 0.0;
  for (std::size_t n = 2; n <= 4; ++n) {
    const Weights w(rng.fork(n).dirichlet(n));
    {
      // spectrum(R) = -spectrum(-Y0 R Y0)
      const CloningTask task = CloningTask::state_dependent(0.1, n, w);
      const HermitianOperator r = build_R(task);
      ComplexMatrix y0(2, 2);
      y0(0, 1) = cplx{0.0, -1.0};
      y0(1, 0) = cplx{0.0, 1.0};
      ComplexMatrix yfull = y0;
      for (std::size_t f = 0; f < n; ++f)
        yfull = kron(yfull, ComplexMatrix::identity(2));
      ComplexMatrix rt = yfull * r.mat * yfull;
      rt *= cplx{-1.0};
      const Spectrum a = hermitian_eig(r);
      const Spectrum b = hermitian_eig(HermitianOperator(rt, r.dims));
      for (std::size_t i = 0; i < a.eigenvalues.size(); ++i)
        worst_anti = std::max(
            worst_anti,
            std::abs(a.eigenvalues[i] +
                     b.eigenvalues[b.eigenvalues.size() - 1 - i]));
    }
    {
      const CloningTask task = CloningTask::equatorial(n, w);
      const Spectrum s = hermitian_eig(build_R(task));
      for (std::size_t i = 0; i < s.eigenvalues.size(); ++i)
        worst_pair = std::max(
            worst_pair,
            std::abs(s.eigenvalues[i] +
                     s.eigenvalues[s.eigenvalues.size() - 1 - i] - 1.0));
    }
  }
  check(so, out, "symmetry", worst_anti <= 1e-10,
        "max Y0 anti-spectrum mismatch = " + fmt(worst_anti, 3));
  check(so, out, "symmetry", worst_pair <= 1e-10,
        "max equatorial (r, 1-r) pairing mismatch = " + fmt(worst_pair, 3));
}

void suite_agreement(SuiteOutcome& so, std::size_t samples, std::uint64_t seed,
                     std::ostream& out) {
  Rng rng(seed ^ 0xa9ee);
  double worst_blocked = 0.0, worst_sub = 0.0;
  for (std::size_t s = 0; s < samples; ++s) {
    const Weights w(rng.fork(s).dirichlet(3));
    for (const CloningTask& task :
         {CloningTask::universal(2, 3, w), CloningTask::state_dependent(0.2, 3, w),
          CloningTask::many_to_n(2, 3, w)}) {
      const double dense = optimal_fidelity(task, Method::Dense).fidelity;
      const double blocked = optimal_fidelity(task, Method::Blocked).fidelity;
      worst_blocked = std::max(worst_blocked, std::abs(dense - blocked));
      if (task.kind != TaskKind::StateDependentQubit) {
        const double sub = optimal_fidelity(task, Method::Subspace).fidelity;
        worst_sub = std::max(worst_sub, std::abs(dense - sub));
      }
    }
  }
  check(so, out, "agreement", worst_blocked <= 1e-10,
        "max |F_dense - F_blocked| = " + fmt(worst_blocked, 3));
  check(so, out, "agreement", worst_sub <= 1e-9,
        "max |F_dense - F_subspace| = " + fmt(worst_sub, 3));
}

int run_verify(const std::string& suite, std::size_t samples, std::uint64_t seed,
               std::ostream& out) {
  SuiteOutcome so;
  const bool all = suite == "all";
  bool known = all;
  if (all || suite == "subspace") suite_subspace(so, samples, seed, out), known = true;
  if (all || suite == "degeneracy")
    suite_degeneracy(so, samples, seed, out), known = true;
  if (all || suite == "perron") suite_perron(so, samples, seed, out), known = true;
  if (all || suite == "monogamy") suite_monogamy(so, samples, seed, out), known = true;
  if (all || suite == "tradeoff") suite_tradeoff(so, samples, seed, out), known = true;
  if (all || suite == "symmetry") suite_symmetry(so, samples, seed, out), known = true;
  if (all || suite == "agreement")
    suite_agreement(so, samples, seed, out), known = true;
  if (!known)
    throw std::invalid_argument(
        "unknown suite (subspace|degeneracy|perron|monogamy|tradeoff|symmetry|"
        "agreement|all)");
  out << so.passed << " passed, " << so.failed << " failed\n";
  return so.failed == 0 ? 0 : 2;
}

}  // namespace

// ---------------------------------------------------------------------------
// Entry point
// ---------------------------------------------------------------------------

int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err) {
  CLI::App app{"optimal asymmetric quantum cloning toolkit"};
  app.require_subcommand(1);

  // solve
  auto* solve_cmd = app.add_subcommand("solve", "optimal fidelity of one task");
  TaskFlags solve_flags;
  solve_flags.add_to(solve_cmd, /*need_variant=*/false);
  std::string solve_method = "auto";
  std::string solve_out = "json";
  std::string from_json;
  int solve_precision = 12;
  solve_cmd->add_option("--method", solve_method, "auto|dense|blocked|subspace|closed");
  solve_cmd->add_option("--out", solve_out, "json|csv");
  solve_cmd->add_option("--from-json", from_json, "re-solve an emitted task block");
  solve_cmd->add_option("--precision", solve_precision, "significant digits");

  // sweep
  auto* sweep_cmd = app.add_subcommand("sweep", "fidelity trade-off sweep");
  TaskFlags sweep_flags;
  sweep_flags.add_to(sweep_cmd);
  std::size_t sweep_grid_size = 11;
  std::uint64_t sweep_seed = 1;
  std::string sweep_out = "csv";
  int sweep_precision = 12;
  sweep_cmd->add_option("--grid", sweep_grid_size, "number of weight samples");
  sweep_cmd->add_option("--seed", sweep_seed, "grid seed (N > 2)");
  sweep_cmd->add_option("--out", sweep_out, "csv|json");
  sweep_cmd->add_option("--precision", sweep_precision, "significant digits");

  // economy
  auto* econ_cmd = app.add_subcommand("economy", "economy classification");
  TaskFlags econ_flags;
  econ_flags.add_to(econ_cmd);
  std::uint64_t econ_seed = 0x5eed5eedULL;
  int econ_precision = 12;
  econ_cmd->add_option("--seed", econ_seed, "heuristic search seed");
  econ_cmd->add_option("--precision", econ_precision, "significant digits");

  // gamma
  auto* gamma_cmd = app.add_subcommand("gamma", "concentration parameter of a distribution");
  std::string gamma_dist;
  int gamma_precision = 12;
  gamma_cmd->add_option("--dist", gamma_dist, "preset:NAME or file")->required();
  gamma_cmd->add_option("--precision", gamma_precision, "significant digits");

  // validate-dist
  auto* vd_cmd = app.add_subcommand("validate-dist",
                                    "phase-covariance residuals of a distribution");
  std::string vd_dist;
  vd_cmd->add_option("--dist", vd_dist, "preset:NAME or file")->required();

  // verify
  auto* verify_cmd = app.add_subcommand("verify", "run a named invariant suite");
  std::string verify_suite = "all";
  std::size_t verify_samples = 20;
  std::uint64_t verify_seed = 1;
  verify_cmd->add_option("--suite", verify_suite, "suite name or 'all'");
  verify_cmd->add_option("--samples", verify_samples, "sample count");
  verify_cmd->add_option("--seed", verify_seed, "random seed");

  try {
    std::vector<std::string> argv_rev(args.rbegin(), args.rend());
    app.parse(argv_rev);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }

  try {
    if (solve_cmd->parsed()) {
      CloningTask task = [&] {
        if (!from_json.empty()) {
          std::ifstream in(from_json);
          if (!in) throw std::invalid_argument("cannot open: " + from_json);
          json j;
          in >> j;
          return task_from_json(j.contains("task") ? j.at("task") : j);
        }
        if (solve_flags.variant.empty())
          throw std::invalid_argument("solve needs --task or --from-json");
        return solve_flags.build();
      }();
      const auto method = method_from_string(solve_method);
      if (!method) throw std::invalid_argument("unknown method: " + solve_method);
      const FidelityReport rep = optimal_fidelity(task, *method);
      if (solve_out == "json")
        emit_report_json(rep, solve_precision, out);
      else if (solve_out == "csv")
        emit_report_csv(rep, solve_precision, out);
      else
        throw std::invalid_argument("unknown output format: " + solve_out);
      return 0;
    }

    if (sweep_cmd->parsed()) {
      const CloningTask probe = sweep_flags.build();
      const TaskFamily family = TaskFamily::of(probe);
      const std::size_t n = probe.n;
      const auto grid = sweep_grid(n, sweep_grid_size, sweep_seed);
      const auto records = pareto_sweep(family, grid, env_threads());
      if (sweep_out == "csv")
        emit_sweep_csv(family, records, sweep_precision, out);
      else if (sweep_out == "json")
        emit_sweep_json(family, records, sweep_precision, out);
      else
        throw std::invalid_argument("unknown output format: " + sweep_out);
      return 0;
    }

    if (econ_cmd->parsed()) {
      const CloningTask task = econ_flags.build();
      const EconomyReport rep = economy_report(task, econ_seed);
      emit_economy_json(task, rep, econ_precision, out);
      return 0;
    }

    if (gamma_cmd->parsed()) {
      const double g = gamma_of(parse_dist(gamma_dist));
      out << fmt(g, gamma_precision) << "\n";
      return 0;
    }

    if (vd_cmd->parsed()) {
      const Distribution dist = parse_dist(vd_dist);
      const auto res = validate_phase_covariance(dist);
      out << "{\n  \"residuals\": [" << fmt(res[0], 6) << ", " << fmt(res[1], 6)
          << ", " << fmt(res[2], 6) << ", " << fmt(res[3], 6) << "],\n";
      out << "  \"phase_covariant\": "
          << ((res[0] <= 1e-8 && res[1] <= 1e-8 && res[2] <= 1e-8 &&
               res[3] <= 1e-8)
                  ? "true"
                  : "false")
          << "\n}\n";
      return 0;
    }

    if (verify_cmd->parsed())
      return run_verify(verify_suite, verify_samples, verify_seed, out);
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  err << "error: no subcommand\n";
  return 1;
}

}  // namespace qclone::cli
