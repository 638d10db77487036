#include "qclone/spin.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace qclone {

SpinOps spin_operators(std::size_t d) {
  if (d < 2) throw std::invalid_argument("spin operators need dimension >= 2");
  SpinOps ops{d, ComplexMatrix(d, d), ComplexMatrix(d, d), ComplexMatrix(d, d)};
  for (std::size_t n = 0; n + 1 < d; ++n) {
    const double w = std::sqrt(static_cast<double>((n + 1) * (d - n - 1)));
    ops.sx(n, n + 1) = w;
    ops.sx(n + 1, n) = w;
    ops.sy(n, n + 1) = cplx{0.0, -w};
    ops.sy(n + 1, n) = cplx{0.0, w};
  }
  for (std::size_t n = 0; n < d; ++n)
    ops.sz(n, n) = static_cast<double>(d - 1) - 2.0 * static_cast<double>(n);
  return ops;
}

PureState dicke_state(std::size_t m, std::size_t d, std::size_t k) {
  if (m == 0) throw std::invalid_argument("dicke_state needs at least one site");
  if (d < 2) throw std::invalid_argument("dicke_state needs dimension >= 2");
  const std::size_t kmax = m * (d - 1);
  if (k > kmax) throw std::invalid_argument("excitation number out of range");

  std::vector<std::size_t> dims(m, d);
  const std::size_t total = dims_product(dims);
  const auto strides = dim_strides(dims);

  std::vector<cplx> v(total, cplx{0.0});
  v[0] = 1.0;  // |0...0>

  // Collective lowering: site digit n -> n+1 with weight sqrt((n+1)(d-n-1)),
  // dividing by sqrt((j+1)(m(d-1)-j)) at step j.
  std::vector<cplx> next(total);
  for (std::size_t j = 0; j < k; ++j) {
    std::fill(next.begin(), next.end(), cplx{0.0});
    for (std::size_t idx = 0; idx < total; ++idx) {
      const cplx amp = v[idx];
      if (amp == cplx{}) continue;
      for (std::size_t site = 0; site < m; ++site) {
        const std::size_t digit = (idx / strides[site]) % d;
        if (digit + 1 > d - 1) continue;
        const double w =
            std::sqrt(static_cast<double>((digit + 1) * (d - digit - 1)));
        next[idx + strides[site]] += w * amp;
      }
    }
    const double denom = std::sqrt(static_cast<double>((j + 1) * (kmax - j)));
    for (std::size_t idx = 0; idx < total; ++idx) next[idx] /= denom;
    v.swap(next);
  }
  return PureState(std::move(v), std::move(dims));
}

long jz_of_index(std::size_t index, const std::vector<std::size_t>& dims,
                 bool flipped_input) {
  long jz = 0;
  for (std::size_t f = dims.size(); f-- > 0;) {
    const long digit = static_cast<long>(index % dims[f]);
    index /= dims[f];
    long w = static_cast<long>(dims[f]) - 1 - 2 * digit;
    if (flipped_input && f == 0) w = -w;
    jz += w;
  }
  return jz;
}

SectorPartition sector_partition(const std::vector<std::size_t>& dims,
                                 bool flipped_input) {
  if (dims.empty()) throw std::invalid_argument("sector_partition needs factors");
  const std::size_t total = dims_product(dims);
  std::map<long, std::vector<std::size_t>, std::greater<long>> sectors;
  for (std::size_t idx = 0; idx < total; ++idx)
    sectors[jz_of_index(idx, dims, flipped_input)].push_back(idx);

  SectorPartition part;
  part.flipped_input = flipped_input;
  for (auto& [label, group] : sectors) {
    part.labels.push_back(label);
    part.groups.push_back(std::move(group));
  }
  return part;
}

}  // namespace qclone
