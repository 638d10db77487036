#pragma once

#include <cstddef>
#include <vector>

#include "qclone/dense.hpp"

namespace qclone {

// Collective spin operators in the doubled normalization (d = 2 gives the
// Pauli matrices; S^Z eigenvalues step by 2).
struct SpinOps {
  std::size_t d;
  ComplexMatrix sx, sy, sz;
};

SpinOps spin_operators(std::size_t d);

// Permutation-symmetric ladder state of m sites of dimension d with k
// excitations, generated from |0...0> by collective lowering.
PureState dicke_state(std::size_t m, std::size_t d, std::size_t k);

// Computational-basis indices grouped by total-J_Z eigenvalue. When
// flipped_input is set the first factor contributes -S^Z, matching the
// symmetry of the cloning operators in their natural basis.
struct SectorPartition {
  std::vector<long> labels;  // descending J_Z eigenvalues
  std::vector<std::vector<std::size_t>> groups;
  bool flipped_input = false;
};

SectorPartition sector_partition(const std::vector<std::size_t>& dims,
                                 bool flipped_input);

// J_Z eigenvalue of a single computational-basis index.
long jz_of_index(std::size_t index, const std::vector<std::size_t>& dims,
                 bool flipped_input);

}  // namespace qclone
