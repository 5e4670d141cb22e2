// Copyright 2026 The qcpd Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <vector>

#include "qcpd/qcore.hpp"
#include "qcpd/rng.hpp"

namespace qcpd {

/// Signed Pauli string as GF(2) vectors: qubit k carries X if xs[k], Z if
/// zs[k], and Y when both are set. The operator is (-1)^sign times the
/// Hermitian Pauli product.
struct SignedPauli {
    std::vector<std::uint8_t> xs;
    std::vector<std::uint8_t> zs;
    bool sign = false;
};

/// Stabilizer tableau of a Clifford C: images C X_k C^dag and C Z_k C^dag.
struct CliffordTableau {
    int num_qubits = 0;
    std::vector<SignedPauli> x_images;
    std::vector<SignedPauli> z_images;

    /// Commutation relations of a valid symplectic basis.
    bool is_symplectic() const;
};

/// Uniformly random Clifford tableau.
///
/// The symplectic part follows the Bravyi-Maslov canonical form
/// (quantum Mallows permutation, Hadamard layer and two Hadamard-free
/// layers), the same construction Stim uses for Tableau::random. All 2n
/// image signs are uniform, so the result is uniform over the Clifford group
/// modulo global phase.
CliffordTableau random_clifford_tableau(int num_qubits, Rng &rng);

/// All 24 single-qubit Cliffords modulo phase (6 symplectic maps x 4 signs).
std::vector<CliffordTableau> all_single_qubit_cliffords();

/// Dense unitary C with C P C^dag equal to every listed image.
///
/// Column x is P_x C|0>, where C|0> is the common +1 eigenvector of the Z
/// images and P_x multiplies the X images selected by the bits of x. The
/// global phase is fixed so the largest-modulus entry of C|0> is positive.
ComplexMatrix tableau_to_unitary(const CliffordTableau &tableau);

/// Dense matrix of a signed Pauli.
ComplexMatrix signed_pauli_matrix(const SignedPauli &p);

}  // namespace qcpd
