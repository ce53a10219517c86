"""Symmetry-table derivation and defect decoding.

Dual-route checks: every table entry found by the exhaustive search is
re-verified here through the dense matrix route (explicit Pauli matrices
acting on the flattened tensor), independent of the bitmask application used
inside the search itself.
"""

import itertools

import numpy as np
import pytest

from spacetime_dual.circuit import run_tableau
from spacetime_dual.decoders import (GaugeSiteError, MfSymmetryTable,
                                     OutcomeSyndrome, UncorrectableDefect,
                                     decode_ghz_gauge, decode_mf_chain,
                                     derive_mf_table)
from spacetime_dual.dense import pauli_matrix
from spacetime_dual.models import ModelId, build_dual_q_circuit, reference_stabilizers
from spacetime_dual.pauli import PauliOperator
from spacetime_dual.tensors import (TensorSpec, cluster_chain_tensor,
                                    even_parity_tensor,
                                    even_parity_tensor_with_copies,
                                    ghz_chain_tensor)


def entry_fixes_tensor_dense(tensor, leg, axis, entry):
    """Independent oracle: apply defect x entry as an explicit matrix."""
    op = PauliOperator.single(tensor.arity, axis, leg) * entry
    vec = tensor.as_vector()
    return np.allclose(pauli_matrix(op) @ vec, vec, atol=1e-12)


def test_ghz_tensor_table_matches_known_relations():
    table = derive_mf_table(ghz_chain_tensor())
    expected = {(0, "X"): "+IXX", (0, "Z"): "+IZI",
                (2, "X"): "+XXI", (2, "Z"): "+IZI"}
    assert {k: v.label() for k, v in table.entries.items()} == expected


@pytest.mark.parametrize("tensor", [ghz_chain_tensor(), cluster_chain_tensor(),
                                    even_parity_tensor(),
                                    even_parity_tensor_with_copies()])
def test_table_entries_fix_tensor_entrywise(tensor):
    table = derive_mf_table(tensor)
    assert table.entries, "structured tensors must have symmetry entries"
    for (leg, axis), entry in table.entries.items():
        assert ((entry.x | entry.z) >> leg) & 1 == 0  # identity on the defect leg
        assert entry_fixes_tensor_dense(tensor, leg, axis, entry)


def test_every_bond_defect_of_chain_and_loop_tensors_is_correctable():
    for tensor in (ghz_chain_tensor(), cluster_chain_tensor(),
                   even_parity_tensor(), even_parity_tensor_with_copies()):
        table = derive_mf_table(tensor)
        for leg in tensor.bond_legs:
            for axis in ("X", "Z"):
                assert table.correction(leg, axis) is not None


def test_random_tensor_has_no_symmetry():
    rng = np.random.default_rng(3)
    arr = rng.normal(size=(2, 2, 2)) + 1j * rng.normal(size=(2, 2, 2))
    table = derive_mf_table(TensorSpec("random", arr, (1,), (0, 2)))
    assert table.entries == {}


def test_ghz_tensor_is_chain_gate_on_plus_input():
    # The copy tensor must coincide (up to one overall scalar) with the
    # matrix elements <p,r| u (|l> (x) |+>) of the aligning two-qubit gate
    # u = exp(-i pi/4 X_2) exp(-i pi/4 Z_1 Z_2).
    from test_rotation import chain_u
    u = chain_u()
    plus = np.array([1, 1]) / np.sqrt(2)
    t = np.zeros((2, 2, 2), dtype=complex)
    for l in range(2):
        inp = np.kron(np.eye(2)[l], plus)  # control on the major slot, target |+>
        out = u @ inp
        for p in range(2):
            for r in range(2):
                t[l, p, r] = out[2 * p + r]
    # identify the axis convention by proportionality with the copy tensor
    ref = ghz_chain_tensor().array
    candidates = []
    for perm in itertools.permutations(range(3)):
        tt = np.transpose(t, perm)
        scale = tt.reshape(-1) @ ref.reshape(-1).conj()
        if abs(scale) > 1e-9 and np.allclose(tt, scale / 2 * ref, atol=1e-9):
            candidates.append(perm)
    assert candidates, "gate-on-|+> matrix elements are not a copy tensor"


# --------------------------------------------------------------- gauge decode
def test_gauge_decode_paired_defects_give_interior_string():
    assert decode_ghz_gauge({2, 8}, 12).label() == "+IIXIXIXIIIII"


def test_gauge_decode_empty_is_identity():
    assert decode_ghz_gauge(set(), 8).weight == 0


def test_gauge_decode_rejects_matter_sites():
    with pytest.raises(GaugeSiteError):
        decode_ghz_gauge({3}, 8)
    with pytest.raises(GaugeSiteError):
        decode_ghz_gauge({10}, 8)


def test_gauge_decode_exhaustive_on_measured_dual():
    # Every gauge outcome pattern must decode back to the exact GHZ group.
    for n in (2, 3, 4):
        model = ModelId("ghz1d", n=n)
        dual = build_dual_q_circuit(model)
        circ = dual.to_circuit("measure")
        wires = [dual.output_wires[k] for k in range(n)]
        refs = reference_stabilizers(model)
        for pat in itertools.product((1, -1), repeat=len(dual.projections)):
            state, _ = run_tableau(circ, forced_outcomes=list(pat))
            defects = [dual.projections[k][0] + 2
                       for k, o in enumerate(pat) if o == -1]
            corr = decode_ghz_gauge(defects, 2 * n)
            state.apply_pauli(PauliOperator.from_sites(
                state.n, {q + 1: corr.site(q) for q in corr.support}))
            assert all(state.stabilizer_group_contains(
                g.embedded(state.n, wires)) == "yes+" for g in refs)


# --------------------------------------------------------------- chain decode
def test_chain_decode_trivial_syndrome_is_identity():
    table = derive_mf_table(ghz_chain_tensor())
    syn = OutcomeSyndrome("ghz1d", ((0, 0), (0, 0), (0, 0)))
    assert decode_mf_chain(syn, table).weight == 0


def test_chain_decode_single_defect_frozen_frames():
    table = derive_mf_table(ghz_chain_tensor())
    # ZZ = -1 on bond 1 inserts an X which pushes right as X on every later
    # site; XX = -1 inserts a Z absorbed locally on the next site.
    syn_x = OutcomeSyndrome("ghz1d", ((0, 0), (0, 1), (0, 0), (0, 0)))
    assert decode_mf_chain(syn_x, table).label() == "+IIXXX"
    syn_z = OutcomeSyndrome("ghz1d", ((0, 0), (1, 0), (0, 0), (0, 0)))
    assert decode_mf_chain(syn_z, table).label() == "+IIZII"


def test_chain_decode_uncorrectable_without_entries():
    empty = MfSymmetryTable(ghz_chain_tensor(), {})
    syn = OutcomeSyndrome("ghz1d", ((1, 0),))
    with pytest.raises(UncorrectableDefect):
        decode_mf_chain(syn, empty)
