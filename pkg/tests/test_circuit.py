"""Circuit IR: serialization, validation, mid-circuit ops, Heisenberg rules.

The Heisenberg conjugation rules are cross-validated against explicitly built
dense unitary matrices: for every gate U and random Pauli P we check
U P U^dag == matrix(conjugate_by_pauli_rules(U, P)) entrywise.
"""
import numpy as np
import pytest

from spacetime_dual.circuit import (Circuit, Instruction, MalformedCircuit,
                                    conjugate_by_circuit,
                                    conjugate_by_pauli_rules, run_dense,
                                    run_tableau)
from spacetime_dual.dense import DenseState, pauli_matrix
from spacetime_dual.pauli import PauliOperator
from spacetime_dual.tableau import StabilizerState

from test_tableau import random_clifford_circuit


def instruction_matrix(ins: Instruction, n: int) -> np.ndarray:
    """Full 2^n x 2^n matrix of a unitary instruction, built column by column."""
    dim = 1 << n
    u = np.zeros((dim, dim), dtype=complex)
    for col in range(dim):
        st = DenseState.product("0" * n)
        st.vec = np.zeros(dim, dtype=complex)
        st.vec[col] = 1.0
        st.apply_named(ins.op, ins.targets, ins.pauli)
        u[:, col] = st.vec
    return u


def test_json_round_trip():
    n = 4
    c = Circuit(n)
    c.add("H", 0)
    c.add("CX", 0, 1)
    c.add("EXP_P4", pauli=PauliOperator.from_label("-XZIY"))
    c.add("CTRL_P", 2, pauli=PauliOperator.from_sites(n, {0: "X", 3: "Z"}))
    c.add("M_P", 1, pauli=PauliOperator.single(n, "Z", 1), cbits=(0,))
    c.add("BELL_MEAS", 2, 3, cbits=(1, 2))
    c.add("PROJ_P", pauli=PauliOperator.single(n, "X", 0), sign=-1)
    c.add("RESET", 3, state="+")
    c.add("BELL_SRC", 0, 1)
    c.add("CPAULI", pauli=PauliOperator.single(n, "X", 2), cbits=(1,))
    c.validate()
    again = Circuit.from_json(c.to_json())
    assert again.to_json_dict() == c.to_json_dict()
    assert again.n_cbits == 3
    assert not again.is_unitary()


def test_validation_rejects_malformed():
    c = Circuit(2)
    c.add("BOGUS", 0)
    with pytest.raises(MalformedCircuit):
        c.validate()
    c = Circuit(2)
    c.add("H", 5)
    with pytest.raises(MalformedCircuit):
        c.validate()
    c = Circuit(2)  # read-before-write classical bit
    c.add("CPAULI", pauli=PauliOperator.single(2, "X", 0), cbits=(0,))
    with pytest.raises(MalformedCircuit):
        c.validate()
    c = Circuit(2)  # CTRL_P axis overlapping its control
    c.add("CTRL_P", 0, pauli=PauliOperator.from_sites(2, {0: "X", 1: "Z"}))
    with pytest.raises(MalformedCircuit):
        c.validate()
    c = Circuit(2)
    c.add("RESET", 0, state="1")
    with pytest.raises(MalformedCircuit):
        c.validate()
    with pytest.raises(MalformedCircuit):
        Circuit.from_json('{"version": 99, "n_qubits": 1, "instructions": []}')


def test_conjugation_rules_match_dense_matrices():
    rng = np.random.default_rng(21)
    n = 3
    for trial in range(200):
        circ = random_clifford_circuit(rng, n, depth=1)
        ins = circ.instructions[0]
        u = instruction_matrix(ins, n)
        assert np.allclose(u @ u.conj().T, np.eye(1 << n), atol=1e-10)
        x, z = int(rng.integers(1 << n)), int(rng.integers(1 << n))
        p = PauliOperator(n, x, z, (int.bit_count(x & z) + 2 * int(rng.integers(2))) % 4)
        img = conjugate_by_pauli_rules(ins, p)
        lhs = u @ pauli_matrix(p) @ u.conj().T
        assert np.allclose(lhs, pauli_matrix(img), atol=1e-10), (ins, p.label())


def test_conjugation_by_whole_circuit_matches_dense():
    rng = np.random.default_rng(22)
    n = 3
    for trial in range(20):
        circ = random_clifford_circuit(rng, n, depth=10)
        u = np.eye(1 << n, dtype=complex)
        for ins in circ.instructions:
            u = instruction_matrix(ins, n) @ u
        x, z = int(rng.integers(1 << n)), int(rng.integers(1 << n))
        p = PauliOperator(n, x, z, int.bit_count(x & z))
        img = conjugate_by_circuit(circ, p)
        assert np.allclose(u @ pauli_matrix(p) @ u.conj().T, pauli_matrix(img),
                           atol=1e-10)


def test_conjugation_requires_unitary_circuit():
    c = Circuit(1)
    c.add("M_P", 0, pauli=PauliOperator.single(1, "Z", 0), cbits=(0,))
    with pytest.raises(MalformedCircuit):
        conjugate_by_circuit(c, PauliOperator.single(1, "X", 0))


def test_bell_source_and_bell_measurement():
    c = Circuit(2)
    c.add("BELL_SRC", 0, 1)
    tab, _ = run_tableau(c)
    assert tab.stabilizer_group_contains(PauliOperator.from_label("+XX")) == "yes+"
    assert tab.stabilizer_group_contains(PauliOperator.from_label("+ZZ")) == "yes+"
    # Bell measurement of a fresh pair post-selected onto (+1, +1) gives |Phi+>
    c2 = Circuit(2)
    c2.add("BELL_MEAS", 0, 1, cbits=(0, 1))
    tab2, rec = run_tableau(c2, forced_outcomes=[1, 1],
                            initial="00")
    assert rec.outcomes == [1, 1]
    assert tab2.stabilizer_group_contains(PauliOperator.from_label("+XX")) == "yes+"


def test_feedback_corrects_forced_branch():
    # measure Z on |+>, forced onto -1, then X feedback restores |0>
    c = Circuit(1)
    c.add("M_P", 0, pauli=PauliOperator.single(1, "Z", 0), cbits=(0,))
    c.add("CPAULI", pauli=PauliOperator.single(1, "X", 0), cbits=(0,))
    tab, rec = run_tableau(c, forced_outcomes=[-1], initial="+")
    assert rec.outcomes == [-1]
    assert tab.expectation(PauliOperator.single(1, "Z", 0)) == 1
    den, drec = run_dense(c, forced_outcomes=[-1], initial="+")
    assert drec.outcomes == [-1]
    assert abs(den.expectation(PauliOperator.single(1, "Z", 0)) - 1.0) < 1e-12


def test_reset_and_projection_agree_across_engines():
    rng = np.random.default_rng(23)
    for trial in range(10):
        n = 3
        c = Circuit(n).extend(random_clifford_circuit(rng, n, depth=8))
        c.add("RESET", int(rng.integers(n)), state="0+"[rng.integers(2)])
        c.extend(random_clifford_circuit(rng, n, depth=4))
        tab, _ = run_tableau(c, rng=np.random.default_rng(1000 + trial))
        den, _ = run_dense(c, rng=np.random.default_rng(1000 + trial))
        for k in range(n):
            assert abs(den.expectation(tab.stabilizer(k)) - 1.0) < 1e-9
