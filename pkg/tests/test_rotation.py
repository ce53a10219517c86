"""Spacetime rotation: matrix-level ops and the symbolic circuit transform.

Dual-route checks: the symbolic instruction-list partial transpose is
verified against a dense matrix partial transpose built independently, and
rotated circuits are verified by running both the sequential circuit and its
dual (with post-selected projections) and comparing stabilizer groups.
"""
import numpy as np
import pytest

from spacetime_dual.circuit import Circuit, Instruction, run_tableau
from spacetime_dual.dense import DenseState
from spacetime_dual.pauli import PauliOperator
from spacetime_dual.rotation import (MalformedSequentialCircuit,
                                     NotControlledSwapForm,
                                     check_dual_unitary, partial_transpose,
                                     realize_nonunitary_q, rotate_gate_matrix,
                                     spacetime_rotate, swap_matrix,
                                     symbolic_partial_transpose,
                                     validate_controlled_swap)

I2 = np.eye(2)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Z = np.diag([1.0, -1.0]).astype(complex)
RX = (I2 - 1j * X) / np.sqrt(2)            # exp(-i pi/4 X)
RZ = np.diag(np.exp([-1j * np.pi / 4, 1j * np.pi / 4]))
RZZ = np.diag(np.exp(-1j * np.pi / 4 * np.array([1, -1, -1, 1])))
SWAP = swap_matrix(2)


def chain_u():
    """exp(-i pi/4 X_2) exp(-i pi/4 Z_1 Z_2), subsystem 1 major."""
    return np.kron(I2, RX) @ RZZ


def random_unitary(rng, d):
    a = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    q, r = np.linalg.qr(a)
    return q * (np.diag(r) / np.abs(np.diag(r)))


# ----------------------------------------------------------- matrix-level ops
def test_partial_transpose_involution_and_bell():
    rng = np.random.default_rng(31)
    for _ in range(100):
        u = random_unitary(rng, 4)
        assert np.max(np.abs(partial_transpose(partial_transpose(u)) - u)) < 1e-12
    # SWAP^{T2} = 2 |Phi+><Phi+|
    bell = np.zeros(4)
    bell[[0, 3]] = 1 / np.sqrt(2)
    assert np.allclose(partial_transpose(SWAP), 2 * np.outer(bell, bell),
                       atol=1e-12)
    # scalar multiplication commutes
    u = random_unitary(rng, 4)
    assert np.allclose(partial_transpose(3.7j * u), 3.7j * partial_transpose(u))


def test_partial_transpose_of_chain_gate_exchanges_rotation_order():
    q = partial_transpose(chain_u())
    expected = RZZ @ np.kron(I2, RX)       # ZZ rotation after the X rotation
    assert np.max(np.abs(q - expected)) < 1e-12


def test_validate_controlled_swap_swap_cx():
    cx = np.eye(4)[[0, 1, 3, 2]]           # control = major subsystem
    form = validate_controlled_swap(SWAP @ cx, control=0)
    assert np.allclose(form.branches[0], I2, atol=1e-12)
    assert np.allclose(form.branches[1], X, atol=1e-12)
    assert np.allclose(form.reassemble(), SWAP @ cx, atol=1e-12)


def test_validate_controlled_swap_chain_gate():
    u_full = SWAP @ chain_u()
    form = validate_controlled_swap(u_full, control=0)
    assert np.allclose(form.branches[0], RX @ RZ, atol=1e-12)
    assert np.allclose(form.branches[1], RX @ RZ.conj().T, atol=1e-12)


def test_validate_controlled_swap_rejects_bare_cz():
    cz = np.diag([1.0, 1, 1, -1]).astype(complex)
    with pytest.raises(NotControlledSwapForm):
        validate_controlled_swap(cz, control=0)


def test_check_dual_unitary():
    assert check_dual_unitary(SWAP)
    assert check_dual_unitary(SWAP @ chain_u())
    assert not check_dual_unitary(np.diag([1.0, 1, 1, -1]).astype(complex))
    # rotated SWAP gate is SWAP itself
    assert np.allclose(rotate_gate_matrix(SWAP), SWAP, atol=1e-12)


def test_realize_nonunitary_q_identity_and_random():
    rng = np.random.default_rng(32)
    frag = realize_nonunitary_q(np.eye(4, dtype=complex))
    vin = rng.normal(size=4) + 1j * rng.normal(size=4)
    vin /= np.linalg.norm(vin)
    vout, prob = frag.apply_dense(vin)
    assert abs(abs(np.vdot(vout, vin)) - 1.0) < 1e-9
    for _ in range(100):
        u = random_unitary(rng, 4)
        frag = realize_nonunitary_q(u)
        vin = rng.normal(size=4) + 1j * rng.normal(size=4)
        vin /= np.linalg.norm(vin)
        target = partial_transpose(u) @ vin
        if np.linalg.norm(target) < 1e-6:
            continue
        target /= np.linalg.norm(target)
        vout, prob = frag.apply_dense(vin)
        assert 0 < prob <= 1 + 1e-12
        assert abs(abs(np.vdot(vout, target)) - 1.0) < 1e-9


def test_realize_nonunitary_q_reproduces_unitary_chain_q():
    frag = realize_nonunitary_q(chain_u())
    assert np.allclose(4 * frag.q_matrix() @ frag.q_matrix().conj().T,
                       np.eye(4), atol=1e-10)
    assert np.allclose(frag.q_matrix() * 2, partial_transpose(chain_u()),
                       atol=1e-12)


# ----------------------------------------------- symbolic partial transpose
def instruction_list_matrix(instrs, n):
    dim = 1 << n
    u = np.eye(dim, dtype=complex)
    for ins in instrs:
        st = DenseState(n)
        cols = []
        for col in range(dim):
            st.vec = np.zeros(dim, dtype=complex)
            st.vec[col] = 1.0
            st.apply_named(ins.op, ins.targets, ins.pauli)
            cols.append(st.vec.copy())
        u = np.array(cols).T @ u
    return u


def random_peelable_block(rng, n_reg=1, n_phys=1):
    """Random block on wires [reg..., phys...] that the transpose rules cover:
    arbitrary register gates at the ends, a control-diagonal core inside."""
    n = n_reg + n_phys
    reg = list(range(n_reg))
    phys = list(range(n_reg, n))

    def reg_gates():
        return [Instruction(["H", "S", "X"][rng.integers(3)],
                            (int(rng.choice(reg)),))
                for _ in range(rng.integers(3))]

    core = []
    for _ in range(rng.integers(2, 8)):
        kind = rng.integers(3)
        if kind == 0:      # phys-only (includes non-symmetric S, H, Y)
            core.append(Instruction(["H", "S", "Y", "X"][rng.integers(4)],
                                    (int(rng.choice(phys)),)))
        elif kind == 1:    # diagonal two-site gate, any wires
            a, b = rng.choice(n, size=2, replace=False)
            core.append(Instruction("CZ", (int(a), int(b))))
        else:              # diagonal Pauli rotation, any wires
            sites = {int(q): "Z" for q in rng.choice(n, size=2, replace=False)}
            core.append(Instruction("EXP_P4", (),
                                    PauliOperator.from_sites(n, sites)))
    return reg_gates() + core + reg_gates(), set(phys)


def test_symbolic_partial_transpose_matches_dense():
    rng = np.random.default_rng(33)
    for trial in range(40):
        n_reg, n_phys = (1, 1) if trial < 20 else (2, 2)
        n = n_reg + n_phys
        instrs, phys = random_peelable_block(rng, n_reg, n_phys)
        q_instrs = symbolic_partial_transpose(instrs, phys)
        u = instruction_list_matrix(instrs, n)
        q = instruction_list_matrix(q_instrs, n)
        # transpose the phys legs of u (phys wires are the high dense bits)
        t = u.reshape([2] * (2 * n), order="F")
        perm = list(range(2 * n))
        for w in phys:
            perm[w], perm[n + w] = perm[n + w], perm[w]
        expected = t.transpose(perm).reshape(1 << n, 1 << n, order="F")
        # compare up to global phase (Y transposes drop a sign)
        k = np.argmax(np.abs(expected))
        ratio = q.flat[k] / expected.flat[k]
        assert abs(abs(ratio) - 1.0) < 1e-9
        assert np.max(np.abs(q - ratio * expected)) < 1e-9


def test_symbolic_partial_transpose_rejects_entangling_nondiagonal():
    instrs = [Instruction("CX", (0, 1))]
    with pytest.raises(NotControlledSwapForm):
        symbolic_partial_transpose(instrs, {1})


# --------------------------------------------------------- spacetime_rotate
def ghz_fcs(n):
    c = Circuit(n)
    for i in range(1, n):
        c.add("EXP_P4", pauli=PauliOperator.from_sites(n, {0: "Z", i: "Z"}))
        c.add("EXP_P4", pauli=PauliOperator.single(n, "X", i))
        c.add("SWAP", 0, i)
    return c


def dual_contains_sequential(su_state, dual_state, output_wires, sites):
    for k in range(su_state.n):
        g = su_state.stabilizer(k)
        if set(g.support) - set(sites):
            return None  # caller decides; generators must be chosen on sites
        emb = g.restricted(sites).embedded(dual_state.n,
                                           [output_wires[s] for s in sites])
        if dual_state.stabilizer_group_contains(emb) != "yes+":
            return False
    return True


def test_rotate_ghz_round_trip_dangling():
    for n in (3, 4, 6):
        seq = ghz_fcs(n)
        su, _ = run_tableau(seq, initial="+" * n)
        dual = spacetime_rotate(seq, [(i,) for i in range(n)],
                                initial="+" * n, boundary="dangling")
        assert dual.n_qubits == 2 * (n - 1) + 1
        dst, _ = run_tableau(dual.to_circuit("project"))
        assert dual_contains_sequential(su, dst, dual.output_wires,
                                        list(range(n))) is True


def test_rotate_ghz_fix_boundary_gives_smaller_ghz():
    # post-selecting the register output onto |+> leaves GHZ_{N-1}
    for n in (3, 5):
        seq = ghz_fcs(n)
        dual = spacetime_rotate(seq, [(i,) for i in range(n)],
                                initial="+" * n, boundary="fix",
                                boundary_state="+")
        assert dual.n_qubits == 2 * (n - 1)
        dst, _ = run_tableau(dual.to_circuit("project"))
        wires = [dual.output_wires[s] for s in range(1, n)]
        m = n - 1
        xs = PauliOperator.from_sites(m, {i: "X" for i in range(m)})
        assert dst.stabilizer_group_contains(
            xs.embedded(dst.n, wires)) == "yes+"
        for i in range(m - 1):
            zz = PauliOperator.from_sites(m, {i: "Z", i + 1: "Z"})
            assert dst.stabilizer_group_contains(
                zz.embedded(dst.n, wires)) == "yes+"


def test_rotate_bare_swaps_gives_product_output():
    n = 4
    seq = Circuit(n)
    for i in range(1, n):
        seq.add("SWAP", 0, i)
    dual = spacetime_rotate(seq, [(i,) for i in range(n)], initial="0" * n,
                            boundary="dangling")
    dst, _ = run_tableau(dual.to_circuit("project"))
    # every output wire carries a definite single-site state
    for s, wire in dual.output_wires.items():
        z = PauliOperator.single(dst.n, "Z", wire)
        assert dst.stabilizer_group_contains(z) in ("yes+", "yes-")


def test_rotate_rejects_non_sequential():
    n = 3
    seq = Circuit(n)        # interaction with cell 3 before cell 2
    seq.add("CZ", 0, 2)
    seq.add("SWAP", 0, 2)
    seq.add("CZ", 0, 1)
    seq.add("SWAP", 0, 1)
    with pytest.raises(MalformedSequentialCircuit):
        spacetime_rotate(seq, [(i,) for i in range(n)])
    seq2 = Circuit(n)       # missing terminating SWAP layer
    seq2.add("CZ", 0, 1)
    seq2.add("CZ", 0, 2)
    with pytest.raises(MalformedSequentialCircuit):
        spacetime_rotate(seq2, [(i,) for i in range(n)])
    seq3 = Circuit(n)       # direct gate between two non-register cells
    seq3.add("CZ", 1, 2)
    with pytest.raises(MalformedSequentialCircuit):
        spacetime_rotate(seq3, [(i,) for i in range(n)])


def test_rotate_q_layer_is_depth_one():
    n = 5
    seq = ghz_fcs(n)
    dual = spacetime_rotate(seq, [(i,) for i in range(n)], initial="+" * n)
    seen = set()
    for block in dual.q_layer:
        wires = set()
        for ins in block:
            wires |= set(ins.targets)
            if ins.pauli is not None:
                wires |= set(ins.pauli.support)
        assert not (wires & seen)
        seen |= wires
