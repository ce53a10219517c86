"""Matrix-product states: canonical forms, unitary dilations, bond channels.

An MPS is a list of complex arrays of shape ``(D_left, 2, D_right)`` whose
chain contraction (boundary bond dimensions 1) gives the amplitudes of an
``n``-qubit state, with tensor ``k`` supplying the physical index of qubit
``k``.  Left-canonical tensors are isometries from the right bond into
(left bond, physical), so the chain can be generated *sequentially from its
right end* by a two-register circuit: a bond register of at most two qubits
and one fresh physical qubit per step.  ``dilate_mps`` completes those
isometries into unitaries, which is what the constant-qubit measurement
protocols consume.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dense import DenseState, build_deformed_ghz, DeformedGhzSpec

CANONICAL_ATOL = 1e-10
TRUNCATION_TOL = 1e-12
MAX_DILATION_BOND = 4


class NonIsometricTensor(ValueError):
    """Canonicalized tensors failed the isometry check (ill-conditioned input)."""


# ------------------------------------------------------------------ conversion
def mps_to_dense(tensors: list[np.ndarray]) -> DenseState:
    """Contract the chain into a dense state (little-endian: tensor k = qubit k)."""
    n = len(tensors)
    acc = np.ones((1, 1), dtype=complex)  # (configurations, right bond)
    for a in tensors:
        a = np.asarray(a, dtype=complex)
        acc = np.einsum("cl,lpr->cpr", acc, a).reshape(-1, a.shape[2])
    # the config index grew with each new physical index as the fastest axis,
    # so axis k of the C-order reshape is qubit k; flatten little-endian.
    psi = acc.reshape((2,) * n)
    out = DenseState(n)
    out.vec = np.transpose(psi, tuple(reversed(range(n)))).reshape(1 << n)
    return out


def dense_to_mps(state: DenseState, tol: float = TRUNCATION_TOL) -> list[np.ndarray]:
    """Exact left-canonical MPS of a dense state via sequential SVD."""
    n = state.n
    psi = state.vec.reshape((2,) * n, order="F")  # axis q = qubit q
    tensors: list[np.ndarray] = []
    chi = 1
    rest = psi.reshape(1, -1)
    for _ in range(n - 1):
        m = rest.reshape(chi * 2, -1)
        u, s, vh = np.linalg.svd(m, full_matrices=False)
        keep = s > tol * s[0]
        u, s, vh = u[:, keep], s[keep], vh[keep]
        tensors.append(u.reshape(chi, 2, -1))
        chi = int(u.shape[1])
        rest = (s[:, None] * vh)
    tensors.append(rest.reshape(chi, 2, 1))
    return tensors


def canonicalize(tensors: list[np.ndarray]) -> list[np.ndarray]:
    """Left-canonicalize by a QR sweep; the state is preserved up to norm."""
    out: list[np.ndarray] = []
    carry = np.ones((1, 1), dtype=complex)
    for k, a in enumerate(tensors):
        a = np.einsum("lm,mpr->lpr", carry, np.asarray(a, dtype=complex))
        dl, _, dr = a.shape
        q, r = np.linalg.qr(a.reshape(dl * 2, dr))
        # fix the QR gauge so R has a positive diagonal: tensors that are
        # already left-canonical then pass through completely unchanged
        diag = np.diag(r).copy()
        diag[np.abs(diag) < 1e-14] = 1.0
        phase = diag / np.abs(diag)
        q = q * phase[None, :]
        r = r / phase[:, None]
        out.append(q.reshape(dl, 2, -1))
        carry = r
    # carry is now a 1x1 scalar: the norm (and global phase) of the chain.
    scale = carry[0, 0]
    if abs(scale) < 1e-12:
        raise NonIsometricTensor("chain contracts to the zero state")
    out[-1] = out[-1] * (scale / abs(scale))
    for a in out:
        if not is_left_canonical(a):
            raise NonIsometricTensor("QR sweep did not produce an isometric tensor")
    return out


def is_left_canonical(a: np.ndarray, atol: float = CANONICAL_ATOL) -> bool:
    a = np.asarray(a, dtype=complex)
    dl, _, dr = a.shape
    m = a.reshape(dl * 2, dr)
    return bool(np.allclose(m.conj().T @ m, np.eye(dr), atol=atol))


# -------------------------------------------------------------------- dilation
@dataclass(frozen=True)
class MpsUnitaryDilation:
    """Unitary completion of a left-canonical chain.

    ``unitaries[k]`` acts on (bond register, fresh qubit); the bond register
    holds ``n_bond_qubits`` qubits (low bits of the gate index) and the fresh
    physical qubit is the top bit.  Restricted to fresh input |0> and bond
    input ``r < tensors[k].shape[2]``, gate ``k`` maps ``|r>|0>`` to
    ``sum_{l,p} A_k[l,p,r] |l>|p>`` — i.e. it reproduces the tensor exactly.
    The chain is generated by applying the gates from the last tensor to the
    first, with the fresh qubit reset to |0> before every gate.
    """

    tensors: tuple[np.ndarray, ...]
    unitaries: tuple[np.ndarray, ...]
    n_bond_qubits: int
    bond_dim: int
    fresh_input: int = 0  # computational-basis state of the fresh qubit


def _complete_isometry(cols: np.ndarray, dim: int) -> np.ndarray:
    """Extend orthonormal columns to a full unitary (Gram-Schmidt completion)."""
    have = cols.shape[1]
    basis = [cols[:, j] for j in range(have)]
    for cand in range(dim):
        if len(basis) == dim:
            break
        v = np.zeros(dim, dtype=complex)
        v[cand] = 1.0
        for b in basis:
            v = v - np.vdot(b, v) * b
        nrm = np.linalg.norm(v)
        if nrm > 1e-7:
            basis.append(v / nrm)
    if len(basis) != dim:
        raise NonIsometricTensor("could not complete the isometry to a unitary")
    return np.stack(basis, axis=1)


def dilate_tensor(a: np.ndarray, n_bond_qubits: int) -> np.ndarray:
    """Unitary on (bond register, fresh qubit) whose |fresh=0> block is the tensor."""
    a = np.asarray(a, dtype=complex)
    dl, _, dr = a.shape
    pad = 1 << n_bond_qubits
    dim = 2 * pad
    spec = np.zeros((dim, dr), dtype=complex)
    for r in range(dr):
        for l in range(dl):
            for p in range(2):
                spec[l + (p << n_bond_qubits), r] = a[l, p, r]
    gram = spec.conj().T @ spec
    if not np.allclose(gram, np.eye(dr), atol=CANONICAL_ATOL):
        raise NonIsometricTensor("tensor is not left-canonical")
    full = _complete_isometry(spec, dim)
    # place the specified columns at input index (bond=r, fresh=0)
    u = np.zeros((dim, dim), dtype=complex)
    used = set()
    for r in range(dr):
        u[:, r] = spec[:, r]
        used.add(r)
    extra = iter(full.T[dr:])
    for c in range(dim):
        if c not in used:
            u[:, c] = next(extra)
    return u


def dilate_mps(tensors: list[np.ndarray]) -> MpsUnitaryDilation:
    """Per-site unitary completion of a chain (canonicalized first)."""
    canon = canonicalize(tensors)
    bond = max(max(a.shape[0], a.shape[2]) for a in canon)
    if bond > MAX_DILATION_BOND:
        raise NonIsometricTensor(f"bond dimension {bond} exceeds the dilation cap")
    nb = 0 if bond == 1 else int(math.ceil(math.log2(bond)))
    gates = tuple(dilate_tensor(a, nb) for a in canon)
    return MpsUnitaryDilation(tuple(canon), gates, nb, bond)


# ---------------------------------------------------------------- bond channel
def apply_bond_channel(a: np.ndarray, rho: np.ndarray) -> np.ndarray:
    """One sequential step on the bond density matrix: sum_p A_p rho A_p^dag.

    ``rho`` lives on the right bond of the tensor; the output lives on its
    left bond (the generation sweep runs right to left).
    """
    a = np.asarray(a, dtype=complex)
    return sum(a[:, p, :] @ rho @ a[:, p, :].conj().T for p in range(2))


_X2 = np.array([[0, 1], [1, 0]], dtype=complex)


def bond_autocorrelator(a: np.ndarray, length: int) -> float:
    """Exact reset-probe value: bond starts in |+>, `length` steps, then <X>."""
    d = a.shape[2]
    plus = np.ones(d, dtype=complex) / math.sqrt(d)
    rho = np.outer(plus, plus.conj())
    for _ in range(length):
        rho = apply_bond_channel(a, rho)
    x = _pauli_x(rho.shape[0])
    return float(np.real(np.trace(x @ rho)))


def bond_autocorrelator_epr(a: np.ndarray, length: int) -> float:
    """Ancilla variant: start (|++> + |-->)/sqrt(2), evolve the bond, read <X X>.

    Equals the reset variant exactly whenever the tensor's bond channel is
    X-covariant, which is what the disorder reduction requires.
    """
    d = a.shape[2]
    if d != 2:
        raise ValueError("the EPR variant is defined for a single bond qubit")
    plus = np.array([1, 1], dtype=complex) / math.sqrt(2)
    minus = np.array([1, -1], dtype=complex) / math.sqrt(2)
    pair = (np.kron(plus, plus) + np.kron(minus, minus)) / math.sqrt(2)
    rho = np.outer(pair, pair.conj())  # index = ancilla (x) bond, row-major kron
    xx = np.kron(_X2, _X2)
    for _ in range(length):
        # evolve the bond factor (second kron slot) only
        r4 = rho.reshape(2, 2, 2, 2)  # (anc, bond, anc', bond')
        out = np.zeros_like(r4)
        for p in range(2):
            ap = a[:, p, :]
            out += np.einsum("lb,abcd,md->alcm", ap, r4, ap.conj())
        rho = out.reshape(4, 4)
    return float(np.real(np.trace(xx @ rho)))


def _pauli_x(d: int) -> np.ndarray:
    if d == 1:
        return np.eye(1, dtype=complex)
    if d == 2:
        return _X2
    raise ValueError("bond observable defined for bond dimension 1 or 2")


# ---------------------------------------------------------------- state chains
def paramagnet_mps(n: int) -> list[np.ndarray]:
    """|+...+> as a bond-dimension-1 chain."""
    t = np.array([[1.0], [1.0]], dtype=complex).reshape(1, 2, 1) / math.sqrt(2)
    return [t.copy() for _ in range(n)]


def ghz_bulk_tensor() -> np.ndarray:
    """Copy tensor delta_{l p r}; both left- and right-canonical."""
    a = np.zeros((2, 2, 2), dtype=complex)
    a[0, 0, 0] = a[1, 1, 1] = 1.0
    return a


def ghz_mps(n: int) -> list[np.ndarray]:
    bulk = ghz_bulk_tensor()
    first = np.zeros((1, 2, 2), dtype=complex)
    first[0, 0, 0] = first[0, 1, 1] = 1.0
    last = np.zeros((2, 2, 1), dtype=complex)
    last[0, 0, 0] = last[1, 1, 0] = 1.0 / math.sqrt(2)
    return canonicalize([first] + [bulk.copy() for _ in range(n - 2)] + [last])


def cluster_bulk_tensor() -> np.ndarray:
    """Chain tensor A[l,p,r] = delta_{pr} (-1)^{lr} / sqrt(2).

    The physical leg copies the right (incoming) bond and the left (outgoing)
    bond picks up the graph-state phase; contraction over a chain yields the
    open-boundary cluster state prod_{k} CZ_{k,k+1} |+...+>.
    """
    a = np.zeros((2, 2, 2), dtype=complex)
    for l in range(2):
        for r in range(2):
            a[l, r, r] = (-1.0) ** (l * r) / math.sqrt(2)
    return a


def cluster_mps(n: int) -> list[np.ndarray]:
    bulk = cluster_bulk_tensor()
    first = np.zeros((1, 2, 2), dtype=complex)
    for r in range(2):
        first[0, r, r] = 1.0
    last = np.zeros((2, 2, 1), dtype=complex)
    for l in range(2):
        for p in range(2):
            last[l, p, 0] = (-1.0) ** (l * p) / math.sqrt(2)
    return canonicalize([first] + [bulk.copy() for _ in range(n - 2)] + [last])


def deformed_ghz_mps(beta: float, n: int) -> list[np.ndarray]:
    """Interior-deformed GHZ chain, bulk tensor extracted numerically.

    The bulk tensor is obtained by compressing the dense three-site state
    (whose single interior site carries the deformation) and taking its middle
    left-canonical tensor; the boundary tensors come from the same
    decomposition.  The construction is validated against the dense build.
    """
    if n < 3:
        raise ValueError("the deformed chain needs at least three sites")
    small = dense_to_mps(build_deformed_ghz(DeformedGhzSpec(3, beta)))
    first, bulk, last = small
    return canonicalize([first] + [bulk.copy() for _ in range(n - 2)] + [last])
