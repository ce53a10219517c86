"""Dense state-vector simulator (oracle engine, <= 14 qubits).

Qubit ``q`` corresponds to bit ``q`` of the basis-state index (little-endian).
Deformations exp(beta X) are applied with exact cosh/sinh closed forms and the
lost norm is tracked in ``log_norm`` so non-unitary evolutions stay auditable.
"""
from __future__ import annotations

import math

import numpy as np

from .pauli import PauliOperator

MAX_DENSE_QUBITS = 14

UNITARY_ATOL = 1e-10
FIDELITY_ATOL = 1e-9
NORM_ATOL = 1e-12

_H = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)
_S = np.diag([1, 1j])
_X = np.array([[0, 1], [1, 0]], dtype=complex)
_Y = np.array([[0, -1j], [1j, 0]])
_Z = np.diag([1.0 + 0j, -1.0])
_GATES_1Q = {"H": _H, "S": _S, "SDG": _S.conj(), "X": _X, "Y": _Y, "Z": _Z}


def apply_pauli_to_vector(p: PauliOperator, v: np.ndarray) -> np.ndarray:
    """Apply a Pauli operator to a state vector without building its matrix."""
    dim = v.shape[0]
    idx = np.arange(dim)
    signs = np.zeros(dim, dtype=np.int64)
    z = p.z
    while z:
        low = z & -z
        q = low.bit_length() - 1
        signs ^= (idx >> q) & 1
        z ^= low
    out = np.empty_like(v)
    out[idx ^ p.x] = (1j ** (p.e % 4)) * np.where(signs, -1, 1) * v
    return out


def pauli_matrix(p: PauliOperator) -> np.ndarray:
    """Dense 2^n x 2^n matrix of a Pauli operator (n small)."""
    mats = {"I": np.eye(2, dtype=complex), "X": _X, "Y": _Y, "Z": _Z}
    out = np.array([[1.0 + 0j]])
    # qubit 0 is the least-significant bit: kron from the top qubit down
    for q in reversed(range(p.n)):
        out = np.kron(out, mats[p.site(q)])
    return (1j ** p.phase_exponent) * out


class DenseState:
    """A normalized dense state vector with norm bookkeeping."""

    def __init__(self, n: int, vec: np.ndarray | None = None):
        if n > MAX_DENSE_QUBITS:
            raise ValueError(f"dense engine capped at {MAX_DENSE_QUBITS} qubits")
        self.n = n
        if vec is None:
            vec = np.zeros(1 << n, dtype=complex)
            vec[0] = 1.0
        self.vec = np.asarray(vec, dtype=complex).reshape(1 << n)
        self.log_norm = 0.0

    @classmethod
    def product(cls, spec: str) -> "DenseState":
        s = cls(len(spec))
        for q, ch in enumerate(spec):
            if ch == "+":
                s.apply_1q("H", q)
            elif ch != "0":
                raise ValueError(f"unknown product-state symbol {ch!r}")
        return s

    @classmethod
    def plus_state(cls, n: int) -> "DenseState":
        return cls.product("+" * n)

    def copy(self) -> "DenseState":
        out = DenseState(self.n, self.vec.copy())
        out.log_norm = self.log_norm
        return out

    # ------------------------------------------------------------------ gates
    def apply_1q(self, name: str, q: int) -> None:
        self.apply_unitary(_GATES_1Q[name], [q])

    def apply_unitary(self, u: np.ndarray, qubits: list[int],
                      check_unitary: bool = False) -> None:
        """Apply a k-local unitary, k <= 4.

        ``u`` is indexed with qubits[0] as the least-significant bit of both
        row and column index.
        """
        k = len(qubits)
        if k > 4:
            raise ValueError("local unitaries capped at 4 qubits")
        if u.shape != (1 << k, 1 << k):
            raise ValueError("operator shape does not match qubit count")
        if check_unitary:
            err = np.abs(u.conj().T @ u - np.eye(1 << k)).max()
            if err > UNITARY_ATOL:
                raise ValueError(f"matrix is not unitary (deviation {err:.2e})")
        n = self.n
        # reshape to tensor with axis per qubit; axis q is bit q -> use
        # Fortran-style trick: view as (2,)*n with axis 0 = qubit 0
        t = self.vec.reshape((2,) * n, order="F")
        t = np.moveaxis(t, qubits, range(k))
        shape = t.shape
        t = t.reshape(1 << k, -1, order="F")
        t = u @ t
        t = t.reshape(shape, order="F")
        t = np.moveaxis(t, range(k), qubits)
        self.vec = t.reshape(1 << n, order="F")

    def apply_named(self, name: str, targets: tuple[int, ...],
                    pauli: PauliOperator | None = None) -> None:
        if name in _GATES_1Q:
            self.apply_1q(name, targets[0])
        elif name == "CX":
            u = np.eye(4, dtype=complex)[[0, 3, 2, 1]]  # control = qubit bit0
            self.apply_unitary(u, list(targets))
        elif name == "CZ":
            self.apply_unitary(np.diag([1, 1, 1, -1]).astype(complex), list(targets))
        elif name == "SWAP":
            u = np.eye(4, dtype=complex)[[0, 2, 1, 3]]
            self.apply_unitary(u, list(targets))
        elif name == "EXP_P4":
            self.apply_exp_pauli(pauli, unitary_angle=True)
        elif name == "CTRL_P":
            c = targets[0]
            mask = np.where((np.arange(1 << self.n) >> c) & 1 == 1)[0]
            branch = self._pauli_vec(pauli, self.vec)
            self.vec = self.vec.copy()
            self.vec[mask] = branch[mask]
        else:
            raise ValueError(f"unknown unitary gate {name!r}")

    # --------------------------------------------------------------- Paulis
    def apply_pauli(self, p: PauliOperator) -> None:
        self.vec = self._pauli_vec(p, self.vec)

    def _pauli_vec(self, p: PauliOperator, v: np.ndarray) -> np.ndarray:
        return apply_pauli_to_vector(p, v)

    def apply_exp_pauli(self, p: PauliOperator, beta: float | None = None,
                        unitary_angle: bool = False) -> None:
        """Apply exp(beta P) (non-unitary) or exp(-i pi/4 P) (unitary).

        Closed forms: exp(beta P) = cosh(beta) + sinh(beta) P and
        exp(-i pi/4 P) = (1 - i P)/sqrt(2), exact for P^2 = 1.
        """
        if not p.is_hermitian:
            raise ValueError("exponent axis must be Hermitian")
        pv = self._pauli_vec(p, self.vec)
        if unitary_angle:
            c = math.cos(math.pi / 4)
            self.vec = c * self.vec - 1j * math.sin(math.pi / 4) * pv
        else:
            self.vec = math.cosh(beta) * self.vec + math.sinh(beta) * pv
            nrm = float(np.linalg.norm(self.vec))
            if nrm < NORM_ATOL:
                raise ValueError("state annihilated by deformation")
            self.log_norm += math.log(nrm)
            self.vec /= nrm

    # ----------------------------------------------------------- observables
    def expectation(self, p: PauliOperator) -> complex:
        return complex(np.vdot(self.vec, self._pauli_vec(p, self.vec)))

    def inner_product(self, other: "DenseState") -> complex:
        return complex(np.vdot(other.vec, self.vec))

    def fidelity(self, other: "DenseState") -> float:
        """|<other|self>|^2 — global phase quotiented out."""
        return abs(self.inner_product(other)) ** 2

    def norm(self) -> float:
        return float(np.linalg.norm(self.vec))

    # ----------------------------------------------- measurement / projection
    def project_pauli(self, p: PauliOperator, sign: int = 1) -> float:
        """Project onto the sign eigenspace of P; returns the branch probability."""
        pv = self._pauli_vec(p, self.vec)
        proj = 0.5 * (self.vec + sign * pv)
        prob = float(np.vdot(proj, proj).real)
        if prob < NORM_ATOL:
            from .tableau import ZeroProbabilityProjection
            raise ZeroProbabilityProjection(f"projection {p} -> {sign} has probability 0")
        self.vec = proj / math.sqrt(prob)
        return prob

    def measure_pauli(self, p: PauliOperator, rng, forced: int | None = None) -> int:
        pv = self._pauli_vec(p, self.vec)
        proj_plus = 0.5 * (self.vec + pv)
        p_plus = float(np.vdot(proj_plus, proj_plus).real)
        if forced is not None:
            outcome = forced
        elif p_plus > 1.0 - NORM_ATOL:
            outcome = 1
        elif p_plus < NORM_ATOL:
            outcome = -1
        else:
            outcome = 1 if rng.random() < p_plus else -1
        prob = p_plus if outcome == 1 else 1.0 - p_plus
        if prob < NORM_ATOL:
            from .tableau import ZeroProbabilityProjection
            raise ZeroProbabilityProjection(f"outcome {outcome} for {p} has probability 0")
        proj = proj_plus if outcome == 1 else self.vec - proj_plus
        self.vec = proj / math.sqrt(prob)
        return outcome


# --------------------------------------------------------------------- GHZ
class DeformedGhzSpec:
    """Parameters of exp(beta sum_interior X) |GHZ_N> (interior = sites 1..N-2)."""

    def __init__(self, n: int, beta: float):
        if n < 3:
            raise ValueError("deformed GHZ needs N >= 3")
        self.n = n
        self.beta = float(beta)

    @property
    def interior(self) -> range:
        return range(1, self.n - 1)


def build_ghz_dense(n: int) -> DenseState:
    s = DenseState(n)
    vec = np.zeros(1 << n, dtype=complex)
    vec[0] = vec[-1] = 1 / math.sqrt(2)
    s.vec = vec
    return s


def build_deformed_ghz(spec: DeformedGhzSpec) -> DenseState:
    s = build_ghz_dense(spec.n)
    for q in spec.interior:
        s.apply_exp_pauli(PauliOperator.single(spec.n, "X", q), beta=spec.beta)
    return s


def deformed_ghz_zz_oracle(beta: float) -> float:
    """<Z_i Z_j> for distinct interior sites: sech(2 beta)^2."""
    return 1.0 / math.cosh(2 * beta) ** 2


def disorder_string_oracle(beta: float, length: int) -> float:
    """<prod_{a=1..l} X_{i+a}> for an interior string: tanh(2 beta)^l."""
    return math.tanh(2 * beta) ** length
