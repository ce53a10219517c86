"""Stabilizer-state simulator on a destabilizer/stabilizer tableau.

The state of ``n`` qubits is tracked by ``2n`` Pauli rows: rows ``0..n-1`` are
destabilizers, rows ``n..2n-1`` stabilizers.  Rows are stored as bitmask
integers (see :mod:`spacetime_dual.pauli`), so all gate updates are O(1) big-int
operations per row and work for any qubit count.

Supported gates: H, S, SDG, X, Y, Z, CX, CZ, SWAP, EXP_P4 (exp(-i pi/4 P) for
an arbitrary Pauli string P, with the sign of P absorbed into the rotation
direction) and CTRL_P (|0><0| + |1><1| (x) P).
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .pauli import PauliOperator


class ZeroProbabilityProjection(Exception):
    """Requested projection has probability zero on the current state."""


@dataclass
class MeasurementRecord:
    """Ordered log of measurement outcomes (+1/-1) with their observables."""

    entries: list[tuple[str, tuple[int, ...], int]] = field(default_factory=list)

    def add(self, label: str, targets: tuple[int, ...], outcome: int) -> None:
        self.entries.append((label, targets, outcome))

    @property
    def outcomes(self) -> list[int]:
        return [o for _, _, o in self.entries]

    def __len__(self) -> int:
        return len(self.entries)


def _mul_into(xs, zs, es, dst, src) -> None:
    """rows[dst] <- rows[src] * rows[dst] with exact phase."""
    es[dst] = (es[src] + es[dst] + 2 * int.bit_count(zs[src] & xs[dst])) % 4
    xs[dst] ^= xs[src]
    zs[dst] ^= zs[src]


class StabilizerState:
    """A pure stabilizer state on n qubits."""

    def __init__(self, n: int):
        if n < 1:
            raise ValueError("need at least one qubit")
        self.n = n
        # |0...0>: destabilizers X_i, stabilizers Z_i
        self.xs = [1 << i for i in range(n)] + [0] * n
        self.zs = [0] * n + [1 << i for i in range(n)]
        self.es = [0] * (2 * n)

    # ------------------------------------------------------------ constructors
    @classmethod
    def zeros(cls, n: int) -> "StabilizerState":
        return cls(n)

    @classmethod
    def plus_state(cls, n: int) -> "StabilizerState":
        s = cls(n)
        for q in range(n):
            s.h(q)
        return s

    @classmethod
    def product(cls, spec: str) -> "StabilizerState":
        """Product state from a string of '0' and '+' per qubit."""
        s = cls(len(spec))
        for q, ch in enumerate(spec):
            if ch == "+":
                s.h(q)
            elif ch != "0":
                raise ValueError(f"unknown product-state symbol {ch!r}")
        return s

    def copy(self) -> "StabilizerState":
        out = StabilizerState.__new__(StabilizerState)
        out.n = self.n
        out.xs = list(self.xs)
        out.zs = list(self.zs)
        out.es = list(self.es)
        return out

    # ------------------------------------------------------------------- rows
    def row(self, i: int) -> PauliOperator:
        return PauliOperator(self.n, self.xs[i], self.zs[i], self.es[i])

    def stabilizer(self, k: int) -> PauliOperator:
        return self.row(self.n + k)

    def stabilizers(self) -> list[PauliOperator]:
        return [self.row(self.n + k) for k in range(self.n)]

    # ------------------------------------------------------------------ gates
    def h(self, t: int) -> None:
        m = 1 << t
        xs, zs, es = self.xs, self.zs, self.es
        for i in range(2 * self.n):
            if xs[i] & zs[i] & m:
                es[i] = (es[i] + 2) % 4
            d = (xs[i] ^ zs[i]) & m
            if d:
                xs[i] ^= d
                zs[i] ^= d

    def s(self, t: int) -> None:
        m = 1 << t
        xs, zs, es = self.xs, self.zs, self.es
        for i in range(2 * self.n):
            if xs[i] & m:
                es[i] = (es[i] + 1) % 4
                zs[i] ^= m

    def sdg(self, t: int) -> None:
        m = 1 << t
        xs, zs, es = self.xs, self.zs, self.es
        for i in range(2 * self.n):
            if xs[i] & m:
                es[i] = (es[i] + 3) % 4
                zs[i] ^= m

    def x(self, t: int) -> None:
        m = 1 << t
        for i in range(2 * self.n):
            if self.zs[i] & m:
                self.es[i] = (self.es[i] + 2) % 4

    def z(self, t: int) -> None:
        m = 1 << t
        for i in range(2 * self.n):
            if self.xs[i] & m:
                self.es[i] = (self.es[i] + 2) % 4

    def y(self, t: int) -> None:
        m = 1 << t
        for i in range(2 * self.n):
            if (self.xs[i] ^ self.zs[i]) & m:
                self.es[i] = (self.es[i] + 2) % 4

    def cx(self, c: int, t: int) -> None:
        mc, mt = 1 << c, 1 << t
        xs, zs = self.xs, self.zs
        for i in range(2 * self.n):
            if xs[i] & mc:
                xs[i] ^= mt
            if zs[i] & mt:
                zs[i] ^= mc

    def cz(self, a: int, b: int) -> None:
        ma, mb = 1 << a, 1 << b
        xs, zs, es = self.xs, self.zs, self.es
        for i in range(2 * self.n):
            xa = xs[i] & ma
            xb = xs[i] & mb
            if xa and xb:
                es[i] = (es[i] + 2) % 4
            if xa:
                zs[i] ^= mb
            if xb:
                zs[i] ^= ma

    def swap(self, a: int, b: int) -> None:
        ma, mb = 1 << a, 1 << b
        xs, zs = self.xs, self.zs
        for i in range(2 * self.n):
            for arr in (xs, zs):
                va = bool(arr[i] & ma)
                vb = bool(arr[i] & mb)
                if va != vb:
                    arr[i] ^= ma | mb

    def exp_p4(self, p: PauliOperator) -> None:
        """Apply exp(-i pi/4 P).  P must be Hermitian (sign +-1 allowed)."""
        if not p.is_hermitian:
            raise ValueError("rotation axis must be Hermitian")
        xs, zs, es = self.xs, self.zs, self.es
        px, pz, pe = p.x, p.z, p.e
        for i in range(2 * self.n):
            if (int.bit_count(xs[i] & pz) + int.bit_count(zs[i] & px)) % 2:
                # row -> -i * P * row
                es[i] = (pe + es[i] + 2 * int.bit_count(pz & xs[i]) + 3) % 4
                xs[i] ^= px
                zs[i] ^= pz

    def ctrl_p(self, c: int, p: PauliOperator) -> None:
        """Apply |0><0|_c + |1><1|_c (x) P.  P must be Hermitian, +1 signed,
        with no support on the control."""
        if (p.x >> c) & 1 or (p.z >> c) & 1:
            raise ValueError("controlled Pauli may not touch its control")
        if not p.is_hermitian or p.sign != 1:
            raise ValueError("controlled Pauli must be Hermitian with +1 sign")
        n = self.n
        mc = 1 << c
        xc_img = PauliOperator.single(n, "X", c).mul(p)  # image of X_c
        for i in range(2 * n):
            row = self.row(i)
            rest = PauliOperator(n, row.x & ~mc, row.z & ~mc, row.e)
            kappa = 0 if rest.commutes_with(p) else 1
            img = PauliOperator.identity(n)
            if (row.x >> c) & 1:
                img = img.mul(xc_img)
            zc_power = (((row.z >> c) & 1) + kappa) % 2
            if zc_power:
                img = img.mul(PauliOperator.single(n, "Z", c))
            img = img.mul(rest)
            self.xs[i], self.zs[i], self.es[i] = img.x, img.z, img.e

    def apply_named(self, name: str, targets: tuple[int, ...],
                    pauli: PauliOperator | None = None) -> None:
        if name == "H":
            self.h(*targets)
        elif name == "S":
            self.s(*targets)
        elif name == "SDG":
            self.sdg(*targets)
        elif name == "X":
            self.x(*targets)
        elif name == "Y":
            self.y(*targets)
        elif name == "Z":
            self.z(*targets)
        elif name == "CX":
            self.cx(*targets)
        elif name == "CZ":
            self.cz(*targets)
        elif name == "SWAP":
            self.swap(*targets)
        elif name == "EXP_P4":
            self.exp_p4(pauli)
        elif name == "CTRL_P":
            self.ctrl_p(targets[0], pauli)
        else:
            raise ValueError(f"unknown unitary gate {name!r}")

    def apply_pauli(self, p: PauliOperator) -> None:
        """Apply a Pauli unitary (conjugates rows; global phase dropped)."""
        xs, zs, es = self.xs, self.zs, self.es
        for i in range(2 * self.n):
            if (int.bit_count(xs[i] & p.z) + int.bit_count(zs[i] & p.x)) % 2:
                es[i] = (es[i] + 2) % 4

    # ----------------------------------------------------------- measurement
    def _anticommutes(self, i: int, p: PauliOperator) -> bool:
        return (
            int.bit_count(self.xs[i] & p.z) + int.bit_count(self.zs[i] & p.x)
        ) % 2 == 1

    def _deterministic_sign(self, p: PauliOperator) -> int | None:
        """If +-P is in the stabilizer group, return the sign; else None."""
        n = self.n
        for k in range(n, 2 * n):
            if self._anticommutes(k, p):
                return None
        acc = PauliOperator.identity(n)
        for i in range(n):
            if self._anticommutes(i, p):
                acc = acc.mul(self.row(n + i))
        if acc.x != p.x or acc.z != p.z:
            return None
        d = (acc.e - p.e) % 4
        if d == 0:
            return 1
        if d == 2:
            return -1
        raise AssertionError("non-real phase ratio in stabilizer group")

    def measure_pauli(self, p: PauliOperator, rng=None, forced: int | None = None) -> int:
        """Projectively measure the Hermitian Pauli P; returns +1 or -1.

        ``forced`` selects the branch (used for exhaustive outcome
        enumeration); a forced zero-probability branch raises."""
        if not p.is_hermitian:
            raise ValueError("observable must be Hermitian")
        n = self.n
        pivot = None
        for k in range(n, 2 * n):
            if self._anticommutes(k, p):
                pivot = k
                break
        if pivot is None:
            sign = self._deterministic_sign(p)
            if sign is None:
                raise ValueError(f"{p} is not in +-(stabilizer group); "
                                 "measurement would not be deterministic")
            if forced is not None and forced != sign:
                raise ZeroProbabilityProjection(
                    f"forced outcome {forced} for {p} has probability 0")
            return sign
        if forced is not None:
            outcome = forced
        elif rng is not None:
            outcome = 1 if rng.random() < 0.5 else -1
        else:
            raise ValueError("random outcome requested but no rng supplied")
        xs, zs, es = self.xs, self.zs, self.es
        for i in range(2 * n):
            if i != pivot and self._anticommutes(i, p):
                _mul_into(xs, zs, es, i, pivot)
        d = pivot - n  # matching destabilizer row
        xs[d], zs[d], es[d] = xs[pivot], zs[pivot], es[pivot]
        xs[pivot], zs[pivot] = p.x, p.z
        es[pivot] = p.e if outcome == 1 else (p.e + 2) % 4
        return outcome

    def project_pauli(self, p: PauliOperator, sign: int = 1) -> int:
        """Project onto the ``sign`` eigenspace of P (post-selection)."""
        return self.measure_pauli(p, forced=sign)

    # ------------------------------------------------------------ group tests
    def expectation(self, p: PauliOperator) -> int:
        """<P> which is +-1 or 0 for a Pauli on a stabilizer state."""
        for k in range(self.n, 2 * self.n):
            if self._anticommutes(k, p):
                return 0
        sign = self._deterministic_sign(p)
        if sign is None:
            return 0
        return sign

    def stabilizer_group_contains(self, p: PauliOperator) -> str:
        """'yes+' if P is stabilized, 'yes-' if -P is, 'no' otherwise."""
        for k in range(self.n, 2 * self.n):
            if self._anticommutes(k, p):
                return "no"
        sign = self._deterministic_sign(p)
        if sign is None:
            return "no"
        return "yes+" if sign == 1 else "yes-"


def stabilizer_groups_equal(a: StabilizerState, b: StabilizerState,
                            mapping: dict[int, int] | None = None) -> bool:
    """True when the two states' stabilizer groups coincide (signs included).

    ``mapping`` relabels qubits of ``a`` into qubits of ``b`` (a-qubit -> b-qubit);
    both states must then have the same number of qubits.
    """
    if a.n != b.n:
        return False
    for k in range(a.n):
        g = a.stabilizer(k)
        if mapping is not None:
            positions = [mapping[q] for q in range(a.n)]
            g = g.embedded(b.n, positions)
        if b.stabilizer_group_contains(g) != "yes+":
            return False
    return True
