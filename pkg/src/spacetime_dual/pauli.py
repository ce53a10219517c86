"""Multi-qubit Pauli operators with exact phase tracking.

A Pauli operator on ``n`` qubits is stored as

    P = i^e * prod_j X_j^{x_j} Z_j^{z_j}

where ``x`` and ``z`` are bitmasks (qubit ``j`` <-> bit ``j``) and ``e`` is an
exponent of ``i`` modulo 4.  This X-before-Z ordering convention makes
multiplication exact and cheap: the only reordering phase comes from commuting
the Z part of the left factor past the X part of the right factor,

    Z^{z1} X^{x2} = (-1)^{popcount(z1 & x2)} X^{x2} Z^{z1}.

The user-facing "sign" of a Hermitian Pauli (the coefficient in front of the
sigma string where Y means the Hermitian Y) is ``i^(e - w)`` with ``w`` the
number of Y sites (``popcount(x & z)``).
"""
from __future__ import annotations

import re
from dataclasses import dataclass

_LABEL_RE = re.compile(r"^([+-]?i?)([IXYZ]+)$")

# per-site exponent of i contributed by a Y written as i*X*Z
_CHAR_XZ = {"I": (0, 0), "X": (1, 0), "Y": (1, 1), "Z": (0, 1)}
_XZ_CHAR = {(0, 0): "I", (1, 0): "X", (1, 1): "Y", (0, 1): "Z"}
_PHASE_STR = {0: "+", 1: "+i", 2: "-", 3: "-i"}


@dataclass(frozen=True)
class PauliOperator:
    """An n-qubit Pauli with an exact phase in {1, i, -1, -i}."""

    n: int
    x: int
    z: int
    e: int  # exponent of i in the X-before-Z representation, mod 4

    def __post_init__(self) -> None:
        mask = (1 << self.n) - 1
        if self.x & ~mask or self.z & ~mask:
            raise ValueError("bitmask exceeds qubit count")
        object.__setattr__(self, "e", self.e % 4)

    # ------------------------------------------------------------------ build
    @classmethod
    def identity(cls, n: int) -> "PauliOperator":
        return cls(n, 0, 0, 0)

    @classmethod
    def single(cls, n: int, kind: str, qubit: int, sign: int = 1) -> "PauliOperator":
        """A single-site X/Y/Z (times +-1) embedded in n qubits."""
        if not 0 <= qubit < n:
            raise ValueError(f"qubit {qubit} out of range for n={n}")
        xb, zb = _CHAR_XZ[kind]
        e = (1 if kind == "Y" else 0) + (2 if sign == -1 else 0)
        return cls(n, xb << qubit, zb << qubit, e)

    @classmethod
    def from_sites(cls, n: int, sites: dict[int, str], sign: int = 1) -> "PauliOperator":
        """Build from a {qubit: 'X'|'Y'|'Z'} mapping."""
        x = z = 0
        w = 0
        for q, kind in sites.items():
            if not 0 <= q < n:
                raise ValueError(f"qubit {q} out of range for n={n}")
            xb, zb = _CHAR_XZ[kind]
            x |= xb << q
            z |= zb << q
            w += xb & zb
        e = (w + (2 if sign == -1 else 0)) % 4
        return cls(n, x, z, e)

    @classmethod
    def from_label(cls, label: str, n: int | None = None) -> "PauliOperator":
        """Parse labels like ``+XIZY`` (leftmost char = qubit 0)."""
        m = _LABEL_RE.match(label)
        if not m:
            raise ValueError(f"bad Pauli label: {label!r}")
        prefix, body = m.groups()
        if n is None:
            n = len(body)
        if len(body) != n:
            raise ValueError(f"label length {len(body)} != n={n}")
        x = z = 0
        w = 0
        for q, ch in enumerate(body):
            xb, zb = _CHAR_XZ[ch]
            x |= xb << q
            z |= zb << q
            w += xb & zb
        e = {"": 0, "+": 0, "i": 1, "+i": 1, "-": 2, "-i": 3}[prefix]
        return cls(n, x, z, (e + w) % 4)

    # ------------------------------------------------------------- properties
    @property
    def weight(self) -> int:
        return int.bit_count(self.x | self.z)

    @property
    def y_count(self) -> int:
        return int.bit_count(self.x & self.z)

    @property
    def phase_exponent(self) -> int:
        """Exponent of i multiplying the Hermitian sigma string."""
        return (self.e - self.y_count) % 4

    @property
    def sign(self) -> int:
        """+1 or -1 for Hermitian Paulis; raises otherwise."""
        pe = self.phase_exponent
        if pe == 0:
            return 1
        if pe == 2:
            return -1
        raise ValueError(f"{self} has imaginary phase")

    @property
    def is_hermitian(self) -> bool:
        return self.phase_exponent % 2 == 0

    @property
    def support(self) -> tuple[int, ...]:
        m = self.x | self.z
        return tuple(q for q in range(self.n) if (m >> q) & 1)

    def site(self, q: int) -> str:
        return _XZ_CHAR[((self.x >> q) & 1, (self.z >> q) & 1)]

    # ------------------------------------------------------------------ algebra
    def mul(self, other: "PauliOperator") -> "PauliOperator":
        """Operator product self * other (exact phase)."""
        if self.n != other.n:
            raise ValueError("size mismatch")
        e = (self.e + other.e + 2 * int.bit_count(self.z & other.x)) % 4
        return PauliOperator(self.n, self.x ^ other.x, self.z ^ other.z, e)

    def __mul__(self, other: "PauliOperator") -> "PauliOperator":
        return self.mul(other)

    def negate(self) -> "PauliOperator":
        return PauliOperator(self.n, self.x, self.z, self.e + 2)

    def times_i(self, k: int = 1) -> "PauliOperator":
        return PauliOperator(self.n, self.x, self.z, self.e + k)

    def adjoint(self) -> "PauliOperator":
        # (i^e X Z)^dag = i^{-e} (-1)^{popcount(x&z)} X Z
        return PauliOperator(self.n, self.x, self.z, -self.e + 2 * self.y_count)

    def transpose(self) -> "PauliOperator":
        """Matrix transpose: flips the sign once per Y site."""
        return PauliOperator(self.n, self.x, self.z, self.e + 2 * self.y_count)

    def commutes_with(self, other: "PauliOperator") -> bool:
        return (
            int.bit_count(self.x & other.z) + int.bit_count(self.z & other.x)
        ) % 2 == 0

    def restricted(self, qubits: list[int]) -> "PauliOperator":
        """The tensor factor on the given qubits (phase kept on the result)."""
        x = z = 0
        for new_q, q in enumerate(qubits):
            x |= ((self.x >> q) & 1) << new_q
            z |= ((self.z >> q) & 1) << new_q
        return PauliOperator(len(qubits), x, z, self.e)

    def embedded(self, n: int, positions: list[int]) -> "PauliOperator":
        """Embed this operator into an n-qubit register at the given positions."""
        x = z = 0
        for old_q, q in enumerate(positions):
            x |= ((self.x >> old_q) & 1) << q
            z |= ((self.z >> old_q) & 1) << q
        return PauliOperator(n, x, z, self.e)

    # ------------------------------------------------------------------ text
    def label(self) -> str:
        body = "".join(self.site(q) for q in range(self.n))
        return _PHASE_STR[self.phase_exponent] + body

    def __str__(self) -> str:
        return self.label()

    def key(self) -> tuple[int, int]:
        """Phase-free symplectic key (useful for set membership)."""
        return (self.x, self.z)
