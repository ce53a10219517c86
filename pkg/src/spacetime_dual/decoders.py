"""Feedback decoders: turn unwanted measurement outcomes into Pauli corrections.

The central object is the ``MfSymmetryTable`` of a local tensor: for each
single-Pauli defect arriving on a bond leg it records a Pauli on the remaining
legs that restores the tensor exactly (entrywise, including phase).  Such an
entry exists precisely when the tensor has a Pauli symmetry containing the
defect as a factor, and it lets a defect be swept through the chain while the
physical-leg factors accumulate into a correction frame.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .pauli import PauliOperator
from .tensors import TensorSpec, is_tensor_symmetry


class UncorrectableDefect(Exception):
    """A measurement defect has no entry in the symmetry table."""


class GaugeSiteError(ValueError):
    """A reported defect site is not a gauge (even) site."""


class OddSyndromeOnTorus(RuntimeError):
    """Defect parity on a torus must be even; odd parity signals an upstream bug."""


@dataclass(frozen=True)
class OutcomeSyndrome:
    """Measurement outcomes of a chain measurement-feedback circuit.

    ``bell[k] = (a, b)`` are the outcome bits of the Bell-basis measurement on
    bond ``k`` (between tensors ``k`` and ``k+1``): ``a = 1`` iff the XX
    outcome was -1, ``b = 1`` iff the ZZ outcome was -1.  ``boundary`` holds
    the outcome bits of the single-qubit measurements on the dangling left and
    right virtual legs (1 iff the outcome was -1).
    """

    model: str
    bell: tuple[tuple[int, int], ...]
    boundary: tuple[int, int] = (0, 0)

    @property
    def n_sites(self) -> int:
        return len(self.bell) + 1


@dataclass(frozen=True)
class MfSymmetryTable:
    """Per-defect correction Paulis for one local tensor.

    ``entries[(leg, axis)]`` is a Pauli on all legs, acting as identity on
    ``leg``, such that (defect on ``leg``) x (entry) fixes the tensor
    entrywise.  Missing keys mean the defect is uncorrectable; that absence is
    data, not an error.
    """

    tensor: TensorSpec
    entries: dict[tuple[int, str], PauliOperator] = field(default_factory=dict)

    def correction(self, leg: int, axis: str) -> PauliOperator | None:
        return self.entries.get((leg, axis))


def _candidate_assignments(tensor: TensorSpec, other_legs: list[int]):
    """All Pauli letter assignments on the given legs, cheapest and most local first.

    Ordered by (weight, number of non-identity bond legs, letters) so the
    minimal-weight correction is found first and ties prefer acting on
    physical legs over forwarding the defect along further bonds.
    """
    bond = set(tensor.bond_legs)
    combos = list(itertools.product("IXYZ", repeat=len(other_legs)))

    def rank(letters):
        weight = sum(c != "I" for c in letters)
        bond_weight = sum(c != "I" for c, leg in zip(letters, other_legs) if leg in bond)
        return (weight, bond_weight, letters)

    return sorted(combos, key=rank)


def derive_mf_table(tensor: TensorSpec) -> MfSymmetryTable:
    """Exhaustively search Pauli symmetries that absorb single-bond defects.

    For each bond leg and each defect axis (X or Z) this scans every Pauli
    assignment on the remaining legs, with every i^k phase, for an operator
    whose product with the defect fixes the tensor exactly.  The first hit in
    the (weight, locality) ordering is recorded.
    """
    if tensor.arity > 6:
        raise ValueError("exhaustive search is limited to tensors with at most 6 legs")
    entries: dict[tuple[int, str], PauliOperator] = {}
    n = tensor.arity
    for leg in tensor.bond_legs:
        other_legs = [j for j in range(n) if j != leg]
        for axis in ("X", "Z"):
            defect = PauliOperator.single(n, axis, leg)
            for letters in _candidate_assignments(tensor, other_legs):
                sites = {q: c for q, c in zip(other_legs, letters) if c != "I"}
                base = PauliOperator.from_sites(n, sites)
                found = None
                for k in range(4):
                    cand = base.times_i(k)
                    if is_tensor_symmetry(tensor, defect * cand):
                        found = cand
                        break
                if found is not None:
                    entries[(leg, axis)] = found
                    break
    return MfSymmetryTable(tensor, entries)


def _chain_legs(tensor: TensorSpec) -> tuple[int, int, tuple[int, ...]]:
    if len(tensor.bond_legs) != 2:
        raise ValueError("chain decoding needs a tensor with exactly two bond legs")
    left, right = sorted(tensor.bond_legs)
    return left, right, tensor.physical_legs


def _apply_entry(entry: PauliOperator, right_leg: int, phys_legs: tuple[int, ...],
                 site: int, x_mask: int, z_mask: int) -> tuple[int, int, int, int]:
    """Split a table entry into (physical frame bits at `site`, pushed bond bits)."""
    for leg in phys_legs:
        if (entry.x >> leg) & 1:
            x_mask ^= 1 << site
        if (entry.z >> leg) & 1:
            z_mask ^= 1 << site
    push_x = (entry.x >> right_leg) & 1
    push_z = (entry.z >> right_leg) & 1
    return x_mask, z_mask, push_x, push_z


def decode_mf_chain(syndrome: OutcomeSyndrome, table: MfSymmetryTable,
                    boundary_bases: tuple[str, str] = ("X", "X")) -> PauliOperator:
    """Sweep chain measurement defects left to right into a physical Pauli frame.

    Bond defects (XX = -1 inserts a Z on the bond, ZZ = -1 inserts an X) are
    absorbed tensor by tensor via the symmetry table; bond factors of each
    correction are pushed to the next tensor.  Dangling-leg measurements are
    handled at the ends: a residual anticommuting defect flips the recorded
    boundary outcome, and an unwanted effective outcome is absorbed through
    the corresponding boundary entry of the table.  The result is a Pauli
    frame on the physical sites (global phase fixed to +1).
    """
    left_leg, right_leg, phys_legs = _chain_legs(table.tensor)
    if len(phys_legs) != 1:
        raise ValueError("chain decoding needs exactly one physical leg per tensor")
    n = syndrome.n_sites
    x_mask = z_mask = 0

    def boundary_defect(basis: str, bit: int, res_x: int, res_z: int) -> str | None:
        # A residual defect that anticommutes with the dangling measurement
        # flips its outcome; the commuting part drops out.  An effective -1
        # outcome is the conjugate-basis defect on the leg.
        if basis == "X":
            return "Z" if bit ^ res_z else None
        if basis == "Z":
            return "X" if bit ^ res_x else None
        raise ValueError(f"unknown boundary basis {basis!r}")

    # Left boundary: an unwanted outcome is a defect entering tensor 0.
    pend_x = pend_z = 0
    left = boundary_defect(boundary_bases[0], syndrome.boundary[0], 0, 0)
    if left == "X":
        pend_x = 1
    elif left == "Z":
        pend_z = 1

    for k in range(n):
        if k > 0:
            a, b = syndrome.bell[k - 1]
            pend_z ^= a
            pend_x ^= b
        next_x = next_z = 0
        for axis, bit in (("X", pend_x), ("Z", pend_z)):
            if not bit:
                continue
            entry = table.correction(left_leg, axis)
            if entry is None:
                raise UncorrectableDefect(f"{axis} defect on bond leg has no table entry")
            x_mask, z_mask, px, pz = _apply_entry(entry, right_leg, phys_legs, k, x_mask, z_mask)
            next_x ^= px
            next_z ^= pz
        pend_x, pend_z = next_x, next_z

    # Right boundary: the residual pushed defect meets the dangling
    # measurement.  An effective unwanted outcome is a defect that must be
    # absorbed sweeping right to left, since its correction may carry a bond
    # factor pointing back into the chain.
    right = boundary_defect(boundary_bases[1], syndrome.boundary[1], pend_x, pend_z)
    pend_x = 1 if right == "X" else 0
    pend_z = 1 if right == "Z" else 0
    for k in range(n - 1, -1, -1):
        if not (pend_x or pend_z):
            break
        next_x = next_z = 0
        for axis, bit in (("X", pend_x), ("Z", pend_z)):
            if not bit:
                continue
            entry = table.correction(right_leg, axis)
            if entry is None:
                raise UncorrectableDefect(f"{axis} defect on bond leg has no table entry")
            x_mask, z_mask, px, pz = _apply_entry(entry, left_leg, phys_legs, k, x_mask, z_mask)
            next_x ^= px
            next_z ^= pz
        pend_x, pend_z = next_x, next_z
    if boundary_defect(boundary_bases[0], 0, pend_x, pend_z) is not None:
        raise UncorrectableDefect("backward sweep reached the left boundary with an anticommuting defect")

    return PauliOperator(n, x_mask, z_mask, 0)


def decode_ghz_gauge(defects, n_sites: int) -> PauliOperator:
    """X-string correction for gauge-site defects on the doubled chain.

    Sites are 1-indexed; gauge sites are the even ones.  Defects at interior
    gauge sites are paired left to right and each pair is joined by X on the
    odd (matter) sites strictly between them; an unpaired defect's string
    runs to the right boundary.  Example: defects at sites {2, 8} give X on
    sites 3, 5, 7.  Each defect also flips the global symmetry charge (its
    gauge outcome is minimally coupled to the X string of the matter sites),
    so an odd defect count adds a Z on the last matter site; the last gauge
    site (site ``n_sites``) has no matter to its right and contributes only
    this charge flip.
    """
    sites = sorted(set(defects))
    for d in sites:
        if d % 2 != 0 or not (1 <= d <= n_sites):
            raise GaugeSiteError(f"site {d} is not a gauge site of a {n_sites}-site chain")
    charge = len(sites) % 2 == 1
    interior = [d for d in sites if d < n_sites]
    string: set[int] = set()
    for i in range(0, len(interior), 2):
        lo = interior[i]
        hi = interior[i + 1] if i + 1 < len(interior) else n_sites + 1
        string.symmetric_difference_update(range(lo + 1, hi, 2))
    letters = {s - 1: "X" for s in string}
    if charge:
        last = n_sites - 2  # 0-indexed last matter site
        letters[last] = "Y" if letters.get(last) == "X" else "Z"
    return PauliOperator.from_sites(n_sites, letters)


# ----------------------------------------------------------- torus decoding
def toric_edge_head(lat, edge: int) -> tuple[int, int]:
    """Vertex where a fusion defect on ``edge`` materializes.

    Each edge's physical copy hangs off the tensor at the edge's base vertex,
    so a Z Z = -1 fusion outcome is equivalent to a bit flip on the opposite
    (bare) leg: the far endpoint, (x+1, y) for a horizontal edge (x, y) and
    (x, y+1) for a vertical one.
    """
    m = lat.lx * lat.ly
    x, r = (edge % m) % lat.lx, (edge % m) // lat.lx
    if edge < m:
        return ((x + 1) % lat.lx, r)
    return (x, (r + 1) % lat.ly)


def toric_string_to_origin(lat, x: int, y: int) -> set[int]:
    """Edges of the canonical wind-free path from vertex (x, y) to (0, 0).

    Walks x down to 0 along row y, then y down to 0 along column 0, never
    wrapping.  Because every such path has zero winding, symmetric
    differences of them are homologically trivial, which makes per-defect
    feedback strings safe to compose bit by bit.
    """
    edges: set[int] = set()
    for xx in range(x):
        edges.add(lat.h(xx, y))
    for yy in range(y):
        edges.add(lat.v(0, yy))
    return edges


def _torus_path(lat, u: tuple[int, int], v: tuple[int, int]) -> set[int]:
    """Edges of a shortest Manhattan path from u to v, wrapping when shorter."""
    edges: set[int] = set()
    (ux, uy), (vx, vy) = u, v
    x = ux
    while x != vx:
        step = 1 if (vx - x) % lat.lx <= (x - vx) % lat.lx else -1
        edges.symmetric_difference_update({lat.h(x if step == 1 else x - 1, uy)})
        x = (x + step) % lat.lx
    y = uy
    while y != vy:
        step = 1 if (vy - y) % lat.ly <= (y - vy) % lat.ly else -1
        edges.symmetric_difference_update({lat.v(vx, y if step == 1 else y - 1)})
        y = (y + step) % lat.ly
    return edges


def decode_toric(defective_edges, lat) -> PauliOperator:
    """X-string correction for fusion defects on a torus lattice.

    Each defective edge deposits one vertex defect at its head (far
    endpoint); vertices hit an even number of times cancel.  Survivors are
    paired greedily by torus Manhattan distance and each pair is joined by X
    on the physical edges of a shortest path.  Two adjacent defective edges
    therefore decode to a single-site X on the edge joining their heads.
    """
    defects: set[tuple[int, int]] = set()
    for e in defective_edges:
        defects.symmetric_difference_update({toric_edge_head(lat, e)})
    if len(defects) % 2:
        raise OddSyndromeOnTorus(
            f"{len(defects)} unpaired vertex defects on a torus")

    def dist(u, v):
        dx = abs(u[0] - v[0]); dy = abs(u[1] - v[1])
        return min(dx, lat.lx - dx) + min(dy, lat.ly - dy)

    remaining = sorted(defects)
    string: set[int] = set()
    while remaining:
        u = remaining.pop(0)
        v = min(remaining, key=lambda w: (dist(u, w), w))
        remaining.remove(v)
        string.symmetric_difference_update(_torus_path(lat, u, v))
    return PauliOperator.from_sites(lat.n, {e: "X" for e in string})
