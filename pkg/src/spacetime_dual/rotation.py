"""Spacetime rotation of first-cell-sequential circuits.

A first-cell-sequential (FCS) circuit on L equal unit cells has cell 1 acting
as a register that interacts with cells 2..L in order, each interaction being
a block of gates on cell-1 + cell-k wires that ends with a wire-for-wire SWAP
layer between the two cells, i.e. each composite gate is SWAP∘u_k.

Rotating spacetime by 90 degrees maps such a circuit onto a depth-1 layer of
dual gates Q_k = SWAP∘(u_k^{T2}) acting on a doubled register fed by Bell
pairs; post-selecting the slots that image the sequential circuit's initial
states recovers the sequential output state exactly.

The partial transpose u^{T2} is computed symbolically on the instruction
list, never through an exponentially large matrix.  Wire-1-only gates A
satisfy ((A⊗I)M)^{T2} = (A⊗I)M^{T2} and (M(A⊗I))^{T2} = M^{T2}(A⊗I), so they
peel off both ends unchanged.  The remaining core must consist of gates that
are control-diagonal in the wire-1 computational basis — wire-2-only gates
(I⊗B), diagonal gates, and wire-1 diagonal phases — writing the core as
Σ_s |s⟩⟨s| ⊗ (g_m,s ⋯ g_1,s); then

    core^{T2} = Σ_s |s⟩⟨s| ⊗ (g_1,sᵀ ⋯ g_m,sᵀ)

which is the same gate list in reversed time order with wire-2 factors
transposed (diagonal gates are transpose-invariant).  Gates outside this
vocabulary make the dual tensor non-unitary in general;
``realize_nonunitary_q`` provides the Bell-pair + Bell-projection
realization of u^{T2} for that case.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .circuit import Circuit, Instruction, MalformedCircuit, UNITARY_OPS
from .pauli import PauliOperator

UNITARY_ATOL = 1e-10


class NotControlledSwapForm(Exception):
    """Gate lacks the SWAP∘(controlled-diagonal) structure."""


class MalformedSequentialCircuit(Exception):
    """Circuit is not in first-cell-sequential form."""


# --------------------------------------------------------------- matrix ops
def _split_dims(m: np.ndarray, dims=None) -> tuple[int, int]:
    d = m.shape[0]
    if m.shape != (d, d):
        raise ValueError("matrix must be square")
    if dims is None:
        r = int(round(d ** 0.5))
        if r * r != d:
            raise ValueError("dimension is not a product of two equal subsystems; "
                             "pass dims explicitly")
        return r, r
    d1, d2 = dims
    if d1 * d2 != d:
        raise ValueError("dims do not factor the matrix dimension")
    return d1, d2


def partial_transpose(m: np.ndarray, subsystem: int = 1, dims=None) -> np.ndarray:
    """Transpose the legs of one subsystem of a bipartite operator.

    Index convention: row = i1*d2 + i2 (subsystem 1 is the major index).
    ``subsystem`` 0 transposes the major legs, 1 the minor legs.
    """
    d1, d2 = _split_dims(m, dims)
    t = m.reshape(d1, d2, d1, d2)
    if subsystem == 1:
        t = t.transpose(0, 3, 2, 1)
    elif subsystem == 0:
        t = t.transpose(2, 1, 0, 3)
    else:
        raise ValueError("subsystem must be 0 or 1")
    return t.reshape(d1 * d2, d1 * d2)


def swap_matrix(d: int) -> np.ndarray:
    """Exchange of two d-dimensional subsystems."""
    s = np.zeros((d * d, d * d))
    for i in range(d):
        for j in range(d):
            s[j * d + i, i * d + j] = 1.0
    return s


def _is_unitary(m: np.ndarray, atol: float = UNITARY_ATOL) -> bool:
    return bool(np.allclose(m @ m.conj().T, np.eye(m.shape[0]), atol=atol))


@dataclass(frozen=True)
class ControlledSwapForm:
    """Decomposition U = SWAP ∘ (Σ_s |s⟩⟨s|_control ⊗ branch_s)."""
    control: int
    target_dims: tuple[int, int]
    branches: tuple[np.ndarray, ...]

    def reassemble(self) -> np.ndarray:
        d1, d2 = self.target_dims
        u = np.zeros((d1 * d2, d1 * d2), dtype=complex)
        for s, b in enumerate(self.branches):
            proj = np.zeros((d1, d1))
            proj[s, s] = 1.0
            u += np.kron(proj, b) if self.control == 0 else np.kron(b, proj)
        return swap_matrix(d1) @ u


def validate_controlled_swap(gate: np.ndarray, control: int = 0) -> ControlledSwapForm:
    """Decompose a two-subsystem gate as SWAP∘u with u diagonal in the
    control's computational basis; raises NotControlledSwapForm otherwise."""
    d1, d2 = _split_dims(gate)
    if d1 != d2:
        raise ValueError("SWAP structure needs equal subsystem dimensions")
    if not _is_unitary(gate):
        raise ValueError("gate must be unitary")
    u = swap_matrix(d1) @ gate  # SWAP is its own inverse
    t = u.reshape(d1, d2, d1, d2)
    branches = []
    for s in range(d1):
        for sp in range(d1):
            blk = t[sp, :, s, :] if control == 0 else t[:, sp, :, s]
            if sp == s:
                branches.append(blk)
            elif not np.allclose(blk, 0.0, atol=UNITARY_ATOL):
                raise NotControlledSwapForm(
                    "gate is not control-diagonal after removing the SWAP")
    for b in branches:
        if not _is_unitary(b):
            raise NotControlledSwapForm("a control branch is not unitary")
    form = ControlledSwapForm(control, (d1, d2), tuple(branches))
    if not np.allclose(form.reassemble(), gate, atol=UNITARY_ATOL):
        raise NotControlledSwapForm("reassembly mismatch")
    return form


def rotate_gate_matrix(gate: np.ndarray) -> np.ndarray:
    """Spacetime-rotated tensor of a two-subsystem gate: for U = SWAP∘u this
    equals SWAP∘(u^{T2})."""
    d1, _ = _split_dims(gate)
    s = swap_matrix(d1)
    return s @ partial_transpose(s @ gate, 1)


def check_dual_unitary(gate: np.ndarray) -> bool:
    """True iff the spacetime-rotated tensor is unitary."""
    if not _is_unitary(gate):
        raise ValueError("gate must be unitary")
    return _is_unitary(rotate_gate_matrix(gate))


# ------------------------------------------------ non-unitary q realization
@dataclass(frozen=True)
class NonUnitaryQFragment:
    """Bell-pair realization of u^{T2} for a two-subsystem unitary u.

    Wiring: prepare an ancilla Bell pair (m, n); apply u on (wire 1, m);
    Bell-project (m, wire 2); the pair (wire 1, n) then carries
    u^{T2}|in⟩ up to normalization, and a final SWAP returns it to
    (wire 1, wire 2).  Probabilistic: ``apply_dense`` reports the
    post-selection probability of the Bell projection.
    """
    u: np.ndarray
    dims: tuple[int, int]

    def apply_dense(self, vec: np.ndarray) -> tuple[np.ndarray, float]:
        """Evaluate on a (d1*d2,) input vector; returns (normalized output
        on the original wire pair, success probability)."""
        d1, d2 = self.dims
        psi = vec.reshape(d1, d2)                      # legs (a, b)
        bell = np.eye(d2) / np.sqrt(d2)                # legs (m, n)
        u4 = self.u.reshape(d1, d2, d1, d2)            # (a', m'),(a, m)
        # apply u on (a, m): state legs (a', m', n, b)
        st = np.einsum("pqak,kn,ab->pqnb", u4, bell, psi)
        # Bell-project (m', b): contract with <Phi+| = sum_j <j|<j| /sqrt(d2)
        out = np.einsum("pqnq->pn", st) / np.sqrt(d2)  # legs (a', n)
        prob = float(np.vdot(out, out).real)
        if prob < 1e-14:
            raise ValueError("Bell projection has zero success probability")
        return out.reshape(d1 * d2) / np.sqrt(prob), prob

    def q_matrix(self) -> np.ndarray:
        """The (possibly non-unitary) operator the fragment implements,
        including the 1/d2 projection amplitude."""
        return partial_transpose(self.u, 1, self.dims) / self.dims[1]


def realize_nonunitary_q(u: np.ndarray, dims=None) -> NonUnitaryQFragment:
    d1, d2 = _split_dims(u, dims)
    if not _is_unitary(u):
        raise ValueError("u must be unitary")
    return NonUnitaryQFragment(u=u, dims=(d1, d2))


# ------------------------------------------------------- symbolic transpose
_DIAGONAL_1Q = {"Z", "S", "SDG"}


def _instruction_support(ins: Instruction) -> set[int]:
    sup = set(ins.targets)
    if ins.pauli is not None:
        sup |= set(ins.pauli.support)
    return sup


def _is_diagonal(ins: Instruction) -> bool:
    if ins.op in _DIAGONAL_1Q or ins.op == "CZ":
        return True
    if ins.op in ("EXP_P4", "CTRL_P"):
        return ins.pauli.x == 0
    return False


def transpose_instruction(ins: Instruction) -> Instruction:
    """Transpose of a unitary instruction, up to a global phase.

    H, X, Z, S, SDG, CX (control = first target), CZ and SWAP are symmetric;
    Yᵀ = −Y (phase dropped); EXP_P4/CTRL_P transpose their Pauli axis, which
    is exact (the axis transpose carries the (−1)^{#Y} sign).
    """
    if ins.op in ("H", "S", "SDG", "X", "Y", "Z", "CX", "CZ", "SWAP"):
        return ins
    if ins.op in ("EXP_P4", "CTRL_P"):
        return Instruction(ins.op, ins.targets, ins.pauli.transpose(),
                           ins.params, ins.cbits)
    raise MalformedCircuit(f"no transpose rule for {ins.op!r}")


def symbolic_partial_transpose(instructions: list[Instruction],
                               wire2: set[int]) -> list[Instruction]:
    """Instruction list of u^{T2}, where the transposed legs are ``wire2``.

    Peels wire-1-only gates off both ends (they stay in place), then reverses
    the control-diagonal core with wire-2 factors transposed, per the
    identities in the module docstring; raises NotControlledSwapForm when the
    core contains a non-diagonal gate that straddles wire 1.
    """
    work = list(instructions)
    pre: list[Instruction] = []
    post: list[Instruction] = []
    while work and not (_instruction_support(work[-1]) & wire2):
        post.insert(0, work.pop())                 # latest wire-1 gate stays last
    while work and not (_instruction_support(work[0]) & wire2):
        pre.append(work.pop(0))                    # earliest wire-1 gate stays first
    core: list[Instruction] = []
    for ins in reversed(work):
        sup = _instruction_support(ins)
        if sup <= wire2:
            core.append(transpose_instruction(ins))
        elif _is_diagonal(ins):
            core.append(ins)
        else:
            raise NotControlledSwapForm(
                f"cannot transpose through {ins.op} on {sorted(sup)}: gate "
                "straddles wire 1 and is not diagonal")
    return pre + core + post


# --------------------------------------------------------------- DualCircuit
@dataclass
class DualCircuit:
    """Depth-1 dual image of a first-cell-sequential circuit.

    Slots are groups of ``cell_width`` wires indexed 0..n_slots-1; wire w of
    slot s is qubit s*cell_width + w.  ``initial_states`` assigns '0'/'+'
    characters to wires not covered by Bell pairs.  ``projections`` lists
    (wire, '0'|'+') post-selections imaging the sequential initial states.
    ``output_wires`` maps each sequential site to the dual wire carrying it
    after projection (register sites map only in dangling boundary mode).
    """
    n_slots: int
    cell_width: int
    bell_pairs: list[tuple[int, int]] = field(default_factory=list)
    initial_states: dict[int, str] = field(default_factory=dict)
    q_layer: list[list[Instruction]] = field(default_factory=list)
    projections: list[tuple[int, str]] = field(default_factory=list)
    output_wires: dict[int, int] = field(default_factory=dict)
    boundary_mode: str = "fix"
    post_layer: list[Instruction] = field(default_factory=list)

    @property
    def n_qubits(self) -> int:
        return self.n_slots * self.cell_width

    def pre_projection_circuit(self) -> Circuit:
        """Bell sources + state preparation + the Q-gate layer."""
        c = Circuit(self.n_qubits)
        for w, ch in sorted(self.initial_states.items()):
            c.add("RESET", w, state=ch)
        for a, b in self.bell_pairs:
            c.add("BELL_SRC", a, b)
        for block in self.q_layer:
            c.instructions.extend(block)
        return c

    def relayout_circuit(self) -> Circuit:
        """Pre-projection circuit followed by one extra SWAP per gate slot pair.

        The extra SWAP layer undoes the SWAP factor inside each dual gate, so
        the intermediate state appears in chain-ordered (site-major) layout
        where its bulk stabilizers take their standard local form.
        """
        c = self.pre_projection_circuit()
        for block in self.q_layer:
            tail = block[-self.cell_width:]
            if any(ins.op != "SWAP" for ins in tail):
                raise ValueError("gate blocks must end in a SWAP layer")
            for ins in tail:
                c.add("SWAP", *ins.targets)
        return c

    def to_circuit(self, mode: str = "project") -> Circuit:
        """Full dual circuit.

        mode 'project': post-select every projection (PROJ_P, +1 branch).
        mode 'measure': measure the projection operators into classical bits
        instead (the measurement-feedback reading of the same circuit).
        """
        c = self.pre_projection_circuit()
        n = self.n_qubits
        for k, (w, ch) in enumerate(self.projections):
            p = PauliOperator.single(n, "Z" if ch == "0" else "X", w)
            if mode == "project":
                c.add("PROJ_P", pauli=p, sign=1)
            elif mode == "measure":
                c.add("M_P", w, pauli=p, cbits=(k,))
            else:
                raise ValueError("mode must be 'project' or 'measure'")
        c.instructions.extend(self.post_layer)
        return c


def _block_wire_map(cells, k, cell_width):
    """Sequential wires of cell 1 / cell k -> dual wires of slots 2k-4, 2k-3
    (0-indexed; cell k>=2 occupies the (k-2)-th slot pair)."""
    lo, hi = 2 * (k - 2), 2 * (k - 2) + 1
    m = {}
    for j, q in enumerate(cells[0]):
        m[q] = lo * cell_width + j
    for j, q in enumerate(cells[k - 1]):
        m[q] = hi * cell_width + j
    return m


def _remap_instruction(ins: Instruction, wire_map: dict[int, int],
                       n_new: int) -> Instruction:
    targets = tuple(wire_map[t] for t in ins.targets)
    pauli = None
    if ins.pauli is not None:
        sites = {wire_map[q]: ins.pauli.restricted([q]).label()[1]
                 for q in ins.pauli.support}
        pauli = PauliOperator.from_sites(n_new, sites)
        if ins.pauli.sign == -1:
            pauli = pauli.negate()
    return Instruction(ins.op, targets, pauli, ins.params, ins.cbits)


def spacetime_rotate(seq: Circuit, unit_cell: list[tuple[int, ...]],
                     initial: str | None = None, boundary: str = "fix",
                     boundary_state: str = "+") -> DualCircuit:
    """Rotate a first-cell-sequential circuit into its dual Q-circuit.

    ``unit_cell`` partitions the sites into equal cells, cell 1 first (the
    register).  ``initial`` is the sequential circuit's product initial state
    ('0'/'+' per site, default all '0').  ``boundary``:

      'fix'      -- post-select the register's output onto ``boundary_state``
                    (one character per register wire); the dual output then
                    images sequential sites 2..L only.
      'dangling' -- keep an extra Bell-partner slot carrying the register's
                    output; the dual output images every sequential site.
    """
    seq.validate()
    if not seq.is_unitary():
        raise MalformedSequentialCircuit("sequential circuit must be unitary")
    cells = [tuple(c) for c in unit_cell]
    L = len(cells)
    if L < 2:
        raise MalformedSequentialCircuit("need at least two unit cells")
    w = len(cells[0])
    if any(len(c) != w for c in cells):
        raise MalformedSequentialCircuit("unit cells must have equal width")
    flat = [q for c in cells for q in c]
    if sorted(flat) != list(range(seq.n_qubits)):
        raise MalformedSequentialCircuit("unit cells must partition the sites")
    initial = initial or "0" * seq.n_qubits
    if len(initial) != seq.n_qubits or set(initial) - {"0", "+"}:
        raise ValueError("initial must assign '0' or '+' to every site")
    if len(boundary_state) == 1:
        boundary_state = boundary_state * w

    cell1 = set(cells[0])
    cell_of = {q: i for i, c in enumerate(cells) for q in c}

    # ---- split into per-cell blocks, each terminated by a full SWAP layer
    blocks: list[list[Instruction]] = []
    k = 2                      # cell currently interacting with the register
    buf: list[Instruction] = []
    pending_swaps: set[int] = set()
    for ins in seq.instructions:
        if k > L:
            raise MalformedSequentialCircuit("instructions after the last cell")
        sup = _instruction_support(ins)
        allowed = cell1 | set(cells[k - 1])
        if not sup <= allowed:
            raise MalformedSequentialCircuit(
                f"instruction {ins.op} on {sorted(sup)} is outside "
                f"cells 1 and {k}")
        # a SWAP pairing register wire j with cell-k wire j belongs to the
        # terminating SWAP layer
        if ins.op == "SWAP":
            a, b = ins.targets
            if a in cell1:
                ra, pb = a, b
            else:
                ra, pb = b, a
            if (ra in cell1 and pb in cells[k - 1]
                    and cells[0].index(ra) == cells[k - 1].index(pb)):
                j = cells[0].index(ra)
                if j in pending_swaps:
                    raise MalformedSequentialCircuit("duplicate layer SWAP")
                pending_swaps.add(j)
                if len(pending_swaps) == w:
                    blocks.append(buf)
                    buf, pending_swaps = [], set()
                    k += 1
                continue
        if pending_swaps:
            raise MalformedSequentialCircuit(
                "gates interleaved with a cell's terminating SWAP layer")
        buf.append(ins)
    if buf or pending_swaps or k != L + 1:
        raise MalformedSequentialCircuit(
            "circuit does not contain one SWAP-terminated block per cell")

    # ---- rotate each block
    n_slots = 2 * (L - 1) + (1 if boundary == "dangling" else 0)
    n_new = n_slots * w
    dual = DualCircuit(n_slots=n_slots, cell_width=w, boundary_mode=boundary)
    for idx, block in enumerate(blocks):
        kk = idx + 2
        q_instrs = symbolic_partial_transpose(block, set(cells[kk - 1]))
        wm = _block_wire_map(cells, kk, w)
        mapped = [_remap_instruction(i, wm, n_new) for i in q_instrs]
        lo, hi = 2 * (kk - 2), 2 * (kk - 2) + 1
        for j in range(w):                      # Q = SWAP ∘ u^{T2}
            mapped.append(Instruction("SWAP", (lo * w + j, hi * w + j)))
        dual.q_layer.append(mapped)

    # ---- layout: initial states, Bell pairs, boundary, projections, outputs
    for j, q in enumerate(cells[0]):            # slot 0 <- register initial
        dual.initial_states[j] = initial[q]
    for k_ in range(1, L - 1):                  # Bell pairs (2k-1, 2k)
        a, b = (2 * k_ - 1), 2 * k_
        for j in range(w):
            dual.bell_pairs.append((a * w + j, b * w + j))
    if boundary == "fix":
        top = 2 * L - 3
        for j in range(w):
            dual.initial_states[top * w + j] = boundary_state[j]
    elif boundary == "dangling":
        a, b = 2 * L - 3, 2 * L - 2
        for j in range(w):
            dual.bell_pairs.append((a * w + j, b * w + j))
        for j, q in enumerate(cells[0]):
            dual.output_wires[q] = (2 * L - 2) * w + j
    else:
        raise ValueError("boundary must be 'fix' or 'dangling'")
    for kk in range(2, L + 1):                  # projections image cell inits
        lo = 2 * (kk - 2)
        for j, q in enumerate(cells[kk - 1]):
            dual.projections.append((lo * w + j, initial[q]))
            dual.output_wires[q] = (lo + 1) * w + j
    return dual
