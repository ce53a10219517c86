"""2d models: the square-lattice GHZ sheet and the toric surface-code state.

The GHZ sheet reaches its target with one register worldline per lattice
direction: a horizontal sweep builds a row GHZ state, then each column is
grown vertically off its row site.  Its dual form glues one rotated column
comb onto each output wire of the rotated row backbone, so the whole thing
stays a single depth-1 Bell/gate/projection layer.

The toric model runs one plaquette-enforcing gate per plaquette row in a
sequential sweep; since the product of all plaquette operators is the
identity on the torus, the one row the sweep cannot reach is closed by an
epilogue acting only on the output row.  In the dual (dangling-boundary)
form that epilogue transplants verbatim onto the output wires.
"""

from __future__ import annotations

from ..circuit import Circuit, Instruction
from ..pauli import PauliOperator
from ..rotation import DualCircuit, spacetime_rotate, _remap_instruction
from . import ModelId, UnsupportedModel
from .onedim import _ghz_core


# ---------------------------------------------------------------- GHZ sheet
def _ghz2d_index(model: ModelId):
    lx = model.lx
    return lambda x, y: x + lx * y


def _ghz2d_su(model: ModelId) -> Circuit:
    lx, ly = model.lx, model.ly
    n = lx * ly
    idx = _ghz2d_index(model)
    c = Circuit(n)
    for q in range(n):
        c.add("RESET", q, state="+")
    for x in range(1, lx):
        c.add("EXP_P4", pauli=PauliOperator.from_sites(
            n, {idx(x - 1, 0): "Z", idx(x, 0): "Z"}))
        c.add("EXP_P4", pauli=PauliOperator.single(n, "X", idx(x, 0)))
    for y in range(1, ly):
        for x in range(lx):
            c.add("EXP_P4", pauli=PauliOperator.from_sites(
                n, {idx(x, 0): "Z", idx(x, y): "Z"}))
            c.add("EXP_P4", pauli=PauliOperator.single(n, "X", idx(x, y)))
        for x in range(lx):
            c.add("SWAP", idx(x, 0), idx(x, y))
    return c


def _ghz2d_dual(model: ModelId) -> DualCircuit:
    """Comb assembly: a rotated row backbone with one rotated column per site.

    Both pieces are the 1d GHZ rotation enlarged by one trailing site with
    the register output fixed to |+>.  Tooth x reuses backbone output wire
    b_x as its register input wire (slot 0): the wire is Bell-fed by the
    backbone, so the tooth drops its own initial state there and its first
    projection post-selects b_x instead of a private wire.  Output keying:
    site (x, y>=1) sits on tooth output y; site (x, 0) on tooth output ly
    (any single tooth leg carries the row site, by GHZ permutation symmetry).
    """
    lx, ly = model.lx, model.ly
    bcore, bcells = _ghz_core(lx + 1)
    bd = spacetime_rotate(bcore, bcells, initial="+" * (lx + 1),
                          boundary="fix", boundary_state="+")
    tcore, tcells = _ghz_core(ly + 1)
    td = spacetime_rotate(tcore, tcells, initial="+" * (ly + 1),
                          boundary="fix", boundary_state="+")
    nb, nt = bd.n_qubits, td.n_qubits
    total = nb + lx * (nt - 1)
    out = DualCircuit(n_slots=total, cell_width=1, boundary_mode="fix")
    out.bell_pairs += bd.bell_pairs
    out.initial_states.update(bd.initial_states)
    out.q_layer += bd.q_layer
    out.projections += bd.projections
    for x in range(lx):
        b_x = bd.output_wires[x + 1]
        base = nb + x * (nt - 1)
        wmap = {0: b_x}
        for w in range(1, nt):
            wmap[w] = base + w - 1
        out.bell_pairs += [(wmap[a], wmap[b]) for (a, b) in td.bell_pairs]
        for w, ch in td.initial_states.items():
            if w != 0:
                out.initial_states[wmap[w]] = ch
        for block in td.q_layer:
            out.q_layer.append([_remap_instruction(i, wmap, total)
                                for i in block])
        out.projections += [(wmap[w], ch) for (w, ch) in td.projections]
        for y in range(1, ly):
            out.output_wires[x + lx * y] = wmap[td.output_wires[y]]
        out.output_wires[x] = wmap[td.output_wires[ly]]
    return out


def _ghz2d_refs(model: ModelId) -> list[PauliOperator]:
    n = model.lx * model.ly
    gens = [PauliOperator.from_sites(n, {i: "Z", i + 1: "Z"})
            for i in range(n - 1)]
    gens.append(PauliOperator.from_sites(n, {i: "X" for i in range(n)}))
    return gens


def ghz2d_tooth_wire(model: ModelId, x: int, t: int) -> int:
    """Dual wire holding step t = 1..2*ly-1 of column x's comb tooth."""
    return 2 * model.lx + x * (2 * model.ly - 1) + (t - 1)


def _ghz2d_intermediate(model: ModelId) -> list[PauliOperator]:
    """Pre-projection generators of the comb, in relayout order.

    The backbone alternates even (gauge) and odd (junction) wires.  Each
    tooth threads its first wire into the backbone chain between adjacent
    junctions, while its remaining wires hang as a cluster chain off the
    even backbone wire.  Junctions with a left neighbour carry the
    four-body Y Z Z Z form; the leftmost junction degenerates to -X Z Z,
    and each chain end picks up the Y from the final pi/4 rotation.
    """
    lx, ly = model.lx, model.ly
    n = 2 * lx + lx * (2 * ly - 1)
    tooth = lambda x, t: ghz2d_tooth_wire(model, x, t)
    gens = []
    for x in range(lx):
        e, j, f = 2 * x, 2 * x + 1, tooth(x, 1)
        nbrs = {j: "Z"}
        if ly >= 2:
            nbrs[tooth(x, 2)] = "Z"
        gens.append(PauliOperator.from_sites(n, {e: "X", **nbrs}))
        jn = {e: "Z", f: "Z"}
        if x >= 1:
            jn[tooth(x - 1, 1)] = "Z"
            gens.append(PauliOperator.from_sites(n, {j: "Y", **jn}))
        else:
            gens.append(PauliOperator.from_sites(n, {j: "X", **jn}).negate())
        if x < lx - 1:
            gens.append(PauliOperator.from_sites(
                n, {f: "X", j: "Z", 2 * x + 3: "Z"}))
        else:
            gens.append(PauliOperator.from_sites(n, {f: "Y", j: "Z"}))
        for t in range(2, 2 * ly):
            w = tooth(x, t)
            left = e if t == 2 else tooth(x, t - 1)
            if t < 2 * ly - 1:
                gens.append(PauliOperator.from_sites(
                    n, {w: "X", left: "Z", tooth(x, t + 1): "Z"}))
            else:
                gens.append(PauliOperator.from_sites(n, {w: "Y", left: "Z"}))
    return gens


# -------------------------------------------------------------- toric model
class ToricLattice:
    """Edge-qubit layout of an lx-by-ly torus.

    Horizontal edge (x, y) points in +x from vertex (x, y); vertical edge
    (x, y) points in +y.  Horizontal edges occupy qubits 0..lx*ly-1 in
    row-major order, vertical edges the next lx*ly.
    """

    def __init__(self, lx: int, ly: int):
        self.lx, self.ly = lx, ly
        self.n = 2 * lx * ly

    def h(self, x: int, y: int) -> int:
        return (x % self.lx) + self.lx * (y % self.ly)

    def v(self, x: int, y: int) -> int:
        return self.lx * self.ly + (x % self.lx) + self.lx * (y % self.ly)

    def vertex_op(self, x: int, y: int) -> PauliOperator:
        """X on the four edges meeting vertex (x, y)."""
        return PauliOperator.from_sites(self.n, {
            self.h(x, y): "X", self.h(x - 1, y): "X",
            self.v(x, y): "X", self.v(x, y - 1): "X"})

    def plaquette_op(self, x: int, y: int) -> PauliOperator:
        """Z on the four edges bounding the face with corner vertex (x, y)."""
        return PauliOperator.from_sites(self.n, {
            self.h(x, y): "Z", self.h(x, y + 1): "Z",
            self.v(x, y): "Z", self.v(x + 1, y): "Z"})


def toric_lattice(model: ModelId) -> ToricLattice:
    return ToricLattice(model.lx, model.ly)


def _toric_plaquette_gate(lat: ToricLattice, ctrl: int,
                          edges: tuple[int, int, int]) -> list[Instruction]:
    """Two instructions projecting the plaquette with control edge ``ctrl``.

    CTRL_P(ctrl; Z Z Z) then H(ctrl) maps |+>_ctrl tensor phi to the
    plaquette-projected state whenever X_ctrl stabilizes the input, because
    conjugation gives U X_ctrl U^dag = Z_ctrl (Z Z Z).
    """
    pauli = PauliOperator.from_sites(lat.n, {e: "Z" for e in edges})
    return [Instruction("CTRL_P", (ctrl,), pauli=pauli),
            Instruction("H", (ctrl,))]


def _toric_core(model: ModelId) -> tuple[Circuit, list[tuple[int, ...]]]:
    """Sequential sweep: row 0 is the register cell, rows 1..ly-1 visit it.

    Step i enforces the row-0 plaquettes using row i's horizontal edges as
    controls, then swaps row i into the register position, marching the
    enforced region up the torus.  Cells are full rows (width 2*lx).
    """
    lat = toric_lattice(model)
    lx, ly = lat.lx, lat.ly
    c = Circuit(lat.n)
    for i in range(1, ly):
        for x in range(lx):
            c.instructions += _toric_plaquette_gate(
                lat, lat.h(x, i), (lat.h(x, 0), lat.v(x, 0), lat.v(x + 1, 0)))
        for x in range(lx):
            c.add("SWAP", lat.h(x, 0), lat.h(x, i))
            c.add("SWAP", lat.v(x, 0), lat.v(x, i))
    cells = [tuple([lat.h(x, y) for x in range(lx)] +
                   [lat.v(x, y) for x in range(lx)]) for y in range(ly)]
    return c, cells


def _toric_seam(model: ModelId) -> list[Instruction]:
    """Epilogue closing the last plaquette row, acting on final-row edges only.

    The sweep leaves row ly-1's plaquettes unenforced.  On the torus the
    product of all plaquettes is the identity, so enforcing lx - 1 of them
    suffices; gate x controls on the vertical edge to its right, which the
    earlier gates of the epilogue have not yet touched.
    """
    lat = toric_lattice(model)
    instrs: list[Instruction] = []
    for x in range(lat.lx - 1):
        instrs += _toric_plaquette_gate(
            lat, lat.v(x + 1, 0), (lat.h(x, 0), lat.h(x, 1), lat.v(x, 0)))
    return instrs


def _toric_su(model: ModelId) -> Circuit:
    core, _ = _toric_core(model)
    c = Circuit(core.n_qubits)
    for q in range(core.n_qubits):
        c.add("RESET", q, state="+")
    c.extend(core)
    c.instructions += _toric_seam(model)
    return c


def _toric_dual(model: ModelId) -> DualCircuit:
    """Dangling-boundary rotation of the sweep, seam transplanted to outputs.

    The dangling slot carries the register row's exact output, so the seam
    epilogue (which touches only rows 0 and 1 of the final state) remaps
    wire-for-wire onto the dual output wires and runs after the projections.
    """
    core, cells = _toric_core(model)
    dual = spacetime_rotate(core, cells, initial="+" * core.n_qubits,
                            boundary="dangling")
    wire_of = {q: dual.output_wires[q] for q in dual.output_wires}
    dual.post_layer = [_remap_instruction(i, wire_of, dual.n_qubits)
                       for i in _toric_seam(model)]
    return dual


def _toric_refs(model: ModelId) -> list[PauliOperator]:
    """All vertex and plaquette operators except one of each (torus relations)."""
    lat = toric_lattice(model)
    gens = []
    for y in range(lat.ly):
        for x in range(lat.lx):
            if (x, y) != (lat.lx - 1, lat.ly - 1):
                gens.append(lat.vertex_op(x, y))
                gens.append(lat.plaquette_op(x, y))
    return gens


def toric_dual_wires(model: ModelId):
    """(hw, vw, n_slots): wire coordinates of the toric dual in relayout order.

    Slot s holds one lattice row image (width 2*lx: horizontal edges first);
    even slots are projected, odd slots plus the final dangling slot carry
    outputs.  hw(s, x) / vw(s, x) give the horizontal / vertical edge wires.
    """
    lx, ly = model.lx, model.ly
    w = 2 * lx
    n_slots = 2 * ly - 1
    hw = lambda s, x: s * w + (x % lx)
    vw = lambda s, x: s * w + lx + (x % lx)
    return hw, vw, n_slots


def _toric_intermediate(model: ModelId) -> list[PauliOperator]:
    """Pre-projection generators of the toric dual, in relayout order.

    Five local families: boundary X Z and X Z Z pieces at the top slot,
    Z X / X X Bell locks against the dangling slot at the bottom, locked
    Z Z vertical-edge pairs across each (odd, even) slot boundary, cluster
    Z X Z columns plus X X Z Z plaquette pieces through each interior
    projected slot, and a five-body Z Z Z X Z face term at every projected
    slot tying the vertical-edge pair to the column below it.
    """
    lx, ly = model.lx, model.ly
    hw, vw, ns = toric_dual_wires(model)
    n = ns * 2 * lx
    P = lambda d: PauliOperator.from_sites(n, d)
    gens = []
    for x in range(lx):
        gens.append(P({hw(0, x): "X", hw(1, x): "Z"}))
        gens.append(P({vw(0, x): "X", hw(1, x - 1): "Z", hw(1, x): "Z"}))
        gens.append(P({hw(ns - 2, x): "Z", hw(ns - 1, x): "X"}))
        gens.append(P({vw(ns - 2, x): "X", vw(ns - 1, x): "X"}))
    for k in range(ly - 1):
        for x in range(lx):
            gens.append(P({vw(2 * k + 1, x): "Z", vw(2 * k + 2, x): "Z"}))
    for r in range(2, ns - 2, 2):
        for x in range(lx):
            gens.append(P({hw(r - 1, x): "Z", hw(r, x): "X",
                           hw(r + 1, x): "Z"}))
            gens.append(P({vw(r - 1, x): "X", vw(r, x): "X",
                           hw(r + 1, x - 1): "Z", hw(r + 1, x): "Z"}))
    for r in range(0, ns - 2, 2):
        for x in range(lx):
            gens.append(P({hw(r, x): "Z", vw(r, x): "Z", vw(r, x + 1): "Z",
                           hw(r + 1, x): "X", hw(r + 2, x): "Z"}))
    return gens


# ------------------------------------------------- measurement-feedback form
def _mf_base(model: ModelId):
    """Qubit base of vertex (x, y)'s six-qubit block.

    Block layout: legs 0..3 = east, west, up, down bond legs; 4 and 5 are
    the physical copies of the east leg (edge h(x, y)) and the up leg
    (edge v(x, y)), so every edge is copied exactly once, at its base vertex.
    """
    lx, ly = model.lx, model.ly
    return lambda x, y: 6 * ((x % lx) + lx * ((y % ly)))


def mf_physical_qubits(model: ModelId) -> list[int]:
    """Physical-edge qubits in lattice edge order (horizontal then vertical)."""
    if model.name != "toric2d":
        from .onedim import mf_physical_qubits as chain_phys
        return chain_phys(model)
    base = _mf_base(model)
    lx, ly = model.lx, model.ly
    return ([base(x, y) + 4 for y in range(ly) for x in range(lx)] +
            [base(x, y) + 5 for y in range(ly) for x in range(lx)])


def build_mf_circuit(model: ModelId) -> Circuit:
    """Constant-depth tensor-fusion circuit for the torus, feedback wired in.

    Each vertex prepares the even-parity four-leg tensor plus two physical
    copies; adjacent bond legs fuse by Bell-basis measurements (cbits 2e and
    2e+1 hold the XX and ZZ outcomes of edge e).  An XX = -1 outcome is a
    phase defect on the copied leg and is repaired in place; a ZZ = -1
    outcome deposits a vertex defect at the edge's head, repaired by an
    X-string to the origin vertex.  The strings are wind-free, so composing
    them bit by bit can only differ from a paired decoding by contractible
    cycles, which the state absorbs.  A final transversal Hadamard moves the
    output to the vertex-X / plaquette-Z convention of the reference group.
    """
    if model.name != "toric2d":
        raise UnsupportedModel(
            f"{model.name} has no measurement-feedback form")
    from ..decoders import toric_edge_head, toric_string_to_origin
    lat = toric_lattice(model)
    lx, ly = lat.lx, lat.ly
    base = _mf_base(model)
    n = 6 * lx * ly
    phys = mf_physical_qubits(model)
    c = Circuit(n)
    for y in range(ly):
        for x in range(lx):
            b = base(x, y)
            for j in range(6):
                c.add("RESET", b + j, state="0")
            for j in (1, 2, 3):
                c.add("H", b + j)
            for j in (1, 2, 3):
                c.add("CX", b + j, b + 0)
            c.add("CX", b + 0, b + 4)
            c.add("CX", b + 2, b + 5)
    for y in range(ly):
        for x in range(lx):
            e = lat.h(x, y)
            c.add("BELL_MEAS", base(x, y) + 0, base(x + 1, y) + 1,
                  cbits=(2 * e, 2 * e + 1))
            e = lat.v(x, y)
            c.add("BELL_MEAS", base(x, y) + 2, base(x, y + 1) + 3,
                  cbits=(2 * e, 2 * e + 1))
    for e in range(2 * lx * ly):
        c.add("CPAULI", pauli=PauliOperator.single(n, "Z", phys[e]),
              cbits=(2 * e,))
        hx, hy = toric_edge_head(lat, e)
        string = toric_string_to_origin(lat, hx, hy)
        if string:
            c.add("CPAULI",
                  pauli=PauliOperator.from_sites(
                      n, {phys[pe]: "X" for pe in string}),
                  cbits=(2 * e + 1,))
    for q in phys:
        c.add("H", q)
    return c


# ------------------------------------------------------------------ dispatch
def _check(model: ModelId) -> None:
    if model.name not in ("ghz2d", "toric2d"):
        raise UnsupportedModel(f"{model.name} is not a 2d model")


def build_su_circuit(model: ModelId) -> Circuit:
    _check(model)
    return _ghz2d_su(model) if model.name == "ghz2d" else _toric_su(model)


def build_dual_q_circuit(model: ModelId) -> DualCircuit:
    _check(model)
    return _ghz2d_dual(model) if model.name == "ghz2d" else _toric_dual(model)


def reference_stabilizers(model: ModelId) -> list[PauliOperator]:
    _check(model)
    return _ghz2d_refs(model) if model.name == "ghz2d" else _toric_refs(model)


def intermediate_stabilizers(model: ModelId) -> list[PauliOperator]:
    _check(model)
    return (_ghz2d_intermediate(model) if model.name == "ghz2d"
            else _toric_intermediate(model))
