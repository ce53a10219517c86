"""Fractal three-body symmetry-breaking model on a periodic-x, open-y sheet.

Site (x, y) couples through Z Z Z on every downward triangle
{(x, y), (x+1, y), (x, y+1)}, the cellular-automaton constraint whose
symmetries live on Sierpinski-triangle supports.  Each triangle is enforced
by a two-instruction gate: a controlled Z Z on the apex qubit followed by a
Hadamard, which projects the triangle onto +1 whenever the apex still holds
its fresh |+> (same mechanism as the toric plaquette gate).

Rows are enforced top to bottom, so the circuit is first-cell sequential
with rows as cells and rotates to a constant-depth dual form.  The dual's
post-selected gauge projection is the only feedback mode provided: unwanted
projection outcomes would need a cellular-automaton decoder that this
library does not define.
"""

from __future__ import annotations

from ..circuit import Circuit
from ..pauli import PauliOperator
from ..rotation import DualCircuit, spacetime_rotate
from . import ModelId, UnsupportedModel


def site(model: ModelId, x: int, y: int) -> int:
    """Row-major qubit index, periodic in x."""
    return (x % model.lx) + model.lx * y


def build_su_circuit(model: ModelId) -> Circuit:
    """Enforce each row's downward triangles against the row above it."""
    lx, ly = model.lx, model.ly
    n = lx * ly
    c = Circuit(n)
    for q in range(n):
        c.add("RESET", q, state="+")
    for y in range(1, ly):
        for x in range(lx):
            pair = PauliOperator.from_sites(
                n, {site(model, x, y - 1): "Z", site(model, x + 1, y - 1): "Z"})
            c.add("CTRL_P", site(model, x, y), pauli=pair)
            c.add("H", site(model, x, y))
    return c


def reference_stabilizers(model: ModelId) -> list[PauliOperator]:
    """Z Z Z on every downward triangle (lx * (ly - 1) generators)."""
    lx, ly = model.lx, model.ly
    n = lx * ly
    return [PauliOperator.from_sites(n, {site(model, x, y): "Z",
                                         site(model, x + 1, y): "Z",
                                         site(model, x, y + 1): "Z"})
            for y in range(ly - 1) for x in range(lx)]


def _core(model: ModelId) -> tuple[Circuit, list[tuple[int, ...]]]:
    """First-cell-sequential form: row 0 is the register, rows are cells.

    Each step enforces the new row's triangles against the register, then
    swaps the new row in.  The marching register leaves final row y's data
    on physical row y + 1 (row ly - 1 stays on the register), which
    ``build_dual_q_circuit`` undoes in its output keying.
    """
    lx, ly = model.lx, model.ly
    n = lx * ly
    c = Circuit(n)
    for i in range(1, ly):
        for x in range(lx):
            pair = PauliOperator.from_sites(
                n, {site(model, x, 0): "Z", site(model, x + 1, 0): "Z"})
            c.add("CTRL_P", site(model, x, i), pauli=pair)
            c.add("H", site(model, x, i))
        for x in range(lx):
            c.add("SWAP", site(model, x, 0), site(model, x, i))
    cells = [tuple(site(model, x, y) for x in range(lx)) for y in range(ly)]
    return c, cells


def build_dual_q_circuit(model: ModelId) -> DualCircuit:
    dual = spacetime_rotate(*_core(model), initial="+" * (model.lx * model.ly),
                            boundary="dangling")
    raw = dict(dual.output_wires)
    for y in range(model.ly):
        for x in range(model.lx):
            dual.output_wires[site(model, x, y)] = \
                raw[site(model, x, (y + 1) % model.ly)]
    return dual


def dual_wire(model: ModelId, s: int, x: int) -> int:
    """Wire x of slot s in the dual's relayout coordinates."""
    return s * model.lx + (x % model.lx)


def intermediate_stabilizers(model: ModelId) -> list[PauliOperator]:
    """Pre-projection generators: the gauged three-body constraint state.

    Even slots hold gauge (projected) qubits at triangle centers, odd slots
    and the dangling slot hold matter qubits.  Matter generators minimally
    couple X to the three surrounding gauge qubits (Z Z above, Z below);
    gauge generators couple X to the three surrounding matter qubits, with
    the row above absent at the top boundary.  The dangling matter row locks
    to the last gauge row through bare Z X pairs.
    """
    lx, ly = model.lx, model.ly
    ns = 2 * ly - 1
    n = ns * lx
    w = lambda s, x: dual_wire(model, s, x)
    P = lambda d: PauliOperator.from_sites(n, d)
    gens = []
    for x in range(lx):
        gens.append(P({w(0, x): "X", w(1, x - 1): "Z", w(1, x): "Z"}))
        gens.append(P({w(ns - 2, x): "Z", w(ns - 1, x): "X"}))
    for s in range(1, ns - 1, 2):
        for x in range(lx):
            gens.append(P({w(s - 1, x): "Z", w(s - 1, x + 1): "Z",
                           w(s, x): "X", w(s + 1, x): "Z"}))
    for s in range(2, ns - 2, 2):
        for x in range(lx):
            gens.append(P({w(s, x): "X", w(s - 1, x): "Z",
                           w(s + 1, x - 1): "Z", w(s + 1, x): "Z"}))
    return gens
