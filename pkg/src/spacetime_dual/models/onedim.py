"""1d chain models: the GHZ chain and the open cluster chain.

Both models come in three equivalent forms.  The sequential form interacts a
register qubit with each site in turn (register = qubit 0, followed by a SWAP
so the register worldline moves on).  The dual form is its spacetime rotation:
Bell pairs, one layer of two-qubit gates, and single-site projections.  The
measurement-feedback form prepares one three-leg chain tensor per site,
fuses neighbours by Bell-basis measurements, and repairs every unwanted
outcome through the tensor's symmetry table.
"""

from __future__ import annotations

from ..circuit import Circuit
from ..decoders import OutcomeSyndrome, decode_mf_chain, derive_mf_table
from ..pauli import PauliOperator
from ..rotation import DualCircuit, spacetime_rotate
from ..tensors import TensorSpec, cluster_chain_tensor, ghz_chain_tensor
from . import ModelId, UnsupportedModel


# --------------------------------------------------------- sequential form
def _ghz_core(n: int) -> tuple[Circuit, list[tuple[int, ...]]]:
    """Register qubit 0 aligns each site with the growing symmetry-broken block."""
    c = Circuit(n)
    for i in range(1, n):
        c.add("EXP_P4", pauli=PauliOperator.from_sites(n, {0: "Z", i: "Z"}))
        c.add("EXP_P4", pauli=PauliOperator.single(n, "X", i))
        c.add("SWAP", 0, i)
    return c, [(q,) for q in range(n)]


def _cluster_core(n: int) -> tuple[Circuit, list[tuple[int, ...]]]:
    """Controlled-Z between the register and each site builds a path graph state.

    Cell i uses qubit n - i so the output chain comes out in natural qubit
    order (the register ends adjacent to the last site it visited).
    """
    c = Circuit(n)
    cells = [(0,)]
    for i in range(1, n):
        q = n - i
        c.add("CZ", 0, q)
        c.add("SWAP", 0, q)
        cells.append((q,))
    return c, cells


def _core(n: int, name: str) -> tuple[Circuit, list[tuple[int, ...]], str]:
    c, cells = (_ghz_core if name == "ghz1d" else _cluster_core)(n)
    return c, cells, "+" * n


def build_su_circuit(model: ModelId) -> Circuit:
    """Sequential circuit on the model's n sites (site 0 doubles as register)."""
    core, _, initial = _core(model.n, model.name)
    c = Circuit(core.n_qubits)
    for q, ch in enumerate(initial):
        c.add("RESET", q, state=ch)
    c.extend(core)
    return c


def reference_stabilizers(model: ModelId) -> list[PauliOperator]:
    """Generators of the n-site target state (GHZ or open path cluster)."""
    n = model.n
    if model.name == "ghz1d":
        gens = [PauliOperator.from_sites(n, {i: "Z", i + 1: "Z"})
                for i in range(n - 1)]
        gens.append(PauliOperator.from_sites(n, {i: "X" for i in range(n)}))
        return gens
    gens = [PauliOperator.from_sites(n, {0: "X", 1: "Z"})]
    gens += [PauliOperator.from_sites(n, {i - 1: "Z", i: "X", i + 1: "Z"})
             for i in range(1, n - 1)]
    gens.append(PauliOperator.from_sites(n, {n - 2: "Z", n - 1: "X"}))
    return gens


# --------------------------------------------------------------- dual form
def build_dual_q_circuit(model: ModelId) -> DualCircuit:
    """Spacetime-rotated constant-depth form.

    Internally this rotates the sequential circuit enlarged by one extra site
    (the extra trailing cell acts trivially on the target state), so that
    fixing the register's output leg to its known final state (|+> for the
    GHZ chain, |0> for the cluster chain) leaves exactly the n-site target
    state on the output wires.  ``output_wires`` is re-keyed to model sites
    0..n-1.
    """
    core, cells, initial = _core(model.n + 1, model.name)
    boundary_state = "+" if model.name == "ghz1d" else "0"
    dual = spacetime_rotate(core, cells, initial=initial,
                            boundary="fix", boundary_state=boundary_state)
    dual.output_wires = {k: dual.output_wires[k + 1] for k in range(model.n)}
    return dual


def intermediate_stabilizers(model: ModelId) -> list[PauliOperator]:
    """Pre-projection generators of the dual form, in relayout (chain) order.

    The bulk is the cluster condition Z X Z; the chain ends carry a Y from
    the pi/4 rotations acting on the dangling register states.  Valid for
    the GHZ chain (matter on odd 0-indexed wires, gauge on even wires).
    """
    if model.name != "ghz1d":
        raise UnsupportedModel("intermediate generators are tabulated for ghz1d only")
    m = 2 * model.n
    gens = [PauliOperator.from_sites(m, {0: "Y", 1: "Z"})]
    gens += [PauliOperator.from_sites(m, {i - 1: "Z", i: "X", i + 1: "Z"})
             for i in range(1, m - 1)]
    gens.append(PauliOperator.from_sites(m, {m - 2: "Z", m - 1: "Y"}))
    return gens


# ------------------------------------------------- measurement-feedback form
def chain_tensor(model: ModelId) -> TensorSpec:
    return ghz_chain_tensor() if model.name == "ghz1d" else cluster_chain_tensor()


def mf_boundary_bases(model: ModelId) -> tuple[str, str]:
    return ("X", "X") if model.name == "ghz1d" else ("X", "Z")


def _prepare_tensor(c: Circuit, model: ModelId, base: int) -> None:
    """Prepare one chain tensor on qubits (base, base+1, base+2) = (l, p, r)."""
    for j in range(3):
        c.add("RESET", base + j, state="0")
    if model.name == "ghz1d":
        c.add("H", base)
        c.add("CX", base, base + 1)
        c.add("CX", base + 1, base + 2)
    else:
        # sum_{l,r} (-1)^(l r) |l, l, r>: copy the left bond, phase the right
        c.add("H", base)
        c.add("CX", base, base + 1)
        c.add("H", base + 2)
        c.add("CZ", base, base + 2)


def mf_cbit_layout(n: int) -> dict[str, object]:
    """Classical bit addresses of the chain MF circuit."""
    return {
        "bond_xx": [2 * k for k in range(n - 1)],
        "bond_zz": [2 * k + 1 for k in range(n - 1)],
        "left": 2 * (n - 1),
        "right": 2 * n - 1,
    }


def _unit_syndromes(model: ModelId):
    """One OutcomeSyndrome per classical bit, with only that bit set."""
    n = model.n
    zero = tuple((0, 0) for _ in range(n - 1))
    for k in range(n - 1):
        for which in range(2):
            bell = list(zero)
            bell[k] = (1, 0) if which == 0 else (0, 1)
            yield 2 * k + which, OutcomeSyndrome(model.name, tuple(bell))
    yield 2 * (n - 1), OutcomeSyndrome(model.name, zero, boundary=(1, 0))
    yield 2 * n - 1, OutcomeSyndrome(model.name, zero, boundary=(0, 1))


def build_mf_circuit(model: ModelId) -> Circuit:
    """Constant-depth tensor-fusion circuit with wired-in Pauli feedback.

    Qubits 3k, 3k+1, 3k+2 hold tensor k's left bond, physical site, and
    right bond.  Adjacent bonds are fused by Bell-basis measurements; the
    dangling end bonds are measured in the bases the boundary contraction
    requires.  Because the sweep decoder is bit-linear, feedback is wired as
    one classically controlled Pauli per measurement bit, each obtained by
    decoding the unit syndrome of that bit.
    """
    n = model.n
    table = derive_mf_table(chain_tensor(model))
    bases = mf_boundary_bases(model)
    c = Circuit(3 * n)
    for k in range(n):
        _prepare_tensor(c, model, 3 * k)
    for k in range(n - 1):
        c.add("BELL_MEAS", 3 * k + 2, 3 * k + 3, cbits=(2 * k, 2 * k + 1))
    c.add("M_P", 0, pauli=PauliOperator.single(3 * n, bases[0], 0),
          cbits=(2 * (n - 1),))
    c.add("M_P", 3 * n - 1, pauli=PauliOperator.single(3 * n, bases[1], 3 * n - 1),
          cbits=(2 * n - 1,))
    for cbit, syndrome in _unit_syndromes(model):
        frame = decode_mf_chain(syndrome, table, boundary_bases=bases)
        if frame.weight == 0:
            continue
        c.add("CPAULI",
              pauli=frame.embedded(3 * n, [3 * k + 1 for k in range(n)]),
              cbits=(cbit,))
    return c


def mf_physical_qubits(model: ModelId) -> list[int]:
    return [3 * k + 1 for k in range(model.n)]
