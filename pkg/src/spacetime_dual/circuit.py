"""Circuit intermediate representation.

Instructions use a closed gate vocabulary:

  unitaries     H S X Y Z CZ CX SWAP EXP_P4 CTRL_P
  measurement   M_P (Pauli measurement, writes a classical bit)
                BELL_MEAS (XX then ZZ on a pair, writes two classical bits)
  projection    PROJ_P (post-selected Pauli projection with a fixed sign)
  reset         RESET (to |0> or |+>)
  feedback      CPAULI (Pauli applied iff a classical bit read -1)
  source        BELL_SRC (reset a pair into (|00>+|11>)/sqrt(2))

Classical bits obey write-before-read: a CPAULI may only reference bits already
written by an earlier measurement.  Serialization: versioned JSON with Pauli
strings spelled as labels (e.g. "+XZI").
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field

from .pauli import PauliOperator
from .tableau import MeasurementRecord, StabilizerState

JSON_VERSION = 1

UNITARY_OPS = {"H", "S", "SDG", "X", "Y", "Z", "CZ", "CX", "SWAP", "EXP_P4", "CTRL_P"}
ALL_OPS = UNITARY_OPS | {"M_P", "PROJ_P", "RESET", "CPAULI", "BELL_SRC", "BELL_MEAS"}

_OP_ARITY = {"H": 1, "S": 1, "SDG": 1, "X": 1, "Y": 1, "Z": 1,
             "CZ": 2, "CX": 2, "SWAP": 2, "BELL_SRC": 2, "BELL_MEAS": 2,
             "RESET": 1}


class MalformedCircuit(Exception):
    """Structurally invalid circuit (bad targets, cbit order, vocabulary)."""


@dataclass(frozen=True)
class Instruction:
    op: str
    targets: tuple[int, ...] = ()
    pauli: PauliOperator | None = None
    params: dict = field(default_factory=dict)
    cbits: tuple[int, ...] = ()

    def to_json_dict(self) -> dict:
        d: dict = {"op": self.op, "targets": list(self.targets)}
        params = dict(self.params)
        if self.pauli is not None:
            params["pauli"] = self.pauli.label()
        if params:
            d["params"] = params
        if self.cbits:
            d["cbits"] = list(self.cbits)
        return d

    @classmethod
    def from_json_dict(cls, d: dict, n_qubits: int) -> "Instruction":
        params = dict(d.get("params", {}))
        pauli = None
        if "pauli" in params:
            pauli = PauliOperator.from_label(params.pop("pauli"), n_qubits)
        return cls(op=d["op"], targets=tuple(d.get("targets", [])), pauli=pauli,
                   params=params, cbits=tuple(d.get("cbits", [])))


@dataclass
class Circuit:
    n_qubits: int
    instructions: list[Instruction] = field(default_factory=list)

    # ------------------------------------------------------------- building
    def add(self, op: str, *targets: int, pauli: PauliOperator | None = None,
            **params) -> "Circuit":
        cbits = tuple(params.pop("cbits", ()))
        self.instructions.append(Instruction(op, tuple(targets), pauli, params, cbits))
        return self

    def extend(self, other: "Circuit") -> "Circuit":
        if other.n_qubits != self.n_qubits:
            raise MalformedCircuit("qubit-count mismatch in extend")
        self.instructions.extend(other.instructions)
        return self

    @property
    def n_cbits(self) -> int:
        top = -1
        for ins in self.instructions:
            for c in ins.cbits:
                top = max(top, c)
        return top + 1

    def is_unitary(self) -> bool:
        return all(ins.op in UNITARY_OPS for ins in self.instructions)

    # ------------------------------------------------------------ validation
    def validate(self) -> None:
        written: set[int] = set()
        for ins in self.instructions:
            if ins.op not in ALL_OPS:
                raise MalformedCircuit(f"unknown op {ins.op!r}")
            for t in ins.targets:
                if not 0 <= t < self.n_qubits:
                    raise MalformedCircuit(f"target {t} out of range")
            if ins.op in _OP_ARITY and len(ins.targets) != _OP_ARITY[ins.op]:
                raise MalformedCircuit(f"{ins.op} expects {_OP_ARITY[ins.op]} targets")
            if ins.op in ("EXP_P4", "M_P", "PROJ_P", "CPAULI") and ins.pauli is None:
                raise MalformedCircuit(f"{ins.op} requires a Pauli parameter")
            if ins.op == "CTRL_P":
                if ins.pauli is None or len(ins.targets) != 1:
                    raise MalformedCircuit("CTRL_P requires one control and a Pauli")
                if ((ins.pauli.x | ins.pauli.z) >> ins.targets[0]) & 1:
                    raise MalformedCircuit("CTRL_P axis must not act on its control")
            if ins.op == "RESET" and ins.params.get("state", "0") not in ("0", "+"):
                raise MalformedCircuit("RESET state must be '0' or '+'")
            if ins.op in ("M_P", "BELL_MEAS"):
                written.update(ins.cbits)
            if ins.op == "CPAULI":
                if len(ins.cbits) != 1:
                    raise MalformedCircuit("CPAULI reads exactly one classical bit")
                if ins.cbits[0] not in written:
                    raise MalformedCircuit(
                        f"classical bit {ins.cbits[0]} read before being written")

    # ---------------------------------------------------------- serialization
    def to_json_dict(self) -> dict:
        return {"version": JSON_VERSION, "n_qubits": self.n_qubits,
                "instructions": [ins.to_json_dict() for ins in self.instructions]}

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_json_dict(), **kwargs)

    @classmethod
    def from_json_dict(cls, d: dict) -> "Circuit":
        if d.get("version") != JSON_VERSION:
            raise MalformedCircuit(f"unsupported circuit version {d.get('version')!r}")
        circ = cls(n_qubits=int(d["n_qubits"]))
        circ.instructions = [Instruction.from_json_dict(x, circ.n_qubits)
                             for x in d.get("instructions", [])]
        circ.validate()
        return circ

    @classmethod
    def from_json(cls, s: str) -> "Circuit":
        return cls.from_json_dict(json.loads(s))


# ------------------------------------------------------------------ execution
def _reset_tableau(state: StabilizerState, q: int, target: str, rng) -> None:
    basis = PauliOperator.single(state.n, "Z" if target == "0" else "X", q)
    if rng is not None:
        out = state.measure_pauli(basis, rng=rng)
    else:
        out = state.measure_pauli(
            basis, forced=1 if state.expectation(basis) != -1 else -1)
    if out == -1:
        flip = PauliOperator.single(state.n, "X" if target == "0" else "Z", q)
        state.apply_pauli(flip)


def run_tableau(circuit: Circuit, state: StabilizerState | None = None, rng=None,
                forced_outcomes: list[int] | None = None,
                initial: str | None = None) -> tuple[StabilizerState, MeasurementRecord]:
    """Execute on the stabilizer engine.

    ``forced_outcomes`` post-selects measurement branches in order (+1/-1
    entries; a None entry keeps the branch random).  ``initial`` is a
    product-state spec ('0'/'+' per qubit); default all |0>.
    """
    circuit.validate()
    if state is None:
        state = StabilizerState.product(initial or "0" * circuit.n_qubits)
    record = MeasurementRecord()
    forced_iter = iter(forced_outcomes) if forced_outcomes is not None else None

    def next_forced():
        if forced_iter is None:
            return None
        try:
            return next(forced_iter)
        except StopIteration:
            return None

    cbit_values: dict[int, int] = {}
    for ins in circuit.instructions:
        if ins.op in UNITARY_OPS:
            state.apply_named(ins.op, ins.targets, ins.pauli)
        elif ins.op == "M_P":
            out = state.measure_pauli(ins.pauli, rng=rng, forced=next_forced())
            record.add("M_P:" + ins.pauli.label(), ins.targets, out)
            if ins.cbits:
                cbit_values[ins.cbits[0]] = out
        elif ins.op == "BELL_MEAS":
            a, b = ins.targets
            xx = PauliOperator.from_sites(state.n, {a: "X", b: "X"})
            zz = PauliOperator.from_sites(state.n, {a: "Z", b: "Z"})
            ox = state.measure_pauli(xx, rng=rng, forced=next_forced())
            oz = state.measure_pauli(zz, rng=rng, forced=next_forced())
            record.add("BELL_XX", ins.targets, ox)
            record.add("BELL_ZZ", ins.targets, oz)
            if ins.cbits:
                cbit_values[ins.cbits[0]] = ox
                if len(ins.cbits) > 1:
                    cbit_values[ins.cbits[1]] = oz
        elif ins.op == "PROJ_P":
            sign = int(ins.params.get("sign", 1))
            state.project_pauli(ins.pauli, sign)
        elif ins.op == "RESET":
            _reset_tableau(state, ins.targets[0], ins.params.get("state", "0"), rng)
        elif ins.op == "BELL_SRC":
            a, b = ins.targets
            _reset_tableau(state, a, "0", rng)
            _reset_tableau(state, b, "0", rng)
            state.h(a)
            state.cx(a, b)
        elif ins.op == "CPAULI":
            if cbit_values.get(ins.cbits[0], 1) == -1:
                state.apply_pauli(ins.pauli)
        else:  # pragma: no cover
            raise MalformedCircuit(f"unhandled op {ins.op}")
    return state, record


def run_dense(circuit: Circuit, state=None, rng=None,
              forced_outcomes: list[int] | None = None, initial: str | None = None):
    """Execute on the dense engine (cross-validation oracle)."""
    from .dense import DenseState

    circuit.validate()
    if state is None:
        state = DenseState.product(initial or "0" * circuit.n_qubits)
    record = MeasurementRecord()
    forced_iter = iter(forced_outcomes) if forced_outcomes is not None else None

    def next_forced():
        if forced_iter is None:
            return None
        try:
            return next(forced_iter)
        except StopIteration:
            return None

    cbit_values: dict[int, int] = {}
    for ins in circuit.instructions:
        if ins.op in UNITARY_OPS:
            state.apply_named(ins.op, ins.targets, ins.pauli)
        elif ins.op == "M_P":
            out = state.measure_pauli(ins.pauli, rng, forced=next_forced())
            record.add("M_P:" + ins.pauli.label(), ins.targets, out)
            if ins.cbits:
                cbit_values[ins.cbits[0]] = out
        elif ins.op == "BELL_MEAS":
            a, b = ins.targets
            xx = PauliOperator.from_sites(state.n, {a: "X", b: "X"})
            zz = PauliOperator.from_sites(state.n, {a: "Z", b: "Z"})
            ox = state.measure_pauli(xx, rng, forced=next_forced())
            oz = state.measure_pauli(zz, rng, forced=next_forced())
            record.add("BELL_XX", ins.targets, ox)
            record.add("BELL_ZZ", ins.targets, oz)
            if ins.cbits:
                cbit_values[ins.cbits[0]] = ox
                if len(ins.cbits) > 1:
                    cbit_values[ins.cbits[1]] = oz
        elif ins.op == "PROJ_P":
            state.project_pauli(ins.pauli, int(ins.params.get("sign", 1)))
        elif ins.op == "RESET":
            q = ins.targets[0]
            basis = "Z" if ins.params.get("state", "0") == "0" else "X"
            p = PauliOperator.single(state.n, basis, q)
            if rng is not None:
                out = state.measure_pauli(p, rng)
            else:
                from .tableau import ZeroProbabilityProjection
                try:
                    out = state.measure_pauli(p, None, forced=1)
                except ZeroProbabilityProjection:
                    out = state.measure_pauli(p, None, forced=-1)
            if out == -1:
                flip = PauliOperator.single(state.n, "X" if basis == "Z" else "Z", q)
                state.apply_pauli(flip)
        elif ins.op == "BELL_SRC":
            raise MalformedCircuit("BELL_SRC on dense engine: prepare explicitly")
        elif ins.op == "CPAULI":
            if cbit_values.get(ins.cbits[0], 1) == -1:
                state.apply_pauli(ins.pauli)
    return state, record


# ---------------------------------------------------------------- Heisenberg
def conjugate_by_pauli_rules(ins: Instruction, p: PauliOperator) -> PauliOperator:
    """Image of P under conjugation by one unitary instruction: P -> U P U^dag."""
    n = p.n
    op, t = ins.op, ins.targets
    if op == "EXP_P4":
        axis = ins.pauli
        if p.commutes_with(axis):
            return p
        return axis.mul(p).times_i(3)  # -i P_axis P
    if op == "CTRL_P":
        c = t[0]
        axis = ins.pauli
        mc = 1 << c
        rest = PauliOperator(n, p.x & ~mc, p.z & ~mc, p.e)
        img = PauliOperator.identity(n)
        if (p.x >> c) & 1:
            img = img.mul(PauliOperator.single(n, "X", c).mul(axis))
        zc = ((p.z >> c) & 1) ^ (0 if rest.commutes_with(axis) else 1)
        if zc:
            img = img.mul(PauliOperator.single(n, "Z", c))
        return img.mul(rest)
    x, z, e = p.x, p.z, p.e
    if op == "H":
        m = 1 << t[0]
        if x & z & m:
            e += 2
        d = (x ^ z) & m
        x ^= d
        z ^= d
    elif op == "S":
        m = 1 << t[0]
        if x & m:
            e += 1
            z ^= m
    elif op == "SDG":
        m = 1 << t[0]
        if x & m:
            e += 3
            z ^= m
    elif op == "X":
        if z & (1 << t[0]):
            e += 2
    elif op == "Z":
        if x & (1 << t[0]):
            e += 2
    elif op == "Y":
        if (x ^ z) & (1 << t[0]):
            e += 2
    elif op == "CX":
        mc, mt = 1 << t[0], 1 << t[1]
        if x & mc:
            x ^= mt
        if z & mt:
            z ^= mc
    elif op == "CZ":
        ma, mb = 1 << t[0], 1 << t[1]
        if (x & ma) and (x & mb):
            e += 2
        if x & ma:
            z ^= mb
        if x & mb:
            z ^= ma
    elif op == "SWAP":
        ma, mb = 1 << t[0], 1 << t[1]
        for _ in (0,):
            va, vb = bool(x & ma), bool(x & mb)
            if va != vb:
                x ^= ma | mb
            va, vb = bool(z & ma), bool(z & mb)
            if va != vb:
                z ^= ma | mb
    else:
        raise MalformedCircuit(f"cannot conjugate through {op!r}")
    return PauliOperator(n, x, z, e)


def conjugate_by_circuit(circuit: Circuit, p: PauliOperator) -> PauliOperator:
    """Heisenberg map P -> U P U^dag for a unitary circuit U (time order)."""
    if not circuit.is_unitary():
        raise MalformedCircuit("conjugation requires a purely unitary circuit")
    if p.n != circuit.n_qubits:
        raise ValueError("operator size mismatch")
    for ins in circuit.instructions:
        p = conjugate_by_pauli_rules(ins, p)
    return p
