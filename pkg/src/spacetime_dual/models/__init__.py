"""Model circuit factories: sequential, dual-gate, and measurement-feedback forms.

Every supported model exposes up to four views:

- ``build_su_circuit``: a first-cell-sequential unitary circuit (with leading
  RESETs baking in the initial product state) whose output carries exactly the
  model's reference stabilizer group;
- ``build_dual_q_circuit``: its spacetime-rotated constant-depth form, a
  ``DualCircuit`` whose ``output_wires`` are re-keyed to model sites;
- ``build_mf_circuit``: a constant-depth measurement-feedback circuit with the
  Pauli corrections wired in as classically controlled gates;
- ``reference_stabilizers`` / ``intermediate_stabilizers``: frozen generating
  sets for the target state and for the pre-projection state of the dual form.
"""

from __future__ import annotations

from dataclasses import dataclass

MODEL_NAMES = ("ghz1d", "cluster1d", "ghz2d", "toric2d", "fractal_newman_moore")


class UnsupportedModel(ValueError):
    """Unknown model name, invalid size, or an unavailable circuit form."""


@dataclass(frozen=True)
class ModelId:
    """A model family plus its size and boundary parameters.

    1d models use ``n`` (number of sites); 2d models use ``lx`` x ``ly``.
    ``boundary`` defaults per family: open chains in 1d, periodic for the
    toric model, periodic-x/open-y for the fractal model.
    """

    name: str
    n: int = 0
    lx: int = 0
    ly: int = 0
    boundary: str = ""

    def __post_init__(self) -> None:
        if self.name not in MODEL_NAMES:
            raise UnsupportedModel(f"unknown model {self.name!r}")
        if self.name in ("ghz1d", "cluster1d"):
            if self.n < 2:
                raise UnsupportedModel(f"{self.name} needs n >= 2")
            default = "open"
        else:
            if self.lx < 2 or self.ly < 2:
                raise UnsupportedModel(f"{self.name} needs lx, ly >= 2")
            default = "periodic" if self.name == "toric2d" else \
                "periodic-x" if self.name == "fractal_newman_moore" else "open"
        if not self.boundary:
            object.__setattr__(self, "boundary", default)
        elif self.boundary != default:
            raise UnsupportedModel(
                f"{self.name} supports only the {default!r} boundary")


def _module(model: ModelId):
    from . import onedim
    if model.name in ("ghz1d", "cluster1d"):
        return onedim
    from . import twodim
    if model.name in ("ghz2d", "toric2d"):
        return twodim
    from . import fractal
    return fractal


def build_su_circuit(model: ModelId):
    return _module(model).build_su_circuit(model)


def build_dual_q_circuit(model: ModelId):
    return _module(model).build_dual_q_circuit(model)


def build_mf_circuit(model: ModelId):
    mod = _module(model)
    if not hasattr(mod, "build_mf_circuit"):
        raise UnsupportedModel(f"{model.name} has no measurement-feedback form")
    return mod.build_mf_circuit(model)


def reference_stabilizers(model: ModelId):
    return _module(model).reference_stabilizers(model)


def intermediate_stabilizers(model: ModelId):
    mod = _module(model)
    if not hasattr(mod, "intermediate_stabilizers"):
        raise UnsupportedModel(f"{model.name} has no intermediate stabilizer set")
    return mod.intermediate_stabilizers(model)
