"""Local tensors for matrix-product / tensor-network state preparation.

A ``TensorSpec`` packages the entries of a small local tensor together with a
role tag for every leg.  Legs are binary (dimension 2) and are addressed by
their axis index into ``array``; axis ``j`` of the tensor is identified with
qubit ``j`` when the tensor is flattened into a state vector (little-endian:
leg ``j`` is bit ``j`` of the flat index).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .pauli import PauliOperator

TENSOR_ATOL = 1e-12


@dataclass(frozen=True)
class TensorSpec:
    """A local tensor with binary legs tagged as physical or bond."""

    name: str
    array: np.ndarray
    physical_legs: tuple[int, ...]
    bond_legs: tuple[int, ...]

    def __post_init__(self) -> None:
        arr = np.asarray(self.array, dtype=complex)
        object.__setattr__(self, "array", arr)
        if arr.shape != (2,) * arr.ndim:
            raise ValueError("tensor legs must all have dimension 2")
        legs = sorted(self.physical_legs + self.bond_legs)
        if legs != list(range(arr.ndim)):
            raise ValueError("physical and bond legs must partition the axes")

    @property
    def arity(self) -> int:
        return self.array.ndim

    def as_vector(self) -> np.ndarray:
        """Flatten to a state vector with leg j stored as bit j."""
        # numpy's C-order flatten makes axis 0 the most-significant index;
        # reverse the axes so axis j lands on bit j instead.
        return np.transpose(self.array, axes=tuple(reversed(range(self.arity)))).reshape(-1)


def ghz_chain_tensor() -> TensorSpec:
    """Copy tensor T[l, p, r] = 1 iff l == p == r (legs: left bond, physical, right bond)."""
    arr = np.zeros((2, 2, 2))
    arr[0, 0, 0] = arr[1, 1, 1] = 1.0
    return TensorSpec("ghz-delta", arr, physical_legs=(1,), bond_legs=(0, 2))


def cluster_chain_tensor() -> TensorSpec:
    """Chain tensor T[l, p, r] = delta_{lp} * (-1)^(l*r) for the 1d cluster state.

    The physical leg copies the left bond and the right bond picks up the
    graph-state phase, so a chain contraction produces the amplitudes
    (-1)^(sum_k p_k p_{k+1}) of the path-graph cluster state.
    """
    arr = np.zeros((2, 2, 2))
    for l in range(2):
        for r in range(2):
            arr[l, l, r] = (-1.0) ** (l * r)
    return TensorSpec("cluster-chain", arr, physical_legs=(1,), bond_legs=(0, 2))


def even_parity_tensor(n_legs: int = 4) -> TensorSpec:
    """Uniform tensor supported on configurations with an even number of 1s.

    With four legs this is the bond tensor whose contraction network builds
    the plaquette-stabilized loop-gas state; all legs are bond legs.
    """
    arr = np.zeros((2,) * n_legs)
    for idx in np.ndindex(*arr.shape):
        if sum(idx) % 2 == 0:
            arr[idx] = 1.0
    return TensorSpec(f"even-parity-{n_legs}", arr, physical_legs=(), bond_legs=tuple(range(n_legs)))


def even_parity_tensor_with_copies() -> TensorSpec:
    """Six-leg variant of the even-parity tensor with two legs copied out as physical.

    Legs 0..3 are the bond legs (same support rule as the four-leg tensor);
    legs 4 and 5 are physical copies of bond legs 0 and 1 respectively.
    """
    arr = np.zeros((2,) * 6)
    for idx in np.ndindex(2, 2, 2, 2):
        if sum(idx) % 2 == 0:
            arr[idx + (idx[0], idx[1])] = 1.0
    return TensorSpec("even-parity-copied", arr, physical_legs=(4, 5), bond_legs=(0, 1, 2, 3))


def apply_leg_pauli(vec: np.ndarray, arity: int, op: PauliOperator) -> np.ndarray:
    """Apply a Pauli over the legs (leg j = qubit j) to a flattened tensor."""
    from .dense import apply_pauli_to_vector

    if op.n != arity:
        raise ValueError("operator width must equal the tensor arity")
    return apply_pauli_to_vector(op, vec)


def is_tensor_symmetry(tensor: TensorSpec, op: PauliOperator, atol: float = TENSOR_ATOL) -> bool:
    """True when the Pauli fixes the tensor entrywise (including phase)."""
    vec = tensor.as_vector()
    return bool(np.allclose(apply_leg_pauli(vec, tensor.arity, op), vec, atol=atol))
