"""Constant-qubit sequential measurement protocols for 1d chains.

All four probes simulate hardware protocols that hold only two or three live
qubits at a time: a small bond register plus one physical qubit that is
measured and reset after every step of the sequential generation sweep.

- disorder probe: expectation of an X string, reduced to a bond-register
  autocorrelator when the chain tensor pushes a physical X to X (x) X on its
  bonds; otherwise sampled directly on the full chain.
- long-range-order probe: X measurements on odd sites with immediate bond
  feedback, then the Z.Z correlation between two even sites.
- strange-correlator probe: sequential projective CZ measurements against a
  product of |+> states, numerator and denominator sampled from independent
  shot pools.
- averaged strange correlator: the exact outcome-weighted average of the four
  single-reference strange correlators, which coincides with the projected
  Z.Z expectation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dense import (DeformedGhzSpec, DenseState, MAX_DENSE_QUBITS, build_deformed_ghz,
                    build_ghz_dense, disorder_string_oracle)
from .decoders import derive_mf_table
from .pauli import PauliOperator
from .rng import run_shots, shot_stream
from .tensors import TensorSpec, is_tensor_symmetry
from . import mps

ORACLE_ATOL = 1e-9
PLUS = np.array([1.0, 1.0]) / math.sqrt(2)


class MfSymmetryUnavailable(RuntimeError):
    """The chain tensor lacks the X -> X(x)X push the reduction relies on."""


@dataclass(frozen=True)
class ProbeSpec:
    """One probe request.

    ``target`` names the chain family ("ghz1d", "cluster1d", "paramagnet") or
    is a ``DeformedGhzSpec``.  ``start``/``length`` address the X string of the
    disorder probe (string sites are start .. start+length-1, zero-based);
    ``sites`` are the two even sites of the correlation probes.
    """

    kind: str
    target: object
    n: int
    shots: int
    seed: int
    start: int = 1
    length: int = 1
    sites: tuple[int, int] = (0, 2)

    def __post_init__(self) -> None:
        if self.shots < 1:
            raise ValueError("shots must be at least 1")
        if self.n < 2:
            raise ValueError("chains need at least two sites")
        if self.kind == "disorder":
            if not (0 <= self.start and self.start + self.length <= self.n):
                raise ValueError("string must fit inside the chain")
        elif self.kind in ("milro", "strange"):
            a, b = self.sites
            if not (0 <= a < b < self.n):
                raise ValueError("sites must be ordered and inside the chain")
            if self.kind == "milro" and (a % 2 or b % 2):
                raise ValueError("correlation sites must lie on the even sublattice")


@dataclass(frozen=True)
class EstimateResult:
    """A sampled estimate with its exact oracle when one is known."""

    mean: float
    stderr: float
    shots: int
    seed: int
    oracle: float | None = None
    method: str = ""

    @property
    def sigma_distance(self) -> float | None:
        if self.oracle is None:
            return None
        if self.stderr == 0.0:
            return 0.0 if self.mean == self.oracle else math.inf
        return abs(self.mean - self.oracle) / self.stderr


def estimate_from_values(values: np.ndarray, seed: int, oracle: float | None = None,
                         method: str = "") -> EstimateResult:
    values = np.asarray(values, dtype=float)
    shots = values.size
    mean = float(values.mean())
    std = float(values.std(ddof=1)) if shots > 1 else 0.0
    return EstimateResult(mean, std / math.sqrt(shots), shots, seed, oracle, method)


# ----------------------------------------------------------------- chain setup
def _chain_tensors(target, n: int) -> list[np.ndarray]:
    if isinstance(target, DeformedGhzSpec):
        return mps.deformed_ghz_mps(target.beta, n)
    if target == "ghz1d":
        return mps.ghz_mps(n)
    if target == "cluster1d":
        return mps.cluster_mps(n)
    if target == "paramagnet":
        return mps.paramagnet_mps(n)
    raise ValueError(f"unknown probe target {target!r}")


def _bulk_tensor(target) -> np.ndarray:
    if isinstance(target, DeformedGhzSpec):
        return mps.deformed_ghz_mps(target.beta, 3)[1]
    if target == "ghz1d":
        return mps.ghz_bulk_tensor()
    if target == "cluster1d":
        return mps.cluster_bulk_tensor()
    if target == "paramagnet":
        # pad the bond-dimension-1 tensor to one bond qubit (block diagonal)
        a = np.zeros((2, 2, 2), dtype=complex)
        a[0, :, 0] = a[1, :, 1] = PLUS
        return a
    raise ValueError(f"unknown probe target {target!r}")


def _dense_target(target, n: int) -> DenseState:
    if isinstance(target, DeformedGhzSpec):
        return build_deformed_ghz(DeformedGhzSpec(n, target.beta))
    if target == "ghz1d":
        return build_ghz_dense(n)
    return mps.mps_to_dense(_chain_tensors(target, n))


def has_x_push(bulk: np.ndarray) -> bool:
    """True when a physical X pushes to X (x) X on the bonds (phase +1)."""
    # legs: 0 = left bond, 1 = physical, 2 = right bond
    spec = TensorSpec("chain-bulk", bulk, physical_legs=(1,), bond_legs=(0, 2))
    if derive_mf_table(spec).correction(0, "X") is None:
        return False
    push = PauliOperator.from_sites(3, {0: "X", 1: "X", 2: "X"})
    return is_tensor_symmetry(spec, push)


# -------------------------------------------------------------- disorder probe
def _disorder_oracle(target, length: int) -> float:
    if isinstance(target, DeformedGhzSpec):
        return disorder_string_oracle(target.beta, length)
    if target == "ghz1d":
        return 0.0
    if target == "paramagnet":
        return 1.0
    return None


def disorder_branch_oracle(beta: float, n: int, start: int, length: int) -> float:
    """Independent closed-form route for the interior-deformed chain.

    Splits the superposition into its two product-state branches and sums the
    per-site overlap factors <b| e^{beta X} X^s e^{beta X} |b'> (interior) and
    <b| X^s |b'> (boundary) over the four branch pairs.
    """
    c2, s2 = math.cosh(2 * beta), math.sinh(2 * beta)

    def factor(site: int, in_string: bool, b: int, bp: int) -> float:
        row = b ^ 1 if in_string else b
        if 0 < site < n - 1:
            return c2 if row == bp else s2
        return 1.0 if row == bp else 0.0

    num = den = 0.0
    string = set(range(start, start + length))
    for b in (0, 1):
        for bp in (0, 1):
            num += math.prod(factor(k, k in string, b, bp) for k in range(n))
            den += math.prod(factor(k, False, b, bp) for k in range(n))
    return num / den


def run_disorder_probe(spec: ProbeSpec, workers: int = 1) -> EstimateResult:
    """Estimate <prod_a X_{start+a}> with the two-qubit reset-and-reuse protocol.

    When the bulk tensor has the X -> X(x)X push, the string reduces to the
    bond autocorrelator: bond qubit in |+>, `length` dilated gates with the
    physical qubit measured out and reset each step, final bond <X>.  Without
    the push the probe falls back to sampling the string operator on the full
    chain (dense, so limited to small n).
    """
    if spec.kind != "disorder":
        raise ValueError("spec.kind must be 'disorder'")
    oracle = _disorder_oracle(spec.target, spec.length)
    bulk = _bulk_tensor(spec.target)
    if has_x_push(bulk):
        gate = mps.dilate_tensor(bulk, 1)

        def shot(rng) -> float:
            st = DenseState(2)
            st.apply_1q("H", 0)  # bond qubit in |+>
            for _ in range(spec.length):
                st.apply_unitary(gate, [0, 1])
                out = st.measure_pauli(PauliOperator.single(2, "Z", 1), rng)
                if out == -1:
                    st.apply_1q("X", 1)  # reset the reused qubit to |0>
            return float(st.measure_pauli(PauliOperator.single(2, "X", 0), rng))

        values = run_shots(shot, spec.shots, spec.seed, workers)
        return estimate_from_values(values, spec.seed, oracle, method="bond-autocorrelator")

    # fallback: direct string sampling on the dense chain
    state = _dense_target(spec.target, spec.n)
    sites = {q: "X" for q in range(spec.start, spec.start + spec.length)}
    string = PauliOperator.from_sites(spec.n, sites)
    if oracle is None:
        oracle = float(np.real(state.expectation(string)))

    def shot(rng) -> float:
        return float(state.copy().measure_pauli(string, rng))

    values = run_shots(shot, spec.shots, spec.seed, workers)
    return estimate_from_values(values, spec.seed, oracle, method="direct-string")


# ------------------------------------------------------ long-range-order probe
def _milro_sweep(dilation: mps.MpsUnitaryDilation, n: int, sites: tuple[int, int],
                 rng, postselect: bool = False) -> float:
    """One sweep of the two-qubit protocol; returns the Z.Z product.

    Qubit 0 is the reused physical qubit, qubits 1.. hold the bond register.
    Sites are generated from the right end of the chain.  An X outcome of -1
    on an odd site is compensated by an immediate X on the bond register
    (feedback); with ``postselect`` the measurement is instead conditioned on
    the +1 outcome (forced projection).
    """
    nb = dilation.n_bond_qubits
    st = DenseState(1 + nb)
    bond = list(range(1, 1 + nb))
    product = 1.0
    for k in reversed(range(n)):
        st.apply_unitary(dilation.unitaries[k], bond + [0])
        if k % 2 == 1:
            obs = PauliOperator.single(1 + nb, "X", 0)
            out = st.measure_pauli(obs, rng, forced=1 if postselect else None)
            if out == -1:
                st.apply_1q("Z", 0)  # rotate the collapsed |-> back to |+>
                for q in bond:
                    st.apply_1q("X", q)
            st.apply_1q("H", 0)  # deterministic reset to |0>
        else:
            out = st.measure_pauli(PauliOperator.single(1 + nb, "Z", 0), rng)
            if k in sites:
                product *= out
            if out == -1:
                st.apply_1q("X", 0)
    return product


def run_milro_probe(spec: ProbeSpec, workers: int = 1,
                    postselect: bool = False) -> EstimateResult:
    """Measurement-induced long-range order <Z_a Z_b> via odd-site X feedback."""
    if spec.kind != "milro":
        raise ValueError("spec.kind must be 'milro'")
    if spec.target not in ("cluster1d", "paramagnet"):
        raise ValueError("the long-range-order probe targets cluster1d (or the"
                         " paramagnet control)")
    dilation = mps.dilate_mps(_chain_tensors(spec.target, spec.n))
    oracle = 1.0 if spec.target == "cluster1d" else 0.0

    def shot(rng) -> float:
        return _milro_sweep(dilation, spec.n, spec.sites, rng, postselect)

    values = run_shots(shot, spec.shots, spec.seed, workers)
    return estimate_from_values(values, spec.seed, oracle, method="odd-site-feedback")


def enumerate_milro_branches(n: int, sites: tuple[int, int],
                             target: str = "cluster1d") -> list[tuple[float, float]]:
    """All measurement branches of one feedback sweep with their probabilities."""
    dilation = mps.dilate_mps(_chain_tensors(target, n))
    nb = dilation.n_bond_qubits
    branches: list[tuple[float, float]] = []

    def walk(st: DenseState, k: int, prob: float, product: float) -> None:
        if prob < 1e-14:
            return
        if k < 0:
            branches.append((prob, product))
            return
        st.apply_unitary(dilation.unitaries[k], list(range(1, 1 + nb)) + [0])
        axis = "X" if k % 2 == 1 else "Z"
        obs = PauliOperator.single(1 + nb, axis, 0)
        p_plus = 0.5 * (1.0 + float(np.real(st.expectation(obs))))
        for out, p in ((1, p_plus), (-1, 1.0 - p_plus)):
            if p < 1e-9:
                continue
            nxt = st.copy()
            nxt.measure_pauli(obs, rng=None, forced=out)
            val = product
            if k % 2 == 1:
                if out == -1:
                    nxt.apply_1q("Z", 0)
                    for q in range(1, 1 + nb):
                        nxt.apply_1q("X", q)
                nxt.apply_1q("H", 0)
            else:
                if k in sites:
                    val = product * out
                if out == -1:
                    nxt.apply_1q("X", 0)
            walk(nxt, k - 1, prob * p, val)

    walk(DenseState(1 + nb), n - 1, 1.0, 1.0)
    return branches


# ------------------------------------------------------- strange correlator(s)
def _measure_cz(st: DenseState, rng) -> int:
    """Projective measurement of the +/-1 observable CZ on a two-qubit state.

    The -1 eigenspace is spanned by |11>, so the measurement is the projector
    pair {I - |11><11|, |11><11|}.
    """
    p_minus = float(abs(st.vec[3]) ** 2)
    outcome = -1 if rng.random() < p_minus else 1
    vec = st.vec.copy()
    if outcome == -1:
        vec[:3] = 0.0
        prob = p_minus
    else:
        vec[3] = 0.0
        prob = 1.0 - p_minus
    st.vec = vec / math.sqrt(prob)
    return outcome


def _strange_shot(n: int, rng, record: tuple[int, int] | None) -> float:
    """One sequential CZ-product sample; optionally folds in two Z outcomes."""
    st = DenseState(2)
    st.apply_1q("H", 0)
    st.apply_1q("H", 1)
    value = 1.0
    for k in range(n - 1):
        value *= _measure_cz(st, rng)
        holder = k % 2  # the qubit currently representing site k
        if k < n - 2 or record is not None:
            z = st.measure_pauli(PauliOperator.single(2, "Z", holder), rng)
            if record is not None and k in record:
                value *= z
            if k < n - 2:  # reuse the qubit as site k + 2
                if z == -1:
                    st.apply_1q("X", holder)
                st.apply_1q("H", holder)
    if record is not None and (n - 1) in record:
        value *= st.measure_pauli(PauliOperator.single(2, "Z", (n - 1) % 2), rng)
    return value


@dataclass(frozen=True)
class StrangeProbeResult:
    numerator: EstimateResult
    denominator: EstimateResult
    ratio: float
    reliable: bool


def strange_overlap_oracles(n: int, sites: tuple[int, int]) -> tuple[float, float]:
    """Exact dense (numerator, denominator) overlaps for the open-chain target."""
    cluster = mps.mps_to_dense(mps.cluster_mps(n))
    plus = DenseState.plus_state(n)
    den = float(np.real(plus.inner_product(cluster)))
    flipped = cluster.copy()
    flipped.apply_pauli(PauliOperator.from_sites(n, {sites[0]: "Z", sites[1]: "Z"}))
    num = float(np.real(plus.inner_product(flipped)))
    return num, den


def run_strange_probe(spec: ProbeSpec, workers: int = 1) -> StrangeProbeResult:
    """Strange correlator from independent numerator and denominator pools."""
    if spec.kind != "strange":
        raise ValueError("spec.kind must be 'strange'")
    num_oracle, den_oracle = (strange_overlap_oracles(spec.n, spec.sites)
                              if spec.n <= MAX_DENSE_QUBITS else (None, None))
    den_values = run_shots(lambda rng: _strange_shot(spec.n, rng, None),
                           spec.shots, spec.seed, workers, lane=0)
    num_values = run_shots(lambda rng: _strange_shot(spec.n, rng, spec.sites),
                           spec.shots, spec.seed, workers, lane=1)
    den = estimate_from_values(den_values, spec.seed, den_oracle, method="sequential-cz")
    num = estimate_from_values(num_values, spec.seed, num_oracle, method="sequential-cz")
    reliable = abs(den.mean) > 3.0 * den.stderr
    ratio = num.mean / den.mean if den.mean != 0.0 else math.nan
    return StrangeProbeResult(num, den, ratio, reliable)


@dataclass(frozen=True)
class AveragedStrangeResult:
    """Outcome-weighted strange correlator and its per-reference pieces.

    Keys of ``correlators``/``probabilities`` are (alpha, beta) in {+1, -1};
    a correlator is None when its reference overlap vanishes (degenerate
    projection), in which case its probability is zero as well.
    """

    value: float
    correlators: dict[tuple[int, int], complex | None]
    probabilities: dict[tuple[int, int], float]
    projected_zz: float
    bound_ok: bool


def averaged_strange_correlator(n: int, sites: tuple[int, int],
                                state: DenseState | None = None) -> AveragedStrangeResult:
    """Exact average of the four single-reference strange correlators.

    The average weighted by the conditional outcome probabilities equals the
    Z.Z expectation in the state projected onto |+> everywhere else; both are
    computed independently and cross-checked here.
    """
    if state is None:
        state = mps.mps_to_dense(mps.cluster_mps(n))
    if state.n != n:
        raise ValueError("state size does not match n")
    a, b = sites
    if not 0 <= a < b < n:
        raise ValueError("sites must be ordered and inside the chain")
    # contract every other site with <+|, leaving a 2 x 2 amplitude table
    psi = state.vec.reshape((2,) * n, order="F")
    order = [q for q in range(n) if q not in (a, b)] + [a, b]
    t = np.transpose(psi, order).reshape(-1, 2, 2)
    table = np.einsum("c,cab->ab", np.full(t.shape[0], (0.5) ** ((n - 2) / 2)), t)

    bras = {1: np.array([1.0, 1.0]) / math.sqrt(2), -1: np.array([1.0, -1.0]) / math.sqrt(2)}
    amp = {(al, be): complex(bras[al] @ table @ bras[be])
           for al in (1, -1) for be in (1, -1)}
    total = sum(abs(v) ** 2 for v in amp.values())
    if total < 1e-28:
        raise ValueError("the projected state vanishes")
    probabilities = {k: abs(v) ** 2 / total for k, v in amp.items()}
    correlators: dict[tuple[int, int], complex | None] = {}
    c_sum = 0.0 + 0.0j
    for (al, be), v in amp.items():
        if abs(v) < 1e-12:
            correlators[(al, be)] = None
            continue
        c = amp[(-al, -be)] / v  # <alpha| Z = <-alpha|
        correlators[(al, be)] = c
        c_sum += probabilities[(al, be)] * c
    if abs(c_sum.imag) > 1e-9:
        raise RuntimeError("the outcome-weighted average must be real")
    c_bar = float(c_sum.real)
    # independent route: Z.Z expectation of the projected state
    weights = np.abs(table) ** 2
    signs = np.array([[1.0, -1.0], [-1.0, 1.0]])
    projected_zz = float((weights * signs).sum() / weights.sum())
    if abs(c_bar - projected_zz) > 1e-8:
        raise RuntimeError("outcome-weighted average disagrees with the projected"
                           " correlation — internal inconsistency")
    magnitudes = [abs(c) for c in correlators.values() if c is not None]
    bound_ok = abs(c_bar) <= max(magnitudes) + 1e-9
    return AveragedStrangeResult(c_bar, correlators, probabilities, projected_zz, bound_ok)
