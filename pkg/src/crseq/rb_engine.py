"""Simulated Clifford randomized benchmarking under quasistatic pulse noise.

Random Clifford sequences are compiled down to physical pulses: ideal virtual
Z rotations, dressed X-type pulses, and the scheme's entangling sequence. The
dressing of each (qubit, pulse kind) is frozen within a sequence and redrawn
between sequences from per-sequence deterministic streams, so results are
bit-identical for any worker count.
"""

from __future__ import annotations

from dataclasses import dataclass
from multiprocessing import get_context

import numpy as np
from scipy.optimize import curve_fit

from ._tableau import (
    clifford_key_1q,
    clifford_key_2q,
    one_qubit_clifford_table,
    two_qubit_table_cached,
)
from .cr_model import CRParams, calibrated_defaults
from .noise import GATE_KINDS, OneQubitNoiseModel, freeze_realization
from .pauli_core import rot_x, rot_z
from .sequences import clifford_generator, compile_sequence, ecr, length2

SCHEMES = ("length2", "length5", "ecr")

_EYE2 = np.eye(2, dtype=complex)
_EYE4 = np.eye(4, dtype=complex)


def scheme_sequence(scheme: str):
    """The entangling sequence a scheme uses as its Clifford-generating gate."""
    if scheme == "length2":
        return length2()
    if scheme == "ecr":
        return ecr()
    if scheme == "length5":
        return clifford_generator()
    raise ValueError(f"unknown scheme {scheme!r}; expected one of {SCHEMES}")


@dataclass(frozen=True)
class RBConfig:
    qubit_count: int = 2
    sequence_lengths: tuple = (30, 60, 110, 200, 350, 600)
    sequences_per_length: int = 1000
    delta_theta: float = 0.0
    scheme: str = "length2"
    seed: int = 0
    params: CRParams | None = None

    def __post_init__(self):
        if self.qubit_count not in (1, 2):
            raise ValueError("qubit_count must be 1 or 2")
        if self.qubit_count == 2 and self.scheme not in SCHEMES:
            raise ValueError(f"unknown scheme {self.scheme!r}")
        if len(self.sequence_lengths) == 0 or any(
            int(k) != k or k < 1 for k in self.sequence_lengths
        ):
            raise ValueError("sequence_lengths must be positive integers")
        if self.sequences_per_length < 1:
            raise ValueError("sequences_per_length must be positive")

    def resolved_params(self) -> CRParams:
        return self.params if self.params is not None else calibrated_defaults()


@dataclass(frozen=True)
class DecayCurve:
    lengths: tuple
    mean: np.ndarray
    stderr: np.ndarray
    n_sequences: int
    qubit_count: int


@dataclass(frozen=True)
class FitResult:
    a: float
    p: float
    b: float
    p_stderr: float
    n_points: int
    qubit_count: int

    @property
    def clifford_infidelity(self) -> float:
        return clifford_infidelity(self.p, self.qubit_count)

    @property
    def infidelity_stderr(self) -> float:
        d = 2.0**self.qubit_count
        return self.p_stderr * (d - 1.0) / d


class FitError(RuntimeError):
    """Decay fit could not be performed; carries diagnostics for reporting."""

    def __init__(self, message: str, diagnostics: dict | None = None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


def _one_qubit_static():
    """Static factors of the 24 virtual-Z compiled Cliffords.

    element = post_z @ (dressing @ pulse_core) @ pre_z; the returned kind_slot
    indexes a per-sequence stack whose slot 0 is the identity (virtual-only).
    """
    t = one_qubit_clifford_table()
    cores = {None: _EYE2, "x90": rot_x(np.pi / 2.0), "x180": rot_x(np.pi)}
    post = np.array([rot_z(b) for b in t.post_angles])
    prec = np.array([cores[k] @ rot_z(a) for k, a in zip(t.kinds, t.pre_angles)])
    kind_slot = np.array(
        [0 if k is None else 1 + GATE_KINDS.index(k) for k in t.kinds], dtype=np.int64
    )
    return post, prec, kind_slot


def _dressing_stack(realization, qubit: int) -> np.ndarray:
    """(5, 2, 2) stack: identity then the four frozen pulse dressings."""
    stack = np.empty((5, 2, 2), dtype=complex)
    stack[0] = _EYE2
    for i, kind in enumerate(GATE_KINDS):
        stack[1 + i] = realization.gate(qubit, kind)
    return stack


def _noisy_banks(p_stack, post, prec, kind_slot):
    """(n_seq, 24, 2, 2) noisy compiled one-qubit Cliffords for one qubit."""
    gathered = p_stack[:, kind_slot]
    return np.einsum("eij,nejk,ekl->neil", post, gathered, prec)


def _sequence_rng(seed: int, length_index: int, seq_index: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([seed, length_index, seq_index]))


def _survival_one_qubit(config: RBConfig, length_index: int) -> np.ndarray:
    table = one_qubit_clifford_table()
    post, prec, kind_slot = _one_qubit_static()
    model = OneQubitNoiseModel(config.delta_theta)
    n = config.sequences_per_length
    length = int(config.sequence_lengths[length_index])

    p_stack = np.empty((n, 5, 2, 2), dtype=complex)
    idx = np.empty((n, length), dtype=np.int16)
    for i in range(n):
        rng = _sequence_rng(config.seed, length_index, i)
        realization = freeze_realization(model, rng, qubits=(1,))
        p_stack[i] = _dressing_stack(realization, 1)
        idx[i] = rng.integers(table.order, size=length, dtype=np.int16)

    bank = _noisy_banks(p_stack, post, prec, kind_slot)
    ar = np.arange(n)
    u = np.broadcast_to(_EYE2, (n, 2, 2)).copy()
    u_ideal = u.copy()
    for step in range(length):
        c = idx[:, step]
        u = bank[ar, c] @ u
        u_ideal = table.matrices[c] @ u_ideal

    inv = np.empty(n, dtype=np.int16)
    for i in range(n):
        inv[i] = table.key_to_index[clifford_key_1q(u_ideal[i].conj().T, tol=1e-6)]
    u = bank[ar, inv] @ u
    return np.abs(u[:, 0, 0]) ** 2


def _survival_two_qubit(config: RBConfig, length_index: int) -> np.ndarray:
    params = config.resolved_params()
    seq = scheme_sequence(config.scheme)
    table = two_qubit_table_cached(seq.ideal_target)
    post, prec, kind_slot = _one_qubit_static()
    model = OneQubitNoiseModel(config.delta_theta)
    n = config.sequences_per_length
    length = int(config.sequence_lengths[length_index])

    p1 = np.empty((n, 5, 2, 2), dtype=complex)
    p2 = np.empty((n, 5, 2, 2), dtype=complex)
    ent = np.empty((n, 4, 4), dtype=complex)
    idx = np.empty((n, length), dtype=np.int32)
    for i in range(n):
        rng = _sequence_rng(config.seed, length_index, i)
        realization = freeze_realization(model, rng, qubits=(1, 2))
        p1[i] = _dressing_stack(realization, 1)
        p2[i] = _dressing_stack(realization, 2)
        ent[i] = compile_sequence(seq, params, realization)
        idx[i] = rng.integers(table.order, size=length, dtype=np.int32)

    bank1 = _noisy_banks(p1, post, prec, kind_slot)
    bank2 = _noisy_banks(p2, post, prec, kind_slot)
    ar = np.arange(n)
    u = np.broadcast_to(_EYE4, (n, 4, 4)).copy()
    u_ideal = u.copy()

    def apply_element(u, c):
        # decomposition [L0, E, L1, E, L2, E, L3]; padded layers are identity
        counts = table.ent_counts[c]
        for j in range(4):
            pairs = table.layer_pairs[c, j]
            layer = np.einsum(
                "nab,ncd->nacbd", bank1[ar, pairs[:, 0]], bank2[ar, pairs[:, 1]]
            ).reshape(n, 4, 4)
            u = layer @ u
            if j < 3:
                mask = counts > j
                if mask.any():
                    u[mask] = ent[mask] @ u[mask]
        return u

    for step in range(length):
        c = idx[:, step]
        u = apply_element(u, c)
        u_ideal = table.matrices[c] @ u_ideal

    inv = np.empty(n, dtype=np.int32)
    for i in range(n):
        inv[i] = table.key_to_index[clifford_key_2q(u_ideal[i].conj().T, tol=1e-6)]
    u = apply_element(u, inv)
    return np.abs(u[:, 0, 0]) ** 2


def _run_length(args):
    config, length_index = args
    if config.qubit_count == 1:
        surv = _survival_one_qubit(config, length_index)
    else:
        surv = _survival_two_qubit(config, length_index)
    return float(np.mean(surv)), float(np.std(surv, ddof=1) / np.sqrt(len(surv)))


def rb_run(config: RBConfig, workers: int = 1) -> DecayCurve:
    """Survival curve over the configured lengths; deterministic in config.seed."""
    if config.qubit_count == 2:
        two_qubit_table_cached(scheme_sequence(config.scheme).ideal_target)
    jobs = [(config, i) for i in range(len(config.sequence_lengths))]
    if workers > 1 and len(jobs) > 1:
        with get_context("fork").Pool(min(workers, len(jobs))) as pool:
            results = pool.map(_run_length, jobs)
    else:
        results = [_run_length(j) for j in jobs]
    mean = np.array([r[0] for r in results])
    stderr = np.array([r[1] for r in results])
    return DecayCurve(
        lengths=tuple(int(k) for k in config.sequence_lengths),
        mean=mean,
        stderr=stderr,
        n_sequences=config.sequences_per_length,
        qubit_count=config.qubit_count,
    )


def fit_decay(curve: DecayCurve, exclude_above: float = 0.9) -> FitResult:
    """Weighted fit of a p^k + b to the part of the curve below the threshold."""
    lengths = np.asarray(curve.lengths, dtype=float)
    keep = curve.mean <= exclude_above
    if int(keep.sum()) < 4:
        raise FitError(
            "not enough decay points below the exclusion threshold",
            diagnostics={
                "lengths": list(map(int, curve.lengths)),
                "mean_survival": [float(v) for v in curve.mean],
                "exclude_above": exclude_above,
                "points_kept": int(keep.sum()),
            },
        )
    x = lengths[keep]
    y = curve.mean[keep]
    sigma = np.maximum(curve.stderr[keep], 1e-9)
    d = 2.0**curve.qubit_count
    b0 = 1.0 / d
    z = np.clip(y - b0, 1e-9, None)
    slope, intercept = np.polyfit(x, np.log(z), 1)
    p0 = float(np.clip(np.exp(slope), 1e-6, 1.0 - 1e-9))
    a0 = float(np.clip(np.exp(intercept), 1e-3, 1.5))

    def model(k, a, p, b):
        return a * p**k + b

    try:
        popt, pcov = curve_fit(
            model,
            x,
            y,
            p0=[a0, p0, b0],
            sigma=sigma,
            absolute_sigma=True,
            bounds=([0.0, 1e-9, 0.0], [1.5, 1.0 - 1e-12, 1.0]),
            maxfev=20000,
        )
    except RuntimeError as exc:
        raise FitError(
            "decay fit did not converge",
            diagnostics={"lengths": list(map(float, x)), "mean_survival": list(map(float, y))},
        ) from exc
    a, p, b = (float(v) for v in popt)
    if not 0.0 < p < 1.0:
        raise FitError("fitted decay rate outside (0, 1)", diagnostics={"p": p})
    return FitResult(
        a=a,
        p=p,
        b=b,
        p_stderr=float(np.sqrt(max(pcov[1, 1], 0.0))),
        n_points=int(keep.sum()),
        qubit_count=curve.qubit_count,
    )


def clifford_infidelity(p: float, qubit_count: int) -> float:
    """Average Clifford infidelity r = (1 - p)(d - 1)/d from the decay rate."""
    d = 2.0**qubit_count
    return (1.0 - p) * (d - 1.0) / d


def suggest_lengths(r_clifford: float, qubit_count: int, count: int = 12) -> tuple:
    """Geometric length grid spanning the informative part of the decay.

    The window runs from just below the fit-exclusion knee deep into the tail;
    a wide, dense grid keeps the three-parameter fit stable under the
    non-exponential ensemble averaging of quasistatic noise.
    """
    d = 2.0**qubit_count
    p = 1.0 - r_clifford * d / (d - 1.0)
    if not 0.0 < p < 1.0:
        raise ValueError("infidelity out of range")
    fracs = np.geomspace(0.85, 0.12, count)
    ks = np.unique(np.maximum(1, np.round(np.log(fracs) / np.log(p)).astype(int)))
    return tuple(int(k) for k in ks)
