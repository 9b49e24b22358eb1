"""Quasistatic coherent noise on physical one-qubit pulses.

Each physical X-type pulse kind is dressed by a small rotation about a random
axis. Within one randomized-benchmarking sequence the dressing is frozen per
(qubit, pulse kind); across sequences it is redrawn. Virtual Z rotations are
exact and never dressed.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

GATE_KINDS = ("x90", "x90m", "x180", "x180m")

_IDENTITY2 = np.eye(2, dtype=complex)
_IDENTITY2.flags.writeable = False


@dataclass(frozen=True)
class OneQubitNoiseModel:
    """Gaussian over-rotation of width delta_theta about a uniformly random axis."""

    delta_theta: float

    def __post_init__(self):
        if self.delta_theta < 0:
            raise ValueError("delta_theta must be nonnegative")


def sample_perturbation(delta_theta: float, rng: np.random.Generator) -> np.ndarray:
    """One dressing unitary exp(-i eps/2 r.sigma), |r| = 1.

    The axis is drawn uniformly from the unit cube (zero vector rejected) and
    normalized; eps ~ N(0, delta_theta^2). Draw order: axis first, then eps.
    """
    r = rng.uniform(-1.0, 1.0, size=3)
    while not np.any(r):
        r = rng.uniform(-1.0, 1.0, size=3)
    r = r / np.linalg.norm(r)
    eps = rng.normal(0.0, delta_theta)
    c, s = np.cos(eps / 2.0), np.sin(eps / 2.0)
    return np.array(
        [
            [c - 1j * s * r[2], -s * (r[1] + 1j * r[0])],
            [s * (r[1] - 1j * r[0]), c + 1j * s * r[2]],
        ],
        dtype=complex,
    )


@dataclass(frozen=True)
class NoiseRealization:
    """Frozen dressing unitaries keyed by (qubit, pulse kind)."""

    gates: dict = field(default_factory=dict)

    def gate(self, qubit: int, kind: str) -> np.ndarray:
        return self.gates.get((qubit, kind), _IDENTITY2)


def freeze_realization(
    model: OneQubitNoiseModel | None,
    rng: np.random.Generator,
    qubits=(1, 2),
) -> NoiseRealization:
    """Draw one dressing per (qubit, kind), qubits then kinds in fixed order."""
    if model is None or model.delta_theta == 0.0:
        return NoiseRealization({})
    gates = {}
    for q in qubits:
        for kind in GATE_KINDS:
            gates[(q, kind)] = sample_perturbation(model.delta_theta, rng)
    return NoiseRealization(gates)


def kind_for_angle(angle: float) -> str | None:
    """Pulse kind of a physical X rotation, None when no dressed kind applies."""
    for kind, ref in (("x90", np.pi / 2), ("x90m", -np.pi / 2), ("x180", np.pi), ("x180m", -np.pi)):
        if abs(angle - ref) < 1e-12:
            return kind
    return None


def rb_fidelity_analytic(delta_theta: float) -> float:
    """Average fidelity of one-qubit Cliffords compiled with virtual Z.

    With 4 of the 24 Cliffords requiring no physical pulse and the rest exactly
    one dressed pulse, Gaussian averaging gives (13 + 5 exp(-dt^2/2)) / 18.
    """
    return (13.0 + 5.0 * np.exp(-(delta_theta**2) / 2.0)) / 18.0


def rb_fidelity_fixed(theta: float) -> float:
    """Fixed-angle variant of the virtual-Z Clifford fidelity: (13 + 5 cos t)/18."""
    return (13.0 + 5.0 * np.cos(theta)) / 18.0


def clifford_fidelity_fixed(theta: float) -> float:
    """Average fidelity of a single dressed pulse at fixed angle: (2 + cos t)/3."""
    return (2.0 + np.cos(theta)) / 3.0


def infidelity_for_delta_theta(delta_theta: float) -> float:
    """1 - rb_fidelity_analytic(delta_theta) = (5/18)(1 - exp(-dt^2/2))."""
    return (5.0 / 18.0) * (1.0 - np.exp(-(delta_theta**2) / 2.0))


def delta_theta_for_infidelity(r: float) -> float:
    """Invert the analytic one-qubit infidelity; defined for 0 <= r < 5/18."""
    if not 0.0 <= r < 5.0 / 18.0:
        raise ValueError("infidelity must lie in [0, 5/18)")
    return float(np.sqrt(-2.0 * np.log(1.0 - 18.0 * r / 5.0)))
