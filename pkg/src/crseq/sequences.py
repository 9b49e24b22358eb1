"""Dynamically corrected entangling sequences built from echoed CR blocks.

Sequences are time-ordered element lists. Echo elements apply the bare Pauli
product of their factors; only X- and Y-type factors cost a physical pulse
(Y is an X pulse in a rotated frame), Z factors and frame rotations are
virtual. A first-order robustness pattern summarizes how a static error
channel accumulates across the blocks of a sequence.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .cr_model import CRParams, H_ZX_DEFAULT, building_block
from .noise import NoiseRealization, kind_for_angle
from .pauli_core import (
    PAULI_LABELS,
    TWO_QUBIT_PAULIS,
    commutes,
    pauli_matrix,
    pauli_product,
    pauli_rotation,
    rot_x,
    rot_z,
    sign_coefficient,
)

ENTANGLER = "ZX"

# Angle of each block of the five-block sequence; the unique solution in
# (0, pi/2) of the first-order cancellation condition for all channels
# anticommuting with the entangler.
THETA0 = float(np.arccos((np.sqrt(13.0) - 1.0) / 4.0))

# Frame rotation angles turning two five-block sequences into a Clifford.
PSI = float(
    2.0
    * np.arctan(
        np.sqrt(-57.0 + 16.0 * np.sqrt(13.0))
        / (4.0 - np.sqrt(13.0) + 2.0 * np.sqrt(-7.0 + 2.0 * np.sqrt(13.0)))
    )
)
PHI = float(-2.0 * np.arccos(-1.0 / (2.0 * np.sqrt(-14.0 + 4.0 * np.sqrt(13.0)))))


@dataclass(frozen=True)
class Entangling:
    """One CR block accumulating ZX angle theta; drive_sign -1 reverses the drive."""

    theta: float
    drive_sign: int = 1


@dataclass(frozen=True)
class Echo:
    """Instantaneous two-qubit Pauli frame flip, applied as the bare Pauli matrix."""

    pauli: str

    def factors(self):
        """Non-identity single-qubit factors as (qubit, axis) pairs."""
        return tuple((q, ax) for q, ax in zip((1, 2), self.pauli) if ax != "I")

    def physical_factors(self):
        return tuple((q, ax) for q, ax in self.factors() if ax in "XY")


@dataclass(frozen=True)
class LocalX:
    """Physical one-qubit X rotation."""

    qubit: int
    angle: float


@dataclass(frozen=True)
class VirtualZ:
    """Frame Z rotation, exact and instantaneous."""

    qubit: int
    angle: float


@dataclass(frozen=True, eq=False)
class CompositeSequence:
    elements: tuple
    ideal_target: np.ndarray
    name: str = ""

    @property
    def n_blocks(self) -> int:
        return sum(1 for el in self.elements if isinstance(el, Entangling))

    @property
    def total_entangling_time(self) -> float:
        """Seconds spent entangling at the default coupling rate."""
        return self.entangling_time(H_ZX_DEFAULT)

    def entangling_time(self, h_zx: float) -> float:
        return sum(el.theta / abs(h_zx) for el in self.elements if isinstance(el, Entangling))

    @property
    def physical_1q_count(self) -> int:
        n = 0
        for el in self.elements:
            if isinstance(el, Echo):
                n += len(el.physical_factors())
            elif isinstance(el, LocalX):
                n += 1
        return n


def _embed(qubit: int, m: np.ndarray) -> np.ndarray:
    if qubit == 1:
        return np.kron(m, np.eye(2, dtype=complex))
    if qubit == 2:
        return np.kron(np.eye(2, dtype=complex), m)
    raise ValueError("qubit must be 1 or 2")


def element_unitary(el, params: CRParams, noise: NoiseRealization | None = None) -> np.ndarray:
    """4x4 unitary of one element, optionally dressed by frozen pulse noise."""
    if isinstance(el, Entangling):
        return building_block(el.theta, params, el.drive_sign)
    if isinstance(el, Echo):
        u = np.eye(4, dtype=complex)
        for qubit, axis in el.factors():
            if axis == "Z" or noise is None:
                m = np.array(
                    {"X": [[0, 1], [1, 0]], "Y": [[0, -1j], [1j, 0]], "Z": [[1, 0], [0, -1]]}[axis],
                    dtype=complex,
                )
            else:
                noisy_x = noise.gate(qubit, "x180") @ np.array([[0, 1], [1, 0]], dtype=complex)
                if axis == "X":
                    m = noisy_x
                else:
                    m = rot_z(np.pi / 2.0) @ noisy_x @ rot_z(-np.pi / 2.0)
            u = _embed(qubit, m) @ u
        return u
    if isinstance(el, LocalX):
        m = rot_x(el.angle)
        if noise is not None:
            kind = kind_for_angle(el.angle)
            if kind is not None:
                m = noise.gate(el.qubit, kind) @ m
        return _embed(el.qubit, m)
    if isinstance(el, VirtualZ):
        return _embed(el.qubit, rot_z(el.angle))
    raise TypeError(f"unknown sequence element: {el!r}")


def compile_sequence(
    seq: CompositeSequence, params: CRParams, noise: NoiseRealization | None = None
) -> np.ndarray:
    """Time-ordered product of element unitaries (later elements multiply on the left)."""
    u = np.eye(4, dtype=complex)
    for el in seq.elements:
        u = element_unitary(el, params, noise) @ u
    return u


def _check_echo_label(pauli: str, require_commuting: bool = True):
    if pauli not in TWO_QUBIT_PAULIS or pauli == "II":
        raise ValueError(f"echo must be a non-identity two-qubit Pauli, got {pauli!r}")
    if require_commuting and not commutes(pauli, ENTANGLER):
        raise ValueError(f"echo {pauli} anticommutes with {ENTANGLER}; the target would be echoed away")


def entangling_block(theta: float = np.pi / 4.0) -> CompositeSequence:
    """A single uncorrected CR block."""
    return CompositeSequence(
        (Entangling(theta),), pauli_rotation(ENTANGLER, theta), name="block"
    )


def length2(echo: str = "XZ", theta: float = np.pi / 4.0) -> CompositeSequence:
    """Two blocks with an interleaved commuting echo; cancels anticommuting channels."""
    _check_echo_label(echo)
    elements = (Entangling(theta), Echo(echo), Entangling(theta), Echo(echo))
    return CompositeSequence(elements, pauli_rotation(ENTANGLER, 2.0 * theta), name="length2")


def ecr() -> CompositeSequence:
    """Echoed CR: two quarter blocks with reversed drive and X echoes on the control."""
    elements = (
        Entangling(np.pi / 4.0, 1),
        Echo("XI"),
        Entangling(np.pi / 4.0, -1),
        Echo("XI"),
    )
    return CompositeSequence(elements, pauli_rotation(ENTANGLER, np.pi / 2.0), name="ecr")


def length4(theta: float = np.pi / 8.0) -> CompositeSequence:
    """Four blocks with alternating ZI and XY echoes; also cancels commuting ZI, IX.

    The second echo is the Pauli part of the product of a YY flip with the ZI
    echo; it commutes with the entangler, so the ideal target is the plain
    accumulated rotation.
    """
    elements = (
        Entangling(theta),
        Echo("ZI"),
        Entangling(theta),
        Echo("XY"),
        Entangling(theta),
        Echo("ZI"),
        Entangling(theta),
        Echo("XY"),
    )
    return CompositeSequence(elements, pauli_rotation(ENTANGLER, 4.0 * theta), name="length4")


def length5() -> CompositeSequence:
    """Five blocks at theta0 with two entangler-valued echoes around the middle block.

    First-order contributions of every channel anticommuting with the
    entangler cancel exactly at theta0.
    """
    b = Entangling(THETA0)
    elements = (b, b, Echo(ENTANGLER), b, Echo(ENTANGLER), b, b)
    return CompositeSequence(elements, pauli_rotation(ENTANGLER, 5.0 * THETA0), name="length5")


def _axis_rotation_elements(axis: str, angle: float):
    """Elements realizing exp(-i angle/2 sigma_axis) for a single-qubit axis."""
    factors = [(q, ax) for q, ax in zip((1, 2), axis) if ax != "I"]
    if len(factors) != 1:
        raise ValueError(f"axis must act on exactly one qubit, got {axis!r}")
    qubit, ax = factors[0]
    if ax == "Z":
        return (VirtualZ(qubit, angle),)
    if ax == "X":
        return (LocalX(qubit, angle),)
    return (VirtualZ(qubit, -np.pi / 2.0), LocalX(qubit, angle), VirtualZ(qubit, np.pi / 2.0))


def clifford_generator(axis: str = "IZ") -> CompositeSequence:
    """Two five-block sequences glued by frame rotations into an exact Clifford.

    The rotation axis must be single-qubit and anticommute with the entangler;
    for the default IZ axis all three rotations are virtual, so the sequence
    costs 4 physical one-qubit pulses (from the four echo X factors).
    """
    if axis not in TWO_QUBIT_PAULIS or commutes(axis, ENTANGLER):
        raise ValueError(f"axis must anticommute with {ENTANGLER}, got {axis!r}")
    inner = length5()
    rot_psi = _axis_rotation_elements(axis, PSI)
    rot_phi = _axis_rotation_elements(axis, PHI)
    elements = rot_psi + inner.elements + rot_phi + inner.elements + rot_psi
    r_psi = pauli_rotation(axis, PSI)
    r_phi = pauli_rotation(axis, PHI)
    ideal = r_psi @ inner.ideal_target @ r_phi @ inner.ideal_target @ r_psi
    return CompositeSequence(elements, ideal, name="clifford_generator")


def nest(outer_echo: str, inner: CompositeSequence) -> CompositeSequence:
    """Echo a full sequence inside a commuting outer echo, doubling its target."""
    _check_echo_label(outer_echo)
    elements = inner.elements + (Echo(outer_echo),) + inner.elements + (Echo(outer_echo),)
    ideal = inner.ideal_target @ inner.ideal_target
    return CompositeSequence(elements, ideal, name=f"nest({outer_echo},{inner.name})")


@dataclass(frozen=True)
class RobustnessPattern:
    """First-order accumulation data of one error channel across n blocks.

    zeta[m] is the frame sign of the channel before block m, xi[m] the frame
    sign of the entangler, chi the channel/entangler commutation sign, theta
    the per-block angle.
    """

    zeta: tuple
    xi: tuple
    chi: int
    theta: float

    def __post_init__(self):
        if len(self.zeta) != len(self.xi):
            raise ValueError("zeta and xi must have equal length")
        if self.chi not in (1, -1):
            raise ValueError("chi must be +1 or -1")
        if any(z not in (1, -1) for z in self.zeta) or any(x not in (1, -1) for x in self.xi):
            raise ValueError("zeta and xi entries must be +1 or -1")

    @property
    def n(self) -> int:
        return len(self.zeta)


def robustness_residual(pattern: RobustnessPattern) -> float:
    """Norm of the first-order sum; 0 means the channel cancels at this theta.

    On the eigenspaces of the channel the sum is the scalar
    s = sum_m zeta_m exp(i theta/2 (chi - 1) sum_{l<m} xi_l),
    identical in magnitude on both eigenspaces.
    """
    partial = np.concatenate([[0.0], np.cumsum(pattern.xi)[:-1]])
    phases = np.exp(0.5j * pattern.theta * (pattern.chi - 1) * partial)
    return float(abs(np.dot(pattern.zeta, phases)))


def sequence_pattern(seq: CompositeSequence, channel: str) -> RobustnessPattern:
    """Extract the robustness pattern of a static error channel from a sequence.

    Only echo-based sequences with forward drive are summarized this way;
    frame rotations and reversed drives fall outside this bookkeeping.
    """
    if channel not in TWO_QUBIT_PAULIS or channel == "II":
        raise ValueError(f"channel must be a non-identity Pauli, got {channel!r}")
    frame = "II"
    zeta, xi, thetas = [], [], []
    for el in seq.elements:
        if isinstance(el, Echo):
            _, frame = pauli_product(el.pauli, frame)
        elif isinstance(el, Entangling):
            if el.drive_sign != 1:
                raise ValueError("pattern extraction requires forward drive")
            zeta.append(sign_coefficient(frame, channel))
            xi.append(sign_coefficient(frame, ENTANGLER))
            thetas.append(el.theta)
        elif isinstance(el, (LocalX, VirtualZ)):
            raise ValueError("pattern extraction supports echo-only sequences")
    if not thetas or any(abs(t - thetas[0]) > 1e-12 for t in thetas):
        raise ValueError("sequence must have at least one block, all at the same angle")
    return RobustnessPattern(
        zeta=tuple(zeta), xi=tuple(xi), chi=sign_coefficient(channel, ENTANGLER), theta=thetas[0]
    )


def echo_search(error_set, entangler: str = ENTANGLER) -> list:
    """All Paulis commuting with the entangler and anticommuting with every error."""
    for e in error_set:
        if e not in TWO_QUBIT_PAULIS:
            raise ValueError(f"not a Pauli label: {e!r}")
    out = []
    for p in TWO_QUBIT_PAULIS:
        if p == "II" or not commutes(p, entangler):
            continue
        if all(not commutes(p, e) for e in error_set):
            out.append(p)
    return out


def su2_embedding(entangler: str = ENTANGLER) -> dict:
    """Two commuting su(2) triples adapted to a two-qubit entangling axis.

    Returns {'plus': {'x': .., 'y': .., 'z': ..}, 'minus': {...}} with
    [x, y] = 2i z cyclically inside each triple and everything in 'plus'
    commuting with everything in 'minus'.
    """
    a, b = entangler
    if a == "I" or b == "I":
        raise ValueError("entangler must act on both qubits")

    def mat(label):
        return pauli_matrix(label)

    triples = {}
    if a != b:
        m, n = a, b
        p = next(ax for ax in "XYZ" if ax not in (a, b))
        for sign, key in ((1.0, "plus"), (-1.0, "minus")):
            triples[key] = {
                "x": (mat(m + "I") + sign * mat("I" + n)) / 2.0,
                "y": (mat(n + p) - sign * mat(p + m)) / 2.0,
                "z": (mat(p + p) + sign * mat(n + m)) / 2.0,
            }
    else:
        m = a
        order = "XYZ"
        i = order.index(m)
        n, p = order[(i + 1) % 3], order[(i + 2) % 3]
        for sign, key in ((1.0, "plus"), (-1.0, "minus")):
            triples[key] = {
                "x": (mat(m + "I") + sign * mat("I" + m)) / 2.0,
                "y": (mat(n + p) + sign * mat(p + n)) / 2.0,
                "z": (mat(p + p) - sign * mat(n + n)) / 2.0,
            }
    return triples


def to_text(seq: CompositeSequence) -> str:
    """Plain-text element list, angles in units of pi."""
    lines = [f"# sequence {seq.name or 'custom'}"]
    for el in seq.elements:
        if isinstance(el, Entangling):
            lines.append(f"entangle theta_pi={el.theta / np.pi!r} drive={el.drive_sign:+d}")
        elif isinstance(el, Echo):
            lines.append(f"echo pauli={el.pauli}")
        elif isinstance(el, LocalX):
            lines.append(f"localx qubit={el.qubit} angle_pi={el.angle / np.pi!r}")
        elif isinstance(el, VirtualZ):
            lines.append(f"virtualz qubit={el.qubit} angle_pi={el.angle / np.pi!r}")
    return "\n".join(lines) + "\n"


def from_text(text: str, name: str = "custom") -> CompositeSequence:
    """Parse a to_text element list; the ideal target is the error-free compilation."""
    elements = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        kind, *pairs = line.split()
        kv = {}
        for pair in pairs:
            try:
                key, val = pair.split("=", 1)
            except ValueError:
                raise ValueError(f"line {lineno}: malformed token {pair!r}")
            kv[key] = val
        try:
            if kind == "entangle":
                elements.append(
                    Entangling(float(kv["theta_pi"]) * np.pi, int(kv.get("drive", "1")))
                )
            elif kind == "echo":
                elements.append(Echo(kv["pauli"]))
            elif kind == "localx":
                elements.append(LocalX(int(kv["qubit"]), float(kv["angle_pi"]) * np.pi))
            elif kind == "virtualz":
                elements.append(VirtualZ(int(kv["qubit"]), float(kv["angle_pi"]) * np.pi))
            else:
                raise KeyError(kind)
        except KeyError as exc:
            raise ValueError(f"line {lineno}: bad element {line!r}") from exc
    seq = CompositeSequence(tuple(elements), np.eye(4, dtype=complex), name=name)
    ideal = compile_sequence(seq, CRParams(h_zx=H_ZX_DEFAULT))
    return CompositeSequence(tuple(elements), ideal, name=name)
