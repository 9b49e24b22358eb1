"""Exact two-qubit Pauli algebra: matrices, products, commutation, fidelities, invariants."""

from __future__ import annotations

import numpy as np

PAULI_LABELS = "IXYZ"

_SIGMA = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex),
    "Y": np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex),
    "Z": np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex),
}

TWO_QUBIT_PAULIS = tuple(a + b for a in PAULI_LABELS for b in PAULI_LABELS)

_PAULI_4 = {p: np.kron(_SIGMA[p[0]], _SIGMA[p[1]]) for p in TWO_QUBIT_PAULIS}
for _m in _PAULI_4.values():
    _m.flags.writeable = False

# Magic (Bell) basis change used for the local-invariant computation.
_MAGIC = np.array(
    [
        [1.0, 0.0, 0.0, 1.0j],
        [0.0, 1.0j, 1.0, 0.0],
        [0.0, 1.0j, -1.0, 0.0],
        [1.0, 0.0, 0.0, -1.0j],
    ],
    dtype=complex,
) / np.sqrt(2.0)
_MAGIC.flags.writeable = False


def _check_label(label):
    if not (isinstance(label, str) and len(label) == 2 and all(c in PAULI_LABELS for c in label)):
        raise ValueError(f"not a two-qubit Pauli label: {label!r}")


def single_qubit_pauli(axis: str) -> np.ndarray:
    """2x2 Pauli matrix for axis in 'IXYZ'."""
    if axis not in PAULI_LABELS:
        raise ValueError(f"not a Pauli axis: {axis!r}")
    return _SIGMA[axis].copy()


def pauli_matrix(label: str) -> np.ndarray:
    """4x4 matrix of the two-qubit Pauli with the given label, e.g. 'ZX'."""
    _check_label(label)
    return _PAULI_4[label]


def commutes(p: str, q: str) -> bool:
    """True when the two two-qubit Paulis commute.

    Two Pauli strings commute iff an even number of their single-qubit
    factor pairs anticommute.
    """
    _check_label(p)
    _check_label(q)
    n_anti = sum(1 for a, b in zip(p, q) if a != "I" and b != "I" and a != b)
    return n_anti % 2 == 0


def sign_coefficient(p: str, q: str) -> int:
    """+1 when the Paulis commute, -1 when they anticommute."""
    return 1 if commutes(p, q) else -1


def _build_product_table():
    table = {}
    for p in TWO_QUBIT_PAULIS:
        for q in TWO_QUBIT_PAULIS:
            m = _PAULI_4[p] @ _PAULI_4[q]
            for r in TWO_QUBIT_PAULIS:
                c = np.trace(_PAULI_4[r].conj().T @ m) / 4.0
                if abs(c) > 0.5:
                    # phases close under multiplication: always one of +-1, +-i
                    phase = complex(round(c.real), round(c.imag))
                    table[p, q] = (phase, r)
                    break
    return table

_PRODUCT = _build_product_table()


def pauli_product(p: str, q: str):
    """Product sigma_p sigma_q as (phase, label); phase is one of +-1, +-i."""
    _check_label(p)
    _check_label(q)
    return _PRODUCT[p, q]


def pauli_decompose(m: np.ndarray) -> dict:
    """Coefficients c_p with m = sum_p c_p sigma_p, via c_p = tr(sigma_p m) / 4."""
    m = np.asarray(m, dtype=complex)
    if m.shape != (4, 4):
        raise ValueError("expected a 4x4 matrix")
    return {p: complex(np.trace(_PAULI_4[p] @ m)) / 4.0 for p in TWO_QUBIT_PAULIS}


def pauli_rotation(label: str, angle: float) -> np.ndarray:
    """exp(-i angle/2 sigma_label) for a two-qubit Pauli axis."""
    _check_label(label)
    return np.cos(angle / 2.0) * np.eye(4, dtype=complex) - 1.0j * np.sin(angle / 2.0) * _PAULI_4[label]


def rot_x(angle: float) -> np.ndarray:
    """Single-qubit exp(-i angle/2 X)."""
    c, s = np.cos(angle / 2.0), np.sin(angle / 2.0)
    return np.array([[c, -1.0j * s], [-1.0j * s, c]], dtype=complex)


def rot_z(angle: float) -> np.ndarray:
    """Single-qubit exp(-i angle/2 Z)."""
    return np.array([[np.exp(-0.5j * angle), 0.0], [0.0, np.exp(0.5j * angle)]], dtype=complex)


def is_unitary(u: np.ndarray, tol: float = 1e-10) -> bool:
    u = np.asarray(u, dtype=complex)
    return bool(np.all(np.abs(u.conj().T @ u - np.eye(u.shape[0])) < tol))


def trace_fidelity(u: np.ndarray, v: np.ndarray) -> float:
    """|tr(u^dag v)|^2 / d^2, insensitive to global phase. Equals 1 iff u ~ v."""
    u = np.asarray(u, dtype=complex)
    v = np.asarray(v, dtype=complex)
    d = u.shape[0]
    return float(abs(np.trace(u.conj().T @ v)) ** 2) / d**2


def phase_aligned(u: np.ndarray, v: np.ndarray) -> np.ndarray:
    """v rescaled by a unit phase so it best matches u (for equality up to global phase)."""
    tr = np.trace(np.asarray(u).conj().T @ np.asarray(v))
    if abs(tr) < 1e-12:
        return np.asarray(v, dtype=complex)
    return np.asarray(v, dtype=complex) * (abs(tr) / tr)


def deviation(u: np.ndarray, v: np.ndarray) -> float:
    """Max-abs entrywise difference between u and v after global-phase alignment."""
    return float(np.max(np.abs(np.asarray(u) - phase_aligned(u, v))))


def local_invariants(u: np.ndarray):
    """Local invariants (g1, g2) of a two-qubit unitary; g1 is complex, g2 real.

    Computed in the magic basis: m = (Q^dag u Q)^T (Q^dag u Q),
    g1 = tr(m)^2 / (16 det u), g2 = (tr(m)^2 - tr(m m)) / (4 det u).
    Identity maps to (1, 3); any CNOT-equivalent gate maps to (0, 1).
    """
    u = np.asarray(u, dtype=complex)
    if u.shape != (4, 4):
        raise ValueError("expected a 4x4 unitary")
    um = _MAGIC.conj().T @ u @ _MAGIC
    m = um.T @ um
    det = np.linalg.det(u)
    tr2 = np.trace(m) ** 2
    g1 = complex(tr2 / (16.0 * det))
    g2 = complex((tr2 - np.trace(m @ m)) / (4.0 * det))
    return g1, float(g2.real)
