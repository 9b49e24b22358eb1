"""Clifford bookkeeping for randomized benchmarking.

Cliffords are identified, up to global phase, by the images of the Pauli
generators under conjugation (a stabilizer tableau packed into an int). The
two-qubit group is enumerated layer by layer over a Cayley graph whose cost-0
moves are one-qubit generators and whose cost-1 move is the entangling gate,
so every element carries a decomposition with the minimal number of
entangling gates.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np

from .pauli_core import pauli_matrix, rot_x, rot_z, single_qubit_pauli

_LABEL_BITS_1Q = {"I": 0b00, "X": 0b01, "Z": 0b10, "Y": 0b11}

_GEN_LABELS_2Q = ("XI", "ZI", "IX", "IZ")
_GEN_MATS_2Q = tuple(pauli_matrix(p) for p in _GEN_LABELS_2Q)
_GEN_MATS_1Q = (single_qubit_pauli("X"), single_qubit_pauli("Z"))

_LABELS_2Q = tuple(a + b for a in "IXYZ" for b in "IXYZ")
_STACK_2Q = np.array([pauli_matrix(p) for p in _LABELS_2Q])
_CODES_2Q = tuple(
    (_LABEL_BITS_1Q[p[0]] << 2) | _LABEL_BITS_1Q[p[1]] for p in _LABELS_2Q
)
_LABELS_1Q = "IXYZ"
_STACK_1Q = np.array([single_qubit_pauli(p) for p in _LABELS_1Q])


def _snap_code(m, stack, dim, tol):
    """Index and sign of the Pauli equal to m, or None if m is not +-Pauli."""
    coeffs = np.einsum("pij,ji->p", stack, m) / dim
    mags = np.abs(coeffs)
    k = int(np.argmax(mags))
    sign = 1 if coeffs[k].real > 0 else -1
    if abs(coeffs[k] - sign) > tol:
        return None
    mags[k] = 0.0
    if np.max(mags) > tol:
        return None
    return k, sign


def clifford_key_2q(u: np.ndarray, tol: float = 1e-8):
    """20-bit tableau key of a two-qubit Clifford; None when u is not Clifford."""
    udag = u.conj().T
    bits = 0
    for i, g in enumerate(_GEN_MATS_2Q):
        snapped = _snap_code(u @ g @ udag, _STACK_2Q, 4, tol)
        if snapped is None:
            return None
        k, sign = snapped
        bits |= (_CODES_2Q[k] | ((sign < 0) << 4)) << (5 * i)
    return bits


def clifford_key_1q(u: np.ndarray, tol: float = 1e-8):
    """6-bit tableau key of a one-qubit Clifford; None when u is not Clifford."""
    udag = u.conj().T
    bits = 0
    for i, g in enumerate(_GEN_MATS_1Q):
        snapped = _snap_code(u @ g @ udag, _STACK_1Q, 2, tol)
        if snapped is None:
            return None
        k, sign = snapped
        bits |= (_LABEL_BITS_1Q[_LABELS_1Q[k]] | ((sign < 0) << 2)) << (3 * i)
    return bits


@dataclass(frozen=True)
class OneQubitCliffordTable:
    """The 24 one-qubit Cliffords in virtual-Z form: Z(post) pulse Z(pre).

    Each element plays at most one physical X-type pulse; kind is None for the
    4 purely virtual elements, else 'x90' or 'x180'.
    """

    matrices: np.ndarray  # (24, 2, 2)
    kinds: tuple  # len 24, entries None | 'x90' | 'x180'
    pre_angles: tuple
    post_angles: tuple
    key_to_index: dict

    @property
    def order(self) -> int:
        return len(self.kinds)


def _build_one_qubit_table() -> OneQubitCliffordTable:
    cores = ((None, np.eye(2, dtype=complex)), ("x90", rot_x(np.pi / 2)), ("x180", rot_x(np.pi)))
    mats, kinds, pres, posts = [], [], [], []
    key_to_index = {}
    for kind, core in cores:
        for a in range(4):
            for b in range(4):
                pre, post = a * np.pi / 2.0, b * np.pi / 2.0
                u = rot_z(post) @ core @ rot_z(pre)
                key = clifford_key_1q(u)
                if key in key_to_index:
                    continue
                key_to_index[key] = len(mats)
                mats.append(u)
                kinds.append(kind)
                pres.append(pre)
                posts.append(post)
    if len(mats) != 24:
        raise RuntimeError(f"one-qubit Clifford table has {len(mats)} elements")
    return OneQubitCliffordTable(
        np.array(mats), tuple(kinds), tuple(pres), tuple(posts), key_to_index
    )


_TABLE_1Q = None


def one_qubit_clifford_table() -> OneQubitCliffordTable:
    global _TABLE_1Q
    if _TABLE_1Q is None:
        _TABLE_1Q = _build_one_qubit_table()
    return _TABLE_1Q


@dataclass(frozen=True)
class TwoQubitCliffordTable:
    """All 11520 two-qubit Cliffords with minimal-entangler decompositions.

    layer_pairs[i, j] holds the one-qubit table indices of the local layer
    before the j-th entangler application (padded with the identity pair);
    ent_counts[i] is the number of entangler applications (0..3).
    """

    matrices: np.ndarray  # (11520, 4, 4)
    layer_pairs: np.ndarray  # (11520, 4, 2) int16
    ent_counts: np.ndarray  # (11520,) int8
    key_to_index: dict
    entangler: np.ndarray  # (4, 4)

    @property
    def order(self) -> int:
        return self.matrices.shape[0]

    def index_of(self, u: np.ndarray) -> int:
        key = clifford_key_2q(u)
        if key is None or key not in self.key_to_index:
            raise KeyError("matrix is not an element of the tabulated group")
        return self.key_to_index[key]

    def class_sizes(self) -> tuple:
        return tuple(int(np.sum(self.ent_counts == k)) for k in range(4))


_LOCAL_GENS_2Q = (
    ("x90_1", np.kron(rot_x(np.pi / 2), np.eye(2, dtype=complex))),
    ("z90_1", np.kron(rot_z(np.pi / 2), np.eye(2, dtype=complex))),
    ("x90_2", np.kron(np.eye(2, dtype=complex), rot_x(np.pi / 2))),
    ("z90_2", np.kron(np.eye(2, dtype=complex), rot_z(np.pi / 2))),
)


def _enumerate_group(entangler: np.ndarray):
    """Layered closure: local moves are free, entangler applications add a layer."""
    nodes = [np.eye(4, dtype=complex)]
    parents = [-1]
    tokens = [None]
    ent_counts = [0]
    key_to_index = {clifford_key_2q(nodes[0]): 0}

    def close_under_locals(seed_indices):
        queue = deque(seed_indices)
        while queue:
            i = queue.popleft()
            for t, (_, g) in enumerate(_LOCAL_GENS_2Q):
                m = g @ nodes[i]
                key = clifford_key_2q(m)
                if key not in key_to_index:
                    key_to_index[key] = len(nodes)
                    nodes.append(m)
                    parents.append(i)
                    tokens.append(("local", t))
                    ent_counts.append(ent_counts[i])
                    queue.append(len(nodes) - 1)

    close_under_locals([0])
    layer_start = 0
    while True:
        layer_end = len(nodes)
        seeds = []
        for i in range(layer_start, layer_end):
            m = entangler @ nodes[i]
            key = clifford_key_2q(m)
            if key not in key_to_index:
                key_to_index[key] = len(nodes)
                nodes.append(m)
                parents.append(i)
                tokens.append(("ent",))
                ent_counts.append(ent_counts[i] + 1)
                seeds.append(len(nodes) - 1)
        if not seeds:
            break
        close_under_locals(seeds)
        layer_start = layer_end
    return nodes, parents, tokens, ent_counts, key_to_index


def _compress_path(idx, parents, tokens, table1q):
    """Fold a generator path into local layers separated by entangler slots."""
    path = []
    i = idx
    while parents[i] >= 0:
        path.append(tokens[i])
        i = parents[i]
    path.reverse()

    gens_1q = {"x90": rot_x(np.pi / 2), "z90": rot_z(np.pi / 2)}
    c1 = np.eye(2, dtype=complex)
    c2 = np.eye(2, dtype=complex)
    layers = []
    for tok in path:
        if tok[0] == "ent":
            layers.append((table1q.key_to_index[clifford_key_1q(c1)],
                           table1q.key_to_index[clifford_key_1q(c2)]))
            c1 = np.eye(2, dtype=complex)
            c2 = np.eye(2, dtype=complex)
        else:
            name, _ = _LOCAL_GENS_2Q[tok[1]]
            gate, qubit = name.split("_")
            if qubit == "1":
                c1 = gens_1q[gate] @ c1
            else:
                c2 = gens_1q[gate] @ c2
    layers.append((table1q.key_to_index[clifford_key_1q(c1)],
                   table1q.key_to_index[clifford_key_1q(c2)]))
    return layers


def build_two_qubit_table(entangler: np.ndarray) -> TwoQubitCliffordTable:
    """Enumerate the full group reachable from one-qubit gates and the entangler."""
    if clifford_key_2q(entangler) is None:
        raise ValueError("entangler must be an exact Clifford")
    table1q = one_qubit_clifford_table()
    nodes, parents, tokens, ent_counts, key_to_index = _enumerate_group(entangler)
    n = len(nodes)
    if n != 11520:
        raise RuntimeError(f"two-qubit Clifford enumeration found {n} elements")
    layer_pairs = np.zeros((n, 4, 2), dtype=np.int16)
    counts = np.asarray(ent_counts, dtype=np.int8)
    for i in range(n):
        layers = _compress_path(i, parents, tokens, table1q)
        if len(layers) != counts[i] + 1:
            raise RuntimeError("layer count mismatch during compression")
        for j, pair in enumerate(layers):
            layer_pairs[i, j] = pair
    return TwoQubitCliffordTable(
        matrices=np.array(nodes),
        layer_pairs=layer_pairs,
        ent_counts=counts,
        key_to_index=key_to_index,
        entangler=np.asarray(entangler, dtype=complex),
    )


_TABLE_CACHE_2Q = {}


def two_qubit_table_cached(entangler: np.ndarray) -> TwoQubitCliffordTable:
    """Build (once per process) the group table for this entangler."""
    key = clifford_key_2q(entangler)
    if key is None:
        raise ValueError("entangler must be an exact Clifford")
    if key not in _TABLE_CACHE_2Q:
        _TABLE_CACHE_2Q[key] = build_two_qubit_table(entangler)
    return _TABLE_CACHE_2Q[key]
