"""Builders for the spin-lattice Hamiltonians and their distinguished operators.

Covers the two-dimensional compass model (whose doubly degenerate ground
space is the Bacon-Shor code), the toric code, row/column parity and logical
operators, two-site reduced Hamiltonians, and small test fixtures.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .pauli import OperatorSum, PauliTerm, single_site_matrix

__all__ = [
    "CompassParams",
    "ReducedHamiltonianVector",
    "build_compass",
    "build_column_parity",
    "build_row_parity",
    "build_logical_x",
    "build_logical_z",
    "build_all_sites_z",
    "build_toric",
    "toric_edge_index",
    "toric_star_sites",
    "toric_plaquette_sites",
    "build_reduced_hamiltonian",
    "reduced_from_operator",
    "two_body_decomposition",
    "build_repetition_code_states",
    "site_pairs",
    "site_operator_sum",
    "pair_operator_sum",
    "operator_from_blocks",
    "reduced_hamiltonian_to_json_obj",
    "reduced_hamiltonian_from_json_obj",
    "custom_model_to_json_obj",
    "custom_model_from_json_obj",
]


@dataclass(frozen=True)
class CompassParams:
    """Side length, couplings and boundary for the compass Hamiltonian."""

    n: int
    jx: float = 1.0
    jz: float = 1.0
    boundary: str = "cyclic"

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("lattice side must be at least 2")
        if self.jx <= 0 or self.jz <= 0:
            raise ValueError("couplings must be positive")
        if self.boundary not in ("cyclic", "open"):
            raise ValueError(f"unknown boundary {self.boundary!r}")
        if self.boundary == "cyclic" and self.n < 3:
            # n=2 cyclic would double-count every bond
            raise ValueError("cyclic boundary requires n >= 3; use open for n = 2")

    @property
    def n_sites(self) -> int:
        return self.n * self.n


def _flat(row: int, col: int, n: int) -> int:
    return row * n + col


def build_compass(params: CompassParams) -> OperatorSum:
    """Compass Hamiltonian: -sum(Jx XX on vertical bonds + Jz ZZ on horizontal).

    X bonds couple ``(j,k)-(j+1,k)`` down each column, Z bonds couple
    ``(j,k)-(j,k+1)`` along each row; cyclic boundaries wrap mod n.
    """
    n = params.n
    terms = []
    for j in range(n):
        for k in range(n):
            if params.boundary == "cyclic" or j + 1 < n:
                terms.append(
                    PauliTerm(
                        {_flat(j, k, n): "X", _flat((j + 1) % n, k, n): "X"},
                        -params.jx,
                    )
                )
            if params.boundary == "cyclic" or k + 1 < n:
                terms.append(
                    PauliTerm(
                        {_flat(j, k, n): "Z", _flat(j, (k + 1) % n, n): "Z"},
                        -params.jz,
                    )
                )
    return OperatorSum(terms, n * n)


def build_column_parity(k: int, n: int) -> PauliTerm:
    """Z-parity of column ``k``: the product of Z over rows 0..n-1."""
    if not 0 <= k < n:
        raise ValueError(f"column {k} out of range for side {n}")
    return PauliTerm({_flat(j, k, n): "Z" for j in range(n)})


def build_row_parity(j: int, n: int) -> PauliTerm:
    """X-parity of row ``j``: the product of X over columns 0..n-1."""
    if not 0 <= j < n:
        raise ValueError(f"row {j} out of range for side {n}")
    return PauliTerm({_flat(j, i, n): "X" for i in range(n)})


def build_logical_x(j: int, n: int) -> PauliTerm:
    """Row-j X product; swaps the even- and odd-parity ground states."""
    return build_row_parity(j, n)


def build_logical_z(k: int, n: int) -> PauliTerm:
    """Column-k Z product; flips the phase of the odd-parity ground state."""
    return build_column_parity(k, n)


def build_all_sites_z(n: int) -> PauliTerm:
    """Product of Z over the whole lattice, the product of all column parities."""
    return PauliTerm({s: "Z" for s in range(n * n)})


# -- toric code --------------------------------------------------------------


def toric_edge_index(kind: str, r: int, c: int, L: int) -> int:
    """Qubit index of a torus edge; horizontal edges first, row-major.

    ``kind`` is ``"h"`` for the edge east of vertex (r, c) and ``"v"`` for
    the edge south of it; coordinates wrap mod L.
    """
    r %= L
    c %= L
    if kind == "h":
        return r * L + c
    if kind == "v":
        return L * L + r * L + c
    raise ValueError(f"unknown edge kind {kind!r}")


def toric_star_sites(r: int, c: int, L: int) -> tuple[int, ...]:
    """The four edges meeting vertex (r, c)."""
    return (
        toric_edge_index("h", r, c, L),
        toric_edge_index("h", r, c - 1, L),
        toric_edge_index("v", r, c, L),
        toric_edge_index("v", r - 1, c, L),
    )


def toric_plaquette_sites(r: int, c: int, L: int) -> tuple[int, ...]:
    """The four edges bounding the face whose north-west vertex is (r, c)."""
    return (
        toric_edge_index("h", r, c, L),
        toric_edge_index("h", r + 1, c, L),
        toric_edge_index("v", r, c, L),
        toric_edge_index("v", r, c + 1, L),
    )


def build_toric(L: int) -> OperatorSum:
    """Toric-code Hamiltonian on an L x L torus with 2 L^2 edge qubits.

    ``-sum(star) - sum(plaquette)`` with weight-4 X stars on vertices and
    weight-4 Z plaquettes on faces.
    """
    if L < 2:
        raise ValueError("torus side must be at least 2")
    terms = []
    for r in range(L):
        for c in range(L):
            terms.append(PauliTerm({q: "X" for q in toric_star_sites(r, c, L)}, -1.0))
            terms.append(
                PauliTerm({q: "Z" for q in toric_plaquette_sites(r, c, L)}, -1.0)
            )
    return OperatorSum(terms, 2 * L * L)


# -- reduced Hamiltonians -----------------------------------------------------


def site_pairs(n_particles: int) -> tuple[tuple[int, int], ...]:
    """All pairs ``(j, k)`` with ``j < k`` in lexicographic order."""
    return tuple(combinations(range(n_particles), 2))


@dataclass(frozen=True)
class ReducedHamiltonianVector:
    """Two-site witness operators, one 4x4 Hermitian block per site pair.

    ``entries[p]`` acts on the pair ``pairs[p]`` with the smaller site as the
    more significant bit.  Satisfies ``sum_jk entries <-> H - e0`` when the
    blocks come from a two-body Hamiltonian with ground energy ``e0``.
    """

    pairs: tuple[tuple[int, int], ...]
    entries: np.ndarray  # shape (n_pairs, 4, 4)
    n_particles: int
    e0: float


def _check_hermitian(mat: np.ndarray, what: str, tol: float = 1e-12):
    if mat.shape[0] != mat.shape[1]:
        raise ValueError(f"{what} is not square: {mat.shape}")
    if np.max(np.abs(mat - mat.conj().T)) > tol * max(1.0, np.max(np.abs(mat))):
        raise ValueError(f"{what} is not Hermitian")


def build_reduced_hamiltonian(
    one_body: list[np.ndarray] | None,
    two_body: list[np.ndarray] | None,
    e0: float,
    n_particles: int,
) -> ReducedHamiltonianVector:
    """Assemble ``V_jk + (T_j + T_k)/(N-1) - e0/C(N,2)`` for every pair j < k.

    ``one_body`` lists 2x2 blocks per site (None means all zero), ``two_body``
    lists 4x4 blocks per lexicographic pair (None entries allowed).
    """
    if n_particles < 2:
        raise ValueError("need at least two particles")
    pairs = site_pairs(n_particles)
    n_pairs = len(pairs)

    t_blocks = [np.zeros((2, 2), dtype=complex) for _ in range(n_particles)]
    if one_body is not None:
        if len(one_body) != n_particles:
            raise ValueError(
                f"expected {n_particles} one-body blocks, got {len(one_body)}"
            )
        for j, block in enumerate(one_body):
            if block is None:
                continue
            mat = np.asarray(block, dtype=complex)
            if mat.shape != (2, 2):
                raise ValueError(f"one-body block {j} has shape {mat.shape}")
            _check_hermitian(mat, f"one-body block {j}")
            t_blocks[j] = mat

    v_blocks = [np.zeros((4, 4), dtype=complex) for _ in range(n_pairs)]
    if two_body is not None:
        if len(two_body) != n_pairs:
            raise ValueError(f"expected {n_pairs} two-body blocks, got {len(two_body)}")
        for p, block in enumerate(two_body):
            if block is None:
                continue
            mat = np.asarray(block, dtype=complex)
            if mat.shape != (4, 4):
                raise ValueError(f"two-body block {p} has shape {mat.shape}")
            _check_hermitian(mat, f"two-body block {p}")
            v_blocks[p] = mat

    eye2 = np.eye(2, dtype=complex)
    offset = e0 / math.comb(n_particles, 2)
    entries = np.empty((n_pairs, 4, 4), dtype=complex)
    for p, (j, k) in enumerate(pairs):
        entries[p] = (
            v_blocks[p]
            + (np.kron(t_blocks[j], eye2) + np.kron(eye2, t_blocks[k])) / (n_particles - 1)
            - offset * np.eye(4)
        )
    return ReducedHamiltonianVector(pairs, entries, n_particles, float(e0))


def two_body_decomposition(op: OperatorSum):
    """Split an operator with terms of weight <= 2 into (T_j, V_jk, constant).

    Returns per-site 2x2 blocks, per-pair 4x4 blocks in lexicographic pair
    order, and the identity coefficient.
    """
    n = op.n_sites
    pairs = site_pairs(n)
    pair_index = {pair: p for p, pair in enumerate(pairs)}
    t_blocks = [np.zeros((2, 2), dtype=complex) for _ in range(n)]
    v_blocks = [np.zeros((4, 4), dtype=complex) for _ in range(len(pairs))]
    const = 0.0 + 0.0j
    for term in op.terms:
        if term.weight == 0:
            const += term.coeff
        elif term.weight == 1:
            ((site, letter),) = term.letters.items()
            t_blocks[site] += term.coeff * single_site_matrix(letter)
        elif term.weight == 2:
            (sa, la), (sb, lb) = term.letters.items()
            v_blocks[pair_index[(sa, sb)]] += term.coeff * np.kron(
                single_site_matrix(la), single_site_matrix(lb)
            )
        else:
            raise ValueError(f"term {term.string()} has weight {term.weight} > 2")
    return t_blocks, v_blocks, const


def reduced_from_operator(op: OperatorSum, e0: float) -> ReducedHamiltonianVector:
    """Reduced witness blocks of a two-body Hamiltonian with ground energy e0."""
    t_blocks, v_blocks, const = two_body_decomposition(op)
    return build_reduced_hamiltonian(t_blocks, v_blocks, e0 - const.real, op.n_sites)


# -- fixtures -----------------------------------------------------------------


def build_repetition_code_states(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Codewords |0...0> and |1...1> of the n-qubit repetition code."""
    if n < 2:
        raise ValueError("repetition code needs at least 2 qubits")
    dim = 1 << n
    zero = np.zeros(dim, dtype=complex)
    one = np.zeros(dim, dtype=complex)
    zero[0] = 1.0
    one[dim - 1] = 1.0
    return zero, one


# -- serialization of custom one-/two-body models -----------------------------


def _matrix_to_json(mat: np.ndarray) -> list:
    return [[float(x.real), float(x.imag)] for x in np.asarray(mat, dtype=complex).ravel()]


def _matrix_from_json(data: list, dim: int) -> np.ndarray:
    flat = np.array([complex(re, im) for re, im in data], dtype=complex)
    if flat.size != dim * dim:
        raise ValueError(f"expected {dim * dim} entries, got {flat.size}")
    return flat.reshape(dim, dim)


def reduced_hamiltonian_to_json_obj(rh: ReducedHamiltonianVector) -> dict:
    return {
        "n_particles": rh.n_particles,
        "e0": rh.e0,
        "pairs": [list(p) for p in rh.pairs],
        "entries": [_matrix_to_json(m) for m in rh.entries],
    }


def reduced_hamiltonian_from_json_obj(obj: dict) -> ReducedHamiltonianVector:
    n = int(obj["n_particles"])
    pairs = site_pairs(n)
    if [list(p) for p in pairs] != obj["pairs"]:
        raise ValueError("pair list is not lexicographic over n_particles")
    entries = np.stack([_matrix_from_json(m, 4) for m in obj["entries"]])
    return ReducedHamiltonianVector(pairs, entries, n, float(obj["e0"]))


_LETTERS = ("I", "X", "Y", "Z")


def site_operator_sum(mat: np.ndarray, j: int, n_sites: int) -> OperatorSum:
    """Embed a 2x2 operator at site j as an operator sum on n_sites qubits."""
    mat = np.asarray(mat, dtype=complex)
    if mat.shape != (2, 2):
        raise ValueError(f"expected a 2x2 block, got {mat.shape}")
    terms = []
    for letter in _LETTERS:
        coeff = np.trace(single_site_matrix(letter).conj().T @ mat) / 2.0
        terms.append(PauliTerm({j: letter} if letter != "I" else {}, coeff))
    return OperatorSum(terms, n_sites)


def pair_operator_sum(mat: np.ndarray, j: int, k: int, n_sites: int) -> OperatorSum:
    """Embed a 4x4 operator on sites (j, k), j < k, j the more significant bit."""
    mat = np.asarray(mat, dtype=complex)
    if mat.shape != (4, 4):
        raise ValueError(f"expected a 4x4 block, got {mat.shape}")
    if not 0 <= j < k < n_sites:
        raise ValueError(f"bad site pair ({j}, {k}) for {n_sites} sites")
    terms = []
    for la in _LETTERS:
        for lb in _LETTERS:
            basis = np.kron(single_site_matrix(la), single_site_matrix(lb))
            coeff = np.trace(basis.conj().T @ mat) / 4.0
            letters = {}
            if la != "I":
                letters[j] = la
            if lb != "I":
                letters[k] = lb
            terms.append(PauliTerm(letters, coeff))
    return OperatorSum(terms, n_sites)


def operator_from_blocks(
    one_body: list[np.ndarray] | None,
    two_body: list[np.ndarray] | None,
    n_particles: int,
) -> OperatorSum:
    """Hamiltonian ``sum T_j + sum V_jk`` from per-site and per-pair blocks."""
    pairs = site_pairs(n_particles)
    op = OperatorSum([], n_particles)
    if one_body is not None:
        for j, block in enumerate(one_body):
            if block is not None:
                op = op + site_operator_sum(block, j, n_particles)
    if two_body is not None:
        if len(two_body) != len(pairs):
            raise ValueError(f"expected {len(pairs)} two-body blocks")
        for (j, k), block in zip(pairs, two_body):
            if block is not None:
                op = op + pair_operator_sum(block, j, k, n_particles)
    return op


def custom_model_to_json_obj(
    one_body: list[np.ndarray] | None,
    two_body: list[np.ndarray] | None,
    n_particles: int,
) -> dict:
    """Serialize a custom {T_j}, {V_jk} model description."""
    pairs = site_pairs(n_particles)
    ones = [None] * n_particles if one_body is None else one_body
    twos = [None] * len(pairs) if two_body is None else two_body
    return {
        "n_particles": n_particles,
        "one_body": [None if m is None else _matrix_to_json(m) for m in ones],
        "two_body": [None if m is None else _matrix_to_json(m) for m in twos],
    }


def custom_model_from_json_obj(obj: dict) -> OperatorSum:
    """Load a custom {T_j}, {V_jk} model into an operator sum."""
    n = int(obj["n_particles"])
    one_body = [
        None if m is None else _matrix_from_json(m, 2) for m in obj.get("one_body", [])
    ] or None
    two_body = [
        None if m is None else _matrix_from_json(m, 4) for m in obj.get("two_body", [])
    ] or None
    return operator_from_blocks(one_body, two_body, n)
