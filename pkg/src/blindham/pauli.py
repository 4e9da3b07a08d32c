"""Exact multi-qubit Pauli-string algebra and matrix conversion.

Conventions used throughout the package:

* Sites carry flat indices ``0 .. n_sites-1``; grid site ``(row, col)`` on an
  ``n x n`` lattice has flat index ``row * n + col``.
* In matrix representations site 0 is the most significant bit of the
  computational basis label, i.e. basis index ``b`` assigns to site ``j``
  the bit ``(b >> (n_sites - 1 - j)) & 1``.
* Phases of Pauli products are tracked exactly as elements of
  ``{1, i, -1, -i}`` multiplying the complex coefficient, so long products
  never accumulate rounding error in the phase.
"""

from __future__ import annotations

import math
import os
from typing import Iterable, Mapping, NamedTuple

import numpy as np
from scipy import sparse

__all__ = [
    "Site",
    "PauliTerm",
    "OperatorSum",
    "multiply",
    "commutes",
    "identity_term",
    "single_site_matrix",
    "dense_qubit_limit",
    "DimensionLimitError",
]

DENSE_DIM_ENV = "BLINDHAM_DENSE_DIM"

# merging two operator sums drops terms below this magnitude
COEFF_CUTOFF = 1e-14

_MATS = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex),
    "Y": np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex),
    "Z": np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex),
}

_PHASES = (1.0 + 0.0j, 1.0j, -1.0 + 0.0j, -1.0j)

# single-site products of distinct non-identity letters:
# (a, b) -> (letter, k) meaning a.b = i**k . letter
_PRODUCT = {
    ("X", "Y"): ("Z", 1),
    ("Y", "X"): ("Z", 3),
    ("Y", "Z"): ("X", 1),
    ("Z", "Y"): ("X", 3),
    ("Z", "X"): ("Y", 1),
    ("X", "Z"): ("Y", 3),
}


class DimensionLimitError(ValueError):
    """Requested dense representation exceeds the configured ceiling."""


def dense_qubit_limit(default: int = 14) -> int:
    """Maximum qubit count for dense matrices; override via BLINDHAM_DENSE_DIM."""
    env = os.environ.get(DENSE_DIM_ENV)
    if env is None:
        return default
    dim = int(env)
    if dim < 2:
        raise ValueError(f"{DENSE_DIM_ENV} must be at least 2, got {dim}")
    return max(1, dim.bit_length() - 1)


class Site(NamedTuple):
    """Grid coordinate of a lattice site."""

    row: int
    col: int

    def flat(self, n: int) -> int:
        return self.row * n + self.col

    @staticmethod
    def from_flat(index: int, n: int) -> "Site":
        return Site(index // n, index % n)


class PauliTerm:
    """A complex coefficient times a tensor product of X/Y/Z letters.

    Sites absent from ``letters`` act as the identity.  Instances are
    immutable; all algebra returns new terms.
    """

    __slots__ = ("letters", "coeff")

    def __init__(
        self,
        letters: Mapping[int, str] | Iterable[tuple[int, str]] = (),
        coeff: complex = 1.0,
    ):
        items = letters.items() if isinstance(letters, Mapping) else letters
        clean: dict[int, str] = {}
        for site, letter in items:
            if letter == "I":
                continue
            if letter not in ("X", "Y", "Z"):
                raise ValueError(f"unknown Pauli letter {letter!r} at site {site}")
            site = int(site)
            if site < 0:
                raise ValueError(f"negative site index {site}")
            if site in clean:
                raise ValueError(f"duplicate site {site} in letter map")
            clean[site] = letter
        object.__setattr__(self, "letters", dict(sorted(clean.items())))
        object.__setattr__(self, "coeff", complex(coeff))

    def __setattr__(self, name, value):
        raise AttributeError("PauliTerm is immutable")

    @property
    def weight(self) -> int:
        return len(self.letters)

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(self.letters)

    def key(self) -> tuple[tuple[int, str], ...]:
        """Canonical letter-map key used for merging terms."""
        return tuple(self.letters.items())

    def with_coeff(self, coeff: complex) -> "PauliTerm":
        return PauliTerm(self.letters, coeff)

    def adjoint(self) -> "PauliTerm":
        # Pauli strings are Hermitian, only the coefficient conjugates
        return PauliTerm(self.letters, self.coeff.conjugate())

    def __mul__(self, scalar: complex) -> "PauliTerm":
        return PauliTerm(self.letters, self.coeff * scalar)

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        if not isinstance(other, PauliTerm):
            return NotImplemented
        return self.letters == other.letters and self.coeff == other.coeff

    def __hash__(self):
        return hash((self.key(), self.coeff))

    def string(self) -> str:
        """Letter part as e.g. ``"X(3) Z(17)"``; identity is ``"I"``."""
        if not self.letters:
            return "I"
        return " ".join(f"{l}({s})" for s, l in self.letters.items())

    def __repr__(self):
        return f"PauliTerm({self.string()!r}, coeff={self.coeff!r})"


def identity_term(coeff: complex = 1.0) -> PauliTerm:
    return PauliTerm((), coeff)


def multiply(a: PauliTerm, b: PauliTerm) -> PauliTerm:
    """Product ``a . b`` with the exact accumulated phase."""
    letters = dict(a.letters)
    k = 0
    for site, lb in b.letters.items():
        la = letters.pop(site, None)
        if la is None:
            letters[site] = lb
        elif la != lb:
            lc, dk = _PRODUCT[(la, lb)]
            letters[site] = lc
            k += dk
        # la == lb squares to the identity, site stays removed
    return PauliTerm(letters, a.coeff * b.coeff * _PHASES[k % 4])


def commutes(a: PauliTerm, b: PauliTerm) -> bool:
    """True iff the letter parts commute (conflicting sites come in pairs)."""
    small, large = (a.letters, b.letters) if len(a.letters) <= len(b.letters) else (b.letters, a.letters)
    conflicts = 0
    for site, letter in small.items():
        other = large.get(site)
        if other is not None and other != letter:
            conflicts += 1
    return conflicts % 2 == 0


def single_site_matrix(letter: str) -> np.ndarray:
    return _MATS[letter].copy()


def _term_action(term: PauliTerm, n_sites: int):
    """Column action of a term: ``cols -> (rows, values)`` over the full basis.

    The term maps ``|b>`` to ``value(b) |b ^ xmask>``; X and Y letters flip
    the site bit, Z and Y letters contribute ``(-1)**bit``, and each Y adds
    a factor ``i``.
    """
    dim = 1 << n_sites
    xmask = 0
    zymask = 0
    n_y = 0
    for site, letter in term.letters.items():
        bit = 1 << (n_sites - 1 - site)
        if letter in ("X", "Y"):
            xmask |= bit
        if letter in ("Z", "Y"):
            zymask |= bit
        if letter == "Y":
            n_y += 1
    cols = np.arange(dim, dtype=np.uint64)
    rows = (cols ^ np.uint64(xmask)).astype(np.int64)
    par = (np.bitwise_count(cols & np.uint64(zymask)) & 1).astype(np.int64)
    vals = term.coeff * _PHASES[n_y % 4] * (1.0 - 2.0 * par)
    return rows, cols.astype(np.int64), vals


class OperatorSum:
    """Weighted sum of Pauli terms on ``n_sites`` qubits.

    Construction canonicalizes: duplicate letter maps merge and coefficients
    below ``COEFF_CUTOFF`` are dropped.
    """

    __slots__ = ("terms", "n_sites", "_sparse")

    def __init__(self, terms: Iterable[PauliTerm], n_sites: int):
        n_sites = int(n_sites)
        if n_sites < 1:
            raise ValueError("n_sites must be positive")
        merged: dict[tuple, complex] = {}
        for term in terms:
            if term.letters and max(term.letters) >= n_sites:
                raise ValueError(
                    f"term {term.string()} acts outside {n_sites} sites"
                )
            merged[term.key()] = merged.get(term.key(), 0.0) + term.coeff
        canon = [
            PauliTerm(dict(key), coeff)
            for key, coeff in sorted(merged.items())
            if abs(coeff) >= COEFF_CUTOFF
        ]
        object.__setattr__(self, "terms", tuple(canon))
        object.__setattr__(self, "n_sites", n_sites)
        object.__setattr__(self, "_sparse", None)

    def __setattr__(self, name, value):
        raise AttributeError("OperatorSum is immutable")

    @classmethod
    def identity(cls, n_sites: int, coeff: complex = 1.0) -> "OperatorSum":
        return cls([identity_term(coeff)], n_sites)

    @property
    def n_terms(self) -> int:
        return len(self.terms)

    @property
    def dim(self) -> int:
        return 1 << self.n_sites

    def coefficient_norm(self) -> float:
        """Sum of absolute coefficients, an upper bound on the operator norm."""
        return float(sum(abs(t.coeff) for t in self.terms))

    def is_hermitian(self, tol: float = 1e-12) -> bool:
        # Pauli strings are Hermitian, so Hermiticity means real coefficients
        return all(abs(t.coeff.imag) <= tol for t in self.terms)

    def adjoint(self) -> "OperatorSum":
        return OperatorSum([t.adjoint() for t in self.terms], self.n_sites)

    def __add__(self, other: "OperatorSum") -> "OperatorSum":
        if self.n_sites != other.n_sites:
            raise ValueError("site-count mismatch")
        return OperatorSum(self.terms + other.terms, self.n_sites)

    def __sub__(self, other: "OperatorSum") -> "OperatorSum":
        return self + (-1.0) * other

    def __mul__(self, scalar: complex) -> "OperatorSum":
        return OperatorSum([t * scalar for t in self.terms], self.n_sites)

    __rmul__ = __mul__

    def __neg__(self) -> "OperatorSum":
        return self * -1.0

    def to_matrix(self, qubit_limit: int | None = None) -> np.ndarray:
        """Dense matrix, ``sum(coeff * kron(...))`` with site 0 most significant."""
        limit = dense_qubit_limit() if qubit_limit is None else qubit_limit
        if self.n_sites > limit:
            raise DimensionLimitError(
                f"{self.n_sites} sites exceeds dense limit of {limit} qubits"
            )
        dim = self.dim
        out = np.zeros((dim, dim), dtype=complex)
        for term in self.terms:
            rows, cols, vals = _term_action(term, self.n_sites)
            out[rows, cols] += vals
        return out

    def to_sparse(self) -> sparse.csr_matrix:
        if self._sparse is None:
            dim = self.dim
            if not self.terms:
                mat = sparse.csr_matrix((dim, dim), dtype=complex)
            else:
                rows = []
                cols = []
                vals = []
                for term in self.terms:
                    r, c, v = _term_action(term, self.n_sites)
                    rows.append(r)
                    cols.append(c)
                    vals.append(v)
                mat = sparse.csr_matrix(
                    (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
                    shape=(dim, dim),
                )
            object.__setattr__(self, "_sparse", mat)
        return self._sparse

    def apply(self, vec: np.ndarray) -> np.ndarray:
        """Matrix-vector product without materializing the dense matrix."""
        return self.to_sparse() @ np.asarray(vec, dtype=complex)

    def expectation(self, u: np.ndarray, v: np.ndarray | None = None) -> complex:
        """``<u| self |v>`` (with ``v = u`` by default)."""
        v = u if v is None else v
        return complex(np.vdot(u, self.apply(v)))

    # -- serialization ------------------------------------------------------

    def to_json_obj(self, row_length: int | None = None) -> dict:
        """JSON-ready form; ``row_length`` sets the (row, col) site encoding.

        For grid models pass the lattice side; the default treats sites as a
        single row so the pairs are ``[0, flat_index]``.
        """
        width = self.n_sites if row_length is None else int(row_length)
        terms = []
        for term in self.terms:
            sites = [[s // width, s % width] for s in term.letters]
            letters = "".join(term.letters.values())
            terms.append(
                {
                    "sites": sites,
                    "letters": letters,
                    "coeff": [term.coeff.real, term.coeff.imag],
                }
            )
        return {"n_sites": self.n_sites, "row_length": width, "terms": terms}

    @classmethod
    def from_json_obj(cls, obj: dict) -> "OperatorSum":
        width = int(obj["row_length"])
        terms = []
        for entry in obj["terms"]:
            letters = {}
            for (row, col), letter in zip(entry["sites"], entry["letters"]):
                letters[row * width + col] = letter
            re, im = entry["coeff"]
            terms.append(PauliTerm(letters, complex(re, im)))
        return cls(terms, int(obj["n_sites"]))

    def __repr__(self):
        if not self.terms:
            return f"OperatorSum(0, n_sites={self.n_sites})"
        parts = " + ".join(f"({t.coeff:g})*{t.string()}" for t in self.terms[:4])
        more = f" + ... [{self.n_terms} terms]" if self.n_terms > 4 else ""
        return f"OperatorSum({parts}{more}, n_sites={self.n_sites})"


def basis_bit(index: int, site: int, n_sites: int) -> int:
    """Bit of lattice site ``site`` in computational basis label ``index``."""
    return (index >> (n_sites - 1 - site)) & 1


def math_is_power_of_two(d: int) -> bool:
    return d > 0 and (d & (d - 1)) == 0


def infer_n_sites(dim: int) -> int:
    """Number of qubits for a state-vector dimension (must be a power of two)."""
    if not math_is_power_of_two(dim):
        raise ValueError(f"dimension {dim} is not a power of two")
    return int(math.log2(dim))
