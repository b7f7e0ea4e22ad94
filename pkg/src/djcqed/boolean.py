"""Boolean functions on n bits, their algebraic normal form, and phase oracles.

Input index ``i`` encodes ``(x1, ..., xn)`` with ``x1`` as the most
significant bit, so ``"00010111"`` is the 3-bit majority function.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Iterator

import numpy as np

MAX_BITS = 6


@dataclass(frozen=True)
class TruthTable:
    n: int
    values: tuple[int, ...]

    def __post_init__(self):
        if not 1 <= self.n <= MAX_BITS:
            raise ValueError(f"n must be in 1..{MAX_BITS}, got {self.n}")
        if len(self.values) != 1 << self.n:
            raise ValueError(f"expected {1 << self.n} values, got {len(self.values)}")
        if any(v not in (0, 1) for v in self.values):
            raise ValueError("truth-table values must be 0 or 1")

    @classmethod
    def from_string(cls, bits: str) -> "TruthTable":
        bits = bits.strip()
        size = len(bits)
        if size < 2 or size & (size - 1) or set(bits) - {"0", "1"}:
            raise ValueError(f"not a truth-table string: {bits!r}")
        return cls(size.bit_length() - 1, tuple(int(b) for b in bits))

    @classmethod
    def from_int(cls, n: int, code: int) -> "TruthTable":
        """Inverse of :attr:`code`: the first entry is the most significant bit."""
        size = 1 << n
        return cls(n, tuple((code >> (size - 1 - i)) & 1 for i in range(size)))

    @classmethod
    def from_callable(cls, n: int, fn) -> "TruthTable":
        """Build from ``fn(x1, ..., xn) -> 0/1``."""
        return cls(n, tuple(int(fn(*input_bits(n, i))) & 1 for i in range(1 << n)))

    def __str__(self) -> str:
        return "".join(map(str, self.values))

    @property
    def code(self) -> int:
        return int(str(self), 2)

    @property
    def weight(self) -> int:
        return sum(self.values)

    def complement(self) -> "TruthTable":
        return TruthTable(self.n, tuple(1 - v for v in self.values))

    def __call__(self, *bits: int) -> int:
        index = 0
        for b in bits:
            index = (index << 1) | (b & 1)
        return self.values[index]


def input_bits(n: int, index: int) -> tuple[int, ...]:
    """``(x1, ..., xn)`` for basis index ``index``."""
    return tuple((index >> (n - 1 - k)) & 1 for k in range(n))


def all_functions(n: int) -> Iterator[TruthTable]:
    for code in range(1 << (1 << n)):
        yield TruthTable.from_int(n, code)


def is_balanced(f: TruthTable) -> bool:
    return f.weight == 1 << (f.n - 1)


def is_constant(f: TruthTable) -> bool:
    return f.weight in (0, 1 << f.n)


def canonical_balanced_set(n: int = 3) -> list[TruthTable]:
    """Balanced functions with ``f(0...0) == 0``, sorted by truth-table integer.

    Each complement pair ``{f, 1 ⊕ f}`` gives the same oracle up to a global
    sign; keeping the member that fixes ``|0...0⟩`` leaves no phase freedom.
    """
    size = 1 << n
    out = []
    # choose the positions of the ones among the inputs other than 0...0
    for ones in combinations(range(1, size), size // 2):
        values = [0] * size
        for i in ones:
            values[i] = 1
        out.append(TruthTable(n, tuple(values)))
    return sorted(out, key=lambda f: f.code)


# --- algebraic normal form -------------------------------------------------

@dataclass(frozen=True)
class AnfForm:
    """XOR of AND-monomials.

    ``coefficients[mask]`` is the coefficient of the monomial whose variables
    are the set bits of ``mask``; bit ``n-1-k`` of the mask stands for
    ``x_{k+1}``, the same convention as truth-table indices.
    """

    n: int
    coefficients: tuple[int, ...]

    @property
    def monomials(self) -> list[frozenset[int]]:
        """Monomials with nonzero coefficient, as sets of 1-based variable indices."""
        return [mask_variables(self.n, m) for m, c in enumerate(self.coefficients) if c]

    def monomials_of_degree(self, degree: int) -> list[frozenset[int]]:
        return [m for m in self.monomials if len(m) == degree]

    @property
    def degree(self) -> int:
        return max((len(m) for m in self.monomials), default=0)

    def to_truth_table(self) -> TruthTable:
        return TruthTable(self.n, tuple(_mobius(self.coefficients)))

    def __str__(self) -> str:
        terms = []
        for m in sorted(self.monomials, key=lambda s: (len(s), sorted(s))):
            terms.append("1" if not m else "".join(f"x{v}" for v in sorted(m)))
        return " ^ ".join(terms) if terms else "0"


def mask_variables(n: int, mask: int) -> frozenset[int]:
    return frozenset(k + 1 for k in range(n) if (mask >> (n - 1 - k)) & 1)


def variables_mask(n: int, variables) -> int:
    mask = 0
    for v in variables:
        mask |= 1 << (n - v)
    return mask


def _mobius(values) -> list[int]:
    # GF(2) Möbius transform; it is its own inverse
    a = list(values)
    step = 1
    while step < len(a):
        for i in range(len(a)):
            if i & step:
                a[i] ^= a[i ^ step]
        step <<= 1
    return a


def anf_of(f: TruthTable) -> AnfForm:
    return AnfForm(f.n, tuple(_mobius(f.values)))


# --- phase oracle ----------------------------------------------------------

@dataclass(frozen=True)
class OracleMatrix:
    """Diagonal ``|x⟩ -> (-1)^f(x) |x⟩`` with exact integer entries."""

    diagonal: tuple[int, ...]

    @property
    def dim(self) -> int:
        return len(self.diagonal)

    def to_array(self) -> np.ndarray:
        return np.diag(np.array(self.diagonal, dtype=complex))


def oracle_matrix(f: TruthTable) -> OracleMatrix:
    return OracleMatrix(tuple(1 - 2 * v for v in f.values))
