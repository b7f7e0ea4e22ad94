"""Synthesis of 3-qubit phase oracles from σz, CP and two-target CP gates.

Every gate in the set is diagonal with ±1 entries, so products and
comparisons are done on exact integer diagonals.  Gate lists are stored in
written order (leftmost applied last): two-target CP, then CP, then the σz's.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from itertools import combinations, product
from typing import Union

import numpy as np

from .boolean import (
    TruthTable,
    anf_of,
    canonical_balanced_set,
    input_bits,
    is_balanced,
    oracle_matrix,
)

N_QUBITS = 3
QUBITS = (1, 2, 3)


class SynthesisError(ValueError):
    pass


def _check_qubits(*qs: int) -> None:
    for q in qs:
        if q not in QUBITS:
            raise ValueError(f"qubit index {q} outside 1..{N_QUBITS}")
    if len(set(qs)) != len(qs):
        raise ValueError(f"qubit indices must be distinct: {qs}")


@dataclass(frozen=True)
class SigmaZ:
    qubit: int

    def __post_init__(self):
        _check_qubits(self.qubit)

    def __str__(self):
        return f"sz{self.qubit}"


@dataclass(frozen=True)
class Hadamard:
    qubit: int

    def __post_init__(self):
        _check_qubits(self.qubit)

    def __str__(self):
        return f"H{self.qubit}"


@dataclass(frozen=True)
class Cp:
    control: int
    target: int

    def __post_init__(self):
        _check_qubits(self.control, self.target)

    def __str__(self):
        return f"C{self.control}{self.target}"


@dataclass(frozen=True)
class TwoTargetCp:
    control: int
    target1: int
    target2: int

    def __post_init__(self):
        _check_qubits(self.control, self.target1, self.target2)

    def __str__(self):
        return f"T{self.control}{self.target1}{self.target2}"


@dataclass(frozen=True)
class Oracle:
    function: TruthTable

    def __str__(self):
        return f"U[{self.function}]"


GateOp = Union[SigmaZ, Hadamard, Cp, TwoTargetCp, Oracle]
DIAGONAL_GATES = (SigmaZ, Cp, TwoTargetCp, Oracle)


def gate_diagonal(g: GateOp) -> tuple[int, ...]:
    """Exact ±1 diagonal of a diagonal gate over basis indices 000..111."""
    if isinstance(g, Oracle):
        return oracle_matrix(g.function).diagonal
    out = []
    for i in range(1 << N_QUBITS):
        x = (None,) + input_bits(N_QUBITS, i)  # 1-based lookup
        if isinstance(g, SigmaZ):
            e = x[g.qubit]
        elif isinstance(g, Cp):
            e = x[g.control] * x[g.target]
        elif isinstance(g, TwoTargetCp):
            e = x[g.control] * x[g.target1] + x[g.control] * x[g.target2]
        else:
            raise TypeError(f"{g} is not diagonal")
        out.append(-1 if e % 2 else 1)
    return tuple(out)


_H = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)


def gate_matrix(g: GateOp) -> np.ndarray:
    """8×8 unitary of a gate on the three-qubit register."""
    if isinstance(g, Hadamard):
        factors = [np.eye(2, dtype=complex)] * N_QUBITS
        factors[g.qubit - 1] = _H
        return np.kron(np.kron(factors[0], factors[1]), factors[2])
    return np.diag(np.array(gate_diagonal(g), dtype=complex))


def hadamard_all() -> np.ndarray:
    return np.kron(np.kron(_H, _H), _H)


def diagonal_product(gates) -> tuple[int, ...]:
    acc = [1] * (1 << N_QUBITS)
    for g in gates:
        acc = [a * b for a, b in zip(acc, gate_diagonal(g))]
    return tuple(acc)


def circuit_matrix(gates) -> np.ndarray:
    """Matrix of a written-order gate list (rightmost gate acts first)."""
    u = np.eye(1 << N_QUBITS, dtype=complex)
    for g in gates:
        u = u @ gate_matrix(g)
    return u


@dataclass(frozen=True)
class Decomposition:
    target: TruthTable
    gates: tuple[GateOp, ...]

    @property
    def type_class(self) -> int:
        kinds = Counter(type(g) for g in self.gates)
        return 1 + (kinds[Cp] > 0) + 2 * (kinds[TwoTargetCp] > 0)

    @property
    def multiset(self) -> Counter:
        return Counter(self.gates)

    def verify(self) -> bool:
        return diagonal_product(self.gates) == oracle_matrix(self.target).diagonal

    def __str__(self):
        return " ".join(str(g) for g in self.gates)


def _check_target(f: TruthTable) -> None:
    if f.n != N_QUBITS:
        raise SynthesisError(f"only {N_QUBITS}-bit functions are synthesized, got n={f.n}")
    if not is_balanced(f):
        raise SynthesisError(f"{f} is not balanced")
    if f.values[0] != 0:
        raise SynthesisError(f"{f} has f(000) = 1; use its complement")


def _gate_key(g: GateOp) -> tuple:
    if isinstance(g, TwoTargetCp):
        return (0, g.control, g.target1, g.target2)
    if isinstance(g, Cp):
        return (1, g.control, g.target)
    return (2, g.qubit)


def _written_order(gates) -> tuple[GateOp, ...]:
    return tuple(sorted(gates, key=_gate_key))


def synthesize(f: TruthTable) -> Decomposition:
    """Read the decomposition off the algebraic normal form of ``f``.

    Linear monomials become σz's.  One quadratic monomial ``x_j x_k`` is a
    ``C_jk``; two share exactly one variable, which controls a two-target CP;
    all three become ``T_123 C_23``.
    """
    _check_target(f)
    anf = anf_of(f)
    if anf.degree > 2:
        raise SynthesisError(f"{f} has a cubic ANF term; balanced 3-bit functions cannot")
    linear = [SigmaZ(min(m)) for m in anf.monomials_of_degree(1)]
    quad = sorted(tuple(sorted(m)) for m in anf.monomials_of_degree(2))
    entangling: list[GateOp] = []
    if len(quad) == 1:
        entangling = [Cp(*quad[0])]
    elif len(quad) == 2:
        (shared,) = set(quad[0]) & set(quad[1])
        t1, t2 = sorted((set(quad[0]) | set(quad[1])) - {shared})
        entangling = [TwoTargetCp(shared, t1, t2)]
    elif len(quad) == 3:
        entangling = [TwoTargetCp(1, 2, 3), Cp(2, 3)]
    dec = Decomposition(f, _written_order(entangling + linear))
    if not dec.verify():
        raise SynthesisError(f"decomposition {dec} does not reproduce {f}")
    return dec


def _candidates():
    sz = [SigmaZ(q) for q in QUBITS]
    cps = [None] + [Cp(j, k) for j, k in combinations(QUBITS, 2)]
    tts = [None] + [TwoTargetCp(c, *[q for q in QUBITS if q != c]) for c in QUBITS]
    for r in range(len(sz) + 1):
        for zs in combinations(sz, r):
            for cp, tt in product(cps, tts):
                gates = [g for g in (tt, cp) if g is not None] + list(zs)
                yield _written_order(gates)


def brute_force_synthesize(f: TruthTable) -> Decomposition:
    """Exhaustive search over ≤3 σz, ≤1 CP and ≤1 two-target CP.

    Returns the smallest gate count; ties go to the lexicographically
    smallest written gate string.
    """
    _check_target(f)
    want = oracle_matrix(f).diagonal
    hits = [gates for gates in _candidates() if diagonal_product(gates) == want]
    if not hits:
        raise SynthesisError(f"no decomposition of {f} in the gate set")
    best = min(hits, key=lambda gs: (len(gs), [_gate_key(g) for g in gs]))
    return Decomposition(f, best)


def synthesis_table() -> list[Decomposition]:
    return [synthesize(f) for f in canonical_balanced_set(N_QUBITS)]


def classify_all() -> dict[int, int]:
    counts = Counter()
    for f in canonical_balanced_set(N_QUBITS):
        try:
            counts[synthesize(f).type_class] += 1
        except SynthesisError as exc:
            raise SynthesisError(f"synthesis failed for {f}: {exc}") from exc
    return {t: counts[t] for t in (1, 2, 3, 4)}


def _anchor(fn) -> TruthTable:
    return TruthTable.from_callable(N_QUBITS, fn)


# The three decompositions used for the physical joint operations.
U_F30 = _anchor(lambda x1, x2, x3: x1 ^ x2 ^ x3 ^ (x1 & x2))
U_F9 = _anchor(lambda x1, x2, x3: (x2 & x1) ^ (x2 & x3) ^ x1 ^ x2)
U_F7 = _anchor(lambda x1, x2, x3: (x1 & x2) ^ (x1 & x3) ^ (x2 & x3) ^ x1 ^ x2)
NAMED_ORACLES = {"U_f30": U_F30, "U_f9": U_F9, "U_f7": U_F7}


def parse_gate(text: str) -> GateOp:
    """Inverse of ``str(gate)`` for σz, CP and two-target CP gates."""
    text = text.strip()
    digits = text.lstrip("szCT")
    prefix = text[: len(text) - len(digits)]
    try:
        qs = [int(c) for c in digits]
        if prefix == "sz" and len(qs) == 1:
            return SigmaZ(*qs)
        if prefix == "C" and len(qs) == 2:
            return Cp(*qs)
        if prefix == "T" and len(qs) == 3:
            return TwoTargetCp(*qs)
    except ValueError:
        pass
    raise ValueError(f"not a gate string: {text!r}")


def decomposition_to_dict(dec: Decomposition) -> dict:
    aliases = {f: name for name, f in NAMED_ORACLES.items()}
    return {
        "truth_table": str(dec.target),
        "anf": str(anf_of(dec.target)),
        "gates": [str(g) for g in dec.gates],
        "type": dec.type_class,
        "alias": aliases.get(dec.target),
    }


def decomposition_from_dict(d: dict) -> Decomposition:
    return Decomposition(TruthTable.from_string(d["truth_table"]),
                         tuple(parse_gate(g) for g in d["gates"]))
