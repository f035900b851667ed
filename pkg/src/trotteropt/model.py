"""Disordered Heisenberg chain on a ring of n qubits.

The Hamiltonian is the sum of 4n local terms: XX, YY and ZZ couplings on each
bond (j, j+1) — indices wrap, so qubit n couples back to qubit 1 — plus a Z
field of strength v_j on each site. Sites are 1-based throughout.

Besides building operators, this module owns term orderings (the order of
exponential gates in a product formula is a free choice) and the gate count
after merging exponentials of identical generators that can be brought next
to each other by commutation.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from functools import reduce

import numpy as np

from .linalg import kron

__all__ = [
    "ChainInstance",
    "LocalTerm",
    "OrderingMode",
    "Pauli",
    "TermKind",
    "TermOrdering",
    "embed",
    "hamiltonian",
    "merge_gates",
    "merged_gate_count",
    "ordered_terms",
    "pauli",
    "term_matrix",
    "terms_commute",
    "unmerged_gate_count",
]


class Pauli(str, Enum):
    X = "x"
    Y = "y"
    Z = "z"


_PAULI_MATS = {
    Pauli.X: np.array([[0, 1], [1, 0]], dtype=complex),
    Pauli.Y: np.array([[0, -1j], [1j, 0]], dtype=complex),
    Pauli.Z: np.array([[1, 0], [0, -1]], dtype=complex),
}


def pauli(kind: Pauli) -> np.ndarray:
    """The 2x2 Pauli matrix for ``kind``."""
    return _PAULI_MATS[Pauli(kind)].copy()


class TermKind(str, Enum):
    """Kinds of local Hamiltonian terms; Z is the single-site field term."""

    XX = "xx"
    YY = "yy"
    ZZ = "zz"
    Z = "z"


COUPLING_KINDS = (TermKind.XX, TermKind.YY, TermKind.ZZ)

COUPLING_PAULI = {TermKind.XX: Pauli.X, TermKind.YY: Pauli.Y, TermKind.ZZ: Pauli.Z}


@dataclass(frozen=True)
class LocalTerm:
    """One summand of the chain Hamiltonian.

    Couplings act on the bond (site, site % n + 1) with coefficient 1; the
    field term acts on ``site`` alone with coefficient v_site.
    """

    kind: TermKind
    site: int
    coefficient: float = 1.0


@dataclass(frozen=True)
class ChainInstance:
    """A concrete problem: qubit count n, disorder vector v, simulation time t.

    n >= 3 is required: on a 2-site ring the periodic couplings would be
    double-counted.
    """

    n: int
    v: tuple[float, ...]
    t: float
    seed: int | None = None

    def __post_init__(self) -> None:
        if not isinstance(self.n, int) or self.n < 3:
            raise ValueError("chain needs an integer n >= 3")
        object.__setattr__(self, "v", tuple(float(x) for x in self.v))
        if len(self.v) != self.n:
            raise ValueError(f"disorder vector must have length n={self.n}")
        if not all(np.isfinite(x) and abs(x) <= 1.0 for x in self.v):
            raise ValueError("disorder strengths must be finite and in [-1, 1]")
        object.__setattr__(self, "t", float(self.t))
        if not (np.isfinite(self.t) and self.t > 0):
            raise ValueError("simulation time must be positive and finite")

    @classmethod
    def random(
        cls,
        n: int,
        rng: np.random.Generator,
        t: float | None = None,
        seed: int | None = None,
    ) -> "ChainInstance":
        """Draw v_j i.i.d. uniform in [-1, 1]; t defaults to 2n."""
        v = tuple(float(x) for x in rng.uniform(-1.0, 1.0, size=n))
        return cls(n=n, v=v, t=float(2 * n) if t is None else float(t), seed=seed)

    def terms(self) -> tuple[LocalTerm, ...]:
        """All 4n local terms, in per-site reading order (XX, YY, ZZ, Z)."""
        out: list[LocalTerm] = []
        for j in range(1, self.n + 1):
            out.append(LocalTerm(TermKind.XX, j))
            out.append(LocalTerm(TermKind.YY, j))
            out.append(LocalTerm(TermKind.ZZ, j))
            out.append(LocalTerm(TermKind.Z, j, self.v[j - 1]))
        return tuple(out)


class OrderingMode(str, Enum):
    CANONICAL = "canonical"
    GROUPED = "grouped"
    EXPLICIT = "explicit"


@dataclass(frozen=True)
class TermOrdering:
    """How the 4n terms are ordered inside a product-formula pass."""

    mode: OrderingMode
    permutation: tuple[int, ...] | None = None

    @classmethod
    def canonical(cls) -> "TermOrdering":
        return cls(OrderingMode.CANONICAL)

    @classmethod
    def grouped(cls) -> "TermOrdering":
        return cls(OrderingMode.GROUPED)

    @classmethod
    def explicit(cls, permutation) -> "TermOrdering":
        return cls(OrderingMode.EXPLICIT, tuple(int(i) for i in permutation))

    def to_dict(self) -> dict:
        d: dict = {"mode": self.mode.value}
        if self.permutation is not None:
            d["permutation"] = list(self.permutation)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "TermOrdering":
        mode = OrderingMode(d["mode"])
        if mode is OrderingMode.EXPLICIT:
            return cls.explicit(d["permutation"])
        return cls(mode)


def ordered_terms(instance: ChainInstance, ordering: TermOrdering) -> tuple[LocalTerm, ...]:
    """The instance's terms in the order requested.

    Canonical is the per-site reading order; grouped lists all XX couplings,
    then all YY, all ZZ, and all field terms; explicit applies a stored
    permutation (0-based indices into the canonical list).
    """
    base = instance.terms()
    if ordering.mode is OrderingMode.CANONICAL:
        return base
    if ordering.mode is OrderingMode.GROUPED:
        by_kind = {kind: [] for kind in (TermKind.XX, TermKind.YY, TermKind.ZZ, TermKind.Z)}
        for term in base:
            by_kind[term.kind].append(term)
        return tuple(t for kind in by_kind for t in by_kind[kind])
    perm = ordering.permutation
    if perm is None or sorted(perm) != list(range(len(base))):
        raise ValueError(f"permutation must be a bijection on 0..{len(base) - 1}")
    return tuple(base[i] for i in perm)


def embed(op, site: int, n: int) -> np.ndarray:
    """Place a 2x2 (or 4x4, spanning site and site+1) operator at a tensor
    position in an n-qubit space; qubit 1 is the leftmost factor."""
    op = np.asarray(op, dtype=complex)
    if op.shape == (2, 2):
        width = 1
    elif op.shape == (4, 4):
        width = 2
    else:
        raise ValueError(f"can only embed 2x2 or 4x4 operators, got {op.shape}")
    if not 1 <= site <= n - width + 1:
        raise ValueError(f"site {site} out of range for width-{width} operator on {n} qubits")
    left = np.eye(2 ** (site - 1), dtype=complex)
    right = np.eye(2 ** (n - site - width + 1), dtype=complex)
    return kron(kron(left, op), right)


def term_matrix(term: LocalTerm, n: int) -> np.ndarray:
    """The 2^n-dimensional Hermitian matrix for one local term.

    Wrap-around couplings (site = n) put operators at tensor positions n
    and 1 of the kron chain.
    """
    if term.kind is TermKind.Z:
        return term.coefficient * embed(pauli(Pauli.Z), term.site, n)
    p = pauli(COUPLING_PAULI[term.kind])
    j = term.site
    k = j % n + 1
    factors = [np.eye(2, dtype=complex)] * n
    factors[j - 1] = p
    factors[k - 1] = p
    return term.coefficient * reduce(kron, factors)


def hamiltonian(instance: ChainInstance) -> np.ndarray:
    """Sum of all 4n term matrices (a fixed summation order keeps this
    independent of any TermOrdering)."""
    total = np.zeros((2**instance.n, 2**instance.n), dtype=complex)
    for term in instance.terms():
        total += term_matrix(term, instance.n)
    return total


def _pauli_sites(term: LocalTerm, n: int) -> dict[int, str]:
    if term.kind is TermKind.Z:
        return {term.site: "z"}
    letter = term.kind.value[0]
    return {term.site: letter, term.site % n + 1: letter}


def terms_commute(a: LocalTerm, b: LocalTerm, n: int) -> bool:
    """Pauli-string commutation: strings commute iff they anticommute on an
    even number of shared sites."""
    sa = _pauli_sites(a, n)
    sb = _pauli_sites(b, n)
    clashes = sum(1 for site, letter in sa.items() if site in sb and sb[site] != letter)
    return clashes % 2 == 0


def merge_gates(
    gates: list[tuple[int, float]], commute: np.ndarray
) -> list[tuple[int, float]]:
    """Collapse exponentials of identical generators, allowing a gate to slide
    left past gates that commute with it; phases of merged gates add.

    ``gates`` are (generator id, phase) pairs; ``commute[i, j]`` says whether
    generators i and j commute. Distinct generators never fuse, even when
    they commute.
    """
    out: list[tuple[int, float]] = []
    for gid, phase in gates:
        target = -1
        i = len(out) - 1
        while i >= 0:
            hid = out[i][0]
            if hid == gid:
                target = i
                break
            if not commute[hid, gid]:
                break
            i -= 1
        if target >= 0:
            out[target] = (gid, out[target][1] + phase)
        else:
            out.append((gid, phase))
    return out


def _product_formula_stream(num_terms: int, repetitions: int) -> list[tuple[int, float]]:
    # One symmetric block = forward then reverse pass; phases are irrelevant
    # for counting, so each gate carries 1.0.
    forward = [(i, 1.0) for i in range(num_terms)]
    block = forward + forward[::-1]
    return block * repetitions


def commutation_table(terms: tuple[LocalTerm, ...], n: int) -> np.ndarray:
    table = np.zeros((len(terms), len(terms)), dtype=bool)
    for i, a in enumerate(terms):
        for j, b in enumerate(terms):
            table[i, j] = terms_commute(a, b, n)
    return table


def unmerged_gate_count(instance: ChainInstance, k: int, r: int) -> int:
    """Exponential-gate count of the order-2k formula with r time slices,
    before any merging: 2L gates per symmetric block, r * 5^(k-1) blocks."""
    if k < 1 or r < 1:
        raise ValueError("k and r must be >= 1")
    return 2 * 4 * instance.n * r * 5 ** (k - 1)


def merged_gate_count(instance: ChainInstance, ordering: TermOrdering, k: int, r: int) -> int:
    """Gate count of the order-2k, r-slice product formula after merging
    same-generator exponentials across commuting neighbours."""
    if k < 1 or r < 1:
        raise ValueError("k and r must be >= 1")
    terms = ordered_terms(instance, ordering)
    table = commutation_table(terms, instance.n)
    stream = _product_formula_stream(len(terms), r * 5 ** (k - 1))
    return len(merge_gates(stream, table))
