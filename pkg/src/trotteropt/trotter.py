"""Suzuki product formulas: coefficient vectors, phase expansion, and
second-order block evaluation.

The order-2k formula is built recursively from the symmetric second-order
block S2; a coefficient vector holds one 5-entry block per recursion level
(levels 2..k), the Suzuki values being (p, p, 1-4p, p, p). Expanding the
levels turns a coefficient vector into per-slice S2 phases; time slicing
divides the phases by r and repeats the slice r times. The order parameter
k = 1 is admitted as the degenerate case with an empty coefficient vector,
meaning plain S2 slicing.

The evolution parameter is factored as -i * t: phases are stored as real
fractions and the -i * t is applied at exponentiation time.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import expm_scaled_hermitian, kron, matrix_power
from .model import (
    COUPLING_KINDS,
    ChainInstance,
    LocalTerm,
    Pauli,
    TermKind,
    TermOrdering,
    COUPLING_PAULI,
    commutation_table,
    merge_gates,
    ordered_terms,
    pauli,
    term_matrix,
)

__all__ = [
    "Circuit",
    "CoefficientVector",
    "DecompositionSpec",
    "S2Evaluator",
    "build_approximation",
    "build_circuit",
    "build_s1",
    "build_s2",
    "expand_phases",
    "fast_local_expm",
    "slice_phases",
    "suzuki_coefficient",
    "suzuki_seed",
]


@dataclass(frozen=True)
class CoefficientVector:
    """The recursion coefficients under optimization: 5(k-1) reals, laid out
    as concatenated 5-blocks for levels 2..k.

    Suzuki's own blocks each sum to 1; optimized vectors may not (the search
    runs unconstrained).
    """

    k: int
    components: tuple[float, ...]

    def __post_init__(self) -> None:
        if not isinstance(self.k, int) or self.k < 1:
            raise ValueError("order parameter k must be an integer >= 1")
        object.__setattr__(
            self, "components", tuple(float(x) for x in self.components)
        )
        if len(self.components) != 5 * (self.k - 1):
            raise ValueError(
                f"k={self.k} needs {5 * (self.k - 1)} components, got {len(self.components)}"
            )

    @property
    def dim(self) -> int:
        return len(self.components)

    def block(self, level: int) -> tuple[float, ...]:
        """The 5-entry block for one recursion level (2 <= level <= k)."""
        if not 2 <= level <= self.k:
            raise ValueError(f"level {level} out of range 2..{self.k}")
        return self.components[5 * (level - 2) : 5 * (level - 1)]


@dataclass(frozen=True)
class DecompositionSpec:
    """Order parameter k, slice count r, and term ordering: together these
    fix the circuit shape and gate count."""

    k: int
    r: int
    ordering: TermOrdering

    def __post_init__(self) -> None:
        if not isinstance(self.k, int) or self.k < 1:
            raise ValueError("k must be an integer >= 1")
        if not isinstance(self.r, int) or self.r < 1:
            raise ValueError("r must be an integer >= 1")

    @property
    def slices_per_step(self) -> int:
        """S2 blocks per time slice: 5^(k-1)."""
        return 5 ** (self.k - 1)


def suzuki_coefficient(k: int) -> float:
    """Suzuki's recursion coefficient 1 / (4 - 4^(1/(2k-1))) for level k >= 2."""
    if k < 2:
        raise ValueError("recursion coefficients exist for k >= 2 only")
    return 1.0 / (4.0 - 4.0 ** (1.0 / (2 * k - 1)))


def suzuki_seed(k: int) -> CoefficientVector:
    """The Suzuki vector: blocks (p, p, 1-4p, p, p) concatenated for levels
    2..k. Empty for k = 1 (plain second-order slicing)."""
    if k < 1:
        raise ValueError("k must be >= 1")
    comps: list[float] = []
    for level in range(2, k + 1):
        p = suzuki_coefficient(level)
        comps.extend([p, p, 1.0 - 4.0 * p, p, p])
    return CoefficientVector(k, tuple(comps))


def slice_phases(p: CoefficientVector) -> np.ndarray:
    """Multiply the recursion out for a single time slice: 5^(k-1) S2 phases.

    Each level's block entries scale the expansion of the level below; the
    base case is a single unit S2 phase.
    """
    phases = np.array([1.0])
    for level in range(2, p.k + 1):
        block = p.block(level)
        phases = np.concatenate([coeff * phases for coeff in block])
    return phases


def expand_phases(p: CoefficientVector, r: int) -> np.ndarray:
    """The full phase vector of the r-slice formula: the single-slice
    expansion divided by r, repeated r times (length r * 5^(k-1))."""
    if r < 1:
        raise ValueError("r must be >= 1")
    return np.tile(slice_phases(p) / r, r)


_LOCAL_BLOCKS = {
    kind: kron(pauli(COUPLING_PAULI[kind]), pauli(COUPLING_PAULI[kind]))
    for kind in COUPLING_KINDS
}


def _is_wrap(term: LocalTerm, n: int) -> bool:
    return term.kind in COUPLING_KINDS and term.site == n


def fast_local_expm(term: LocalTerm, n: int, c: complex) -> np.ndarray:
    """exp(c * H_term) built from the 2x2 or 4x4 local block.

    exp(I x A x I) = I x exp(A) x I, so only the local block is
    exponentiated and the result is Kronecker-embedded. The identity does
    not apply to the wrap-around couplings (site n with site 1), which fall
    back to exponentiation at full dimension.
    """
    if _is_wrap(term, n):
        return expm_scaled_hermitian(term_matrix(term, n), c)
    if term.kind is TermKind.Z:
        block = term.coefficient * pauli(Pauli.Z)
        width = 1
    else:
        block = term.coefficient * _LOCAL_BLOCKS[term.kind]
        width = 2
    local = expm_scaled_hermitian(block, c)
    left = np.eye(2 ** (term.site - 1), dtype=complex)
    right = np.eye(2 ** (n - term.site - width + 1), dtype=complex)
    return kron(kron(left, local), right)


class _TermExp:
    """Per-term exponentiator with the eigendecomposition precomputed."""

    def __init__(self, term: LocalTerm, n: int):
        self.term = term
        self.n = n
        self.wrap = _is_wrap(term, n)
        if self.wrap:
            mat = term_matrix(term, n)
        elif term.kind is TermKind.Z:
            mat = term.coefficient * pauli(Pauli.Z)
        else:
            mat = term.coefficient * _LOCAL_BLOCKS[term.kind]
        self.values, self.vectors = np.linalg.eigh(mat)
        if not self.wrap:
            width = 1 if term.kind is TermKind.Z else 2
            self.left = np.eye(2 ** (term.site - 1), dtype=complex)
            self.right = np.eye(2 ** (n - term.site - width + 1), dtype=complex)

    def __call__(self, c: complex) -> np.ndarray:
        local = (self.vectors * np.exp(c * self.values)) @ self.vectors.conj().T
        if self.wrap:
            return local
        return kron(kron(self.left, local), self.right)


class S2Evaluator:
    """Builds symmetric second-order blocks for a fixed term sequence,
    caching results per phase.

    The cache is keyed on the exact phase value, so hits are bit-identical
    to misses; entries are evicted oldest-first once ``max_cache`` is
    reached. Lookups and stores are plain dict operations on idempotent
    values, so concurrent readers are safe.
    """

    def __init__(self, terms, n: int, t: float, max_cache: int = 1024):
        self.terms = tuple(terms)
        self.n = n
        self.t = float(t)
        self._exps = [_TermExp(term, n) for term in self.terms]
        # Every chain generator is an exactly symmetric matrix (Y x Y is
        # real), making each exponential symmetric too, so the reversed
        # half-product is the transpose of the forward one.
        self._symmetric = all(
            np.array_equal(m := term_matrix(term, n), m.T) for term in self.terms
        )
        self._cache: dict[float, np.ndarray] = {}
        self._max_cache = max_cache

    @classmethod
    def for_instance(cls, instance: ChainInstance, ordering: TermOrdering) -> "S2Evaluator":
        return cls(ordered_terms(instance, ordering), instance.n, instance.t)

    def _product(self, c: complex, reverse_too: bool) -> np.ndarray:
        mats = [exp(c) for exp in self._exps]
        acc = mats[0]
        for m in mats[1:]:
            acc = acc @ m
        if reverse_too:
            if self._symmetric:
                return acc @ acc.T
            for m in reversed(mats):
                acc = acc @ m
        return acc

    def s2(self, phase: float) -> np.ndarray:
        """S2 at the given fraction of the evolution parameter: forward
        half-phase product times the reversed half-phase product."""
        key = float(phase)
        cached = self._cache.get(key)
        if cached is not None:
            return cached
        result = self._product(-0.5j * self.t * key, reverse_too=True)
        if len(self._cache) >= self._max_cache:
            self._cache.pop(next(iter(self._cache)))
        self._cache[key] = result
        return result

    def s1(self, phase: float) -> np.ndarray:
        """First-order block: the single forward full-phase product."""
        return self._product(-1j * self.t * float(phase), reverse_too=False)


def build_s2(instance: ChainInstance, ordering: TermOrdering, phase: float) -> np.ndarray:
    """Symmetric second-order block for one instance at one phase."""
    return S2Evaluator.for_instance(instance, ordering).s2(phase)


def build_s1(instance: ChainInstance, ordering: TermOrdering, phase: float) -> np.ndarray:
    """First-order product block for one instance at one phase."""
    return S2Evaluator.for_instance(instance, ordering).s1(phase)


def build_approximation(
    instance: ChainInstance,
    spec: DecompositionSpec,
    p: CoefficientVector,
    evaluator: S2Evaluator | None = None,
) -> np.ndarray:
    """The full product-formula approximation to exp(-i t H).

    One time slice is the product of S2 blocks at the expanded phases
    divided by r; the slice is then raised to the r-th power. For the Suzuki
    seed this is exactly the order-2k formula with r slices.
    """
    if p.k != spec.k:
        raise ValueError(f"coefficient vector k={p.k} does not match spec k={spec.k}")
    ev = evaluator if evaluator is not None else S2Evaluator.for_instance(instance, spec.ordering)
    acc: np.ndarray | None = None
    for x in slice_phases(p):
        block = ev.s2(x / spec.r)
        acc = block if acc is None else acc @ block
    assert acc is not None
    return matrix_power(acc, spec.r)


@dataclass(frozen=True)
class Circuit:
    """An explicit gate list: (term, phase) pairs, phase being the fraction
    of the evolution parameter applied to that generator."""

    gates: tuple[tuple[LocalTerm, float], ...]
    k: int
    r: int
    ordering: TermOrdering
    n: int


def build_circuit(
    instance: ChainInstance,
    spec: DecompositionSpec,
    p: CoefficientVector,
    merged: bool = False,
) -> Circuit:
    """The gate sequence of the product formula; ``merged`` collapses
    same-generator exponentials that commutation can bring together."""
    terms = ordered_terms(instance, spec.ordering)
    gates: list[tuple[int, float]] = []
    for block_phase in expand_phases(p, spec.r):
        half = float(block_phase) / 2.0
        forward = [(i, half) for i in range(len(terms))]
        gates.extend(forward)
        gates.extend(forward[::-1])
    if merged:
        gates = merge_gates(gates, commutation_table(terms, instance.n))
    return Circuit(
        gates=tuple((terms[i], phase) for i, phase in gates),
        k=spec.k,
        r=spec.r,
        ordering=spec.ordering,
        n=instance.n,
    )
