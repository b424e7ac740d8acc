"""
Pure-state core for tribase
Gauge-fixed amplitude vectors, Haar sampling, infidelity and support analysis
"""
import itertools
from dataclasses import dataclass
from typing import FrozenSet, Sequence, Tuple, Union

import numpy as np

from tribase_config import AMPLITUDE_ZERO
from tribase_errors import DimensionMismatch, UnsupportedDimension, ZeroVector

SeedLike = Union[None, int, Sequence[int], np.random.SeedSequence, np.random.Generator]


def make_rng(seed: SeedLike) -> np.random.Generator:
    """
    Get a numpy Generator from any accepted seed form

    Args:
        seed: int, sequence of ints, SeedSequence or an existing Generator

    Returns:
        numpy Generator (the same object if one was passed in)
    """
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def require_even_dimension(d: int) -> None:
    if d < 4 or d % 2:
        raise UnsupportedDimension(f"dimension must be even and >= 4, got {d}")


@dataclass(frozen=True, eq=False)
class PureState:
    """Normalized, gauge-fixed pure state. Build it with make_state()."""
    amplitudes: np.ndarray

    @property
    def dimension(self) -> int:
        return self.amplitudes.shape[0]

    @property
    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def conjugate(self) -> "PureState":
        return make_state(np.conj(self.amplitudes))


def _gauge_anchor(amps: np.ndarray) -> int:
    above = np.flatnonzero(np.abs(amps) > AMPLITUDE_ZERO)
    return int(above[0])


def make_state(amplitudes) -> PureState:
    """
    Normalize and gauge-fix a list of complex amplitudes

    The first amplitude with modulus above the zero threshold becomes real and
    positive. Applying make_state to its own output returns identical arrays.

    Args:
        amplitudes: Sequence of complex numbers, length >= 2

    Returns:
        PureState
    """
    amps = np.array(amplitudes, dtype=np.complex128).ravel()
    if amps.shape[0] < 2:
        raise DimensionMismatch(f"a state needs at least 2 amplitudes, got {amps.shape[0]}")
    if not np.any(np.abs(amps) > AMPLITUDE_ZERO):
        raise ZeroVector("all amplitudes are below the zero threshold")

    norm = np.linalg.norm(amps)
    if abs(norm - 1.0) > 1e-14:
        amps = amps / norm

    anchor = _gauge_anchor(amps)
    value = amps[anchor]
    if value.imag != 0.0 or value.real < 0.0:
        amps = amps * (np.conj(value) / abs(value))
        amps[anchor] = abs(value)

    amps.setflags(write=False)
    return PureState(amps)


def haar_random(d: int, seed: SeedLike = None) -> PureState:
    """
    Draw a state from the unitarily invariant measure

    A normalized vector of i.i.d. complex Gaussians is Haar distributed.

    Args:
        d: Even dimension >= 4
        seed: RNG seed or Generator

    Returns:
        PureState
    """
    require_even_dimension(d)
    rng = make_rng(seed)
    z = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    return make_state(z)


def infidelity(psi: PureState, phi: PureState) -> float:
    """1 - |<phi|psi>|^2, clipped to [0, 1]"""
    if psi.dimension != phi.dimension:
        raise DimensionMismatch(f"dimensions differ: {psi.dimension} vs {phi.dimension}")
    overlap = np.vdot(phi.amplitudes, psi.amplitudes)
    return float(min(1.0, max(0.0, 1.0 - abs(overlap) ** 2)))


# ============================================
# Support patterns of the canonical distribution
# ============================================

@dataclass(frozen=True)
class ZeroPattern:
    """Zero indices and maximal cyclic runs of nonzero indices"""
    dimension: int
    zero_indices: FrozenSet[int]
    arcs: Tuple[Tuple[int, ...], ...]

    @property
    def ambiguous(self) -> bool:
        return len(self.arcs) >= 2


def classify_support(canonical_freqs, eps: float) -> ZeroPattern:
    """
    Split the canonical distribution into zero indices and nonzero arcs

    Adjacency is cyclic: index d-1 neighbours index 0.

    Args:
        canonical_freqs: Probability vector over the canonical basis
        eps: Entries below eps count as zero

    Returns:
        ZeroPattern with arcs ordered by their first index
    """
    q = np.asarray(canonical_freqs, dtype=float)
    d = q.shape[0]
    nonzero = q >= eps
    zeros = frozenset(int(i) for i in np.flatnonzero(~nonzero))

    if not nonzero.any():
        return ZeroPattern(d, zeros, ())
    if nonzero.all():
        return ZeroPattern(d, zeros, (tuple(range(d)),))

    arcs = []
    for start in range(d):
        if nonzero[start] and not nonzero[start - 1]:
            run = [start]
            i = (start + 1) % d
            while nonzero[i]:
                run.append(i)
                i = (i + 1) % d
            arcs.append(tuple(run))
    return ZeroPattern(d, zeros, tuple(arcs))


def detect_equal_pairs(canonical_freqs, eps: float) -> bool:
    """True iff two disjoint index pairs have frequencies equal within eps"""
    q = np.asarray(canonical_freqs, dtype=float)
    pairs = [
        (i, j) for i, j in itertools.combinations(range(q.shape[0]), 2)
        if abs(q[i] - q[j]) < eps
    ]
    for (i, j), (k, l) in itertools.combinations(pairs, 2):
        if len({i, j, k, l}) == 4:
            return True
    return False


# ============================================
# Target states from the two experiments
# ============================================

def slit_qudit_state() -> PureState:
    """Eight-path qudit with alternating signs, (|0> - |1> + ... - |7>)/sqrt(8)"""
    return make_state([(-1) ** k for k in range(8)])


def two_qubit_product_state() -> PureState:
    """Separable two-qubit state prepared on the superconducting processor"""
    return make_state([0.5846, 0.157 + 0.295j, 0.608 + 0.200j, 0.062 + 0.362j])


NAMED_STATES = {
    "slit8": slit_qudit_state,
    "two-qubit": two_qubit_product_state,
}
