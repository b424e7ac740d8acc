"""
Measurement bases for tribase
Canonical, five-basis pair bases, the two three-basis pair bases with Fourier
completion states, randomized replacements and support-restricted versions
"""
import logging
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from tribase_config import ORTHO_TOL
from tribase_errors import (
    DegenerateDraw,
    InvalidParams,
    LinearlyDependent,
    SchemaError,
    SubspaceTooSmall,
)
from tribase_state import PureState, SeedLike, make_rng, make_state, require_even_dimension

logger = logging.getLogger(__name__)

PAIR_PLUS = "pair-plus"
PAIR_MINUS = "pair-minus"
COMPLETION = "completion"
CANONICAL = "canonical"

RANDOM_A_RANGE = (0.3, 0.95)
MAX_REDRAWS = 16
DRAW_RESIDUAL_TOL = 1e-8


@dataclass(frozen=True, eq=False)
class OrthonormalBasis:
    """d unit vectors stored as the rows of `vectors`"""
    name: str
    vectors: np.ndarray
    labels: Tuple[str, ...]

    @property
    def dimension(self) -> int:
        return self.vectors.shape[1]

    def indices(self, label: str) -> List[int]:
        return [i for i, tag in enumerate(self.labels) if tag == label]


@dataclass(frozen=True)
class PairBasisParams:
    """Amplitudes a, b of the pair vectors and the completion phases"""
    a: float
    b: float
    phases: Tuple[float, ...] = field(default=())

    def __post_init__(self):
        if not (self.a > 0 and self.b > 0):
            raise InvalidParams(f"a and b must be positive, got a={self.a}, b={self.b}")
        if abs(self.a ** 2 + self.b ** 2 - 1.0) > 1e-12:
            raise InvalidParams(f"a^2 + b^2 must equal 1, got {self.a ** 2 + self.b ** 2!r}")
        object.__setattr__(self, "phases", tuple(float(p) for p in self.phases))

    def with_phases(self, d: int) -> "PairBasisParams":
        """Fill in the default chirp when no phases were given"""
        if self.phases:
            if len(self.phases) != d // 2:
                raise InvalidParams(f"need {d // 2} completion phases, got {len(self.phases)}")
            return self
        return PairBasisParams(self.a, self.b, default_phases(d))


def default_phases(d: int) -> Tuple[float, ...]:
    """Quadratic chirp phi_n = pi * n (n + 1) / d, n = 0 .. d/2 - 1"""
    return tuple(math.pi * n * (n + 1) / d for n in range(d // 2))


def default_params(d: int) -> PairBasisParams:
    h = 1.0 / math.sqrt(2.0)
    return PairBasisParams(h, h, default_phases(d))


def params_from(a: Optional[float], b: Optional[float], phases: Optional[Sequence[float]], d: int) -> PairBasisParams:
    """Build parameters from optional overrides, defaulting to a = b = 1/sqrt(2)"""
    if a is None:
        a = b = 1.0 / math.sqrt(2.0)
    return PairBasisParams(a, b, tuple(phases or ())).with_phases(d)


@dataclass(frozen=True, eq=False)
class ThreeBasisSet:
    """Canonical basis plus the pair bases B1' and B3'"""
    canonical: OrthonormalBasis
    b1p: OrthonormalBasis
    b3p: OrthonormalBasis
    params: PairBasisParams
    randomized: bool = False

    @property
    def dimension(self) -> int:
        return self.canonical.dimension

    def bases(self) -> Tuple[OrthonormalBasis, ...]:
        return (self.canonical, self.b1p, self.b3p)

    def by_name(self, name: str) -> OrthonormalBasis:
        for basis in self.bases():
            if basis.name == name:
                return basis
        raise KeyError(name)

    def pair_basis(self, shift: int) -> OrthonormalBasis:
        return self.b1p if shift == 0 else self.b3p

    def to_dict(self) -> Dict:
        return {
            "dimension": self.dimension,
            "a": self.params.a,
            "b": self.params.b,
            "phases": list(self.params.phases),
            "randomized": self.randomized,
            "vectors": {
                basis.name: [[[float(z.real), float(z.imag)] for z in row] for row in basis.vectors]
                for basis in self.bases()
            },
        }

    @classmethod
    def from_dict(cls, data: Dict) -> "ThreeBasisSet":
        """Rebuild a basis set from to_dict() output, checking orthonormality"""
        try:
            d = int(data["dimension"])
            params = PairBasisParams(float(data["a"]), float(data["b"]), tuple(data.get("phases", ())))
            rows = {}
            for name in ("B1p", "B3p"):
                raw = np.asarray(data["vectors"][name], dtype=float)
                rows[name] = raw[..., 0] + 1j * raw[..., 1]
        except (KeyError, TypeError, ValueError, IndexError) as e:
            raise SchemaError(f"malformed basis set: {e}", "bases")

        half = d // 2
        labels = (PAIR_PLUS,) * half + (COMPLETION,) * half
        b1p = OrthonormalBasis("B1p", rows["B1p"], labels)
        b3p = OrthonormalBasis("B3p", rows["B3p"], labels)
        for basis in (b1p, b3p):
            if basis.vectors.shape != (d, d) or not check_orthonormal(basis, 1e-8):
                raise SchemaError(f"{basis.name} is not an orthonormal {d}x{d} basis", f"bases.vectors.{basis.name}")
        return cls(canonical(d), b1p, b3p, params, bool(data.get("randomized", False)))


# ============================================
# Constructors
# ============================================

def canonical(d: int) -> OrthonormalBasis:
    require_even_dimension(d)
    return OrthonormalBasis("B0", np.eye(d, dtype=np.complex128), (CANONICAL,) * d)


def _pair_vector(d: int, first: int, wa: complex, wb: complex) -> np.ndarray:
    v = np.zeros(d, dtype=np.complex128)
    v[first % d] = wa
    v[(first + 1) % d] = wb
    return v


def five_bases(d: int, params: Optional[PairBasisParams] = None) -> List[OrthonormalBasis]:
    """
    Pair bases B1..B4 of the five-basis method

    Each pair (x, y) contributes a|x> + w b|y> and b|x> - w a|y>, with w = 1
    for B1/B3 and w = i for B2/B4. At a = b both reduce to (|x> +- w|y>)/sqrt(2).
    B3 and B4 pair (2v+1, 2v+2) with indices taken modulo d.

    Args:
        d: Even dimension >= 4
        params: Pair amplitudes, default a = b = 1/sqrt(2)

    Returns:
        [B1, B2, B3, B4]
    """
    require_even_dimension(d)
    params = params or default_params(d)
    a, b = params.a, params.b
    result = []
    for name, shift, w in (("B1", 0, 1), ("B2", 0, 1j), ("B3", 1, 1), ("B4", 1, 1j)):
        rows, labels = [], []
        for nu in range(d // 2):
            first = 2 * nu + shift
            rows.append(_pair_vector(d, first, a, w * b))
            rows.append(_pair_vector(d, first, b, -w * a))
            labels += [PAIR_PLUS, PAIR_MINUS]
        result.append(OrthonormalBasis(name, np.array(rows), tuple(labels)))
    return result


def fourier_completion(
    d: int,
    shift: int,
    phases: Sequence[float],
    a: float = 1.0 / math.sqrt(2.0),
    b: float = 1.0 / math.sqrt(2.0),
) -> List[np.ndarray]:
    """
    Completion states |phi_j> = sum_n F_jn (b|2n+s> - a|2n+1+s>)

    F_jn = (d/2)^(-1/2) exp(i [2 pi j n / (d/2) + phi_n]). Each state is
    orthogonal to every pair vector a|2n+s> + b|2n+1+s> of the same shift.

    Args:
        d: Even dimension >= 4
        shift: 0 for B1', 1 for B3'
        phases: d/2 angles phi_n in radians
        a, b: Pair amplitudes

    Returns:
        d/2 unit vectors
    """
    require_even_dimension(d)
    half = d // 2
    if len(phases) != half:
        raise InvalidParams(f"need {half} completion phases, got {len(phases)}")
    n = np.arange(half)
    vectors = []
    for j in range(half):
        f = np.exp(1j * (2 * np.pi * j * n / half + np.asarray(phases, dtype=float))) / math.sqrt(half)
        v = np.zeros(d, dtype=np.complex128)
        v[(2 * n + shift) % d] = b * f
        v[(2 * n + 1 + shift) % d] = -a * f
        vectors.append(v)
    return vectors


def _pair_plus_rows(d: int, shift: int, a: float, b: float) -> np.ndarray:
    return np.array([_pair_vector(d, 2 * nu + shift, a, b) for nu in range(d // 2)])


def three_bases(d: int, params: Optional[PairBasisParams] = None) -> ThreeBasisSet:
    """
    Canonical basis plus B1' and B3'

    Rows 0..d/2-1 of each pair basis are the pair vectors, rows d/2..d-1 the
    Fourier completion states.
    """
    require_even_dimension(d)
    params = (params or default_params(d)).with_phases(d)
    half = d // 2
    labels = (PAIR_PLUS,) * half + (COMPLETION,) * half
    built = []
    for name, shift in (("B1p", 0), ("B3p", 1)):
        rows = np.vstack([
            _pair_plus_rows(d, shift, params.a, params.b),
            np.array(fourier_completion(d, shift, params.phases, params.a, params.b)),
        ])
        built.append(OrthonormalBasis(name, rows, labels))
    return ThreeBasisSet(canonical(d), built[0], built[1], params, randomized=False)


def gram_schmidt(vectors, tol: float = 1e-10) -> List[np.ndarray]:
    """
    Modified Gram-Schmidt over complex vectors

    Args:
        vectors: Linearly independent vectors, processed in order
        tol: Residual norm below which the input counts as dependent

    Returns:
        Orthonormal vectors spanning the same space, first direction kept
    """
    basis: List[np.ndarray] = []
    for k, v in enumerate(vectors):
        w = np.array(v, dtype=np.complex128)
        for e in basis:
            w = w - np.vdot(e, w) * e
        norm = np.linalg.norm(w)
        if norm < tol:
            raise LinearlyDependent(f"vector {k} has residual norm {norm:.3e}")
        basis.append(w / norm)
    return basis


def _random_completion(rng: np.random.Generator, pair_rows: np.ndarray) -> np.ndarray:
    half, d = pair_rows.shape
    for attempt in range(MAX_REDRAWS):
        z = rng.standard_normal((half, d)) + 1j * rng.standard_normal((half, d))
        z = z - (z @ pair_rows.conj().T) @ pair_rows
        try:
            return np.array(gram_schmidt(z, tol=DRAW_RESIDUAL_TOL))
        except LinearlyDependent:
            logger.warning("completion draw %d degenerate, redrawing", attempt + 1)
    raise DegenerateDraw(f"no usable completion draw after {MAX_REDRAWS} attempts")


def random_three_bases(d: int, seed: SeedLike = None) -> ThreeBasisSet:
    """
    Randomized B1'/B3' for lifting likelihood degeneracies

    a is uniform on [0.3, 0.95] with b = sqrt(1 - a^2). Completion slots are
    random complex vectors projected off the pair vectors and
    Gram-Schmidt orthonormalized.
    """
    require_even_dimension(d)
    rng = make_rng(seed)
    a = float(rng.uniform(*RANDOM_A_RANGE))
    b = math.sqrt(1.0 - a * a)
    params = PairBasisParams(a, b, default_phases(d))
    half = d // 2
    labels = (PAIR_PLUS,) * half + (COMPLETION,) * half
    built = []
    for name, shift in (("B1p", 0), ("B3p", 1)):
        pair_rows = _pair_plus_rows(d, shift, a, b)
        built.append(OrthonormalBasis(name, np.vstack([pair_rows, _random_completion(rng, pair_rows)]), labels))
    return ThreeBasisSet(canonical(d), built[0], built[1], params, randomized=True)


def check_orthonormal(basis, tol: float = ORTHO_TOL) -> bool:
    """True iff the largest entry of |V V^H - I| is below tol"""
    v = basis.vectors if isinstance(basis, OrthonormalBasis) else np.asarray(basis)
    gram = v @ v.conj().T
    return bool(np.max(np.abs(gram - np.eye(v.shape[0]))) < tol)


# ============================================
# Support adaptation
# ============================================

@dataclass(frozen=True, eq=False)
class SupportAdaptedBases:
    """Three-basis set on the subspace spanned by `indices` of the full space"""
    dimension: int
    indices: Tuple[int, ...]
    bases: ThreeBasisSet

    def restrict(self, state: PureState) -> PureState:
        return make_state(state.amplitudes[list(self.indices)])

    def embed(self, state: PureState) -> PureState:
        full = np.zeros(self.dimension, dtype=np.complex128)
        full[list(self.indices)] = state.amplitudes
        return make_state(full)

    def embedded_vectors(self, name: str) -> np.ndarray:
        """Rows of basis `name` written in the full-dimensional index space"""
        sub = self.bases.by_name(name).vectors
        full = np.zeros((sub.shape[0], self.dimension), dtype=np.complex128)
        full[:, list(self.indices)] = sub
        return full


def adapt_to_support(
    arc: Sequence[int],
    dimension: int,
    seed: SeedLike = None,
    params: Optional[PairBasisParams] = None,
) -> SupportAdaptedBases:
    """
    Build three bases on the subspace of a contiguous arc

    An odd arc is padded with the next index after its end (a zero index,
    since arcs are maximal). With a seed the subspace bases are randomized.

    Args:
        arc: Cyclically contiguous indices, in order
        dimension: Full dimension d
        seed: Optional seed for randomized bases
        params: Pair parameters for the deterministic construction

    Returns:
        SupportAdaptedBases
    """
    indices = [int(i) % dimension for i in arc]
    if len(indices) % 2:
        pad = (indices[-1] + 1) % dimension
        if pad in indices:
            pad = (indices[0] - 1) % dimension
        indices.append(pad)
    if len(indices) < 4:
        raise SubspaceTooSmall(f"arc {tuple(arc)} pads to {len(indices)} < 4 indices")

    sub_d = len(indices)
    if seed is not None:
        bases = random_three_bases(sub_d, seed)
    else:
        sub_params = None if params is None else PairBasisParams(params.a, params.b)
        bases = three_bases(sub_d, sub_params)
    return SupportAdaptedBases(dimension, tuple(indices), bases)
