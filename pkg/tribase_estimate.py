"""
Reconstruction for tribase
Pair correlators from measured frequencies, sign-candidate enumeration with
likelihood selection over the outcomes of B1' and B3', and the five-basis baseline
"""
import logging
import math
from dataclasses import dataclass, replace
from typing import Dict, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from tribase_bases import (
    COMPLETION,
    PAIR_PLUS,
    PairBasisParams,
    SupportAdaptedBases,
    ThreeBasisSet,
    default_params,
    random_three_bases,
    three_bases,
)
from tribase_config import (
    EXACT_EQUAL_TOL,
    EXACT_ZERO_EPS,
    MAX_ENUM_DIM,
    MAX_RETRIES,
    PROB_FLOOR,
    RADICAND_SLACK,
    REPORT_TOP,
    TIE_TOL,
    ZERO_COUNT_SCALE,
)
from tribase_errors import (
    AmbiguousSupport,
    DimensionMismatch,
    EmptyInput,
    EnumerationTooLarge,
    InvalidParams,
    RetriesExhausted,
    SchemaError,
)
from tribase_measure import (
    FIVE_BASIS_IDS,
    THREE_BASIS_IDS,
    CountRecord,
    Observation,
    ProbabilityVector,
    simulate_three_bases,
    to_frequencies,
)
from tribase_state import (
    PureState,
    ZeroPattern,
    classify_support,
    detect_equal_pairs,
    make_state,
)

logger = logging.getLogger(__name__)

# Sign vectors scored per vectorized block
CHUNK = 1 << 16
# Candidates closer than this to the top one count as the same state
DISTINCT_INFIDELITY = 1e-9


# ============================================
# Domain types
# ============================================

@dataclass(frozen=True, eq=False)
class LambdaChain:
    """
    Pair correlators Lambda_k = 2 c_k c*_{k+1}, k = 0..d-2

    im_mag holds |Im Lambda_k|; the sign is what candidates enumerate.
    wrap_re / wrap_im describe Lambda_{d-1} from the B3' pair (d-1, 0).
    """
    dimension: int
    re: np.ndarray
    im_mag: np.ndarray
    wrap_re: Optional[float] = None
    wrap_im: Optional[float] = None
    clamped_k: Tuple[int, ...] = ()

    def full_re(self) -> np.ndarray:
        wrap = np.nan if self.wrap_re is None else self.wrap_re
        return np.append(self.re, wrap)

    def full_im(self) -> np.ndarray:
        wrap = np.nan if self.wrap_im is None else self.wrap_im
        return np.append(self.im_mag, wrap)


SignVector = Tuple[int, ...]


@dataclass(frozen=True, eq=False)
class Candidate:
    state: PureState
    signs: SignVector
    loglik: Optional[float] = None


@dataclass(frozen=True)
class ReportFlags:
    """
    ambiguous_support: estimate covers one arc of a split support
    equal_pairs_detected: two disjoint canonical pairs have equal frequencies
    likelihood_tie: a distinct candidate scored within the tie tolerance of the top one
    clamped_k: links whose |Im Lambda| radicand went negative beyond slack
    """
    ambiguous_support: bool = False
    equal_pairs_detected: bool = False
    likelihood_tie: bool = False
    clamped_k: Tuple[int, ...] = ()


@dataclass(frozen=True, eq=False)
class EstimationReport:
    estimate: PureState
    chosen_signs: SignVector
    link_signs: Tuple[Tuple[int, int], ...]
    loglik_ranking: np.ndarray
    flags: ReportFlags
    bases: Optional[ThreeBasisSet]
    retries: int = 0
    attempt: int = 0
    tie_gap: float = math.inf
    method: str = "3bb"
    candidates: Tuple[Candidate, ...] = ()
    support: Tuple[int, ...] = ()


@dataclass(frozen=True, eq=False)
class CompletionCounts:
    """Scored basis vectors of B1' and B3' (rows) with their observed weights"""
    vectors: np.ndarray
    weights: np.ndarray


# ============================================
# Observation handling
# ============================================

def _index_observations(
    observations: Union[Sequence[Observation], Mapping[str, Observation]],
    required: Sequence[str],
    dimension: int,
) -> Dict[str, Observation]:
    obs = dict(observations) if isinstance(observations, Mapping) else {o.basis: o for o in observations}
    missing = [name for name in required if name not in obs]
    if missing:
        raise SchemaError(f"missing basis record(s) {missing}", "records")
    for name in required:
        if obs[name].dimension != dimension:
            raise DimensionMismatch(f"record {name} has {obs[name].dimension} outcomes, expected {dimension}")
    return obs


def _shots(obs: Dict[str, Observation], required: Sequence[str]) -> Optional[int]:
    """None for exact probabilities, else the canonical record's shot count"""
    kinds = {isinstance(obs[name], ProbabilityVector) for name in required}
    if len(kinds) > 1:
        raise SchemaError("cannot mix exact probabilities and counts", "records")
    if kinds == {True}:
        return None
    return int(obs["B0"].shots)


def _thresholds(shots: Optional[int], zero_eps: Optional[float], equal_tol: Optional[float]) -> Tuple[float, float]:
    if shots is None:
        eps, tol = EXACT_ZERO_EPS, EXACT_EQUAL_TOL
    else:
        eps = tol = ZERO_COUNT_SCALE / shots
    return (zero_eps if zero_eps is not None else eps, equal_tol if equal_tol is not None else tol)


def _weights(observation: Observation) -> np.ndarray:
    if isinstance(observation, CountRecord):
        return observation.counts.astype(float)
    return np.asarray(observation.entries, dtype=float)


def _collect_rows(observations, bases: ThreeBasisSet, kinds: Optional[str]) -> CompletionCounts:
    obs = _index_observations(observations, ("B1p", "B3p"), bases.dimension)
    vectors, weights = [], []
    for basis in (bases.b1p, bases.b3p):
        rows = basis.indices(kinds) if kinds else np.arange(basis.dimension)
        vectors.append(basis.vectors[rows])
        weights.append(_weights(obs[basis.name])[rows])
    return CompletionCounts(np.vstack(vectors), np.concatenate(weights))


def completion_counts(observations: Union[Sequence[Observation], Mapping[str, Observation]], bases: ThreeBasisSet) -> CompletionCounts:
    """Collect completion-vector rows and their counts (or probabilities) from B1' and B3'"""
    return _collect_rows(observations, bases, COMPLETION)


def likelihood_counts(observations: Union[Sequence[Observation], Mapping[str, Observation]], bases: ThreeBasisSet) -> CompletionCounts:
    """
    Every outcome of B1' and B3' with its counts (or probabilities)

    Pair-plus rows on chain links score the same for all candidates. The
    B3' pair (d-1, 0) is not a link on a full-support chain, so its row
    separates candidates, and each basis stays a normalized distribution.
    """
    return _collect_rows(observations, bases, None)


# ============================================
# Correlators
# ============================================

def lambda_real(canonical_freqs, pplus_freqs, params: PairBasisParams, shift: int) -> np.ndarray:
    """
    Re Lambda_k for the d/2 pairs (2v+shift, 2v+shift+1) of one pair basis

    Re Lambda_k = (p+ - a^2 q_k - b^2 q_{k+1}) / (ab), indices modulo d.

    Args:
        canonical_freqs: q, length d
        pplus_freqs: Pair-plus frequencies, one per v
        params: Pair amplitudes a, b
        shift: 0 for B1', 1 for B3'

    Returns:
        Array of d/2 values, entry v belongs to k = 2v + shift
    """
    ab = params.a * params.b
    if ab < 1e-6:
        raise InvalidParams(f"ab = {ab:.3e} is too small to invert")
    q = np.asarray(canonical_freqs, dtype=float)
    p = np.asarray(pplus_freqs, dtype=float)
    d = q.shape[0]
    k = 2 * np.arange(d // 2) + shift
    return (p - params.a ** 2 * q[k % d] - params.b ** 2 * q[(k + 1) % d]) / ab


def lambda_imag_magnitude(re_k: float, q_k: float, q_k1: float) -> float:
    """|Im Lambda_k| = sqrt(max(0, 4 q_k q_{k+1} - re_k^2))"""
    radicand = 4.0 * q_k * q_k1 - re_k * re_k
    if radicand < -RADICAND_SLACK:
        logger.debug("clamping radicand %.3e to zero", radicand)
    return math.sqrt(max(0.0, radicand))


def radicand_clamped(re_k: float, q_k: float, q_k1: float) -> bool:
    return 4.0 * q_k * q_k1 - re_k * re_k < -RADICAND_SLACK


def build_lambda_chain(canonical_freqs, b1p_plus, b3p_plus, params: PairBasisParams) -> LambdaChain:
    """
    Interleave the two pair bases into Lambda_0..Lambda_{d-1}

    Even k come from B1', odd k from B3'. Real parts are clipped to the
    bound 2 sqrt(q_k q_{k+1}); links whose radicand fell below the slack
    are listed in clamped_k.
    """
    q = np.asarray(canonical_freqs, dtype=float)
    d = q.shape[0]
    re = np.empty(d)
    re[0::2] = lambda_real(q, b1p_plus, params, 0)
    re[1::2] = lambda_real(q, b3p_plus, params, 1)

    q_next = np.roll(q, -1)
    clamped = tuple(int(k) for k in range(d) if radicand_clamped(re[k], q[k], q_next[k]))
    if clamped:
        logger.info("clamped |Im Lambda| at k=%s", list(clamped))
    bound = 2.0 * np.sqrt(q * q_next)
    re = np.clip(re, -bound, bound)
    im = np.sqrt(np.maximum(0.0, 4.0 * q * q_next - re * re))
    return LambdaChain(d, re[:-1], im[:-1], float(re[-1]), float(im[-1]), clamped)


# ============================================
# Chain solving
# ============================================

@dataclass(frozen=True, eq=False)
class _ChainPlan:
    """Phase chain along one arc: anchor at arc[0], link i joins arc[i] and arc[i+1]"""
    dimension: int
    arc: np.ndarray
    moduli: np.ndarray
    alpha: np.ndarray
    slots: np.ndarray
    links: Tuple[int, ...]


def _plan_chain(re_full: np.ndarray, im_full: np.ndarray, q: np.ndarray, pattern: ZeroPattern) -> _ChainPlan:
    d = pattern.dimension
    arc = pattern.arcs[0]
    links = tuple(arc[:-1])
    # the wrap link borrows the slot of a link that cannot occur on this arc
    wrap_slot = min(pattern.zero_indices) if pattern.zero_indices else d - 2
    slots = np.array([k if k < d - 1 else wrap_slot for k in links], dtype=np.int64)
    idx = list(links)
    alpha = np.arctan2(im_full[idx], re_full[idx]) if idx else np.zeros(0)
    if np.any(np.isnan(alpha)):
        raise EmptyInput("arc wraps through d-1 -> 0 but Lambda_{d-1} was not measured")
    arc_idx = np.array(arc, dtype=np.int64)
    return _ChainPlan(d, arc_idx, np.sqrt(q[arc_idx]), alpha, slots, links)


def _sign_rows(index, width: int) -> np.ndarray:
    """Sign vectors for enumeration indices, in itertools.product((1, -1)) order"""
    shifts = np.arange(width - 1, -1, -1, dtype=np.int64)
    bits = (np.asarray(index, dtype=np.int64)[:, None] >> shifts) & 1
    return (1 - 2 * bits).astype(np.int8)


def _amplitudes(plan: _ChainPlan, signs: np.ndarray) -> np.ndarray:
    """Unnormalized candidate amplitudes, one row per sign vector"""
    m = signs.shape[0]
    steps = -signs[:, plan.slots] * plan.alpha
    theta = np.concatenate([np.zeros((m, 1)), np.cumsum(steps, axis=1)], axis=1)
    amps = np.zeros((m, plan.dimension), dtype=np.complex128)
    amps[:, plan.arc] = plan.moduli * np.exp(1j * theta)
    return amps


def _loglik_rows(amps: np.ndarray, completion: CompletionCounts, floor: float) -> np.ndarray:
    overlaps = amps @ completion.vectors.conj().T
    return np.log(np.maximum(np.abs(overlaps) ** 2, floor)) @ completion.weights


def _support_pattern(q: np.ndarray, eps: float) -> ZeroPattern:
    pattern = classify_support(q, eps)
    if not pattern.arcs:
        raise EmptyInput("canonical record has no support above the zero threshold")
    if pattern.ambiguous:
        raise AmbiguousSupport(pattern)
    return pattern


def _check_enumerable(d: int) -> None:
    if d > MAX_ENUM_DIM:
        raise EnumerationTooLarge(f"d={d} needs 2^{d - 1} candidates; the cap is d <= {MAX_ENUM_DIM}")


def enumerate_candidates(chain: LambdaChain, canonical_freqs, eps: float = EXACT_ZERO_EPS) -> List[Candidate]:
    """
    All 2^(d-1) sign assignments solved into states

    Moduli are sqrt(q_k); phases start at 0 on the first index of the single
    nonzero arc and step by -arg(re_k + i s_k |Im_k|) along it. Duplicate
    states are kept, so the list length is always 2^(d-1).

    Raises:
        AmbiguousSupport: canonical frequencies split into two or more arcs
        EnumerationTooLarge: d above the configured cap
    """
    q = np.asarray(canonical_freqs, dtype=float)
    d = chain.dimension
    _check_enumerable(d)
    plan = _plan_chain(chain.full_re(), chain.full_im(), q, _support_pattern(q, eps))

    candidates = []
    total = 1 << (d - 1)
    for start in range(0, total, CHUNK):
        signs = _sign_rows(np.arange(start, min(start + CHUNK, total)), d - 1)
        for row, amps in zip(signs, _amplitudes(plan, signs)):
            candidates.append(Candidate(make_state(amps), tuple(int(s) for s in row)))
    return candidates


def log_likelihood(candidate: PureState, completion: CompletionCounts, floor: float = PROB_FLOOR) -> float:
    """Sum of f_j log(max(|<phi_j|candidate>|^2, floor)) over the scored rows"""
    if candidate.dimension != completion.vectors.shape[1]:
        raise DimensionMismatch(f"candidate has d={candidate.dimension}, completion vectors have d={completion.vectors.shape[1]}")
    return float(_loglik_rows(candidate.amplitudes[None, :], completion, floor)[0])


def _score_all(plan: _ChainPlan, completion: CompletionCounts, floor: float) -> np.ndarray:
    width = plan.dimension - 1
    total = 1 << width
    lls = np.empty(total)
    for start in range(0, total, CHUNK):
        stop = min(start + CHUNK, total)
        lls[start:stop] = _loglik_rows(_amplitudes(plan, _sign_rows(np.arange(start, stop), width)), completion, floor)
    return lls


def _tie_gap(plan: _ChainPlan, order: np.ndarray, lls: np.ndarray, top: np.ndarray) -> float:
    """Log-likelihood gap from the top candidate to the best distinct one"""
    top = top / np.linalg.norm(top)
    width = plan.dimension - 1
    for start in range(1, order.shape[0], CHUNK):
        idx = order[start:start + CHUNK]
        amps = _amplitudes(plan, _sign_rows(idx, width))
        fid = np.abs(amps @ top.conj()) ** 2 / np.sum(np.abs(amps) ** 2, axis=1)
        distinct = np.flatnonzero(1.0 - fid > DISTINCT_INFIDELITY)
        if distinct.size:
            return float(lls[order[0]] - lls[idx[distinct[0]]])
    return math.inf


# ============================================
# Three-basis estimation
# ============================================

def estimate_3bb(
    observations: Union[Sequence[Observation], Mapping[str, Observation]],
    bases: ThreeBasisSet,
    zero_eps: Optional[float] = None,
    equal_tol: Optional[float] = None,
    floor: float = PROB_FLOOR,
    tie_tol: float = TIE_TOL,
) -> EstimationReport:
    """
    Estimate a pure state from B0, B1' and B3' observations

    Args:
        observations: CountRecords or exact ProbabilityVectors for the three bases
        bases: The basis set the observations were measured in
        zero_eps: Zero threshold override (default 1e-10 exact, 0.5/N counts)
        equal_tol: Equal-pair tolerance override
        floor: Probability floor inside the log-likelihood
        tie_tol: Gap below which the top two distinct candidates tie

    Returns:
        EstimationReport for the maximum-likelihood candidate

    Raises:
        AmbiguousSupport: canonical frequencies split into two or more arcs
    """
    d = bases.dimension
    obs = _index_observations(observations, THREE_BASIS_IDS, d)
    eps, eq_tol = _thresholds(_shots(obs, THREE_BASIS_IDS), zero_eps, equal_tol)
    freqs = {name: to_frequencies(obs[name]).entries for name in THREE_BASIS_IDS}

    q = freqs["B0"]
    pattern = _support_pattern(q, eps)
    _check_enumerable(d)
    equal_pairs = detect_equal_pairs(q, eq_tol)

    chain = build_lambda_chain(
        q,
        freqs["B1p"][bases.b1p.indices(PAIR_PLUS)],
        freqs["B3p"][bases.b3p.indices(PAIR_PLUS)],
        bases.params,
    )
    plan = _plan_chain(chain.full_re(), chain.full_im(), q, pattern)
    lls = _score_all(plan, likelihood_counts(obs, bases), floor)

    # best first, ties to the lexicographically smallest sign vector
    index = np.arange(lls.shape[0])
    order = np.lexsort((-index, -lls))
    top_signs = _sign_rows(order[:REPORT_TOP], d - 1)
    top_amps = _amplitudes(plan, top_signs)
    candidates = tuple(
        Candidate(make_state(amps), tuple(int(s) for s in signs), float(lls[i]))
        for signs, amps, i in zip(top_signs, top_amps, order[:REPORT_TOP])
    )

    gap = _tie_gap(plan, order, lls, top_amps[0])
    tie = gap < tie_tol
    if tie:
        logger.info("likelihood tie at d=%d, gap %.3e", d, gap)

    chosen = candidates[0].signs
    flags = ReportFlags(
        equal_pairs_detected=equal_pairs,
        likelihood_tie=tie,
        clamped_k=chain.clamped_k,
    )
    return EstimationReport(
        estimate=candidates[0].state,
        chosen_signs=chosen,
        link_signs=tuple((k, chosen[slot]) for k, slot in zip(plan.links, plan.slots)),
        loglik_ranking=lls[order],
        flags=flags,
        bases=bases,
        tie_gap=gap,
        candidates=candidates,
    )


def estimate_on_support(
    observations: Union[Sequence[Observation], Mapping[str, Observation]],
    adapted: SupportAdaptedBases,
    **kwargs,
) -> EstimationReport:
    """
    Run estimate_3bb inside an arc's subspace and embed the result

    Observations are indexed by the subspace bases. Signs and links stay in
    subspace numbering; `support` maps them back to full indices.
    """
    report = estimate_3bb(observations, adapted.bases, **kwargs)
    return replace(
        report,
        estimate=adapted.embed(report.estimate),
        flags=replace(report.flags, ambiguous_support=True),
        support=adapted.indices,
    )


def attempt_seeds(seed: int, attempt: int) -> Tuple[np.random.SeedSequence, np.random.SeedSequence]:
    """(basis seed, measurement seed) of retry attempt r; attempt 0 only measures"""
    basis_seed, measure_seed = np.random.SeedSequence([seed, attempt]).spawn(2)
    return basis_seed, measure_seed


def _accepted(report: EstimationReport, randomized: bool, proactive: bool) -> bool:
    if report.flags.likelihood_tie:
        return False
    return randomized or not (proactive and report.flags.equal_pairs_detected)


def estimate_3bb_with_retry(
    source: Union[PureState, Sequence[Observation]],
    seed: int = 0,
    shots: Optional[int] = None,
    bases: Optional[ThreeBasisSet] = None,
    params: Optional[PairBasisParams] = None,
    max_retries: int = MAX_RETRIES,
    proactive: bool = True,
    **kwargs,
) -> EstimationReport:
    """
    Estimate with re-randomized bases when the likelihood cannot decide

    A PureState source is measured with `shots` per basis (exact probabilities
    when shots is None) and re-measured in random_three_bases on equal canonical
    pairs (if proactive) or a likelihood tie. Attempt r draws its bases and its
    counts from attempt_seeds(seed, r). A randomized attempt is accepted
    unless it ties.

    Recorded observations cannot be re-measured: a tie raises immediately.

    Raises:
        RetriesExhausted: carries the attempt with the widest tie gap
    """
    if not isinstance(source, PureState):
        records = list(source)
        d = next((o.dimension for o in records if o.basis == "B0"), None)
        if d is None:
            raise SchemaError("missing basis record(s) ['B0']", "records")
        report = estimate_3bb(records, bases or three_bases(d, params), **kwargs)
        if report.flags.likelihood_tie:
            raise RetriesExhausted(report, "likelihood tie on recorded counts; re-measurement is not possible")
        return report

    d = source.dimension
    first = bases or three_bases(d, params)
    report = estimate_3bb(simulate_three_bases(source, first, shots, attempt_seeds(seed, 0)[1]), first, **kwargs)
    if _accepted(report, first.randomized, proactive):
        return report

    attempts = [report]
    for attempt in range(1, max_retries + 1):
        reason = "tie" if attempts[-1].flags.likelihood_tie else "equal canonical pairs"
        logger.info("retry %d/%d with randomized bases (%s)", attempt, max_retries, reason)
        basis_seed, measure_seed = attempt_seeds(seed, attempt)
        randomized = random_three_bases(d, basis_seed)
        report = estimate_3bb(simulate_three_bases(source, randomized, shots, measure_seed), randomized, **kwargs)
        report = replace(report, retries=attempt, attempt=attempt)
        if _accepted(report, True, proactive):
            return report
        attempts.append(report)

    untied = [r for r in attempts if not r.flags.likelihood_tie]
    if untied:
        return replace(untied[0], retries=max_retries)
    best = max(attempts, key=lambda r: r.tie_gap)
    logger.warning("likelihood tie persists after %d retries", max_retries)
    raise RetriesExhausted(replace(best, retries=max_retries))


# ============================================
# Five-basis baseline
# ============================================

def five_basis_lambdas(canonical_freqs, pair_freqs: Mapping[str, np.ndarray], params: PairBasisParams) -> Tuple[np.ndarray, np.ndarray]:
    """
    Signed Lambda_0..Lambda_{d-1} from the four pair bases

    With plus/minus vectors a|x> + w b|y> and b|x> - w a|y>:
    Re Lambda = [(p+ - p-) - (a^2 - b^2)(q_x - q_y)] / (2ab)
    Im Lambda = -[(p~+ - p~-) - (a^2 - b^2)(q_x - q_y)] / (2ab)
    """
    ab2 = 2.0 * params.a * params.b
    if ab2 < 2e-6:
        raise InvalidParams(f"ab = {ab2 / 2:.3e} is too small to invert")
    q = np.asarray(canonical_freqs, dtype=float)
    d = q.shape[0]
    spread = params.a ** 2 - params.b ** 2
    re, im = np.empty(d), np.empty(d)
    for shift, real_name, imag_name in ((0, "B1", "B2"), (1, "B3", "B4")):
        k = 2 * np.arange(d // 2) + shift
        bias = spread * (q[k % d] - q[(k + 1) % d])
        p, pt = pair_freqs[real_name], pair_freqs[imag_name]
        re[k] = ((p[0::2] - p[1::2]) - bias) / ab2
        im[k] = -((pt[0::2] - pt[1::2]) - bias) / ab2
    return re, im


def _five_basis_solution(observations, params, zero_eps, equal_tol):
    values = list(observations.values()) if isinstance(observations, Mapping) else list(observations)
    if not values:
        raise EmptyInput("no observations")
    d = values[0].dimension
    obs = _index_observations(observations, FIVE_BASIS_IDS, d)
    eps, eq_tol = _thresholds(_shots(obs, FIVE_BASIS_IDS), zero_eps, equal_tol)
    freqs = {name: to_frequencies(obs[name]).entries for name in FIVE_BASIS_IDS}
    q = freqs["B0"]
    pattern = _support_pattern(q, eps)
    re, im = five_basis_lambdas(q, freqs, params or default_params(d))
    plan = _plan_chain(re, im, q, pattern)
    amps = _amplitudes(plan, np.ones((1, d - 1), dtype=np.int8))[0]
    link_signs = tuple((k, 1 if im[k] >= 0 else -1) for k in plan.links)
    return make_state(amps), link_signs, detect_equal_pairs(q, eq_tol)


def estimate_5bb(
    observations: Union[Sequence[Observation], Mapping[str, Observation]],
    params: Optional[PairBasisParams] = None,
    zero_eps: Optional[float] = None,
) -> PureState:
    """
    Solve the chain directly from B0 and the four pair bases

    Needs no enumeration: Im Lambda_k is measured with its sign.
    """
    return _five_basis_solution(observations, params, zero_eps, None)[0]


def estimate_5bb_report(
    observations: Union[Sequence[Observation], Mapping[str, Observation]],
    params: Optional[PairBasisParams] = None,
    zero_eps: Optional[float] = None,
) -> EstimationReport:
    """estimate_5bb wrapped in a report, with the measured Im signs as link signs"""
    state, link_signs, equal_pairs = _five_basis_solution(observations, params, zero_eps, None)
    signs = [1] * (state.dimension - 1)
    for k, s in link_signs:
        if k < state.dimension - 1:
            signs[k] = s
    return EstimationReport(
        estimate=state,
        chosen_signs=tuple(signs),
        link_signs=link_signs,
        loglik_ranking=np.zeros(0),
        flags=ReportFlags(equal_pairs_detected=equal_pairs),
        bases=None,
        method="5bb",
    )


# ============================================
# Serialization
# ============================================

def _complex_pairs(values) -> List[List[float]]:
    return [[float(z.real), float(z.imag)] for z in values]


def report_to_dict(report: EstimationReport, top: int = REPORT_TOP) -> Dict:
    """JSON-ready report with the log-likelihood ranking cut to `top` entries"""
    doc = {
        "method": report.method,
        "dimension": report.estimate.dimension,
        "estimate": _complex_pairs(report.estimate.amplitudes),
        "chosen_signs": list(report.chosen_signs),
        "link_signs": [[int(k), int(s)] for k, s in report.link_signs],
        "loglik_ranking": [float(v) for v in report.loglik_ranking[:top]],
        "flags": {
            "ambiguous_support": report.flags.ambiguous_support,
            "equal_pairs_detected": report.flags.equal_pairs_detected,
            "likelihood_tie": report.flags.likelihood_tie,
            "clamped_k": list(report.flags.clamped_k),
        },
        "retries": report.retries,
        "tie_gap": None if math.isinf(report.tie_gap) else report.tie_gap,
    }
    if report.support:
        doc["support"] = list(report.support)
    if report.bases is not None:
        doc["bases"] = report.bases.to_dict() if report.bases.randomized else {
            "dimension": report.bases.dimension,
            "a": report.bases.params.a,
            "b": report.bases.params.b,
            "phases": list(report.bases.params.phases),
            "randomized": False,
        }
    return doc
