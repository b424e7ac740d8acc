"""
Measurement simulation for tribase
Exact transition probabilities, multinomial shot sampling and the counts-file codec
"""
import json
from dataclasses import dataclass
from typing import Dict, List, Literal, Optional, Sequence, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from tribase_bases import OrthonormalBasis, PairBasisParams, ThreeBasisSet, five_bases, canonical, three_bases
from tribase_errors import DimensionMismatch, InvalidParams, SchemaError
from tribase_state import PureState, SeedLike, make_rng


@dataclass(frozen=True, eq=False)
class ProbabilityVector:
    """Outcome distribution over the vectors of one basis"""
    basis: str
    entries: np.ndarray

    @property
    def dimension(self) -> int:
        return self.entries.shape[0]


@dataclass(frozen=True, eq=False)
class CountRecord:
    """Outcome counts of N projective measurements in one basis"""
    basis: str
    counts: np.ndarray
    shots: int

    def __post_init__(self):
        if self.shots < 1:
            raise SchemaError("shots must be >= 1", f"{self.basis}.shots")
        if np.any(self.counts < 0):
            raise SchemaError("counts must be nonnegative", f"{self.basis}.counts")

    @property
    def dimension(self) -> int:
        return self.counts.shape[0]


Observation = Union[CountRecord, ProbabilityVector]


def exact_probs(state: PureState, basis: OrthonormalBasis) -> ProbabilityVector:
    """Entry j is |<basis_j|psi>|^2"""
    if state.dimension != basis.dimension:
        raise DimensionMismatch(f"state has d={state.dimension}, basis {basis.name} has d={basis.dimension}")
    amps = basis.vectors.conj() @ state.amplitudes
    return ProbabilityVector(basis.name, np.abs(amps) ** 2)


def sample_counts(probs: ProbabilityVector, shots: int, seed: SeedLike = None) -> CountRecord:
    """
    Multinomial draw of `shots` outcomes

    Args:
        probs: Exact outcome distribution
        shots: Ensemble size N >= 1
        seed: RNG seed or Generator

    Returns:
        CountRecord with sum(counts) == shots
    """
    if shots < 1:
        raise SchemaError("shots must be >= 1", "shots")
    p = np.clip(probs.entries, 0.0, None)
    p = p / p.sum()
    counts = make_rng(seed).multinomial(shots, p)
    return CountRecord(probs.basis, counts.astype(np.int64), int(shots))


def to_frequencies(observation: Observation) -> ProbabilityVector:
    """Entry j is n_j / N. Probability vectors pass through unchanged."""
    if isinstance(observation, ProbabilityVector):
        return observation
    return ProbabilityVector(observation.basis, observation.counts / observation.shots)


def _observe(state: PureState, bases: Sequence[OrthonormalBasis], shots: Optional[int], seed: SeedLike) -> List[Observation]:
    probs = [exact_probs(state, basis) for basis in bases]
    if shots is None:
        return probs
    rng = make_rng(seed)
    return [sample_counts(p, shots, rng) for p in probs]


def simulate_three_bases(state: PureState, bases: ThreeBasisSet, shots: Optional[int], seed: SeedLike = None) -> List[Observation]:
    """
    Measure B0, B1' and B3' with N shots each (total 3N)

    shots=None returns exact probabilities instead of counts.
    """
    return _observe(state, bases.bases(), shots, seed)


def simulate_five_bases(state: PureState, params: Optional[PairBasisParams], shots: Optional[int], seed: SeedLike = None) -> List[Observation]:
    """Measure B0 and B1..B4 with N shots each (total 5N)"""
    d = state.dimension
    return _observe(state, [canonical(d)] + five_bases(d, params), shots, seed)


def observations_by_basis(observations: Sequence[Observation]) -> Dict[str, Observation]:
    return {obs.basis: obs for obs in observations}


# ============================================
# Counts file (JSON)
# ============================================

BasisId = Literal["B0", "B1p", "B3p", "B1", "B2", "B3", "B4"]
THREE_BASIS_IDS = ("B0", "B1p", "B3p")
FIVE_BASIS_IDS = ("B0", "B1", "B2", "B3", "B4")


class BasisParamsModel(BaseModel):
    model_config = ConfigDict(extra="forbid")

    a: float
    b: float
    phases: List[float] = []


class RecordModel(BaseModel):
    model_config = ConfigDict(extra="forbid")

    basis: BasisId
    counts: List[int]
    shots: int = Field(ge=1)

    @model_validator(mode="after")
    def _shots_match(self):
        if any(n < 0 for n in self.counts):
            raise ValueError("counts must be nonnegative")
        if sum(self.counts) != self.shots:
            raise ValueError(f"counts sum to {sum(self.counts)} but shots is {self.shots}")
        return self


class CountsFileModel(BaseModel):
    """Schema of a counts document, simulated or measured"""
    model_config = ConfigDict(extra="forbid")

    dimension: int
    basis_params: BasisParamsModel
    records: List[RecordModel]
    bases: Optional[dict] = None

    @model_validator(mode="after")
    def _records_complete(self):
        names = [r.basis for r in self.records]
        if len(set(names)) != len(names):
            raise ValueError("duplicate basis record")
        if set(names) not in (set(THREE_BASIS_IDS), set(FIVE_BASIS_IDS)):
            raise ValueError(
                f"records must cover {list(THREE_BASIS_IDS)} or {list(FIVE_BASIS_IDS)}, got {names}"
            )
        for r in self.records:
            if len(r.counts) != self.dimension:
                raise ValueError(f"record {r.basis} has {len(r.counts)} counts, expected {self.dimension}")
        return self


@dataclass(frozen=True, eq=False)
class CountsDocument:
    dimension: int
    params: PairBasisParams
    records: List[CountRecord]
    bases: Optional[ThreeBasisSet] = None

    @property
    def method(self) -> str:
        return "3bb" if {r.basis for r in self.records} == set(THREE_BASIS_IDS) else "5bb"

    def three_basis_set(self) -> ThreeBasisSet:
        return self.bases if self.bases is not None else three_bases(self.dimension, self.params)


def parse_counts_document(data: Dict) -> CountsDocument:
    """
    Validate a decoded counts document

    Raises:
        SchemaError: with the dotted field path of the first problem
    """
    try:
        model = CountsFileModel.model_validate(data)
    except ValidationError as e:
        err = e.errors()[0]
        location = ".".join(str(part) for part in err["loc"]) or "document"
        raise SchemaError(err["msg"], location)

    try:
        params = PairBasisParams(model.basis_params.a, model.basis_params.b, tuple(model.basis_params.phases))
        params = params.with_phases(model.dimension)
    except InvalidParams as e:
        raise SchemaError(str(e), "basis_params")

    records = [CountRecord(r.basis, np.array(r.counts, dtype=np.int64), r.shots) for r in model.records]
    bases = ThreeBasisSet.from_dict(model.bases) if model.bases is not None else None
    if bases is not None and bases.dimension != model.dimension:
        raise SchemaError("bases dimension differs from document dimension", "bases.dimension")
    return CountsDocument(model.dimension, params, records, bases)


def load_counts_file(path: str) -> CountsDocument:
    with open(path, "r", encoding="utf-8") as f:
        text = f.read()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise SchemaError(e.msg, f"line {e.lineno}")
    return parse_counts_document(data)


def counts_document_dict(
    dimension: int,
    params: PairBasisParams,
    records: Sequence[CountRecord],
    bases: Optional[ThreeBasisSet] = None,
) -> Dict:
    doc = {
        "dimension": dimension,
        "basis_params": {"a": params.a, "b": params.b, "phases": list(params.phases)},
        "records": [
            {"basis": r.basis, "counts": [int(n) for n in r.counts], "shots": int(r.shots)}
            for r in records
        ],
    }
    # randomized completion vectors are not recoverable from a, b and phases
    if bases is not None and bases.randomized:
        doc["bases"] = bases.to_dict()
    return doc


def write_counts_file(path: str, dimension: int, params: PairBasisParams, records: Sequence[CountRecord], bases: Optional[ThreeBasisSet] = None) -> None:
    with open(path, "w", encoding="utf-8") as f:
        json.dump(counts_document_dict(dimension, params, records, bases), f, indent=2)
        f.write("\n")
