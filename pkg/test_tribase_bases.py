"""
Tests for basis construction
Pair bases, Fourier completion, randomized bases and support adaptation
"""
import math

import numpy as np
import pytest

from tribase_bases import (
    COMPLETION,
    PAIR_PLUS,
    RANDOM_A_RANGE,
    PairBasisParams,
    ThreeBasisSet,
    adapt_to_support,
    canonical,
    check_orthonormal,
    default_phases,
    five_bases,
    fourier_completion,
    gram_schmidt,
    random_three_bases,
    three_bases,
)
from tribase_errors import (
    InvalidParams,
    LinearlyDependent,
    SchemaError,
    SubspaceTooSmall,
    UnsupportedDimension,
)

H = 1 / math.sqrt(2)


def _contains(basis, vector, tol=1e-12):
    return any(np.allclose(row, vector, atol=tol) for row in basis.vectors)


def _projector(rows):
    rows = np.asarray(rows)
    return rows.T @ rows.conj()


def test_canonical_is_identity():
    assert np.array_equal(canonical(4).vectors, np.eye(4))
    with pytest.raises(UnsupportedDimension):
        canonical(5)


def test_five_bases_at_equal_amplitudes():
    b1, b2, b3, b4 = five_bases(4)
    for row in ([1, 1, 0, 0], [1, -1, 0, 0], [0, 0, 1, 1], [0, 0, 1, -1]):
        assert _contains(b1, np.array(row) * H)
    assert _contains(b3, np.array([1, 0, 0, 1]) * H)
    assert _contains(b2, np.array([1, 1j, 0, 0]) * H)
    assert _contains(b2, np.array([1, -1j, 0, 0]) * H)
    assert _contains(b4, np.array([1j, 0, 0, 1]) * H)


def test_five_bases_are_orthonormal():
    params = PairBasisParams(0.6, 0.8)
    for d in (4, 6, 8):
        for basis in five_bases(d, params):
            assert check_orthonormal(basis)


def test_pair_params_validation():
    with pytest.raises(InvalidParams):
        PairBasisParams(0.6, 0.6)
    with pytest.raises(InvalidParams):
        PairBasisParams(1.0, 0.0)
    with pytest.raises(InvalidParams):
        PairBasisParams(0.6, 0.8, (0.0,)).with_phases(8)


def test_default_phases_chirp():
    assert default_phases(8) == pytest.approx((0.0, math.pi / 4, 3 * math.pi / 4, 3 * math.pi / 2))


def test_fourier_completion_first_state():
    phi = fourier_completion(4, 0, (0.0, 0.0))
    assert np.allclose(phi[0], [0.5, -0.5, 0.5, -0.5])


def test_fourier_completion_is_orthogonal_to_pair_vectors():
    a, b = 0.6, 0.8
    for d in (4, 6, 8, 12):
        for shift in (0, 1):
            completion = fourier_completion(d, shift, default_phases(d), a, b)
            for nu in range(d // 2):
                pair = np.zeros(d, dtype=complex)
                pair[(2 * nu + shift) % d] = a
                pair[(2 * nu + 1 + shift) % d] = b
                for phi in completion:
                    assert abs(np.vdot(phi, pair)) < 1e-12


def test_three_bases_layout():
    bases = three_bases(4)
    assert bases.b1p.labels == (PAIR_PLUS, PAIR_PLUS, COMPLETION, COMPLETION)
    assert np.allclose(bases.b1p.vectors[0], [H, H, 0, 0])
    assert np.allclose(bases.b1p.vectors[1], [0, 0, H, H])
    assert _contains(bases.b3p, np.array([0, 1, 1, 0]) * H)
    assert _contains(bases.b3p, np.array([1, 0, 0, 1]) * H)
    assert not bases.randomized


def test_three_bases_are_orthonormal():
    for d in (4, 6, 8, 10, 12):
        for params in (None, PairBasisParams(0.6, 0.8), PairBasisParams(0.28, math.sqrt(1 - 0.28 ** 2))):
            bases = three_bases(d, params)
            for basis in bases.bases():
                assert check_orthonormal(basis)


def test_completion_span_does_not_depend_on_phases():
    d = 8
    rng = np.random.default_rng(3)
    pinned = _projector(fourier_completion(d, 0, (0.0,) * (d // 2)))
    for _ in range(5):
        phases = tuple(rng.uniform(0, 2 * np.pi, d // 2))
        assert np.allclose(_projector(fourier_completion(d, 0, phases)), pinned, atol=1e-12)

    antisymmetric = []
    for n in range(d // 2):
        v = np.zeros(d, dtype=complex)
        v[2 * n], v[2 * n + 1] = H, -H
        antisymmetric.append(v)
    assert np.allclose(pinned, _projector(antisymmetric), atol=1e-12)


def test_gram_schmidt_examples():
    out = gram_schmidt([[1, 0], [1, 1]])
    assert np.allclose(out[0], [1, 0])
    assert np.allclose(out[1], [0, 1])

    out = gram_schmidt([[1, 1j], [1, 0]])
    assert np.allclose(out[0], np.array([1, 1j]) * H)
    assert abs(np.vdot(out[0], out[1])) < 1e-12

    with pytest.raises(LinearlyDependent):
        gram_schmidt([[1, 0], [2, 0]])


def test_random_three_bases_structure():
    for seed in range(200):
        bases = random_three_bases(8, seed)
        assert bases.randomized
        a, b = bases.params.a, bases.params.b
        assert RANDOM_A_RANGE[0] <= a <= RANDOM_A_RANGE[1]
        assert a ** 2 + b ** 2 == pytest.approx(1.0, abs=1e-12)
        for basis in (bases.b1p, bases.b3p):
            assert check_orthonormal(basis)
        assert np.allclose(bases.b1p.vectors[0], [a, b, 0, 0, 0, 0, 0, 0])
        assert np.allclose(bases.b3p.vectors[3], [b, 0, 0, 0, 0, 0, 0, a])


def test_random_three_bases_seeding():
    first = random_three_bases(6, 11)
    again = random_three_bases(6, 11)
    other = random_three_bases(6, 12)
    assert np.array_equal(first.b1p.vectors, again.b1p.vectors)
    assert not np.allclose(first.b1p.vectors, other.b1p.vectors)


def test_check_orthonormal_rejects_duplicates():
    v = np.eye(4, dtype=complex)
    v[3] = v[2]
    assert not check_orthonormal(v)


def test_basis_set_dict_restores_random_vectors():
    bases = random_three_bases(6, 5)
    restored = ThreeBasisSet.from_dict(bases.to_dict())
    assert restored.randomized
    assert np.allclose(restored.b1p.vectors, bases.b1p.vectors, atol=1e-15)
    assert np.allclose(restored.b3p.vectors, bases.b3p.vectors, atol=1e-15)
    assert restored.params.a == bases.params.a


def test_basis_set_dict_errors():
    data = random_three_bases(4, 1).to_dict()
    del data["vectors"]["B3p"]
    with pytest.raises(SchemaError):
        ThreeBasisSet.from_dict(data)

    data = random_three_bases(4, 1).to_dict()
    data["vectors"]["B1p"][3] = data["vectors"]["B1p"][2]
    with pytest.raises(SchemaError) as exc:
        ThreeBasisSet.from_dict(data)
    assert exc.value.location == "bases.vectors.B1p"


def test_adapt_to_support_even_arc():
    adapted = adapt_to_support((2, 3, 4, 5), 8)
    assert adapted.indices == (2, 3, 4, 5)
    assert adapted.bases.dimension == 4
    for name in ("B0", "B1p", "B3p"):
        rows = adapted.embedded_vectors(name)
        assert np.all(rows[:, [0, 1, 6, 7]] == 0)
        assert check_orthonormal(rows)


def test_adapt_to_support_pads_odd_arc():
    adapted = adapt_to_support((6, 7, 0, 1, 2), 8)
    assert adapted.indices == (6, 7, 0, 1, 2, 3)
    assert adapted.bases.dimension == 6


def test_adapt_to_support_too_small():
    with pytest.raises(SubspaceTooSmall):
        adapt_to_support((0, 1), 8)
    with pytest.raises(SubspaceTooSmall):
        adapt_to_support((5,), 8)


def test_adapt_to_support_randomized():
    adapted = adapt_to_support((0, 1, 2, 3), 6, seed=4)
    assert adapted.bases.randomized
    assert check_orthonormal(adapted.bases.b1p)
