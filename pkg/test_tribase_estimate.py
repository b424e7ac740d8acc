"""
Tests for reconstruction
Correlators, candidate enumeration, likelihood selection, retries and the
five-basis baseline
"""
import json
import math

import numpy as np
import pytest

from tribase_bases import (
    PAIR_PLUS,
    PairBasisParams,
    adapt_to_support,
    random_three_bases,
    three_bases,
)
from tribase_errors import (
    AmbiguousSupport,
    EnumerationTooLarge,
    InvalidParams,
    RetriesExhausted,
    SchemaError,
)
from tribase_estimate import (
    build_lambda_chain,
    completion_counts,
    enumerate_candidates,
    estimate_3bb,
    estimate_3bb_with_retry,
    estimate_5bb,
    estimate_5bb_report,
    estimate_on_support,
    five_basis_lambdas,
    lambda_imag_magnitude,
    lambda_real,
    likelihood_counts,
    log_likelihood,
    radicand_clamped,
    report_to_dict,
)
from tribase_measure import (
    CountRecord,
    ProbabilityVector,
    exact_probs,
    simulate_five_bases,
    simulate_three_bases,
)
from tribase_state import haar_random, infidelity, make_state, slit_qudit_state

H = 1 / math.sqrt(2)


def _chain(state, bases):
    obs = {o.basis: o.entries for o in simulate_three_bases(state, bases, None)}
    return build_lambda_chain(
        obs["B0"],
        obs["B1p"][bases.b1p.indices(PAIR_PLUS)],
        obs["B3p"][bases.b3p.indices(PAIR_PLUS)],
        bases.params,
    ), obs["B0"]


def _true_lambda(state, k):
    c = state.amplitudes
    return 2 * c[k] * np.conj(c[(k + 1) % state.dimension])


def _blind_completion(state, bases):
    """Exact observations with every candidate-dependent outcome zeroed: the completion rows and the B3' wrap pair"""
    observations = []
    for obs in simulate_three_bases(state, bases, None):
        entries = obs.entries.copy()
        if obs.basis != "B0":
            entries[bases.by_name(obs.basis).indices("completion")] = 0.0
        if obs.basis == "B3p":
            entries[bases.b3p.indices(PAIR_PLUS)[-1]] = 0.0
        observations.append(ProbabilityVector(obs.basis, entries))
    return observations


# Correlators

def test_lambda_real_examples():
    params = PairBasisParams(H, H)
    assert lambda_real([0.25] * 4, [0.5, 0.5], params, 0) == pytest.approx([0.5, 0.5])
    assert lambda_real([0.5, 0.5, 0, 0], [0.5, 0.0], params, 0)[0] == pytest.approx(0.0, abs=1e-12)


def test_lambda_real_matches_true_correlator():
    rng = np.random.default_rng(21)
    for _ in range(100):
        d = int(rng.choice([4, 6, 8, 12]))
        a = rng.uniform(0.3, 0.95)
        bases = three_bases(d, PairBasisParams(a, math.sqrt(1 - a * a)))
        state = haar_random(d, rng)
        q = exact_probs(state, bases.canonical).entries
        for shift, basis in ((0, bases.b1p), (1, bases.b3p)):
            plus = exact_probs(state, basis).entries[basis.indices(PAIR_PLUS)]
            re = lambda_real(q, plus, bases.params, shift)
            for v, value in enumerate(re):
                assert abs(value - _true_lambda(state, 2 * v + shift).real) < 1e-10


def test_lambda_real_rejects_tiny_ab():
    params = PairBasisParams(1e-7, math.sqrt(1 - 1e-14))
    with pytest.raises(InvalidParams):
        lambda_real([0.25] * 4, [0.5, 0.5], params, 0)


def test_lambda_imag_magnitude_examples():
    assert lambda_imag_magnitude(0.5, 0.25, 0.25) == pytest.approx(0.0, abs=1e-12)
    assert lambda_imag_magnitude(0.0, 0.25, 0.25) == pytest.approx(0.5)
    assert lambda_imag_magnitude(0.1, 0.0, 0.0) == 0.0
    assert radicand_clamped(0.1, 0.0, 0.0)
    assert not radicand_clamped(0.0, 0.25, 0.25)


def test_chain_magnitudes_match_truth():
    state = haar_random(8, seed=13)
    chain, _ = _chain(state, three_bases(8))
    for k in range(7):
        true = _true_lambda(state, k)
        assert chain.re[k] == pytest.approx(true.real, abs=1e-10)
        assert chain.im_mag[k] == pytest.approx(abs(true.imag), abs=1e-6)
    assert chain.wrap_re == pytest.approx(_true_lambda(state, 7).real, abs=1e-10)
    assert chain.clamped_k == ()


# Candidates

def test_candidate_count():
    chain, q = _chain(haar_random(4, seed=1), three_bases(4))
    assert len(enumerate_candidates(chain, q)) == 8


def test_candidates_contain_both_conjugate_phases():
    state = make_state([1, 1j, 0, 0])
    chain, q = _chain(state, three_bases(4))
    states = [c.state for c in enumerate_candidates(chain, q)]
    for target in (make_state([1, 1j, 0, 0]), make_state([1, -1j, 0, 0])):
        assert any(infidelity(s, target) < 1e-12 for s in states)


def test_all_real_chain_gives_one_state():
    state = make_state(np.ones(4))
    chain, q = _chain(state, three_bases(4))
    states = [c.state for c in enumerate_candidates(chain, q)]
    assert all(infidelity(s, states[0]) < 1e-12 for s in states)


def test_candidates_reproduce_canonical_and_pair_frequencies():
    for d in (4, 6, 8):
        bases = three_bases(d)
        state = haar_random(d, seed=d)
        chain, q = _chain(state, bases)
        for cand in enumerate_candidates(chain, q):
            assert np.allclose(exact_probs(cand.state, bases.canonical).entries, q, atol=1e-9)
            for basis in (bases.b1p, bases.b3p):
                rows = basis.indices(PAIR_PLUS)
                if basis is bases.b3p:
                    # the (d-1, 0) pair depends on the unconstrained wrap phase
                    rows = rows[:-1]
                got = exact_probs(cand.state, basis).entries[rows]
                want = exact_probs(state, basis).entries[rows]
                assert np.allclose(got, want, atol=1e-9)


def test_candidate_set_is_closed_under_conjugation():
    bases = three_bases(4, PairBasisParams(H, H, (0.0, 0.0)))
    chain, q = _chain(haar_random(4, seed=31), bases)
    states = [c.state for c in enumerate_candidates(chain, q)]
    for s in states:
        assert any(infidelity(s.conjugate(), other) < 1e-12 for other in states)


def test_enumeration_rejects_split_support():
    state = make_state([1, 0, 1, 0])
    chain, q = _chain(state, three_bases(4))
    with pytest.raises(AmbiguousSupport) as exc:
        enumerate_candidates(chain, q)
    assert exc.value.pattern.zero_indices == frozenset({1, 3})
    assert exc.value.exit_code == 3


def test_log_likelihood_floor():
    bases = three_bases(4)
    completion = completion_counts(
        [ProbabilityVector("B1p", np.array([0, 0, 1.0, 0])), ProbabilityVector("B3p", np.zeros(4))],
        bases,
    )
    orthogonal = make_state(bases.b1p.vectors[0])
    assert log_likelihood(orthogonal, completion) == pytest.approx(math.log(1e-12))


def test_true_candidate_maximizes_exact_likelihood():
    bases = three_bases(6)
    state = haar_random(6, seed=77)
    observations = simulate_three_bases(state, bases, None)
    scored = likelihood_counts(observations, bases)
    chain, q = _chain(state, bases)
    cands = enumerate_candidates(chain, q)
    scores = [log_likelihood(c.state, scored) for c in cands]
    assert infidelity(cands[int(np.argmax(scores))].state, state) < 1e-9


def test_likelihood_scores_every_pair_basis_outcome():
    bases = three_bases(4)
    scored = likelihood_counts(simulate_three_bases(haar_random(4, seed=3), bases, None), bases)
    assert scored.vectors.shape == (8, 4)
    assert scored.weights.sum() == pytest.approx(2.0)
    assert completion_counts(simulate_three_bases(haar_random(4, seed=3), bases, None), bases).vectors.shape == (4, 4)


@pytest.mark.parametrize("d", [4, 6, 8])
def test_wrap_pair_outcome_separates_candidates(d):
    """Full-support candidates disagree on the B3' pair (d-1, 0) but agree on every chain link"""
    bases = three_bases(d)
    chain, q = _chain(haar_random(d, seed=31), bases)
    states = np.array([c.state.amplitudes for c in enumerate_candidates(chain, q)])
    pair_plus = bases.b3p.vectors[bases.b3p.indices(PAIR_PLUS)]
    probs = np.abs(states @ pair_plus.conj().T) ** 2
    assert np.ptp(probs[:, :-1], axis=0).max() < 1e-12
    assert np.ptp(probs[:, -1]) > 1e-6


@pytest.mark.parametrize("d", [4, 6, 8])
def test_truth_maximizes_likelihood_over_haar_states(d):
    """Exact probabilities never let a wrong sign vector outscore the true one"""
    bases = three_bases(d)
    rng = np.random.default_rng(500 + d)
    for _ in range(25):
        state = haar_random(d, rng)
        observations = simulate_three_bases(state, bases, None)
        scored = likelihood_counts(observations, bases)
        report = estimate_3bb(observations, bases)
        assert log_likelihood(state, scored) >= report.loglik_ranking[0] - 1e-9
        assert report.flags.likelihood_tie or infidelity(report.estimate, state) < 1e-9


# Three-basis estimation

@pytest.mark.parametrize("d", [4, 6, 8])
def test_exact_recovery(d):
    bases = three_bases(d)
    rng = np.random.default_rng(d)
    for _ in range(25):
        state = haar_random(d, rng)
        report = estimate_3bb(simulate_three_bases(state, bases, None), bases)
        assert report.flags.likelihood_tie or infidelity(report.estimate, state) < 1e-9


def test_slit_state_is_recovered():
    state = slit_qudit_state()
    bases = three_bases(8)
    chain, _ = _chain(state, bases)
    assert np.allclose(chain.re, -0.25, atol=1e-12)
    assert np.allclose(chain.im_mag, 0.0, atol=1e-7)

    report = estimate_3bb(simulate_three_bases(state, bases, None), bases)
    assert infidelity(report.estimate, state) < 1e-9
    assert report.flags.equal_pairs_detected
    assert not report.flags.likelihood_tie


def test_wrapping_arc_is_recovered():
    rng = np.random.default_rng(4)
    bases = three_bases(6)
    for _ in range(10):
        z = rng.standard_normal(6) + 1j * rng.standard_normal(6)
        z[[2, 3]] = 0
        state = make_state(z)
        report = estimate_3bb(simulate_three_bases(state, bases, None), bases)
        assert report.flags.likelihood_tie or infidelity(report.estimate, state) < 1e-9
        assert [k for k, _ in report.link_signs] == [4, 5, 0]


def test_estimate_is_global_phase_blind():
    bases = three_bases(6)
    raw = haar_random(6, seed=2).amplitudes
    a = estimate_3bb(simulate_three_bases(make_state(raw), bases, None), bases)
    b = estimate_3bb(simulate_three_bases(make_state(np.exp(2.1j) * raw), bases, None), bases)
    assert infidelity(a.estimate, b.estimate) < 1e-12


def test_scaled_counts_pick_the_same_candidate():
    bases = three_bases(4)
    records = simulate_three_bases(haar_random(4, seed=10), bases, 1000, seed=3)
    scaled = [CountRecord(r.basis, r.counts * 3, r.shots * 3) for r in records]
    a = estimate_3bb(records, bases)
    b = estimate_3bb(scaled, bases)
    assert a.chosen_signs == b.chosen_signs
    assert infidelity(a.estimate, b.estimate) < 1e-12


def test_zero_completion_counts_tie():
    bases = three_bases(4)
    report = estimate_3bb(_blind_completion(haar_random(4, seed=6), bases), bases)
    assert report.flags.likelihood_tie
    assert report.tie_gap == pytest.approx(0.0, abs=1e-12)


def test_split_support_raises():
    bases = three_bases(4)
    with pytest.raises(AmbiguousSupport):
        estimate_3bb(simulate_three_bases(make_state([H, 0, H, 0]), bases, None), bases)


def test_missing_record_is_a_schema_error():
    bases = three_bases(4)
    observations = simulate_three_bases(haar_random(4, seed=1), bases, None)[:2]
    with pytest.raises(SchemaError):
        estimate_3bb(observations, bases)


def test_enumeration_cap():
    bases = three_bases(26)
    with pytest.raises(EnumerationTooLarge):
        estimate_3bb(simulate_three_bases(haar_random(26, seed=0), bases, None), bases)


def test_report_fields():
    bases = three_bases(4)
    report = estimate_3bb(simulate_three_bases(haar_random(4, seed=12), bases, None), bases)
    assert len(report.chosen_signs) == 3
    assert [k for k, _ in report.link_signs] == [0, 1, 2]
    assert report.loglik_ranking.shape == (8,)
    assert np.all(np.diff(report.loglik_ranking) <= 0)
    assert report.candidates[0].signs == report.chosen_signs


def test_report_to_dict():
    bases = three_bases(4)
    report = estimate_3bb(simulate_three_bases(haar_random(4, seed=12), bases, None), bases)
    doc = json.loads(json.dumps(report_to_dict(report)))
    assert doc["method"] == "3bb"
    assert len(doc["estimate"]) == 4
    assert len(doc["loglik_ranking"]) == 8
    assert doc["bases"]["randomized"] is False
    assert "vectors" not in doc["bases"]
    assert set(doc["flags"]) == {"ambiguous_support", "equal_pairs_detected", "likelihood_tie", "clamped_k"}

    # every candidate of the uniform state is the same state, so no gap exists
    uniform = estimate_3bb(_blind_completion(make_state(np.ones(4)), bases), bases)
    assert report_to_dict(uniform)["tie_gap"] is None


# Support adaptation

def test_estimate_on_support():
    rng = np.random.default_rng(8)
    z = np.zeros(8, dtype=complex)
    z[2:6] = rng.standard_normal(4) + 1j * rng.standard_normal(4)
    truth = make_state(z)
    adapted = adapt_to_support((2, 3, 4, 5), 8)
    observations = simulate_three_bases(adapted.restrict(truth), adapted.bases, None)
    report = estimate_on_support(observations, adapted)
    assert report.support == (2, 3, 4, 5)
    assert report.flags.ambiguous_support
    assert report.estimate.dimension == 8
    assert report.flags.likelihood_tie or infidelity(report.estimate, truth) < 1e-9


# Retry driver

def test_uniform_state_retries_with_random_bases():
    truth = make_state(np.ones(4))
    report = estimate_3bb_with_retry(truth, seed=0)
    assert report.retries == 1
    assert report.bases.randomized
    assert report.flags.equal_pairs_detected
    assert infidelity(report.estimate, truth) < 1e-9


def test_uniform_state_without_proactive_retry():
    report = estimate_3bb_with_retry(make_state(np.ones(4)), seed=0, proactive=False)
    assert report.retries == 0
    assert not report.bases.randomized


def test_generic_state_needs_no_retry():
    for seed in range(5):
        truth = haar_random(6, seed=seed)
        report = estimate_3bb_with_retry(truth, seed=seed)
        assert report.retries == 0
        assert infidelity(report.estimate, truth) < 1e-9


def test_retry_is_deterministic_with_counts():
    truth = make_state(np.ones(6))
    a = estimate_3bb_with_retry(truth, seed=5, shots=2000)
    b = estimate_3bb_with_retry(truth, seed=5, shots=2000)
    assert a.retries == b.retries
    assert np.array_equal(a.estimate.amplitudes, b.estimate.amplitudes)


def test_recorded_tie_raises():
    bases = three_bases(4)
    observations = _blind_completion(haar_random(4, seed=6), bases)
    with pytest.raises(RetriesExhausted) as exc:
        estimate_3bb_with_retry(observations, bases=bases)
    assert exc.value.exit_code == 4
    assert exc.value.report.flags.likelihood_tie


def test_random_bases_still_recover():
    truth = haar_random(8, seed=40)
    bases = random_three_bases(8, 3)
    report = estimate_3bb(simulate_three_bases(truth, bases, None), bases)
    assert report.flags.likelihood_tie or infidelity(report.estimate, truth) < 1e-9


# Five-basis baseline

@pytest.mark.parametrize("d", [4, 8])
def test_five_basis_exact_recovery(d):
    rng = np.random.default_rng(100 + d)
    for _ in range(100):
        truth = haar_random(d, rng)
        assert infidelity(estimate_5bb(simulate_five_bases(truth, None, None)), truth) < 1e-9


def test_five_basis_unequal_amplitudes():
    params = PairBasisParams(0.6, 0.8)
    truth = haar_random(6, seed=9)
    assert infidelity(estimate_5bb(simulate_five_bases(truth, params, None), params), truth) < 1e-9


def test_five_basis_sign_of_imaginary_part():
    truth = make_state([1, 1j, 0, 0])
    observations = {o.basis: o.entries for o in simulate_five_bases(truth, None, None)}
    assert observations["B2"][0] - observations["B2"][1] == pytest.approx(1.0)

    re, im = five_basis_lambdas(observations["B0"], observations, PairBasisParams(H, H))
    assert re[0] == pytest.approx(0.0, abs=1e-12)
    assert im[0] == pytest.approx(-1.0)
    assert infidelity(estimate_5bb(simulate_five_bases(truth, None, None)), truth) < 1e-12


def test_five_basis_equal_amplitude_form():
    truth = haar_random(4, seed=3)
    observations = {o.basis: o.entries for o in simulate_five_bases(truth, None, None)}
    re, _ = five_basis_lambdas(observations["B0"], observations, PairBasisParams(H, H))
    p = observations["B1"]
    assert re[0] == pytest.approx(p[0] - p[1], abs=1e-12)


@pytest.mark.parametrize("d", [4, 6, 8])
def test_five_and_three_basis_agree(d):
    bases = three_bases(d)
    rng = np.random.default_rng(700 + d)
    for _ in range(20):
        truth = haar_random(d, rng)
        three = estimate_3bb(simulate_three_bases(truth, bases, None), bases)
        five = estimate_5bb(simulate_five_bases(truth, None, None))
        assert three.flags.likelihood_tie or infidelity(three.estimate, five) < 1e-9


def test_five_basis_report():
    report = estimate_5bb_report(simulate_five_bases(haar_random(4, seed=2), None, 1000, seed=1))
    assert report.method == "5bb"
    assert report.bases is None
    doc = report_to_dict(report)
    assert doc["loglik_ranking"] == []
    assert "bases" not in doc
