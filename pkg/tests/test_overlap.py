"""Support sets, epistemic overlaps, and the support lemmas."""

import dataclasses
import math

import numpy as np
import pytest

from onticlab import (
    Ket,
    OnticSpace,
    OntologicalModel,
    PreparationDistribution,
    ProjectiveMeasurement,
    REPRO_EPS,
    ResponseFunction,
    all_overlaps,
    check_core_lemmas,
    epistemic_overlap,
    is_maximally_epistemic,
    is_psi_epistemic,
    preparation_support,
    quantum_deficiency_check,
    response_support,
)

from modelzoo import (
    canonical_qubit_model,
    lemma_mutants,
    mutant_shared_axis_support,
    random_validated_model,
)


class TestSupports:
    def test_preparation_support_members(self):
        m = canonical_qubit_model()
        assert preparation_support(m, "e0").members == frozenset({0, 1})
        assert preparation_support(m, "plus").members == frozenset({0, 2})

    def test_response_support_members(self):
        m = canonical_qubit_model()
        z0 = response_support(m, "Z", 0)
        assert z0.kind == "response"
        assert z0.owner == "Z:0"
        assert z0.members == frozenset({0, 1})
        assert response_support(m, "X", 0).members == frozenset({0, 2})

    def test_sorted_members_and_contains(self):
        m = canonical_qubit_model()
        s = preparation_support(m, "e0")
        assert s.sorted_members == (0, 1)
        assert 0 in s and 3 not in s

    def test_unknown_labels_rejected(self):
        m = canonical_qubit_model()
        with pytest.raises(KeyError):
            preparation_support(m, "nope")
        with pytest.raises(KeyError):
            response_support(m, "nope", 0)

    def test_point_distribution_supports(self):
        m = canonical_qubit_model()
        for k in range(m.space.size):
            weights = tuple(1.0 if j == k else 0.0 for j in range(m.space.size))
            point = dataclasses.replace(m.preparations[0], weights=weights)
            probed = dataclasses.replace(m, preparations=(point,) + m.preparations[1:])
            assert preparation_support(probed, "e0").members == frozenset({k})

    def test_dead_outcome_has_empty_support(self):
        space = OnticSpace.auto(1)
        z = ProjectiveMeasurement("Z", (Ket.basis(2, 0), Ket.basis(2, 1)))
        m = OntologicalModel(
            space=space,
            preparations=(
                PreparationDistribution(
                    state_label="e0", ket=Ket.basis(2, 0), weights=(1.0,)
                ),
            ),
            responses=(ResponseFunction(measurement=z, table=((1.0, 0.0),)),),
            dim=2,
        )
        assert response_support(m, "Z", 1).members == frozenset()

    def test_prep_support_inside_own_outcome_support(self):
        m = canonical_qubit_model()
        for prep_label, m_label, k in (
            ("e0", "Z", 0),
            ("e1", "Z", 1),
            ("plus", "X", 0),
            ("minus", "X", 1),
        ):
            prep = preparation_support(m, prep_label).members
            resp = response_support(m, m_label, k).members
            assert prep <= resp


class TestOverlapValues:
    def test_halved_overlap_between_unbiased_states(self):
        m = canonical_qubit_model()
        rep = epistemic_overlap(m, "e0", "plus")
        assert rep.overlap == pytest.approx(0.5)
        assert rep.born == pytest.approx(0.5)
        assert rep.ratio == pytest.approx(1.0)
        assert rep.deficit == pytest.approx(0.0, abs=1e-12)
        assert rep.bound_ok

    def test_self_overlap_is_unity(self):
        m = canonical_qubit_model()
        rep = epistemic_overlap(m, "e0", "e0")
        assert rep.overlap == pytest.approx(1.0)
        assert rep.born == pytest.approx(1.0)

    def test_orthogonal_pair_gives_zero_over_zero(self):
        m = canonical_qubit_model()
        rep = epistemic_overlap(m, "e0", "e1")
        assert rep.overlap == 0.0
        assert rep.born == pytest.approx(0.0, abs=1e-12)
        assert rep.ratio == 1.0  # degenerate 0/0 reads as saturated

    def test_positive_overlap_on_dead_born_is_infinite_ratio(self):
        m = mutant_shared_axis_support()
        rep = epistemic_overlap(m, "e1", "e0")
        assert rep.born == pytest.approx(0.0, abs=1e-12)
        assert rep.overlap > 0
        assert rep.ratio == math.inf
        assert not rep.bound_ok

    def test_all_overlaps_covers_ordered_pairs(self):
        m = canonical_qubit_model()
        reps = all_overlaps(m)
        assert len(reps) == 16  # 4 preparations, ordered pairs incl. self
        assert {(r.psi, r.phi) for r in reps} == {
            (a.state_label, b.state_label)
            for a in m.preparations
            for b in m.preparations
        }

    def test_bound_holds_on_random_validated_models(self):
        rng = np.random.default_rng(5)
        for _ in range(25):
            mdl = random_validated_model(rng)
            for rep in all_overlaps(mdl):
                assert rep.overlap <= rep.born + REPRO_EPS
                assert rep.bound_ok


class TestCoreLemmas:
    def test_canonical_model_passes(self):
        rep = check_core_lemmas(canonical_qubit_model())
        assert rep.ok
        assert rep.checked_states == ("e0", "e1", "plus", "minus")
        assert rep.orthogonal_pairs == (("e0", "e1"), ("plus", "minus"))
        assert rep.violations == ()

    def test_each_mutant_flagged_with_expected_lemma(self):
        for model, expected in lemma_mutants():
            rep = check_core_lemmas(model)
            assert not rep.ok
            assert expected in {v.lemma for v in rep.violations}

    def test_mutant_diagnostics_are_localized(self):
        for model, expected in lemma_mutants():
            rep = check_core_lemmas(model)
            for v in rep.violations:
                if v.lemma != expected:
                    continue
                # location names a concrete state or pair, detail quantifies
                assert any(tag in v.location for tag in ("e0", "e1", "plus", "minus"))
                assert v.detail

    def test_render_lines_stable(self):
        model, _ = lemma_mutants()[0]
        assert check_core_lemmas(model).render_lines() == check_core_lemmas(model).render_lines()

    def test_random_validated_models_pass(self):
        rng = np.random.default_rng(17)
        for _ in range(20):
            assert check_core_lemmas(random_validated_model(rng)).ok

    def test_single_state_model_passes(self):
        space = OnticSpace.auto(1)
        z = ProjectiveMeasurement("Z", (Ket.basis(2, 0), Ket.basis(2, 1)))
        m = OntologicalModel(
            space=space,
            preparations=(
                PreparationDistribution(
                    state_label="e0", ket=Ket.basis(2, 0), weights=(1.0,)
                ),
            ),
            responses=(ResponseFunction(measurement=z, table=((1.0, 0.0),)),),
            dim=2,
        )
        assert check_core_lemmas(m).ok

    def test_weak_response_breaks_lemma_and_reproduction_together(self):
        from onticlab import validate_reproduction
        from modelzoo import mutant_weak_response

        bad = mutant_weak_response()
        assert not check_core_lemmas(bad).ok
        assert not validate_reproduction(bad).ok


def disjoint_support_model():
    """Two non-orthogonal preparations with non-overlapping supports."""
    space = OnticSpace.auto(2)
    z = ProjectiveMeasurement("Z", (Ket.basis(2, 0), Ket.basis(2, 1)))
    s = 1 / math.sqrt(2)
    return OntologicalModel(
        space=space,
        preparations=(
            PreparationDistribution(state_label="e0", ket=Ket.basis(2, 0), weights=(1.0, 0.0)),
            PreparationDistribution(state_label="plus", ket=Ket((s, s)), weights=(0.0, 1.0)),
        ),
        responses=(ResponseFunction(measurement=z, table=((1.0, 0.0), (0.5, 0.5))),),
        dim=2,
    )


class TestPredicates:
    def test_canonical_model_is_psi_epistemic(self):
        ok, witness = is_psi_epistemic(canonical_qubit_model())
        assert ok
        a, b = witness
        rep = epistemic_overlap(canonical_qubit_model(), a, b)
        assert rep.overlap > 0

    def test_disjoint_supports_read_as_ontic(self):
        ok, witness = is_psi_epistemic(disjoint_support_model())
        assert not ok
        assert witness is None

    def test_single_preparation_rejected(self):
        m = disjoint_support_model()
        lone = dataclasses.replace(m, preparations=m.preparations[:1])
        with pytest.raises(ValueError):
            is_psi_epistemic(lone)

    def test_canonical_model_is_maximally_epistemic(self):
        ok, failing = is_maximally_epistemic(canonical_qubit_model())
        assert ok
        assert failing == ()

    def test_deficient_overlap_breaks_maximality(self):
        ok, failing = is_maximally_epistemic(disjoint_support_model())
        assert not ok
        assert failing
        worst = failing[0]
        assert worst.overlap < worst.born - REPRO_EPS
        assert worst.deficit == pytest.approx(0.5, abs=REPRO_EPS)


class TestDeficiency:
    def test_canonical_model_has_no_deficiency(self):
        rep = quantum_deficiency_check(canonical_qubit_model())
        assert rep.all_subset_ok
        assert rep.all_equal
        assert len(rep.entries) == 4
        assert rep.skipped == ()

    def test_strict_inclusion_detected(self):
        m = canonical_qubit_model()
        pinched = dataclasses.replace(
            m,
            preparations=tuple(
                dataclasses.replace(p, weights=(1.0, 0.0, 0.0, 0.0))
                if p.state_label == "e0"
                else p
                for p in m.preparations
            ),
        )
        rep = quantum_deficiency_check(pinched)
        entry = next(e for e in rep.entries if e.state == "e0")
        assert entry.subset_ok
        assert not entry.equal
        assert entry.extra_states == (1,) and not entry.missing_states
        assert not rep.all_equal

    def test_unmatched_preparation_skipped(self):
        m = canonical_qubit_model()
        odd = dataclasses.replace(
            m,
            preparations=m.preparations
            + (
                PreparationDistribution(
                    state_label="tilted",
                    ket=Ket.normalized((0.6, 0.8)),
                    weights=(0.25, 0.25, 0.25, 0.25),
                ),
            ),
        )
        rep = quantum_deficiency_check(odd)
        assert "tilted" in rep.skipped
