"""Feasibility programs over coloring mixtures and their witnesses."""

import math

import numpy as np
import pytest

from onticlab import (
    Coloring,
    FEASIBLE,
    INCONCLUSIVE,
    INFEASIBLE,
    Ket,
    LPInstance,
    LP_EPS,
    PrepFileError,
    PreparationTargets,
    TRIVIAL_REASON,
    build_lp,
    bundled_prep_names,
    bundled_prep_text,
    bundled_ray_text,
    check_core_lemmas,
    count_colorings,
    deterministic_response_model,
    load_rayset,
    model_from_colorings,
    parse_prep_file,
    solve_feasibility,
    validate_axioms,
    validate_reproduction,
)
from onticlab.lpfeas import _block_system, _phase_one

from modelzoo import lp_block_feasible_oracle


def axes_rayset():
    return load_rayset("dim 3\n1 0 0\n0 1 0\n0 0 1\n")


def qubit_instance():
    rs = load_rayset(bundled_ray_text("qubit2"))
    dim, named = parse_prep_file(bundled_prep_text("qubit2"))
    kets = [ket for _, ket in named]
    labels = [label for label, _ in named]
    cols = count_colorings(rs, collect=True).witnesses
    return rs, build_lp(rs, kets, list(cols), labels=labels)


class TestBuildLP:
    def test_block_shape_single_basis(self):
        rs = axes_rayset()
        cols = count_colorings(rs, collect=True).witnesses
        lp = build_lp(rs, [Ket.basis(3, 0)], list(cols))
        assert len(lp.columns) == 3
        assert lp.constrained_rays == (0, 1, 2)
        a, b = _block_system(lp, lp.preparations[0])
        assert a.shape == (4, 3)
        assert np.all(a[0] == 1.0)
        assert b[0] == 1.0
        # one Born target per constrained ray, in ray order
        assert b[1:] == pytest.approx([1.0, 0.0, 0.0])

    def test_default_labels_applied(self):
        rs = axes_rayset()
        cols = count_colorings(rs, collect=True).witnesses
        lp = build_lp(rs, [Ket.basis(3, 0), Ket.basis(3, 1)], list(cols))
        assert [p.label for p in lp.preparations] == ["psi0", "psi1"]

    def test_duplicate_labels_rejected(self):
        rs = axes_rayset()
        cols = list(count_colorings(rs, collect=True).witnesses)
        with pytest.raises(ValueError):
            build_lp(rs, [Ket.basis(3, 0), Ket.basis(3, 1)], cols, labels=["a", "a"])

    def test_invalid_coloring_rejected(self):
        rs = axes_rayset()
        with pytest.raises(ValueError):
            build_lp(rs, [Ket.basis(3, 0)], [Coloring((1, 1, 0))])

    def test_dim_mismatch_rejected(self):
        rs = axes_rayset()
        cols = list(count_colorings(rs, collect=True).witnesses)
        with pytest.raises(ValueError):
            build_lp(rs, [Ket.basis(2, 0)], cols)

    def test_trivially_infeasible_instance(self):
        rs = axes_rayset()
        lp = build_lp(rs, [Ket.basis(3, 0)], [])
        assert lp.trivially_infeasible
        assert lp.trivial_reason == TRIVIAL_REASON


class TestSolve:
    def test_qubit_ensemble_feasible(self):
        rs, lp = qubit_instance()
        out = solve_feasibility(lp)
        assert out.verdict == FEASIBLE
        assert out.residual <= LP_EPS
        for block in out.blocks:
            assert block.status == FEASIBLE
            assert math.fsum(block.weights) == pytest.approx(1.0, abs=1e-9)
            assert all(w >= 0.0 for w in block.weights)

    def test_zero_columns_infeasible_with_reason(self):
        rs = axes_rayset()
        lp = build_lp(rs, [Ket.basis(3, 0)], [])
        out = solve_feasibility(lp)
        assert out.verdict == INFEASIBLE
        assert all(b.reason == TRIVIAL_REASON for b in out.blocks)
        assert out.residual is None

    def test_single_matching_column_gets_full_weight(self):
        rs = axes_rayset()
        lp = build_lp(rs, [Ket.basis(3, 0)], [Coloring((1, 0, 0))])
        out = solve_feasibility(lp)
        assert out.verdict == FEASIBLE
        assert out.blocks[0].weights == pytest.approx((1.0,))

    def test_doctored_targets_infeasible(self):
        # Born column demanding two units of mass from a one-unit mixture.
        rs = axes_rayset()
        cols = count_colorings(rs, collect=True).witnesses
        lp = build_lp(rs, [Ket.basis(3, 0)], list(cols))
        rigged = LPInstance(
            rayset=lp.rayset,
            columns=lp.columns,
            preparations=(
                PreparationTargets(
                    label="rig", ket=Ket.basis(3, 0), born=(1.0, 1.0, 0.0)
                ),
            ),
        )
        out = solve_feasibility(rigged)
        assert out.verdict == INFEASIBLE
        assert out.blocks[0].reason == "phase-one optimum leaves artificial mass"

    def test_iteration_cap_is_inconclusive(self):
        rs, lp = qubit_instance()
        out = solve_feasibility(lp, max_iter=1)
        assert out.verdict == INCONCLUSIVE
        assert all("iteration cap" in b.reason for b in out.blocks)

    def test_infeasible_outranks_inconclusive_in_merge(self):
        rs = axes_rayset()
        cols = count_colorings(rs, collect=True).witnesses
        lp = build_lp(rs, [Ket.basis(3, 0)], list(cols))
        rigged = LPInstance(
            rayset=lp.rayset,
            columns=lp.columns,
            preparations=(
                lp.preparations[0],
                PreparationTargets(
                    label="rig", ket=Ket.basis(3, 0), born=(1.0, 1.0, 0.0)
                ),
            ),
        )
        out = solve_feasibility(rigged)
        assert out.verdict == INFEASIBLE
        assert {b.status for b in out.blocks} == {FEASIBLE, INFEASIBLE}

    def test_weights_accessor(self):
        rs, lp = qubit_instance()
        out = solve_feasibility(lp)
        w = out.weights("e0")
        assert w is not None and len(w) == len(lp.columns)
        with pytest.raises(KeyError):
            out.weights("nope")


class TestAgainstBasicSolutionOracle:
    def test_random_systems_agree(self):
        rng = np.random.default_rng(99)
        agreements = 0
        for trial in range(80):
            m = int(rng.integers(2, 7))
            n = int(rng.integers(1, 7))
            a = np.zeros((m, n))
            a[0, :] = 1.0
            a[1:, :] = rng.integers(0, 2, size=(m - 1, n)).astype(float)
            if trial % 2 == 0:
                w = rng.dirichlet(np.ones(n))
                b = a @ w  # feasible by construction
            else:
                b = np.concatenate(([1.0], rng.uniform(0, 1.5, size=m - 1)))
            status, w, _ = _phase_one(a.copy(), b.copy(), 100_000)
            assert status == "optimal"
            simplex_feasible = w is not None
            oracle_feasible = lp_block_feasible_oracle(a, b)
            assert simplex_feasible == oracle_feasible, (trial, a, b)
            if simplex_feasible:
                assert np.max(np.abs(a @ np.array(w) - b)) <= 1e-7
                assert min(w) >= -1e-9
            agreements += 1
        assert agreements == 80

    def test_even_split_target(self):
        # Two columns, target halfway between them: unique witness (.5, .5).
        a = np.array([[1.0, 1.0], [1.0, 0.0], [0.0, 1.0]])
        b = np.array([1.0, 0.5, 0.5])
        status, w, _ = _phase_one(a, b, 1000)
        assert status == "optimal" and w is not None
        assert w == pytest.approx([0.5, 0.5], abs=1e-9)
        assert lp_block_feasible_oracle(a, b)

    def test_out_of_reach_target(self):
        a = np.array([[1.0, 1.0], [1.0, 0.0]])
        b = np.array([1.0, 1.5])
        status, w, _ = _phase_one(a, b, 1000)
        assert status == "optimal" and w is None
        assert not lp_block_feasible_oracle(a, b)


class TestModelExtraction:
    def test_qubit_model_passes_every_validator(self):
        rs, lp = qubit_instance()
        out = solve_feasibility(lp)
        model = model_from_colorings(
            rs, [p.ket for p in lp.preparations], out,
            labels=[p.label for p in lp.preparations],
        )
        assert validate_axioms(model).ok
        assert validate_reproduction(model).ok
        assert check_core_lemmas(model).ok
        assert deterministic_response_model(model.space, model.responses)

    def test_orthogonal_preparations_get_disjoint_supports(self):
        from onticlab import preparation_support

        rs, lp = qubit_instance()
        out = solve_feasibility(lp)
        model = model_from_colorings(
            rs, [p.ket for p in lp.preparations], out,
            labels=[p.label for p in lp.preparations],
        )
        assert (
            preparation_support(model, "e0").members
            & preparation_support(model, "e1").members
            == frozenset()
        )
        assert (
            preparation_support(model, "plus").members
            & preparation_support(model, "minus").members
            == frozenset()
        )

    def test_extraction_requires_feasible_outcome(self):
        rs = axes_rayset()
        lp = build_lp(rs, [Ket.basis(3, 0)], [])
        out = solve_feasibility(lp)
        with pytest.raises(ValueError):
            model_from_colorings(rs, [Ket.basis(3, 0)], out)

    def test_measurements_cover_every_basis(self):
        rs, lp = qubit_instance()
        out = solve_feasibility(lp)
        model = model_from_colorings(
            rs, [p.ket for p in lp.preparations], out,
            labels=[p.label for p in lp.preparations],
        )
        assert len(model.responses) == len(rs.bases)

    def test_label_block_mismatch_rejected(self):
        rs, lp = qubit_instance()
        out = solve_feasibility(lp)
        with pytest.raises(ValueError):
            model_from_colorings(rs, [p.ket for p in lp.preparations], out)


class TestPrepFiles:
    def test_bundled_names(self):
        assert set(bundled_prep_names()) == {"qubit2", "qutrit", "ququart"}

    def test_bundled_files_parse(self):
        for name in bundled_prep_names():
            dim, named = parse_prep_file(bundled_prep_text(name))
            assert dim in (2, 3, 4)
            assert named
            for label, ket in named:
                assert ket.dim == dim

    def test_header_error_located(self):
        with pytest.raises(PrepFileError) as exc:
            parse_prep_file("e0 1 0 0 0\n")
        assert exc.value.line == 1

    def test_bad_amplitude_count_located(self):
        with pytest.raises(PrepFileError) as exc:
            parse_prep_file("dim 2\ne0 1 0 0\n")
        assert exc.value.line == 2

    def test_duplicate_state_label_located(self):
        with pytest.raises(PrepFileError) as exc:
            parse_prep_file("dim 2\ne0 1 0 0 0\ne0 0 0 1 0\n")
        assert exc.value.line == 3

    def test_bad_float_located(self):
        with pytest.raises(PrepFileError) as exc:
            parse_prep_file("dim 2\ne0 one 0 0 0\n")
        assert exc.value.line == 2

    def test_non_unit_vector_rejected(self):
        with pytest.raises(PrepFileError):
            parse_prep_file("dim 2\ne0 0.9 0 0 0\n")
