"""Negligibility verdicts, witnesses, mass maximization and null modifications."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gaplab import (
    CountableSetPiece,
    DensitySpec,
    GraphPiece,
    Grid,
    INF,
    NotNegligibleError,
    PointSetPiece,
    RectanglePiece,
    Segment,
    SetDescriptor,
    apply_null_modification,
    diag_inf,
    discretize,
    grid_indicator,
    is_L_negligible,
    max_plan_mass,
    solve_dual,
    solve_primal,
    witness_cover_mass,
)
from gaplab.catalog import rational_nullmod, trivial_zero

UNIF = DensitySpec.uniform()

DIAGONAL = SetDescriptor((GraphPiece((Segment(0.0, 1.0, 0.0, 1.0),)),))
H_SEGMENT = SetDescriptor((GraphPiece((Segment(0.0, 0.5, 0.3, 0.3),)),))
QXQ = SetDescriptor((CountableSetPiece(),))


def uniform_measures(n):
    _, mu, nu = discretize(trivial_zero(), n)
    return mu, nu


class TestVerdicts:
    def test_diagonal_not_negligible(self):
        v = is_L_negligible(DIAGONAL, UNIF, UNIF)
        assert not v.negligible
        assert v.blocking_piece == 0

    def test_horizontal_segment_negligible_with_point_witness(self):
        v = is_L_negligible(H_SEGMENT, UNIF, UNIF)
        assert v.negligible
        M, N = v.witness
        assert N.points == (0.3,)
        assert not M.points and not M.intervals

    def test_countable_marker_negligible(self):
        v = is_L_negligible(QXQ, UNIF, UNIF)
        assert v.negligible
        assert v.witness[0].countable

    def test_point_set_negligible(self):
        A = SetDescriptor((PointSetPiece(((0.5, 0.5), (0.25, 0.75))),))
        v = is_L_negligible(A, UNIF, UNIF)
        assert v.negligible
        assert set(v.witness[0].points) == {0.5, 0.25}

    def test_zero_width_rectangle_negligible(self):
        A = SetDescriptor((RectanglePiece(0.7, 0.7, 0.2, 0.9),))
        v = is_L_negligible(A, UNIF, UNIF)
        assert v.negligible

    def test_fat_rectangle_blocks(self):
        A = SetDescriptor((RectanglePiece(0.1, 0.4, 0.2, 0.9),))
        v = is_L_negligible(A, UNIF, UNIF)
        assert not v.negligible

    def test_sloped_segment_blocks(self):
        A = SetDescriptor((GraphPiece((Segment(0.2, 0.8, 0.1, 0.7),)),))
        assert not is_L_negligible(A, UNIF, UNIF).negligible

    def test_sloped_segment_over_null_domain_is_negligible(self):
        # density vanishing on (0, 1/2) makes the x-domain null
        spec = DensitySpec(breakpoints=(0.0, 0.5, 1.0), values=(0.0, 2.0))
        A = SetDescriptor((GraphPiece((Segment(0.1, 0.4, 0.1, 0.4),)),))
        assert is_L_negligible(A, spec, UNIF).negligible

    def test_union_closure(self):
        v1 = is_L_negligible(H_SEGMENT, UNIF, UNIF)
        v2 = is_L_negligible(QXQ, UNIF, UNIF)
        both = SetDescriptor(H_SEGMENT.pieces + QXQ.pieces)
        v = is_L_negligible(both, UNIF, UNIF)
        assert v1.negligible and v2.negligible and v.negligible
        M, N = v.witness
        assert M.countable and N.points == (0.3,)

    @given(
        y=st.floats(0.05, 0.95),
        x0=st.floats(0.0, 0.5),
        w=st.floats(0.05, 0.45),
        px=st.floats(0.05, 0.95),
        py=st.floats(0.05, 0.95),
    )
    @settings(max_examples=30, deadline=None)
    def test_union_of_negligible_pieces_stays_negligible(self, y, x0, w, px, py):
        A = SetDescriptor(
            (
                GraphPiece((Segment(x0, x0 + w, y, y),)),
                PointSetPiece(((px, py),)),
                CountableSetPiece(),
            )
        )
        assert is_L_negligible(A, UNIF, UNIF).negligible


class TestMaxPlanMass:
    def test_empty_set(self):
        A = SetDescriptor((PointSetPiece(()),))
        mu, nu = uniform_measures(4)
        assert max_plan_mass(A, mu, nu, 4) == 0.0

    def test_diagonal_carries_everything(self):
        mu, nu = uniform_measures(4)
        assert max_plan_mass(DIAGONAL, mu, nu, 4) == pytest.approx(1.0, abs=1e-9)

    def test_vertical_strip_row_bound(self):
        A = SetDescriptor((RectanglePiece(0.0, 0.25, 0.0, 1.0),))
        mu, nu = uniform_measures(8)
        assert max_plan_mass(A, mu, nu, 8) == pytest.approx(0.25, abs=1e-9)

    def test_countable_marker_owns_no_atoms(self):
        mu, nu = uniform_measures(8)
        assert max_plan_mass(QXQ, mu, nu, 8) == 0.0
        assert not grid_indicator(QXQ, Grid(8)).any()

    def test_negligible_masses_bounded_by_witness_cover(self):
        for A in (H_SEGMENT, QXQ, SetDescriptor((PointSetPiece(((0.5, 0.5),)),))):
            v = is_L_negligible(A, UNIF, UNIF)
            assert v.negligible
            for n in (4, 8, 16):
                mu, nu = uniform_measures(n)
                mass = max_plan_mass(A, mu, nu, n)
                cover = witness_cover_mass(v.witness, UNIF, UNIF, n)
                assert mass <= cover + 1e-9

    def test_horizontal_segment_mass_hits_only_aligned_grids(self):
        mu, nu = uniform_measures(10)
        assert max_plan_mass(H_SEGMENT, mu, nu, 10) == pytest.approx(0.1, abs=1e-9)
        mu, nu = uniform_measures(8)
        assert max_plan_mass(H_SEGMENT, mu, nu, 8) == 0.0


class TestNullModification:
    def test_rational_marker_modification_is_invisible(self):
        inst = apply_null_modification(rational_nullmod(), QXQ, 0.0)
        for n in (3, 4, 8, 16):
            C, mu, nu = discretize(inst, n)
            assert np.all(C == 1.0)
            assert solve_primal(C, mu, nu).value == pytest.approx(1.0, abs=1e-12)
            assert solve_dual(C, mu, nu).value == pytest.approx(1.0, abs=1e-12)

    def test_point_modification_routes_around_one_cell(self):
        A = SetDescriptor((PointSetPiece(((0.5, 0.5),)),))
        inst = apply_null_modification(trivial_zero(), A, INF)
        # odd grid: the atom is never hit, matrices identical
        C5, mu5, nu5 = discretize(inst, 5)
        assert np.all(C5 == 0.0)
        assert solve_primal(C5, mu5, nu5).value == 0.0
        # even grid: one forbidden cell, plan routes around it at no cost
        C4, mu4, nu4 = discretize(inst, 4)
        assert np.isinf(C4[1, 1])
        r = solve_primal(C4, mu4, nu4)
        assert r.value == pytest.approx(0.0, abs=1e-12)
        assert r.plan.mass[1, 1] <= 1e-12

    def test_segment_modification_below_diagonal_keeps_value(self):
        A = SetDescriptor((GraphPiece((Segment(0.5, 1.0, 0.375, 0.375),)),))
        inst = apply_null_modification(diag_inf(), A, INF)
        C, mu, nu = discretize(inst, 8)
        base, _, _ = discretize(diag_inf(), 8)
        touched = np.isinf(C) & np.isfinite(base)
        assert touched.sum() == 5  # atoms (i/8, 3/8) with i/8 >= 1/2
        assert solve_primal(C, mu, nu).value == pytest.approx(1.0, abs=1e-9)

    def test_refuses_non_negligible_set(self):
        with pytest.raises(NotNegligibleError) as exc:
            apply_null_modification(trivial_zero(), DIAGONAL, 1.0)
        assert exc.value.piece_index == 0

    def test_modification_recorded_for_serialization(self):
        inst = apply_null_modification(trivial_zero(), H_SEGMENT, 2.0)
        assert inst.modification is not None
        assert inst.modification["value"] == 2.0
        assert inst.name.endswith("+mod")

    def test_soundness_when_no_atom_is_hit(self):
        # modification on a segment no dyadic grid resolves: values unchanged
        A = SetDescriptor((GraphPiece((Segment(0.0, 1.0, 0.3, 0.3),)),))
        inst = apply_null_modification(diag_inf(), A, INF)
        for n in (4, 8, 16):
            C, mu, nu = discretize(inst, n)
            base, _, _ = discretize(diag_inf(), n)
            assert np.array_equal(C, base)
            assert solve_primal(C, mu, nu).value == pytest.approx(1.0, abs=1e-9)
