import math

import numpy as np
import pytest
from hypothesis import given

from qcomplement.correlations import geometric_discord, negativity
from qcomplement.errors import DomainError
from qcomplement.machines import bh_clone, delete_then_clone
from qcomplement.paper_formulas import (
    FormulaId,
    delta_clone,
    delta_composite,
    delta_delete,
    evaluate,
    f3_from_xi,
    printed_clone_delete_mode,
    printed_delete_clone_mode,
    printed_deleter_output,
    xi_from_f3,
)
from qcomplement.qmat import QubitState
from qcomplement.sweep import delete_state
from strategies import alphas, xis


def test_clone_examples():
    for a in (0.0, 0.3, 1.0):
        v = delta_clone(FormulaId.CLONE_N, 0.5, a)
        assert v.value == pytest.approx(0.5)
        assert v.valid
    assert delta_clone(FormulaId.CLONE_DG, 5 / 6, 1.0).value == pytest.approx(1 / 9, abs=1e-12)
    printed = delta_clone(FormulaId.CLONE_N, 5 / 6, 1.0).value
    numeric = negativity(bh_clone(QubitState.from_real(1.0), 1 / 6).rho_ab)[0]
    assert printed == pytest.approx(0.09359, abs=1e-5)
    assert numeric == pytest.approx(0.039345, abs=1e-6)


def test_clone_discord_leaves_the_reals():
    v = delta_clone(FormulaId.CLONE_D, 0.5, 1 / math.sqrt(2))
    assert math.isnan(v.value)
    assert not v.valid


def test_delete_examples():
    v = delta_delete(FormulaId.DEL_DG, 0.75)
    assert v.value == pytest.approx(0.25, abs=1e-15)
    v = delta_delete(FormulaId.DEL_N, 0.75)
    assert v.value == pytest.approx(0.676777, abs=1e-6)
    assert not v.valid
    assert negativity(delete_state(0.75))[0] == pytest.approx((math.sqrt(5) - 1) / 8)
    assert delta_delete(FormulaId.DEL_DG, 1 - 1e-12).value == pytest.approx(0.0, abs=1e-5)


def test_composite_examples():
    assert delta_composite(FormulaId.DC_DG_AA, 0.4, 0.5).value == pytest.approx(1.0)
    assert delta_composite(FormulaId.DC_DG_AA, 1.0, 1 / 6).value == pytest.approx(1 / 9)
    v = delta_composite(FormulaId.CD_DG, 1.0, 7 / 8)
    assert v.value == pytest.approx(-0.22151, abs=1e-5)
    assert not v.valid


def test_f3_from_xi():
    assert f3_from_xi(1 / 6) == pytest.approx(7 / 8)
    assert f3_from_xi(0.5) == pytest.approx(0.75)
    assert f3_from_xi(0.25) == pytest.approx(5 / 6)
    assert xi_from_f3(f3_from_xi(0.3)) == pytest.approx(0.3)
    with pytest.raises(DomainError):
        f3_from_xi(0.1)


@pytest.mark.parametrize(
    "call",
    [
        lambda: delta_clone(FormulaId.CLONE_N, 0.4, 0.5),
        lambda: delta_clone(FormulaId.CLONE_N, 0.9, 0.5),
        lambda: delta_clone(FormulaId.CLONE_N, 0.6, 1.5),
        lambda: delta_clone(FormulaId.DEL_N, 0.6, 0.5),
        lambda: delta_delete(FormulaId.DEL_N, 1.0),
        lambda: delta_delete(FormulaId.DEL_N, 0.7),
        lambda: delta_composite(FormulaId.CD_DG, 0.5, 0.9),
        lambda: delta_composite(FormulaId.DC_DG_BB, 0.5, 0.6),
    ],
)
def test_domain_errors(call):
    with pytest.raises(DomainError):
        call()


@given(alphas, xis)
def test_dg_formulas_match_their_states(a, xi):
    assert delta_clone(FormulaId.CLONE_DG, 1 - xi, a).value == pytest.approx(
        geometric_discord(bh_clone(QubitState.from_real(a), xi).rho_ab), abs=1e-9)
    out = delete_then_clone(QubitState.from_real(a), xi)
    assert delta_composite(FormulaId.DC_DG_BB, a, xi).value == pytest.approx(
        geometric_discord(out.rho_bb), abs=1e-9)


def test_dc_aa_transcription_deviates_inside_the_square():
    # printed (L - 2 xi)^2 term; the state gives (1 - 4 xi)^2 and they only meet at alpha = 1 or xi = 1/2
    a, xi = 0.7, 1 / 3
    printed = delta_composite(FormulaId.DC_DG_AA, a, xi).value
    numeric = geometric_discord(delete_then_clone(QubitState.from_real(a), xi).rho_aa)
    assert abs(printed - numeric) > 0.1
    for a, xi in ((1.0, 0.2), (0.4, 0.5)):
        assert delta_composite(FormulaId.DC_DG_AA, a, xi).value == pytest.approx(
            geometric_discord(delete_then_clone(QubitState.from_real(a), xi).rho_aa), abs=1e-12)


@given(alphas, xis)
def test_evaluation_is_pure(a, xi):
    for fid in FormulaId:
        param = {"CLONE": 1 - xi, "DEL": f3_from_xi(xi), "CD": f3_from_xi(xi)}.get(fid.value.split("_")[0], xi)
        first, second = evaluate(fid, a, param), evaluate(fid, a, param)
        assert first == second or (math.isnan(first.value) and math.isnan(second.value))


@given(alphas, xis)
def test_validity_flag_tracks_range(a, xi):
    for fid in (FormulaId.CLONE_N, FormulaId.CLONE_DG):
        v = delta_clone(fid, 1 - xi, a)
        lo, hi = fid.measure_range
        if not math.isnan(v.value):
            assert v.valid == (lo - 1e-12 <= v.value <= hi + 1e-12)


def test_printed_reductions_carry_extra_binomial_weight():
    psi = QubitState.from_real(1.0)
    assert np.trace(printed_clone_delete_mode(psi, 2)).real == pytest.approx(4 / 3)
    assert np.trace(printed_delete_clone_mode(psi, 3, 2)).real == pytest.approx(4 / 3)
    # the deleter output as printed is not normalised either
    assert np.trace(printed_deleter_output(psi, 3)).real == pytest.approx(2.0)
