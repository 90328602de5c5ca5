import math

import numpy as np
import pytest
from hypothesis import given

from oracles import PSI_PLUS, deleted_pair, ket
from qcomplement.errors import DomainError, UnsupportedSizeError
from qcomplement.machines import (
    MachineParams,
    PipelineSpec,
    alpha_from_fdel,
    bh_clone,
    clone1N_then_deleteNM,
    clone_delete_joint,
    clone_then_delete,
    delete_2to1,
    delete_then_clone,
    deleteN1_then_clone1M,
    deleter_output,
    deleter_populations,
    gm_clone,
    gm_coefficients,
    run_pipeline,
)
from qcomplement.qmat import QubitState, partial_trace, projector, validate_density
from strategies import alphas, xis

BELL = np.outer(PSI_PLUS, PSI_PLUS)
P00 = np.outer(ket("00"), ket("00"))


def fidelity(rho1, psi):
    v = psi.vector()
    return float(np.real(v.conj() @ rho1.matrix @ v))


def test_machine_params_range():
    assert MachineParams(0.25).eta == pytest.approx(0.5)
    assert MachineParams.from_fidelity(5 / 6).xi == pytest.approx(1 / 6)
    for bad in (0.1, 0.6):
        with pytest.raises(DomainError):
            MachineParams(bad)


@given(alphas)
def test_bh_clone_bell_endpoint(a):
    out = bh_clone(QubitState.from_real(a), 0.5)
    np.testing.assert_allclose(out.rho_ab.matrix, BELL, atol=1e-15)
    assert out.fidelity == pytest.approx(0.5)


def test_bh_clone_optimal_example():
    out = bh_clone(QubitState.from_real(1.0), 1 / 6)
    np.testing.assert_allclose(out.rho_ab.matrix, (2 / 3) * P00 + (1 / 3) * BELL, atol=1e-15)
    assert out.fidelity == pytest.approx(5 / 6)


@given(alphas, xis)
def test_bh_clone_marginal_fidelities(a, xi):
    psi = QubitState.from_real(a)
    rho = bh_clone(psi, xi).rho_ab
    assert validate_density(rho).valid
    for mode in (0, 1):
        assert fidelity(partial_trace(rho, [mode]), psi) == pytest.approx(1 - xi, abs=1e-12)


def test_bh_clone_complex_input_is_universal():
    psi = QubitState(0.6, 0.8j)
    rho = bh_clone(psi, 1 / 6).rho_ab
    assert validate_density(rho).valid
    assert fidelity(partial_trace(rho, [1]), psi) == pytest.approx(5 / 6, abs=1e-12)


@given(alphas)
def test_delete_2to1_matches_hand_expansion(a):
    psi = QubitState.from_real(a)
    out = delete_2to1(psi)
    np.testing.assert_allclose(out.rho_ab.matrix, deleted_pair(psi.p0), atol=1e-14)
    assert out.fidelity == pytest.approx(1 - psi.p0 * psi.p1)
    assert out.fidelity >= 0.75 - 1e-12


def test_alpha_from_fdel():
    assert alpha_from_fdel(0.75) == pytest.approx(0.5)
    assert alpha_from_fdel(13 / 16) == pytest.approx(0.25)
    assert alpha_from_fdel(1 - 1e-12) == pytest.approx(0.0, abs=1e-5)
    for bad in (0.7, 1.0):
        with pytest.raises(DomainError):
            alpha_from_fdel(bad)


def test_clone_then_delete_examples():
    out = clone_then_delete(QubitState.from_real(1.0), 1 / 6)
    assert out.f3 == pytest.approx(7 / 8)
    np.testing.assert_allclose(out.rho_prime.matrix, 0.75 * P00 + 0.25 * BELL, atol=1e-15)
    assert clone_then_delete(QubitState.from_real(1.0), 0.5).f3 == pytest.approx(0.75)


def test_clone_then_delete_reduces_to_deleter():
    psi = QubitState.from_population(0.5)
    np.testing.assert_allclose(
        clone_then_delete(psi, 0.5).rho_prime.matrix, delete_2to1(psi).rho_ab.matrix, atol=1e-15
    )


def test_delete_then_clone_examples():
    out = delete_then_clone(QubitState.from_real(0.3), 0.5)
    np.testing.assert_allclose(out.rho_aa.matrix, BELL, atol=1e-15)
    np.testing.assert_allclose(out.rho_bb.matrix, BELL, atol=1e-15)
    out = delete_then_clone(QubitState.from_real(1.0), 1 / 6)
    np.testing.assert_allclose(out.rho_aa.matrix, (2 / 3) * P00 + (1 / 3) * BELL, atol=1e-15)


@given(alphas, xis)
def test_composite_outputs_are_states(a, xi):
    psi = QubitState.from_real(a)
    dc = delete_then_clone(psi, xi)
    for rho in (clone_then_delete(psi, xi).rho_prime, dc.rho_aa, dc.rho_bb):
        assert validate_density(rho).valid


def test_gm_coefficients():
    assert gm_coefficients(2)[0] == pytest.approx(math.sqrt(2 / 3))
    for n in (2, 3, 4):
        assert np.sum(gm_coefficients(n) ** 2) == pytest.approx(1.0)


@given(alphas)
def test_gm_clone_two_copies_equals_optimal_bh(a):
    psi = QubitState.from_real(a)
    clones = gm_clone(psi, 2).clones
    np.testing.assert_allclose(clones.matrix, bh_clone(psi, 1 / 6).rho_ab.matrix, atol=1e-12)


@pytest.mark.parametrize("n,expected", [(2, 5 / 6), (3, 7 / 9), (4, 3 / 4)])
def test_gm_clone_fidelity(n, expected):
    # universal 1->N optimum (2N + 1) / (3N)
    for psi in (QubitState.from_real(1.0), QubitState(0.6, 0.8j)):
        clones = gm_clone(psi, n).clones
        for k in range(n):
            assert fidelity(partial_trace(clones, [k]), psi) == pytest.approx(expected, abs=1e-12)


def test_gm_clone_size_limits():
    with pytest.raises(UnsupportedSizeError):
        gm_clone(QubitState.from_real(1.0), 5)


def test_clone_delete_n2_example():
    out = clone1N_then_deleteNM(QubitState.from_real(1.0), 2, 1)
    np.testing.assert_allclose(out.rho.matrix, (2 / 3) * P00 + (1 / 3) * BELL, atol=1e-15)


@pytest.mark.parametrize("n,m", [(2, 1), (3, 1), (3, 2), (4, 1), (4, 2), (4, 3)])
@pytest.mark.parametrize("a", [0.0, 0.3, 1 / math.sqrt(2), 1.0])
def test_clone_delete_matches_joint_state(n, m, a):
    psi = QubitState.from_real(a)
    out = clone1N_then_deleteNM(psi, n, m)
    traced = partial_trace(clone_delete_joint(psi, n, m), range(n))
    np.testing.assert_allclose(out.rho.matrix, traced.matrix, atol=1e-12)
    assert validate_density(out.rho).valid
    np.testing.assert_allclose(out.rho_a.matrix, partial_trace(out.rho, [0]).matrix)


def test_clone_delete_arity_errors():
    with pytest.raises(DomainError):
        clone1N_then_deleteNM(QubitState.from_real(1.0), 3, 3)
    with pytest.raises(DomainError):
        clone1N_then_deleteNM(QubitState.from_real(1.0), 3, 0)


@pytest.mark.parametrize("n", [2, 3, 4])
@pytest.mark.parametrize("a", [0.0, 0.4, 1 / math.sqrt(2), 1.0])
def test_deleter_populations_and_output(n, a):
    psi = QubitState.from_real(a)
    eta0, eta1 = deleter_populations(psi, n)
    assert eta0 + eta1 == pytest.approx(1.0, abs=1e-12)
    rho = deleter_output(psi, n)
    assert validate_density(rho).valid
    for k in range(1, n):
        assert partial_trace(rho, [k]).matrix[1, 1].real == pytest.approx(eta1, abs=1e-12)


def test_deleter_trivial_input():
    rho = deleter_output(QubitState.from_real(1.0), 3)
    np.testing.assert_allclose(rho.matrix, projector(ket("000")))
    assert deleter_populations(QubitState.from_real(1.0), 3) == pytest.approx((1.0, 0.0))


@pytest.mark.parametrize("n,m", [(3, 2), (3, 3), (4, 2), (4, 3), (4, 4)])
def test_delete_then_clone_multiqubit(n, m):
    psi = QubitState.from_population(0.5)
    out = deleteN1_then_clone1M(psi, n, m)
    for rho in out:
        assert validate_density(rho).valid
    eta0, eta1 = deleter_populations(psi, n)
    np.testing.assert_allclose(np.diag(out.rho_mode.matrix).real, [eta0, eta1])
    assert out.rho_f.dims == (2,) * m


def test_pipeline_spec_chaining_and_dispatch():
    psi = QubitState.from_real(0.6)
    spec = PipelineSpec.parse([("clone", 1, 3), ("delete", 3, 2)], psi)
    np.testing.assert_allclose(run_pipeline(spec)["final"].matrix, clone1N_then_deleteNM(psi, 3, 2).rho.matrix)
    spec = PipelineSpec.parse([("delete", 2, 1), ("clone", 1, 2)], psi, xi=0.25)
    assert set(run_pipeline(spec)) == {"aa", "bb"}
    with pytest.raises(DomainError):
        PipelineSpec.parse([("clone", 1, 3), ("delete", 2, 1)], psi)
    with pytest.raises(UnsupportedSizeError):
        PipelineSpec.parse([("clone", 1, 6)], psi)
    with pytest.raises(DomainError):
        run_pipeline(PipelineSpec.parse([("clone", 1, 2), ("delete", 2, 1), ("clone", 1, 2)], psi))
