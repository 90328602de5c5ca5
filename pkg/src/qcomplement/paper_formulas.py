"""Printed closed-form correlation expressions, evaluated exactly as typeset.

Every expression is evaluated in complex arithmetic so that regimes where a
printed formula leaves the reals (square roots or logarithms of negative
numbers) are detected rather than crashing or being clipped. The result carries
a validity flag: a value is valid when it is real and lies inside the range of
its correlation measure.

The printed single-mode reductions of the multiqubit pipelines and the
printed N->1 deleter output are also transcribed here for auditing against the
states built in :mod:`qcomplement.machines`.
"""
from __future__ import annotations

import cmath
import enum
import math
from typing import Callable, NamedTuple

import numpy as np

from .errors import DomainError
from .machines import XI_MAX, XI_MIN, _m_ones_ket, deleter_populations, gm_coefficients
from .qmat import DensityMatrix, QubitState, binomial, dicke, projector

RANGE_EPS = 1e-12
IMAG_TOL = 1e-12
LOG2 = math.log(2.0)


class FormulaId(enum.Enum):
    CLONE_N = "CLONE_N"
    CLONE_D = "CLONE_D"
    CLONE_DG = "CLONE_DG"
    DEL_N = "DEL_N"
    DEL_D = "DEL_D"
    DEL_DG = "DEL_DG"
    CD_DG = "CD_DG"
    DC_DG_AA = "DC_DG_AA"
    DC_DG_BB = "DC_DG_BB"

    @property
    def measure(self) -> str:
        return self.value.split("_")[1]

    @property
    def measure_range(self) -> tuple[float, float]:
        """[K_min, K_max] of the measure: negativity tops out at 1/2 for two qubits."""
        return (0.0, 0.5) if self.measure == "N" else (0.0, 1.0)


CLONE_IDS = (FormulaId.CLONE_N, FormulaId.CLONE_D, FormulaId.CLONE_DG)
DELETE_IDS = (FormulaId.DEL_N, FormulaId.DEL_D, FormulaId.DEL_DG)
COMPOSITE_IDS = (FormulaId.CD_DG, FormulaId.DC_DG_AA, FormulaId.DC_DG_BB)


class FormulaValue(NamedTuple):
    """Printed value and whether it is a legitimate value of its measure.

    ``value`` is NaN when the expression is undefined or complex; otherwise the
    real value is kept even when it falls outside the measure range.
    """

    value: float
    valid: bool


def _finish(fid: FormulaId, raw: Callable[[], complex]) -> FormulaValue:
    try:
        z = complex(raw())
    except (ZeroDivisionError, ValueError, OverflowError):
        return FormulaValue(math.nan, False)
    if not (math.isfinite(z.real) and math.isfinite(z.imag)) or abs(z.imag) > IMAG_TOL:
        return FormulaValue(math.nan, False)
    lo, hi = fid.measure_range
    v = z.real
    return FormulaValue(v, lo - RANGE_EPS <= v <= hi + RANGE_EPS)


def _xlog2x(x: complex) -> complex:
    return 0.0 if x == 0 else x * cmath.log(x) / LOG2


def _binary_entropy(x: complex) -> complex:
    """H(x) = -x log2 x - (1-x) log2 (1-x)."""
    return -_xlog2x(x) - _xlog2x(1 - x)


def _max_real(*zs: complex) -> complex:
    return max(zs, key=lambda z: z.real)


def _dg_two_eigs(l0: complex, l1: complex) -> complex:
    """2 (l0 + 2 l1 - max[l0, l1]): the doubly degenerate l1 pattern."""
    return 2 * (l0 + 2 * l1 - _max_real(l0, l1))


def _check_range(name: str, x: float, lo: float, hi: float, *, hi_open: bool = False) -> None:
    upper_ok = x < hi if hi_open else x <= hi + RANGE_EPS
    if not (lo - RANGE_EPS <= x and upper_ok):
        bracket = ")" if hi_open else "]"
        raise DomainError(f"{name} must lie in [{lo:g}, {hi:g}{bracket}, got {x!r}")


def _check_alpha(alpha: float) -> None:
    _check_range("alpha", alpha, 0.0, 1.0)


def _clone_n(f: float, a: float) -> complex:
    a2 = a * a
    b2 = 1 - a2
    f1 = a2 * b2
    f2 = (1 + 0.5 * a2 - a2) * b2  # alpha real, so alpha*^2 = |alpha|^2
    f3 = a2 * (a2 + 0.5 * b2)
    g1 = (f - 1) ** 2
    g2 = (2 * f - 1) ** 2
    return 0.5 * (
        2 * cmath.sqrt(g1 + 0.5 * g2 * f1) + cmath.sqrt(g1 + g2 * f2) + cmath.sqrt(g1 + g2 * f3) - 1
    )


def _clone_d(f: float, a: float) -> complex:
    a2 = a * a
    n = a2 + (1 - 2 * a2) * f
    m = n - 1
    c_plus = f * (-2 - 10 * a2 + f * (1 + 8 * a2)) + 3 * a2
    c_minus = f * (-2 - 10 * a2 + f * (1 + 8 * a2)) - 3 * a2
    x_plus = 0.5 * (1 + cmath.sqrt(1 + c_plus) / m)
    y_plus = 0.5 * (1 + cmath.sqrt(4 + f * (7 - 5 * f) + c_minus) / n)
    return _binary_entropy(f) + m * _binary_entropy(x_plus) - n * _binary_entropy(y_plus)


def _clone_dg(f: float, a: float) -> complex:
    a2 = a * a
    b2 = 1 - a2
    lam = (1 - f) ** 2
    p = 2.25 - 15 * f + 37 * f**2 - 40 * f**3 + 16 * f**4
    q = 5 - 36 * f + 96 * f**2 - 112 * f**3 + 48 * f**4
    root = cmath.sqrt(p - a2 * b2 * q)
    base = 3.5 - 9 * f + 6 * f**2
    lp, lm = 0.5 * (base + root), 0.5 * (base - root)
    return 2 * (lam + lp + lm - _max_real(lam, lp, lm))


def delta_clone(fid: FormulaId, f_cl: float, alpha: float) -> FormulaValue:
    """Printed correlation of the 1->2 cloner output as a function of (F_cl, alpha)."""
    if fid not in CLONE_IDS:
        raise DomainError(f"{fid} is not a cloning formula")
    _check_range("F_cl", f_cl, 0.5, 5.0 / 6.0)
    _check_alpha(alpha)
    fn = {FormulaId.CLONE_N: _clone_n, FormulaId.CLONE_D: _clone_d, FormulaId.CLONE_DG: _clone_dg}[fid]
    return _finish(fid, lambda: fn(f_cl, alpha))


def _del_a(f: float) -> complex:
    return cmath.sqrt(4 * f - 3)


def _del_n(f: float) -> complex:
    a = _del_a(f)
    return 0.5 * ((1 - a) / 4 * cmath.sqrt((1 + a) ** 2 + 1) + (2 - a) * (1 + a) - 1)


def _del_d(f: float) -> complex:
    a = _del_a(f)
    c = (a + 1) / (2 * f)
    root = cmath.sqrt(14 - 2 * a + 4 * f * (a + 5 * f - 8))
    s_plus = 0.25 * (3 - 2 * f + a + root)
    s_minus = 0.25 * (3 - 2 * f + a - root)
    t_plus = 0.5 * (1 - a)
    h_pair = -_xlog2x(s_plus) - _xlog2x(s_minus)
    return (6 / 5) ** 2 * (_binary_entropy(c) + _binary_entropy(t_plus) + _xlog2x(t_plus**2) - h_pair)


def _del_dg(f: float) -> complex:
    a = _del_a(f)
    k_plus = 0.5 * (1 - a) * (1 + 0.5 * (a - 1))
    k_minus = 0.5 * (1 - a) * (1 - 0.5 * (a - 1))
    l_plus = k_minus + k_plus - 1
    l_minus = k_minus - k_plus - 1
    return _dg_two_eigs(0.25 * (l_minus**2 + l_plus**2), k_plus**2)


def delta_delete(fid: FormulaId, f_del: float) -> FormulaValue:
    """Printed correlation of the 2->1 deleter output as a function of F_del."""
    if fid not in DELETE_IDS:
        raise DomainError(f"{fid} is not a deletion formula")
    _check_range("F_del", f_del, 0.75, 1.0, hi_open=True)
    fn = {FormulaId.DEL_N: _del_n, FormulaId.DEL_D: _del_d, FormulaId.DEL_DG: _del_dg}[fid]
    return _finish(fid, lambda: fn(f_del))


def _cd_dg(a: float, f3: float) -> complex:
    l0 = 0.5 + math.sqrt(2) * a**4 * (1 - 2 * f3) ** 2 + 2 * a**2 * f3 * (1 - 2 * f3) - f3 * (1 - f3)
    return _dg_two_eigs(l0, (1 - f3) ** 2)


def _dc_dg_aa(a: float, xi: float) -> complex:
    a2 = a * a
    ell = (1 - 2 * xi) * (a2 - (1 - a2))
    return _dg_two_eigs(0.25 * (ell**2 + (ell - 2 * xi) ** 2), xi**2)


def _dc_dg_bb(a: float, xi: float) -> complex:
    a2 = a * a
    j = (1 - 2 * xi) * (1 - 2 * a2 * (1 - a2))
    return _dg_two_eigs(0.25 * (j**2 + (1 - 4 * xi) ** 2), xi**2)


def delta_composite(fid: FormulaId, alpha: float, xi_or_f3: float) -> FormulaValue:
    """Printed DG of a composite pipeline output.

    The second argument is F_3 in [3/4, 7/8] for ``CD_DG`` and xi in
    [1/6, 1/2] for the two delete-then-clone branches.
    """
    if fid not in COMPOSITE_IDS:
        raise DomainError(f"{fid} is not a composite formula")
    _check_alpha(alpha)
    if fid is FormulaId.CD_DG:
        _check_range("F_3", xi_or_f3, 0.75, 0.875)
        return _finish(fid, lambda: _cd_dg(alpha, xi_or_f3))
    _check_range("xi", xi_or_f3, XI_MIN, XI_MAX)
    fn = _dc_dg_aa if fid is FormulaId.DC_DG_AA else _dc_dg_bb
    return _finish(fid, lambda: fn(alpha, xi_or_f3))


def f3_from_xi(xi: float) -> float:
    """Deletion fidelity after cloning with machine parameter xi."""
    _check_range("xi", xi, XI_MIN, XI_MAX)
    return (1 + xi) / (1 + 2 * xi)


def xi_from_f3(f3: float) -> float:
    _check_range("F_3", f3, 0.75, 0.875)
    return (1 - f3) / (2 * f3 - 1)


def evaluate(fid: FormulaId, alpha: float, param: float) -> FormulaValue:
    """Uniform entry point: ``param`` is F_cl, F_del, F_3 or xi depending on ``fid``."""
    if fid in CLONE_IDS:
        return delta_clone(fid, param, alpha)
    if fid in DELETE_IDS:
        return delta_delete(fid, param)
    return delta_composite(fid, alpha, param)


# Printed multiqubit reductions


def printed_clone_delete_mode(psi: QubitState, n: int) -> np.ndarray:
    """First-mode reduction of the 1->N clone, N->M delete output as printed.

    Diagonal, with the binomial weights C(N, .) exactly as displayed.
    """
    coef = gm_coefficients(n)
    a2, b2 = psi.p0, psi.p1
    p0 = sum(((n - i) / n * binomial(n, n - i) * a2 + i / n * binomial(n, i) * b2) * coef[i] ** 2
             for i in range(n))
    p1 = sum((i / n * binomial(n, i) * a2 + (n - i) / n * binomial(n, n - i) * b2) * coef[i] ** 2
             for i in range(n))
    return np.diag([p0, p1]).astype(complex)


def printed_delete_clone_mode(psi: QubitState, n: int, m: int) -> np.ndarray:
    """First-mode reduction of the N->1 delete, 1->M clone output as printed."""
    coef = gm_coefficients(m)
    eta0, eta1 = deleter_populations(psi, n)
    p0 = sum(((m - j) / m * binomial(m, m - j) * eta0 + j / m * binomial(m, j) * eta1) * coef[j] ** 2
             for j in range(m))
    p1 = sum((j / m * binomial(m, j) * eta0 + (m - j) / m * binomial(m, m - j) * eta1) * coef[j] ** 2
             for j in range(m))
    return np.diag([p0, p1]).astype(complex)


def printed_deleter_output(psi: QubitState, n: int) -> np.ndarray:
    """N->1 deleter output as printed, with weights C(N-k, k) for k = 0..N-1.

    Not a unit-trace state in general; kept verbatim for the audit.
    """
    a2, b2 = psi.p0, psi.p1
    rho = a2**n * projector(dicke(n, 0)) + b2**n * projector(_m_ones_ket(n, 1))
    for k in range(n):
        rho = rho + binomial(n - k, k) * a2 ** (n - k) * b2**k * projector(dicke(n, k))
    return rho


def as_state(m: np.ndarray) -> DensityMatrix:
    """Wrap a printed qubit-register matrix without validating it."""
    n = int(round(math.log2(m.shape[0])))
    return DensityMatrix((2,) * n, m)
