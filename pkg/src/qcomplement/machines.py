"""Output states of the cloning and deleting machines and their compositions.

States come from the traced-out closed forms of each machine; the
Gisin-Massar cloner (and its composition with the N->M deleter) is also
available as an explicit joint state with orthonormal machine vectors so the
closed forms can be checked by partial trace.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import sqrt
from typing import NamedTuple, Sequence

import numpy as np

from .errors import DomainError, UnsupportedSizeError
from .qmat import DensityMatrix, QubitState, basis_ket, binomial, dicke, partial_trace, projector

XI_MIN, XI_MAX = 1.0 / 6.0, 0.5
RANGE_EPS = 1e-12
MAX_CLONES = 4
MAX_QUBITS = 5

PSI_PLUS = (basis_ket("01") + basis_ket("10")) / sqrt(2)
KET00, KET10, KET11 = basis_ket("00"), basis_ket("10"), basis_ket("11")


@dataclass(frozen=True)
class MachineParams:
    """Buzek-Hillery machine parameter xi; the cloning fidelity is 1 - xi."""

    xi: float

    def __post_init__(self):
        if not XI_MIN - RANGE_EPS <= self.xi <= XI_MAX + RANGE_EPS:
            raise DomainError(f"xi must lie in [1/6, 1/2], got {self.xi!r}")

    @property
    def eta(self) -> float:
        return 1.0 - 2.0 * self.xi

    @classmethod
    def from_fidelity(cls, f_cl: float) -> "MachineParams":
        return cls(1.0 - f_cl)


def _params(params: MachineParams | float) -> MachineParams:
    return params if isinstance(params, MachineParams) else MachineParams(float(params))


class CloneOutput(NamedTuple):
    rho_ab: DensityMatrix
    fidelity: float


class CompositeOutput(NamedTuple):
    rho_prime: DensityMatrix
    f3: float


class DeleteCloneOutput(NamedTuple):
    rho_aa: DensityMatrix
    rho_bb: DensityMatrix


class GMCloneOutput(NamedTuple):
    joint: DensityMatrix
    clones: DensityMatrix


class CloneDeleteNMOutput(NamedTuple):
    rho: DensityMatrix
    rho_a: DensityMatrix


class DeleteCloneNMOutput(NamedTuple):
    rho_del: DensityMatrix
    rho_mode: DensityMatrix
    rho_f: DensityMatrix
    rho_f_a: DensityMatrix


def bh_clone(psi: QubitState, params: MachineParams | float) -> CloneOutput:
    """Two-mode output of the Buzek-Hillery 1->2 cloner after tracing the machine."""
    params = _params(params)
    xi, eta = params.xi, params.eta
    a, b = psi.alpha, psi.beta
    rho = eta * (psi.p0 * projector(KET00) + psi.p1 * projector(KET11))
    coh = a * np.conj(b) * eta / sqrt(2)
    off = coh * (projector(KET00, PSI_PLUS) + projector(PSI_PLUS, KET11))
    rho = rho + off + off.conj().T + 2 * xi * projector(PSI_PLUS)
    return CloneOutput(DensityMatrix((2, 2), rho), 1.0 - xi)


def delete_2to1(psi: QubitState) -> CloneOutput:
    """State-dependent deleter acting on |psi>|psi>; fidelity is that of the blanked mode."""
    p0, p1 = psi.p0, psi.p1
    rho = p0**2 * projector(KET00) + p1**2 * projector(KET10) + 2 * p0 * p1 * projector(PSI_PLUS)
    return CloneOutput(DensityMatrix((2, 2), rho), 1.0 - p0 * p1)


def alpha_from_fdel(f_del: float) -> float:
    """|alpha|^2 on the feasible branch, (1 - sqrt(4 F_del - 3)) / 2."""
    if not 0.75 - RANGE_EPS <= f_del < 1.0:
        raise DomainError(f"F_del must lie in [3/4, 1), got {f_del!r}")
    return 0.5 * (1.0 - sqrt(max(0.0, 4.0 * f_del - 3.0)))


def clone_then_delete(psi: QubitState, params: MachineParams | float) -> CompositeOutput:
    """BH cloning followed by deletion of the imperfect copies."""
    xi = _params(params).xi
    rho = psi.p0 * projector(KET00) + psi.p1 * projector(KET10) + 2 * xi * projector(PSI_PLUS)
    return CompositeOutput(DensityMatrix((2, 2), rho / (1 + 2 * xi)), (1 + xi) / (1 + 2 * xi))


def delete_then_clone(psi: QubitState, params: MachineParams | float) -> DeleteCloneOutput:
    """BH cloning of each mode of the 2->1 deleter output (branches aa' and bb')."""
    params = _params(params)
    xi, eta = params.xi, params.eta
    p0, p1 = psi.p0, psi.p1
    bell = 2 * xi * projector(PSI_PLUS)
    aa = eta * (p0 * projector(KET00) + p1 * projector(KET11)) + bell
    q = p0 * p1
    bb = eta * ((1 - q) * projector(KET00) + q * projector(KET11)) + bell
    return DeleteCloneOutput(DensityMatrix((2, 2), aa), DensityMatrix((2, 2), bb))


def gm_coefficients(n: int) -> np.ndarray:
    """alpha_j = sqrt(2 (N - j) / (N (N + 1))) for j = 0..N-1."""
    j = np.arange(n)
    return np.sqrt(2.0 * (n - j) / (n * (n + 1)))


def _check_clones(n: int, name: str = "N") -> None:
    if not 2 <= n <= MAX_CLONES:
        raise UnsupportedSizeError(f"{name} must lie in 2..{MAX_CLONES}, got {n}")


def gm_clone(psi: QubitState, n: int) -> GMCloneOutput:
    """Gisin-Massar 1->N cloner applied by linearity, with machine states R_0..R_{N-1}."""
    _check_clones(n)
    coef = gm_coefficients(n)
    vec = np.zeros(2**n * n, dtype=complex)
    for j in range(n):
        r = np.zeros(n)
        r[j] = 1.0
        vec += psi.alpha * coef[j] * np.kron(dicke(n, j), r)
        vec += psi.beta * coef[n - 1 - j] * np.kron(dicke(n, j + 1), r)
    joint = DensityMatrix.from_pure(vec, (2,) * n + (n,))
    return GMCloneOutput(joint, partial_trace(joint, range(n)))


def _m_ones_ket(n: int, m: int) -> np.ndarray:
    """|1>^m |0>^(n-m): undeleted modes first, blanked modes trailing."""
    return basis_ket("1" * m + "0" * (n - m))


def _check_clone_delete(n: int, m: int) -> None:
    _check_clones(n)
    if not 1 <= m < n:
        raise DomainError(f"deleter N->M needs 1 <= M < N, got N={n}, M={m}")


def clone_delete_joint(psi: QubitState, n: int, m: int) -> DensityMatrix:
    """Joint pure state of the 1->N cloner followed by the N->M deleter.

    Machine register has N + 2 orthonormal states: R_0..R_{N-1}, A_0, A_1.
    """
    _check_clone_delete(n, m)
    coef = gm_coefficients(n)
    dim_machine = n + 2

    def mstate(k):
        e = np.zeros(dim_machine)
        e[k] = 1.0
        return e

    a0, a1 = mstate(n), mstate(n + 1)
    vec = psi.alpha * coef[0] * np.kron(dicke(n, 0), a0)
    for j in range(1, n):
        vec = vec + psi.alpha * coef[j] * np.kron(dicke(n, j), mstate(j))
    for j in range(n - 1):
        vec = vec + psi.beta * coef[n - 1 - j] * np.kron(dicke(n, j + 1), mstate(j))
    vec = vec + psi.beta * coef[0] * np.kron(_m_ones_ket(n, m), a1)
    return DensityMatrix.from_pure(vec, (2,) * n + (dim_machine,))


def clone1N_then_deleteNM(psi: QubitState, n: int, m: int) -> CloneDeleteNMOutput:
    """1->N Gisin-Massar cloning followed by N->M deletion, machines traced out.

    ``rho`` is assembled term by term from its closed form (diagonal Dicke
    blocks, cross terms only for i = j in 1..N-2, and the |1^M 0^(N-M)> block).
    ``rho_a`` is its first-mode reduction.
    """
    _check_clone_delete(n, m)
    coef = gm_coefficients(n)
    a, b = psi.alpha, psi.beta
    p0, p1 = psi.p0, psi.p1
    dk = [dicke(n, j) for j in range(n + 1)]
    rho = np.zeros((2**n, 2**n), dtype=complex)
    rho += p0 * coef[0] ** 2 * projector(dk[0])
    for j in range(1, n):
        rho += p0 * coef[j] ** 2 * projector(dk[j])
    for i in range(1, n):
        for j in range(0, n - 1):
            if i != j:
                continue
            w = coef[i] * coef[n - 1 - j]
            rho += w * (a * np.conj(b) * projector(dk[i], dk[j + 1])
                        + np.conj(a) * b * projector(dk[j + 1], dk[i]))
    for j in range(0, n - 1):
        rho += p1 * coef[n - 1 - j] ** 2 * projector(dk[j + 1])
    rho += p1 * coef[0] ** 2 * projector(_m_ones_ket(n, m))
    state = DensityMatrix((2,) * n, rho)
    return CloneDeleteNMOutput(state, partial_trace(state, [0]))


def deleter_populations(psi: QubitState, n: int) -> tuple[float, float]:
    """(eta_0, eta_1): populations of a deleted mode after N->1 deletion of |psi>^N."""
    a2, b2 = psi.p0, psi.p1
    mid = range(1, n)
    eta0 = a2**n + sum((n - i) / n * binomial(n, n - i) * a2 ** (n - i) * b2**i for i in mid) + b2**n
    eta1 = sum(i / n * binomial(n, i) * a2 ** (n - i) * b2**i for i in mid)
    return eta0, eta1


def deleter_output(psi: QubitState, n: int) -> DensityMatrix:
    """Output of the N->1 deleter on |psi>^N, machine traced out.

    Diagonal mixture: |0^N> with weight a^N, |1 0^(N-1)> with weight b^N, and
    the Dicke sector with k excitations (1 <= k <= N-1) with weight
    C(N, k) a^(N-k) b^k, where a = |alpha|^2 and b = |beta|^2.
    """
    _check_clones(n)
    a2, b2 = psi.p0, psi.p1
    rho = a2**n * projector(dicke(n, 0)) + b2**n * projector(_m_ones_ket(n, 1))
    for k in range(1, n):
        rho = rho + binomial(n, k) * a2 ** (n - k) * b2**k * projector(dicke(n, k))
    return DensityMatrix((2,) * n, rho)


def gm_clone_mixed(eta0: float, eta1: float, m: int) -> DensityMatrix:
    """M-qubit output of the 1->M cloner fed with diag(eta0, eta1), machine traced."""
    _check_clones(m, "M")
    coef = gm_coefficients(m)
    rho = np.zeros((2**m, 2**m), dtype=complex)
    for j in range(m):
        rho += eta0 * coef[j] ** 2 * projector(dicke(m, j))
        rho += eta1 * coef[m - 1 - j] ** 2 * projector(dicke(m, j + 1))
    return DensityMatrix((2,) * m, rho)


def deleteN1_then_clone1M(psi: QubitState, n: int, m: int) -> DeleteCloneNMOutput:
    """N->1 deletion, then 1->M cloning of one deleted mode."""
    _check_clones(n)
    _check_clones(m, "M")
    rho_del = deleter_output(psi, n)
    eta0, eta1 = deleter_populations(psi, n)
    mode = DensityMatrix((2,), np.diag([eta0, eta1]).astype(complex))
    rho_f = gm_clone_mixed(eta0, eta1, m)
    return DeleteCloneNMOutput(rho_del, mode, rho_f, partial_trace(rho_f, [0]))


@dataclass(frozen=True)
class Stage:
    kind: str  # "clone" or "delete"
    n_in: int
    n_out: int

    def __post_init__(self):
        if self.kind not in ("clone", "delete"):
            raise DomainError(f"unknown stage kind {self.kind!r}")
        if self.n_in < 1 or self.n_out < 1:
            raise DomainError("stage arities must be positive")
        if self.kind == "clone" and not (self.n_in == 1 and self.n_out >= 2):
            raise DomainError(f"only 1->N cloning is available, got {self.n_in}->{self.n_out}")
        if self.kind == "delete" and not self.n_out < self.n_in:
            raise DomainError(f"deletion must reduce the copy count, got {self.n_in}->{self.n_out}")


@dataclass(frozen=True)
class PipelineSpec:
    """A chain of cloning/deleting stages applied to copies of ``psi``.

    ``xi`` selects the Buzek-Hillery cloner for 1->2 stages; with ``xi=None``
    the optimal Gisin-Massar cloner is used.
    """

    stages: tuple[Stage, ...]
    psi: QubitState
    xi: float | None = None

    def __post_init__(self):
        if not self.stages:
            raise DomainError("a pipeline needs at least one stage")
        for s, t in zip(self.stages, self.stages[1:]):
            if s.n_out != t.n_in:
                raise DomainError(f"stage arities do not chain: {s.n_out} then {t.n_in}")
        widest = max(max(s.n_in, s.n_out) for s in self.stages)
        if widest > MAX_QUBITS:
            raise UnsupportedSizeError(f"pipelines are limited to {MAX_QUBITS} qubits")

    @classmethod
    def parse(cls, chain: Sequence[tuple[str, int, int]], psi: QubitState, xi=None):
        return cls(tuple(Stage(*s) for s in chain), psi, xi)


def run_pipeline(spec: PipelineSpec) -> dict[str, DensityMatrix]:
    """Final state(s) of a supported pipeline; other compositions are rejected."""
    kinds = tuple((s.kind, s.n_in, s.n_out) for s in spec.stages)
    psi = spec.psi
    if len(kinds) == 1:
        kind, n_in, n_out = kinds[0]
        if kind == "clone" and n_out == 2 and spec.xi is not None:
            return {"final": bh_clone(psi, spec.xi).rho_ab}
        if kind == "clone":
            return {"final": gm_clone(psi, n_out).clones}
        if kind == "delete" and (n_in, n_out) == (2, 1):
            return {"final": delete_2to1(psi).rho_ab}
        if kind == "delete" and n_out == 1:
            return {"final": deleter_output(psi, n_in)}
    if len(kinds) == 2:
        (k1, _, n1), (k2, n2_in, n2) = kinds
        if (k1, k2) == ("clone", "delete") and n1 == 2 and n2 == 1 and spec.xi is not None:
            return {"final": clone_then_delete(psi, spec.xi).rho_prime}
        if (k1, k2) == ("clone", "delete"):
            return {"final": clone1N_then_deleteNM(psi, n1, n2).rho}
        if (k1, k2) == ("delete", "clone") and n2 == 2 and kinds[0][1] == 2 and spec.xi is not None:
            out = delete_then_clone(psi, spec.xi)
            return {"aa": out.rho_aa, "bb": out.rho_bb}
        if (k1, k2) == ("delete", "clone"):
            return {"final": deleteN1_then_clone1M(psi, kinds[0][1], n2).rho_f}
    raise DomainError(f"no closed form is available for the pipeline {kinds}")
