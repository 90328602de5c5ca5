"""Negativity, entropic discord and geometric discord of small registers."""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from math import log2

import numpy as np

from .errors import UnsupportedSizeError
from .measurements import (
    MeasurementBasis,
    OptimizerConfig,
    angle_grid,
    bloch_direction,
    givens_unitary,
    hemisphere_directions,
    n_givens_params,
    pauli_tensor,
    projector_coefficients,
    qubit_basis_unitary,
    refine_from_starts,
)
from .qmat import (
    PAULI,
    PSD_TOL,
    DensityMatrix,
    eigenvalues_2x2,
    hermitian_eigenvalues,
    partial_trace,
    partial_transpose,
    permute_subsystems,
    validate_density,
)

PROB_FLOOR = 1e-12
DEFAULT_CONFIG = OptimizerConfig()


def _check_valid(rho: DensityMatrix) -> None:
    diag = validate_density(rho)
    if not diag.valid:
        raise ValueError(f"invalid density matrix: {diag}")


def _entropy_of_spectrum(eigs) -> float:
    eigs = np.asarray(eigs, float)
    # solver noise in [-PSD_TOL, 0) counts as an exact zero
    eigs = np.where(eigs < PSD_TOL, np.maximum(eigs, 0.0), eigs)
    nz = eigs[eigs > 0]
    return float(-np.sum(nz * np.log2(nz)))


def _entropy(rho: DensityMatrix) -> float:
    return _entropy_of_spectrum(hermitian_eigenvalues(rho.matrix))


def entropy(rho: DensityMatrix) -> float:
    """Von Neumann entropy in bits."""
    _check_valid(rho)
    return _entropy(rho)


def negativity(rho: DensityMatrix) -> tuple[float, float]:
    """(negativity, logarithmic negativity) from the partial transpose on subsystem 0."""
    if len(rho.dims) != 2:
        raise ValueError(f"negativity needs a bipartite state, got dims {rho.dims}")
    eigs = hermitian_eigenvalues(partial_transpose(rho, 0))
    n = float(-np.sum(eigs[eigs < 0]))
    return n, log2(2 * n + 1)


def _xlogx_sum(eigs: np.ndarray) -> np.ndarray:
    """-sum(l log2 l) over the last axis, zero for l <= floor."""
    safe = np.where(eigs > PROB_FLOOR, eigs, 1.0)
    return -np.sum(np.where(eigs > PROB_FLOOR, eigs * np.log2(safe), 0.0), axis=-1)


def weighted_conditional_entropy(cond: np.ndarray, outcome_axes: tuple[int, ...]) -> np.ndarray:
    """sum_j p_j S(rho_j / p_j) for unnormalized conditional states ``cond``.

    ``cond`` has shape (..., dk, dk); the axes listed in ``outcome_axes``
    enumerate measurement outcomes and are summed over. Uses
    p S(rho/p) = -sum l log l + p log p for the eigenvalues l of rho.
    """
    dk = cond.shape[-1]
    if dk == 2:
        eigs = eigenvalues_2x2(cond)
    else:
        flat = cond.reshape(-1, dk, dk)
        eigs = np.array([hermitian_eigenvalues(c, hermitian_tol=1e-8) for c in flat])
        eigs = eigs.reshape(cond.shape[:-2] + (dk,))
    p = np.real(np.trace(cond, axis1=-2, axis2=-1))
    p_term = np.where(p > PROB_FLOOR, p * np.log2(np.where(p > PROB_FLOOR, p, 1.0)), 0.0)
    contrib = np.where(p > PROB_FLOOR, _xlogx_sum(eigs) + p_term, 0.0)
    return np.sum(contrib, axis=outcome_axes)


@dataclass
class DiscordResult:
    discord: float
    classical_correlations: float
    mutual_information: float
    conditional_entropy: float
    evaluations: int
    achieved_tol: float
    degenerate: bool
    basis: MeasurementBasis | None = field(default=None, repr=False)

    def __iter__(self):
        return iter((self.discord, self.classical_correlations, self.mutual_information))


def _qubit_conditional(r: np.ndarray, directions: np.ndarray) -> np.ndarray:
    """Conditional states for measuring one qubit along each direction, shape (B, 2, dk, dk)."""
    coeffs = projector_coefficients(directions)
    return np.einsum("bsk,kij->bsij", coeffs, r)


def discord(
    rho: DensityMatrix, measured: int = 1, cfg: OptimizerConfig | None = None
) -> DiscordResult:
    """Quantum discord with a rank-one projective measurement on ``measured``.

    The measured side must be a qubit; its basis is the eigenbasis of n.sigma
    with n on the Bloch sphere. The minimum over (theta, phi) is an upper bound
    on the true conditional entropy minimum (grid + multistart simplex).
    """
    cfg = cfg or DEFAULT_CONFIG
    if len(rho.dims) != 2:
        raise ValueError(f"discord needs a bipartite state, got dims {rho.dims}")
    if measured not in (0, 1):
        raise ValueError(f"measured must be 0 or 1, got {measured!r}")
    if rho.dims[measured] != 2:
        raise UnsupportedSizeError("the measured subsystem must be a qubit")
    _check_valid(rho)
    kept = 1 - measured
    s_ab = _entropy(rho)
    s_kept = _entropy(partial_trace(rho, [kept]))
    s_meas = _entropy(partial_trace(rho, [measured]))

    ordered = permute_subsystems(rho, [kept, measured])
    dk = rho.dims[kept]
    r = pauli_tensor(ordered.matrix.reshape(dk, 2, dk, 2), 1)

    th, ph = angle_grid(cfg.grid_theta, cfg.grid_phi)
    grid_dirs = np.stack([th, ph], axis=1)
    grid_vals = weighted_conditional_entropy(_qubit_conditional(r, grid_dirs), (1,))
    order = np.lexsort((np.arange(grid_vals.size), grid_vals))[: cfg.starts]

    def objective(x):
        return float(weighted_conditional_entropy(_qubit_conditional(r, x[None, :]), (1,))[0])

    step = np.array([np.pi / max(cfg.grid_theta - 1, 1), 2 * np.pi / cfg.grid_phi])
    best = refine_from_starts(
        objective, [grid_dirs[i] for i in order], [float(grid_vals[i]) for i in order], step, cfg
    )
    cond = best.value
    mi = s_kept + s_meas - s_ab
    classical = s_kept - cond
    return DiscordResult(
        discord=mi - classical,
        classical_correlations=classical,
        mutual_information=mi,
        conditional_entropy=cond,
        evaluations=best.evaluations + grid_vals.size,
        achieved_tol=best.achieved_tol,
        degenerate=not best.improved,
        basis=MeasurementBasis.qubit(float(best.x[0]), float(best.x[1])),
    )


@dataclass
class MultiDiscordResult:
    """D(i|rest) with the measurement on the complement of qubit ``kept``.

    ``value`` is an upper bound on the true minimum: the search is a product
    grid followed by local refinement over general bases.
    """

    value: float
    kept: int
    product_seed_value: float
    evaluations: int
    achieved_tol: float
    upper_bound: bool = True


def _product_grid_conditional_entropy(r: np.ndarray, m: int, directions: np.ndarray) -> np.ndarray:
    """Weighted conditional entropy for every product basis on m measured qubits.

    Returns an array of shape (B,)*m over direction indices.
    """
    c = projector_coefficients(directions)  # (B, 2, 4)
    if m == 1:
        cond = np.einsum("aik,kxy->aixy", c, r)
        return weighted_conditional_entropy(cond, (1,))
    if m == 2:
        cond = np.einsum("aik,bjl,klxy->aibjxy", c, c, r, optimize=True)
        return weighted_conditional_entropy(cond, (1, 3))
    if m == 3:
        b = len(directions)
        out = np.empty((b, b, b))
        # contract the first measured qubit per direction to bound memory
        for a in range(b):
            part = np.einsum("ik,klmxy->ilmxy", c[a], r)
            cond = np.einsum("bjl,ckm,ilmxy->ibjckxy", c, c, part, optimize=True)
            out[a] = weighted_conditional_entropy(cond, (0, 2, 4))
        return out
    raise UnsupportedSizeError(f"product grids support 1-3 measured qubits, got {m}")


def _unitary_conditional_entropy(blocks: np.ndarray, u: np.ndarray) -> float:
    """``blocks`` is rho rearranged to (2, 2, d, d): kept indices first, measured last."""
    diag = np.sum(u.conj()[None, None] * (blocks @ u), axis=2)  # (2, 2, d)
    cond = np.moveaxis(diag, -1, 0)
    return float(weighted_conditional_entropy(cond, (0,)))


def bipartite_discord_multi(
    rho: DensityMatrix, kept: int, cfg: OptimizerConfig | None = None
) -> MultiDiscordResult:
    """D(i|rest) for an N-qubit state, 2 <= N <= 4, measuring the other N-1 qubits."""
    cfg = cfg or DEFAULT_CONFIG
    n = len(rho.dims)
    if any(d != 2 for d in rho.dims):
        raise ValueError("bipartite_discord_multi needs a register of qubits")
    if not 2 <= n <= 4:
        raise UnsupportedSizeError(f"supported register sizes are 2..4 qubits, got {n}")
    if not 0 <= kept < n:
        raise ValueError(f"kept qubit {kept} out of range for {n} qubits")
    if n == 2:
        res = discord(rho, measured=1 - kept, cfg=cfg)
        return MultiDiscordResult(
            value=res.discord, kept=kept, product_seed_value=res.discord,
            evaluations=res.evaluations, achieved_tol=res.achieved_tol,
        )
    _check_valid(rho)
    m = n - 1
    d = 2**m
    rest = [q for q in range(n) if q != kept]
    ordered = permute_subsystems(rho, [kept] + rest)
    rho4 = ordered.matrix.reshape(2, d, 2, d)
    s_rho = _entropy(rho)
    s_rest = _entropy(partial_trace(rho, rest))

    dirs = hemisphere_directions(cfg.product_theta, cfg.product_phi)
    r = pauli_tensor(rho4, m)
    grid = _product_grid_conditional_entropy(r, m, dirs)
    flat = grid.ravel()
    order = np.lexsort((np.arange(flat.size), flat))[: cfg.multi_starts]

    seeds = []
    for idx in order:
        combo = np.unravel_index(idx, grid.shape)
        u = np.ones((1, 1), dtype=complex)
        for b in combo:
            u = np.kron(u, qubit_basis_unitary(*dirs[b]))
        seeds.append(u)

    # one refinement per seed; Givens parameters are relative to the seed basis
    npar = n_givens_params(d)
    blocks = rho4.transpose(0, 2, 1, 3)
    best_val, best_tol, evals = float(flat[order[0]]), 0.0, flat.size
    for k, (idx, u0) in enumerate(zip(order, seeds)):
        def objective(x, u0=u0):
            return _unitary_conditional_entropy(blocks, u0 @ givens_unitary(d, x))

        res = refine_from_starts(
            objective, [np.zeros(npar)], [float(flat[idx])], 0.15,
            replace(cfg, seed=cfg.seed * 1000 + k),
            max_evals=cfg.multi_max_evals,
        )
        evals += res.evaluations
        if res.value < best_val:
            best_val, best_tol = res.value, res.achieved_tol
    return MultiDiscordResult(
        value=s_rest + best_val - s_rho,
        kept=kept,
        product_seed_value=s_rest + float(flat[order[0]]) - s_rho,
        evaluations=evals,
        achieved_tol=best_tol,
    )


@dataclass
class AverageDiscordResult:
    value: float
    per_qubit: tuple[MultiDiscordResult, ...]

    @property
    def evaluations(self) -> int:
        return sum(r.evaluations for r in self.per_qubit)


def average_discord(rho: DensityMatrix, cfg: OptimizerConfig | None = None) -> AverageDiscordResult:
    """Mean of D(i|rest) over all qubits i."""
    parts = tuple(bipartite_discord_multi(rho, i, cfg) for i in range(len(rho.dims)))
    return AverageDiscordResult(sum(p.value for p in parts) / len(parts), parts)


@dataclass(frozen=True)
class BlochDecomposition:
    x: np.ndarray
    y: np.ndarray
    t: np.ndarray

    def reconstruct(self) -> np.ndarray:
        m = np.eye(4, dtype=complex)
        for i in range(3):
            m = m + self.x[i] * np.kron(PAULI[i + 1], PAULI[0])
            m = m + self.y[i] * np.kron(PAULI[0], PAULI[i + 1])
            for j in range(3):
                m = m + self.t[i, j] * np.kron(PAULI[i + 1], PAULI[j + 1])
        return m / 4


def _require_two_qubits(rho: DensityMatrix) -> None:
    if rho.dims != (2, 2):
        raise ValueError(f"expected a two-qubit state, got dims {rho.dims}")


def bloch_decompose(rho: DensityMatrix) -> BlochDecomposition:
    _require_two_qubits(rho)
    m = rho.matrix

    def expect(a, b):
        return float(np.real(np.trace(m @ np.kron(a, b))))

    x = np.array([expect(PAULI[i], PAULI[0]) for i in (1, 2, 3)])
    y = np.array([expect(PAULI[0], PAULI[j]) for j in (1, 2, 3)])
    t = np.array([[expect(PAULI[i], PAULI[j]) for j in (1, 2, 3)] for i in (1, 2, 3)])
    return BlochDecomposition(x, y, t)


def geometric_discord(rho: DensityMatrix) -> float:
    """2 Tr S - 2 k_max with S = (x x^T + t t^T) / 4."""
    b = bloch_decompose(rho)
    s = (np.outer(b.x, b.x) + b.t @ b.t.T) / 4
    k_max = hermitian_eigenvalues(s)[-1]
    return float(2 * np.trace(s) - 2 * k_max)


def _dephasing_distance(m: np.ndarray, directions: np.ndarray) -> np.ndarray:
    """2 ||rho - sum_k (P_k x I) rho (P_k x I)||_HS^2 for a basis per direction."""
    n = bloch_direction(directions[:, 0], directions[:, 1])
    sig = np.stack(PAULI[1:])
    ns = np.einsum("bk,kij->bij", n, sig)
    eye = np.eye(2)
    projs = np.stack([(eye + ns) / 2, (eye - ns) / 2], axis=1)  # (B, 2, 2, 2)
    big = np.einsum("bsij,kl->bsikjl", projs, eye).reshape(len(n), 2, 4, 4)
    deph = np.einsum("bsij,jk,bskl->bil", big, m, big)
    diff = m[None] - deph
    return 2 * np.sum(np.abs(diff) ** 2, axis=(1, 2))


def geometric_discord_oracle(rho: DensityMatrix, cfg: OptimizerConfig | None = None) -> float:
    """Geometric discord straight from its definition: best dephasing basis on A."""
    cfg = cfg or DEFAULT_CONFIG
    _require_two_qubits(rho)
    m = np.asarray(rho.matrix)
    th, ph = angle_grid(cfg.grid_theta, cfg.grid_phi)
    dirs = np.stack([th, ph], axis=1)
    vals = _dephasing_distance(m, dirs)
    order = np.lexsort((np.arange(vals.size), vals))[: cfg.starts]
    step = np.array([np.pi / max(cfg.grid_theta - 1, 1), 2 * np.pi / cfg.grid_phi])
    best = refine_from_starts(
        lambda x: float(_dephasing_distance(m, x[None, :])[0]),
        [dirs[i] for i in order], [float(vals[i]) for i in order], step, cfg,
        fatol=1e-14,
    )
    return best.value


@dataclass
class CorrelationReport:
    negativity: float
    log_negativity: float
    discord: float
    geometric_discord: float
    evaluations: int
    achieved_tol: float


def correlation_report(
    rho: DensityMatrix, cfg: OptimizerConfig | None = None, measured: int = 1
) -> CorrelationReport:
    neg, log_neg = negativity(rho)
    d = discord(rho, measured, cfg)
    return CorrelationReport(
        negativity=neg,
        log_negativity=log_neg,
        discord=d.discord,
        geometric_discord=geometric_discord(rho),
        evaluations=d.evaluations,
        achieved_tol=d.achieved_tol,
    )
