"""Projective measurement bases and the grid + simplex search used to optimise over them."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import minimize

from .qmat import PAULI


@dataclass(frozen=True)
class OptimizerConfig:
    """Settings for the minimisation over measurement bases.

    ``grid_theta`` x ``grid_phi`` is the coarse Bloch-angle grid for a measured
    qubit; the best ``starts`` grid cells are refined with Nelder-Mead.
    Measured registers of two or three qubits are seeded on the product grid
    ``product_theta`` x ``product_phi`` per qubit and the best ``multi_starts``
    seeds are refined over general unitaries.
    """

    grid_theta: int = 25
    grid_phi: int = 49
    starts: int = 5
    max_iter: int = 400
    tol: float = 1e-6
    seed: int = 0
    product_theta: int = 9
    product_phi: int = 17
    multi_starts: int = 2
    multi_max_evals: int = 2500

    def __post_init__(self):
        counts = {
            "grid_theta": self.grid_theta, "grid_phi": self.grid_phi,
            "starts": self.starts, "max_iter": self.max_iter,
            "product_theta": self.product_theta, "product_phi": self.product_phi,
            "multi_starts": self.multi_starts, "multi_max_evals": self.multi_max_evals,
        }
        for name, value in counts.items():
            if int(value) < 1:
                raise ValueError(f"{name} must be >= 1, got {value!r}")
        if not self.tol > 0:
            raise ValueError(f"tol must be > 0, got {self.tol!r}")


@dataclass(frozen=True)
class MeasurementBasis:
    """Complete set of rank-one orthogonal projectors on a d-dimensional system."""

    dim: int
    projectors: tuple[np.ndarray, ...] = field(repr=False)
    params: tuple[float, ...] = ()

    @classmethod
    def from_unitary(cls, u: np.ndarray, params: Sequence[float] = ()) -> "MeasurementBasis":
        u = np.asarray(u, dtype=complex)
        projs = tuple(np.outer(u[:, k], u[:, k].conj()) for k in range(u.shape[1]))
        return cls(u.shape[0], projs, tuple(float(p) for p in params))

    @classmethod
    def qubit(cls, theta: float, phi: float) -> "MeasurementBasis":
        return cls.from_unitary(qubit_basis_unitary(theta, phi), (theta, phi))

    def check(self, atol: float = 1e-10) -> bool:
        eye = np.eye(self.dim)
        total = np.zeros((self.dim, self.dim), dtype=complex)
        for a, p in enumerate(self.projectors):
            if np.max(np.abs(p - p.conj().T)) > atol or np.max(np.abs(p @ p - p)) > atol:
                return False
            for q in self.projectors[a + 1:]:
                if np.max(np.abs(p @ q)) > atol:
                    return False
            total = total + p
        return len(self.projectors) == self.dim and np.max(np.abs(total - eye)) <= atol


def bloch_direction(theta, phi) -> np.ndarray:
    theta, phi = np.asarray(theta, float), np.asarray(phi, float)
    return np.stack(
        [np.sin(theta) * np.cos(phi), np.sin(theta) * np.sin(phi), np.cos(theta)], axis=-1
    )


def qubit_basis_unitary(theta: float, phi: float) -> np.ndarray:
    """Columns are the +n and -n eigenvectors of n.sigma for n = n(theta, phi)."""
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    e = np.exp(1j * phi)
    return np.array([[c, -s * e.conjugate()], [s * e, c]], dtype=complex)


def angle_grid(n_theta: int, n_phi: int) -> tuple[np.ndarray, np.ndarray]:
    """theta over [0, pi] inclusive, phi over [0, 2 pi) exclusive; flattened, theta major."""
    th = np.linspace(0.0, np.pi, n_theta)
    ph = np.linspace(0.0, 2 * np.pi, n_phi, endpoint=False)
    tt, pp = np.meshgrid(th, ph, indexing="ij")
    return tt.ravel(), pp.ravel()


def hemisphere_directions(n_theta: int, n_phi: int) -> np.ndarray:
    """Grid directions with theta <= pi/2, one entry for the pole.

    n and -n define the same qubit basis, so the lower hemisphere of a
    (n_theta x n_phi) grid adds nothing for basis searches.
    """
    th = np.linspace(0.0, np.pi, n_theta)
    th = th[th <= np.pi / 2 + 1e-12]
    ph = np.linspace(0.0, 2 * np.pi, n_phi, endpoint=False)
    angles = [(0.0, 0.0)] + [(t, p) for t in th if t > 0 for p in ph]
    return np.array(angles)


def projector_coefficients(directions: np.ndarray) -> np.ndarray:
    """Pauli coefficients of (I +/- n.sigma)/2 for each direction.

    Returns shape (len(directions), 2, 4): outcome axis is (+, -).
    """
    n = bloch_direction(directions[:, 0], directions[:, 1])
    out = np.empty((len(directions), 2, 4))
    out[:, :, 0] = 0.5
    out[:, 0, 1:] = 0.5 * n
    out[:, 1, 1:] = -0.5 * n
    return out


def pauli_tensor(rho4: np.ndarray, m: int) -> np.ndarray:
    """Pauli components of the measured register, kept side left as a matrix.

    ``rho4`` has shape (dk, 2**m, dk, 2**m) with the kept system first. The
    result R has shape (4,)*m + (dk, dk) with
    R[k1..km] = Tr_meas[(I x sigma_k1 x .. x sigma_km) rho].
    """
    dk = rho4.shape[0]
    t = rho4.reshape((dk,) + (2,) * m + (dk,) + (2,) * m)
    # -> (kept_row, kept_col, r1, c1, r2, c2, ...)
    order = [0, m + 1] + [ax for q in range(m) for ax in (1 + q, m + 2 + q)]
    t = t.transpose(order)
    paulis_t = np.stack([p.T for p in PAULI])  # Tr[s X] = sum_ab s[b,a] X[a,b]
    for _ in range(m):
        # new Pauli axes accumulate at the end in qubit order
        t = np.tensordot(t, paulis_t, axes=([2, 3], [1, 2]))
    return np.moveaxis(t, [0, 1], [-2, -1])


def givens_layers(d: int) -> list[tuple[np.ndarray, np.ndarray]]:
    """Round-robin schedule of the d(d-1)/2 index pairs into d-1 layers of disjoint pairs."""
    if d == 2:
        return [(np.array([0]), np.array([1]))]
    players = list(range(d))
    layers = []
    for _ in range(d - 1):
        pairs = [(players[i], players[d - 1 - i]) for i in range(d // 2)]
        p = np.array([min(a, b) for a, b in pairs])
        q = np.array([max(a, b) for a, b in pairs])
        layers.append((p, q))
        players = [players[0]] + [players[-1]] + players[1:-1]
    return layers


_LAYER_CACHE: dict[int, list[tuple[np.ndarray, np.ndarray]]] = {}


def givens_unitary(d: int, params: np.ndarray) -> np.ndarray:
    """Product of d(d-1)/2 complex Givens rotations, one per index pair.

    ``params`` holds (theta, phi) per rotation, rotations ordered layer by layer
    as in :func:`givens_layers`; all-zero parameters give the identity.
    """
    layers = _LAYER_CACHE.get(d)
    if layers is None:
        layers = _LAYER_CACHE.setdefault(d, givens_layers(d))
    params = np.asarray(params, float).reshape(-1, 2)
    c, s = np.cos(params[:, 0]), np.sin(params[:, 0])
    e = np.exp(1j * params[:, 1])
    u = np.eye(d, dtype=complex)
    k = 0
    for p, q in layers:
        sl = slice(k, k + len(p))
        up, uq = u[:, p], u[:, q]
        u[:, p] = c[sl] * up + (s[sl] * e[sl].conj()) * uq
        u[:, q] = -(s[sl] * e[sl]) * up + c[sl] * uq
        k += len(p)
    return u


def n_givens_params(d: int) -> int:
    return d * (d - 1)


@dataclass
class SearchResult:
    value: float
    x: np.ndarray
    evaluations: int
    achieved_tol: float
    seed_value: float
    improved: bool
    start_index: int


def refine_from_starts(
    objective: Callable[[np.ndarray], float],
    starts: Sequence[np.ndarray],
    seed_values: Sequence[float],
    step: float | np.ndarray,
    cfg: OptimizerConfig,
    *,
    max_evals: int | None = None,
    fatol: float | None = None,
) -> SearchResult:
    """Nelder-Mead from each start; deterministic minimum by (value, start index).

    Start ``k`` gets an initial simplex drawn from ``default_rng([seed, k])`` so
    the refinement of a given start never depends on how many starts run.
    """
    fatol = cfg.tol if fatol is None else fatol
    best: SearchResult | None = None
    total = 0
    for k, (x0, v0) in enumerate(zip(starts, seed_values)):
        x0 = np.asarray(x0, float)
        dim = x0.size
        rng = np.random.default_rng([cfg.seed, k])
        signs = rng.choice([-1.0, 1.0], size=dim)
        simplex = np.tile(x0, (dim + 1, 1))
        simplex[1:] += np.diag(signs * np.broadcast_to(step, (dim,)))
        opts = {"initial_simplex": simplex, "xatol": 1e-9, "fatol": fatol, "adaptive": dim > 4}
        if max_evals is not None:
            opts["maxfev"] = max_evals
        else:
            opts["maxiter"] = cfg.max_iter
        res = minimize(objective, x0, method="Nelder-Mead", options=opts)
        total += int(res.nfev)
        fvals = res.final_simplex[1]
        value = float(res.fun)
        if value > v0:
            value, x = float(v0), x0
        else:
            x = np.asarray(res.x, float)
        cand = SearchResult(
            value=value, x=x, evaluations=0,
            achieved_tol=float(np.max(fvals) - np.min(fvals)),
            seed_value=float(v0), improved=value < v0 - 1e-15, start_index=k,
        )
        if best is None or (cand.value, cand.start_index) < (best.value, best.start_index):
            best = cand
    assert best is not None
    best.evaluations = total
    return best
