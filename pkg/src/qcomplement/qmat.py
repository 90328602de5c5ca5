"""Dense complex linear algebra for small multiqubit registers.

Matrices are plain ``numpy`` complex arrays; qubit 0 is the most significant
index of the computational basis (``tensor`` puts its first argument's
indices major).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from math import comb, prod, sqrt
from typing import Iterable, Sequence

import numpy as np

MATRIX_ATOL = 1e-12
HERMITIAN_TOL = 1e-12
TRACE_TOL = 1e-10
PSD_TOL = 1e-10

JACOBI_REL_TOL = 1e-14
JACOBI_MAX_SWEEPS = 100


def as_matrix(m) -> np.ndarray:
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2:
        raise ValueError(f"expected a 2-D matrix, got shape {a.shape}")
    return a


def matrices_equal(a, b, atol: float = MATRIX_ATOL) -> bool:
    a, b = as_matrix(a), as_matrix(b)
    return a.shape == b.shape and bool(np.all(np.abs(a - b) <= atol))


@dataclass(frozen=True)
class QubitState:
    """Amplitudes of alpha|0> + beta|1>."""

    alpha: complex
    beta: complex

    def __post_init__(self):
        norm = abs(self.alpha) ** 2 + abs(self.beta) ** 2
        if abs(norm - 1.0) > 1e-12:
            raise ValueError(f"|alpha|^2 + |beta|^2 = {norm!r}, expected 1")

    @classmethod
    def from_real(cls, alpha: float) -> "QubitState":
        """Real alpha in [0, 1] with beta = sqrt(1 - alpha^2) >= 0."""
        if not 0.0 <= alpha <= 1.0:
            raise ValueError(f"alpha must lie in [0, 1], got {alpha!r}")
        return cls(complex(alpha), complex(sqrt(max(0.0, 1.0 - alpha * alpha))))

    @classmethod
    def from_population(cls, p0: float) -> "QubitState":
        """State with |alpha|^2 = p0 and real non-negative amplitudes."""
        if not 0.0 <= p0 <= 1.0:
            raise ValueError(f"|alpha|^2 must lie in [0, 1], got {p0!r}")
        return cls(complex(sqrt(p0)), complex(sqrt(1.0 - p0)))

    @property
    def p0(self) -> float:
        return abs(self.alpha) ** 2

    @property
    def p1(self) -> float:
        return abs(self.beta) ** 2

    def vector(self) -> np.ndarray:
        return np.array([self.alpha, self.beta], dtype=complex)

    def projector(self) -> np.ndarray:
        v = self.vector()
        return np.outer(v, v.conj())


@dataclass(frozen=True)
class DensityMatrix:
    """A matrix over the tensor product of subsystems with dimensions ``dims``.

    Construction only checks shapes; use :func:`validate_density` (or
    :meth:`require_valid`) for the Hermitian / unit-trace / PSD invariants.
    """

    dims: tuple[int, ...]
    matrix: np.ndarray = field(repr=False)

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        if not dims or any(d < 2 for d in dims):
            raise ValueError(f"subsystem dimensions must all be >= 2, got {dims}")
        m = as_matrix(self.matrix).copy()
        n = prod(dims)
        if m.shape != (n, n):
            raise ValueError(f"matrix shape {m.shape} does not match dims {dims}")
        m.setflags(write=False)
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "matrix", m)

    @classmethod
    def from_pure(cls, vector, dims: Sequence[int] | None = None) -> "DensityMatrix":
        v = np.asarray(vector, dtype=complex).reshape(-1)
        if dims is None:
            n = int(round(np.log2(v.size)))
            if 2**n != v.size:
                raise ValueError("give dims explicitly for non-qubit registers")
            dims = (2,) * n
        return cls(tuple(dims), np.outer(v, v.conj()))

    @classmethod
    def qubits(cls, matrix) -> "DensityMatrix":
        m = as_matrix(matrix)
        n = int(round(np.log2(m.shape[0])))
        return cls((2,) * n, m)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def n_subsystems(self) -> int:
        return len(self.dims)

    def require_valid(self) -> "DensityMatrix":
        diag = validate_density(self)
        if not diag.valid:
            raise ValueError(f"not a valid density matrix: {diag}")
        return self

    def isclose(self, other: "DensityMatrix", atol: float = MATRIX_ATOL) -> bool:
        return self.dims == other.dims and matrices_equal(self.matrix, other.matrix, atol)


@dataclass(frozen=True)
class DensityDiagnostics:
    hermiticity_defect: float
    trace_defect: float
    min_eigenvalue: float
    hermitian: bool
    unit_trace: bool
    psd: bool

    @property
    def valid(self) -> bool:
        return self.hermitian and self.unit_trace and self.psd


def tensor(a, b) -> np.ndarray:
    """Kronecker product; works for kets as well as matrices."""
    return np.kron(np.asarray(a, dtype=complex), np.asarray(b, dtype=complex))


def tensor_all(factors: Iterable) -> np.ndarray:
    out = np.ones((1, 1), dtype=complex)
    for f in factors:
        out = np.kron(out, as_matrix(f))
    return out


def tensor_states(a: DensityMatrix, b: DensityMatrix) -> DensityMatrix:
    return DensityMatrix(a.dims + b.dims, np.kron(a.matrix, b.matrix))


def _check_indices(dims: tuple[int, ...], indices: Iterable[int]) -> list[int]:
    idx = sorted(set(int(i) for i in indices))
    if not idx:
        raise ValueError("at least one subsystem must be kept")
    for i in idx:
        if not 0 <= i < len(dims):
            raise ValueError(f"subsystem index {i} out of range for dims {dims}")
    return idx


def partial_trace(rho: DensityMatrix, keep: Iterable[int]) -> DensityMatrix:
    """Trace out every subsystem not in ``keep``; kept order is preserved."""
    keep = _check_indices(rho.dims, keep)
    n = len(rho.dims)
    t = rho.matrix.reshape(rho.dims + rho.dims)
    drop = [i for i in range(n) if i not in keep]
    # trace the highest axes first so lower axis numbers stay valid
    for k, i in enumerate(sorted(drop, reverse=True)):
        m = n - k
        t = np.trace(t, axis1=i, axis2=i + m)
    kept_dims = tuple(rho.dims[i] for i in keep)
    d = prod(kept_dims)
    return DensityMatrix(kept_dims, t.reshape(d, d))


def permute_subsystems(rho: DensityMatrix, order: Sequence[int]) -> DensityMatrix:
    """Reorder subsystems so that new subsystem k is old subsystem ``order[k]``."""
    order = list(order)
    if sorted(order) != list(range(len(rho.dims))):
        raise ValueError(f"{order} is not a permutation of the subsystems")
    n = len(order)
    t = rho.matrix.reshape(rho.dims + rho.dims)
    t = t.transpose(order + [n + i for i in order])
    dims = tuple(rho.dims[i] for i in order)
    return DensityMatrix(dims, t.reshape(rho.dim, rho.dim))


def partial_transpose(rho: DensityMatrix, part: int = 0) -> np.ndarray:
    """Transpose the indices of one side of a bipartite state."""
    if len(rho.dims) != 2:
        raise ValueError(f"partial transpose needs a bipartite state, got dims {rho.dims}")
    if part not in (0, 1):
        raise ValueError(f"part must be 0 or 1, got {part!r}")
    da, db = rho.dims
    t = rho.matrix.reshape(da, db, da, db)
    t = t.transpose(2, 1, 0, 3) if part == 0 else t.transpose(0, 3, 2, 1)
    return t.reshape(da * db, da * db)


def _offdiag_norm(a: np.ndarray) -> float:
    return float(np.sqrt(max(0.0, np.sum(np.abs(a) ** 2) - np.sum(np.abs(np.diag(a)) ** 2))))


def hermitian_eigenvalues(m, hermitian_tol: float = 1e-10) -> np.ndarray:
    """Ascending eigenvalues of a Hermitian matrix by cyclic Jacobi rotations.

    Each rotation first removes the phase of the pivot element and then applies
    the real symmetric Jacobi rotation; iteration stops when the off-diagonal
    Frobenius norm drops below ``1e-14 * ||m||_F`` or after 100 sweeps.
    """
    a = as_matrix(m).copy()
    n, n2 = a.shape
    if n != n2:
        raise ValueError(f"matrix must be square, got shape {a.shape}")
    scale = float(np.linalg.norm(a))
    if np.max(np.abs(a - a.conj().T), initial=0.0) > hermitian_tol * max(1.0, scale):
        raise ValueError("matrix is not Hermitian")
    a = 0.5 * (a + a.conj().T)
    if n == 1 or scale == 0.0:
        return np.sort(np.real(np.diag(a)))
    threshold = JACOBI_REL_TOL * scale
    for _ in range(JACOBI_MAX_SWEEPS):
        if _offdiag_norm(a) < threshold:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                mag = abs(apq)
                if mag < 1e-300:
                    continue
                app, aqq = a[p, p].real, a[q, q].real
                theta = (aqq - app) / (2.0 * mag)
                if abs(theta) > 1e150:  # theta**2 would overflow
                    t = 0.5 / abs(theta)
                else:
                    t = 1.0 / (abs(theta) + sqrt(theta * theta + 1.0))
                if theta < 0.0:
                    t = -t
                c = 1.0 / sqrt(t * t + 1.0)
                s = t * c
                phase = apq / mag
                # w = diag(1, conj(phase)) @ [[c, s], [-s, c]]
                w = np.array([[c, s], [-s * phase.conjugate(), c * phase.conjugate()]])
                cols = a[:, [p, q]] @ w
                a[:, p], a[:, q] = cols[:, 0], cols[:, 1]
                rows = w.conj().T @ a[[p, q], :]
                a[p, :], a[q, :] = rows[0], rows[1]
                a[p, q] = a[q, p] = 0.0
                a[p, p] = a[p, p].real
                a[q, q] = a[q, q].real
    return np.sort(np.real(np.diag(a)))


def eigenvalues_2x2(h: np.ndarray) -> np.ndarray:
    """Batched closed-form eigenvalues of Hermitian 2x2 matrices, shape (..., 2).

    This is the single Jacobi rotation of a 2x2 block written out; used on hot
    paths where thousands of conditional states are diagonalised at once.
    """
    a = h[..., 0, 0].real
    d = h[..., 1, 1].real
    b = np.abs(h[..., 0, 1])
    mean = 0.5 * (a + d)
    rad = np.hypot(0.5 * (a - d), b)
    return np.stack([mean - rad, mean + rad], axis=-1)


def basis_ket(bits: str | Sequence[int]) -> np.ndarray:
    """Computational basis vector for a bit string such as ``"01"``."""
    bits = [int(b) for b in bits]
    v = np.zeros(2 ** len(bits), dtype=complex)
    v[int("".join(map(str, bits)) or "0", 2)] = 1.0
    return v


def projector(v, w=None) -> np.ndarray:
    v = np.asarray(v, dtype=complex).reshape(-1)
    w = v if w is None else np.asarray(w, dtype=complex).reshape(-1)
    return np.outer(v, w.conj())


def binomial(x: int, y: int) -> int:
    """x! / (y! (x - y)!), zero outside 0 <= y <= x."""
    if y < 0 or x < 0 or y > x:
        return 0
    return comb(x, y)


def dicke(n: int, j: int) -> np.ndarray:
    """Normalized symmetric n-qubit state with j excitations."""
    if n < 1:
        raise ValueError(f"need at least one qubit, got n={n}")
    if not 0 <= j <= n:
        raise ValueError(f"excitation count {j} outside [0, {n}]")
    idx = np.arange(2**n)
    ones = np.array([bin(i).count("1") for i in idx])
    v = (ones == j).astype(complex)
    return v / sqrt(comb(n, j))


def validate_density(rho: DensityMatrix | np.ndarray) -> DensityDiagnostics:
    m = rho.matrix if isinstance(rho, DensityMatrix) else as_matrix(rho)
    herm = float(np.max(np.abs(m - m.conj().T), initial=0.0))
    tr_defect = float(abs(np.trace(m) - 1.0))
    sym = 0.5 * (m + m.conj().T)
    min_ev = float(hermitian_eigenvalues(sym)[0])
    return DensityDiagnostics(
        hermiticity_defect=herm,
        trace_defect=tr_defect,
        min_eigenvalue=min_ev,
        hermitian=herm <= HERMITIAN_TOL,
        unit_trace=tr_defect <= TRACE_TOL,
        psd=min_ev >= -PSD_TOL,
    )


PAULI = (
    np.eye(2, dtype=complex),
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
)
