"""Independent reference computations used to freeze expected values.

Nothing here imports the package's solvers: states are built with plain numpy
and spectra come from ``numpy.linalg.eigvalsh``. Run this module directly to
print the frozen constants used by the tests.
"""
from __future__ import annotations

import numpy as np

SQ2 = np.sqrt(2.0)


def ket(bits: str) -> np.ndarray:
    v = np.zeros(2 ** len(bits))
    v[int(bits, 2)] = 1.0
    return v


PSI_PLUS = (ket("01") + ket("10")) / SQ2


def deleted_pair(p0: float) -> np.ndarray:
    """2->1 deleter output for |alpha|^2 = p0, written out by hand."""
    p1 = 1 - p0
    return (p0**2 * np.outer(ket("00"), ket("00")) + p1**2 * np.outer(ket("10"), ket("10"))
            + 2 * p0 * p1 * np.outer(PSI_PLUS, PSI_PLUS))


def _entropy(eigs: np.ndarray) -> np.ndarray:
    e = np.clip(eigs, 0.0, None)
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(e > 1e-15, -e * np.log2(e), 0.0)
    return terms.sum(axis=-1)


def fine_grid_discord(rho: np.ndarray, n_theta: int = 721, n_phi: int = 1441) -> float:
    """Two-qubit discord, measurement on qubit 1, by brute force over a dense angle grid.

    Each basis is built as explicit projectors |n><n| and |-n><-n|, the post-measurement
    states are formed by (I x P) rho (I x P) and traced, and spectra use eigvalsh.
    """
    r4 = rho.reshape(2, 2, 2, 2)
    rho_a = np.einsum("ijkj->ik", r4)
    rho_b = np.einsum("jijk->ik", r4)
    s_ab = _entropy(np.linalg.eigvalsh(rho))
    s_a = _entropy(np.linalg.eigvalsh(rho_a))
    s_b = _entropy(np.linalg.eigvalsh(rho_b))

    th = np.linspace(0, np.pi, n_theta)
    ph = np.linspace(0, 2 * np.pi, n_phi)
    best = np.inf
    for t in th:
        up = np.stack([np.full(ph.shape, np.cos(t / 2)), np.sin(t / 2) * np.exp(1j * ph)], axis=1)
        dn = np.stack([-np.sin(t / 2) * np.exp(-1j * ph), np.full(ph.shape, np.cos(t / 2))], axis=1)
        total = np.zeros(ph.shape)
        for v in (up, dn):
            proj = np.einsum("pi,pj->pij", v, v.conj())  # (P, 2, 2) on qubit 1
            # Tr_b[(I x P) rho (I x P)] = sum_{jk} P[k, j] rho[a j, a' k]
            cond = np.einsum("ijlk,pkj->pil", r4, proj)
            cond = 0.5 * (cond + np.conj(np.swapaxes(cond, 1, 2)))
            p = np.real(np.trace(cond, axis1=1, axis2=2))
            eig = np.linalg.eigvalsh(cond)
            with np.errstate(divide="ignore", invalid="ignore"):
                ent = np.where(p > 1e-14, _entropy(eig / np.where(p > 0, p, 1)[:, None]), 0.0)
            total += p * ent
        best = min(best, float(total.min()))
    mutual = s_a + s_b - s_ab
    classical = s_a - best
    return mutual - classical


def bloch_geometric_discord(rho: np.ndarray) -> float:
    """2 Tr S - 2 k_max from Pauli expectation values and eigvalsh."""
    paulis = [np.array([[0, 1], [1, 0]]), np.array([[0, -1j], [1j, 0]]), np.diag([1, -1])]
    eye = np.eye(2)
    x = np.array([np.real(np.trace(rho @ np.kron(s, eye))) for s in paulis])
    t = np.array([[np.real(np.trace(rho @ np.kron(s, u))) for u in paulis] for s in paulis])
    s_mat = (np.outer(x, x) + t @ t.T) / 4
    return float(2 * np.trace(s_mat) - 2 * np.linalg.eigvalsh(s_mat)[-1])


def random_unitary(d: int, rng: np.random.Generator) -> np.ndarray:
    z = (rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))) / SQ2
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def hermitian_with_spectrum(eigs: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """U diag(eigs) U^dagger for a Haar-like U: the spectrum is known by construction."""
    u = random_unitary(len(eigs), rng)
    return u @ np.diag(eigs) @ u.conj().T


def random_density(d: int, rng: np.random.Generator) -> np.ndarray:
    g = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    m = g @ g.conj().T
    return m / np.trace(m)


def negativity_oracle(rho: np.ndarray) -> float:
    pt = rho.reshape(2, 2, 2, 2).transpose(2, 1, 0, 3).reshape(4, 4)
    e = np.linalg.eigvalsh(pt)
    return float(-e[e < 0].sum())


if __name__ == "__main__":
    print("fine-grid discord of the deleted pair at |alpha|^2 = 1/2:",
          repr(fine_grid_discord(deleted_pair(0.5))))
