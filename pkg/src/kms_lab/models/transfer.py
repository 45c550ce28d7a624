"""Numerical fixed point of the weighted pull-back for a rotation.

Finds the probability measure nu on [0, 1) with nu(R_alpha E) = int_E e^{-beta F} d nu
for a piecewise-constant F, as a piecewise-constant density.

The grid is adapted to the rotation: its breakpoints are the backward orbits
b - k alpha (k = 0, 1, ...) of 0 and of the jump points of F.  The preimage of
a cell is then, up to the few newest points, an exact union of cells, so the
discretized operator stays close to a weighted permutation and its Perron
vector reproduces the RN identity far better than a uniform grid of equal size.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spl

from ..errors import NoConvergence
from ..measures import CircleDensity


@dataclass(frozen=True)
class PiecewisePotential:
    """F = values[i] on [breaks[i-1], breaks[i]) with implicit breaks 0 and 1."""

    breaks: tuple[float, ...]
    values: tuple[float, ...]

    def __post_init__(self):
        if len(self.values) != len(self.breaks) + 1:
            raise ValueError("need one value per piece")
        if any(not 0 < b < 1 for b in self.breaks) or list(self.breaks) != sorted(self.breaks):
            raise ValueError("breaks must be increasing inside (0, 1)")

    def __call__(self, x):
        x = np.asarray(x, dtype=float) % 1.0
        return np.asarray(self.values)[np.searchsorted(self.breaks, x, side="right")]


def nakada_potential(gamma: float) -> PiecewisePotential:
    """F_gamma = 1 on [0, gamma/(gamma+1)) and -gamma on [gamma/(gamma+1), 1)."""
    if gamma <= 0:
        raise ValueError("gamma must be positive")
    return PiecewisePotential((gamma / (gamma + 1),), (1.0, -float(gamma)))


@dataclass(frozen=True)
class DensityEstimate:
    density: CircleDensity
    residual: float
    eigenvalue: float
    iterations: int
    grid_size: int
    warm_start: bool

    def to_json(self) -> dict:
        return {"residual": self.residual, "eigenvalue": self.eigenvalue,
                "iterations": self.iterations, "grid_size": self.grid_size,
                "warm_start": self.warm_start}


def orbit_partition(anchors, alpha: float, grid_size: int):
    """Sorted breakpoints {b_i - k alpha mod 1} with labels (i, k); anchor 0 must be 0."""
    per = [grid_size // len(anchors)] * len(anchors)
    for i in range(grid_size - sum(per)):
        per[i] += 1
    values, labels = [], []
    for i, (b, n) in enumerate(zip(anchors, per)):
        k = np.arange(n)
        values.append((b - k * alpha) % 1.0)
        labels.extend((i, int(kk)) for kk in k)
    values = np.concatenate(values)
    order = np.argsort(values, kind="stable")
    values = values[order]
    labels = [labels[j] for j in order]
    keep = np.concatenate([[True], np.diff(values) > 0])
    position = np.cumsum(keep) - 1
    index_of = {lab: int(position[j]) for j, lab in enumerate(labels)}
    return values[keep], index_of, [lab for lab, kp in zip(labels, keep) if kp], per


def pullback_operator(F: PiecewisePotential, alpha: float, beta: float, grid_size: int):
    """Sparse A with (A nu)[J] = int_{R^{-1} J} e^{-beta F} d nu for cell masses nu."""
    anchors = (0.0,) + tuple(F.breaks)
    pts, index_of, labels, per = orbit_partition(anchors, alpha, grid_size)
    N = len(pts)
    left = pts
    right = np.append(pts[1:], 1.0)
    length = right - left
    weight = np.exp(-beta * F((left + right) / 2))
    ext_left = np.concatenate([left - 1, left, left + 1])
    ext_right = np.concatenate([right - 1, right, right + 1])
    ext_idx = np.tile(np.arange(N), 3)

    def preimage(j):
        i, k = labels[j % N]
        if k + 1 < per[i]:
            return pts[index_of[i, k + 1]]  # exactly a breakpoint
        return (pts[j % N] - alpha) % 1.0

    rows, cols, vals = [], [], []
    for j in range(N):
        a = preimage(j)
        b = preimage(j + 1)
        if b <= a:
            b += 1.0
        pos = int(np.searchsorted(ext_left, a, side="right")) - 1
        while ext_left[pos] < b:
            overlap = min(b, ext_right[pos]) - max(a, ext_left[pos])
            if overlap > 0:
                src = ext_idx[pos]
                rows.append(j)
                cols.append(src)
                vals.append(weight[src] * overlap / length[src])
            pos += 1
    A = sp.csr_matrix((vals, (rows, cols)), shape=(N, N))
    return A, left, right


def transfer_density_estimate(F: PiecewisePotential, alpha, beta, grid_size: int = 1 << 14,
                              max_iter: int = 20000, tol: float = 1e-10) -> DensityEstimate:
    """Power-iterate nu -> normalize(E -> int_{R^{-1}E} e^{-beta F} d nu) to an L1 change <= tol.

    The iteration is warm-started from the Perron vector of the discretized
    operator (shift-invert ARPACK); plain power iteration from Haar converges
    far too slowly here because the operator is a near-isometry.
    """
    if grid_size < 1 << 10 or grid_size & (grid_size - 1):
        raise ValueError("grid_size must be a power of two >= 2^10")
    alpha, beta = float(alpha) % 1.0, float(beta)
    A, left, right = pullback_operator(F, alpha, beta, grid_size)
    N = A.shape[0]
    lengths = right - left
    nu, warm = lengths.copy(), False
    for sigma in (1.0, 1.0 + 1e-7):
        try:
            _, vecs = spl.eigs(A, k=1, sigma=sigma)
        except (RuntimeError, spl.ArpackNoConvergence, ValueError):
            continue
        v = np.real(vecs[:, 0])
        v = v / v.sum()
        if np.all(v > -1e-12):
            nu, warm = np.clip(v, 0.0, None), True
            break
    nu = nu / nu.sum()
    residual, iterations, eigenvalue = np.inf, 0, float("nan")
    while iterations < max_iter:
        step = A @ nu
        eigenvalue = float(step.sum())
        step /= eigenvalue
        residual = float(np.abs(step - nu).sum())
        nu = step
        iterations += 1
        if residual <= tol:
            break
    if residual > tol:
        raise NoConvergence(f"L1 change {residual:.3e} > {tol:.1e} after {iterations} steps", residual)
    breaks = np.append(left, 1.0)
    density = CircleDensity(breaks, nu / lengths)
    return DensityEstimate(density, residual, eigenvalue, iterations, N, warm)


def rn_deviation(density: CircleDensity, F: PiecewisePotential, alpha, beta, a: float, b: float) -> float:
    """|nu(R_alpha [a, b)) - int_[a,b) e^{-beta F} d nu| for an arc a < b <= a + 1."""
    alpha, beta = float(alpha), float(beta)
    jumps = (0.0,) + tuple(F.breaks)
    cuts = sorted({a, b} | {c + k for k in range(int(np.floor(a)), int(np.floor(b)) + 1)
                            for c in jumps if a < c + k < b})
    integral = 0.0
    for lo, hi in zip(cuts[:-1], cuts[1:]):
        value = float(F(np.array([(lo + hi) / 2]))[0])
        integral += np.exp(-beta * value) * density.arc(lo, hi)
    return abs(density.arc(a + alpha, b + alpha) - integral)
