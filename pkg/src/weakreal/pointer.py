"""Von Neumann measurement with a Gaussian pointer, followed by post-selection.

The impulsive coupling exp(-i d A P) shifts the pointer by d*lambda_j on
each eigenspace of A. After post-selection the pointer is an exact
Gaussian mixture, so every moment has a closed form. hbar = 1.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from math import erf
from typing import Sequence

import numpy as np

from .hilbert import HermitianOperator, Projector, as_matrix, eigendecompose
from .weakvalue import PPSPair, weak_value

NORM_TOL = 1e-10
STRONG_REGIME = 1e-3


class PointerError(ValueError):
    """The post-selected pointer state has zero norm."""


@dataclass(frozen=True)
class CouplingConfig:
    d: float
    epsilon: float
    # which physical variable plays the pointer role ("position" or "momentum")
    quadrature: str = "position"

    def __post_init__(self):
        for name in ("d", "epsilon"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise ValueError(f"{name} must be finite and positive, got {v}")
        if self.quadrature not in ("position", "momentum"):
            raise ValueError(f"unknown quadrature {self.quadrature!r}")

    @property
    def strength(self) -> float:
        """d/epsilon; small means weak."""
        return self.d / self.epsilon


@dataclass(frozen=True, eq=False)
class PointerState:
    """psi(x) = sum_j c_j G(x - mu_j), G the unit-norm Gaussian of width epsilon."""

    coefficients: np.ndarray
    centers: np.ndarray
    width: float
    normalized: bool = False
    # squared norm before renormalization: the post-selection probability
    weight: float | None = None

    def __post_init__(self):
        c = np.array(self.coefficients, dtype=complex).reshape(-1)
        mu = np.array(self.centers, dtype=float).reshape(-1)
        if c.shape != mu.shape:
            raise ValueError("coefficients and centers differ in length")
        object.__setattr__(self, "coefficients", c)
        object.__setattr__(self, "centers", mu)
        if self.normalized and abs(self.norm_squared() - 1) > NORM_TOL:
            raise ValueError(f"state flagged normalized has norm^2 {self.norm_squared()}")

    @property
    def terms(self) -> list[tuple[complex, float]]:
        return list(zip(self.coefficients.tolist(), self.centers.tolist()))

    def overlaps(self) -> np.ndarray:
        """S_jk = <G_j|G_k> = exp(-(mu_j - mu_k)^2 / (4 eps^2))."""
        diff = self.centers[:, None] - self.centers[None, :]
        return np.exp(-(diff**2) / (4 * self.width**2))

    def _weights(self) -> np.ndarray:
        c = self.coefficients
        return np.conj(c)[:, None] * c[None, :]

    def norm_squared(self) -> float:
        return float(np.sum(self._weights() * self.overlaps()).real)

    def renormalized(self) -> "PointerState":
        n2 = self.norm_squared()
        if n2 <= 0:
            raise PointerError("pointer state has zero norm")
        return PointerState(self.coefficients / math.sqrt(n2), self.centers, self.width, True, n2)

    def __call__(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        eps = self.width
        g = (math.pi * eps**2) ** -0.25 * np.exp(-((x[..., None] - self.centers) ** 2) / (2 * eps**2))
        return g @ self.coefficients

    def momentum_amplitudes(self, p) -> np.ndarray:
        """Fourier transform: sum_j c_j (eps^2/pi)^(1/4) exp(-eps^2 p^2 / 2 - i p mu_j)."""
        p = np.asarray(p, dtype=float)
        eps = self.width
        env = (eps**2 / math.pi) ** 0.25 * np.exp(-(eps**2) * p**2 / 2)
        phase = np.exp(-1j * p[..., None] * self.centers)
        return env * (phase @ self.coefficients)


def _spectrum(op, dim: int) -> tuple[np.ndarray, list[Projector]]:
    if isinstance(op, Projector):
        if op.rank == dim:
            return np.array([1.0]), [op]
        if op.support is not None:
            rest = [i for i in range(dim) if i not in op.support]
            comp = Projector(dim, support=rest, label="not " + op.label)
        else:
            comp = Projector(dim, matrix=np.eye(dim) - op.matrix, label="not " + op.label)
        return np.array([0.0, 1.0]), [comp, op]
    return eigendecompose(op if isinstance(op, HermitianOperator) else HermitianOperator(as_matrix(op)))


def branch_amplitudes(pps: PPSPair, op) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues lambda_j and c_j = <phi|Pi_j|psi> for the normalized boundary states."""
    values, projs = _spectrum(op, pps.dim)
    psi = pps.pre.amplitudes / pps.pre.norm()
    phi = pps.post.amplitudes / pps.post.norm()
    return values, np.array([p.sandwich(phi, psi) for p in projs])


def measure_and_postselect(
    pps: PPSPair, op, cfg: CouplingConfig, renormalize: bool = True
) -> PointerState:
    values, c = branch_amplitudes(pps, op)
    state = PointerState(c, cfg.d * values, cfg.epsilon)
    n2 = state.norm_squared()
    if n2 <= 1e-300 or not np.any(np.abs(c) > 0):
        raise PointerError("post-selection is orthogonal to every measurement branch")
    if not renormalize:
        return PointerState(c, cfg.d * values, cfg.epsilon, weight=n2)
    return state.renormalized()


def pointer_moments(ps: PointerState) -> tuple[float, float]:
    """Exact <x> and <p> of a Gaussian mixture.

    Position uses <G_j|x|G_k> = S_jk (mu_j + mu_k)/2; momentum uses the
    transformed mixture, where the cross term is S_jk * i (mu_j - mu_k)/(2 eps^2).
    """
    s = ps.overlaps()
    w = ps._weights()
    n2 = float(np.sum(w * s).real)
    mid = (ps.centers[:, None] + ps.centers[None, :]) / 2
    mean_x = np.sum(w * s * mid).real / n2
    mean_p = np.sum(w * _momentum_cross(ps)).real / n2
    return float(mean_x), float(mean_p)


def _momentum_cross(ps: PointerState) -> np.ndarray:
    # int p * conj(G~_j(p)) G~_k(p) dp, with G~_j(p) = env(p) exp(-i p mu_j):
    # a Gaussian integral over p with linear phase (mu_j - mu_k)
    eps = ps.width
    delta = ps.centers[:, None] - ps.centers[None, :]
    return 1j * delta / (2 * eps**2) * np.exp(-(delta**2) / (4 * eps**2))


@dataclass(frozen=True)
class StrongLimitResult:
    probabilities: np.ndarray
    eigenvalues: np.ndarray
    epsilon_over_d: float
    in_regime: bool


def strong_limit_probabilities(pps: PPSPair, op, cfg: CouplingConfig) -> StrongLimitResult:
    """Pointer mass in the cell around each center d*lambda_j.

    Cells are split at midpoints between neighbouring centers. Cross terms
    enter through erf integrals, so the result is exact for any epsilon;
    it approaches the ABL probabilities once epsilon/d is small.
    """
    values, c = branch_amplitudes(pps, op)
    centers = cfg.d * values
    eps = cfg.epsilon
    edges = np.concatenate(([-np.inf], (centers[:-1] + centers[1:]) / 2, [np.inf]))
    diff = centers[:, None] - centers[None, :]
    s = np.exp(-(diff**2) / (4 * eps**2))
    mid = (centers[:, None] + centers[None, :]) / 2
    w = np.conj(c)[:, None] * c[None, :]
    masses = np.empty(len(values))
    for n in range(len(values)):
        a, b = edges[n], edges[n + 1]
        frac = np.vectorize(lambda m: 0.5 * (_erf((b - m) / eps) - _erf((a - m) / eps)))(mid)
        masses[n] = float(np.sum(w * s * frac).real)
    total = masses.sum()
    if total <= 0:
        raise PointerError("post-selection is orthogonal to every measurement branch")
    gap = np.min(np.diff(values)) if len(values) > 1 else 1.0
    ratio = float(eps / (cfg.d * gap))
    return StrongLimitResult(masses / total, values, ratio, bool(ratio <= STRONG_REGIME))


def _erf(z: float) -> float:
    if z == math.inf:
        return 1.0
    if z == -math.inf:
        return -1.0
    return erf(z)


@dataclass(frozen=True)
class WeakPoint:
    strength: float  # d/epsilon
    mean_x: float
    mean_p: float
    predicted_x: float
    predicted_p: float
    error_x: float  # |<x> - d Re A_w| / d
    error_p: float  # |<p> - d Im A_w / eps^2| * eps^2 / d


@dataclass(frozen=True)
class WeakLimitReport:
    weak_value: complex
    d: float
    points: tuple[WeakPoint, ...]

    def ratios(self, attr: str = "error_x") -> list[float]:
        """Error reduction between consecutive sweep points (inf when exact)."""
        errs = [getattr(p, attr) for p in self.points]
        out = []
        for a, b in zip(errs, errs[1:]):
            out.append(math.inf if b == 0 else a / b)
        return out

    def second_order(self, attr: str = "error_x", factor: float = 2.0, floor: float = 1e-12) -> bool:
        """True when each decade of d/epsilon cuts the error about 100x.

        Errors at or below ``floor`` count as exact and pass.
        """
        pts = self.points
        for p, q in zip(pts, pts[1:]):
            e1, e2 = getattr(p, attr), getattr(q, attr)
            if e2 <= floor:
                continue
            expected = (p.strength / q.strength) ** 2
            r = e1 / e2
            if not expected / factor <= r <= expected * factor:
                return False
        return True

    def to_json(self) -> dict:
        return {
            "weak_value": self.weak_value,
            "d": self.d,
            "points": [p.__dict__ for p in self.points],
        }


def weak_limit_check(
    pps: PPSPair,
    op,
    d: float = 1.0,
    strengths: Sequence[float] = (1e-1, 1e-2, 1e-3),
) -> WeakLimitReport:
    """Compare exact pointer moments against the first-order weak-value shifts.

    ``d`` is fixed and epsilon = d / strength for each sweep point.
    """
    aw = weak_value(pps, as_matrix(op) if not isinstance(op, Projector) else op)
    points = []
    for k in strengths:
        cfg = CouplingConfig(d, d / k)
        mx, mp = pointer_moments(measure_and_postselect(pps, op, cfg))
        px = d * aw.real
        pp = d * aw.imag / cfg.epsilon**2
        points.append(WeakPoint(
            k, mx, mp, px, pp,
            abs(mx - px) / d,
            abs(mp - pp) * cfg.epsilon**2 / d,
        ))
    return WeakLimitReport(aw, d, tuple(points))
