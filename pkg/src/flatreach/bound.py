"""The comparison construction behind the reach lower bound C_hat / lambda.

Frame: the curve passes through the origin with horizontal tangent. A flat
norm minimizer at scale lambda has curvature at most lambda, so near the
origin it stays inside the "butterfly" R1 = [-x, x] x [-1/lambda, 1/lambda]
minus the two open disks of radius 1/lambda centred at (0, +-1/lambda). A
second arc at distance 2 rho (a candidate bottleneck of half-width rho)
stays in the translate R2 centred on y = -2 rho. Cutting both arcs at
x = +-t and reconnecting them by the vertical segments L(+-t) removes track
length >= 4t while adding 4y + 4 rho of segment length and at most
2(2 rho t + t y) of area. When that trade is profitable the original curve
could not have been a minimizer, which bounds rho from below.

With x = cos(theta)/lambda and y the cap depth, the break-even rho is
C(theta)/lambda; C_hat = sup C(theta) ~ 0.2217.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .exceptions import DomainError, ParameterError

THETA_LO = 1.5 * math.pi
THETA_HI = 2.0 * math.pi
INSET = 1e-9
PRESCAN_POINTS = 10_000
_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class BoundSpec:
    lam: float
    rho: float
    x: float
    y: float
    theta: float

    @classmethod
    def from_theta(cls, theta: float, lam: float, rho: float = 0.0) -> BoundSpec:
        x = math.cos(theta) / lam
        return cls(lam, rho, x, cap_depth(x, lam), theta)


@dataclass(frozen=True)
class ImprovementWitness:
    holds: bool
    theta_used: float
    lhs: float
    rhs: float
    margin: float
    x: float
    y: float


@dataclass(frozen=True)
class CappedRectangle:
    """[-x, x] x [c - r, c + r] minus the open disks of radius r centred (0, c +- r)."""

    x: float
    center_y: float
    radius: float

    def depth(self, t):
        t = np.asarray(t, dtype=float)
        return self.radius - np.sqrt(self.radius**2 - t**2)

    def contains(self, points, tol: float = 1e-12) -> np.ndarray:
        p = np.atleast_2d(np.asarray(points, dtype=float))
        inside_x = np.abs(p[:, 0]) <= self.x + tol
        t = np.clip(p[:, 0], -self.x, self.x)
        return inside_x & (np.abs(p[:, 1] - self.center_y) <= self.depth(t) + tol)

    def outline(self, n: int = 64) -> np.ndarray:
        """Closed polygon (counterclockwise) of the region."""
        t = np.linspace(-self.x, self.x, n)
        bottom = np.column_stack([t, self.center_y - self.depth(t)])
        top = np.column_stack([t[::-1], self.center_y + self.depth(t[::-1])])
        return np.vstack([bottom, top])


@dataclass(frozen=True)
class ConstructionRegions:
    lam: float
    rho: float
    x: float
    y: float
    R1: CappedRectangle
    R2: CappedRectangle
    sstar: np.ndarray  # polygon of S*, counterclockwise
    track_length: float  # both worst-case arcs together
    cut_length: float  # L(-x) + L(x)
    sstar_area: float
    butterfly_bound: float


def cap_depth(x: float, lam: float) -> float:
    """Sagitta of a circular cap of radius 1/lam and half-width x.

    >>> round(cap_depth(0.6, 1.0), 12)
    0.2
    """
    if not lam > 0:
        raise ParameterError(f"lambda must be positive, got {lam}")
    r = 1.0 / lam
    if x < 0 or x > r * (1 + 1e-15):
        raise DomainError(f"x must lie in [0, 1/lambda] = [0, {r}], got {x}")
    return r - math.sqrt(max(r * r - x * x, 0.0))


def mass_lower_bound(x: float) -> float:
    """Least combined length 4x of two tracks crossing [-x, x]."""
    return 4.0 * x


def mass_upper_bound(x: float, y: float, rho: float, lam: float) -> float:
    """Segment cost 4y + 4 rho plus lam times the butterfly area bound 2(2 rho x + x y)."""
    return (4.0 * y + 2.0 * (2.0 * rho)) + lam * (2.0 * (2.0 * rho * x + x * y))


def _c(theta):
    c, s = np.cos(theta), np.sin(theta)
    return (2 * c - (1 + s) * (c + 2)) / (2 * (c + 1))


def c_of_theta(theta):
    """Break-even scaled reach C(theta) for theta in the open interval (3 pi/2, 2 pi)."""
    th = np.asarray(theta, dtype=float)
    if np.any(~((th > THETA_LO) & (th < THETA_HI))):
        raise DomainError("theta must lie in the open interval (3*pi/2, 2*pi)")
    out = _c(th)
    return float(out) if out.ndim == 0 else out


def cartesian_c(theta, lam: float = 1.0):
    """lam * (4x - 2y(lam x + 2)) / (4(lam x + 1)) with x = cos(theta)/lam, y the cap depth."""
    th = np.asarray(theta, dtype=float)
    x = np.cos(th) / lam
    r = 1.0 / lam
    y = r - np.sqrt(np.maximum(r * r - x * x, 0.0))
    out = lam * (4 * x - 2 * y * (lam * x + 2)) / (4 * (lam * x + 1))
    return float(out) if out.ndim == 0 else out


def golden_section_max(f, a: float, b: float, tol: float) -> float:
    """Maximizer of a unimodal f on [a, b], to bracket width tol."""
    c = b - _INVPHI * (b - a)
    d = a + _INVPHI * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - _INVPHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INVPHI * (b - a)
            fd = f(d)
    return 0.5 * (a + b)


def _check_unimodal(values: np.ndarray) -> None:
    k = int(np.argmax(values))
    rising = np.diff(values[: k + 1])
    falling = np.diff(values[k:])
    if np.any(rising < 0) or np.any(falling > 0):
        raise RuntimeError("C(theta) is not unimodal on the sampled grid")


@lru_cache(maxsize=16)
def optimize_c(tol: float = 1e-10) -> tuple[float, float]:
    """(C_hat, theta_star): the maximum of C(theta) and where it is attained.

    Golden-section search on (3 pi/2 + 1e-9, 2 pi - 1e-9) after a 10^4-point
    scan that checks unimodality.
    """
    if not tol > 0:
        raise ParameterError("tol must be positive")
    a, b = THETA_LO + INSET, THETA_HI - INSET
    _check_unimodal(_c(np.linspace(a, b, PRESCAN_POINTS)))
    theta = golden_section_max(lambda t: float(_c(t)), a, b, tol)
    return float(_c(theta)), theta


def verify_improvement(lam: float, rho: float, tol: float = 1e-10) -> ImprovementWitness:
    """Whether cutting at x = cos(theta_star)/lam strictly lowers the energy.

    Evaluates 4x > (4y + 4 rho) + lam * 2(2 rho x + x y); this holds exactly
    when rho < C_hat / lam.
    """
    if not lam > 0:
        raise ParameterError(f"lambda must be positive, got {lam}")
    if rho < 0:
        raise ParameterError(f"rho must be nonnegative, got {rho}")
    _, theta = optimize_c(tol)
    x = math.cos(theta) / lam
    y = cap_depth(x, lam)
    lhs = mass_lower_bound(x)
    rhs = mass_upper_bound(x, y, rho, lam)
    return ImprovementWitness(lhs > rhs, theta, lhs, rhs, lhs - rhs, x, y)


def build_construction(lam: float, rho: float, x: float, n: int = 129) -> ConstructionRegions:
    """Regions R1, R2 and the worst-case S* for half-width x, with exact masses.

    The worst case pushes the upper track onto the top cap of R1,
    y = d(t), and the lower track onto the bottom cap of R2,
    y = -2 rho - d(t); S* is the region between them over [-x, x].
    """
    if not lam > 0:
        raise ParameterError(f"lambda must be positive, got {lam}")
    if rho < 0:
        raise ParameterError(f"rho must be nonnegative, got {rho}")
    r = 1.0 / lam
    if not 0 < x < r:
        raise DomainError(f"x must lie in (0, 1/lambda) = (0, {r}), got {x}")
    y = cap_depth(x, lam)
    R1 = CappedRectangle(x, 0.0, r)
    R2 = CappedRectangle(x, -2.0 * rho, r)
    t = np.linspace(-x, x, n)
    d = R1.depth(t)
    upper = np.column_stack([t, d])
    lower = np.column_stack([t, -2.0 * rho - d])
    sstar = np.vstack([lower, upper[::-1]])
    arc = 2.0 * r * math.asin(x / r)
    area = 4.0 * rho * x + 2.0 * (2.0 * x * r - x * math.sqrt(r * r - x * x) - r * r * math.asin(x / r))
    return ConstructionRegions(
        lam=float(lam),
        rho=float(rho),
        x=float(x),
        y=y,
        R1=R1,
        R2=R2,
        sstar=sstar,
        track_length=2.0 * arc,
        cut_length=2.0 * (2.0 * rho + 2.0 * y),
        sstar_area=area,
        butterfly_bound=2.0 * (2.0 * rho * x + x * y),
    )


def lemma4_check(m_gamma: float, m_s: float, m_gamma_star: float, m_s_star: float, lam: float) -> bool:
    """Energy-improvement composition for Gamma = T - dS.

    True iff the modification (Gamma*, S*) beats Gamma locally,
    ``m_gamma > m_gamma_star + lam * m_s_star``. In that case the composed
    decomposition also beats (Gamma, S), since M(S + S*) <= M(S) + M(S*):
    ``m_gamma + lam * m_s > m_gamma_star + lam * (m_s + m_s_star)``.
    """
    if min(m_gamma, m_s, m_gamma_star, m_s_star) < 0:
        raise ParameterError("masses must be nonnegative")
    if not lam > 0:
        raise ParameterError(f"lambda must be positive, got {lam}")
    improves = m_gamma > m_gamma_star + lam * m_s_star
    if improves and not m_gamma + lam * m_s > m_gamma_star + lam * (m_s + m_s_star):
        raise ArithmeticError("composed energy inequality failed")
    return improves
