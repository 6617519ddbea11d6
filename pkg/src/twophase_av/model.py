"""Two-phase traffic model: fundamental diagram, phase geometry, AV flux cap.

The state of the road is a pair (rho, w) with density rho in [0, R] and
driver aggressiveness w in [w_min, w_max].  The speed law is

    v(rho, w) = min(V_max, w * psi(rho))

which splits the state rectangle into a free phase F = {w*psi(rho) >= V_max}
and a congested phase C = {w*psi(rho) <= V_max}, overlapping on the curve
w*psi(rho) = V_max.  The autonomous vehicle imposes the moving flux cap
F_alpha(w, sigma) = f_alpha1(w) * (V_max - sigma) at its position; the
densities check_rho / hat_rho bracket the non-classical jump that saturates
the cap.

All model functions live on :class:`ModelParams`; states are plain
``(rho, w)`` named tuples.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

FREE = "free"
CONGESTED = "congested"
BOUNDARY = "boundary"  # on F cap C up to the phase tolerance

_HAT_TOL = 1e-12  # absolute residual target for the hat_rho root


class HypothesisViolation(ValueError):
    """A model parameter bundle violates one of the structural hypotheses."""

    def __init__(self, clause: str, detail: str = ""):
        self.clause = clause
        msg = clause if not detail else f"{clause}: {detail}"
        super().__init__(msg)


class NotCongested(ValueError):
    """First-family eigenvalue requested outside the congested phase."""


class NoCongestedRoot(ValueError):
    """hat_rho bracketing failed; parameters are structurally inconsistent."""


class State(NamedTuple):
    rho: float
    w: float


def _horner(coeffs: Sequence[float], x: float) -> float:
    acc = 0.0
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


def _deriv(coeffs: Sequence[float]) -> tuple[float, ...]:
    return tuple(k * coeffs[k] for k in range(1, len(coeffs)))


@dataclass(frozen=True)
class ModelParams:
    """Model constants plus the polynomial specs of psi and f_alpha1.

    Polynomials are coefficient lists in ascending order, e.g. the default
    psi(rho) = 1 - rho is ``(1.0, -1.0)``.  Instances are immutable and safe
    to share across threads.
    """

    R: float = 1.0
    w_min: float = 2.5
    w_max: float = 3.0
    V_max: float = 1.0
    psi_spec: tuple[float, ...] = (1.0, -1.0)
    c_psi: float = 1.0
    C_psi: float = 1.0
    lambda_bar: float = 0.5
    f_alpha1_spec: tuple[float, ...] = (-0.3, 0.2)  # 0.2 + 0.2*(w - 2.5)
    L_F: float = 0.2
    eps_phase: float = field(default=1e-9)

    # -- fundamental diagram -------------------------------------------------

    def psi(self, rho: float) -> float:
        return _horner(self.psi_spec, rho)

    def dpsi(self, rho: float) -> float:
        return _horner(_deriv(self.psi_spec), rho)

    def vtilde(self, rho: float, w: float) -> float:
        """Congested-branch speed w*psi(rho); exceeds V_max on the free phase."""
        return w * self.psi(rho)

    def speed(self, rho: float, w: float) -> float:
        return min(self.V_max, w * self.psi(rho))

    def flux(self, rho: float, w: float) -> float:
        return rho * self.speed(rho, w)

    def lambda1(self, rho: float, w: float) -> float:
        """First characteristic speed w*(rho*psi'(rho) + psi(rho)) on C."""
        if not self.in_congested(rho, w):
            raise NotCongested(f"state ({rho}, {w}) is not congested")
        return w * (rho * self.dpsi(rho) + self.psi(rho))

    # -- phase geometry ------------------------------------------------------

    def phase_tol(self) -> float:
        return self.eps_phase * self.V_max

    def in_free(self, rho: float, w: float) -> bool:
        return self.vtilde(rho, w) >= self.V_max - self.phase_tol()

    def in_congested(self, rho: float, w: float) -> bool:
        return self.vtilde(rho, w) <= self.V_max + self.phase_tol()

    def strictly_free(self, rho: float, w: float) -> bool:
        return self.vtilde(rho, w) > self.V_max + self.phase_tol()

    def strictly_congested(self, rho: float, w: float) -> bool:
        return self.vtilde(rho, w) < self.V_max - self.phase_tol()

    def phase(self, rho: float, w: float) -> str:
        vt = self.vtilde(rho, w)
        if abs(vt - self.V_max) <= self.phase_tol():
            return BOUNDARY
        return FREE if vt > self.V_max else CONGESTED

    def valid_state(self, rho: float, w: float) -> bool:
        tol = 1e-12
        return (-tol <= rho <= self.R + tol
                and self.w_min - tol <= w <= self.w_max + tol)

    def rho_crit(self, w: float) -> float:
        """Density of the F cap C point on the curve of constant w."""
        return self.inv_vtilde(w, self.V_max)

    def rho_c(self) -> float:
        """The corner density: psi(rho_c) = V_max / w_min."""
        return self.rho_crit(self.w_min)

    # -- monotone inversions on a w = const curve ----------------------------

    def inv_vtilde(self, w: float, vt: float) -> float:
        """Solve w*psi(rho) = vt for rho; vt <= w*psi(0) required.

        psi is strictly decreasing, so the root is unique.  Degree-1 psi is
        solved in closed form, the general case by bisection to ~1 ulp.
        """
        if len(self.psi_spec) == 2:
            a0, a1 = self.psi_spec
            return (vt / w - a0) / a1
        lo, hi = 0.0, self.R
        flo = self.vtilde(lo, w) - vt
        fhi = self.vtilde(hi, w) - vt
        if flo < -1e-14 or fhi > 1e-14:
            raise NoCongestedRoot(f"vtilde level {vt} not bracketed for w={w}")
        for _ in range(100):
            mid = 0.5 * (lo + hi)
            if self.vtilde(mid, w) >= vt:
                lo = mid
            else:
                hi = mid
        return 0.5 * (lo + hi)

    def inv_lambda1(self, w: float, xi: float) -> float:
        """Solve lambda1(rho, w) = xi for rho (rarefaction interior state)."""
        if len(self.psi_spec) == 2:
            a0, a1 = self.psi_spec
            return (xi / w - a0) / (2.0 * a1)
        lo, hi = 0.0, self.R  # lambda1 decreasing in rho since (rho*psi)'' <= 0
        for _ in range(100):
            mid = 0.5 * (lo + hi)
            lam = w * (mid * self.dpsi(mid) + self.psi(mid))
            if lam >= xi:
                lo = mid
            else:
                hi = mid
        return 0.5 * (lo + hi)

    # -- AV flux constraint --------------------------------------------------

    def f_alpha1(self, w: float) -> float:
        return _horner(self.f_alpha1_spec, w)

    def f_alpha(self, w: float, sigma: float) -> float:
        """Cap on the flux through the AV, F_alpha = f_alpha1(w)*(V_max - sigma)."""
        if not (self.w_min - 1e-12 <= w <= self.w_max + 1e-12):
            raise ValueError(f"w={w} outside [{self.w_min}, {self.w_max}]")
        if not (-1e-12 <= sigma <= self.V_max + 1e-12):
            raise ValueError(f"sigma={sigma} outside [0, {self.V_max}]")
        return self.f_alpha1(w) * (self.V_max - sigma)

    def phi(self, w: float, sigma: float, rho: float) -> float:
        """Constraint line rho -> F_alpha(w, sigma) + sigma*rho."""
        return self.f_alpha(w, sigma) + sigma * rho

    def check_rho(self, w: float, sigma: float = 0.0) -> float:
        """Free-phase trace of the constraint-saturating jump; constant in sigma.

        At sigma = V_max the quotient form F_alpha/(V_max - sigma) is singular
        but the value extends continuously to f_alpha1(w), which is returned.
        """
        return self.f_alpha1(w)

    def hat_rho(self, w: float, sigma: float) -> float:
        """Largest root of w*rho*psi(rho) = F_alpha(w, sigma) + sigma*rho.

        The root lies on the congested branch (rho_crit(w), R]; the left-hand
        side minus the right-hand side is strictly decreasing there, so
        bisection always converges.  Degree-1 psi uses the quadratic formula.
        """
        fa = self.f_alpha(w, sigma)
        if len(self.psi_spec) == 2:
            a0, a1 = self.psi_spec
            # w*a1*rho^2 + (w*a0 - sigma)*rho - fa = 0, a1 < 0
            a = w * a1
            b = w * a0 - sigma
            disc = b * b + 4.0 * a * fa
            if disc < 0.0:
                raise NoCongestedRoot(f"no congested root at (w={w}, sigma={sigma})")
            sq = math.sqrt(disc)
            r1 = (-b + sq) / (2.0 * a)
            r2 = (-b - sq) / (2.0 * a)
            return max(r1, r2)

        def g(rho: float) -> float:
            return w * rho * self.psi(rho) - sigma * rho - fa

        lo = self.rho_crit(w)
        hi = self.R
        if g(lo) < -1e-12:
            raise NoCongestedRoot(f"no congested root at (w={w}, sigma={sigma})")
        for _ in range(100):
            mid = 0.5 * (lo + hi)
            if g(mid) >= 0.0:
                lo = mid
            else:
                hi = mid
        root = 0.5 * (lo + hi)
        if abs(g(root)) > 1e3 * _HAT_TOL:
            raise NoCongestedRoot(f"hat_rho residual {g(root)} too large")
        return root


# -- hypothesis validation ----------------------------------------------------

_GRID = 10_001


def validate_params(p: ModelParams) -> ModelParams:
    """Check the structural hypotheses; return p unchanged if they all hold.

    Derivative bounds and the eigenvalue bound are checked on a dense grid
    (>= 10^4 points) plus the interval endpoints, which is exact for the
    polynomial families accepted here.
    """
    # H-1: ordering of the positive constants.
    if not (p.R > 0 and p.w_min > 0 and p.w_max > 0 and p.V_max > 0):
        raise HypothesisViolation("H-1", "constants must be positive")
    if not (p.V_max < p.w_min < p.w_max):
        raise HypothesisViolation("H-1", "need V_max < w_min < w_max")

    # H-2: psi decreasing with pinned endpoints and concave rho*psi.
    if abs(p.psi(0.0) - 1.0) > 1e-12:
        raise HypothesisViolation("H-2", f"psi(0) = {p.psi(0.0)} != 1")
    if abs(p.psi(p.R)) > 1e-12:
        raise HypothesisViolation("H-2", f"psi(R) = {p.psi(p.R)} != 0")
    if not (0.0 < p.c_psi <= p.C_psi):
        raise HypothesisViolation("H-2", "need 0 < c_psi <= C_psi")
    d2 = _deriv(_deriv(p.psi_spec))
    for i in range(_GRID):
        rho = p.R * i / (_GRID - 1)
        slope = -p.dpsi(rho)
        if not (p.c_psi - 1e-12 <= slope <= p.C_psi + 1e-12):
            raise HypothesisViolation("H-2", f"-psi'({rho}) = {slope} outside bounds")
        curv = 2.0 * p.dpsi(rho) + rho * _horner(d2, rho)
        if curv > 1e-12:
            raise HypothesisViolation("H-2", f"(rho*psi)'' = {curv} > 0 at rho={rho}")

    # H-3: lambda1 <= -lambda_bar on the congested phase.
    if p.lambda_bar <= 0:
        raise HypothesisViolation("H-3", "lambda_bar must be positive")
    for j in range(101):
        w = p.w_min + (p.w_max - p.w_min) * j / 100.0
        rlo = p.rho_crit(w)
        for i in range(101):
            rho = rlo + (p.R - rlo) * i / 100.0
            lam = w * (rho * p.dpsi(rho) + p.psi(rho))
            if lam > -p.lambda_bar + 1e-12:
                raise HypothesisViolation(
                    "H-3", f"lambda1({rho}, {w}) = {lam} > -lambda_bar")

    # H-4: structure of the constraint cap.
    dF = _deriv(p.f_alpha1_spec)
    for j in range(_GRID):
        w = p.w_min + (p.w_max - p.w_min) * j / (_GRID - 1)
        val = p.f_alpha1(w)
        if val < -1e-12:
            raise HypothesisViolation("H-4a", f"f_alpha1({w}) = {val} < 0")
        slope = _horner(dF, w)
        if slope < -1e-12:
            raise HypothesisViolation("H-4d", f"f_alpha1'({w}) = {slope} < 0")
        if abs(slope) > p.L_F + 1e-12:
            raise HypothesisViolation("H-4b", f"|f_alpha1'({w})| = {abs(slope)} > L_F")
    if p.psi(p.f_alpha1(p.w_max)) <= p.V_max / p.w_min:
        raise HypothesisViolation(
            "H-4c",
            f"psi(f_alpha1(w_max)) = {p.psi(p.f_alpha1(p.w_max))} "
            f"<= V_max/w_min = {p.V_max / p.w_min}")
    return p


def default_params() -> ModelParams:
    """The closed-form default instance (quadratic fluxes, exact oracles)."""
    return validate_params(ModelParams())
