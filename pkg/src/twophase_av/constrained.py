"""Riemann solver at the AV position, honoring the moving flux cap.

Given left/right states and the desired AV speed ``u_bar``, the classical
fan is kept whenever its flux at the ray ``u_bar`` stays below the
constraint line phi(rho) = F_alpha(w_left, u_bar) + u_bar*rho; the AV then
travels as a fictitious wave at min(u_bar, v just ahead).  Otherwise the
solution is rebuilt around a constraint-saturating non-classical jump from
hat_rho to check_rho traveling exactly at u_bar.
"""

from __future__ import annotations

from dataclasses import dataclass

from .model import ModelParams, State
from .riemann import Wave, WaveFan, _wave, solve_riemann

AV_COINCIDENCE_TOL = 1e-12


class InvalidControl(ValueError):
    pass


@dataclass(frozen=True)
class ConstrainedSolution:
    """Composite fan plus the AV ray.

    ``waves`` is the full self-similar solution (the non-classical jump
    included, in speed order).  ``av_index`` points at the wave the AV rides:
    the NFW in the constrained case, or a classical wave it is superimposed
    on; None when the AV moves inside a constant region.  ``trace`` is the
    state at the AV ray when ``av_index`` is None.
    """

    params: ModelParams
    left: State
    waves: tuple[Wave, ...]
    av_speed: float
    av_kind: str              # "FW" | "NFW"
    case: int                 # 1 = classical kept, 2 = non-classical jump
    av_index: int | None
    trace: State | None

    @property
    def right(self) -> State:
        return self.waves[-1].right if self.waves else self.left

    def sample(self, xi: float) -> State:
        return WaveFan(self.params, self.left, self.waves).sample(xi)

    def av_traces(self) -> tuple[State, State]:
        if self.av_index is not None:
            w = self.waves[self.av_index]
            return w.left, w.right
        return self.trace, self.trace


def solve_constrained(p: ModelParams, left: State, right: State,
                      u_bar: float) -> ConstrainedSolution:
    if not (-1e-12 <= u_bar <= p.V_max + 1e-12):
        raise InvalidControl(f"u_bar={u_bar} outside [0, {p.V_max}]")
    u_bar = min(max(u_bar, 0.0), p.V_max)

    classical = solve_riemann(p, left, right)
    at_ray = classical.sample(u_bar)
    f1 = p.flux(*at_ray)
    if f1 <= p.phi(left.w, u_bar, at_ray.rho) + 1e-14:
        # classical solution survives; AV rides at min(u_bar, v ahead)
        u = min(u_bar, p.speed(*at_ray))
        av_index = None
        trace: State | None = at_ray
        for i, w in enumerate(classical.waves):
            if w.kind != "1R" and abs(w.speed - u) <= AV_COINCIDENCE_TOL:
                av_index = i
                trace = None
                break
        return ConstrainedSolution(p, left, classical.waves, u, "FW", 1,
                                   av_index, trace)

    hat = State(p.hat_rho(left.w, u_bar), left.w)
    chk = State(p.check_rho(left.w, u_bar), left.w)
    left_fan = solve_riemann(p, left, hat)
    right_fan = solve_riemann(p, chk, right)
    assert all(w.s_hi <= u_bar + 1e-9 for w in left_fan.waves), \
        "left sub-fan crosses the AV ray"
    assert all(w.s_lo >= u_bar - 1e-9 for w in right_fan.waves), \
        "right sub-fan crosses the AV ray"
    waves = (left_fan.waves
             + (_wave("NFW", hat, chk, u_bar),)
             + right_fan.waves)
    av_index = len(left_fan.waves)
    return ConstrainedSolution(p, left, waves, u_bar, "NFW", 2, av_index, None)


def nonclassical_flux_defect(p: ModelParams, sol: ConstrainedSolution) -> float:
    """Worst violation of the saturation identities in a case-2 solution:
    hat_rho*(v(hat)-u) = F_alpha(w,u) = check_rho*(V_max-u)."""
    if sol.case != 2:
        return 0.0
    hat, chk = sol.av_traces()
    u = sol.av_speed
    fa = p.f_alpha(hat.w, u)
    d1 = abs(hat.rho * (p.speed(*hat) - u) - fa)
    d2 = abs(chk.rho * (p.V_max - u) - fa)
    return max(d1, d2)


def check_consistency(p: ModelParams, left: State, right: State,
                      u_bar: float, tol: float = 1e-12) -> bool:
    """Re-solving with the produced AV speed must reproduce the solution."""
    a = solve_constrained(p, left, right, u_bar)
    b = solve_constrained(p, left, right, a.av_speed)
    if abs(a.av_speed - b.av_speed) > tol or a.av_kind != b.av_kind:
        return False
    if len(a.waves) != len(b.waves):
        return False
    for wa, wb in zip(a.waves, b.waves):
        if wa.kind != wb.kind:
            return False
        for da, db in ((wa.left, wb.left), (wa.right, wb.right)):
            if abs(da.rho - db.rho) > tol or abs(da.w - db.w) > tol:
                return False
        if abs(wa.s_lo - wb.s_lo) > tol or abs(wa.s_hi - wb.s_hi) > tol:
            return False
    return True
