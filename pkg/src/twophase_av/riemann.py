"""Classical Riemann solver for the two-phase system.

Wave families:

* ``1S`` / ``1R`` / ``1RS`` -- first family (w constant, both states
  congested): shock, continuous rarefaction, discretized rarefaction shock;
* ``2``  -- second-family contact (v constant, both states congested);
* ``LW`` -- linear wave (both states free, speed V_max);
* ``PT`` -- phase-transition jump (free left state, congested right state,
  w constant);
* ``NFW`` -- the constraint-saturating non-classical jump, produced only by
  the constrained solver.

Every discrete wave carries its exact Rankine-Hugoniot speed, so the fan is
conservative in both (rho, rho*w) components by construction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

from .model import ModelParams, State

SPEED_TIE = 1e-13  # adjacent waves closer than this in speed are merged


class InvalidState(ValueError):
    pass


@dataclass(frozen=True, slots=True)
class Wave:
    kind: str          # "1S", "1R", "1RS", "2", "LW", "PT", "NFW"
    left: State
    right: State
    s_lo: float
    s_hi: float

    @property
    def speed(self) -> float:
        return self.s_hi

    @property
    def family(self) -> str:
        return "1" if self.kind in ("1S", "1R", "1RS") else self.kind

    @property
    def is_rarefaction(self) -> bool:
        return self.kind == "1R"


def _wave(kind: str, left: State, right: State, s: float) -> Wave:
    return Wave(kind, left, right, s, s)


def rh_speed(p: ModelParams, left: State, right: State) -> float:
    """Rankine-Hugoniot speed of the density jump."""
    return ((p.flux(*right) - p.flux(*left)) / (right.rho - left.rho))


def classify_jump(p: ModelParams, left: State, right: State) -> str:
    """Family of a discrete admissible jump, boundary states resolved to C.

    Vacuum left states carry no meaningful w; they are treated as w-matched.
    """
    l_free, r_free = p.in_free(*left), p.in_free(*right)
    if l_free and r_free:
        return "LW"
    w_match = abs(left.w - right.w) <= 1e-9 or left.rho <= 1e-12
    if w_match and p.in_congested(*right):
        if p.strictly_free(*left):
            return "PT"
        if p.in_congested(*left):
            return "1S" if right.rho >= left.rho else "1RS"
    if (p.in_congested(*left) and p.in_congested(*right)
            and abs(p.vtilde(*left) - p.vtilde(*right)) <= 1e-9):
        return "2"
    raise InvalidState(f"jump {left} -> {right} fits no wave family")


@dataclass(frozen=True)
class WaveFan:
    """Self-similar solution of a Riemann problem, waves sorted by speed."""

    params: ModelParams
    left: State
    waves: tuple[Wave, ...]

    @property
    def right(self) -> State:
        return self.waves[-1].right if self.waves else self.left

    def sample(self, xi: float) -> State:
        """State on the ray x/t = xi; ties on a discontinuity take the right state."""
        state = self.left
        for w in self.waves:
            if xi < w.s_lo:
                return state
            if w.kind == "1R" and xi < w.s_hi:
                p = self.params
                rho = p.inv_lambda1(w.left.w, xi)
                return State(rho, w.left.w)
            state = w.right
        return state

    def speeds_sorted(self) -> bool:
        prev = -math.inf
        for w in self.waves:
            if w.s_lo < prev - 1e-11 or w.s_hi < w.s_lo - 1e-11:
                return False
            prev = w.s_hi
        return True


def _append_merged(p: ModelParams, waves: list[Wave], new: Wave) -> None:
    """Append, collapsing speed ties (e.g. a vacuum PT sitting on its contact)."""
    if waves and new.s_lo - waves[-1].s_hi <= SPEED_TIE and waves[-1].s_hi == waves[-1].s_lo:
        prev = waves.pop()
        left, right = prev.left, new.right
        if left.rho <= 1e-12:
            left = State(left.rho, right.w)
        merged = _wave(classify_jump(p, left, right), left, right, new.s_hi)
        waves.append(merged)
    else:
        waves.append(new)


def _snap_mid(mid: State, left: State, right: State) -> State:
    """Pin a middle state to an endpoint when it differs by inversion noise,
    so re-solved fans reproduce incoming waves with exact state identity."""
    if abs(mid.w - left.w) <= 1e-13 and abs(mid.rho - left.rho) <= 1e-13:
        return left
    if abs(mid.w - right.w) <= 1e-13 and abs(mid.rho - right.rho) <= 1e-13:
        return right
    return mid


def _one_wave(p: ModelParams, left: State, rho_m: float) -> list[Wave]:
    """First-family wave on the curve w = left.w from left.rho to rho_m."""
    w = left.w
    mid = State(rho_m, w)
    if abs(rho_m - left.rho) <= 1e-14:
        return []
    if rho_m > left.rho:
        return [_wave("1S", left, mid, rh_speed(p, left, mid))]
    return [Wave("1R", left, mid, p.lambda1(left.rho, w), p.lambda1(rho_m, w))]


def solve_riemann(p: ModelParams, left: State, right: State) -> WaveFan:
    """Classical Riemann solver for two states in F u C."""
    for s in (left, right):
        if not p.valid_state(*s):
            raise InvalidState(f"state {s} outside the phase rectangle")
    waves: list[Wave] = []
    if left == right:
        return WaveFan(p, left, ())

    l_free = p.in_free(*left)
    r_free = p.in_free(*right)

    if l_free and r_free:
        _append_merged(p, waves, _wave("LW", left, right, p.V_max))
    elif p.strictly_congested(*right):
        v_r = p.vtilde(*right)
        mid = _snap_mid(State(p.inv_vtilde(left.w, v_r), left.w), left, right)
        if p.strictly_free(*left):
            _append_merged(p, waves, _wave("PT", left, mid, rh_speed(p, left, mid)))
        else:
            for w in _one_wave(p, left, mid.rho):
                _append_merged(p, waves, w)
        if mid != right:
            _append_merged(p, waves, _wave("2", mid, right, v_r))
    else:
        # congested left, (nearly) free right: rarefy to the phase boundary,
        # then a linear wave carries the jump at V_max
        mid = _snap_mid(State(p.rho_crit(left.w), left.w), left, right)
        for w in _one_wave(p, left, mid.rho):
            _append_merged(p, waves, w)
        if mid != right:
            _append_merged(p, waves, _wave("LW", mid, right, p.V_max))

    fan = WaveFan(p, left, tuple(waves))
    assert fan.speeds_sorted(), f"fan speeds out of order for {left} -> {right}"
    return fan


def split_rarefaction(p: ModelParams, wave: Wave, nu: int) -> list[Wave]:
    """Replace a continuous rarefaction by ceil(dv*nu) RH jumps of equal
    vtilde strength <= 1/nu."""
    w = wave.left.w
    vt_l = p.vtilde(*wave.left)
    vt_r = p.vtilde(*wave.right)
    dv = vt_r - vt_l
    if dv <= 1e-14:
        return []
    k = max(1, math.ceil(dv * nu - 1e-12))
    pieces: list[Wave] = []
    prev = wave.left
    for i in range(1, k + 1):
        vt = vt_l + dv * i / k
        rho = wave.right.rho if i == k else p.inv_vtilde(w, vt)
        cur = State(rho, w)
        pieces.append(_wave("1RS", prev, cur, rh_speed(p, prev, cur)))
        prev = cur
    return pieces


def discretize_rarefactions(p: ModelParams, waves: Iterable[Wave], nu: int) -> list[Wave]:
    """Discrete front list for a fan: rarefactions split, everything else kept."""
    out: list[Wave] = []
    for w in waves:
        if w.kind == "1R":
            out.extend(split_rarefaction(p, w, nu))
        else:
            out.append(w)
    return out


def rh_residual(p: ModelParams, left: State, right: State, s: float) -> float:
    """Max relative Rankine-Hugoniot defect over the two conserved components."""
    scale = max(1.0, abs(p.flux(*left)), abs(p.flux(*right)))
    r1 = s * (right.rho - left.rho) - (p.flux(*right) - p.flux(*left))
    r2 = (s * (right.rho * right.w - left.rho * left.w)
          - (right.w * p.flux(*right) - left.w * p.flux(*left)))
    return max(abs(r1), abs(r2)) / scale
