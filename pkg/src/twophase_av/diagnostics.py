"""Run-level diagnostics: profiles, L1 metric, audits, ledger verification,
and the empirical convergence study."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .model import ModelParams, State
from .scenario import Scenario, build_sim
from .tracker import (
    FunctionalSnapshot,
    InteractionRecord,
    Simulation,
    check_record,
    snapshot_functionals,
)


@dataclass(frozen=True)
class Profile:
    """Piecewise-constant road state on a window: states[i] holds on
    (xs[i-1], xs[i]) with the outer pieces extended to the window edges."""

    window: tuple[float, float]
    xs: tuple[float, ...]
    states: tuple[State, ...]

    @staticmethod
    def from_sim(sim: Simulation, t: float) -> "Profile":
        xs, states = sim.profile_at(t)
        return Profile(sim.window, tuple(xs), tuple(states))

    def masses(self) -> tuple[float, float]:
        lo, hi = self.window
        edges = (lo,) + self.xs + (hi,)
        m_rho = math.fsum(s.rho * (edges[i + 1] - edges[i])
                          for i, s in enumerate(self.states))
        m_q = math.fsum(s.rho * s.w * (edges[i + 1] - edges[i])
                        for i, s in enumerate(self.states))
        return m_rho, m_q


def l1_distance(a: Profile, b: Profile) -> float:
    """Exact integral of |rho_a - rho_b| + |q_a - q_b| on the common window."""
    lo = max(a.window[0], b.window[0])
    hi = min(a.window[1], b.window[1])
    if hi <= lo:
        raise ValueError("profiles have no common window")
    cuts = sorted({lo, hi, *(x for x in a.xs if lo < x < hi),
                   *(x for x in b.xs if lo < x < hi)})

    def state_at(prof: Profile, x: float) -> State:
        i = 0
        for bp in prof.xs:
            if bp <= x:
                i += 1
            else:
                break
        return prof.states[i]

    terms = []
    for x0, x1 in zip(cuts, cuts[1:]):
        mid = 0.5 * (x0 + x1)
        sa, sb = state_at(a, mid), state_at(b, mid)
        terms.append((abs(sa.rho - sb.rho)
                      + abs(sa.rho * sa.w - sb.rho * sb.w)) * (x1 - x0))
    return math.fsum(terms)


def functionals(p: ModelParams, sim: Simulation) -> FunctionalSnapshot:
    return snapshot_functionals(p, sim.fronts, sim.av, sim.t)


def verify_ledger(records: list[InteractionRecord], p: ModelParams,
                  nu: int) -> list[str]:
    """All table-row violations in a completed run's ledger (empty = clean)."""
    out = []
    for i, rec in enumerate(records):
        for v in check_record(rec, p, nu):
            out.append(f"record {i} ({rec.row} at t={rec.t}): {v}")
    return out


def _edge_flux_integrals(sim: Simulation, log, t: float) -> tuple[float, float]:
    f1_terms, f2_terms = [], []
    for i, (ts, s) in enumerate(log):
        te = log[i + 1][0] if i + 1 < len(log) else max(sim.t, t)
        te = min(te, t)
        if te > ts:
            flux = sim.p.flux(*s)
            f1_terms.append(flux * (te - ts))
            f2_terms.append(flux * s.w * (te - ts))
    return math.fsum(f1_terms), math.fsum(f2_terms)


def audit_conservation(sim: Simulation, times=None) -> float:
    """Max relative drift of windowed rho and rho*w mass, boundary-corrected."""
    if times is None:
        times = sorted({t for t, _ in sim.history} | {sim.t})
    m0 = Profile.from_sim(sim, 0.0).masses()
    scale = max(1.0, abs(m0[0]), abs(m0[1]))
    worst = 0.0
    for t in times:
        m = Profile.from_sim(sim, t).masses()
        in1, in2 = _edge_flux_integrals(sim, sim.edge_left, t)
        out1, out2 = _edge_flux_integrals(sim, sim.edge_right, t)
        worst = max(worst,
                    abs(m[0] - m0[0] - in1 + out1) / scale,
                    abs(m[1] - m0[1] - in2 + out2) / scale)
    return worst


def audit_constraint(sim: Simulation) -> float:
    """Max recorded excess of rho*(v - ydot) over F_alpha at the AV traces."""
    return max(e for _, e in sim.constraint_excess)


def trajectory_tv(sim: Simulation) -> float:
    speeds = [ydot for _, _, ydot, _ in sim.trajectory]
    return math.fsum(abs(speeds[i + 1] - speeds[i])
                     for i in range(len(speeds) - 1))


def trajectory_tv_bound(sim: Simulation) -> float:
    """sup_t F_vtilde(t) + TV(u), the regularity bound for the AV speed."""
    return max(s.f_vtilde for s in sim.func_history) + sim.control.tv()


def trajectory_continuous(sim: Simulation, tol: float = 1e-12) -> bool:
    """y is piecewise linear; verify continuity across consecutive records."""
    tr = sim.trajectory
    for (t0, y0, v0, _), (t1, y1, _, _) in zip(tr, tr[1:]):
        if abs(y0 + v0 * (t1 - t0) - y1) > tol * max(1.0, abs(y1)):
            return False
    return True


@dataclass
class ConvergenceReport:
    nu_list: list[int]
    probe_times: list[float]
    distances: dict = field(default_factory=dict)   # (nu_a, nu_b, t) -> L1
    fw_drift: dict = field(default_factory=dict)    # nu -> max |F_w - F_w(0+)|
    constraint_max: dict = field(default_factory=dict)
    conservation_max: dict = field(default_factory=dict)
    tv_bound_ok: dict = field(default_factory=dict)
    monotone: dict = field(default_factory=dict)    # t -> bool

    def pairwise(self, t: float) -> list[float]:
        return [self.distances[(a, b, t)]
                for a, b in zip(self.nu_list, self.nu_list[1:])]


def convergence_study(scenario: Scenario, nu_list, probe_times) -> ConvergenceReport:
    """Independent runs per refinement; pairwise L1 distances at probe times.

    Distances between consecutive refinements are expected to shrink; the
    report flags any probe where they fail to be non-increasing.
    """
    nu_list = sorted(nu_list)
    if len(nu_list) < 3:
        raise ValueError("need at least three refinement levels")
    report = ConvergenceReport(list(nu_list), list(probe_times))
    sims: dict[int, Simulation] = {}
    for nu in nu_list:
        sim = build_sim(scenario, nu=nu)
        sim.run_until(scenario.horizon)
        sims[nu] = sim
        f0 = sim.func_history[0].f_w
        report.fw_drift[nu] = max(abs(s.f_w - f0) for s in sim.func_history)
        report.constraint_max[nu] = audit_constraint(sim)
        report.conservation_max[nu] = audit_conservation(sim)
        report.tv_bound_ok[nu] = (trajectory_tv(sim)
                                  <= trajectory_tv_bound(sim) + 1e-9)
    for t in probe_times:
        for a, b in zip(nu_list, nu_list[1:]):
            report.distances[(a, b, t)] = l1_distance(
                Profile.from_sim(sims[a], t), Profile.from_sim(sims[b], t))
        seq = report.pairwise(t)
        report.monotone[t] = all(seq[i + 1] <= seq[i] + 1e-12
                                 for i in range(len(seq) - 1))
    return report
