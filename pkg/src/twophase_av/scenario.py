"""Scenario configuration: JSON parsing, validation, and random generation.

A scenario document is a JSON object:

    {
      "params":  {"R": 1.0, "w_min": 2.5, ...},        # optional, defaults
      "initial": [[x0, rho0, w0], [x1, rho1, w1], ...],
      "control": [[0.0, u0], [t1, u1], ...],
      "y0": 0.0, "nu": 20,
      "window": [x_min, x_max],
      "horizon": 10.0,
      "probes": [0.5, 1.0],
      "seed": 42
    }

Each initial entry gives the state to the right of its breakpoint; the first
state also extends to the left of the first breakpoint.  Parsing round-trips
losslessly through :func:`to_json`.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .model import ModelParams, validate_params
from .tracker import ControlFn, Guards, Simulation


class ParseError(ValueError):
    pass


class ValidationError(ValueError):
    def __init__(self, field_name: str, msg: str):
        self.field = field_name
        super().__init__(f"{field_name}: {msg}")


_PARAM_KEYS = {
    "R": "R", "w_min": "w_min", "w_max": "w_max", "V_max": "V_max",
    "psi": "psi_spec", "c_psi": "c_psi", "C_psi": "C_psi",
    "lambda_bar": "lambda_bar", "f_alpha1": "f_alpha1_spec", "L_F": "L_F",
}


@dataclass
class Scenario:
    params: ModelParams
    initial: list[tuple[float, float, float]]
    control: list[tuple[float, float]]
    y0: float
    nu: int
    window: tuple[float, float]
    horizon: float
    probes: list[float] = field(default_factory=list)
    seed: int | None = None

    def pieces(self) -> list[tuple[float, tuple[float, float]]]:
        return [(x, (rho, w)) for x, rho, w in self.initial]

    def control_fn(self) -> ControlFn:
        return ControlFn.from_pieces(self.control, self.params.V_max)


def parse_params(obj: dict) -> ModelParams:
    kwargs = {}
    for key, attr in _PARAM_KEYS.items():
        if key in obj:
            val = obj[key]
            kwargs[attr] = tuple(val) if isinstance(val, list) else float(val)
    unknown = set(obj) - set(_PARAM_KEYS)
    if unknown:
        raise ValidationError("params", f"unknown keys {sorted(unknown)}")
    return validate_params(ModelParams(**kwargs))


def parse_scenario(text: str) -> Scenario:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(f"invalid JSON at line {e.lineno}: {e.msg}") from e
    if not isinstance(doc, dict):
        raise ParseError("scenario document must be a JSON object")

    p = parse_params(doc.get("params", {}))

    initial = doc.get("initial")
    if not initial:
        raise ValidationError("initial", "at least one piece required")
    pieces = []
    prev_x = None
    for i, entry in enumerate(initial):
        if len(entry) != 3:
            raise ValidationError("initial", f"entry {i} must be [x, rho, w]")
        x, rho, w = map(float, entry)
        if prev_x is not None and x <= prev_x:
            raise ValidationError("initial", f"breakpoints unsorted at entry {i}")
        prev_x = x
        if not (0.0 <= rho <= p.R):
            raise ValidationError("initial", f"rho={rho} outside [0, {p.R}]")
        if not (p.w_min <= w <= p.w_max):
            raise ValidationError("initial",
                                  f"w={w} outside [{p.w_min}, {p.w_max}]")
        pieces.append((x, rho, w))

    control = doc.get("control")
    if not control:
        raise ValidationError("control", "at least one piece required")
    ctrl = []
    prev_t = None
    for i, entry in enumerate(control):
        if len(entry) != 2:
            raise ValidationError("control", f"entry {i} must be [t, u]")
        t, u = map(float, entry)
        if i == 0 and abs(t) > 1e-14:
            raise ValidationError("control", "first piece must start at t=0")
        if prev_t is not None and t <= prev_t:
            raise ValidationError("control", f"times unsorted at entry {i}")
        prev_t = t
        if not (0.0 <= u <= p.V_max):
            raise ValidationError("control", f"u={u} outside [0, {p.V_max}]")
        ctrl.append((t, u))

    try:
        window = tuple(map(float, doc["window"]))
        y0 = float(doc["y0"])
        nu = int(doc["nu"])
        horizon = float(doc["horizon"])
    except KeyError as e:
        raise ValidationError(str(e.args[0]), "missing required field") from e
    if len(window) != 2 or window[0] >= window[1]:
        raise ValidationError("window", "need [x_min, x_max] with x_min < x_max")
    if nu < 1:
        raise ValidationError("nu", "must be a positive integer")
    if horizon <= 0:
        raise ValidationError("horizon", "must be positive")
    probes = [float(t) for t in doc.get("probes", [])]
    if any(t < 0 or t > horizon for t in probes):
        raise ValidationError("probes", "must lie in [0, horizon]")
    seed = doc.get("seed")
    return Scenario(p, pieces, ctrl, y0, nu, window, horizon, probes,
                    None if seed is None else int(seed))


def to_json(s: Scenario) -> str:
    p = s.params
    doc = {
        "params": {"R": p.R, "w_min": p.w_min, "w_max": p.w_max,
                   "V_max": p.V_max, "psi": list(p.psi_spec),
                   "c_psi": p.c_psi, "C_psi": p.C_psi,
                   "lambda_bar": p.lambda_bar,
                   "f_alpha1": list(p.f_alpha1_spec), "L_F": p.L_F},
        "initial": [[x, rho, w] for x, rho, w in s.initial],
        "control": [[t, u] for t, u in s.control],
        "y0": s.y0, "nu": s.nu, "window": list(s.window),
        "horizon": s.horizon, "probes": s.probes,
    }
    if s.seed is not None:
        doc["seed"] = s.seed
    return json.dumps(doc, indent=2, sort_keys=True)


def build_sim(s: Scenario, nu: int | None = None,
              guards: Guards | None = None) -> Simulation:
    return Simulation(s.params, s.pieces(), s.control_fn(), s.y0,
                      nu if nu is not None else s.nu, s.window, guards)


def random_scenario(seed: int, max_jumps: int = 50, max_control_jumps: int = 10,
                    horizon: float = 10.0, nu: int = 20,
                    params: ModelParams | None = None) -> Scenario:
    """A reproducible random Cauchy scenario with a safely wide window.

    Control values hit V_max with positive probability so the special
    superimposed AV wave gets exercised.
    """
    p = params or validate_params(ModelParams())
    rng = np.random.default_rng(seed)
    n_jumps = int(rng.integers(5, max_jumps + 1))
    span = 20.0
    raw = np.sort(rng.uniform(-span, span, size=n_jumps))
    xs: list[float] = []
    for x in raw:
        if not xs or x - xs[-1] > 1e-3:
            xs.append(float(x))

    def rand_state():
        while True:
            rho = float(rng.uniform(0.0, p.R))
            w = float(rng.uniform(p.w_min, p.w_max))
            if abs(p.vtilde(rho, w) - p.V_max) > 1e-6:
                return rho, w

    initial = []
    x_left = float(xs[0]) - 1.0
    rho, w = rand_state()
    initial.append((x_left, rho, w))
    for x in xs:
        rho, w = rand_state()
        initial.append((float(x), rho, w))

    n_ctrl = int(rng.integers(0, max_control_jumps + 1))
    times = np.sort(rng.uniform(0.1, horizon * 0.9, size=n_ctrl))

    def rand_u():
        if rng.random() < 0.15:
            return p.V_max
        return float(rng.uniform(0.0, p.V_max))

    control = [(0.0, rand_u())]
    for t in times:
        control.append((float(t), rand_u()))

    y0 = float(rng.uniform(-span / 2, span / 2))
    while any(abs(y0 - x) < 1e-3 for x in xs):
        y0 += 2e-3
    lam_min = p.w_max * (p.psi(p.R) + p.R * p.dpsi(p.R))
    lo = -span - 1.0 + min(lam_min, 0.0) * horizon - 1.0
    hi = span + 1.0 + p.V_max * horizon + 1.0
    return Scenario(p, initial, control, y0, nu, (lo, hi), horizon,
                    probes=[horizon / 2, horizon], seed=seed)
