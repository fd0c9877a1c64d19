"""Fixed regression grids for the bound-ratio checks, and a runner for scan specs."""
from __future__ import annotations

import json

import numpy as np

from .bounds import BoundReport, derivative_test_report, sk_scan, weyl_vdc_sides
from .psi_sums import alpha_grid, sstar_report

DEFAULT_GRID = {
    "instances": [
        {"kind": "sk", "M": 16384, "coeffs": [1.0, 1.0, 1.0],
         "gammas": ["9/10", "4/5", "7/10"], "alphas": 64, "seed": 0},
        {"kind": "vdc", "variant": "second", "beta": [1e-5, 1e-4, 1e-3, 3e-3],
         "A": [1000, 4000]},
        {"kind": "vdc", "variant": "third", "beta": [1e-9, 1e-8, 1e-7],
         "A": [1000, 4000]},
    ]
}


def weyl_trials(trials: int = 200, seed: int = 0, qs=(1, 16, 64), max_n: int = 4096):
    """Seeded random sequences |z| <= 1 on (N, 2N]; yields (N, Q, lhs, rhs)."""
    rng = np.random.default_rng(seed)
    for t in range(trials):
        N = int(rng.integers(64, max_n + 1))
        Q = qs[t % len(qs)]
        r = rng.random(N)
        z = r * np.exp(2j * np.pi * rng.random(N))
        lhs, rhs = weyl_vdc_sides(z, N, Q)
        yield N, Q, lhs, rhs


def _listify(x):
    return x if isinstance(x, list) else [x]


def run_instance(inst: dict) -> list[BoundReport]:
    kind = inst.get("kind")
    if kind == "sk":
        count = inst.get("alphas", 64)
        alphas = alpha_grid(count, inst.get("seed", 0)) if isinstance(count, int) else count
        res = sk_scan(inst["coeffs"], inst["gammas"], int(inst["M"]), alphas,
                          inst.get("M1"), tuple(inst.get("variants", ("second", "third"))))
        return [r for v in res.values() for r in v]
    if kind == "vdc":
        return [derivative_test_report(float(b), int(a), inst.get("variant", "second"))
                for b in _listify(inst["beta"]) for a in _listify(inst["A"])]
    if kind == "sstar":
        return [sstar_report(int(inst["M"]), inst["H"], inst["gammas"], inst.get("u", [0.0] * len(inst["H"])))]
    if kind == "weyl":
        out = []
        for N, Q, lhs, rhs in weyl_trials(inst.get("trials", 200), inst.get("seed", 0)):
            out.append(BoundReport(lhs, max(rhs, 1e-300), "weyl-vdc", {"N": N, "Q": Q}))
        return out
    raise ValueError(f"unknown scan kind {kind!r}")


def run_grid(spec: dict) -> tuple[list[BoundReport], dict]:
    """All reports of a scan spec plus max ratio per formula."""
    reports = []
    for inst in spec.get("instances", []):
        reports.extend(run_instance(inst))
    summary: dict[str, float] = {}
    for r in reports:
        summary[r.formula] = max(summary.get(r.formula, 0.0), r.ratio)
    return reports, {"max_ratio": summary}


def load_spec(path) -> dict:
    with open(path) as fh:
        spec = json.load(fh)
    if not isinstance(spec, dict) or "instances" not in spec:
        raise ValueError("scan spec must be an object with an 'instances' list")
    return spec
