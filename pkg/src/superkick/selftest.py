"""Fast self-check: pinned Bessel values, Kallen identities, symmetry, small-sigma limit."""

from __future__ import annotations

import json
import math
import sys
import time
import warnings
from importlib import resources
from pathlib import Path

from .exceptions import ParaxialityWarning
from .kinematics import BesselBeam, GaussianPacket, kallen, phase_space_weight, two_body_solutions
from .observables import average_transverse_momentum, denom_closed_form
from .specfun import bessel_i_complex, bessel_j


def load_fixtures(path=None) -> dict:
    if path is None:
        text = resources.files("superkick").joinpath("data/bessel_fixtures.json").read_text()
    else:
        text = Path(path).read_text()
    return json.loads(text)


def _rel(a, b):
    return abs(a - b) / max(abs(b), 1e-300)


def _check_bessel_j(fx):
    worst = max(_rel(bessel_j(n, x), v) for n, x, v in fx["bessel_j"])
    return worst <= 1e-12, f"max rel err {worst:.2e}"


def _check_bessel_i(fx):
    worst = max(_rel(bessel_i_complex(n, x).real, v) for n, x, v in fx["bessel_i_real"])
    return worst <= 1e-10, f"max rel err {worst:.2e}"


def _check_kallen(_):
    ok = kallen(1, 0, 0) == 1 and kallen(9, 1, 4) == 0 and kallen(16, 1, 4) == 105
    ok = ok and kallen(2.0, 3.5, 7.0) == kallen(7.0, 2.0, 3.5)
    return ok, "lambda(1,0,0)=1, lambda(9,1,4)=0, lambda(16,1,4)=105"


def _check_phase_space(_):
    sol = two_body_solutions((0.0, 0.0), (0.0, 0.0), 0.0, 10.0, 1.0, 1.0)
    ok = abs(sol.lam - 9600.0) < 1e-9 and all(abs(e - 5.0) < 1e-12 for e in sol.E1p)
    ok = ok and abs(phase_space_weight(sol) - 0.5 / math.sqrt(9600.0)) < 1e-15
    return ok, f"lambda={sol.lam:.6g}, E1'={sol.E1p[0]:.6g}"


def _check_zero_impact(_):
    res = average_transverse_momentum(BesselBeam(1000.0, 1.0, 3), GaussianPacket(-1000.0, 0.2, 0.0))
    mag = math.hypot(*res.P_avg)
    return mag <= 1e-10, f"|<P>| = {mag:.2e}"


def _check_denominator(_):
    beam, packet = BesselBeam(1000.0, 1.0, 2), GaussianPacket(-1000.0, 0.002, 0.5)
    res = average_transverse_momentum(beam, packet)
    closed, _ = denom_closed_form(beam, packet)
    err = abs(res.denom / closed - 1.0)
    return err <= 1e-3, f"rel dev {err:.2e} (m=2, kappa*b=0.5, sigma*kappa=0.002)"


CHECKS = [
    ("bessel_j pinned values", _check_bessel_j),
    ("bessel_i pinned values", _check_bessel_i),
    ("kallen identities", _check_kallen),
    ("two-body phase space", _check_phase_space),
    ("b=0 gives zero kick", _check_zero_impact),
    ("norm vs small-sigma closed form", _check_denominator),
]


def run_selftest(fixtures=None, out=None) -> int:
    """Run every check, print a pass/fail table and return 0 or 1."""
    out = out or sys.stdout
    fx = load_fixtures(fixtures)
    failed = 0
    start = time.perf_counter()
    for name, check in CHECKS:
        try:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", ParaxialityWarning)
                ok, detail = check(fx)
        except Exception as exc:  # a crashing check is a failed check
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        failed += not ok
        print(f"{'PASS' if ok else 'FAIL'}  {name:<34} {detail}", file=out)
    print(f"{len(CHECKS) - failed}/{len(CHECKS)} passed in {time.perf_counter() - start:.1f}s", file=out)
    return 1 if failed else 0
