"""Runtime oracle checks: closed forms against adaptive quadrature.

Used by the `verify` CLI subcommand and, at larger sample counts, by
the acceptance tests. Each check compares an analytic value with the
independent quadrature route and collects failures instead of raising,
so a report always covers the full sweep.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .functionals import PointEval, RadonLine
from .kernels import weighted_gaussian_kernel
from .pairings import PairingEngine
from .phantom import shepp_logan
from .quadrature import segmented_integral

ALPHAS = (10.0, 200.0, 2000.0)
WEIGHT_BETAS = (0.5, 1.5)


@dataclass
class Report:
    lines: list = field(default_factory=list)
    failures: list = field(default_factory=list)

    def check(self, label, delta, tol):
        ok = delta <= tol
        self.lines.append("%-42s max|delta| %.3e (tol %.3e) %s"
                          % (label, delta, tol, "ok" if ok else "FAIL"))
        if not ok:
            self.failures.append(label)
        return ok


def random_functionals(rng, count, kind):
    out = []
    for _ in range(count):
        if kind == "point":
            out.append(PointEval(tuple(rng.uniform(-1.0, 1.0, size=2))))
        else:
            out.append(RadonLine(rng.uniform(-math.sqrt(2), math.sqrt(2)),
                                 rng.uniform(0.0, math.pi)))
    return out


def verify_pairings(pairs=25, seed=0, tol=1e-8, alphas=ALPHAS,
                    weight_betas=WEIGHT_BETAS):
    """Analytic vs quadrature pairings for every supported combination."""
    rng = np.random.default_rng(seed)
    report = Report()
    combos = (("point", "point"), ("point", "radon"), ("radon", "radon"))
    for kind_a, kind_b in combos:
        worst = 0.0
        for _ in range(pairs):
            alpha = float(rng.choice(alphas))
            beta = float(rng.choice(weight_betas))
            kernel = weighted_gaussian_kernel(alpha, beta)
            analytic = PairingEngine(kernel, mode="analytic")
            oracle = PairingEngine(kernel, mode="quadrature")
            a = random_functionals(rng, 1, kind_a)[0]
            b = random_functionals(rng, 1, kind_b)[0]
            va = analytic.pairing(a, b)
            vq = oracle.pairing(a, b)
            delta = abs(va - vq) - tol * abs(va)
            worst = max(worst, delta)
        report.check("pairing %s x %s (%d pairs)" % (kind_a, kind_b, pairs),
                     worst, tol)
    return report


def ellipse_crossings(phantom, line, radius):
    """Arc parameters where the line enters or leaves a phantom ellipse.

    In each ellipse's unit-disk frame the squared radius of
    line.point(s) is an exact quadratic in s, so three samples of the
    containment function determine it and its roots are the crossing
    points. Only containment geometry enters here; the chord-length
    algebra in EllipsePhantom.radon is never reused, which keeps this
    route independent of the closed form it is used to check.
    """
    cuts = []
    for e in phantom.ellipses:
        cp, sp = math.cos(e.phi), math.sin(e.phi)

        def outside(s):
            x, y = line.point(s)
            dx, dy = x - e.x0, y - e.y0
            u = (cp * dx + sp * dy) / e.a
            v = (cp * dy - sp * dx) / e.b
            return u * u + v * v - 1.0

        w0 = outside(0.0)
        wp = outside(1.0)
        wm = outside(-1.0)
        quad_a = 0.5 * (wp + wm) - w0
        quad_b = 0.5 * (wp - wm)
        disc = quad_b * quad_b - 4.0 * quad_a * w0
        if quad_a <= 0.0 or disc <= 0.0:
            continue
        root = math.sqrt(disc)
        for s in ((-quad_b - root) / (2.0 * quad_a),
                  (-quad_b + root) / (2.0 * quad_a)):
            if abs(s) < radius:
                cuts.append(s)
    return sorted(cuts)


def sinogram_quadrature(phantom, line, tol=1e-10, radius=1.5):
    """Quadrature route for a phantom line integral.

    The integrand is piecewise constant along the line, so the window
    is pre-split at the ellipse crossings before the adaptive driver
    runs; see segmented_integral for why plain refinement is not
    reliable across jumps. Returns the integral value.
    """
    edges = [-radius] + ellipse_crossings(phantom, line, radius) + [radius]
    value, _ = segmented_integral(lambda s: phantom.eval(line.point(s)),
                                  edges, tol=tol)
    return value


def verify_sinogram(lines=25, seed=0, tol=1e-8, phantom=None):
    """Exact ellipse line integrals against quadrature of the phantom."""
    rng = np.random.default_rng(seed)
    phantom = phantom or shepp_logan()
    worst = 0.0
    for _ in range(lines):
        line = RadonLine(rng.uniform(-math.sqrt(2), math.sqrt(2)),
                         rng.uniform(0.0, math.pi))
        exact = phantom.radon(line.r, line.theta)
        quad = sinogram_quadrature(phantom, line, tol=min(tol / 10.0, 1e-9))
        worst = max(worst, abs(exact - quad))
    report = Report()
    report.check("sinogram exact vs quadrature (%d lines)" % lines,
                 worst, tol)
    disk = _unit_disk()
    r = 0.3
    delta = abs(disk.radon(r, 1.1) - 2.0 * math.sqrt(1.0 - r * r))
    report.check("unit-disk chord closed form", delta, 1e-12)
    return report


def _unit_disk():
    from .phantom import Ellipse, EllipsePhantom
    return EllipsePhantom([Ellipse(0.0, 0.0, 1.0, 1.0, 0.0, 1.0)])
