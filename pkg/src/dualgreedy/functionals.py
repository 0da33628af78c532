"""Sampling functionals: point evaluations and line integrals.

A ``RadonLine(r, theta)`` integrates a bivariate function along the
straight line at signed distance r from the origin with unit normal
(cos theta, sin theta); points on it are

    (r cos(theta) - s sin(theta), r sin(theta) + s cos(theta)),  s in R.

Angles are normalized into [0, pi).  Wrapping theta by a half-turn
flips the normal, so the radius sign flips with it; this keeps the
normalization line-preserving, and two parameterizations of the same
line compare equal.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class PointEval:
    """Dirac functional f -> f(x)."""

    x: tuple

    kind = "point"

    def __post_init__(self):
        pt = tuple(float(v) for v in np.atleast_1d(np.asarray(self.x, dtype=float)))
        if not pt or not all(math.isfinite(v) for v in pt):
            raise ValueError("point coordinates must be finite")
        object.__setattr__(self, "x", pt)

    @property
    def dim(self):
        return len(self.x)

    def key(self):
        return ("point",) + self.x


def normalize_line_params(r, theta):
    """Wrap theta into [0, pi), flipping r's sign per half-turn."""
    k = math.floor(theta / math.pi)
    theta = theta - k * math.pi
    if theta >= math.pi:  # floating point edge of the wrap
        theta -= math.pi
        k += 1
    if theta < 0.0:
        theta = 0.0
    if k % 2:
        r = -r
    return r, theta


@dataclass(frozen=True)
class RadonLine:
    """Line-integral functional with parameters (r, theta)."""

    r: float
    theta: float

    kind = "radon"

    def __post_init__(self):
        r, theta = float(self.r), float(self.theta)
        if not (math.isfinite(r) and math.isfinite(theta)):
            raise ValueError("line parameters must be finite")
        r, theta = normalize_line_params(r, theta)
        object.__setattr__(self, "r", r)
        object.__setattr__(self, "theta", theta)

    @property
    def dim(self):
        return 2

    def point(self, s):
        """Point on the line at arc length s from the foot of the normal."""
        s = np.asarray(s, dtype=float)
        ct, st = math.cos(self.theta), math.sin(self.theta)
        return np.stack([self.r * ct - s * st, self.r * st + s * ct], axis=-1)

    def key(self):
        return ("radon", self.r, self.theta)


def line_point(functional, s):
    """line_point(RadonLine(r, theta), s) -> point on the line."""
    if not isinstance(functional, RadonLine):
        raise TypeError("line_point is only defined for RadonLine")
    return functional.point(s)


@dataclass(frozen=True)
class ParameterMetric:
    """Euclidean metric on (r, theta) with period-pi angular wraparound.

    distance = sqrt(dr^2 + theta_scale^2 * dtheta^2) where dtheta is the
    wrapped angular difference min(|da|, pi - |da|).
    """

    theta_scale: float = 1.0

    def __post_init__(self):
        if not (math.isfinite(self.theta_scale) and self.theta_scale >= 0):
            raise ValueError("theta_scale must be nonnegative and finite")

    def distance_arrays(self, r1, t1, r2, t2):
        da = np.abs(np.asarray(t1, dtype=float) - np.asarray(t2, dtype=float))
        da = np.minimum(da, np.pi - da)
        dr = np.asarray(r1, dtype=float) - np.asarray(r2, dtype=float)
        return np.sqrt(dr * dr + (self.theta_scale * da) ** 2)

    def distance(self, a, b):
        if not (isinstance(a, RadonLine) and isinstance(b, RadonLine)):
            raise TypeError("parameter distance is only defined between "
                            "RadonLine functionals")
        return float(self.distance_arrays(a.r, a.theta, b.r, b.theta))


CSV_HEADER = ["kind", "r_or_x1", "theta_or_x2", "sample"]


def write_functionals_csv(path, functionals, samples=None):
    """Write functionals (and optional samples) in the candidate schema."""
    if samples is not None and len(samples) != len(functionals):
        raise ValueError("samples length must match functionals")
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_HEADER)
        for i, f in enumerate(functionals):
            if isinstance(f, RadonLine):
                row = ["radon", repr(f.r), repr(f.theta)]
            elif isinstance(f, PointEval):
                if f.dim > 2:
                    raise ValueError("CSV schema holds at most 2 coordinates")
                x2 = repr(f.x[1]) if f.dim == 2 else ""
                row = ["point", repr(f.x[0]), x2]
            else:
                raise TypeError("unknown functional %r" % (f,))
            row.append("" if samples is None else repr(float(samples[i])))
            writer.writerow(row)


def read_functionals_csv(path):
    """Read a candidate CSV; returns (functionals, samples or None)."""
    functionals, samples = [], []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != CSV_HEADER:
            raise ValueError("expected header %s" % ",".join(CSV_HEADER))
        for row in reader:
            if not row:
                continue
            kind = row[0].strip()
            if kind == "radon":
                functionals.append(RadonLine(float(row[1]), float(row[2])))
            elif kind == "point":
                x2 = row[2].strip()
                pt = (float(row[1]),) if not x2 else (float(row[1]), float(x2))
                functionals.append(PointEval(pt))
            else:
                raise ValueError("unknown functional kind %r" % kind)
            sval = row[3].strip() if len(row) > 3 else ""
            samples.append(float(sval) if sval else None)
    if any(s is None for s in samples):
        if not all(s is None for s in samples):
            raise ValueError("samples must be present for all rows or none")
        return functionals, None
    return functionals, np.asarray(samples, dtype=float)
