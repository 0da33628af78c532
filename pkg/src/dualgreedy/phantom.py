"""Piecewise-constant ellipse phantoms and their exact line integrals.

A phantom is a sum of constant-intensity ellipses; its value at a point
adds the intensities of the ellipses containing it (boundary included),
and its integral along a line adds per-ellipse chord contributions.
Mapping a line point p(s) into an ellipse's unit-disk frame u(s) =
u0 + s m turns containment into the quadratic |u0 + s m|^2 <= 1, whose
root gap (the parameterization has unit speed) gives the chord length
2 sqrt(disc) / |m|^2 with disc = (u0.m)^2 - |m|^2 (|u0|^2 - 1).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .functionals import RadonLine, read_functionals_csv, \
    write_functionals_csv


@dataclass(frozen=True)
class Ellipse:
    """Axis lengths a, b, center (x0, y0), tilt phi (radians), intensity."""

    x0: float
    y0: float
    a: float
    b: float
    phi: float
    intensity: float

    def __post_init__(self):
        if not (self.a > 0 and self.b > 0):
            raise ValueError("semi-axes must be positive")


def _deg(v):
    return math.radians(v)


# Head phantom of Shepp & Logan (1974), the standard ten-ellipse table
# (as tabulated e.g. in Kak & Slaney, "Principles of Computerized
# Tomographic Imaging"). Columns: x0, y0, a, b, phi, intensity.
_SHEPP_LOGAN_ROWS = (
    (0.0, 0.0, 0.69, 0.92, 0.0, 2.0),
    (0.0, -0.0184, 0.6624, 0.874, 0.0, -0.98),
    (0.22, 0.0, 0.11, 0.31, -18.0, -0.02),
    (-0.22, 0.0, 0.16, 0.41, 18.0, -0.02),
    (0.0, 0.35, 0.21, 0.25, 0.0, 0.01),
    (0.0, 0.1, 0.046, 0.046, 0.0, 0.01),
    (0.0, -0.1, 0.046, 0.046, 0.0, 0.01),
    (-0.08, -0.605, 0.046, 0.023, 0.0, 0.01),
    (0.0, -0.605, 0.023, 0.023, 0.0, 0.01),
    (0.06, -0.605, 0.023, 0.046, 0.0, 0.01),
)

# High-contrast intensity variant (Toft 1996); geometry unchanged.
_MODIFIED_INTENSITIES = (1.0, -0.8, -0.2, -0.2, 0.1, 0.1, 0.1, 0.1, 0.1, 0.1)


class EllipsePhantom:
    """A finite union of weighted ellipses inside [-1, 1]^2."""

    def __init__(self, ellipses):
        self.ellipses = tuple(ellipses)
        if not self.ellipses:
            raise ValueError("phantom needs at least one ellipse")
        for e in self.ellipses:
            reach = max(e.a, e.b)
            if abs(e.x0) + reach > 1.0 + 1e-12 or abs(e.y0) + reach > 1.0 + 1e-12:
                raise ValueError("ellipse exceeds the [-1, 1]^2 domain")

    def eval(self, points):
        """Phantom value at points (..., 2); boundary counts as inside."""
        points = np.asarray(points, dtype=float)
        if points.shape[-1] != 2:
            raise ValueError("points must have trailing dimension 2")
        out = np.zeros(points.shape[:-1], dtype=float)
        px, py = points[..., 0], points[..., 1]
        for e in self.ellipses:
            cp, sp = math.cos(e.phi), math.sin(e.phi)
            dx, dy = px - e.x0, py - e.y0
            u = (cp * dx + sp * dy) / e.a
            v = (-sp * dx + cp * dy) / e.b
            out = out + np.where(u * u + v * v <= 1.0, e.intensity, 0.0)
        return out

    __call__ = eval

    def radon(self, r, theta):
        """Exact line integral for line parameters (r, theta), vectorized."""
        r = np.asarray(r, dtype=float)
        theta = np.asarray(theta, dtype=float)
        ct, st = np.cos(theta), np.sin(theta)
        out = np.zeros(np.broadcast(r, theta).shape, dtype=float)
        for e in self.ellipses:
            cp, sp = math.cos(e.phi), math.sin(e.phi)
            # foot of the normal, shifted to the ellipse frame
            fx, fy = r * ct - e.x0, r * st - e.y0
            u0x = (cp * fx + sp * fy) / e.a
            u0y = (-sp * fx + cp * fy) / e.b
            # tangent direction in that frame
            mx = (-cp * st + sp * ct) / e.a
            my = (sp * st + cp * ct) / e.b
            mm = mx * mx + my * my
            um = u0x * mx + u0y * my
            disc = um * um - mm * (u0x * u0x + u0y * u0y - 1.0)
            out = out + e.intensity * 2.0 * np.sqrt(np.clip(disc, 0.0, None)) / mm
        if out.ndim == 0:
            return float(out)
        return out

    def rasterize(self, grid):
        """Evaluate on the grid x grid cell centers of [-1, 1]^2.

        Returns an image array indexed [row, col] with row 0 at y = +1
        (image convention).
        """
        centers = cell_centers(grid)
        xs, ys = np.meshgrid(centers, centers[::-1])
        return self.eval(np.stack([xs, ys], axis=-1))


def cell_centers(grid):
    grid = int(grid)
    if grid < 1:
        raise ValueError("grid must be positive")
    step = 2.0 / grid
    return -1.0 + step * (np.arange(grid) + 0.5)


def shepp_logan(modified=False):
    """The ten-ellipse head phantom; modified=True selects the
    high-contrast intensity variant."""
    rows = _SHEPP_LOGAN_ROWS
    if modified:
        rows = tuple(row[:5] + (inten,)
                     for row, inten in zip(rows, _MODIFIED_INTENSITIES))
    return EllipsePhantom(
        Ellipse(x0, y0, a, b, _deg(phi), inten)
        for x0, y0, a, b, phi, inten in rows)


def phantom_eval(phantom, point):
    value = phantom.eval(np.asarray(point, dtype=float))
    return float(value) if np.ndim(value) == 0 else value


def radon_exact(phantom, r, theta):
    return phantom.radon(r, theta)


R_MAX = math.sqrt(2.0)


@dataclass
class SampleSet:
    """Sampled line functionals with their exact phantom integrals."""

    radii: np.ndarray
    thetas: np.ndarray
    values: np.ndarray
    seed: int | None = None

    def __len__(self):
        return len(self.radii)

    def functionals(self):
        return [RadonLine(r, t) for r, t in zip(self.radii, self.thetas)]

    def to_candidate_set(self):
        from .newton import CandidateSet
        return CandidateSet(self.functionals(), self.values)

    def to_csv(self, path):
        write_functionals_csv(path, self.functionals(), self.values)

    @classmethod
    def from_csv(cls, path):
        functionals, values = read_functionals_csv(path)
        if values is None:
            raise ValueError("sample CSV carries no sample column")
        if any(not isinstance(f, RadonLine) for f in functionals):
            raise ValueError("sample CSV must hold line functionals")
        return cls(np.array([f.r for f in functionals]),
                   np.array([f.theta for f in functionals]),
                   values)


def sample_functionals(n, seed, phantom=None, positive_radii_only=False):
    """Draw n line functionals uniformly and attach exact integrals.

    Radii are uniform on [-sqrt(2), sqrt(2)] (or (0, sqrt(2)] with
    positive_radii_only), angles uniform on [0, pi).
    """
    n = int(n)
    if n < 1:
        raise ValueError("n must be positive")
    if phantom is None:
        phantom = shepp_logan()
    rng = np.random.default_rng(seed)
    lo = 0.0 if positive_radii_only else -R_MAX
    radii = rng.uniform(lo, R_MAX, size=n)
    thetas = rng.uniform(0.0, math.pi, size=n)
    values = phantom.radon(radii, thetas)
    return SampleSet(radii, thetas, np.asarray(values, dtype=float), seed=seed)
