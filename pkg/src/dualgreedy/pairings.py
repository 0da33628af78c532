"""Dual-space algebra: pairings, representers, Gram matrices.

For a kernel K and continuous functionals lambda, mu the pairing is
<lambda, mu> = lambda^x mu^y K(x, y), the inner product of their Riesz
representers.  Point evaluations pair to plain kernel values.  Line
functionals are supported for the weighted Gaussian kernel

    K_w(x, y) = exp(-beta |x|^2) exp(-alpha |x-y|^2) exp(-beta |y|^2),

where both integrals are Gaussian and close in elementary terms.

Writing a line as l(s) = r n + s t with unit normal n = (cos h, sin h)
and tangent t, so |l(s)|^2 = r^2 + s^2, completing the square in s
gives the representer of lambda = integral along (r, h):

    g_lambda(x) = sqrt(pi / (alpha + beta)) *
        exp(-beta |x|^2 - beta r^2 - alpha (x.n - r)^2
            - (alpha beta / (alpha + beta)) (x.t)^2).

For two lines (r1, h1), (r2, h2) with c = cos(h1 - h2), the double
Gaussian integral yields, with D = (alpha + beta)^2 - (alpha c)^2,
q = r1^2 + r2^2 and v2 = q - 2 r1 r2 c:

    <l1, l2> = pi / sqrt(D) * exp(-beta q - alpha v2
        + alpha^2 sin^2(h1 - h2) ((alpha + beta) q - 2 alpha c r1 r2) / D).

Both formulas are cross-validated against the adaptive quadrature
oracle in the test suite; the engine's "quadrature" mode computes every
line pairing by that oracle instead of the closed forms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .functionals import ParameterMetric, PointEval, RadonLine
from .kernels import Kernel
from .quadrature import QuadratureSpec, double_line_integral, line_integral

# A Gaussian tail exp(-beta R^2) drops below 1e-16 at R = sqrt(37/beta).
_TAIL_EXPONENT = 37.0
_COND_SENTINEL_RTOL = 1e-14


class UnsupportedPairingError(ValueError):
    """A functional/kernel combination with no continuous pairing."""


def _radon_radon(alpha, beta, r1, t1, r2, t2):
    """Closed-form line-line pairing for the weighted Gaussian kernel."""
    dt = np.asarray(t1, dtype=float) - np.asarray(t2, dtype=float)
    c = np.cos(dt)
    s2 = np.sin(dt) ** 2
    det = (alpha + beta) ** 2 - (alpha * c) ** 2
    q = np.asarray(r1, dtype=float) ** 2 + np.asarray(r2, dtype=float) ** 2
    cross = np.asarray(r1, dtype=float) * np.asarray(r2, dtype=float)
    v2 = q - 2.0 * cross * c
    expo = (-beta * q - alpha * v2
            + alpha * alpha * s2 * ((alpha + beta) * q - 2.0 * alpha * c * cross) / det)
    return np.pi / np.sqrt(det) * np.exp(expo)


def _point_radon(alpha, beta, x, r, t):
    """Representer of the line (r, t) evaluated at points x (..., 2)."""
    x = np.asarray(x, dtype=float)
    r = np.asarray(r, dtype=float)
    t = np.asarray(t, dtype=float)
    ct, st = np.cos(t), np.sin(t)
    xn = x[..., 0] * ct + x[..., 1] * st
    xt = -x[..., 0] * st + x[..., 1] * ct
    expo = (-beta * np.sum(x * x, axis=-1) - beta * r * r
            - alpha * (xn - r) ** 2
            - (alpha * beta / (alpha + beta)) * xt * xt)
    return math.sqrt(math.pi / (alpha + beta)) * np.exp(expo)


class _Packed:
    """Kind-grouped parameter arrays for vectorized pairing columns."""

    def __init__(self, functionals):
        self.functionals = list(functionals)
        self.n = len(self.functionals)
        pidx, ridx, pts, rs, ts = [], [], [], [], []
        for i, f in enumerate(self.functionals):
            if isinstance(f, PointEval):
                pidx.append(i)
                pts.append(f.x)
            elif isinstance(f, RadonLine):
                ridx.append(i)
                rs.append(f.r)
                ts.append(f.theta)
            else:
                raise TypeError("unknown functional %r" % (f,))
        self.point_idx = np.asarray(pidx, dtype=int)
        self.radon_idx = np.asarray(ridx, dtype=int)
        self.points = (np.asarray(pts, dtype=float) if pts
                       else np.empty((0, 2)))
        self.radii = np.asarray(rs, dtype=float)
        self.thetas = np.asarray(ts, dtype=float)


def pack(functionals):
    if isinstance(functionals, _Packed):
        return functionals
    packed = getattr(functionals, "packed", None)
    if isinstance(packed, _Packed):
        return packed
    return _Packed(functionals)


@dataclass
class GramMatrix:
    """Pairing matrix of a functional list, entries [i, j] = <l_i, l_j>."""

    matrix: np.ndarray
    functionals: list

    def __array__(self, dtype=None, copy=None):
        if dtype is not None:
            return self.matrix.astype(dtype)
        return self.matrix

    def __len__(self):
        return len(self.functionals)

    def condition_number(self):
        return condition_number(self.matrix)

    def cholesky(self):
        """Lower Cholesky factor; LinAlgError if not positive definite."""
        return np.linalg.cholesky(self.matrix)


def condition_number(gram):
    """Spectral condition number via a symmetric eigensolver.

    Returns math.inf when the smallest eigenvalue does not exceed
    1e-14 times the largest (the near-singular sentinel).
    """
    a = np.asarray(gram, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] == 0:
        raise ValueError("gram must be a nonempty square matrix")
    w = np.linalg.eigvalsh(a)
    lo, hi = float(w[0]), float(w[-1])
    if hi <= 0 or lo <= _COND_SENTINEL_RTOL * hi:
        return math.inf
    return hi / lo


def write_gram_csv(gram, path):
    """Row-major CSV export; first line carries the dimension n."""
    a = np.asarray(gram, dtype=float)
    with open(path, "w", newline="") as fh:
        fh.write("n,%d\n" % a.shape[0])
        for row in a:
            fh.write(",".join(repr(float(v)) for v in row) + "\n")


def read_gram_csv(path):
    with open(path, newline="") as fh:
        first = fh.readline().strip().split(",")
        if len(first) != 2 or first[0] != "n":
            raise ValueError("expected 'n,<size>' header")
        n = int(first[1])
        rows = [[float(v) for v in fh.readline().strip().split(",")]
                for _ in range(n)]
    a = np.asarray(rows, dtype=float)
    if a.shape != (n, n):
        raise ValueError("gram CSV body does not match declared size")
    return a


class PairingEngine:
    """Computes pairings, representers and Gram matrices for a kernel.

    mode "analytic" uses the closed forms above; mode "quadrature"
    routes every line-functional pairing through the adaptive oracle
    (point-point pairings have no integral either way).  Results of the
    scalar ``pairing`` are cached under a canonically ordered key, so a
    cached value is always bit-identical to recomputation and pairing
    is exactly symmetric in its arguments.
    """

    def __init__(self, kernel: Kernel, mode="analytic", quad=None):
        if mode not in ("analytic", "quadrature"):
            raise ValueError("mode must be 'analytic' or 'quadrature'")
        self.kernel = kernel
        self.mode = mode
        self.quad = quad or self._default_quad_spec()
        self._cache = {}

    # -- support and configuration ------------------------------------

    def _default_quad_spec(self):
        k = self.kernel
        if k.weight is None:
            radius = math.sqrt(_TAIL_EXPONENT)
            alpha_scale = k.alpha
        else:
            radius = math.sqrt(_TAIL_EXPONENT / k.weight.beta)
            alpha_scale = k.alpha
        # Start with panels fine enough to see the kernel length scale
        # 1/sqrt(2 alpha) so the first refinement pass is honest.
        want = radius * math.sqrt(2.0 * alpha_scale) / 4.0
        min_panels = 32
        while min_panels < want and min_panels < 512:
            min_panels *= 2
        return QuadratureSpec(tol=1e-11, radius=radius,
                              max_panels=65536, min_panels=min_panels)

    def supports(self, functional):
        if isinstance(functional, PointEval):
            return functional.dim == self.kernel.dim
        if isinstance(functional, RadonLine):
            return (self.kernel.family == "gaussian"
                    and self.kernel.weight is not None
                    and self.kernel.dim == 2)
        return False

    def _require(self, *functionals):
        for f in functionals:
            if not isinstance(f, (PointEval, RadonLine)):
                raise TypeError("unknown functional %r" % (f,))
            if not self.supports(f):
                if isinstance(f, PointEval):
                    raise UnsupportedPairingError(
                        "point dimension %d does not match kernel dimension %d"
                        % (f.dim, self.kernel.dim))
                raise UnsupportedPairingError(
                    "line functionals need the weighted Gaussian kernel in "
                    "dimension 2; got family=%r weighted=%s dim=%d"
                    % (self.kernel.family, self.kernel.weight is not None,
                       self.kernel.dim))

    # -- scalar pairing with cache -------------------------------------

    def pairing(self, a, b):
        """<a, b>, symmetric and cached."""
        self._require(a, b)
        ka, kb = a.key(), b.key()
        if kb < ka:
            a, b = b, a
            ka, kb = kb, ka
        cache_key = (ka, kb)
        hit = self._cache.get(cache_key)
        if hit is not None:
            return hit
        value = float(self._pair_uncached(a, b))
        self._cache[cache_key] = value
        return value

    def clear_cache(self):
        self._cache.clear()

    def _pair_uncached(self, a, b):
        k = self.kernel
        if isinstance(a, PointEval) and isinstance(b, PointEval):
            return k.evaluate(np.asarray(a.x), np.asarray(b.x))
        if self.mode == "analytic":
            if isinstance(a, PointEval):
                return _point_radon(k.alpha, k.weight.beta,
                                    np.asarray(a.x), b.r, b.theta)
            if isinstance(b, PointEval):
                return _point_radon(k.alpha, k.weight.beta,
                                    np.asarray(b.x), a.r, a.theta)
            return _radon_radon(k.alpha, k.weight.beta,
                                a.r, a.theta, b.r, b.theta)
        return self._pair_quadrature(a, b)

    def _pair_quadrature(self, a, b):
        k = self.kernel
        if isinstance(a, RadonLine) and isinstance(b, RadonLine):
            value, _ = double_line_integral(
                lambda s, t: k.evaluate(a.point(s), b.point(t)), self.quad)
            return value
        point, line = (a, b) if isinstance(a, PointEval) else (b, a)
        x = np.asarray(point.x, dtype=float)
        value, _ = line_integral(
            lambda s: k.evaluate(x, line.point(s)), self.quad)
        return value

    # -- vectorized columns and Gram assembly --------------------------

    def pairing_column(self, functional, functionals):
        """Vector of <functional, mu> over a packed functional list."""
        self._require(functional)
        packed = pack(functionals)
        if packed.point_idx.size:
            self._require(packed.functionals[packed.point_idx[0]])
        if packed.radon_idx.size:
            self._require(packed.functionals[packed.radon_idx[0]])
        if self.mode == "quadrature":
            return np.array([self.pairing(functional, g)
                             for g in packed.functionals])
        k = self.kernel
        out = np.empty(packed.n, dtype=float)
        if isinstance(functional, PointEval):
            x = np.asarray(functional.x, dtype=float)
            if packed.point_idx.size:
                out[packed.point_idx] = k.evaluate(x, packed.points)
            if packed.radon_idx.size:
                out[packed.radon_idx] = _point_radon(
                    k.alpha, k.weight.beta, x, packed.radii, packed.thetas)
        else:
            if packed.point_idx.size:
                out[packed.point_idx] = _point_radon(
                    k.alpha, k.weight.beta, packed.points,
                    functional.r, functional.theta)
            if packed.radon_idx.size:
                out[packed.radon_idx] = _radon_radon(
                    k.alpha, k.weight.beta, functional.r, functional.theta,
                    packed.radii, packed.thetas)
        return out

    def gram_diagonal(self, functionals):
        packed = pack(functionals)
        out = np.empty(packed.n, dtype=float)
        if self.mode == "quadrature":
            return np.array([self.pairing(g, g) for g in packed.functionals])
        k = self.kernel
        if packed.point_idx.size:
            self._require(packed.functionals[packed.point_idx[0]])
            out[packed.point_idx] = k.diagonal(packed.points)
        if packed.radon_idx.size:
            self._require(packed.functionals[packed.radon_idx[0]])
            out[packed.radon_idx] = _radon_radon(
                k.alpha, k.weight.beta, packed.radii, packed.thetas,
                packed.radii, packed.thetas)
        return out

    def gram(self, functionals):
        """Full pairing matrix; upper triangle computed, then mirrored."""
        packed = pack(functionals)
        n = packed.n
        if n == 0:
            raise ValueError("gram needs at least one functional")
        if self.mode == "quadrature":
            g = np.empty((n, n), dtype=float)
            for i in range(n):
                for j in range(i, n):
                    g[i, j] = self.pairing(packed.functionals[i],
                                           packed.functionals[j])
            g = np.triu(g) + np.triu(g, 1).T
            return GramMatrix(g, packed.functionals)
        k = self.kernel
        g = np.zeros((n, n), dtype=float)
        if packed.point_idx.size:
            self._require(packed.functionals[packed.point_idx[0]])
            block = k.evaluate(packed.points[:, None, :],
                               packed.points[None, :, :])
            g[np.ix_(packed.point_idx, packed.point_idx)] = block
        if packed.radon_idx.size:
            self._require(packed.functionals[packed.radon_idx[0]])
            block = _radon_radon(k.alpha, k.weight.beta,
                                 packed.radii[:, None], packed.thetas[:, None],
                                 packed.radii[None, :], packed.thetas[None, :])
            g[np.ix_(packed.radon_idx, packed.radon_idx)] = block
        if packed.point_idx.size and packed.radon_idx.size:
            block = _point_radon(k.alpha, k.weight.beta,
                                 packed.points[:, None, :],
                                 packed.radii[None, :], packed.thetas[None, :])
            g[np.ix_(packed.point_idx, packed.radon_idx)] = block
            g[np.ix_(packed.radon_idx, packed.point_idx)] = block.T
        g = np.triu(g) + np.triu(g, 1).T
        return GramMatrix(g, packed.functionals)

    # -- representers and distances ------------------------------------

    def representer_eval(self, functional, x):
        """Riesz representer g_functional evaluated at points x."""
        self._require(functional)
        x = np.asarray(x, dtype=float)
        if isinstance(functional, PointEval):
            return self.kernel.evaluate(x, np.asarray(functional.x))
        if self.mode == "analytic":
            return _point_radon(self.kernel.alpha, self.kernel.weight.beta,
                                x, functional.r, functional.theta)
        single = x.ndim == 1
        pts = x[None, :] if single else x.reshape(-1, x.shape[-1])
        vals = np.array([
            line_integral(lambda s: self.kernel.evaluate(p, functional.point(s)),
                          self.quad)[0]
            for p in pts])
        if single:
            return float(vals[0])
        return vals.reshape(x.shape[:-1])

    def norm(self, functional):
        return math.sqrt(self.pairing(functional, functional))

    def dual_distance(self, a, b):
        """Native-space distance |g_a - g_b| of the representers."""
        aa = self.pairing(a, a)
        bb = self.pairing(b, b)
        ab = self.pairing(a, b)
        return math.sqrt(max(0.0, aa - 2.0 * ab + bb))

    def dual_distance_column(self, functional, functionals, diag=None,
                             column=None):
        """Vector of dual distances to each member of a functional list."""
        packed = pack(functionals)
        if diag is None:
            diag = self.gram_diagonal(packed)
        if column is None:
            column = self.pairing_column(functional, packed)
        own = self.pairing(functional, functional)
        return np.sqrt(np.clip(diag - 2.0 * column + own, 0.0, None))

    def combination_eval(self, functionals, coeffs, x):
        """Evaluate sum_i coeffs[i] * g_i at points x."""
        coeffs = np.asarray(coeffs, dtype=float)
        functionals = list(functionals)
        if len(functionals) != coeffs.size:
            raise ValueError("coefficient count must match functionals")
        x = np.asarray(x, dtype=float)
        out = np.zeros(x.shape[:-1], dtype=float)
        for c, f in zip(coeffs, functionals):
            out = out + c * self.representer_eval(f, x)
        return out
