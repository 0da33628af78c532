"""Incremental generalized interpolation in a Newton-type basis.

Given functionals lambda_1..lambda_n with representers g_i, the
interpolant of data y_i is the projection of the (unknown) target onto
span{g_i}.  Instead of solving the Gram system from scratch each step,
the model maintains an orthonormal Newton basis v_1..v_n of that span:

    v_{n+1} = (g_new - sum_j lambda_new(v_j) v_j) / P(lambda_new)
    c_{n+1} = (y_new - lambda_new(s_n)) / P(lambda_new)

where P is the power function P(l)^2 = <l, l> - sum_j l(v_j)^2 and
s_n = sum_j c_j v_j is the current interpolant.  With a candidate set
attached, the quantities every selection rule needs (power, residual,
basis evaluations) are updated in O(N) per step from one pairing
column.

``direct_solve`` provides the one-shot Cholesky route through the full
Gram matrix; Newton and direct interpolants agree to solver accuracy
and serve as mutual oracles in the tests.
"""

from __future__ import annotations

import json
import math

import numpy as np
from scipy.linalg import cho_factor, cho_solve, solve_triangular

from .functionals import PointEval, RadonLine, read_functionals_csv, \
    write_functionals_csv
from .kernels import Kernel
from .pairings import PairingEngine, pack

TAU_POWER_FACTOR = 1e-7
# Cached squared powers more negative than this (relative to <l, l>)
# indicate drift and trigger a from-scratch recompute.
DRIFT_RTOL = 1e-8

MODEL_FORMAT = "dualgreedy-model"
MODEL_VERSION = 1


class NearDependenceError(RuntimeError):
    """A functional is numerically dependent on the selected ones."""

    def __init__(self, message, functional=None, index=None, power2=None):
        super().__init__(message)
        self.functional = functional
        self.index = index
        self.power2 = power2


class CandidateSet:
    """A finite pool of pairwise-distinct functionals, optionally sampled."""

    def __init__(self, functionals, samples=None):
        self.functionals = list(functionals)
        if not self.functionals:
            raise ValueError("candidate set must be nonempty")
        seen = {}
        for i, f in enumerate(self.functionals):
            key = f.key()
            if key in seen:
                raise ValueError(
                    "functionals %d and %d coincide after normalization"
                    % (seen[key], i))
            seen[key] = i
        self._index = seen
        if samples is not None:
            samples = np.asarray(samples, dtype=float)
            if samples.shape != (len(self.functionals),):
                raise ValueError("samples must be one value per functional")
            if not np.all(np.isfinite(samples)):
                raise ValueError("samples must be finite")
        self.samples = samples
        self.packed = pack(self.functionals)

    def __len__(self):
        return len(self.functionals)

    def index_of(self, functional):
        return self._index.get(functional.key())

    def to_csv(self, path):
        write_functionals_csv(path, self.functionals, self.samples)

    @classmethod
    def from_csv(cls, path):
        functionals, samples = read_functionals_csv(path)
        return cls(functionals, samples)


class NewtonModel:
    """Incrementally extended generalized interpolant.

    Parameters
    ----------
    engine     : PairingEngine
    candidates : optional CandidateSet with samples; enables the cached
                 per-candidate powers, residuals and basis evaluations
                 that the greedy rules consume
    capacity   : expected number of extensions (storage hint)
    tau_power  : breakdown threshold on the power function; defaults to
                 1e-7 * sqrt(max <l, l>) over the candidates
    """

    def __init__(self, engine: PairingEngine, candidates: CandidateSet | None = None,
                 capacity: int = 16, tau_power: float | None = None):
        self.engine = engine
        self.candidates = candidates
        self.n = 0
        self.selected = []
        self.selected_indices = []
        cap = max(int(capacity), 1)
        self._W = np.zeros((cap, cap))   # column j: v_j over g_1..g_j
        self._L = np.zeros((cap, cap))   # row i: lambda_i(v_1..v_i)
        self._c = np.zeros(cap)
        self._gdiag_sel = np.zeros(cap)
        if candidates is not None:
            if candidates.samples is None:
                raise ValueError("candidate set needs samples to drive a model")
            m = len(candidates)
            self._V = np.zeros((m, cap))
            self._gdiag = engine.gram_diagonal(candidates.packed)
            self._p2 = self._gdiag.copy()
            self._res = candidates.samples.copy()
            self.selected_mask = np.zeros(m, dtype=bool)
            max_norm2 = float(np.max(self._gdiag))
        else:
            self._V = None
            self._gdiag = None
            self._p2 = None
            self._res = None
            self.selected_mask = None
            max_norm2 = 0.0
        if tau_power is None:
            self.tau_power = TAU_POWER_FACTOR * math.sqrt(max_norm2)
        else:
            self.tau_power = float(tau_power)

    # -- internal storage ------------------------------------------------

    def _ensure_capacity(self):
        cap = self._W.shape[0]
        if self.n < cap:
            return
        new = max(2 * cap, 16)
        for name in ("_W", "_L"):
            old = getattr(self, name)
            grown = np.zeros((new, new))
            grown[:cap, :cap] = old
            setattr(self, name, grown)
        for name in ("_c", "_gdiag_sel"):
            old = getattr(self, name)
            grown = np.zeros(new)
            grown[:cap] = old
            setattr(self, name, grown)
        if self._V is not None:
            grown = np.zeros((self._V.shape[0], new))
            grown[:, :cap] = self._V
            self._V = grown

    def _tau2(self, own):
        tau = self.tau_power
        if tau <= 0.0 and self._gdiag is None:
            tau = TAU_POWER_FACTOR * math.sqrt(
                max(own, float(np.max(self._gdiag_sel[:self.n], initial=0.0))))
        return tau * tau

    # -- evaluation against the Newton basis ------------------------------

    def basis_values(self, functional, column=None):
        """Vector (lambda(v_1), ..., lambda(v_n)) for a fresh functional."""
        n = self.n
        if n == 0:
            return np.zeros(0)
        if column is None:
            column = np.array([self.engine.pairing(functional, g)
                               for g in self.selected])
        return self._W[:n, :n].T @ column[:n]

    def power2(self, functional):
        own = self.engine.pairing(functional, functional)
        z = self.basis_values(functional)
        return max(0.0, own - float(z @ z))

    def power(self, functional):
        """Power function P(lambda) of the current selected span."""
        return math.sqrt(self.power2(functional))

    def residual(self, functional, sample):
        """sample - lambda(current interpolant)."""
        z = self.basis_values(functional)
        return float(sample) - float(z @ self._c[:self.n])

    def powers(self):
        """Cached powers over the candidate set."""
        if self._p2 is None:
            raise ValueError("model has no candidate set attached")
        return np.sqrt(self._p2)

    def residuals(self):
        if self._res is None:
            raise ValueError("model has no candidate set attached")
        return self._res.copy()

    # -- extension ---------------------------------------------------------

    def extend(self, functional, sample=None, pairing_column=None):
        """Append one functional/sample pair; returns self.

        sample may be omitted for candidates, in which case the cached
        candidate sample is used. Raises NearDependenceError when the
        functional's power does not exceed the breakdown threshold.
        """
        self.engine._require(functional)
        n = self.n
        idx = None if self.candidates is None \
            else self.candidates.index_of(functional)
        if idx is not None:
            own = float(self._gdiag[idx])
            z = self._V[idx, :n].copy()
            p2_new = float(self._p2[idx])
            if sample is None \
                    or float(sample) == float(self.candidates.samples[idx]):
                res_new = float(self._res[idx])
            else:
                res_new = float(sample) - float(z @ self._c[:n])
        else:
            if sample is None:
                raise ValueError("sample required for a functional outside "
                                 "the candidate set")
            own = self.engine.pairing(functional, functional)
            sel_col = np.array([self.engine.pairing(functional, g)
                                for g in self.selected])
            z = self._W[:n, :n].T @ sel_col if n else np.zeros(0)
            p2_new = max(0.0, own - float(z @ z))
            res_new = float(sample) - float(z @ self._c[:n])
        if p2_new <= self._tau2(own):
            raise NearDependenceError(
                "functional is numerically dependent on the selected set "
                "(power^2 %.3e <= tau^2 %.3e)" % (p2_new, self._tau2(own)),
                functional=functional, index=idx, power2=p2_new)
        self._ensure_capacity()
        p = math.sqrt(p2_new)
        self._W[:n, n] = -(self._W[:n, :n] @ z) / p
        self._W[n, n] = 1.0 / p
        self._L[n, :n] = z
        self._L[n, n] = p
        self._c[n] = res_new / p
        self._gdiag_sel[n] = own
        v_new = None
        if self._V is not None:
            if pairing_column is None:
                pairing_column = self.engine.pairing_column(
                    functional, self.candidates.packed)
            v_new = (pairing_column - self._V[:, :n] @ z) / p
            self._V[:, n] = v_new
            self._res -= self._c[n] * v_new
            self._p2 -= v_new * v_new
            if idx is not None:
                self.selected_mask[idx] = True
        self.selected.append(functional)
        self.selected_indices.append(idx)
        self.n = n + 1
        if v_new is not None:
            drifted = self._p2 < -DRIFT_RTOL * self._gdiag
            if drifted.any():
                self._recompute_powers(np.flatnonzero(drifted))
            np.clip(self._p2, 0.0, None, out=self._p2)
        return self

    def extend_candidate(self, index, pairing_column=None):
        """Extend by candidate index using its cached sample."""
        f = self.candidates.functionals[int(index)]
        return self.extend(f, pairing_column=pairing_column)

    def _recompute_powers(self, indices):
        """Normal-equations fallback for drifted cached powers."""
        n = self.n
        if n == 0:
            return
        lower = self._L[:n, :n]
        for k in indices:
            f = self.candidates.functionals[k]
            b = np.array([self.engine.pairing(f, g) for g in self.selected])
            y = solve_triangular(lower, b, lower=True)
            self._p2[k] = self._gdiag[k] - float(y @ y)

    def power2_normal_eq(self, functional):
        """P(lambda)^2 through the selected Gram system (oracle path)."""
        own = self.engine.pairing(functional, functional)
        if self.n == 0:
            return own
        gram = self.engine.gram(self.selected)
        b = np.array([self.engine.pairing(functional, g)
                      for g in self.selected])
        sol = cho_solve(cho_factor(gram.matrix, lower=True), b)
        return own - float(b @ sol)

    # -- interpolant -------------------------------------------------------

    def coefficients(self):
        """Coefficients over the representers g_1..g_n (b = W c)."""
        n = self.n
        return self._W[:n, :n] @ self._c[:n]

    def newton_coefficients(self):
        return self._c[:self.n].copy()

    def norm_sq(self):
        """Squared native norm of the interpolant, sum of c_j^2."""
        c = self._c[:self.n]
        return float(c @ c)

    def evaluate(self, x):
        """Interpolant values at points x (d,) or (..., d)."""
        x = np.asarray(x, dtype=float)
        if self.n == 0:
            out = np.zeros(x.shape[:-1], dtype=float)
            return float(out) if out.ndim == 0 else out
        out = self.engine.combination_eval(self.selected, self.coefficients(), x)
        return float(out) if np.ndim(out) == 0 else out

    def apply(self, functional):
        """lambda(s_n) for an arbitrary supported functional."""
        z = self.basis_values(functional)
        return float(z @ self._c[:self.n])

    def orthonormality_defect(self):
        """max |<v_i, v_j> - delta_ij| over the Newton basis."""
        n = self.n
        if n == 0:
            return 0.0
        gram = self.engine.gram(self.selected).matrix
        w = self._W[:n, :n]
        return float(np.max(np.abs(w.T @ gram @ w - np.eye(n))))

    # -- serialization -------------------------------------------------------

    def save(self, path):
        """Versioned JSON snapshot for reconstruction replay."""
        n = self.n
        doc = {
            "format": MODEL_FORMAT,
            "version": MODEL_VERSION,
            "type": "newton",
            "kernel": self.engine.kernel.to_config(),
            "mode": self.engine.mode,
            "functionals": [list(f.key()) for f in self.selected],
            "newton_coefficients": self._c[:n].tolist(),
            "basis_columns": [self._W[:j + 1, j].tolist() for j in range(n)],
        }
        with open(path, "w") as fh:
            json.dump(doc, fh)

    @classmethod
    def load(cls, path, engine=None):
        with open(path) as fh:
            doc = json.load(fh)
        if doc.get("format") != MODEL_FORMAT:
            raise ValueError("not a model snapshot: %r" % (path,))
        if doc.get("version") != MODEL_VERSION:
            raise ValueError("unsupported snapshot version %r"
                             % (doc.get("version"),))
        if doc.get("type") != "newton":
            raise ValueError("snapshot holds a %r interpolant, not a "
                             "newton model" % (doc.get("type"),))
        if engine is None:
            engine = PairingEngine(Kernel.from_config(doc["kernel"]),
                                   mode=doc.get("mode", "analytic"))
        selected = [_functional_from_key(k) for k in doc["functionals"]]
        n = len(selected)
        model = cls(engine, candidates=None, capacity=max(n, 1))
        model.n = n
        model.selected = selected
        model.selected_indices = [None] * n
        model._c[:n] = np.asarray(doc["newton_coefficients"], dtype=float)
        for j, col in enumerate(doc["basis_columns"]):
            model._W[:j + 1, j] = np.asarray(col, dtype=float)
        for i, f in enumerate(selected):
            model._gdiag_sel[i] = engine.pairing(f, f)
        if n:
            gram = engine.gram(selected).matrix
            model._L[:n, :n] = np.tril(gram @ model._W[:n, :n])
        return model


def _functional_from_key(key):
    kind = key[0]
    if kind == "radon":
        return RadonLine(key[1], key[2])
    if kind == "point":
        return PointEval(tuple(key[1:]))
    raise ValueError("unknown functional kind %r" % (kind,))


def direct_solve(engine, functionals, samples):
    """Coefficients of the interpolant via Cholesky of the full Gram.

    Returns b with s = sum_i b_i g_i. Raises NearDependenceError when
    the Gram matrix is not numerically positive definite.
    """
    functionals = list(functionals)
    samples = np.asarray(samples, dtype=float)
    if samples.shape != (len(functionals),):
        raise ValueError("need one sample per functional")
    gram = engine.gram(functionals)
    try:
        factor = cho_factor(gram.matrix, lower=True)
    except np.linalg.LinAlgError as exc:
        raise NearDependenceError(
            "Gram matrix is not positive definite: %s" % exc) from exc
    return cho_solve(factor, samples)


def fill_distance(engine, selected, candidates, space="dual", metric=None):
    """max over candidates of the min distance to the selected set.

    space "dual" measures between representers in the native space;
    space "parameter" uses the (r, theta) metric and requires line
    functionals throughout.
    """
    selected = list(selected)
    if not selected:
        raise ValueError("fill distance needs a nonempty selected set")
    packed = pack(candidates)
    if space == "dual":
        diag = engine.gram_diagonal(packed)
        best = np.full(packed.n, np.inf)
        for f in selected:
            col = engine.dual_distance_column(f, packed, diag=diag)
            np.minimum(best, col, out=best)
        return float(best.max())
    if space == "parameter":
        from .functionals import ParameterMetric
        metric = metric or ParameterMetric()
        if packed.point_idx.size or any(not isinstance(f, RadonLine)
                                        for f in selected):
            raise TypeError("parameter-space fill distance needs line "
                            "functionals only")
        best = np.full(packed.n, np.inf)
        for f in selected:
            col = metric.distance_arrays(f.r, f.theta,
                                         packed.radii, packed.thetas)
            np.minimum(best, col, out=best)
        return float(best.max())
    raise ValueError("space must be 'dual' or 'parameter'")
