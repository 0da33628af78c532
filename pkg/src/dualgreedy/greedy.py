"""Greedy selection rules over a candidate set of functionals.

Three families of rules:

* BetaRule(beta): pick the admissible candidate maximizing
  |residual|^beta * power^(1-beta).  beta = 0 is the power-greedy rule
  (0^0 := 1), beta = 1 the residual-greedy rule, beta = 1/2 their
  geometric mean, and beta = inf the ratio residual / power.
* GeometricRule: pick the candidate farthest from the selected set,
  measured either between representers ("dual") or in line-parameter
  space ("parameter"); the selected value equals the fill distance of
  the current selection by construction.
* RandomRule: uniform over unselected candidates, seeded.

Candidates whose power does not exceed the breakdown threshold are
excluded before any indicator is formed; candidates that still trip
near-dependence inside the extension are excluded permanently and the
run continues.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from .functionals import ParameterMetric, RadonLine
from .newton import CandidateSet, NearDependenceError, NewtonModel


@dataclass(frozen=True)
class BetaRule:
    beta: float
    weak_gamma: float = 1.0

    def __post_init__(self):
        if math.isnan(self.beta) or self.beta < 0:
            raise ValueError("beta must be nonnegative (inf allowed)")
        if not 0.0 < self.weak_gamma <= 1.0:
            raise ValueError("weak_gamma must lie in (0, 1]")


@dataclass(frozen=True)
class GeometricRule:
    space: str = "dual"
    metric: ParameterMetric = field(default_factory=ParameterMetric)

    def __post_init__(self):
        if self.space not in ("dual", "parameter"):
            raise ValueError("space must be 'dual' or 'parameter'")


@dataclass(frozen=True)
class RandomRule:
    seed: int = 0


def parse_method(name, seed=0):
    """Map a method string to a selection rule.

    Accepted: p, f, psr, fp, h, h:dual, h:param, random, beta:<value>.
    """
    name = name.strip().lower()
    if name == "p":
        return BetaRule(0.0)
    if name == "f":
        return BetaRule(1.0)
    if name == "psr":
        return BetaRule(0.5)
    if name == "fp":
        return BetaRule(math.inf)
    if name in ("h", "h:dual"):
        return GeometricRule("dual")
    if name == "h:param":
        return GeometricRule("parameter")
    if name == "random":
        return RandomRule(seed)
    if name.startswith("beta:"):
        raw = name.split(":", 1)[1]
        value = math.inf if raw in ("inf", "infinity") else float(raw)
        return BetaRule(value)
    raise ValueError("unknown method %r" % (name,))


def beta_indicator(beta, residual_abs, power):
    """|residual|^beta * power^(1-beta), vectorized.

    beta = 0 returns power (the 0^0 := 1 convention applies to zero
    residuals); beta = inf returns residual/power. Callers must ensure
    power > 0 wherever the indicator is consumed.
    """
    residual_abs = np.abs(np.asarray(residual_abs, dtype=float))
    power = np.asarray(power, dtype=float)
    if beta == 0:
        return power + np.zeros_like(residual_abs)
    if math.isinf(beta):
        return residual_abs / power
    if beta == 1:
        return residual_abs + np.zeros_like(power)
    return residual_abs ** beta * power ** (1.0 - beta)


def _admissible(model, excluded):
    mask = ~model.selected_mask
    if excluded is not None:
        mask &= ~excluded
    return mask


def select_next(rule, model, excluded=None, min_dists=None, rng=None):
    """Index of the next candidate under the rule, or None at exhaustion.

    min_dists (geometric rules) carries each candidate's distance to the
    current selected set; without it the distances are recomputed from
    scratch. Ties resolve to the lowest index.
    """
    if model.candidates is None:
        raise ValueError("selection needs a model with a candidate set")
    if isinstance(rule, BetaRule):
        tau2 = model.tau_power ** 2
        mask = _admissible(model, excluded) & (model._p2 > tau2)
        if not mask.any():
            return None
        # power enters with negative exponents for beta > 1, so keep
        # the masked-out entries away from zero
        power = np.sqrt(np.where(mask, np.clip(model._p2, 0.0, None), 1.0))
        eta = beta_indicator(rule.beta, np.abs(model._res), power)
        eta = np.where(mask, eta, -np.inf)
        if rule.weak_gamma < 1.0:
            threshold = rule.weak_gamma * eta.max()
            return int(np.argmax(eta >= threshold))
        return int(np.argmax(eta))
    if isinstance(rule, GeometricRule):
        mask = _admissible(model, excluded)
        if not mask.any():
            return None
        if min_dists is None:
            min_dists = _distances_to_selected(rule, model)
        d = np.where(mask, min_dists, -np.inf)
        return int(np.argmax(d))
    if isinstance(rule, RandomRule):
        mask = _admissible(model, excluded)
        pool = np.flatnonzero(mask)
        if pool.size == 0:
            return None
        if rng is None:
            rng = np.random.default_rng(rule.seed)
        return int(pool[rng.integers(pool.size)])
    raise TypeError("unknown selection rule %r" % (rule,))


def _distances_to_selected(rule, model):
    packed = model.candidates.packed
    best = np.full(len(model.candidates), np.inf)
    if rule.space == "dual":
        for f in model.selected:
            col = model.engine.dual_distance_column(f, packed,
                                                    diag=model._gdiag)
            np.minimum(best, col, out=best)
    else:
        _require_lines(model)
        for f in model.selected:
            col = rule.metric.distance_arrays(f.r, f.theta,
                                              packed.radii, packed.thetas)
            np.minimum(best, col, out=best)
    return best


def _require_lines(model):
    if model.candidates.packed.point_idx.size:
        raise TypeError("parameter-space selection needs line functionals")


@dataclass
class GreedyTrace:
    """Per-iteration selection diagnostics.

    Columns: iter, index, indicator, power, residual, fill_dual,
    fill_param, norm_sq, ms. exclusions lists (iteration, candidate)
    pairs dropped for near dependence.
    """

    iters: list = field(default_factory=list)
    indices: list = field(default_factory=list)
    indicators: list = field(default_factory=list)
    powers: list = field(default_factory=list)
    residuals: list = field(default_factory=list)
    fill_dual: list = field(default_factory=list)
    fill_param: list = field(default_factory=list)
    norm_sq: list = field(default_factory=list)
    ms: list = field(default_factory=list)
    exclusions: list = field(default_factory=list)

    def __len__(self):
        return len(self.iters)

    def to_csv(self, path, timing=True):
        """Write the trace; timing=False drops the wall-time column so
        the file is reproducible bit for bit."""
        cols = ["iter", "index", "indicator", "power", "residual",
                "fill_dual", "fill_param", "norm_sq"]
        if timing:
            cols.append("ms")
        with open(path, "w", newline="") as fh:
            fh.write(",".join(cols) + "\n")
            for i in range(len(self.iters)):
                row = [str(self.iters[i]), str(self.indices[i]),
                       _fmt(self.indicators[i]), _fmt(self.powers[i]),
                       _fmt(self.residuals[i]), _fmt(self.fill_dual[i]),
                       _fmt(self.fill_param[i]), _fmt(self.norm_sq[i])]
                if timing:
                    row.append(_fmt(self.ms[i]))
                fh.write(",".join(row) + "\n")


def _fmt(value):
    if value is None or (isinstance(value, float) and math.isnan(value)):
        return ""
    return repr(float(value))


def run_greedy(rule, engine, candidates, max_iters, residual_tol=0.0,
               fill_tol=0.0, tau_power=None):
    """Run greedy selection; returns (NewtonModel, GreedyTrace).

    Stops at max_iters, at exhaustion (no admissible candidate), when
    the max |residual| over the candidates falls to residual_tol, or
    when the dual fill distance falls to fill_tol (tolerances <= 0
    disable the corresponding stop).
    """
    if isinstance(candidates, CandidateSet):
        cands = candidates
    else:
        raise TypeError("run_greedy needs a CandidateSet")
    max_iters = int(max_iters)
    if max_iters < 1:
        raise ValueError("max_iters must be positive")
    model = NewtonModel(engine, cands, capacity=min(max_iters, len(cands)),
                        tau_power=tau_power)
    n_cand = len(cands)
    excluded = np.zeros(n_cand, dtype=bool)
    min_dual = np.full(n_cand, np.inf)
    all_lines = cands.packed.point_idx.size == 0
    min_param = np.full(n_cand, np.inf) if all_lines else None
    metric = rule.metric if isinstance(rule, GeometricRule) \
        and rule.space == "parameter" else ParameterMetric()
    rng = np.random.default_rng(rule.seed) if isinstance(rule, RandomRule) \
        else None
    trace = GreedyTrace()
    packed = cands.packed
    while model.n < max_iters:
        start = time.perf_counter()
        if isinstance(rule, GeometricRule) and rule.space == "parameter":
            dists = min_param
        else:
            dists = min_dual
        k = select_next(rule, model, excluded=excluded, min_dists=dists,
                        rng=rng)
        if k is None:
            break
        if isinstance(rule, BetaRule):
            indicator = float(beta_indicator(
                rule.beta, abs(float(model._res[k])),
                math.sqrt(max(0.0, float(model._p2[k])))))
        elif isinstance(rule, GeometricRule):
            indicator = float(dists[k])
        else:
            indicator = 0.0
        power_sel = math.sqrt(max(0.0, float(model._p2[k])))
        res_sel = float(model._res[k])
        f_new = cands.functionals[k]
        column = engine.pairing_column(f_new, packed)
        try:
            model.extend_candidate(k, pairing_column=column)
        except NearDependenceError:
            excluded[k] = True
            trace.exclusions.append((model.n, k))
            continue
        own = float(model._gdiag[k])
        dual_col = np.sqrt(np.clip(model._gdiag - 2.0 * column + own,
                                   0.0, None))
        np.minimum(min_dual, dual_col, out=min_dual)
        if min_param is not None:
            param_col = metric.distance_arrays(f_new.r, f_new.theta,
                                               packed.radii, packed.thetas)
            np.minimum(min_param, param_col, out=min_param)
        fill_d = float(min_dual.max())
        fill_p = float(min_param.max()) if min_param is not None else math.nan
        elapsed_ms = (time.perf_counter() - start) * 1000.0
        trace.iters.append(model.n)
        trace.indices.append(k)
        trace.indicators.append(indicator)
        trace.powers.append(power_sel)
        trace.residuals.append(res_sel)
        trace.fill_dual.append(fill_d)
        trace.fill_param.append(fill_p)
        trace.norm_sq.append(model.norm_sq())
        trace.ms.append(elapsed_ms)
        if residual_tol > 0.0 and float(np.max(np.abs(model._res))) <= residual_tol:
            break
        if fill_tol > 0.0 and fill_d <= fill_tol:
            break
    return model, trace
