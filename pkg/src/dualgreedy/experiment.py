"""Tomography experiment driver: sample, select, reconstruct, report.

A run draws N random line functionals of a phantom, runs each requested
selection method for M iterations, and reports two errors per method:

* MSI, the mean squared residual over all N candidate functionals;
* MSR, the mean squared reconstruction error against the phantom on a
  grid x grid array of cell centers of [-1, 1]^2;

plus the spectral condition number of the selected Gram matrix.  The
"direct" mode skips selection and interpolates all N samples at once
(capped, since it solves a dense N x N system); its MSI is zero by
construction and flagged as such.

All artifacts (trace CSVs, reconstruction images, model snapshots,
JSON summaries) are deterministic for a fixed config; wall-clock
timings only appear in the JSON summaries unless `timing` is set.
"""

from __future__ import annotations

import json
import math
import os
import time
from dataclasses import asdict, dataclass, field, replace

import numpy as np

from .greedy import parse_method, run_greedy
from .kernels import Kernel
from .newton import CandidateSet, MODEL_FORMAT, MODEL_VERSION, \
    NearDependenceError, NewtonModel, direct_solve
from .pairings import PairingEngine, condition_number
from .phantom import cell_centers, sample_functionals, shepp_logan
from .quadrature import AccuracyError

KNOWN_METHODS_HINT = "p, h, f, fp, psr, beta:<value>, random, direct"


@dataclass(frozen=True)
class ExperimentConfig:
    """Flat experiment configuration (JSON-serializable)."""

    family: str = "gaussian"
    alpha: float = 2000.0
    weight_beta: float = 1.5
    dimension: int = 2
    modified_phantom: bool = False
    n: int = 2000
    m: int = 300
    grid: int = 64
    seed: int = 42
    methods: tuple = ("p", "h", "f", "fp", "psr", "random")
    out: str = "results"
    residual_tol: float = 0.0
    fill_tol: float = 0.0
    tau_power: float | None = None
    positive_radii_only: bool = False
    direct_cap: int = 3000
    png: bool = False
    timing: bool = False
    parallel_methods: bool = False

    def __post_init__(self):
        object.__setattr__(self, "methods", tuple(self.methods))
        if not self.methods:
            raise ValueError("method list must be nonempty")
        if self.m > self.n:
            raise ValueError("m must not exceed n")
        if self.n < 1 or self.m < 1:
            raise ValueError("n and m must be positive")
        if self.grid < 8:
            raise ValueError("grid must be at least 8")
        for name in self.methods:
            if name != "direct":
                parse_method(name, seed=self.seed)
        if "direct" in self.methods and self.n > self.direct_cap:
            raise ValueError("direct mode capped at n <= %d" % self.direct_cap)

    def kernel(self):
        cfg = {"family": self.family, "alpha": self.alpha,
               "dimension": self.dimension}
        if self.weight_beta is not None:
            cfg["weight_beta"] = self.weight_beta
        return Kernel.from_config(cfg)

    def to_dict(self):
        doc = asdict(self)
        doc["methods"] = list(self.methods)
        return doc

    @classmethod
    def from_dict(cls, doc):
        known = set(cls.__dataclass_fields__)
        unknown = set(doc) - known
        if unknown:
            raise ValueError("unknown config keys: %s"
                             % ", ".join(sorted(unknown)))
        return cls(**doc)

    @classmethod
    def from_file(cls, path):
        with open(path) as fh:
            doc = json.load(fh)
        if not isinstance(doc, dict):
            raise ValueError("config file must hold a flat JSON object")
        return cls.from_dict(doc)


@dataclass
class ResultRow:
    method: str
    msr: float
    msi: float
    cond2: float
    n_selected: int
    runtime_s: float
    msi_by_construction: bool = False
    exclusions: int = 0


@dataclass
class ResultsTable:
    rows: dict = field(default_factory=dict)
    failed: dict = field(default_factory=dict)

    def add(self, row):
        self.rows[row.method] = row

    def to_csv(self, path):
        cols = ["method", "msr", "msi", "cond2", "n_selected",
                "msi_by_construction", "exclusions"]
        with open(path, "w", newline="") as fh:
            fh.write(",".join(cols) + "\n")
            for name in sorted(self.rows):
                r = self.rows[name]
                fh.write(",".join([
                    r.method, repr(r.msr), repr(r.msi), repr(r.cond2),
                    str(r.n_selected), str(int(r.msi_by_construction)),
                    str(r.exclusions)]) + "\n")


def compute_msi(model, candidates=None):
    """Mean squared residual over the candidate functionals."""
    if candidates is None:
        return float(np.mean(model.residuals() ** 2))
    res = np.array([model.residual(f, s)
                    for f, s in zip(candidates.functionals,
                                    candidates.samples)])
    return float(np.mean(res ** 2))


def reconstruction_grid(grid):
    centers = cell_centers(grid)
    xs, ys = np.meshgrid(centers, centers[::-1])
    return np.stack([xs, ys], axis=-1)


def compute_msr(evaluate, phantom, grid):
    """Mean squared reconstruction error on cell centers of [-1, 1]^2.

    evaluate: a NewtonModel or any callable mapping points (..., 2) to
    values.
    """
    pts = reconstruction_grid(grid)
    truth = phantom.eval(pts)
    if isinstance(evaluate, NewtonModel):
        approx = evaluate.evaluate(pts)
    else:
        approx = evaluate(pts)
    return float(np.mean((np.asarray(approx) - truth) ** 2))


def write_pgm(image, path, vmin=None, vmax=None):
    """8-bit binary PGM with [vmin, vmax] mapped onto 0..255."""
    img = np.asarray(image, dtype=float)
    if img.ndim != 2:
        raise ValueError("image must be 2-D")
    lo = float(img.min()) if vmin is None else float(vmin)
    hi = float(img.max()) if vmax is None else float(vmax)
    if hi <= lo:
        hi = lo + 1.0
    scaled = np.clip((img - lo) / (hi - lo), 0.0, 1.0)
    data = np.round(scaled * 255.0).astype(np.uint8)
    with open(path, "wb") as fh:
        fh.write(b"P5\n%d %d\n255\n" % (img.shape[1], img.shape[0]))
        fh.write(data.tobytes())


def write_png(image, path, vmin=None, vmax=None):
    """PNG companion to write_pgm; needs matplotlib."""
    try:
        import matplotlib
    except ImportError as exc:
        raise RuntimeError("png output needs matplotlib") from exc
    matplotlib.use("Agg", force=False)
    import matplotlib.image as mpimg
    img = np.asarray(image, dtype=float)
    lo = float(img.min()) if vmin is None else float(vmin)
    hi = float(img.max()) if vmax is None else float(vmax)
    if hi <= lo:
        hi = lo + 1.0
    mpimg.imsave(path, np.clip((img - lo) / (hi - lo), 0.0, 1.0),
                 cmap="gray", vmin=0.0, vmax=1.0)


def _save_direct_model(path, kernel, functionals, coefficients):
    doc = {
        "format": MODEL_FORMAT,
        "version": MODEL_VERSION,
        "type": "direct",
        "kernel": kernel.to_config(),
        "mode": "analytic",
        "functionals": [list(f.key()) for f in functionals],
        "coefficients": np.asarray(coefficients, dtype=float).tolist(),
    }
    with open(path, "w") as fh:
        json.dump(doc, fh)


def _run_one_method(name, config, engine, candidates, phantom, outdir):
    start = time.perf_counter()
    mdir = os.path.join(outdir, name.replace(":", "_"))
    os.makedirs(mdir, exist_ok=True)
    grid_pts = reconstruction_grid(config.grid)
    if name == "direct":
        coeffs = direct_solve(engine, candidates.functionals,
                              candidates.samples)
        image = engine.combination_eval(candidates.functionals, coeffs,
                                        grid_pts)
        gram = engine.gram(candidates.packed)
        cond2 = condition_number(gram.matrix)
        msr = float(np.mean((image - phantom.eval(grid_pts)) ** 2))
        _save_direct_model(os.path.join(mdir, "model.json"), engine.kernel,
                           candidates.functionals, coeffs)
        row = ResultRow(method=name, msr=msr, msi=0.0, cond2=cond2,
                        n_selected=len(candidates),
                        runtime_s=time.perf_counter() - start,
                        msi_by_construction=True)
    else:
        rule = parse_method(name, seed=config.seed)
        model, trace = run_greedy(rule, engine, candidates, config.m,
                                  residual_tol=config.residual_tol,
                                  fill_tol=config.fill_tol,
                                  tau_power=config.tau_power)
        trace.to_csv(os.path.join(mdir, "trace.csv"), timing=config.timing)
        model.save(os.path.join(mdir, "model.json"))
        image = model.evaluate(grid_pts)
        msr = float(np.mean((image - phantom.eval(grid_pts)) ** 2))
        msi = compute_msi(model)
        gram = engine.gram(model.selected)
        cond2 = condition_number(gram.matrix)
        row = ResultRow(method=name, msr=msr, msi=msi, cond2=cond2,
                        n_selected=model.n,
                        runtime_s=time.perf_counter() - start,
                        exclusions=len(trace.exclusions))
    write_pgm(image, os.path.join(mdir, "reconstruction.pgm"))
    if config.png:
        write_png(image, os.path.join(mdir, "reconstruction.png"))
    summary = {
        "method": name,
        "msr": row.msr,
        "msi": row.msi,
        "msi_by_construction": row.msi_by_construction,
        "cond2": None if math.isinf(row.cond2) else row.cond2,
        "cond2_sentinel": math.isinf(row.cond2),
        "n_selected": row.n_selected,
        "exclusions": row.exclusions,
        "runtime_s": row.runtime_s,
    }
    with open(os.path.join(mdir, "summary.json"), "w") as fh:
        json.dump(summary, fh, indent=2)
    return row


def _run_or_record(name, config, engine, candidates, phantom, outdir):
    """One method's row, or an error string recorded in its summary.

    A numerically failing method must not take the other methods down
    with it; the failure lands in the method's summary.json instead.
    """
    try:
        return _run_one_method(name, config, engine, candidates, phantom,
                               outdir)
    except (NearDependenceError, AccuracyError,
            np.linalg.LinAlgError) as exc:
        message = "%s: %s" % (type(exc).__name__, exc)
        mdir = os.path.join(outdir, name.replace(":", "_"))
        os.makedirs(mdir, exist_ok=True)
        with open(os.path.join(mdir, "summary.json"), "w") as fh:
            json.dump({"method": name, "error": message}, fh, indent=2)
        return message


def run_experiment(config: ExperimentConfig):
    """Run every configured method; writes artifacts, returns the table."""
    outdir = config.out
    os.makedirs(outdir, exist_ok=True)
    with open(os.path.join(outdir, "config.json"), "w") as fh:
        json.dump(config.to_dict(), fh, indent=2)
    phantom = shepp_logan(config.modified_phantom)
    samples = sample_functionals(config.n, config.seed, phantom,
                                 config.positive_radii_only)
    samples.to_csv(os.path.join(outdir, "samples.csv"))
    candidates = samples.to_candidate_set()
    engine = PairingEngine(config.kernel())
    table = ResultsTable()
    if config.parallel_methods and len(config.methods) > 1:
        from concurrent.futures import ThreadPoolExecutor
        with ThreadPoolExecutor(max_workers=len(config.methods)) as pool:
            futures = {
                name: pool.submit(_run_or_record, name, config,
                                  PairingEngine(config.kernel()),
                                  candidates, phantom, outdir)
                for name in config.methods}
            outcomes = {name: futures[name].result()
                        for name in config.methods}
    else:
        outcomes = {name: _run_or_record(name, config, engine, candidates,
                                         phantom, outdir)
                    for name in config.methods}
    for name, outcome in outcomes.items():
        if isinstance(outcome, ResultRow):
            table.add(outcome)
        else:
            table.failed[name] = outcome
    table.to_csv(os.path.join(outdir, "table.csv"))
    return table
