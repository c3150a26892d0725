"""Empirical verification of the bound constants on test functions.

A trial builds a certified sample set inside a test function's domain, fits
a model, computes the theoretical bound constants from the measured
poisedness constant, probes the ball for the worst empirical errors, and
reports margins (empirical / theoretical).  Campaigns sweep trial configs
and emit a fixed-column CSV plus a JSON summary, byte-identical across runs
for the same config.
"""

from __future__ import annotations

import csv
import itertools
import json
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path
from typing import Callable, Optional

import numpy as np
from scipy.stats import qmc

from .ball import max_abs_on_ball
from .bounds import BoundInputs, BoundKind, c_delta_max, error_bounds
from .geometry import (
    MatrixKind,
    PoisednessKind,
    SampleSet,
    design_matrix,
    generate_poised_set,
    lambda_poisedness,
    normalized_points,
    _lagrange_for_kind,
)
from .models import FitResult, ModelKind, RelaxationSpec, fit_model, fit_relaxed
from .poly import (
    BasisPart,
    BasisSelector,
    QuadraticPolynomial,
    basis_matrix,
    space_dim,
)

__all__ = [
    "TestFunction",
    "quadratic_function",
    "quartic_function",
    "rosenbrock_function",
    "builtin_functions",
    "resolve_function",
    "InequalityCheck",
    "basis_floor_checks",
    "check_theory",
    "TrialConfig",
    "TrialResult",
    "run_trial",
    "expand_config",
    "CampaignReport",
    "run_campaign",
    "CSV_COLUMNS",
]


@dataclass(frozen=True)
class TestFunction:
    """Vectorized objective with a certified gradient Lipschitz constant.

    ``f`` maps (N, n) point blocks to (N,) values, ``grad`` to (N, n)
    gradients.  ``lipschitz_L`` bounds the gradient's Lipschitz constant on
    ``domain_box`` (rows of per-coordinate lower/upper limits).  For exactly
    quadratic objectives ``quadratic`` holds the polynomial itself, which
    lets trials locate the worst value error exactly.
    """

    name: str
    dim: int
    f: Callable[[np.ndarray], np.ndarray]
    grad: Callable[[np.ndarray], np.ndarray]
    lipschitz_L: float
    domain_box: np.ndarray
    quadratic: Optional[QuadraticPolynomial] = None


def quadratic_function(A, b, box_halfwidth: float = 10.0) -> TestFunction:
    """x -> x^T A x / 2 + b . x with the exact constant L = ||A||."""
    A = np.asarray(A, dtype=float)
    b = np.asarray(b, dtype=float).ravel()
    n = b.size
    poly = QuadraticPolynomial(n, 0.0, b, A)
    box = np.column_stack([np.full(n, -box_halfwidth), np.full(n, box_halfwidth)])
    return TestFunction(
        name="quadratic",
        dim=n,
        f=poly.eval_batch,
        grad=poly.grad_batch,
        lipschitz_L=float(np.linalg.norm(poly.hessian, 2)),
        domain_box=box,
        quadratic=poly,
    )


def quartic_function(n: int) -> TestFunction:
    """sum_i x_i^4 on [-1, 1]^n; the Hessian norm there is at most 12."""
    box = np.column_stack([np.full(n, -1.0), np.full(n, 1.0)])
    return TestFunction(
        name="quartic",
        dim=n,
        f=lambda X: np.sum(np.asarray(X, float) ** 4, axis=1),
        grad=lambda X: 4.0 * np.asarray(X, float) ** 3,
        lipschitz_L=12.0,
        domain_box=box,
    )


@lru_cache(maxsize=4)
def _rosenbrock_lipschitz(resolution: float = 1e-3) -> float:
    # Largest Hessian spectral norm over a lattice of [-2, 2]^2; the 2x2
    # eigenvalues are evaluated in closed form, chunked to bound memory.
    count = int(round(4.0 / resolution)) + 1
    axis = np.linspace(-2.0, 2.0, count)
    best = 0.0
    for chunk in np.array_split(axis, 64):
        X1, X2 = np.meshgrid(chunk, axis, indexing="ij")
        a = 1200.0 * X1**2 - 400.0 * X2 + 2.0
        bb = -400.0 * X1
        d = 200.0
        mean = 0.5 * (a + d)
        rad = np.sqrt(0.25 * (a - d) ** 2 + bb**2)
        spec = np.maximum(np.abs(mean + rad), np.abs(mean - rad))
        best = max(best, float(spec.max()))
    return best


def rosenbrock_function(n: int = 2) -> TestFunction:
    """The two-dimensional Rosenbrock function on [-2, 2]^2.

    The Lipschitz constant comes from a dense lattice scan of the Hessian
    norm over the box.
    """
    if n != 2:
        raise ValueError(f"rosenbrock is only defined for n = 2, got n = {n}")

    def f(X):
        X = np.asarray(X, float)
        return 100.0 * (X[:, 1] - X[:, 0] ** 2) ** 2 + (1.0 - X[:, 0]) ** 2

    def grad(X):
        X = np.asarray(X, float)
        g1 = -400.0 * X[:, 0] * (X[:, 1] - X[:, 0] ** 2) - 2.0 * (1.0 - X[:, 0])
        g2 = 200.0 * (X[:, 1] - X[:, 0] ** 2)
        return np.column_stack([g1, g2])

    box = np.array([[-2.0, 2.0], [-2.0, 2.0]])
    return TestFunction(
        name="rosenbrock",
        dim=2,
        f=f,
        grad=grad,
        lipschitz_L=_rosenbrock_lipschitz(),
        domain_box=box,
    )


def _seeded_quadratic(n: int) -> TestFunction:
    rng = np.random.default_rng(1000 + n)
    B = rng.standard_normal((n, n))
    A = 0.5 * (B + B.T)
    b = rng.standard_normal(n)
    return quadratic_function(A, b)


def builtin_functions() -> dict:
    """Registry of named test-function factories, each taking n."""
    return {
        "quadratic": _seeded_quadratic,
        "quartic": quartic_function,
        "rosenbrock": rosenbrock_function,
    }


def resolve_function(name: str, n: int) -> TestFunction:
    registry = builtin_functions()
    if name not in registry:
        raise ValueError(
            f"unknown test function {name!r}; known: {sorted(registry)}"
        )
    return registry[name](n)


@dataclass(frozen=True)
class InequalityCheck:
    """One certified inequality: lhs relation rhs, with a small tolerance."""

    name: str
    lhs: float
    rhs: float
    relation: str
    passed: bool


def _le(name: str, lhs: float, rhs: float, tol: float = 1e-9) -> InequalityCheck:
    return InequalityCheck(name, float(lhs), float(rhs), "<=", bool(lhs <= rhs + tol))


def _ge(name: str, lhs: float, rhs: float, tol: float = 1e-9) -> InequalityCheck:
    return InequalityCheck(name, float(lhs), float(rhs), ">=", bool(lhs >= rhs - tol))


def basis_floor_checks(n: int, count: int = 200, seed: int = 0):
    """Sampled floors on how small a unit-coefficient polynomial can stay.

    Over the unit ball, a degree-2 natural-basis polynomial with sup-norm-1
    coefficients reaches at least 1/4 in absolute value; a degree-1 one
    reaches at least 1; a degree-1 one with unit Euclidean coefficient norm
    reaches at least 1/sqrt(n+1).
    """
    rng = np.random.default_rng(seed)
    dim_quad = space_dim(2, n)
    worst_quad = np.inf
    worst_lin = np.inf
    worst_unit = np.inf
    origin = np.zeros(n)
    for _ in range(count):
        u = rng.uniform(-1.0, 1.0, size=dim_quad)
        scale = np.max(np.abs(u))
        if scale == 0.0:
            continue
        v = u / scale
        poly = QuadraticPolynomial.from_coeffs(v, n)
        worst_quad = min(worst_quad, max_abs_on_ball(poly, origin, 1.0)[0])

        u = rng.uniform(-1.0, 1.0, size=n + 1)
        scale = np.max(np.abs(u))
        if scale == 0.0:
            continue
        v = u / scale
        poly = QuadraticPolynomial(n, float(v[0]), v[1:].copy(), np.zeros((n, n)))
        worst_lin = min(worst_lin, max_abs_on_ball(poly, origin, 1.0)[0])

        u = rng.standard_normal(n + 1)
        v = u / np.linalg.norm(u)
        poly = QuadraticPolynomial(n, float(v[0]), v[1:].copy(), np.zeros((n, n)))
        worst_unit = min(worst_unit, max_abs_on_ball(poly, origin, 1.0)[0])
    return [
        _ge("quadratic_basis_floor", worst_quad, 0.25),
        _ge("linear_basis_floor", worst_lin, 1.0),
        _ge("unit_coeff_floor", worst_unit, 1.0 / np.sqrt(n + 1.0)),
    ]


def check_theory(
    sample_set: SampleSet,
    kind: PoisednessKind,
    delta_max: Optional[float] = None,
    floor_samples: int = 200,
    seed: int = 0,
):
    """All certified inequalities for a sample set, as a list of checks.

    Raises NotPoisedError for degenerate sets (no inequalities are emitted
    in that case).
    """
    cert = lambda_poisedness(sample_set, kind)
    n, p = sample_set.n, sample_set.p
    q = space_dim(2, n) - 1
    delta = sample_set.radius
    checks = []

    if kind is PoisednessKind.LINEAR:
        checks.append(_le("linear_inverse_norm", cert.matrix_norm, cert.norm_bound))
    elif kind is PoisednessKind.QUADRATIC:
        checks.append(_le("quadratic_inverse_norm", cert.matrix_norm, cert.norm_bound))
    else:
        checks.append(_le("pseudoinverse_norm", cert.matrix_norm, cert.norm_bound))
        dm = delta if delta_max is None else float(delta_max)
        c = c_delta_max(dm)
        cap = 4.0 * cert.lam * np.sqrt(2.0 * (q + 1.0)) / (delta * delta * c * c)
        for j, l in enumerate(_lagrange_for_kind(sample_set, kind)):
            checks.append(
                _le(
                    f"lagrange_hessian_norm_{j}",
                    float(np.linalg.norm(l.hessian, 2)),
                    cap,
                    tol=1e-9 * max(1.0, cap),
                )
            )
        # The absolute affine interpolation matrix of the shifted/scaled set
        # factors through the scaled displacement matrix.
        Ml_hat = basis_matrix(
            BasisSelector(2, BasisPart.LINEAR_PART), normalized_points(sample_set)
        )
        Ls_hat = design_matrix(MatrixKind.UNDER_SCALED, sample_set)
        expected = np.zeros_like(Ml_hat)
        expected[0, 0] = 1.0
        expected[1:, 0] = 1.0
        expected[1:, 1:] = Ls_hat
        diff = float(np.max(np.abs(Ml_hat - expected)))
        checks.append(_le("shifted_factorization", diff, 1e-12, tol=0.0))

    checks.extend(basis_floor_checks(n, count=floor_samples, seed=seed))
    return checks


@dataclass(frozen=True)
class TrialConfig:
    """One verification trial.

    The ball center is sampled per-seed from the middle half of the
    function's domain box, so the same seed reuses the same geometry across
    a delta sweep.
    """

    function: str
    kind: ModelKind
    n: int
    p: int
    delta: float
    delta_max: Optional[float] = None
    kappa: float = 0.0
    lambda_max: float = 100.0
    seed: int = 0
    sample_count: int = 1000

    def __post_init__(self) -> None:
        if isinstance(self.kind, str):
            try:
                object.__setattr__(self, "kind", ModelKind[self.kind.upper()])
            except KeyError:
                raise ValueError(f"unknown model kind {self.kind!r}") from None
        if self.kappa < 0.0:
            raise ValueError(f"kappa must be nonnegative, got {self.kappa}")
        if self.sample_count < 1:
            raise ValueError("sample_count must be positive")


@dataclass(frozen=True)
class TrialResult:
    lam: float
    C_f: float
    C_g: float
    C_H: float
    emp_f: float
    emp_g: float
    emp_H: float
    margin_f: float
    margin_g: float
    margin_H: float
    passed: bool


def _trial_center(fn: TestFunction, delta: float, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    lo = fn.domain_box[:, 0]
    hi = fn.domain_box[:, 1]
    mid = 0.5 * (lo + hi)
    half = 0.5 * (hi - lo)
    center = mid + rng.uniform(-0.5, 0.5, size=fn.dim) * half
    if np.any(center - delta < lo - 1e-12) or np.any(center + delta > hi + 1e-12):
        raise ValueError(
            f"ball of radius {delta} around the sampled center does not fit "
            f"inside the domain box of {fn.name}"
        )
    return center


def _probe_points(
    center: np.ndarray, delta: float, count: int, extra: np.ndarray
) -> np.ndarray:
    n = center.size
    # Low-discrepancy cube points pushed radially onto the ball; boundary
    # coverage matters because the worst errors tend to sit there.
    u = qmc.Halton(d=n, scramble=False).random(count)
    z = 2.0 * u - 1.0
    norms = np.linalg.norm(z, axis=1)
    outside = norms > 1.0
    z[outside] /= norms[outside][:, None]
    blocks = [center + delta * z, center[None, :]]
    axes = delta * np.eye(n)
    blocks.append(center + axes)
    blocks.append(center - axes)
    if n <= 6:
        corners = np.array(list(itertools.product((-1.0, 1.0), repeat=n)))
        blocks.append(center + delta * corners / np.sqrt(n))
    blocks.append(extra)
    return np.vstack(blocks)


def _margin(emp: float, cap: float) -> float:
    if cap > 0.0:
        return emp / cap
    return 0.0 if emp <= 1e-12 else np.inf


_KIND_TO_POISED = {
    ModelKind.LIN_DET: PoisednessKind.LINEAR,
    ModelKind.QUAD_DET: PoisednessKind.QUADRATIC,
    ModelKind.MFN: PoisednessKind.MFN,
}


def run_trial(config: TrialConfig) -> TrialResult:
    """Run one verification trial; margins <= 1 mean the theory held."""
    fn = resolve_function(config.function, config.n)
    delta = float(config.delta)
    delta_max = delta if config.delta_max is None else float(config.delta_max)
    center = _trial_center(fn, delta, config.seed)
    sample_set = generate_poised_set(
        config.n,
        config.p,
        delta,
        config.lambda_max,
        seed=config.seed,
        center=center,
    )
    cert = lambda_poisedness(sample_set, _KIND_TO_POISED[config.kind])
    values = fn.f(sample_set.points)
    if config.kappa > 0.0:
        fit: FitResult = fit_relaxed(
            config.kind,
            sample_set,
            values,
            RelaxationSpec(kappa=config.kappa, noise_seed=config.seed),
        )
    else:
        fit = fit_model(config.kind, sample_set, values)
    model = fit.model

    q = space_dim(2, config.n) - 1
    inputs = BoundInputs(
        L=fn.lipschitz_L,
        kappa=config.kappa,
        lam=cert.lam,
        n=config.n,
        p=config.p,
        q=q,
        delta=delta,
        delta_max=delta_max,
    )
    report = error_bounds(BoundKind[config.kind.name], inputs)

    X = _probe_points(center, delta, config.sample_count, sample_set.points)
    if fn.quadratic is not None:
        # The error of a quadratic objective is itself quadratic, so its
        # worst point on the ball is found exactly.
        _, arg = max_abs_on_ball(fn.quadratic - model, center, delta)
        X = np.vstack([X, arg[None, :]])

    f_err = np.abs(fn.f(X) - model.eval_batch(X))
    g_err = np.linalg.norm(fn.grad(X) - model.grad_batch(X), axis=1)
    emp_f = float(np.max(f_err)) / (delta * delta)
    emp_g = float(np.max(g_err)) / delta
    emp_H = float(np.linalg.norm(model.hessian, 2))

    margin_f = _margin(emp_f, report.C_f)
    margin_g = _margin(emp_g, report.C_g)
    margin_H = _margin(emp_H, report.C_H)
    passed = bool(max(margin_f, margin_g, margin_H) <= 1.0 + 1e-8)
    return TrialResult(
        lam=cert.lam,
        C_f=report.C_f,
        C_g=report.C_g,
        C_H=report.C_H,
        emp_f=emp_f,
        emp_g=emp_g,
        emp_H=emp_H,
        margin_f=margin_f,
        margin_g=margin_g,
        margin_H=margin_H,
        passed=passed,
    )


CSV_COLUMNS = [
    "trial_id",
    "function",
    "kind",
    "n",
    "p",
    "delta",
    "delta_max",
    "kappa",
    "seed",
    "lambda",
    "C_f",
    "C_g",
    "C_H",
    "emp_f",
    "emp_g",
    "emp_H",
    "margin_f",
    "margin_g",
    "margin_H",
    "pass",
]

_CONFIG_FIELDS = [
    "function",
    "kind",
    "n",
    "p",
    "delta",
    "delta_max",
    "kappa",
    "lambda_max",
    "seed",
    "sample_count",
]


def expand_config(config: dict):
    """Expand a flat config mapping into trial configs.

    Keys mirror TrialConfig fields; a list value sweeps that field and the
    expansion is the cross product, ordered by field declaration order.
    """
    unknown = sorted(set(config) - set(_CONFIG_FIELDS))
    if unknown:
        raise ValueError(f"unknown config keys: {', '.join(unknown)}")
    axes = []
    for name in _CONFIG_FIELDS:
        if name in config:
            value = config[name]
            options = list(value) if isinstance(value, (list, tuple)) else [value]
            if not options:
                raise ValueError(f"config key {name!r} has no options")
            axes.append((name, options))
    trials = []
    for combo in itertools.product(*(options for _, options in axes)):
        kwargs = {name: value for (name, _), value in zip(axes, combo)}
        trials.append(TrialConfig(**kwargs))
    return trials


@dataclass
class CampaignReport:
    """Per-trial rows (CSV-ready), aggregate summary, and failures."""

    rows: list = field(default_factory=list)
    summary: dict = field(default_factory=dict)
    failures: list = field(default_factory=list)


def _config_columns(trial_id: int, config: TrialConfig) -> dict:
    return {
        "trial_id": trial_id,
        "function": config.function,
        "kind": config.kind.name,
        "n": config.n,
        "p": config.p,
        "delta": float(config.delta),
        "delta_max": float(config.delta) if config.delta_max is None else float(config.delta_max),
        "kappa": float(config.kappa),
        "seed": config.seed,
    }


def _result_columns(result: Optional[TrialResult]) -> dict:
    if result is None:
        return {
            "lambda": "",
            "C_f": "",
            "C_g": "",
            "C_H": "",
            "emp_f": "",
            "emp_g": "",
            "emp_H": "",
            "margin_f": "",
            "margin_g": "",
            "margin_H": "",
            "pass": False,
        }
    return {
        "lambda": result.lam,
        "C_f": result.C_f,
        "C_g": result.C_g,
        "C_H": result.C_H,
        "emp_f": result.emp_f,
        "emp_g": result.emp_g,
        "emp_H": result.emp_H,
        "margin_f": result.margin_f,
        "margin_g": result.margin_g,
        "margin_H": result.margin_H,
        "pass": result.passed,
    }


def _format_cell(value) -> str:
    if isinstance(value, bool):
        return "True" if value else "False"
    if isinstance(value, float):
        return str(value)
    return str(value)


def _quantiles(values) -> dict:
    arr = np.asarray(values, dtype=float)
    if arr.size == 0:
        return {"q50": None, "q90": None, "max": None}
    return {
        "q50": float(np.quantile(arr, 0.5)),
        "q90": float(np.quantile(arr, 0.9)),
        "max": float(np.max(arr)),
    }


def run_campaign(
    trials,
    csv_path=None,
    json_path=None,
    progress: Optional[Callable[[str], None]] = None,
) -> CampaignReport:
    """Run trials sequentially, recording failures without stopping.

    Writes the fixed-column CSV and the JSON summary when paths are given;
    both are byte-identical across runs of the same trial list.
    """
    trials = list(trials)
    rows = []
    failures = []
    results = []
    for trial_id, config in enumerate(trials):
        if progress is not None:
            progress(
                f"trial {trial_id + 1}/{len(trials)}: {config.function} "
                f"{config.kind.name} n={config.n} p={config.p} "
                f"delta={config.delta} seed={config.seed}"
            )
        row = _config_columns(trial_id, config)
        try:
            result = run_trial(config)
            results.append((config, result))
        except Exception as exc:  # record per-trial failure, keep going
            result = None
            failures.append({"trial_id": trial_id, "error": str(exc)})
        row.update(_result_columns(result))
        rows.append(row)

    per_kind = {}
    for kind in sorted({config.kind.name for config, _ in results}):
        picked = [r for c, r in results if c.kind.name == kind]
        per_kind[kind] = {
            "trials": len(picked),
            "margin_f": _quantiles([r.margin_f for r in picked]),
            "margin_g": _quantiles([r.margin_g for r in picked]),
            "margin_H": _quantiles([r.margin_H for r in picked]),
            "all_passed": bool(all(r.passed for r in picked)),
        }
    summary = {
        "n_trials": len(trials),
        "n_failed": len(failures),
        "all_passed": bool(
            not failures and all(r.passed for _, r in results)
        ),
        "per_kind": per_kind,
        "failures": failures,
    }

    report = CampaignReport(rows=rows, summary=summary, failures=failures)
    if csv_path is not None:
        write_campaign_csv(report, csv_path)
    if json_path is not None:
        Path(json_path).write_text(
            json.dumps(summary, indent=2, sort_keys=True) + "\n"
        )
    return report


def write_campaign_csv(report: CampaignReport, path) -> None:
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for row in report.rows:
            writer.writerow([_format_cell(row[col]) for col in CSV_COLUMNS])
