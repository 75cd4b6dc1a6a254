"""Random forcing, tail models and ensemble runs

Every path draws from its own counter-based stream,
``Philox(SeedSequence(seed, spawn_key=(path,)))``, so a path reproduces
the same forcing regardless of how the ensemble is split over workers.
"""

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, List, Optional

import numpy as np
from scipy import stats
from scipy.special import ndtri_exp
from eva.conf import settings

from codebase.lab.asymptotics import (
    ConvexFunctional,
    ScalingModel,
    estimate_limsup,
    scaled_solution,
    time_average,
)
from codebase.lab.catalogue import growth_sequence, make_kernel
from codebase.lab.core import solve_linear
from codebase.lab.errors import InputError, LabError, ParameterError
from codebase.lab.types import LogTrajectory, Trajectory, as_linear, as_log


def make_rng(seed, stream=0):
    ss = np.random.SeedSequence(int(seed), spawn_key=(int(stream),))
    return np.random.Generator(np.random.Philox(ss))


class symmetric_power_gen(stats.rv_continuous):
    """F(x) = c1 |x|^-alpha for x <= -1, 1 - c2 x^-alpha for x >= 1,
    linear in between"""

    def _argcheck(self, alpha, c1, c2):
        return (alpha > 0) & (c1 > 0) & (c2 > 0) & (c1 + c2 <= 1)

    def _cdf(self, x, alpha, c1, c2):
        ax = np.maximum(np.abs(x), 1.0)
        mid = c1 + (1 - c1 - c2) * (x + 1) / 2
        return np.where(x <= -1, c1 * ax ** -alpha,
                        np.where(x >= 1, 1 - c2 * ax ** -alpha, mid))

    def _sf(self, x, alpha, c1, c2):
        ax = np.maximum(np.abs(x), 1.0)
        mid = c2 + (1 - c1 - c2) * (1 - x) / 2
        return np.where(x >= 1, c2 * ax ** -alpha,
                        np.where(x <= -1, 1 - c1 * ax ** -alpha, mid))

    def _pdf(self, x, alpha, c1, c2):
        ax = np.maximum(np.abs(x), 1.0)
        return np.where(x <= -1, c1 * alpha * ax ** (-alpha - 1),
                        np.where(x >= 1, c2 * alpha * ax ** (-alpha - 1),
                                 (1 - c1 - c2) / 2))

    def _ppf(self, q, alpha, c1, c2):
        with np.errstate(divide="ignore", invalid="ignore"):
            left = -(c1 / q) ** (1 / alpha)
            right = (c2 / (1 - q)) ** (1 / alpha)
            mid = 2 * (q - c1) / (1 - c1 - c2) - 1
        return np.where(q <= c1, left, np.where(q >= 1 - c2, right, mid))

    def _isf(self, q, alpha, c1, c2):
        return -self._ppf(q, alpha, c2, c1)


symmetric_power = symmetric_power_gen(name="symmetric_power", shapes="alpha, c1, c2")


class TailModel:
    """Distribution of the noise, with logarithmic quantile access"""

    family = "custom"
    symmetric = False

    def __init__(self, dist):
        self.dist = dist

    def cdf(self, x):
        return self.dist.cdf(x)

    def sf(self, x):
        return self.dist.sf(x)

    def logsf(self, x):
        return self.dist.logsf(x)

    def logcdf(self, x):
        return self.dist.logcdf(x)

    def isf(self, p):
        return self.dist.isf(p)

    def log_quantile_log(self, t):
        """log G^-1(exp(-t)), with G the right-tail function"""
        return np.log(self.dist.isf(np.exp(-np.asarray(t, dtype=float))))

    def envelope(self, n):
        """G^-1(1/n)"""
        return np.exp(self.log_quantile_log(np.log(np.asarray(n, dtype=float))))

    def sample(self, rng, size):
        return self.dist.rvs(size=size, random_state=rng)

    @property
    def isimple(self):
        return {"family": self.family}


class Normal(TailModel):
    family = "normal"
    symmetric = True

    def __init__(self, sigma=1.0):
        if not sigma > 0:
            raise ParameterError("normal tail needs sigma > 0")
        self.sigma = float(sigma)
        super().__init__(stats.norm(scale=self.sigma))

    def log_quantile_log(self, t):
        return np.log(self.sigma * -ndtri_exp(-np.asarray(t, dtype=float)))


class SymmetricPower(TailModel):
    family = "symmetric_power"

    def __init__(self, alpha=2.0, c1=0.4, c2=0.4):
        if not (alpha > 0 and c1 > 0 and c2 > 0 and c1 + c2 <= 1):
            raise ParameterError("symmetric power tail needs alpha, c1, c2 > 0 and c1 + c2 <= 1")
        self.alpha, self.c1, self.c2 = float(alpha), float(c1), float(c2)
        self.symmetric = c1 == c2
        super().__init__(symmetric_power(self.alpha, self.c1, self.c2))

    def log_quantile_log(self, t):
        return (math.log(self.c2) + np.asarray(t, dtype=float)) / self.alpha

    @property
    def isimple(self):
        return {"family": self.family, "alpha": self.alpha, "c1": self.c1, "c2": self.c2}


class Weibull(TailModel):
    """Double Weibull, 1 - F(x) = exp(-(x/scale)^shape) / 2 for x >= 0"""

    family = "weibull"
    symmetric = True

    def __init__(self, scale=1.0, shape=1.0):
        if not (scale > 0 and shape > 0):
            raise ParameterError("weibull tail needs scale, shape > 0")
        self.scale, self.shape = float(scale), float(shape)
        super().__init__(stats.dweibull(self.shape, scale=self.scale))

    def log_quantile_log(self, t):
        t = np.asarray(t, dtype=float)
        return math.log(self.scale) + np.log(t - math.log(2.0)) / self.shape


class Uniform(TailModel):
    family = "uniform"
    symmetric = True

    def __init__(self):
        super().__init__(stats.uniform(loc=-1.0, scale=2.0))

    def log_quantile_log(self, t):
        return np.log1p(-2.0 * np.exp(-np.asarray(t, dtype=float)))


class Degenerate(TailModel):
    """Point mass at ``value``"""

    family = "degenerate"

    def __init__(self, value=0.0):
        self.value = float(value)
        super().__init__(None)

    def cdf(self, x):
        return np.where(np.asarray(x) >= self.value, 1.0, 0.0)

    def sf(self, x):
        return 1.0 - self.cdf(x)

    def logsf(self, x):
        with np.errstate(divide="ignore"):
            return np.log(self.sf(x))

    def logcdf(self, x):
        with np.errstate(divide="ignore"):
            return np.log(self.cdf(x))

    def isf(self, p):
        return np.full(np.shape(p), self.value)

    def log_quantile_log(self, t):
        with np.errstate(divide="ignore"):
            return np.full(np.shape(t), math.log(abs(self.value)) if self.value else -math.inf)

    def sample(self, rng, size):
        return np.full(size, self.value)


TAILS = {
    "normal": Normal,
    "symmetric_power": SymmetricPower,
    "weibull": Weibull,
    "uniform": Uniform,
    "degenerate": Degenerate,
}


def make_tail(spec):
    spec = dict(spec or {"family": "normal"})
    family = spec.pop("family", "normal")
    if family not in TAILS:
        raise ParameterError(f"unknown tail family {family!r}")
    try:
        return TAILS[family](**spec)
    except TypeError as e:
        raise ParameterError(f"tail {family!r}: {e}")


# Forcing generators

@dataclass
class ForcingGenerator:
    kind: str
    params: dict = field(default_factory=dict)
    seed: int = 0
    stream: int = 0

    KINDS = ("catalogue", "iid", "random_walk", "geometric_random_walk",
             "modulated", "explicit")

    def __post_init__(self):
        if self.kind not in self.KINDS:
            raise ParameterError(f"unknown forcing kind {self.kind!r}")

    def with_stream(self, stream):
        return ForcingGenerator(self.kind, self.params, self.seed, stream)

    @property
    def isimple(self):
        return {"kind": self.kind, "params": self.params, "seed": self.seed,
                "stream": self.stream}


def make_generator(spec, seed=0, stream=0):
    spec = dict(spec)
    kind = spec.pop("kind", "catalogue")
    return ForcingGenerator(kind, spec, seed, stream)


def _zero_at_origin(log_abs, sign):
    log_abs = np.concatenate(([-math.inf], log_abs))
    sign = np.concatenate(([0.0], sign))
    return LogTrajectory(0, log_abs, sign)


def _linear_at_origin(values):
    return Trajectory(0, np.concatenate(([0.0], values)))


def _factor(spec, n, rng):
    """Sign and log-magnitude of the modulating factor h(n)"""
    kind = spec.get("kind", "uniform")
    if kind == "uniform":
        low, high = float(spec.get("low", 0.0)), float(spec.get("high", 1.0))
        if not 0 <= low < high:
            raise ParameterError("uniform factor needs 0 <= low < high")
        values = rng.uniform(low, high, len(n))
    elif kind == "periodic":
        pattern = np.asarray(spec.get("values", [1.0]), dtype=float)
        if len(pattern) == 0:
            raise ParameterError("periodic factor needs at least one value")
        values = pattern[n.astype(int) % len(pattern)]
    elif kind == "alternating":
        amplitude = float(spec.get("amplitude", 0.5))
        values = 1.0 + amplitude * (-1.0) ** n
    else:
        raise ParameterError(f"unknown modulating factor {kind!r}")
    with np.errstate(divide="ignore"):
        return np.log(np.abs(values)), np.sign(values)


def generate(gen: ForcingGenerator, horizon: int, log_domain=False):
    """H on 0..horizon with H(0) = 0"""
    if int(horizon) != horizon or horizon < 1:
        raise InputError(f"horizon must be an integer >= 1, got {horizon!r}")
    horizon = int(horizon)
    rng = make_rng(gen.seed, gen.stream)
    p = gen.params
    n = np.arange(1, horizon + 1, dtype=float)

    if gen.kind == "catalogue":
        g = growth_sequence(p.get("name", "H3"), p.get("params", {}), horizon, start=1)
        h = _zero_at_origin(g.log_abs, g.sign)
    elif gen.kind == "iid":
        h = _linear_at_origin(make_tail(p.get("tail")).sample(rng, horizon))
    elif gen.kind == "random_walk":
        steps = make_tail(p.get("noise")).sample(rng, horizon)
        h = _linear_at_origin(float(p.get("drift", 0.0)) * n + np.cumsum(steps))
    elif gen.kind == "geometric_random_walk":
        steps = make_tail(p.get("noise")).sample(rng, horizon)
        log_abs = float(p.get("drift", 0.0)) * n + np.cumsum(steps)
        h = _zero_at_origin(log_abs, np.ones(horizon))
    elif gen.kind == "modulated":
        base = p.get("base", {"name": "H6"})
        g = growth_sequence(base.get("name", "H6"), base.get("params", {}), horizon, start=1)
        log_f, sign_f = _factor(p.get("factor", {}), n, rng)
        h = _zero_at_origin(g.log_abs + log_f, g.sign * sign_f)
    else:
        values = np.asarray(p.get("values", []), dtype=float)
        start = int(p.get("start", 1))
        if start > 1 or start + len(values) - 1 < horizon:
            raise InputError(
                f"explicit forcing covers [{start}, {start + len(values) - 1}], "
                f"indices 1..{horizon} are required")
        h = Trajectory(start, values).window(start, horizon)
        if start == 1:
            h = _linear_at_origin(h.values)

    return as_log(h) if log_domain else as_linear(h)


# Envelopes and tail classification

def _decay_slope(n, s):
    """Log-log slope of positive summands over the last decade"""
    mask = s > 0
    if mask.sum() < 3:
        return math.nan
    slope, _ = np.polyfit(np.log(n[mask]), np.log(s[mask]), 1)
    return float(slope)


def decay_verdict(n, s):
    """convergent / divergent / undecided from the last-decade decay of s"""
    if np.all(s == 0):
        return "convergent", -math.inf
    if np.any(s == 0):
        return "undecided", math.nan
    slope = _decay_slope(n, s)
    if not np.isfinite(slope):
        return "undecided", slope
    return ("convergent" if slope < -1 else "divergent"), slope


def _decade_points(n_max, count=50):
    pts = np.unique(np.round(np.logspace(math.log10(max(n_max / 10, 2)),
                                         math.log10(n_max), count)).astype(int))
    return pts


@dataclass
class EnvelopeReport:
    K_grid: List[float]
    final_sums: List[float]
    verdicts: List[str]
    slopes: List[float]
    series: Dict[float, Trajectory]
    crossing: Optional[tuple] = None

    @property
    def critical(self):
        if self.crossing is None:
            return None
        return 0.5 * (self.crossing[0] + self.crossing[1])

    @property
    def isimple(self):
        return {
            "K": self.K_grid,
            "S_N": self.final_sums,
            "verdicts": self.verdicts,
            "slopes": self.slopes,
            "crossing": list(self.crossing) if self.crossing else None,
            "critical": self.critical,
        }


def envelope_sums(tail: TailModel, a, K_grid, horizon=None):
    """S_N(K) = sum_n [1 - F(K a(n)) + F(-K a(n))] with verdicts per K"""
    a = as_linear(a)
    horizon = a.end if horizon is None else min(horizon, a.end)
    a = a.window(a.start, horizon)
    if np.any(a.values <= 0):
        raise InputError("envelope scale must be positive")
    n = a.indices.astype(float)
    points = _decade_points(horizon)
    points = points[points >= a.start]

    K_grid = sorted(float(K) for K in K_grid)
    sums, verdicts, slopes, series = [], [], [], {}
    for K in K_grid:
        s = tail.sf(K * a.values) + tail.cdf(-K * a.values)
        partial = np.cumsum(s)
        series[K] = Trajectory(a.start, partial)
        sums.append(float(partial[-1]))
        verdict, slope = decay_verdict(points.astype(float), s[points - a.start])
        verdicts.append(verdict)
        slopes.append(slope)

    divergent = [K for K, v in zip(K_grid, verdicts) if v == "divergent"]
    convergent = [K for K, v in zip(K_grid, verdicts) if v == "convergent"]
    crossing = None
    if divergent and convergent and max(divergent) < min(convergent):
        crossing = (max(divergent), min(convergent))
    logging.debug("envelope sums over %d grid points, crossing %s", len(K_grid), crossing)
    return EnvelopeReport(K_grid, sums, verdicts, slopes, series, crossing)


@dataclass
class TailVerdict:
    verdict: str  # rapid / regularly-varying / undecided
    alpha: Optional[float] = None
    case: Optional[str] = None
    L: Optional[float] = None
    details: dict = field(default_factory=dict)

    @property
    def isimple(self):
        return {"verdict": self.verdict, "alpha": self.alpha, "case": self.case,
                "L": self.L, "details": self.details}


def _fit_slope(x, y):
    if not np.all(np.isfinite(y)):
        return math.nan
    return float(np.polyfit(np.log(x), y, 1)[0])


def _regular_variation(log_tail, x):
    half = len(x) // 2
    s1 = _fit_slope(x[:half], log_tail[:half])
    s2 = _fit_slope(x[half:], log_tail[half:])
    ok = bool(np.isfinite(s1) and np.isfinite(s2) and s2 < 0
              and abs(s1 - s2) <= 0.05 * abs(s2))
    return ok, s2


def classify_tail(tail: TailModel, grid_log10=(200, 225, 250, 275, 300),
                  beta=None, delta=None, tolerance=None):
    """Subexponential slow-variation certificate vs regular variation"""
    beta = float(settings.SSV_BETA) if beta is None else beta
    delta = float(settings.SSV_DELTA) if delta is None else delta
    tolerance = float(settings.SSV_TOLERANCE) if tolerance is None else tolerance

    t = np.asarray(grid_log10, dtype=float) * math.log(10.0)
    log_mu = beta * np.log(t)
    with np.errstate(invalid="ignore", over="ignore"):
        base = tail.log_quantile_log(t)
        shifted = tail.log_quantile_log(t + delta * log_mu)
        deviation = np.abs(np.expm1(shifted - base))
    ssv_ok = bool(np.all(np.isfinite(deviation)) and np.all(deviation < tolerance)
                  and np.all(np.diff(deviation) <= 1e-12))

    n = _decade_points(1e6).astype(float)
    summand = 1.0 / (n * np.log(n) ** (beta * delta))
    sum_ok = decay_verdict(n, summand)[0] == "convergent"

    x = np.logspace(3, 6, 60)
    with np.errstate(divide="ignore"):
        right_ok, right_slope = _regular_variation(np.asarray(tail.logsf(x), dtype=float), x)
        left_ok, left_slope = _regular_variation(np.asarray(tail.logcdf(-x), dtype=float), x)

    details = {
        "ssv_deviation": [float(d) for d in deviation],
        "ssv": ssv_ok,
        "summability": sum_ok,
        "right_regular": right_ok,
        "left_regular": left_ok,
        "beta": beta,
        "delta": delta,
    }
    rv = right_ok or left_ok
    if ssv_ok and sum_ok and not rv:
        return TailVerdict("rapid", details=details)
    if not rv or ssv_ok:
        return TailVerdict("undecided", details=details)

    x_end = x[-1]
    if right_ok and left_ok:
        ratio = float(np.exp(tail.logsf(x_end) - tail.logcdf(-x_end)))
    elif right_ok:
        ratio = math.inf
    else:
        ratio = 0.0
    if ratio > 1e6:
        case, L, alpha = "i", None, -right_slope
    elif ratio < 1e-6:
        case, L, alpha = "ii", None, -left_slope
    else:
        case, L, alpha = "iii", ratio, -right_slope
    return TailVerdict("regularly-varying", alpha=float(alpha), case=case, L=L, details=details)


# Ensembles

STATISTICS = ("limsup_ratio", "log_growth_rate", "log_log_exponent",
              "cesaro_limit", "phi_average")


@dataclass
class EnsembleResult:
    statistic: str
    values: List[Optional[float]]
    failures: Dict[int, str]
    band: tuple

    @property
    def successful(self):
        return [v for v in self.values if v is not None]

    @property
    def pass_fraction(self):
        lo, hi = self.band
        if not self.values:
            return 0.0
        return sum(1 for v in self.successful if lo <= v <= hi) / len(self.values)

    @property
    def median(self):
        ok = self.successful
        return float(np.median(ok)) if ok else math.nan

    @property
    def isimple(self):
        return {
            "statistic": self.statistic,
            "paths": len(self.values),
            "values": self.values,
            "failures": {str(k): v for k, v in self.failures.items()},
            "band": list(self.band),
            "pass_fraction": self.pass_fraction,
            "median": self.median,
        }


def path_statistic(config, statistic, path):
    """Value of ``statistic`` on one sample path"""
    horizon = int(config["horizon"])
    kernel = make_kernel(config.get("kernel", {"name": "zero"}))
    gen = make_generator(config["forcing"], seed=config.get("seed", 0), stream=path)
    H = generate(gen, horizon, log_domain=bool(config.get("log_domain", False)))
    xi = float(config.get("xi", 0.0))

    def scale():
        spec = config.get("scaling")
        if not spec:
            raise InputError(f"statistic {statistic} needs a scaling sequence")
        return ScalingModel.from_catalogue(spec.get("name"), spec.get("params", {}), horizon)

    if statistic == "cesaro_limit":
        z = scaled_solution(kernel, H, scale(), xi)
        return float(time_average(z).values[-1])

    x = solve_linear(kernel, H, xi, horizon)
    if statistic == "limsup_ratio":
        return estimate_limsup(x, scale()).observed
    if statistic == "log_growth_rate":
        return float(as_log(x).log_abs[-1] / horizon)
    if statistic == "log_log_exponent":
        window = as_log(x).window(max(horizon // 2, 2), horizon)
        return float(np.max(window.log_abs / np.log(window.indices)))
    if statistic == "phi_average":
        phi_spec = config.get("phi", {"name": "power", "p": 2.0})
        phi = ConvexFunctional(phi_spec.get("name", "power"), phi_spec.get("p", 2.0),
                               phi_spec.get("c", 0.0))
        tail = as_linear(x).tail(0.25)
        return float(np.mean(phi(np.abs(tail.values))))
    raise ParameterError(f"unknown statistic {statistic!r}")


def _run_path(args):
    config, statistic, path = args
    try:
        return path, path_statistic(config, statistic, path), None
    except LabError as e:
        return path, None, f"{e.slug}: {e}"


def ensemble_verify(config, paths, statistic, band=None, workers=None):
    """Run ``paths`` seeded sample paths and collect ``statistic``"""
    if statistic not in STATISTICS:
        raise ParameterError(f"unknown statistic {statistic!r}")
    if int(paths) < 1:
        raise ParameterError("an ensemble needs at least one path")
    band = tuple(band or config.get("band") or (-math.inf, math.inf))
    workers = int(settings.ENSEMBLE_WORKERS) if workers is None else int(workers)

    jobs = [(config, statistic, path) for path in range(int(paths))]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_path, jobs))
    else:
        results = [_run_path(job) for job in jobs]

    values, failures = [None] * len(jobs), {}
    for path, value, error in sorted(results, key=lambda r: r[0]):
        if error is not None:
            logging.warning("path %d failed: %s", path, error)
            failures[path] = error
        else:
            values[path] = value
    return EnsembleResult(statistic, values, failures, band)
