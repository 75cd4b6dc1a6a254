"""Growth classes, limsup estimates and asymptotic representations

Every verdict here is an estimate over a finite window: limsups are
replaced by dyadic block maxima after a burn-in, limits by tail-window
statistics. The window metadata is returned along with each verdict.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np
from scipy.special import logsumexp
from eva.conf import settings

from codebase.lab.catalogue import growth_lambda, growth_sequence
from codebase.lab.core import resolvent, solve_detrended, solve_linear
from codebase.lab.errors import (
    InputError,
    NonFiniteError,
    ParameterError,
    UndefinedRatioError,
)
from codebase.lab.spectral import characteristic_roots, multiplier_L
from codebase.lab.types import (
    Kernel,
    LogTrajectory,
    Trajectory,
    as_linear,
    as_log,
    divide,
)

# first index at which a catalogue member is positive
MIN_START = {"sqrt2log": 2}


@dataclass(frozen=True)
class ScalingModel:
    """Positive reference sequence a with ratio limit lam"""

    a: LogTrajectory
    lam: float
    tag: str = "custom"
    geometric: bool = False

    def __post_init__(self):
        if np.any(self.a.sign <= 0):
            bad = int(np.flatnonzero(self.a.sign <= 0)[0]) + self.a.start
            raise ParameterError(f"scaling sequence must be positive, a({bad}) is not")
        if not 0.0 <= self.lam <= 1.0:
            raise ParameterError(f"scaling ratio limit must lie in [0, 1], got {self.lam!r}")

    @classmethod
    def from_catalogue(cls, name, params, horizon, start=None):
        params = params or {}
        start = max(1, MIN_START.get(name, 1)) if start is None else start
        a = growth_sequence(name, params, horizon, start=start)
        return cls(a, growth_lambda(name, params), tag=name, geometric=(name == "H6"))

    @classmethod
    def geometric_rate(cls, lam, horizon, start=0):
        """a(n) = lam^(-n)"""
        a = growth_sequence("H6", {"lam": lam}, horizon, start=start)
        return cls(a, lam, tag="H6", geometric=True)

    @classmethod
    def from_values(cls, values, lam, start=1, tag="custom"):
        return cls(as_log(Trajectory(start, values)), float(lam), tag=tag)

    @property
    def monotone(self):
        return bool(np.all(np.diff(self.a.log_abs) >= 0))

    def ratio(self, g):
        """g(n)/a(n) on the indices of g that a covers"""
        lo = max(g.start, self.a.start)
        if g.end > self.a.end:
            raise InputError(
                f"scale ends at {self.a.end} but the sequence runs to {g.end}")
        return divide(g.window(lo, g.end), self.a)

    @property
    def isimple(self):
        return {"tag": self.tag, "lambda": self.lam, "start": self.a.start,
                "end": self.a.end, "monotone": self.monotone}


def _setting(value, name):
    return float(getattr(settings, name)) if value is None else float(value)


@dataclass
class LambdaEstimate:
    lambda_hat: float
    converged: bool
    iqr: float


def ratios(g, lo=None):
    """g(n-1)/g(n) for n in lo..end"""
    g = as_log(g)
    lo = g.start + 1 if lo is None else max(lo, g.start + 1)
    prev = g.window(lo - 1, g.end - 1)
    cur = g.window(lo, g.end)
    if np.any(prev.sign == 0) or np.any(cur.sign == 0):
        raise UndefinedRatioError("sequence vanishes on the tail window")
    return prev.sign * cur.sign * np.exp(prev.log_abs - cur.log_abs)


def estimate_lambda(g, iqr_tol=None):
    """Median of g(n-1)/g(n) over the last quarter of the indices"""
    g = as_log(g)
    if len(g) < 3:
        raise InputError("at least three values are needed to estimate a ratio limit")
    values = ratios(g, g.tail_start(0.25))
    q1, med, q3 = np.percentile(values, [25, 50, 75])
    iqr = float(q3 - q1)
    return LambdaEstimate(float(med), iqr < _setting(iqr_tol, "LAMBDA_IQR"), iqr)


@dataclass
class LimsupEstimate:
    value: float  # +inf when classified infinite
    observed: float
    classification: str  # zero / finite-positive / infinite
    blocks: List[tuple]
    burn_in: int
    peak: float
    thresholds: dict = field(default_factory=dict)

    @property
    def isimple(self):
        return {
            "value": self.value,
            "observed": self.observed,
            "classification": self.classification,
            "blocks": [list(b) for b in self.blocks],
            "burn_in": self.burn_in,
            "peak": self.peak,
            "thresholds": self.thresholds,
        }


def dyadic_blocks(lo, hi):
    """[2^m, 2^(m+1)) blocks clipped to lo..hi; a short last block is merged"""
    blocks = []
    m = int(math.floor(math.log2(max(lo, 1))))
    while (1 << m) <= hi:
        b_lo = max(1 << m, lo)
        b_hi = min((1 << (m + 1)) - 1, hi)
        if b_lo <= b_hi:
            blocks.append([b_lo, b_hi])
        m += 1
    if len(blocks) > 1:
        full = (1 << int(math.floor(math.log2(blocks[-1][0]))))
        if blocks[-1][1] - blocks[-1][0] + 1 < full // 2:
            last = blocks.pop()
            blocks[-1][1] = last[1]
    return [tuple(b) for b in blocks]


def block_maxima(values, start, blocks):
    return np.array([np.max(values[lo - start:hi - start + 1]) for lo, hi in blocks])


def estimate_limsup(g, scale: ScalingModel, burn_in=None, zero_fraction=None, growth_factor=None):
    """Lambda_a|g| from dyadic block maxima of |g|/a

    The value is the maximum past the burn-in; the trend is read off the
    last three dyadic blocks of the whole window.
    """
    burn_in = _setting(burn_in, "LIMSUP_BURN_IN")
    zero_fraction = _setting(zero_fraction, "LIMSUP_ZERO_FRACTION")
    growth_factor = _setting(growth_factor, "LIMSUP_GROWTH_FACTOR")

    ratio = scale.ratio(g)
    values = np.abs(ratio.values)
    lo = ratio.start + int(math.floor(len(values) * burn_in))
    blocks = dyadic_blocks(max(ratio.start, 1), ratio.end)
    if len(blocks) < 3:
        raise InputError(
            f"window [{ratio.start}, {ratio.end}] spans {len(blocks)} dyadic blocks, "
            "three are needed")
    maxima = block_maxima(values, ratio.start, blocks)
    peak = float(np.max(values))
    observed = float(np.max(values[lo - ratio.start:]))

    if peak == 0.0:
        classification = "zero"
    elif maxima[-1] >= growth_factor * maxima[-3] and maxima[-1] > 0:
        classification = "infinite"
    elif maxima[-1] < zero_fraction * peak and maxima[-1] <= maxima[-3]:
        classification = "zero"
    else:
        classification = "finite-positive"

    return LimsupEstimate(
        value=math.inf if classification == "infinite" else observed,
        observed=observed,
        classification=classification,
        blocks=[(b_lo, b_hi, float(m)) for (b_lo, b_hi), m in zip(blocks, maxima)],
        burn_in=lo,
        peak=peak,
        thresholds={"burn_in": burn_in, "zero_fraction": zero_fraction,
                    "growth_factor": growth_factor},
    )


def non_increasing(values, rtol=1e-9, atol=1e-12):
    values = list(values)
    return all(b <= a * (1 + rtol) + atol for a, b in zip(values, values[1:]))


def _solve(kernel, H, xi):
    return solve_linear(kernel, H, xi, H.end)


@dataclass
class Growth2Result:
    L_empirical: float
    L_theory: float
    residual: float
    lambda_hat: float
    converged: bool
    summable: bool
    ratio: Optional[Trajectory] = None

    @property
    def isimple(self):
        return {
            "L_empirical": self.L_empirical,
            "L_theory": self.L_theory,
            "residual": self.residual,
            "lambda_hat": self.lambda_hat,
            "converged": self.converged,
            "summable": self.summable,
        }


def verify_growth2(kernel: Kernel, H, scale: Optional[ScalingModel] = None, xi=0.0, lam=None):
    """x(n)/H(n) -> 1/(1 - sum_l k(l) lam^(l+1)) for H in G_lam

    The multiplier uses ``lam`` when given, else the ratio limit of
    ``scale``; only without either does it fall back to the estimate
    from H itself, which at finite N is biased away from 0 and 1.
    """
    estimate = estimate_lambda(H)
    if not estimate.converged:
        logging.warning("ratio estimate of H has not converged (iqr %.3g)", estimate.iqr)
    lam_hat = min(max(estimate.lambda_hat, 0.0), 1.0)
    if lam is None and scale is not None:
        lam = scale.lam
    if lam is None:
        lam = lam_hat
    elif abs(lam - lam_hat) > 1e-3:
        logging.debug("ratio limit %g, finite-N estimate %g", lam, lam_hat)

    summable = characteristic_roots(kernel).summable
    L_theory = multiplier_L(kernel, lam, summable=summable)

    x = _solve(kernel, H, xi)
    lo = as_log(H).tail_start(0.25)
    h_tail = as_log(H).window(lo, H.end)
    if np.any(h_tail.sign == 0):
        raise InputError("H vanishes on the tail window")
    ratio = divide(as_log(x).window(lo, H.end), h_tail)
    L_empirical = float(np.mean(ratio.values))
    return Growth2Result(L_empirical, L_theory, abs(L_empirical - L_theory),
                         lam_hat, estimate.converged, summable, ratio)


def predict_x_over_a(kernel: Kernel, resolvent_seq: Trajectory, lam: float, lam_a_H: Trajectory):
    """(lam_a H)(n) + sum_{j=1}^{n} r(j) lam^j (lam_a H)(n-j) on 0..end"""
    n_end = lam_a_H.end
    if resolvent_seq.start != 0 or resolvent_seq.end < n_end:
        raise InputError("resolvent must be precomputed to the same horizon")
    h = lam_a_H.padded_from_zero()
    weights = resolvent_seq.values[:n_end + 1] * float(lam) ** np.arange(n_end + 1)
    return Trajectory(0, np.convolve(weights, h)[:n_end + 1])


def predict_H_over_a(kernel: Kernel, lam: float, lam_a_x: Trajectory):
    """(lam_a x)(n) - sum_{j=0}^{n-1} k(j) lam^(j+1) (lam_a x)(n-j-1) on 0..end"""
    z = lam_a_x.padded_from_zero()
    weights = kernel.coefficients * float(lam) ** np.arange(1, kernel.size + 1)
    out = z.copy()
    if kernel.size and len(z) > 1:
        out[1:] -= np.convolve(weights, z)[:len(z) - 1]
    return Trajectory(0, out)


@dataclass
class DecompositionReport:
    lambda_a_part: Trajectory
    predicted: Trajectory
    residual: Trajectory
    residual_sup: float
    block_sups: List[float] = field(default_factory=list)
    h_recovery_sup: Optional[float] = None
    almost_periodic_part: Optional[Trajectory] = None
    time_average: Optional[float] = None

    @property
    def decaying(self):
        return non_increasing(self.block_sups[-3:])

    @property
    def isimple(self):
        return {
            "residual_sup": self.residual_sup,
            "block_sups": self.block_sups,
            "decaying": self.decaying,
            "h_recovery_sup": self.h_recovery_sup,
            "time_average": self.time_average,
        }


def _tail_sup(traj, fraction=0.25):
    return float(np.max(np.abs(traj.tail(fraction).values)))


def _block_sups(traj):
    blocks = dyadic_blocks(max(traj.start, 1), traj.end)
    if not blocks:
        return []
    return [float(m) for m in block_maxima(np.abs(traj.values), traj.start, blocks)]


def _difference(a, b):
    lo = max(a.start, b.start)
    hi = min(a.end, b.end)
    return Trajectory(lo, a.window(lo, hi).values - b.window(lo, hi).values)


def verify_growth3(kernel: Kernel, H, scale: ScalingModel, xi=0.0, x=None):
    """x/a against the weighted resolvent average of H/a, and back"""
    x = _solve(kernel, H, xi) if x is None else x
    lam_a_H = scale.ratio(H.window(1, H.end))
    lam_a_x = scale.ratio(x)
    r = resolvent(kernel, x.end)
    predicted = predict_x_over_a(kernel, r, scale.lam, lam_a_H)
    residual = _difference(lam_a_x, predicted)

    recovered = predict_H_over_a(kernel, scale.lam, lam_a_x)
    h_residual = _difference(recovered, lam_a_H)

    return DecompositionReport(
        lambda_a_part=lam_a_x,
        predicted=predicted,
        residual=residual,
        residual_sup=_tail_sup(residual),
        block_sups=_block_sups(residual),
        h_recovery_sup=_tail_sup(h_residual),
    )


@dataclass
class PeriodicExtraction:
    pi: Trajectory
    residual: Trajectory
    period: Optional[int]
    periodic: bool
    residual_sup: float
    pattern: np.ndarray
    peak_ratio: float = 0.0

    @property
    def isimple(self):
        return {
            "period": self.period,
            "periodic": self.periodic,
            "residual_sup": self.residual_sup,
            "pattern": [float(v) for v in self.pattern],
            "peak_ratio": self.peak_ratio,
        }


def _residue_means(tail, p):
    idx = tail.indices % p
    return np.array([np.mean(tail.values[idx == m]) for m in range(p)])


def _periodic_rms(tail, p):
    pattern = _residue_means(tail, p)
    return float(np.sqrt(np.mean((tail.values - pattern[tail.indices % p]) ** 2)))


def _fundamental_period(tail, period, rms, slack):
    """Smallest divisor of ``period`` fitting the tail within ``slack`` times its rms

    Multiples of the true period fit a decaying perturbation slightly
    better than the period itself.
    """
    scale = float(np.max(np.abs(tail.values)))
    limit = slack * rms + 1e-9 * max(1.0, scale)
    for d in range(2, period):
        if period % d == 0 and _periodic_rms(tail, d) <= limit:
            return d
    return period


def extract_almost_periodic(g_over_a: Trajectory, period_hint=None, noise_factor=3.0,
                            divisor_slack=3.0):
    """Periodic part of a bounded sequence from its tail window

    Without a hint the period is read off the dominant peak of the
    discrete Fourier magnitudes, restricted to integer periods <= N/8.
    """
    tail = g_over_a.tail(0.25)
    max_period = max(2, len(g_over_a) // 8)
    mean = float(np.mean(tail.values))
    period, peak_ratio = period_hint, 0.0

    if period is None:
        centred = tail.values - mean
        if np.max(np.abs(centred)) <= 1e-12 * max(1.0, abs(mean)):
            period = None
        else:
            spectrum = np.abs(np.fft.rfft(centred))[1:]
            peak_bin = int(np.argmax(spectrum)) + 1
            floor = float(np.median(spectrum))
            peak_ratio = float(spectrum[peak_bin - 1] / floor) if floor > 0 else math.inf
            if peak_ratio >= noise_factor:
                candidates = sorted({int(round(m * len(tail) / peak_bin)) for m in range(1, 7)})
                candidates = [p for p in candidates if 2 <= p <= max_period and p <= len(tail)]
                if candidates:
                    scores = [_periodic_rms(tail, p) for p in candidates]
                    best = int(np.argmin(scores))
                    period = _fundamental_period(tail, candidates[best], scores[best],
                                                 divisor_slack)

    if period is None:
        pattern = np.array([mean])
        pi_values = np.full(len(g_over_a), mean)
        periodic = False
    else:
        if period > len(tail):
            raise InputError(f"tail window of {len(tail)} values is shorter than period {period}")
        pattern = _residue_means(tail, period)
        pi_values = pattern[g_over_a.indices % period]
        periodic = True

    pi = Trajectory(g_over_a.start, pi_values)
    residual = Trajectory(g_over_a.start, g_over_a.values - pi_values)
    return PeriodicExtraction(pi, residual, period, periodic, _tail_sup(residual),
                              pattern, peak_ratio)


def periodic_image(pattern, weights, shift=0):
    """sum_j weights(j) pattern((m - j - shift) mod p) for each residue m"""
    p = len(pattern)
    m = np.arange(p)[:, None]
    j = np.arange(len(weights))[None, :]
    return np.sum(weights[None, :] * pattern[(m - j - shift) % p], axis=1)


@dataclass
class PeriodicReport:
    x_extraction: PeriodicExtraction
    h_extraction: PeriodicExtraction
    predicted_x: np.ndarray
    predicted_h: np.ndarray
    residual: float
    h_residual: float

    @property
    def same_period(self):
        return (self.x_extraction.period is not None
                and self.x_extraction.period == self.h_extraction.period)

    @property
    def isimple(self):
        return {
            "period_x": self.x_extraction.period,
            "period_H": self.h_extraction.period,
            "same_period": self.same_period,
            "residual": self.residual,
            "h_residual": self.h_residual,
            "pattern_x": [float(v) for v in self.x_extraction.pattern],
            "predicted_x": [float(v) for v in self.predicted_x],
        }


def verify_periodic(kernel: Kernel, H, scale: ScalingModel, period_hint=None, xi=0.0):
    """Periodic part of x/a predicted from the periodic part of H/a"""
    x = _solve(kernel, H, xi)
    h_ext = extract_almost_periodic(scale.ratio(H.window(1, H.end)), period_hint)
    x_ext = extract_almost_periodic(scale.ratio(x), period_hint or h_ext.period)

    r = resolvent(kernel, x.end).values
    r_weights = r * float(scale.lam) ** np.arange(len(r))
    k_weights = kernel.coefficients * float(scale.lam) ** np.arange(1, kernel.size + 1)

    if h_ext.period is None or x_ext.period != h_ext.period:
        nan = np.array([math.nan])
        return PeriodicReport(x_ext, h_ext, nan, nan, math.inf, math.inf)

    # align both patterns on residues 0..p-1
    predicted_x = periodic_image(h_ext.pattern, r_weights)
    predicted_h = h_ext.pattern.copy()
    if kernel.size:
        predicted_h = x_ext.pattern - periodic_image(x_ext.pattern, k_weights, shift=1)
    return PeriodicReport(
        x_ext, h_ext, predicted_x, predicted_h,
        residual=float(np.max(np.abs(x_ext.pattern - predicted_x))),
        h_residual=float(np.max(np.abs(h_ext.pattern - predicted_h))),
    )


def time_average(g_over_a: Trajectory):
    """(mu g)(n) = (1/n) sum_{j=1}^{n} g(j)/a(j), returned from index 1"""
    if g_over_a.start > 1:
        raise InputError("time averages need the sequence from index 1")
    g = g_over_a.from_index(1)
    n = np.arange(1, len(g) + 1)
    return Trajectory(1, np.cumsum(g.values) / n)


@dataclass
class ErgodicReport:
    mu_H: float
    mu_x: float
    predicted_mu_x: float
    recovered_mu_H: float
    multiplier: float
    x_average: Trajectory

    @property
    def gap(self):
        return abs(self.mu_x - self.predicted_mu_x)

    @property
    def isimple(self):
        return {
            "mu_H": self.mu_H,
            "mu_x": self.mu_x,
            "predicted_mu_x": self.predicted_mu_x,
            "recovered_mu_H": self.recovered_mu_H,
            "multiplier": self.multiplier,
            "gap": self.gap,
        }


def scaled_solution(kernel: Kernel, H, scale: ScalingModel, xi=0.0):
    """x/a, detrended when a is exactly geometric"""
    if scale.geometric and 0.0 < scale.lam <= 1.0:
        h_over_a = scale.ratio(H.window(1, H.end))
        return solve_detrended(kernel, h_over_a, xi, scale.lam, horizon=H.end)
    return scale.ratio(_solve(kernel, H, xi))


def verify_ergodic(kernel: Kernel, H, scale: ScalingModel, xi=0.0):
    """Cesaro limit of x/a against mu_a H* / (1 - sum_j k(j) lam^(j+1))"""
    z = scaled_solution(kernel, H, scale, xi)
    mu_x = time_average(z)
    mu_H = time_average(scale.ratio(H.window(1, H.end)))
    mult = multiplier_L(kernel, scale.lam, summable=characteristic_roots(kernel).summable)
    return ErgodicReport(
        mu_H=float(mu_H.values[-1]),
        mu_x=float(mu_x.values[-1]),
        predicted_mu_x=float(mu_H.values[-1] * mult),
        recovered_mu_H=float(mu_x.values[-1] / mult),
        multiplier=mult,
        x_average=mu_x,
    )


class ConvexFunctional:
    """Increasing convex phi on [0, inf): power, exp or hinge"""

    KINDS = ("power", "exp", "hinge")

    def __init__(self, kind="power", p=2.0, c=0.0):
        if kind not in self.KINDS:
            raise ParameterError(f"unknown functional {kind!r}")
        if kind == "power" and p < 1:
            raise ParameterError("power functional needs p >= 1")
        self.kind = kind
        self.p = float(p)
        self.c = float(c)
        self.check_convex()

    def __call__(self, v):
        v = np.asarray(v, dtype=float)
        with np.errstate(over="ignore"):
            if self.kind == "power":
                return v ** self.p
            if self.kind == "exp":
                return np.exp(v)
        return np.maximum(0.0, v - self.c)

    @property
    def o_regularly_varying(self):
        return self.kind != "exp"

    def check_convex(self, grid=None):
        grid = np.linspace(0.0, 10.0, 201) if grid is None else grid
        values = self(grid)
        increments = np.diff(values)
        second = np.diff(values, 2)
        scale = max(1.0, float(np.max(np.abs(values))))
        if np.any(increments < -1e-12 * scale) or np.any(second < -1e-12 * scale):
            raise ParameterError(f"{self.kind} functional is not increasing and convex")

    def log_mean(self, v):
        """log of mean phi(v), power functionals only"""
        with np.errstate(divide="ignore"):
            return float(logsumexp(self.p * np.log(np.abs(v))) - math.log(len(v)))

    @property
    def isimple(self):
        return {"kind": self.kind, "p": self.p, "c": self.c,
                "o_regularly_varying": self.o_regularly_varying}


@dataclass
class PhiBounds:
    lhs: float
    rhs: float
    dual_lhs: float
    dual_rhs: float
    r_l1: float
    k_l1: float
    log_scale: bool = False

    @property
    def holds(self):
        return self._le(self.lhs, self.rhs)

    @property
    def dual_holds(self):
        return self._le(self.dual_lhs, self.dual_rhs)

    def _le(self, lhs, rhs):
        if self.log_scale:
            return lhs <= rhs + math.log1p(1e-6)
        return lhs <= rhs * (1 + 1e-6)

    @property
    def isimple(self):
        return {
            "lhs": self.lhs,
            "rhs": self.rhs,
            "holds": self.holds,
            "dual_lhs": self.dual_lhs,
            "dual_rhs": self.dual_rhs,
            "dual_holds": self.dual_holds,
            "r_l1": self.r_l1,
            "k_l1": self.k_l1,
            "log_scale": self.log_scale,
        }


def phi_average_bounds(kernel: Kernel, x: Trajectory, H: Trajectory, phi: ConvexFunctional):
    """Tail averages of phi(|x|) vs phi(|r|_1 |H|), and H vs (1+|k|_1) x"""
    lo = max(x.tail_start(0.25), 1)
    xs = np.abs(x.window(lo, x.end).values)
    hs = np.abs(H.window(lo, x.end).values)
    if len(xs) != len(hs):
        raise InputError("x and H must share the horizon")
    r_l1 = float(np.sum(np.abs(resolvent(kernel, x.end).values)))
    k_l1 = kernel.l1

    args = (xs, r_l1 * hs, hs, (1 + k_l1) * xs)
    means = [float(np.mean(phi(v))) for v in args]
    if all(np.isfinite(means)):
        return PhiBounds(*means, r_l1=r_l1, k_l1=k_l1)
    if phi.kind != "power":
        raise NonFiniteError(lo, what=f"{phi.kind} time average")
    logs = [phi.log_mean(v) for v in args]
    return PhiBounds(*logs, r_l1=r_l1, k_l1=k_l1, log_scale=True)


@dataclass
class FluctReport:
    x_estimate: LimsupEstimate
    h_estimate: LimsupEstimate
    r_l1: float
    k_l1: float
    slack: float
    conv_lhs: Optional[float] = None
    conv_rhs: Optional[float] = None

    @property
    def upper_holds(self):
        return self.x_estimate.observed <= (1 + self.slack) * self.r_l1 * self.h_estimate.observed

    @property
    def lower_holds(self):
        return self.h_estimate.observed <= (1 + self.slack) * (1 + self.k_l1) * self.x_estimate.observed

    @property
    def agree(self):
        return self.x_estimate.classification == self.h_estimate.classification

    @property
    def conv_holds(self):
        return self.conv_lhs is None or self.conv_lhs <= self.conv_rhs

    @property
    def isimple(self):
        return {
            "limsup_x": self.x_estimate.isimple,
            "limsup_H": self.h_estimate.isimple,
            "r_l1": self.r_l1,
            "k_l1": self.k_l1,
            "upper_holds": self.upper_holds,
            "lower_holds": self.lower_holds,
            "classification_agrees": self.agree,
            "convolution_lhs": self.conv_lhs,
            "convolution_rhs": self.conv_rhs,
            "convolution_holds": self.conv_holds,
        }


def convolution_bound(kernel: Kernel, H, scale: ScalingModel, slack=None, **limsup):
    """sup over the window of |sum_j k(n-j) H(j)|/a(n) vs |k|_1 Lambda_a|H|"""
    slack = _setting(slack, "FLUCT_SLACK")
    h = as_linear(H.window(1, H.end)).padded_from_zero()
    conv = Trajectory(0, np.convolve(kernel.coefficients, h)[:len(h)] if kernel.size
                      else np.zeros(len(h)))
    h_est = estimate_limsup(H, scale, **limsup)
    # every H(j) feeding the window lies past the burn-in
    lo = min(h_est.burn_in + kernel.size, conv.end)
    ratio = np.abs(scale.ratio(conv.window(lo, conv.end)).values)
    lhs = float(np.max(ratio))
    rhs = kernel.l1 * h_est.observed * (1 + slack)
    return lhs, rhs, lhs <= rhs


def verify_fluct(kernel: Kernel, H, scale: ScalingModel, xi=0.0, slack=None, **limsup):
    """Lambda_a|x| against Lambda_a|H| and the trichotomy"""
    slack = _setting(slack, "FLUCT_SLACK")
    x = _solve(kernel, H, xi)
    x_est = estimate_limsup(x, scale, **limsup)
    h_est = estimate_limsup(H.window(1, H.end), scale, **limsup)
    r_l1 = float(np.sum(np.abs(resolvent(kernel, x.end).values)))
    report = FluctReport(x_est, h_est, r_l1, kernel.l1, slack)
    if isinstance(H, Trajectory):
        report.conv_lhs, report.conv_rhs, _ = convolution_bound(kernel, H, scale, slack, **limsup)
    return report
