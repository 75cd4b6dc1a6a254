"""Sequence types shared by the solvers and the analysis code

``Trajectory`` stores plain doubles, ``LogTrajectory`` stores sign and
log-magnitude so that growing sequences (2^n, n!) survive past the
double range.
"""

from dataclasses import dataclass, field

import numpy as np

from codebase.lab.errors import InputError, NonFiniteError


def _frozen(values):
    arr = np.array(values, dtype=float)
    if arr.ndim != 1:
        raise InputError("sequence values must be one dimensional")
    arr.setflags(write=False)
    return arr


def _first_bad(mask):
    return int(np.flatnonzero(mask)[0])


@dataclass(frozen=True)
class Kernel:
    """Truncated summable kernel k(0..M-1), zero beyond M-1"""

    coefficients: np.ndarray = field(default_factory=lambda: np.zeros(0))
    tail_bound: float = 0.0
    name: str = "custom"

    def __post_init__(self):
        coef = _frozen(self.coefficients)
        if not np.all(np.isfinite(coef)):
            raise InputError(f"kernel entry {_first_bad(~np.isfinite(coef))} is not finite")
        if self.tail_bound < 0:
            raise InputError("kernel tail bound must be non-negative")
        object.__setattr__(self, "coefficients", coef)

    @property
    def size(self):
        return len(self.coefficients)

    @property
    def l1(self):
        return float(np.sum(np.abs(self.coefficients)))

    @property
    def total(self):
        return float(np.sum(self.coefficients))

    @property
    def nonnegative(self):
        return bool(np.all(self.coefficients >= 0))

    def kappa(self, lam):
        """sum_l k(l) lam^(l+1) over the stored entries"""
        if self.size == 0:
            return 0.0
        powers = float(lam) ** np.arange(1, self.size + 1)
        return float(np.dot(self.coefficients, powers))

    def scaled(self, factor):
        return Kernel(self.coefficients * factor, self.tail_bound * abs(factor),
                      name=f"{self.name}*{factor:g}")

    def padded(self, length):
        """Coefficients as an array of ``length`` entries (zero tail)"""
        out = np.zeros(length)
        m = min(length, self.size)
        out[:m] = self.coefficients[:m]
        return out

    @property
    def isimple(self):
        return {
            "name": self.name,
            "size": self.size,
            "l1": self.l1,
            "sum": self.total,
            "nonnegative": self.nonnegative,
            "tail_bound": self.tail_bound,
        }


@dataclass(frozen=True)
class Trajectory:
    """value(n) for start <= n <= start + len - 1"""

    start: int
    values: np.ndarray

    def __post_init__(self):
        if int(self.start) < 0:
            raise InputError("trajectory start index must be >= 0")
        vals = _frozen(self.values)
        bad = ~np.isfinite(vals)
        if bad.any():
            raise NonFiniteError(self.start + _first_bad(bad))
        object.__setattr__(self, "start", int(self.start))
        object.__setattr__(self, "values", vals)

    def __len__(self):
        return len(self.values)

    @property
    def end(self):
        return self.start + len(self.values) - 1

    @property
    def indices(self):
        return np.arange(self.start, self.start + len(self.values))

    def value(self, n):
        if not self.start <= n <= self.end:
            raise InputError(f"index {n} outside [{self.start}, {self.end}]")
        return float(self.values[n - self.start])

    def window(self, lo, hi):
        """Sub-trajectory on lo..hi (inclusive)"""
        lo = max(lo, self.start)
        hi = min(hi, self.end)
        if hi < lo:
            raise InputError(f"empty window [{lo}, {hi}]")
        return Trajectory(lo, self.values[lo - self.start:hi - self.start + 1])

    def tail_start(self, fraction=0.25):
        """First index of the final ``fraction`` of the stored indices"""
        count = max(1, int(np.ceil(len(self.values) * fraction)))
        return self.end - count + 1

    def tail(self, fraction=0.25):
        return self.window(self.tail_start(fraction), self.end)

    def from_index(self, n):
        return self.window(n, self.end)

    def padded_from_zero(self, length=None):
        """Values on 0..end (or 0..length-1) with zeros where undefined"""
        length = self.end + 1 if length is None else length
        out = np.zeros(length)
        lo = self.start
        hi = min(self.end, length - 1)
        if hi >= lo:
            out[lo:hi + 1] = self.values[:hi - lo + 1]
        return out

    def map(self, func):
        return Trajectory(self.start, func(self.values))

    def to_log(self):
        return LogTrajectory.from_values(self)


@dataclass(frozen=True)
class LogTrajectory:
    """value(n) = sign(n) * exp(log_abs(n)); zero is sign 0, log_abs -inf"""

    start: int
    log_abs: np.ndarray
    sign: np.ndarray

    def __post_init__(self):
        if int(self.start) < 0:
            raise InputError("trajectory start index must be >= 0")
        log_abs = _frozen(self.log_abs)
        sign = _frozen(np.sign(self.sign))
        if log_abs.shape != sign.shape:
            raise InputError("log magnitude and sign must have the same length")
        bad = np.isnan(log_abs) | (log_abs == np.inf)
        if bad.any():
            raise NonFiniteError(self.start + _first_bad(bad), what="log magnitude")
        sign = np.where(log_abs == -np.inf, 0.0, sign)
        sign.setflags(write=False)
        object.__setattr__(self, "start", int(self.start))
        object.__setattr__(self, "log_abs", log_abs)
        object.__setattr__(self, "sign", sign)

    @classmethod
    def from_values(cls, traj):
        with np.errstate(divide="ignore"):
            log_abs = np.log(np.abs(traj.values))
        return cls(traj.start, log_abs, np.sign(traj.values))

    @classmethod
    def positive(cls, start, log_abs):
        log_abs = np.asarray(log_abs, dtype=float)
        return cls(start, log_abs, np.ones_like(log_abs))

    def __len__(self):
        return len(self.log_abs)

    @property
    def end(self):
        return self.start + len(self.log_abs) - 1

    @property
    def indices(self):
        return np.arange(self.start, self.start + len(self.log_abs))

    def window(self, lo, hi):
        lo = max(lo, self.start)
        hi = min(hi, self.end)
        if hi < lo:
            raise InputError(f"empty window [{lo}, {hi}]")
        sl = slice(lo - self.start, hi - self.start + 1)
        return LogTrajectory(lo, self.log_abs[sl], self.sign[sl])

    def tail_start(self, fraction=0.25):
        count = max(1, int(np.ceil(len(self.log_abs) * fraction)))
        return self.end - count + 1

    def to_linear(self):
        with np.errstate(over="ignore"):
            values = self.sign * np.exp(self.log_abs)
        return Trajectory(self.start, values)

    def to_log(self):
        return self


def as_log(g):
    """LogTrajectory view of either sequence type"""
    return g if isinstance(g, LogTrajectory) else LogTrajectory.from_values(g)


def as_linear(g):
    return g if isinstance(g, Trajectory) else g.to_linear()


def divide(g, a):
    """g(n) / a(n) over the indices of g, computed in log space

    ``a`` must cover every index of ``g`` and be non-zero there.
    """
    g_log = as_log(g)
    a_log = as_log(a)
    if g_log.start < a_log.start or g_log.end > a_log.end:
        raise InputError(
            f"scale defined on [{a_log.start}, {a_log.end}] does not cover "
            f"[{g_log.start}, {g_log.end}]")
    a_win = a_log.window(g_log.start, g_log.end)
    if np.any(a_win.sign == 0):
        raise InputError("scale vanishes inside the window")
    with np.errstate(invalid="ignore"):
        log_ratio = g_log.log_abs - a_win.log_abs
    with np.errstate(over="ignore"):
        values = g_log.sign * a_win.sign * np.exp(log_ratio)
    values = np.where(g_log.sign == 0, 0.0, values)
    return Trajectory(g_log.start, values)
