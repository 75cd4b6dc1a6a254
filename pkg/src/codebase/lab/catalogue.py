"""Built-in kernels, nonlinearities and deterministic growth sequences

The growth sequences H1..H10 are produced in log form; the iterated
logarithms of H1/H2/H5/H7 are evaluated at n + offset so that every
factor is positive from index 0 on.
"""

import math

import numpy as np
from scipy.special import gammaln

from codebase.lab.errors import NonFiniteError, NonlinearityError, ParameterError
from codebase.lab.types import Kernel, LogTrajectory


# Kernels

def zero_kernel():
    return Kernel(np.zeros(0), name="zero")


def single_kernel(c):
    return Kernel([float(c)], name="single")


def finite_kernel(coefficients, tail_bound=0.0):
    return Kernel(coefficients, tail_bound=float(tail_bound), name="finite")


def geometric_kernel(scale, ratio, length):
    """k(l) = scale * ratio^l for l < length"""
    if not abs(ratio) < 1:
        raise ParameterError("geometric kernel needs |ratio| < 1")
    if length < 1:
        raise ParameterError("geometric kernel needs length >= 1")
    coef = scale * ratio ** np.arange(length)
    tail = abs(scale) * abs(ratio) ** length / (1 - abs(ratio))
    return Kernel(coef, tail_bound=tail, name="geometric")


def power_kernel(scale, exponent, length):
    """k(l) = scale * (l+1)^(-exponent), summable for exponent > 1"""
    if exponent <= 1:
        raise ParameterError("power kernel needs exponent > 1")
    if length < 1:
        raise ParameterError("power kernel needs length >= 1")
    coef = scale * (np.arange(length) + 1.0) ** (-exponent)
    tail = abs(scale) * length ** (1 - exponent) / (exponent - 1)
    return Kernel(coef, tail_bound=tail, name="power")


def random_kernel(l1, length, seed, nonnegative=False):
    """Random kernel rescaled so that |k|_1 == l1"""
    if length < 1:
        raise ParameterError("random kernel needs length >= 1")
    rng = np.random.default_rng(seed)
    coef = rng.uniform(0.0, 1.0, length)
    if not nonnegative:
        coef *= rng.choice([-1.0, 1.0], length)
    coef *= l1 / np.sum(np.abs(coef))
    return Kernel(coef, name="random")


KERNELS = {
    "zero": zero_kernel,
    "single": single_kernel,
    "finite": finite_kernel,
    "geometric": geometric_kernel,
    "power": power_kernel,
    "random": random_kernel,
}


def make_kernel(spec):
    """Kernel from a config spec: {"name", "params"} or {"coefficients"}"""
    if "coefficients" in spec:
        return finite_kernel(spec["coefficients"], spec.get("tail_bound", 0.0))
    name = spec.get("name", "zero")
    if name not in KERNELS:
        raise ParameterError(f"unknown kernel {name!r}")
    try:
        return KERNELS[name](**spec.get("params", {}))
    except TypeError as e:
        raise ParameterError(f"kernel {name!r}: {e}")


# Nonlinearities

class Nonlinearity:
    """f in C(R; R) with f(x)/x -> slope_at_infinity as |x| -> inf"""

    name = "custom"
    slope_at_infinity = 1.0
    is_identity = False

    def __call__(self, x):
        raise NotImplementedError

    @property
    def linear_at_infinity(self):
        return self.slope_at_infinity == 1.0

    def checked(self, x):
        value = self(x)
        if not np.isfinite(value):
            raise NonlinearityError(self.name, x)
        return value

    def scaled(self, z, ell):
        """f(z e^ell) e^-ell, overridden where that overflows"""
        with np.errstate(over="ignore", invalid="ignore"):
            x = z * math.exp(ell) if ell < 700 else z * np.inf
            return self(x) * math.exp(-ell)

    @property
    def isimple(self):
        return {"name": self.name, "slope_at_infinity": self.slope_at_infinity}


class Identity(Nonlinearity):
    name = "identity"
    is_identity = True

    def __call__(self, x):
        return x

    def scaled(self, z, ell):
        return z


class Saturating(Nonlinearity):
    """x + x / (1 + |x|)"""

    name = "saturating"

    def __call__(self, x):
        return x + x / (1.0 + abs(x))

    def scaled(self, z, ell):
        if z == 0.0:
            return 0.0
        e = math.exp(-ell) if ell > -700 else math.inf
        if math.isinf(e):
            return self(z * math.exp(ell))
        return z + z * e / (e + abs(z))


class SquareRoot(Nonlinearity):
    """x + sign(x) sqrt|x|"""

    name = "sqrt"

    def __call__(self, x):
        return x + math.copysign(math.sqrt(abs(x)), x)

    def scaled(self, z, ell):
        return z + math.copysign(math.sqrt(abs(z)), z) * math.exp(-0.5 * ell)


class Solow(Nonlinearity):
    """(1 - delta) x + s g(x), g(x) = sign(x) sqrt|x|

    f(x)/x -> 1 - delta, flagged through ``slope_at_infinity``.
    """

    name = "solow"

    def __init__(self, delta=0.1, s=0.2):
        if not 0 < delta < 1 or not 0 < s < 1:
            raise ParameterError("solow nonlinearity needs delta, s in (0, 1)")
        self.delta = delta
        self.s = s
        self.slope_at_infinity = 1.0 - delta

    def __call__(self, x):
        return (1.0 - self.delta) * x + self.s * math.copysign(math.sqrt(abs(x)), x)

    def scaled(self, z, ell):
        return ((1.0 - self.delta) * z
                + self.s * math.copysign(math.sqrt(abs(z)), z) * math.exp(-0.5 * ell))

    @property
    def isimple(self):
        d = super().isimple
        d.update(delta=self.delta, s=self.s)
        return d


class Custom(Nonlinearity):

    def __init__(self, func, name="custom", slope_at_infinity=1.0):
        self.func = func
        self.name = name
        self.slope_at_infinity = slope_at_infinity

    def __call__(self, x):
        return self.func(x)


NONLINEARITIES = {
    "identity": Identity,
    "saturating": Saturating,
    "sqrt": SquareRoot,
    "solow": Solow,
}


def make_nonlinearity(spec):
    name = spec.get("name", "identity")
    if name not in NONLINEARITIES:
        raise ParameterError(f"unknown nonlinearity {name!r}")
    try:
        return NONLINEARITIES[name](**spec.get("params", {}))
    except TypeError as e:
        raise ParameterError(f"nonlinearity {name!r}: {e}")


# Deterministic growth sequences H1..H10

def _iterated_logs(m, depth):
    logs = []
    cur = np.asarray(m, dtype=float)
    for _ in range(depth):
        cur = np.log(cur)
        logs.append(cur)
    return logs


def _iterated_exp_one(depth):
    value = 1.0
    for _ in range(depth):
        value = math.exp(value)
    return value


def _log_h1(n, betas, offset):
    betas = list(betas)
    nonzero = [b for b in betas if b != 0]
    if nonzero and nonzero[0] < 0:
        raise ParameterError("the first non-zero beta must be positive")
    if offset is None:
        offset = math.ceil(_iterated_exp_one(len(betas) - 1)) + 1
    out = np.zeros(len(n))
    for beta, log_i in zip(betas, _iterated_logs(n + offset, len(betas))):
        if beta != 0:
            out += beta * np.log(log_i)
    return out


def _log_power(n, theta1, offset=0):
    with np.errstate(divide="ignore"):
        return theta1 * np.log(n + offset)


def _check_positive(**params):
    for key, value in params.items():
        if not value > 0:
            raise ParameterError(f"{key} must be positive, got {value!r}")


def _h1(n, betas=(1.0,), offset=None):
    return _log_h1(n, betas, offset)


def _h2(n, theta1=1.0, betas=(1.0,), offset=None):
    if offset is None:
        offset = math.ceil(_iterated_exp_one(len(betas) - 1)) + 1
    return _log_power(n, theta1, offset) + _log_h1(n, betas, offset)


def _h3(n, theta1=1.0, offset=0):
    _check_positive(theta1=theta1)
    return _log_power(n, theta1, offset)


def _h4(n, alpha=1.0, theta2=0.5):
    _check_positive(alpha=alpha)
    if not 0 < theta2 < 1:
        raise ParameterError("H4 needs theta2 in (0, 1)")
    return alpha * n ** theta2


def _h5(n, alpha=1.0, theta2=0.5, theta1=1.0, betas=(1.0,), offset=None):
    return _h4(n, alpha, theta2) + _h2(n, theta1, betas, offset)


def _h6(n, lam=0.5):
    if not 0 < lam < 1:
        raise ParameterError("H6 needs lam in (0, 1)")
    return -n * math.log(lam)


def _h7(n, lam=0.5, alpha=1.0, theta2=0.5, theta1=1.0, betas=(1.0,), offset=None):
    return _h6(n, lam) + _h4(n, alpha, theta2) + _h2(n, theta1, betas, offset)


def _h8(n, alpha=1.0, theta2=2.0):
    _check_positive(alpha=alpha)
    if not theta2 > 1:
        raise ParameterError("H8 needs theta2 > 1")
    return alpha * n ** theta2


def _h9(n):
    return gammaln(n + 1.0)


def _h10(n, j=2):
    if int(j) != j or j < 2:
        raise ParameterError("H10 needs an integer depth j >= 2")
    out = np.asarray(n, dtype=float)
    with np.errstate(over="ignore"):
        for _ in range(int(j) - 1):
            out = np.exp(out)
    return out


def _sqrt2log(n):
    """sqrt(2 log n), the envelope scale of Gaussian maxima; n >= 2"""
    with np.errstate(divide="ignore", invalid="ignore"):
        return 0.5 * np.log(2.0 * np.log(n))


GROWTH = {
    "H1": (_h1, lambda p: 1.0),
    "H2": (_h2, lambda p: 1.0),
    "H3": (_h3, lambda p: 1.0),
    "H4": (_h4, lambda p: 1.0),
    "H5": (_h5, lambda p: 1.0),
    "H6": (_h6, lambda p: p.get("lam", 0.5)),
    "H7": (_h7, lambda p: p.get("lam", 0.5)),
    "H8": (_h8, lambda p: 0.0),
    "H9": (_h9, lambda p: 0.0),
    "H10": (_h10, lambda p: 0.0),
    "sqrt2log": (_sqrt2log, lambda p: 1.0),
}


def growth_lambda(name, params=None):
    """Ratio limit lim g(n-1)/g(n) of a catalogue member"""
    if name not in GROWTH:
        raise ParameterError(f"unknown growth sequence {name!r}")
    return float(GROWTH[name][1](params or {}))


def growth_sequence(name, params, horizon, start=0):
    """Catalogue member on start..horizon as a positive LogTrajectory"""
    if name not in GROWTH:
        raise ParameterError(f"unknown growth sequence {name!r}")
    n = np.arange(start, horizon + 1, dtype=float)
    try:
        log_abs = GROWTH[name][0](n, **(params or {}))
    except TypeError as e:
        raise ParameterError(f"{name}: {e}")
    log_abs = np.asarray(log_abs, dtype=float)
    bad = np.isnan(log_abs) | (log_abs == np.inf)
    if bad.any():
        raise NonFiniteError(start + int(np.flatnonzero(bad)[0]), what=f"log {name}")
    return LogTrajectory.positive(start, log_abs)


def describe():
    """Catalogue listing printed by ``--list-catalogue``"""
    return {
        "kernels": {
            "zero": {},
            "single": {"c": "k(0)"},
            "finite": {"coefficients": "list", "tail_bound": "user bound on the discarded tail"},
            "geometric": {"scale": "k(0)", "ratio": "|ratio| < 1", "length": "stored entries"},
            "power": {"scale": "k(0)", "exponent": "> 1", "length": "stored entries"},
            "random": {"l1": "|k|_1", "length": "entries", "seed": "int", "nonnegative": "bool"},
        },
        "nonlinearities": {
            "identity": "x",
            "saturating": "x + x/(1+|x|)",
            "sqrt": "x + sign(x) sqrt|x|",
            "solow": "(1-delta) x + s sign(x) sqrt|x|, slope 1-delta at infinity",
        },
        "growth": {
            "H1": "prod_i log_i(n)^beta_i (lambda 1)",
            "H2": "n^theta1 H1 (lambda 1)",
            "H3": "n^theta1 (lambda 1)",
            "H4": "exp(alpha n^theta2), theta2 in (0,1) (lambda 1)",
            "H5": "H4 H2 (lambda 1)",
            "H6": "lam^-n (lambda lam)",
            "H7": "H6 H4 H2 (lambda lam)",
            "H8": "exp(alpha n^theta2), theta2 > 1 (lambda 0)",
            "H9": "n! (lambda 0)",
            "H10": "exp_j(n), j >= 2 (lambda 0)",
            "sqrt2log": "sqrt(2 log n) from n = 2 (lambda 1)",
        },
        "forcing": ["catalogue", "iid", "random_walk", "geometric_random_walk",
                    "modulated", "explicit"],
        "tails": ["normal", "symmetric_power", "weibull", "uniform", "degenerate"],
        "phi": ["power", "exp", "hinge"],
    }
