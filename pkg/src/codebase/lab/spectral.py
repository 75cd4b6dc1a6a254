"""Resolvent summability and the multiplier constants

r is summable iff 1 - sum_l k(l) z^-(l+1) != 0 for |z| >= 1. For the
truncated kernel this is the statement that every root of

    p(z) = z^M - sum_{l<M} k(l) z^(M-1-l)

lies in the open unit disc.
"""

import logging
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np
from scipy.linalg import companion
from eva.conf import settings

from codebase.lab.core import resolvent
from codebase.lab.errors import ParameterError, SingularMultiplierError, SpectralError
from codebase.lab.types import Kernel, Trajectory

NEWTON_STEPS = 50
RETRIES = 3
RESIDUAL = 1e-12


@dataclass
class MultiplierEntry:
    lam: float
    kappa: float
    L: Optional[float]
    rho_star: Optional[float]
    rho_gap: Optional[float]

    @property
    def isimple(self):
        return {
            "lambda": self.lam,
            "kappa": self.kappa,
            "L": self.L,
            "rho_star": self.rho_star,
            "rho_gap": self.rho_gap,
        }


@dataclass
class SpectralReport:
    roots: np.ndarray
    max_modulus: float
    verdict: str  # summable / marginal / not-summable
    tail_mass: float = 0.0
    multipliers: List[MultiplierEntry] = field(default_factory=list)

    @property
    def summable(self):
        return self.verdict == "summable"

    @property
    def ifull(self):
        return {
            "roots": [[float(z.real), float(z.imag)] for z in self.roots],
            "max_modulus": self.max_modulus,
            "verdict": self.verdict,
            "summable": self.summable,
            "tail_mass": self.tail_mass,
            "multipliers": [m.isimple for m in self.multipliers],
        }


def characteristic_polynomial(kernel: Kernel):
    return np.concatenate(([1.0], -kernel.coefficients))


def _residual_ok(p, z, norm):
    scale = norm * max(1.0, abs(z)) ** (len(p) - 1)
    return abs(np.polyval(p, z)) <= RESIDUAL * scale


def _polish(p, dp, z, norm):
    for _ in range(NEWTON_STEPS):
        if _residual_ok(p, z, norm):
            return z, True
        d = np.polyval(dp, z)
        if d == 0:
            break
        z = z - np.polyval(p, z) / d
    return z, _residual_ok(p, z, norm)


def _roots(p):
    norm = float(np.sum(np.abs(p)))
    dp = np.polyder(p)
    try:
        roots = np.linalg.eigvals(companion(p)).astype(complex)
    except np.linalg.LinAlgError as e:
        raise SpectralError(f"companion eigenvalues failed: {e}")

    rng = np.random.default_rng(len(p))
    pending = list(range(len(roots)))
    for attempt in range(RETRIES + 1):
        failed = []
        for i in pending:
            start = roots[i]
            if attempt:
                start = start * (1 + 1e-6 * (rng.standard_normal() + 1j * rng.standard_normal()))
            z, ok = _polish(p, dp, start, norm)
            roots[i] = z
            if not ok:
                failed.append(i)
        if not failed:
            return roots
        logging.debug("root polishing retry %d for %d roots", attempt + 1, len(failed))
        pending = failed
    raise SpectralError(f"{len(pending)} roots did not converge after {RETRIES} retries")


def classify_modulus(max_modulus, tol_root=None):
    tol = float(settings.TOL_ROOT) if tol_root is None else tol_root
    if max_modulus < 1 - tol:
        return "summable"
    if max_modulus > 1 + tol:
        return "not-summable"
    return "marginal"


def characteristic_roots(kernel: Kernel, lambdas=(), horizon=2000, tol_root=None):
    """Roots, summability verdict and multipliers over a lambda grid"""
    if kernel.size == 0:
        roots = np.zeros(0, dtype=complex)
        max_modulus = 0.0
    else:
        roots = _roots(characteristic_polynomial(kernel))
        max_modulus = float(np.max(np.abs(roots)))
    report = SpectralReport(roots, max_modulus, classify_modulus(max_modulus, tol_root),
                            tail_mass=kernel.tail_bound)
    for lam in lambdas:
        kappa = kernel.kappa(lam)
        try:
            mult = multiplier_L(kernel, lam, summable=report.summable)
        except SingularMultiplierError:
            report.multipliers.append(MultiplierEntry(lam, kappa, None, None, None))
            continue
        rho_star, gap = None, None
        if report.summable:
            rho = rho_of_lambda(kernel, lam, horizon)
            rho_star, gap = rho.partial_sums.values[-1], rho.gap
        report.multipliers.append(MultiplierEntry(lam, kappa, mult, rho_star, gap))
    return report


def multiplier_L(kernel: Kernel, lam: float, summable=None):
    """L = 1 / (1 - sum_l k(l) lam^(l+1))

    ``summable`` skips the root computation when the verdict is known; a
    non-summable kernel still gets a value, with a warning.
    """
    if not 0.0 <= lam <= 1.0:
        raise ParameterError(f"lambda must lie in [0, 1], got {lam!r}")
    if summable is None:
        summable = characteristic_roots(kernel).summable
    if not summable:
        logging.warning("kernel %s is not summable, the multiplier limit does not apply",
                        kernel.name)
    denom = 1.0 - kernel.kappa(lam)
    if abs(denom) <= float(settings.TOL_SINGULAR):
        raise SingularMultiplierError(
            f"1 - kappa({lam:g}) = {denom:g}; inconsistent with a summable resolvent")
    return 1.0 / denom


@dataclass
class RhoResult:
    partial_sums: Trajectory
    limit: float
    gap: float
    tolerance: float

    @property
    def within_tolerance(self):
        return self.gap < self.tolerance


def rho_of_lambda(kernel: Kernel, lam: float, horizon: int, tol=1e-10):
    """Partial sums of sum_j r(j) lam^j against the closed form"""
    limit = multiplier_L(kernel, lam, summable=True)
    r = resolvent(kernel, horizon).values
    weighted = r * float(lam) ** np.arange(horizon + 1)
    partial = np.cumsum(weighted)
    return RhoResult(Trajectory(0, partial), limit, float(abs(partial[-1] - limit)), tol)
