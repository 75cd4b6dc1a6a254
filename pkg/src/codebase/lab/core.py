"""Finite-horizon solvers of the convolution Volterra summation equation

    x(n+1) = sum_{j=0}^{n} k(n-j) x(j) + H(n+1),   x(0) = xi

Both solvers evaluate the convolution directly; the recursion is the
direct-form IIR filter ``lfilter([1], [1, -k(0), ..., -k(M-1)])`` fed
with (xi, H(1), H(2), ...), the representation convolves the resolvent
with H.
"""

import logging

import numpy as np
from scipy.signal import lfilter
from eva.conf import settings

from codebase.lab.errors import InputError, NonFiniteError, NonlinearityError
from codebase.lab.types import (
    Kernel,
    LogTrajectory,
    Trajectory,
    as_linear,
    as_log,
)


def _check_horizon(horizon, minimum=1):
    if int(horizon) != horizon or horizon < minimum:
        raise InputError(f"horizon must be an integer >= {minimum}, got {horizon!r}")
    return int(horizon)


def _forcing_window(forcing, horizon):
    """H(1..horizon); H(0), if present, is dropped"""
    if forcing.start > 1 or forcing.end < horizon:
        raise InputError(
            f"forcing defined on [{forcing.start}, {forcing.end}] "
            f"but indices 1..{horizon} are required")
    if forcing.start == 0:
        first = as_log(forcing.window(0, 0))
        if first.sign[0] != 0:
            logging.warning("forcing value at index 0 is ignored, "
                            "the equation consumes H from index 1")
    return forcing.window(1, horizon)


def _use_log_domain(forcing, log_domain):
    if log_domain is None:
        return isinstance(forcing, LogTrajectory) or settings.LOG_DOMAIN == "true"
    return bool(log_domain)


def _checked(values, what="value"):
    bad = ~np.isfinite(values)
    if bad.any():
        raise NonFiniteError(int(np.flatnonzero(bad)[0]), what=what)
    return Trajectory(0, values)


def _recursion_filter(kernel):
    return np.concatenate(([1.0], -kernel.coefficients))


def solve_linear(kernel: Kernel, forcing, xi: float, horizon: int, log_domain=None):
    """Solve the linear equation on 0..horizon

    Returns a ``Trajectory``; with ``log_domain`` (or a ``LogTrajectory``
    forcing) the solve runs in sign/log-magnitude form and returns a
    ``LogTrajectory``.
    """
    horizon = _check_horizon(horizon)
    h = _forcing_window(forcing, horizon)
    if _use_log_domain(forcing, log_domain):
        return _solve_scaled(kernel, as_log(h), float(xi), horizon)

    u = np.empty(horizon + 1)
    u[0] = xi
    u[1:] = as_linear(h).values
    with np.errstate(over="ignore", invalid="ignore"):
        x = lfilter([1.0], _recursion_filter(kernel), u)
    return _checked(x)


def resolvent(kernel: Kernel, horizon: int):
    """r(0) = 1, r(n+1) = sum_{j<=n} k(n-j) r(j) on 0..horizon"""
    horizon = _check_horizon(horizon, minimum=0)
    impulse = np.zeros(horizon + 1)
    impulse[0] = 1.0
    with np.errstate(over="ignore", invalid="ignore"):
        r = lfilter([1.0], _recursion_filter(kernel), impulse)
    return _checked(r)


def solve_by_representation(kernel: Kernel, forcing, xi: float, horizon: int):
    """x(n) = r(n) xi + sum_{j=1}^{n} r(n-j) H(j)"""
    horizon = _check_horizon(horizon)
    h = as_linear(_forcing_window(forcing, horizon)).padded_from_zero(horizon + 1)
    r = resolvent(kernel, horizon).values
    with np.errstate(over="ignore", invalid="ignore"):
        x = xi * r + np.convolve(r, h)[:horizon + 1]
    return _checked(x)


def recover_forcing(kernel: Kernel, solution: Trajectory):
    """H(n+1) = x(n+1) - sum_{j<=n} k(n-j) x(j), returned on 1..end"""
    if solution.start != 0:
        raise InputError("solution must be defined from index 0")
    if len(solution) < 2:
        raise InputError("solution must extend past index 0")
    with np.errstate(over="ignore", invalid="ignore"):
        h = lfilter(_recursion_filter(kernel), [1.0], solution.values)
    bad = ~np.isfinite(h)
    if bad.any():
        raise NonFiniteError(int(np.flatnonzero(bad)[0]))
    return Trajectory(1, h[1:])


def solve_nonlinear(kernel: Kernel, f, forcing, xi: float, horizon: int, log_domain=None):
    """x(n+1) = H(n+1) + sum_{j<=n} k(n-j) f(x(j))"""
    if f.is_identity:
        return solve_linear(kernel, forcing, xi, horizon, log_domain=log_domain)

    horizon = _check_horizon(horizon)
    h = _forcing_window(forcing, horizon)
    if _use_log_domain(forcing, log_domain):
        return _solve_scaled(kernel, as_log(h), float(xi), horizon, f=f)

    h = as_linear(h).values
    k_rev = kernel.coefficients[::-1]
    m = kernel.size
    x = np.empty(horizon + 1)
    fx = np.empty(horizon + 1)
    x[0] = xi
    for n in range(horizon):
        fx[n] = f.checked(x[n])
        lo = max(0, n + 1 - m)
        x[n + 1] = np.dot(k_rev[m - (n + 1 - lo):], fx[lo:n + 1]) + h[n]
        if not np.isfinite(x[n + 1]):
            raise NonFiniteError(n + 1)
    return Trajectory(0, x)


def _solve_scaled(kernel, h_log, xi, horizon, f=None):
    """Recursion carried as x(n) = z(n) * exp(ell(n)) with |z| <= 1

    ``ell`` is non-decreasing: it follows the running maximum of |H| and is
    bumped whenever the new value would leave the unit interval, so every
    weight exp(ell(j) - ell(n+1)) stays in (0, 1].
    """
    m = kernel.size
    k_rev = kernel.coefficients[::-1]
    z = np.zeros(horizon + 1)
    ell = np.zeros(horizon + 1)
    if xi != 0.0:
        ell[0] = np.log(abs(xi))
        z[0] = np.sign(xi)
    fz = np.zeros(horizon + 1)

    for n in range(horizon):
        if f is None:
            fz[n] = z[n]
        else:
            fz[n] = f.scaled(z[n], ell[n])
            if not np.isfinite(fz[n]):
                raise NonlinearityError(f.name, f"sign {z[n]:+g} * exp({ell[n]:g})")
        log_h = h_log.log_abs[n]
        ref = max(ell[n], log_h)
        lo = max(0, n + 1 - m)
        weights = np.exp(ell[lo:n + 1] - ref)
        s = np.dot(k_rev[m - (n + 1 - lo):], fz[lo:n + 1] * weights)
        if h_log.sign[n] != 0:
            s += h_log.sign[n] * np.exp(log_h - ref)
        if not np.isfinite(s):
            raise NonFiniteError(n + 1)
        if abs(s) > 1.0:
            ref += np.log(abs(s))
            s = np.sign(s)
        z[n + 1] = s
        ell[n + 1] = ref

    with np.errstate(divide="ignore"):
        log_abs = np.log(np.abs(z)) + ell
    return LogTrajectory(0, log_abs, np.sign(z))


def solve_detrended(kernel: Kernel, forcing_over_a, xi_over_a: float, lam: float, horizon=None):
    """z = x / a for an exactly geometric scale a(n) = lam^(-n)

    z solves the same equation with kernel k(l) lam^(l+1) and forcing H/a,
    so the scaled solution is available where a itself overflows.
    """
    if not 0.0 < lam <= 1.0:
        raise InputError("detrending needs a geometric ratio lam in (0, 1]")
    horizon = forcing_over_a.end if horizon is None else horizon
    weights = lam ** np.arange(1, kernel.size + 1)
    detrended = Kernel(kernel.coefficients * weights, kernel.tail_bound, name=f"{kernel.name}@{lam:g}")
    return solve_linear(detrended, forcing_over_a, xi_over_a, horizon, log_domain=False)


def relative_gap(x, y, floor=1e-2):
    """max_n |x(n) - y(n)| / max(|y(n)|, floor * max|y|)

    Entries below ``floor`` times the peak of |y| are measured against that
    level instead of themselves; ``floor=0`` gives the pointwise relative
    gap (zeros of y then count absolutely).
    """
    x = np.asarray(getattr(x, "values", x), dtype=float)
    y = np.asarray(getattr(y, "values", y), dtype=float)
    if x.shape != y.shape:
        raise InputError("sequences must have the same length")
    scale = np.max(np.abs(y)) if len(y) else 0.0
    denom = np.maximum(np.abs(y), floor * scale)
    denom = np.where(denom == 0.0, 1.0, denom)
    return float(np.max(np.abs(x - y) / denom)) if len(y) else 0.0
