"""Limited-memory quasi-Newton minimizer with a strong Wolfe line search.

Written in-house rather than wrapping a library minimizer so the contract is
exact: bit-deterministic iterates, monotone decrease, a gradient sup-norm
stopping rule, and a report that distinguishes convergence from budget
exhaustion. Dual-variable matrices are flattened column-major (z-major) for
the curvature-pair arithmetic; the mapping is fixed for reproducibility.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import NumericalError

STAGNATION_STEP = 1e-10


@dataclass(frozen=True)
class SolverConfig:
    max_iterations: int = 500
    gradient_tolerance: float = 1e-8
    memory_pairs: int = 10
    c1: float = 1e-4
    c2: float = 0.9
    max_line_search_steps: int = 40

    def __post_init__(self):
        if not (0 < self.c1 < self.c2 < 1):
            raise ValueError("need 0 < c1 < c2 < 1")
        if self.max_iterations < 0 or self.memory_pairs < 1:
            raise ValueError("counts must be positive")


@dataclass
class SolveReport:
    iterations: int
    final_gradient_norm: float
    converged: bool
    penalty_residual: float = 0.0
    optimizer_sup_norm: float = 0.0


def _cubic_interpolate(a, fa, ga, b, fb, gb):
    # minimizer of the cubic through (a, fa, ga), (b, fb, gb); midpoint fallback
    d1 = ga + gb - 3.0 * (fa - fb) / (a - b)
    disc = d1 * d1 - ga * gb
    if disc < 0.0:
        return 0.5 * (a + b)
    d2 = np.sqrt(disc)
    if a > b:
        d2 = -d2
    t = b - (b - a) * (gb + d2 - d1) / (gb - ga + 2.0 * d2)
    lo, hi = min(a, b), max(a, b)
    if not (lo < t < hi) or not np.isfinite(t):
        return 0.5 * (a + b)
    return t


def _line_search(phi, phi0, dphi0, cfg: SolverConfig, alpha0: float):
    """Strong Wolfe line search (bracket then zoom). Returns (alpha, f, g) or None."""
    c1, c2 = cfg.c1, cfg.c2
    alpha_prev, f_prev, g_prev = 0.0, phi0, dphi0
    alpha = alpha0
    bracket = None
    for _ in range(cfg.max_line_search_steps):
        f, g = phi(alpha)
        if f > phi0 + c1 * alpha * dphi0 or f >= f_prev and alpha_prev > 0.0:
            bracket = (alpha_prev, f_prev, g_prev, alpha, f, g)
            break
        if abs(g) <= -c2 * dphi0:
            return alpha, f, g
        if g >= 0.0:
            bracket = (alpha, f, g, alpha_prev, f_prev, g_prev)
            break
        alpha_prev, f_prev, g_prev = alpha, f, g
        alpha *= 2.0
    if bracket is None:
        # bracket budget exhausted while still descending: take the last
        # point that passed the sufficient-decrease test
        if alpha_prev > 0.0 and f_prev < phi0:
            return alpha_prev, f_prev, g_prev
        return None

    lo, f_lo, g_lo, hi, f_hi, g_hi = bracket

    def best_decrease():
        # zoom invariant: lo satisfies sufficient decrease with the lowest f
        if lo > 0.0 and f_lo < phi0:
            return lo, f_lo, g_lo
        return None

    for _ in range(cfg.max_line_search_steps):
        alpha = _cubic_interpolate(lo, f_lo, g_lo, hi, f_hi, g_hi)
        if abs(hi - lo) < STAGNATION_STEP:
            # near-kink curvature: settle for the best decreasing point so the
            # outer iteration can keep making progress
            return best_decrease()
        f, g = phi(alpha)
        if f > phi0 + c1 * alpha * dphi0 or f >= f_lo:
            hi, f_hi, g_hi = alpha, f, g
        else:
            if abs(g) <= -c2 * dphi0:
                return alpha, f, g
            if g * (hi - lo) >= 0.0:
                hi, f_hi, g_hi = lo, f_lo, g_lo
            lo, f_lo, g_lo = alpha, f, g
    return best_decrease()


def minimize(
    value_fn: Callable[[np.ndarray], float],
    grad_fn: Callable[[np.ndarray], np.ndarray],
    a0: np.ndarray,
    cfg: SolverConfig | None = None,
) -> tuple[np.ndarray, SolveReport]:
    """Minimize a smooth function of an ndarray from ``a0``.

    Returns the best iterate and a report. ``converged`` reflects the gradient
    sup-norm test at the returned point; line-search stagnation or an
    exhausted iteration budget leave it False when the test fails.
    """
    cfg = cfg or SolverConfig()
    shape = np.asarray(a0).shape

    def f(x):
        v = value_fn(x.reshape(shape, order="F"))
        if not np.isfinite(v):
            raise NumericalError("non-finite objective value", last_iterate=x.reshape(shape, order="F"))
        return float(v)

    def df(x):
        g = np.asarray(grad_fn(x.reshape(shape, order="F")), dtype=np.float64)
        if not np.all(np.isfinite(g)):
            raise NumericalError("non-finite gradient", last_iterate=x.reshape(shape, order="F"))
        return g.ravel(order="F")

    x = np.asarray(a0, dtype=np.float64).ravel(order="F").copy()
    if not np.all(np.isfinite(x)):
        raise ValueError("starting point must be finite")

    fx = f(x)
    g = df(x)
    s_hist: list[np.ndarray] = []
    y_hist: list[np.ndarray] = []
    rho_hist: list[float] = []

    iterations = 0
    for k in range(cfg.max_iterations):
        gnorm = np.max(np.abs(g)) if g.size else 0.0
        if gnorm <= cfg.gradient_tolerance:
            break

        # two-loop recursion
        q = g.copy()
        alphas = []
        for s, y, rho in zip(reversed(s_hist), reversed(y_hist), reversed(rho_hist)):
            a_i = rho * (s @ q)
            alphas.append(a_i)
            q -= a_i * y
        if y_hist:
            gamma = (s_hist[-1] @ y_hist[-1]) / (y_hist[-1] @ y_hist[-1])
            q *= gamma
        for s, y, rho, a_i in zip(s_hist, y_hist, rho_hist, reversed(alphas)):
            b_i = rho * (y @ q)
            q += (a_i - b_i) * s
        d = -q

        dphi0 = float(g @ d)
        if dphi0 >= 0.0:  # not a descent direction; reset memory
            d = -g
            dphi0 = float(g @ d)
            s_hist.clear()
            y_hist.clear()
            rho_hist.clear()

        def phi(alpha, _x=x, _d=d):
            xa = _x + alpha * _d
            return f(xa), float(df(xa) @ _d)

        alpha0 = 1.0 if y_hist else min(1.0, 1.0 / max(np.max(np.abs(g)), 1e-12))
        hit = _line_search(phi, fx, dphi0, cfg, alpha0)
        if hit is None:
            break  # stagnation: keep current iterate
        alpha, f_new, _ = hit

        x_new = x + alpha * d
        g_new = df(x_new)
        s = x_new - x
        y = g_new - g
        sy = float(s @ y)
        if sy > 1e-12 * float(np.sqrt((s @ s) * (y @ y)) + 1e-300):
            s_hist.append(s)
            y_hist.append(y)
            rho_hist.append(1.0 / sy)
            if len(s_hist) > cfg.memory_pairs:
                s_hist.pop(0)
                y_hist.pop(0)
                rho_hist.pop(0)

        x, fx, g = x_new, f_new, g_new
        iterations = k + 1

    gnorm = float(np.max(np.abs(g))) if g.size else 0.0
    a = x.reshape(shape, order="F")
    report = SolveReport(
        iterations=iterations,
        final_gradient_norm=gnorm,
        converged=gnorm <= cfg.gradient_tolerance,
        optimizer_sup_norm=float(np.max(np.abs(a))) if a.size else 0.0,
    )
    return a, report
