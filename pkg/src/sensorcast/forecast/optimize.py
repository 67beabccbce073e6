"""Derivative-free minimizers used by the model fitters.

Both routines are deterministic: no randomness, no environment-dependent
stopping rules.  The simplex search records the best objective value after
every iteration so callers can assert the descent property.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["SimplexResult", "nelder_mead", "golden_section"]


@dataclass(frozen=True)
class SimplexResult:
    x: np.ndarray
    fun: float
    trace: tuple[float, ...]
    n_evals: int


def nelder_mead(fn, x0, *, max_evals: int = 1000, xatol: float = 1e-8,
                fatol: float = 1e-10) -> SimplexResult:
    """Minimize ``fn`` from ``x0`` with the Nelder-Mead simplex method.

    Standard reflection / expansion / contraction / shrink steps with the
    usual coefficients (1, 2, 0.5, 0.5).  ``trace`` holds the best vertex
    value after each completed iteration and is non-increasing: no accepted
    step ever replaces the best vertex with a worse one.

    Returns the best vertex ever evaluated, so starting at a local optimum
    cannot end anywhere worse than the start.
    """
    x0 = np.asarray(x0, dtype=np.float64)
    n = len(x0)
    if n == 0:
        raise ValueError("nelder_mead needs at least one free parameter")

    # Initial simplex: perturb each coordinate by 10% of its size (absolute
    # floor keeps zero starts from collapsing the simplex).
    simplex = [x0]
    for i in range(n):
        v = x0.copy()
        v[i] += 0.1 * max(abs(v[i]), 0.25)
        simplex.append(v)
    simplex = np.array(simplex)
    fvals = np.array([fn(v) for v in simplex])
    n_evals = n + 1
    trace = [float(np.min(fvals))]

    while n_evals < max_evals:
        order = np.argsort(fvals, kind="stable")
        simplex = simplex[order]
        fvals = fvals[order]
        if (fvals[-1] - fvals[0] <= fatol
                and np.max(np.abs(simplex[1:] - simplex[0])) <= xatol):
            break

        centroid = simplex[:-1].mean(axis=0)
        reflected = centroid + (centroid - simplex[-1])
        f_r = fn(reflected)
        n_evals += 1

        if f_r < fvals[0]:
            expanded = centroid + 2.0 * (centroid - simplex[-1])
            f_e = fn(expanded)
            n_evals += 1
            if f_e < f_r:
                simplex[-1], fvals[-1] = expanded, f_e
            else:
                simplex[-1], fvals[-1] = reflected, f_r
        elif f_r < fvals[-2]:
            simplex[-1], fvals[-1] = reflected, f_r
        else:
            contracted = centroid + 0.5 * (simplex[-1] - centroid)
            f_c = fn(contracted)
            n_evals += 1
            if f_c < fvals[-1]:
                simplex[-1], fvals[-1] = contracted, f_c
            else:
                # Shrink towards the best vertex, which stays in place.
                for i in range(1, n + 1):
                    simplex[i] = simplex[0] + 0.5 * (simplex[i] - simplex[0])
                    fvals[i] = fn(simplex[i])
                n_evals += n
        trace.append(float(np.min(fvals)))

    best = int(np.argmin(fvals))
    return SimplexResult(x=simplex[best].copy(), fun=float(fvals[best]),
                         trace=tuple(trace), n_evals=n_evals)


def golden_section(fn, lo: float, hi: float, *, iters: int = 30) -> float:
    """Locate the minimizer of a unimodal ``fn`` on [lo, hi].

    Fixed iteration count keeps the bracket width at
    ``0.618**iters * (hi - lo)``; 30 iterations shrink the interval by ~1e-6.
    """
    if not (lo <= hi):
        raise ValueError(f"need lo <= hi, got [{lo}, {hi}]")
    if lo == hi or iters <= 0:
        return lo
    invphi = (np.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = fn(c), fn(d)
    for _ in range(iters):
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = fn(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = fn(d)
    return c if fc < fd else d
