"""Deterministic Volterra machinery.

Solves, on a time grid, equations of the form

    v(t) = f(t) + sum_l ( int_I h_l(t - s) (off_l + v(s))^(p * gamma) ds )^(1/p)

where each ``h_l`` is a positive, spatially integrated convolution profile.
This is the scalar reduction of the space-time equation for spatially
homogeneous data; kernels enter through their exact window integrals, so the
singular short-lag behaviour of the heat family is handled analytically.

The module provides the contraction-partition search that certifies Picard
convergence, the Picard solver with a summable-tail stopping rule, a
comparison (domination) check, the closed-form exponential-kernel solution
family, the strictly positive root of ``a - F - theta a^gamma = 0`` used for
fractional-growth bounds, and the construction of moment-bound problems from
a model specification.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence, Tuple, Union

import numpy as np
from scipy import integrate, optimize

from .kernels import Kernel, KernelNorm

INF = float("inf")


class ContractionFailure(RuntimeError):
    """No partition with contraction number < 1 exists (or was found)."""

    def __init__(self, message: str, irreducible_mass: float = float("nan"), best_rho: float = float("nan")):
        super().__init__(message)
        self.irreducible_mass = irreducible_mass
        self.best_rho = best_rho


class PicardDivergence(RuntimeError):
    """Picard iteration failed to meet the tolerance."""

    def __init__(self, message: str, residual: float, trace: "PicardTrace"):
        super().__init__(message)
        self.residual = residual
        self.trace = trace


# ---------------------------------------------------------------------------
# Problem data
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class VolterraTerm:
    """One positive kernel term of the right-hand side.

    The time profile is ``weight * [kernel spatial integral of g^power]
    * exp(-eta tau)``, or ``weight * profile(tau) * exp(-eta tau)`` for a
    custom profile.  ``offset`` shifts the unknown inside the integrand.
    """

    kernel: Optional[Kernel] = None
    power: float = 1.0
    weight: float = 1.0
    eta: float = 0.0
    offset: float = 0.0
    profile: Optional[Callable[[np.ndarray], np.ndarray]] = None

    def time_profile(self, tau):
        tau = np.asarray(tau, dtype=float)
        if self.kernel is not None:
            base = self.kernel.spatial_lp(tau, self.power)
        else:
            base = self.profile(tau)
        return self.weight * np.asarray(base) * np.exp(-self.eta * tau)

    def window(self, lo: float, hi: float) -> float:
        """``int_lo^hi`` of the time profile."""
        if self.weight == 0.0 or hi <= lo:
            return 0.0
        if self.kernel is not None:
            return self.weight * self.kernel.window_lp(self.power, lo, hi, eta=self.eta)
        return self._profile_quad(lo, hi, moment=0)

    def window_first_moment(self, lo: float, hi: float) -> float:
        """``int_lo^hi tau *`` time profile."""
        if self.weight == 0.0 or hi <= lo:
            return 0.0
        if self.kernel is not None:
            return self.weight * self.kernel.window_lp_first_moment(self.power, lo, hi, eta=self.eta)
        return self._profile_quad(lo, hi, moment=1)

    def _profile_quad(self, lo: float, hi: float, moment: int) -> float:
        def f(t: float) -> float:
            return t**moment * float(self.time_profile(t))

        if hi == INF:
            # t = lo + (u/(1-u))^2 maps (0,1) onto (lo, inf)
            val, _ = integrate.quad(
                lambda u: f(lo + (u / (1 - u)) ** 2) * 2 * u / (1 - u) ** 3, 0.0, 1.0, limit=200
            )
            return val
        if lo == 0.0:
            # t = u^2 tames algebraic endpoint singularities of the profile
            val, _ = integrate.quad(lambda u: f(u * u) * 2 * u, 0.0, math.sqrt(hi), limit=200)
            return val
        val, _ = integrate.quad(f, lo, hi, limit=200)
        return val

    def total_mass(self) -> float:
        return self.window(0.0, INF)


ForceLike = Union[float, Callable[[np.ndarray], np.ndarray]]


@dataclass(frozen=True, eq=False)
class VolterraProblem:
    """Volterra equation data on ``(t_start, t_end]`` (``t_start=None``: half-line)."""

    terms: Tuple[VolterraTerm, ...]
    force: ForceLike
    t_end: float
    t_start: Optional[float] = 0.0
    p: float = 1.0
    gamma: float = 1.0

    def __post_init__(self):
        if self.p < 1.0:
            raise ValueError("outer exponent p must be >= 1")
        if not 0.0 < self.gamma <= 1.0:
            raise ValueError("growth gamma must lie in (0, 1]")
        if self.t_start is not None and self.t_start >= self.t_end:
            raise ValueError("empty time interval")

    def force_values(self, times: np.ndarray) -> np.ndarray:
        if callable(self.force):
            return np.asarray(self.force(np.asarray(times, dtype=float)), dtype=float)
        return np.full(np.shape(times), float(self.force))

    @property
    def span(self) -> float:
        return INF if self.t_start is None else self.t_end - self.t_start


@dataclass(frozen=True, eq=False)
class Field:
    """Gridded scalar field over time (x space), stored in weighted units."""

    times: np.ndarray
    values: np.ndarray  # shape (nt,) or (nt, nx)
    space: Optional[np.ndarray] = None
    eta: float = 0.0

    def sup(self) -> float:
        return float(np.max(np.abs(self.values)))

    def at_time(self, t: float) -> np.ndarray:
        i = int(np.argmin(np.abs(self.times - t)))
        return self.values[i]

    def to_csv(self, path) -> None:
        with open(path, "w") as fh:
            if self.values.ndim == 1:
                fh.write("t,value\n")
                for t, v in zip(self.times, self.values):
                    fh.write(f"{float(t)!r},{float(v)!r}\n")
            else:
                fh.write("t,x,value\n")
                for i, t in enumerate(self.times):
                    for j, x in enumerate(self.space):
                        fh.write(f"{float(t)!r},{float(x)!r},{float(self.values[i, j])!r}\n")


@dataclass(frozen=True)
class Partition:
    """Breakpoints of the time interval with per-interval contraction numbers."""

    breakpoints: Tuple[float, ...]  # first entry may be -inf
    interval_rhos: Tuple[float, ...]
    rho: float

    @property
    def k(self) -> int:
        return len(self.interval_rhos)


@dataclass
class PicardTrace:
    sup_differences: list = field(default_factory=list)
    tail_bounds: list = field(default_factory=list)
    converged: bool = False
    iterations: int = 0
    rho: float = float("nan")

    def to_csv(self, path) -> None:
        with open(path, "w") as fh:
            fh.write("iteration,sup_difference,tail_bound\n")
            for i, (d, b) in enumerate(zip(self.sup_differences, self.tail_bounds), start=1):
                fh.write(f"{i},{float(d)!r},{float(b)!r}\n")


# ---------------------------------------------------------------------------
# Contraction partitions
# ---------------------------------------------------------------------------


def _window_sup(problem: VolterraProblem, length: float, max_offset: float) -> float:
    """Sup over lag offsets of ``sum_l window_l(o, o + length)^(1/p)``.

    For convolution kernels the sup over space-time points of a partition
    interval's contribution reduces to a one-dimensional search over the lag
    offset of a window of the given length.
    """
    p = problem.p

    def value(o: float) -> float:
        return sum(t.window(o, o + length) ** (1.0 / p) for t in problem.terms)

    if length == INF or max_offset <= 0.0:
        return value(0.0)
    grid = np.linspace(0.0, max_offset, 33)
    vals = [value(o) for o in grid]
    best = int(np.argmax(vals))
    lo = grid[max(0, best - 1)]
    hi = grid[min(len(grid) - 1, best + 1)]
    res = optimize.minimize_scalar(lambda o: -value(o), bounds=(lo, hi), method="bounded")
    return max(max(vals), -res.fun)


def partition_rho(problem: VolterraProblem, breakpoints: Sequence[float]) -> Partition:
    """Contraction numbers of a partition given by its breakpoints.

    Breakpoints must cover the problem interval (first may be ``-inf``).
    The returned ``rho`` is the sup over evaluation points and intervals of
    ``sum_l (int_{I_j} ...)^(1/p)``.
    """
    bps = [(-INF if b == -INF else float(b)) for b in breakpoints]
    if len(bps) < 2:
        raise ValueError("need at least two breakpoints")
    lo_req = -INF if problem.t_start is None else problem.t_start
    if bps[0] > lo_req or bps[-1] < problem.t_end:
        raise ValueError("partition does not cover the problem interval")
    rhos = []
    for a, b in zip(bps[:-1], bps[1:]):
        length = INF if a == -INF else b - a
        max_offset = 0.0 if bps[-1] == b else bps[-1] - b
        rhos.append(_window_sup(problem, length, max_offset))
    rhos = [float(r) for r in rhos]
    return Partition(breakpoints=tuple(bps), interval_rhos=tuple(rhos), rho=max(rhos))


def find_contraction_partition(problem: VolterraProblem, max_intervals: int = 1 << 16) -> Partition:
    """Search for a partition with contraction number < 1.

    On the half-line the unbounded first interval contributes the full
    kernel mass, which is irreducible: if ``sum_l (total mass)^(1/p) >= 1``
    the search fails immediately and the failure carries that mass.  For
    finite horizons, uniform subdivisions with a doubling interval count are
    tried up to ``max_intervals``.
    """
    irreducible = float(sum(t.total_mass() ** (1.0 / problem.p) for t in problem.terms))
    if problem.t_start is None:
        if irreducible >= 1.0:
            raise ContractionFailure(
                f"half-line kernel mass {irreducible:.6g} >= 1 blocks contraction",
                irreducible_mass=irreducible,
            )
        return Partition(breakpoints=(-INF, problem.t_end), interval_rhos=(float(irreducible),), rho=float(irreducible))
    k = 1
    best = INF
    while k <= max_intervals:
        bps = np.linspace(problem.t_start, problem.t_end, k + 1)
        part = partition_rho(problem, bps)
        if part.rho < 1.0:
            return part
        best = min(best, part.rho)
        k *= 2
    raise ContractionFailure(
        f"no contraction partition with up to {max_intervals} intervals (best rho {best:.6g})",
        best_rho=best,
    )


# ---------------------------------------------------------------------------
# Product-integration weights and the Picard solver
# ---------------------------------------------------------------------------


def _product_weights(term: VolterraTerm, n: int, delta: float):
    """Convolution coefficients of exact product integration on a uniform grid.

    Interprets the integrand factor as piecewise linear between the nodes and
    integrates the kernel profile exactly over every lag window, so the
    short-lag singularity of heat-type profiles carries no quadrature error.
    Returns ``(c, d)`` with ``I_i = (u * c)_i - u_0 d_i`` for ``i >= 1``.
    """
    lag_edges = delta * np.arange(n + 2)
    A = np.array([term.window(lag_edges[j], lag_edges[j + 1]) for j in range(n + 1)])
    FM = np.array([term.window_first_moment(lag_edges[j], lag_edges[j + 1]) for j in range(n + 1)])
    B = (FM - lag_edges[:-1] * A) / delta
    c = np.empty(n + 1)
    c[0] = A[0] - B[0]
    c[1:] = (A[1:] - B[1:]) + B[:-1]
    d = A - B
    return c, d


def _uniform_delta(times: np.ndarray) -> float:
    diffs = np.diff(times)
    if diffs.size == 0 or np.any(diffs <= 0):
        raise ValueError("grid times must be strictly increasing")
    if np.max(np.abs(diffs - diffs[0])) > 1e-9 * diffs[0]:
        raise ValueError("the Picard solver requires a uniform time grid")
    return float(diffs[0])


def _convolve(u: np.ndarray, c: np.ndarray) -> np.ndarray:
    if u.size > 512:
        from scipy.signal import fftconvolve

        return fftconvolve(u, c)[: u.size]
    return np.convolve(u, c)[: u.size]


def picard_solve(
    problem: VolterraProblem,
    grid: Optional[np.ndarray] = None,
    tol: float = 1e-8,
    max_iter: int = 400,
    partition: Optional[Partition] = None,
) -> Tuple[Field, PicardTrace]:
    """Fixed point of ``v = f + sum_l ||(off_l + v)^gamma||_{h_l, p}`` on a grid.

    For ``gamma = 1`` a contraction partition is required (searched for when
    not supplied) and the stopping rule combines the successive-difference
    sup norm with the geometric tail bound implied by the partition; for
    ``gamma < 1`` the iteration is monotone from ``v = f`` and stops on the
    sup difference alone.

    Half-line problems are solved through their stationary reduction, which
    requires a constant force; history outside any reporting grid then enters
    through the exact total kernel masses rather than a truncation.
    """
    trace = PicardTrace()
    if problem.gamma == 1.0:
        part = partition or find_contraction_partition(problem)
        if part.rho >= 1.0:
            raise ContractionFailure(f"supplied partition has rho {part.rho:.6g} >= 1", best_rho=part.rho)
        trace.rho = part.rho
    else:
        part = None

    if problem.t_start is None:
        return _solve_half_line(problem, grid, tol, max_iter, trace)

    times = np.asarray(grid, dtype=float)
    delta = _uniform_delta(times)
    if abs(times[0] - problem.t_start) > 1e-9 or times[-1] < problem.t_end - 1e-9:
        raise ValueError("grid must start at t_start and reach t_end")
    n = times.size - 1
    f = problem.force_values(times)
    weights = [_product_weights(t, n, delta) for t in problem.terms]

    inner = problem.p * problem.gamma
    v = f.copy()
    for it in range(1, max_iter + 1):
        new = f.copy()
        for term, (c, d) in zip(problem.terms, weights):
            u = np.abs(term.offset + v) ** inner
            I = _convolve(u, c)[: n + 1] - u[0] * d
            I[0] = 0.0
            new = new + np.clip(I, 0.0, None) ** (1.0 / problem.p)
        diff = float(np.max(np.abs(new - v)))
        v = new
        _record(trace, diff)
        if _converged(trace, tol, problem.gamma):
            trace.converged = True
            trace.iterations = it
            return Field(times=times, values=v), trace
    raise PicardDivergence(
        f"no convergence after {max_iter} iterations (residual {trace.sup_differences[-1]:.3g})",
        residual=trace.sup_differences[-1],
        trace=trace,
    )


def _record(trace: PicardTrace, diff: float) -> None:
    trace.sup_differences.append(diff)
    # geometric tail estimate from the observed contraction ratio
    if len(trace.sup_differences) >= 2 and trace.sup_differences[-2] > 0:
        r = diff / trace.sup_differences[-2]
        tail = diff * r / (1.0 - r) if r < 1.0 else INF
    else:
        tail = INF
    if not math.isnan(trace.rho) and trace.rho < 1.0:
        tail = min(tail, diff * trace.rho / (1.0 - trace.rho)) if tail < INF else diff * trace.rho / (1.0 - trace.rho)
    trace.tail_bounds.append(tail)


def _converged(trace: PicardTrace, tol: float, gamma: float) -> bool:
    if not trace.sup_differences:
        return False
    diff = trace.sup_differences[-1]
    if gamma < 1.0:
        return diff < tol
    return diff < tol and trace.tail_bounds[-1] < tol


def _solve_half_line(problem, grid, tol, max_iter, trace) -> Tuple[Field, PicardTrace]:
    if callable(problem.force):
        raise ValueError("half-line problems require a constant force (work in weighted units)")
    f = float(problem.force)
    masses = [t.total_mass() for t in problem.terms]
    inner = problem.p * problem.gamma
    v = f
    for it in range(1, max_iter + 1):
        new = f + sum(
            (m * abs(t.offset + v) ** inner) ** (1.0 / problem.p) for m, t in zip(masses, problem.terms)
        )
        diff = abs(new - v)
        v = new
        _record(trace, diff)
        if _converged(trace, tol, problem.gamma):
            trace.converged = True
            trace.iterations = it
            times = np.asarray(grid, dtype=float) if grid is not None else np.array([problem.t_end])
            return Field(times=times, values=np.full(times.shape, v)), trace
    raise PicardDivergence(
        f"no convergence after {max_iter} iterations (residual {trace.sup_differences[-1]:.3g})",
        residual=trace.sup_differences[-1],
        trace=trace,
    )


# ---------------------------------------------------------------------------
# Comparison bound
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ComparisonVerdict:
    passed: bool
    max_violation: float
    at_time: float


def comparison_bound(
    problem: VolterraProblem,
    candidate: Field,
    tol: float = 1e-8,
    slack: float = 0.0,
) -> ComparisonVerdict:
    """Check ``candidate <= `` Picard solution pointwise on the common grid.

    Any positive function satisfying the inequality form of the equation is
    dominated by the solution, so a violation beyond ``slack`` falsifies the
    domination claim.  Returns the maximal violation (positive = above).
    """
    sol, _ = picard_solve(problem, grid=candidate.times, tol=tol)
    ref = sol.values if sol.values.shape == candidate.values.shape else sol.values[:, None]
    gap = np.asarray(candidate.values) - ref
    i = int(np.argmax(gap))
    max_violation = float(np.max(gap))
    at = float(candidate.times[np.unravel_index(i, gap.shape)[0]])
    return ComparisonVerdict(passed=max_violation <= slack, max_violation=max_violation, at_time=at)


# ---------------------------------------------------------------------------
# Fractional fixed point and the exponential-kernel family
# ---------------------------------------------------------------------------


def stability_fixed_point(F: float, theta: float, gamma: float) -> float:
    """Unique strictly positive root of ``a - F - theta a^gamma = 0``.

    Requires ``gamma`` in (0, 1); the root bounds the sup norm of positive
    solutions of fractional-growth Volterra inequalities.
    """
    if not 0.0 < gamma < 1.0:
        raise ValueError("gamma must lie in (0, 1); the linear case obeys the renewal dichotomy")
    if F < 0 or theta < 0:
        raise ValueError("F and theta must be >= 0")
    if theta == 0.0:
        return F
    if F == 0.0:
        return theta ** (1.0 / (1.0 - gamma))

    def fn(a: float) -> float:
        return a - F - theta * a**gamma

    hi = max(1.0, 2.0 * F, (2.0 * theta) ** (1.0 / (1.0 - gamma)))
    while fn(hi) <= 0:
        hi *= 2.0
    lo = min(F, hi / 2.0)
    while fn(lo) >= 0:
        lo /= 2.0
    return float(optimize.brentq(fn, lo, hi, xtol=1e-300, rtol=1e-15, maxiter=300))


@dataclass(frozen=True)
class ExpFamilySolution:
    """Solution family of ``v = force + int_-inf^t e^(-lam (t-s)) v(s) ds``.

    With constant force 1 and ``lam > 0``, ``lam != 1`` the members are
    ``c e^((1-lam) t) + lam/(lam-1)``; with force ``e^(alpha t)`` (given
    ``alpha + lam > 1``) they are
    ``(alpha+lam)/(alpha+lam-1) e^(alpha t) + c e^((1-lam) t)``.  The
    ``bounded_unique`` flag records whether exactly one member lies in the
    (weighted) locally bounded class, which is the contraction regime.
    """

    lam: float
    alpha: Optional[float]
    exists: bool
    degenerate: bool = False  # resonance: family (t + c) [e^(alpha t)]
    particular_coeff: float = float("nan")
    transient_rate: float = float("nan")  # exponent of the c-member
    bounded_unique: bool = False

    def member(self, c: float) -> Callable[[np.ndarray], np.ndarray]:
        if not self.exists:
            raise ValueError("the equation has no solution")
        al = 0.0 if self.alpha is None else self.alpha

        def fn(t):
            t = np.asarray(t, dtype=float)
            if self.degenerate:
                return (t + c) * np.exp(al * t)
            return self.particular_coeff * np.exp(al * t) + c * np.exp(self.transient_rate * t)

        return fn

    def describe(self) -> str:
        if not self.exists:
            return "no solution (kernel mass infinite)"
        al = 0.0 if self.alpha is None else self.alpha
        force = "1" if self.alpha is None else f"e^({al:g} t)"
        if self.degenerate:
            fam = f"(t + c) * e^({al:g} t)" if al else "t + c"
            return f"force {force}: family {fam}; no member is bounded"
        fam = f"{self.particular_coeff:g}*e^({al:g} t) + c*e^({self.transient_rate:g} t)" if al else (
            f"c*e^({self.transient_rate:g} t) + {self.particular_coeff:g}"
        )
        tailmsg = "unique bounded member at c = 0" if self.bounded_unique else "all members locally bounded; none singled out"
        return f"force {force}: family {fam}; {tailmsg}"


def exp_kernel_family(lam: float, alpha: Optional[float] = None) -> ExpFamilySolution:
    """Closed-form solutions of the half-line exponential-kernel equation.

    ``lam <= 0`` (or ``alpha + lam <= 0``) leaves the convolution divergent
    and the equation unsolvable; ``lam = 1`` (``alpha + lam = 1``) is the
    resonant case with family ``t + c``; otherwise the family is a particular
    exponential plus ``c e^((1-lam) t)``, with a unique (weighted) bounded
    member exactly when the kernel mass-to-weight ratio is below one, i.e.
    ``lam > 1`` (``alpha + lam > 1``).
    """
    if alpha is None:
        if lam <= 0:
            return ExpFamilySolution(lam=lam, alpha=None, exists=False)
        if lam == 1.0:
            return ExpFamilySolution(lam=lam, alpha=None, exists=True, degenerate=True, transient_rate=0.0)
        return ExpFamilySolution(
            lam=lam,
            alpha=None,
            exists=True,
            particular_coeff=lam / (lam - 1.0),
            transient_rate=1.0 - lam,
            bounded_unique=lam > 1.0,
        )
    if lam <= 0 or alpha + lam <= 0:
        return ExpFamilySolution(lam=lam, alpha=alpha, exists=False)
    if alpha + lam == 1.0:
        return ExpFamilySolution(lam=lam, alpha=alpha, exists=True, degenerate=True, transient_rate=1.0 - lam)
    return ExpFamilySolution(
        lam=lam,
        alpha=alpha,
        exists=True,
        particular_coeff=(alpha + lam) / (alpha + lam - 1.0),
        transient_rate=1.0 - lam,
        bounded_unique=alpha + lam > 1.0,
    )


# ---------------------------------------------------------------------------
# Moment-bound problems
# ---------------------------------------------------------------------------


def moment_bound_problem(model) -> VolterraProblem:
    """Deterministic problem whose solution dominates the weighted Lp norms.

    For Lipschitz coefficients the kernel terms carry the martingale part
    (BDG constant, p-th jump moment plus Gaussian variance, kernel p-th
    power) and the mean part (Holder factor times kernel mass); for
    fractional growth the four-kernel decomposition with the reduced inner
    exponent is used, bounding the mixed kernel/jump truncations by the
    separable product bound.  Exponential weights fold into the profiles.
    """
    from .wellposedness import bdg_constant  # local import avoids a cycle

    from .levy import effective_drifts, jump_moment

    chars, sig, kern = model.chars, model.sigma, model.kernel
    p = model.p
    pstar = max(p, 1.0)
    eta = model.eta
    mod = chars.modulation_sup()
    zeta_p = mod * jump_moment(chars.jumps, p, p)
    cnorm = chars.gaussian
    drifts = effective_drifts(chars)
    span = model.interval.span
    horizon = INF if span == INF else span

    if sig.is_lipschitz:
        C1, s0 = sig.lipschitz, abs(sig.sigma0)
        bdg = bdg_constant(p)
        b1n = None if drifts.b1 is None else abs(chars.drift) + mod * abs(chars.jumps.tail_mean())
        # (kernel power, coefficient without the C1^p factor)
        specs = []
        if p >= 1.0:
            if b1n is None:
                raise ContractionFailure("mean measure undefined: |z| 1_{|z|>1} not integrable", irreducible_mass=INF)
            specs.append((p, bdg**p * (zeta_p + cnorm)))
            if b1n > 0:
                gmass = kern.window_lp(1.0, 0.0, horizon, eta=eta)
                if not math.isfinite(gmass):
                    raise ContractionFailure("kernel mass for the mean part is infinite", irreducible_mass=INF)
                specs.append((1.0, b1n**p * gmass ** (p - 1.0)))
        else:
            specs.append((p, zeta_p))  # p < 1: c = 0 and no drift (checker-enforced)
        base = model.y0.weighted_norm(pstar, eta, model.interval)

        if C1 > 0:
            off = s0 / C1 if p >= 1.0 else (s0 / C1) ** p
            terms = tuple(
                VolterraTerm(kernel=kern, power=pw, weight=C1**p * coeff, eta=eta, offset=off)
                for pw, coeff in specs
                if coeff > 0
            )
            return VolterraProblem(
                terms=terms, force=base, t_end=model.interval.end, t_start=model.interval.start, p=pstar
            )

        # sigma constant (additive): the bound is explicit, no fixed point
        def additive(upto: float) -> float:
            out = 0.0
            for pw, coeff in specs:
                win = coeff * kern.window_lp(pw, 0.0, upto, eta=eta)
                out += s0 * win ** (1.0 / p) if p >= 1.0 else s0**p * win
            return out

        if model.interval.start is None:
            return VolterraProblem(
                terms=(), force=base + additive(horizon), t_end=model.interval.end, t_start=None, p=pstar
            )
        t0 = model.interval.start

        def force(times, _base=base):
            times = np.asarray(times, dtype=float)
            return _base + np.array([additive(max(t - t0, 0.0)) for t in times])

        return VolterraProblem(
            terms=(), force=force, t_end=model.interval.end, t_start=model.interval.start, p=pstar
        )

    # fractional growth: four-kernel decomposition with reduced exponent
    gam, C2, s0 = sig.gamma, sig.growth_coeff, abs(sig.sigma0)
    q = model.q if model.q is not None else min(2.0, pstar)
    bdg = bdg_constant(p) if p >= 1 else 1.0
    rho = min(1.0, max(q, 2.0 * (cnorm > 0)) * gam / p)
    zeta_qp = mod * jump_moment(chars.jumps, q, p)
    terms = []
    b1n = None if drifts.b1 is None else abs(chars.drift) + mod * abs(chars.jumps.tail_mean())
    if p >= 1.0 and b1n:
        gmass = kern.window_lp(1.0, 0.0, horizon, eta=eta)
        terms.append(
            VolterraTerm(kernel=kern, power=1.0, weight=C2**p * 2.0 ** (p - 1.0) * b1n**p * gmass ** (p - 1.0), eta=eta)
        )
    if cnorm > 0:
        terms.append(VolterraTerm(kernel=kern, power=2.0, weight=C2**p * 2.0 * bdg**2 * cnorm, eta=eta))
    if zeta_qp > 0:
        jump_w = (2.0 ** (p - 1.0) * bdg**p + 2.0 ** (q - 1.0) * bdg**q) if p >= 1 else 2.0**p * 2.0 ** (max(q, 1.0) - 1.0)

        def trunc_profile(tau, _k=kern, _p=p, _q=q):
            from scipy import special as _sp

            tau = np.asarray(tau, dtype=float)
            if hasattr(_k, "level_radius_sq"):
                rho2 = _k.level_radius_sq(tau)
                d = _k.dim
                inner = _k.spatial_lp(tau, _p) * _sp.gammainc(d / 2.0, _p * rho2 / (4.0 * tau))
                outer = _k.spatial_lp(tau, _q) * _sp.gammaincc(d / 2.0, _q * rho2 / (4.0 * tau))
                return inner + outer
            g = np.asarray(_k(tau))
            return np.where(g > 1.0, g**_p, g**_q)

        terms.append(VolterraTerm(profile=trunc_profile, weight=C2**p * jump_w * zeta_qp, eta=eta))
    base = model.y0.weighted_norm(pstar, eta, model.interval)
    windows = [t.window(0.0, horizon) for t in terms]
    if any(not math.isfinite(w) for w in windows):
        raise ContractionFailure("a moment-recursion kernel has infinite mass", irreducible_mass=INF)
    const = 2.0 * (1.0 + s0 + C2)
    scale = C2**p if C2 > 0 else 1.0
    const += (s0 + C2) * sum((w / scale) ** (1.0 / pstar) for w in windows)
    return VolterraProblem(
        terms=tuple(terms),
        force=base + const,
        t_end=model.interval.end,
        t_start=model.interval.start,
        p=pstar,
        gamma=rho,
    )


def moment_bound(model, grid: Optional[np.ndarray] = None, tol: float = 1e-8, check: bool = True):
    """Upper bound on ``(t, x) -> |Y(t,x)|_{L^p} / w(t,x)^(1/(p v 1))``.

    Builds the applicable moment recursion for the model, verifies the
    model's existence conditions first (unless ``check=False``), and returns
    the Picard solution of the induced deterministic Volterra problem.
    """
    if check:
        from . import wellposedness as wp

        report = wp.applicable_check(model)
        if not report.passed:
            raise ContractionFailure(
                "model fails its existence/stability check: "
                + "; ".join(i.condition for i in report.items if i.verdict == "fail"),
                irreducible_mass=report.size_lhs if report.size_lhs is not None else float("nan"),
            )
    problem = moment_bound_problem(model)
    fld, _ = picard_solve(problem, grid=grid, tol=tol)
    return fld
