"""Quadrature on the selected contour and pipeline orchestration.

The evolution value u(t) is recovered as a trapezoidal sum of
G(x) = e^{z(x) t} (z(x) I - A)^{-1} (u0 + bhat(z(x))) z'(x) over the
truncated arc x in [-c pi, c pi]. Node data that does not depend on t
(the shifted solves) is cached by exact node position, so doubling the
node count reuses every previous evaluation and a whole time window can
share one contour's factorizations.
"""

from __future__ import annotations

import csv
import math
import warnings
from dataclasses import dataclass, field
from math import gcd

import numpy as np

from .contour import (
    ContourParams,
    FeasibilityReport,
    InnerEllipse,
    TruncationResult,
    _c_from_k,
    build_inner_ellipse,
    conformal_map,
    contour_from_a,
    feasibility_check,
    optimize_a,
    predicted_nodes,
    stability_constant,
    truncation_fixed_point,
    window_objective,
)
from .errors import GeometryError, SingularSystemError, StageError
from .numerics import (
    ShiftedSystem,
    eigenvalues,
    reference_solution,
    resolvent_cond,
    smallest_singular_value,
)
from .pseudospectra import GridSpec, SingularitySet, compute_grid, critical_curve, level_curve

PI = math.pi
TWO_PI = 2.0 * math.pi
# Quadrature nodes must keep this distance from declared source poles.
NODE_SINGULARITY_GAP = 1e-8


# ---------------------------------------------------------------------------
# node cache and quadrature


@dataclass(frozen=True, eq=False)
class _Node:
    z: complex
    dz: complex
    uhat: np.ndarray


class NodeCache:
    """Shifted solves keyed by exact node position on a fixed truncated arc.

    Node j of an N-point rule sits at x = -c pi + (j/N) 2 c pi; the key is
    the reduced fraction j/N, so nested refinements (N -> 2N -> ...) and
    repeated solves at other times hit the same entries bit-exactly.
    """

    def __init__(self, problem, params: ContourParams, c: float):
        self.problem = problem
        self.params = params
        self.c = float(c)
        self.entries: dict[tuple[int, int], _Node] = {}
        self.solve_count = 0
        self.reuse_count = 0

    def node_x(self, p: int, q: int) -> float:
        return -self.c * PI + (2.0 * self.c * PI) * (p / q)

    def node(self, j: int, N: int) -> _Node:
        g = gcd(j, N)
        key = (j // g, N // g)
        hit = self.entries.get(key)
        if hit is not None:
            self.reuse_count += 1
            return hit
        x = self.node_x(*key)
        z, dz = conformal_map(self.params, x)
        for pole in self.problem.singularities:
            if abs(z - pole) < NODE_SINGULARITY_GAP:
                raise SingularSystemError(
                    f"quadrature node z = {z} sits on source pole {pole}; "
                    "the contour is misplaced"
                )
        rhs = self.problem.u0 + self.problem.bhat(z)
        uhat = ShiftedSystem(self.problem.operator, z).solve(rhs)
        self.solve_count += 1
        data = _Node(complex(z), complex(dz), uhat)
        self.entries[key] = data
        return data


@dataclass(frozen=True, eq=False)
class QuadratureResult:
    """One N-point trapezoidal evaluation plus its model diagnostics."""

    N: int
    approx: np.ndarray
    nodes: np.ndarray
    node_values: tuple
    c: float
    est_error: float
    B_term: float
    cache: NodeCache = field(repr=False)
    t: float = 0.0


def integrand(problem, params: ContourParams, x, t: float) -> np.ndarray:
    """G at one strip coordinate (real on the arc, complex for diagnostics)."""
    z, dz = conformal_map(params, x)
    uhat = ShiftedSystem(problem.operator, z).solve(problem.u0 + problem.bhat(z))
    return np.exp(z * t) * uhat * dz


def trapezoid_sum(
    problem, params: ContourParams, c: float, t: float, N: int, cache: NodeCache = None
) -> QuadratureResult:
    """N-point trapezoidal rule on the arc x in [-c pi, c pi].

    All interior nodes j = 1..N-1 are evaluated (and cached). For real data
    the sum is folded onto the upper-half nodes through the imaginary part,
    which returns an exactly real vector; the node at x = 0 (present for
    even N) carries half weight so the folded sum equals the full one.
    """
    if N < 2:
        raise ValueError("need N >= 2")
    if not 0 < c <= 0.5:
        raise ValueError("need c in (0, 1/2]")
    if cache is None:
        cache = NodeCache(problem, params, c)
    if cache.params != params:
        raise GeometryError("node cache belongs to a different contour")
    if cache.c != c:
        raise GeometryError("node cache belongs to a different truncation width")

    datas = [cache.node(j, N) for j in range(1, N)]
    xs = np.array([cache.node_x(j // gcd(j, N), N // gcd(j, N)) for j in range(1, N)])
    values = []
    for data in datas:
        values.append(np.exp(data.z * t) * data.uhat * data.dz)

    if problem.is_real:
        total = np.zeros(problem.dim, dtype=complex)
        for j in range(math.ceil(N / 2), N):
            weight = 0.5 if 2 * j == N else 1.0
            total += weight * values[j - 1]
        approx = (2.0 * c / N) * np.imag(total)
    else:
        total = np.zeros(problem.dim, dtype=complex)
        for value in values:
            total += value
        approx = (c / (1j * N)) * total

    est = error_model(params, c, t, N)
    B = b_term(params, c, t, N)
    return QuadratureResult(
        N, approx, xs, tuple(values), float(c), est, B, cache, float(t)
    )


def refine_doubling(prev: QuadratureResult, problem, params: ContourParams, t: float) -> QuadratureResult:
    """2N-point result reusing every previous node; N fresh solves."""
    return trapezoid_sum(problem, params, prev.c, t, 2 * prev.N, cache=prev.cache)


def full_sum(result: QuadratureResult) -> np.ndarray:
    """Unfolded sum over all interior nodes with the 1/(2 pi i) constant.

    For real data this agrees with the folded imaginary-part formula; it is
    exposed so the agreement can be checked rather than assumed.
    """
    total = np.zeros(len(result.approx), dtype=complex)
    for value in result.node_values:
        total += value
    return (result.c / (1j * result.N)) * total


# ---------------------------------------------------------------------------
# error models


def error_model(params: ContourParams, c: float, t: float, N: int, tol: float = None) -> float:
    """Leading-order quadrature error 2 pi c e^{D t - (a/c) N}.

    The inverse of the node-count prediction; ``tol`` is accepted only for
    signature symmetry and does not enter the value.
    """
    return TWO_PI * c * math.exp(params.D * t - (params.a / c) * N)


def delta_offset(c: float, N: int) -> float:
    """Distance delta in the end-segment alignment: pi/2 - (2k+1) eta - xi."""
    xi = c * PI
    eta = xi / N
    rem = PI / 2 - xi - eta
    if rem <= 0:
        return max(PI / 2 - xi, 0.0)
    k = math.floor(rem / (2 * eta))
    return rem - 2 * k * eta


def b_term(params: ContourParams, c: float, t: float, N: int, Delta: float = 1.0) -> float:
    """End-of-arc leakage term of the quadrature error bound.

    Delta scales the bound by the integrand magnitude near the arc ends;
    Delta = 1 gives the bare geometric factor
    (2 c log 2)/(N pi) e^{((a1 e^{-a} + a2 e^{a}) cos(pi/2 - delta) + A3) t}.
    """
    delta = delta_offset(c, N)
    outer = params.a1 * math.exp(-params.a) + params.a2 * math.exp(params.a)
    return Delta * (2.0 * c * math.log(2.0)) / (N * PI) * math.exp(
        (outer * math.cos(PI / 2 - delta) + params.A3) * t
    )


def estimate_delta(problem, params: ContourParams, c: float, t: float, N: int, samples: int = 32) -> float:
    """Sampled bound (x2 safety) on ||uhat z'|| along the end verticals x = +/-(pi/2 - delta)."""
    delta = delta_offset(c, N)
    ys = np.linspace(-params.a, params.a, samples)
    best = 0.0
    for x0 in (PI / 2 - delta, -(PI / 2 - delta)):
        for y in ys:
            z, dz = conformal_map(params, complex(x0, y))
            uhat = ShiftedSystem(problem.operator, z).solve(
                problem.u0 + problem.bhat(z)
            )
            best = max(best, float(np.linalg.norm(uhat) * abs(dz)))
    return 2.0 * best


def estimate_k_ell(problem, params: ContourParams, t: float, samples: int = 32, slope: float = 1.0) -> float:
    """Sampled bound (x2 safety) on ||uhat z'|| along the outgoing half-lines.

    The half-lines leave the arc ends A3 +/- i A2 with the given slope; the
    exponential decay e^{x t} is handled analytically by the truncation
    bound, so only the algebraic factor is sampled (over a few decay lengths).
    """
    span = max(4.0 / max(t, 1e-12), 2.0)
    ss = np.linspace(0.0, span, samples)
    dz = complex(-1.0, slope)
    best = 0.0
    for sign in (1.0, -1.0):
        start = complex(params.A3, sign * params.A2)
        for s in ss:
            z = start - s + 1j * (sign * slope * s)
            uhat = ShiftedSystem(problem.operator, z).solve(
                problem.u0 + problem.bhat(z)
            )
            best = max(best, float(np.linalg.norm(uhat) * abs(dz)))
        if problem.is_real:
            break  # mirror line gives the same norms
    return 2.0 * best


def sample_line_maxima(problem, params: ContourParams, c: float, t: float, N: int, samples: int = 64):
    """Sampled maxima of ||G||/(2 pi) on the displaced lines.

    Returns (m_plus, m_minus, s_minus): m_plus spans the whole arc on the
    inner displaced line (strip level +a); m_minus and s_minus live on the
    outer line (level -a), split at |x| = c pi + c pi / N.
    """
    a, cpi = params.a, c * PI
    eta = cpi / N

    def max_g(x_values, level):
        best = 0.0
        for x in x_values:
            g = integrand(problem, params, complex(x, level), t)
            best = max(best, float(np.linalg.norm(g)))
        return best / TWO_PI

    m_plus = max_g(np.linspace(-PI / 2, PI / 2, samples), +a)
    m_minus = max_g(np.linspace(-(cpi + eta), cpi + eta, samples), -a)
    s_span = max(PI / 2 - cpi - eta, 0.0)
    if s_span > 0:
        half = np.linspace(cpi + eta, PI / 2, max(samples // 2, 2))
        s_minus = max(max_g(half, -a), max_g(-half, -a))
    else:
        s_minus = 0.0
    return m_plus, m_minus, s_minus


def rigorous_error_bound(
    problem, params: ContourParams, c: float, t: float, N: int, tol: float, samples: int = 64
) -> float:
    """Assembled quadrature error bound from sampled maxima on the displaced lines.

    Sampling raises the usual caveat: 64 points per range, no certification.
    The bound assumes the integrand tail beyond the truncation point stays at
    the target-accuracy level; that is spot-checked and warned about, not
    enforced.
    """
    a, cpi = params.a, c * PI
    eta = cpi / N
    m_plus, m_minus, s_minus = sample_line_maxima(problem, params, c, t, N, samples)
    s_span = max(PI / 2 - cpi - eta, 0.0)

    if s_span > 0:
        for x in np.linspace(cpi, PI / 2, 8):
            g = np.linalg.norm(integrand(problem, params, x, t)) / TWO_PI
            if g > 2.0 * tol:
                warnings.warn(
                    f"integrand tail at x = {x:.4f} is {g:.3e}, above the assumed "
                    f"truncation size {tol:.3e}",
                    stacklevel=2,
                )
                break

    growth = math.expm1((params.a / c) * N)  # e^{(a/c)N} - 1
    main = (TWO_PI * c * (1 + 1.0 / N) * m_minus + 2.0 * s_span * s_minus + PI * m_plus) / growth
    floor = 4.0 * (PI / 2 - cpi + cpi / (2.0 * N)) * tol
    leak = b_term(params, c, t, N, Delta=estimate_delta(problem, params, c, t, N))
    return main + floor + leak


def truncation_bound(params: ContourParams, c: float, t: float, K_ell: float, tol: float) -> float:
    """Bound on the discarded half-lines and arc tails: K_l e^{z_l t}/(pi t) + (1/2 - c) tol."""
    return K_ell * math.exp(params.A3 * t) / (PI * t) + (0.5 - c) * tol


# ---------------------------------------------------------------------------
# pipeline


@dataclass(frozen=True)
class SolveOptions:
    """Tunable pipeline knobs; None means 'derive a default'."""

    z_l: float = None
    z_r: float = None
    eps1: float = 1e-9
    eps2: float = 1e-13
    grid_pts: int = 100
    grid_ymax: float = None
    m_ell: int = 1000
    a_max: float = 1.0
    prec: float = 0.1
    k_init: float = 100.0
    n_max: int = 1024
    n_start: int = None
    validate: bool = False
    force: bool = False


@dataclass(frozen=True, eq=False)
class SolveReport:
    """Everything one pipeline run produced, including diagnostics."""

    label: str
    t: float
    tol: float
    inner: InnerEllipse
    contour: ContourParams
    truncation: TruncationResult
    feasibility: FeasibilityReport
    stability: float
    result: QuadratureResult = None
    errors_table: tuple = ()
    reference_error: float = None
    reference_error_inf: float = None
    truncation_bound: float = None
    reached_tol: bool = False
    solve_count: int = 0
    reuse_count: int = 0

    @property
    def solution(self):
        return None if self.result is None else self.result.approx

    @property
    def ok(self) -> bool:
        return self.reached_tol and self.feasibility.passed


def _stage(name, fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except StageError:
        raise
    except Exception as exc:
        raise StageError(name, exc) from exc


def default_z_l(t: float) -> float:
    """Center far enough left that e^{z_l t} is below the working precision."""
    return float(math.ceil(math.log(1e-18) / t))


def default_z_r(problem, eigs, eps1: float) -> float:
    """Rightmost real-axis crossing of sigma_min = eps1, kept right of source poles."""
    from scipy.optimize import brentq

    A = problem.operator.entries
    n = A.shape[0]
    eye = np.eye(n)

    def g(x):
        return smallest_singular_value(x * eye - A) - eps1

    lo = float(np.max(eigs.real))
    z_r = lo + eps1
    if g(lo) < 0.0:
        hi = lo + 1.0
        step = 1.0
        while g(hi) < 0.0 and hi < lo + 1e6:
            step *= 2.0
            hi += step
        z_r = float(brentq(g, lo, hi, xtol=1e-12))
    poles = problem.singularities
    if poles:
        z_r = max(z_r, max(p.real for p in poles) + 0.01)
    return z_r


@dataclass(frozen=True)
class PipelinePrep:
    """Front half of the pipeline, shared by single-time and window solves."""

    z_l: float
    z_r: float
    grid: object
    c1: object
    c2: object
    critical: object
    phi: SingularitySet
    inner: InnerEllipse
    contour: ContourParams


def prepare_contour(problem, t_weight: float, t_opt: float, tol: float, opts: SolveOptions = None) -> PipelinePrep:
    """Grid -> level curves -> critical curve -> bounding ellipse -> contour.

    The weighted level curve uses t_weight while the strip parameter is
    optimized against t_opt (they coincide for a single-time solve).
    """
    opts = opts or SolveOptions()
    eigs = _stage("eigenvalues", eigenvalues, problem.operator)
    z_l = opts.z_l if opts.z_l is not None else default_z_l(t_weight)
    z_r = (
        opts.z_r
        if opts.z_r is not None
        else _stage("z_r-default", default_z_r, problem, eigs, opts.eps1)
    )
    if not z_l < z_r:
        raise StageError("box", GeometryError(f"z_l = {z_l} must be < z_r = {z_r}"))
    strip_eigs = [complex(v) for v in eigs if z_l <= v.real <= z_r]
    ymax = opts.grid_ymax
    if ymax is None:
        eig_reach = max((abs(v.imag) for v in strip_eigs), default=0.0)
        ymax = max(1.0, 0.25 * (z_r - z_l), 1.2 * eig_reach)
    spec = GridSpec(z_l, z_r, -ymax, ymax, opts.grid_pts)
    grid = _stage("grid", compute_grid, problem.operator, spec)
    c1 = _stage("curves", level_curve, grid, opts.eps1, t_weight)
    c2 = _stage("curves", level_curve, grid, opts.eps2, 0.0)
    crit = _stage("curves", critical_curve, c1, c2)
    for pole in problem.singularities:
        if pole.real >= z_r:
            raise StageError(
                "box",
                GeometryError(f"source pole {pole} is not left of z_r = {z_r}"),
            )
    phi = SingularitySet.gather(
        curve_points=[complex(x, y) for x, y in zip(crit.xs, crit.ys)],
        eigenvalues=strip_eigs,
        source_poles=problem.singularities,
    )
    inner = _stage("inner-ellipse", build_inner_ellipse, phi, z_l, z_r, opts.m_ell)
    a = _stage("optimize-a", optimize_a, inner, t_opt, tol, opts.a_max)
    params = _stage("contour", contour_from_a, inner, a)
    return PipelinePrep(z_l, z_r, grid, c1, c2, crit, phi, inner, params)


def solve(problem, t: float, tol: float, opts: SolveOptions = None) -> SolveReport:
    """Full pipeline: place the contour, truncate it, refine the quadrature.

    The node count starts at a quarter of the predicted requirement and
    doubles (reusing all prior solves) until the stopping signal meets tol:
    the measured error against the reference evolution when opts.validate is
    set, the model estimate otherwise. A failed feasibility check returns a
    report without quadrature unless opts.force is set.
    """
    if t <= 0:
        raise ValueError("need t > 0")
    if tol <= 0:
        raise ValueError("need tol > 0")
    opts = opts or SolveOptions()
    prep = prepare_contour(problem, t, t, tol, opts)
    inner, params = prep.inner, prep.contour
    trunc = _stage(
        "truncation",
        truncation_fixed_point,
        problem,
        params,
        t,
        tol,
        opts.prec,
        opts.k_init,
    )
    feas = _stage("feasibility", feasibility_check, problem, params, trunc.c, t, tol)
    stab = stability_constant(params, trunc.c, t)
    base = dict(
        label=problem.label,
        t=float(t),
        tol=float(tol),
        inner=inner,
        contour=params,
        truncation=trunc,
        feasibility=feas,
        stability=stab,
    )
    if not feas.passed and not opts.force:
        return SolveReport(**base)

    reference = None
    if opts.validate:
        reference = _stage("reference", reference_solution, problem, t)

    n_pred = predicted_nodes(params.a, trunc.c, params.D, t, tol)
    n0 = opts.n_start if opts.n_start is not None else max(5, math.ceil(n_pred / 4))
    q = _stage("quadrature", trapezoid_sum, problem, params, trunc.c, t, max(2, n0))
    table = []
    reached = False
    while True:
        measured = None
        if reference is not None:
            measured = float(np.linalg.norm(q.approx - reference))
        table.append((q.N, measured, q.est_error, q.B_term))
        signal = measured if measured is not None else q.est_error
        if signal <= tol:
            reached = True
            break
        if 2 * q.N > opts.n_max:
            break
        q = _stage("quadrature", refine_doubling, q, problem, params, t)

    k_ell = _stage("truncation-bound", estimate_k_ell, problem, params, t)
    t_bound = truncation_bound(params, trunc.c, t, k_ell, tol)
    ref_err = ref_err_inf = None
    if reference is not None:
        ref_err = float(np.linalg.norm(q.approx - reference))
        ref_err_inf = float(np.max(np.abs(q.approx - reference)))
    return SolveReport(
        **base,
        result=q,
        errors_table=tuple(table),
        reference_error=ref_err,
        reference_error_inf=ref_err_inf,
        truncation_bound=t_bound,
        reached_tol=reached,
        solve_count=q.cache.solve_count,
        reuse_count=q.cache.reuse_count,
    )


# ---------------------------------------------------------------------------
# time windows


@dataclass(frozen=True, eq=False)
class TimeWindowPlan:
    """One contour serving all t in [t0, t1] with per-time truncation.

    The node grid is fixed by the wider endpoint truncation c_grid, so every
    shifted solve is shared across times; per-time (c_t, K_t) follow the
    linear-K rule between the endpoint fixed points.
    """

    t0: float
    t1: float
    tol: float
    inner: InnerEllipse
    contour: ContourParams
    trunc0: TruncationResult
    trunc1: TruncationResult
    c_grid: float
    n_nodes: int
    cache: NodeCache = field(repr=False)
    max_cond: float = 1.0
    label: str = ""

    def k_at(self, t: float) -> float:
        if self.t1 == self.t0:
            return self.trunc0.K
        frac = (t - self.t0) / (self.t1 - self.t0)
        return self.trunc0.K + (self.trunc1.K - self.trunc0.K) * frac

    def c_at(self, t: float) -> float:
        return _c_from_k(self.contour, t, self.tol, self.k_at(t), allow_clamp=False)


def plan_window(problem, t0: float, t1: float, tol: float, opts: SolveOptions = None) -> TimeWindowPlan:
    """Build one contour for [t0, t1]: ellipse at t0, strip parameter sized for t1."""
    if not 0 < t0 <= t1:
        raise ValueError("need 0 < t0 <= t1")
    opts = opts or SolveOptions()
    prep = prepare_contour(problem, t0, t1, tol, opts)
    inner, params = prep.inner, prep.contour
    trunc0 = _stage(
        "truncation", truncation_fixed_point, problem, params, t0, tol, opts.prec, opts.k_init
    )
    if t1 == t0:
        trunc1 = trunc0
    else:
        trunc1 = _stage(
            "truncation", truncation_fixed_point, problem, params, t1, tol, opts.prec, opts.k_init
        )
    c_grid = max(trunc0.c, trunc1.c)
    n_nodes = max(2, math.ceil(window_objective(inner, params.a, t1, tol)))
    cache = NodeCache(problem, params, c_grid)
    xs = np.linspace(-c_grid * PI, c_grid * PI, 10)
    max_cond = float(
        np.max([resolvent_cond(problem.operator, conformal_map(params, x)[0]) for x in xs])
    )
    return TimeWindowPlan(
        float(t0),
        float(t1),
        float(tol),
        inner,
        params,
        trunc0,
        trunc1,
        c_grid,
        n_nodes,
        cache,
        max_cond,
        problem.label,
    )


def solve_at(
    plan: TimeWindowPlan,
    problem,
    t: float,
    tol: float = None,
    validate: bool = False,
    n_max: int = 1024,
) -> SolveReport:
    """Evaluate the window plan at one time, reusing all cached node solves.

    The quadrature runs on the plan's shared grid (width c_grid); the
    per-time truncation pair (c_t, K_t) is interpolated and reported, and
    the error model uses the shared grid's rate.
    """
    if not plan.t0 <= t <= plan.t1:
        raise ValueError(f"t = {t} outside the window [{plan.t0}, {plan.t1}]")
    tol = plan.tol if tol is None else float(tol)
    c_t = plan.c_at(t)
    k_t = plan.k_at(t)
    trunc_t = TruncationResult(c_t, k_t, 0)
    stab = stability_constant(plan.contour, c_t, t)
    unit_roundoff = np.finfo(float).eps / 2.0
    achievable = stab * unit_roundoff * plan.max_cond
    feas = FeasibilityReport(achievable <= tol, achievable, plan.max_cond, stab, tol)

    reference = reference_solution(problem, t) if validate else None
    q = trapezoid_sum(problem, plan.contour, plan.c_grid, t, plan.n_nodes, cache=plan.cache)
    table = []
    reached = False
    while True:
        measured = None
        if reference is not None:
            measured = float(np.linalg.norm(q.approx - reference))
        table.append((q.N, measured, q.est_error, q.B_term))
        signal = measured if measured is not None else q.est_error
        if signal <= tol:
            reached = True
            break
        if 2 * q.N > n_max:
            break
        q = refine_doubling(q, problem, plan.contour, t)

    ref_err = ref_err_inf = None
    if reference is not None:
        ref_err = float(np.linalg.norm(q.approx - reference))
        ref_err_inf = float(np.max(np.abs(q.approx - reference)))
    return SolveReport(
        label=plan.label,
        t=float(t),
        tol=tol,
        inner=plan.inner,
        contour=plan.contour,
        truncation=trunc_t,
        feasibility=feas,
        stability=stab,
        result=q,
        errors_table=tuple(table),
        reference_error=ref_err,
        reference_error_inf=ref_err_inf,
        truncation_bound=None,
        reached_tol=reached,
        solve_count=plan.cache.solve_count,
        reuse_count=plan.cache.reuse_count,
    )


# ---------------------------------------------------------------------------
# report serialization

REPORT_VERSION = "bromell-report 1"


def _fmt(v) -> str:
    if v is None:
        return "nan"
    return f"{v:.17g}"


def format_report(report: SolveReport) -> str:
    """Versioned key=value text plus a CSV block of the error-vs-N table."""
    p = report.contour
    lines = [
        REPORT_VERSION,
        f"problem={report.label}",
        f"t={_fmt(report.t)}",
        f"tol={_fmt(report.tol)}",
        f"z_l={_fmt(report.inner.z_l)}",
        f"z_r={_fmt(report.inner.z_r)}",
        f"d={_fmt(report.inner.d)}",
        f"r={_fmt(report.inner.r)}",
        f"a={_fmt(p.a)}",
        f"a1={_fmt(p.a1)}",
        f"a2={_fmt(p.a2)}",
        f"A3={_fmt(p.A3)}",
        f"D={_fmt(p.D)}",
        f"c={_fmt(report.truncation.c)}",
        f"K={_fmt(report.truncation.K)}",
        f"iterations={report.truncation.iterations}",
        f"stability={_fmt(report.stability)}",
        f"feasibility_passed={str(report.feasibility.passed).lower()}",
        f"feasibility_achievable={_fmt(report.feasibility.achievable)}",
        f"max_cond={_fmt(report.feasibility.max_cond)}",
        f"N_final={report.result.N if report.result is not None else 0}",
        f"est_error={_fmt(report.result.est_error if report.result else None)}",
        f"reference_error={_fmt(report.reference_error)}",
        f"reference_error_inf={_fmt(report.reference_error_inf)}",
        f"truncation_bound={_fmt(report.truncation_bound)}",
        f"reached_tol={str(report.reached_tol).lower()}",
        f"solve_count={report.solve_count}",
        f"reuse_count={report.reuse_count}",
        "[errors]",
        "N,measured_error,model_error,B_term",
    ]
    for N, measured, model, b in report.errors_table:
        lines.append(f"{N},{_fmt(measured)},{_fmt(model)},{_fmt(b)}")
    return "\n".join(lines) + "\n"


def write_report(report: SolveReport, path) -> None:
    with open(path, "w", encoding="ascii") as fh:
        fh.write(format_report(report))


def read_report(path):
    """Parse a report file back into (keys dict, error-table rows)."""
    with open(path, "r", encoding="ascii") as fh:
        lines = [line.rstrip("\n") for line in fh]
    if not lines or lines[0] != REPORT_VERSION:
        raise ValueError(f"{path}: not a '{REPORT_VERSION}' file")
    keys = {}
    rows = []
    in_table = False
    for line in lines[1:]:
        if not line:
            continue
        if line == "[errors]":
            in_table = True
            continue
        if in_table:
            if line.startswith("N,"):
                continue
            n, measured, model, b = line.split(",")
            rows.append((int(n), float(measured), float(model), float(b)))
        else:
            key, _, value = line.partition("=")
            keys[key] = value
    return keys, rows


def write_errors_csv(report: SolveReport, path) -> None:
    """Error-vs-N table: columns N, measured_error, model_error, B_term."""
    with open(path, "w", newline="", encoding="ascii") as fh:
        writer = csv.writer(fh)
        writer.writerow(["N", "measured_error", "model_error", "B_term"])
        for N, measured, model, b in report.errors_table:
            writer.writerow([N, _fmt_sci(measured), _fmt_sci(model), _fmt_sci(b)])


def _fmt_sci(v) -> str:
    return "nan" if v is None else f"{v:.16e}"
