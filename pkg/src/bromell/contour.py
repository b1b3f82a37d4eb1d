"""Integration-contour selection.

Builds the bounding half-ellipse around the singularity set, maps it through
the conformal family z(w) = a1 e^{-iw} + a2 e^{iw} + A3 (horizontal segments
go to ellipses, the strip height a controls the quadrature rate), optimizes
the free strip parameter, locates the truncation point where the integrand
falls below the target accuracy, and prices the round-off amplification.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar

from .errors import ArccosDomainError, ConvergenceError, GeometryError
from .numerics import ShiftedSystem, resolvent_cond

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class InnerEllipse:
    """Bounding half-ellipse: center z_l, right vertex z_r, passing point d + i r.

    The geometry the contour family needs is (z_l, z_r, r / sin w~) where
    w~ = arccos((d - z_l) / (z_r - z_l)); r / sin w~ is the vertical semi-axis.
    """

    z_l: float
    z_r: float
    d: float
    r: float

    def __post_init__(self):
        if not self.z_l < self.z_r:
            raise GeometryError("need z_l < z_r")
        if not self.r > 0:
            raise GeometryError("passing point must have positive height")
        if abs(self.d - self.z_l) > self.semi_major:
            raise GeometryError("passing point lies outside the horizontal extent")

    @property
    def semi_major(self) -> float:
        return self.z_r - self.z_l

    @property
    def w_tilde(self) -> float:
        return math.acos((self.d - self.z_l) / self.semi_major)

    @property
    def semi_minor(self) -> float:
        s = math.sin(self.w_tilde)
        if s == 0.0:
            raise GeometryError(
                "passing point at the vertex leaves the vertical semi-axis undefined"
            )
        return self.r / s

    def quadratic_form(self, p: complex) -> float:
        px = (p.real - self.z_l) / self.semi_major
        py = p.imag / self.semi_minor
        return px * px + py * py

    def encloses(self, p: complex, slack: float = 1e-12) -> bool:
        return self.quadratic_form(complex(p)) <= 1.0 + slack

    def boundary_points(self, m: int = 181) -> np.ndarray:
        """Right half of the ellipse, sampled at m parameter values."""
        theta = np.linspace(-math.pi / 2, math.pi / 2, m)
        return self.z_l + self.semi_major * np.cos(theta) + 1j * self.semi_minor * np.sin(theta)


def candidate_encloses(z_l: float, z_r: float, focus_x: float, p: complex) -> bool:
    """Is p inside the ellipse centered at z_l through z_r with right focus focus_x?

    The boundary counts as enclosed. The candidate has horizontal semi-axis
    A = z_r - z_l and vertical semi-axis sqrt(A^2 - (focus_x - z_l)^2).
    """
    if not (z_l < focus_x < z_r):
        raise GeometryError("focus must lie strictly between center and vertex")
    A = z_r - z_l
    fd = focus_x - z_l
    B = math.sqrt(A * A - fd * fd)
    p = complex(p)
    return (p.real - z_l) ** 2 / A**2 + p.imag**2 / B**2 <= 1.0 + 1e-12


def _first_violation(points, z_l, A, B):
    """Rightmost point (by real part) outside the (A, B) ellipse, or None."""
    worst = None
    for p in sorted(points, key=lambda q: -q.real):
        if (p.real - z_l) ** 2 / A**2 + p.imag**2 / B**2 > 1.0 + 1e-12:
            worst = p
            break
    return worst


def build_inner_ellipse(phi, z_l: float, z_r: float, m_ell: int = 1000) -> InnerEllipse:
    """Shrink a circle around the singularity set into the tightest ellipse.

    Starting from the circle of radius z_r - z_l centered at z_l, candidate
    ellipses through z_r with right focus at successive partition points of
    [z_l, z_r] are tried; the last candidate that still encloses every point
    of phi is kept. The returned passing point d + i r reports where the
    accepted ellipse clears the critical point of the sweep.
    """
    points = [complex(p) for p in phi]
    if not points:
        raise GeometryError("singularity set is empty")
    if not z_l < z_r:
        raise GeometryError("need z_l < z_r")
    if m_ell < 2:
        raise GeometryError("need at least 2 partition points")
    A = z_r - z_l

    circle_violation = _first_violation(points, z_l, A, A)
    if circle_violation is not None:
        # Even the circle fails: pass just above the worst offender and widen
        # until everything fits.
        worst = max(points, key=lambda q: abs(q.imag))
        if abs(worst.imag) == 0.0:
            raise GeometryError(
                f"point {worst} lies outside the strip circle on the real axis; "
                "increase z_r"
            )
        d = worst.real
        if abs(d - z_l) >= A:
            raise GeometryError(
                f"offending point {worst} is horizontally outside the reachable "
                "ellipse family; increase z_r"
            )
        eps = 0.05 * abs(worst.imag)
        for _ in range(80):
            r = abs(worst.imag) + eps
            B = r / math.sqrt(1.0 - ((d - z_l) / A) ** 2)
            if _first_violation(points, z_l, A, B) is None:
                return InnerEllipse(z_l, z_r, d, r)
            eps *= 2.0
        raise GeometryError("could not enclose the singularity set; increase z_r")

    foci = np.linspace(z_l, z_r, m_ell)[1:-1]
    prev_B = A  # the circle
    for focus in foci:
        fd = focus - z_l
        B = math.sqrt(A * A - fd * fd)
        violation = _first_violation(points, z_l, A, B)
        if violation is not None:
            d = violation.real
            r = prev_B * math.sqrt(max(0.0, 1.0 - ((d - z_l) / A) ** 2))
            return InnerEllipse(z_l, z_r, d, r)
        prev_B = B
    # Even the most eccentric candidate encloses everything.
    return InnerEllipse(z_l, z_r, z_l, prev_B)


@dataclass(frozen=True)
class ContourParams:
    """One member of the contour family, pinned by the strip half-height a.

    The integration arc is z(x) = (a1 + a2) cos x + i (a2 - a1) sin x + A3 for
    x in [-pi/2, pi/2]; displacing the strip coordinate to +/- i a gives the
    inner bounding ellipse and the outer envelope whose rightmost point is D.
    """

    a: float
    a1: float
    a2: float
    A3: float

    def __post_init__(self):
        if not self.a > 0:
            raise GeometryError("strip half-height must be positive")
        if not (self.a1 > 0 and self.a2 > 0):
            raise GeometryError("need a1 > 0 and a2 > 0 (real foci)")
        if not self.A1 > self.A2 > 0:
            raise GeometryError("need A1 > A2 > 0 (horizontal major axis)")

    @property
    def A1(self) -> float:
        return self.a1 + self.a2

    @property
    def A2(self) -> float:
        return self.a2 - self.a1

    @property
    def D(self) -> float:
        """Rightmost real part over the outer envelope (strip level -a)."""
        return self.a1 * math.exp(-self.a) + self.a2 * math.exp(self.a) + self.A3

    def arc_points(self, m: int = 181) -> np.ndarray:
        x = np.linspace(-math.pi / 2, math.pi / 2, m)
        return conformal_map(self, x)[0]


def conformal_map(params: ContourParams, w):
    """Map strip coordinates to the contour plane: returns (z(w), z'(w)).

    z(w) = a1 e^{-iw} + a2 e^{iw} + A3 is entire; its restriction to real w
    is the integration arc, and Im(w) = y slides across the nested ellipse
    family (y = +a innermost, y = -a outermost).
    """
    w = np.asarray(w, dtype=complex) if np.ndim(w) else complex(w)
    em = np.exp(-1j * w)
    ep = np.exp(1j * w)
    z = params.a1 * em + params.a2 * ep + params.A3
    dz = 1j * (params.a2 * ep - params.a1 * em)
    return z, dz


def contour_from_a(inner: InnerEllipse, a: float) -> ContourParams:
    """Solve the passing conditions for (a1, a2, A3) at strip height a."""
    if not a > 0:
        raise GeometryError("need a > 0")
    W = inner.semi_major
    B = inner.semi_minor  # r / sin(w~)
    if W <= B:
        raise GeometryError(
            f"z_r - z_l = {W} must exceed r/sin(w~) = {B}; foci would leave the real axis"
        )
    a1 = 0.5 * math.exp(-a) * (W - B)
    a2 = 0.5 * math.exp(a) * (W + B)
    return ContourParams(a, a1, a2, inner.z_l)


def optimize_a(inner: InnerEllipse, t: float, tol: float, a_max: float = 1.0) -> float:
    """Minimize the node-count proxy f(a) = (D(a) t - log(tol/pi)) / (2a).

    Bounded scalar minimization (golden section with parabolic refinement)
    on (0, a_max], absolute tolerance 1e-6 on a.
    """
    if not a_max > 0:
        raise GeometryError("need a_max > 0")

    def f(a):
        return (contour_from_a(inner, a).D * t - math.log(tol / math.pi)) / (2.0 * a)

    f(a_max)  # propagate degenerate geometry before the optimizer hides it
    res = minimize_scalar(
        f, bounds=(1e-8, a_max), method="bounded", options={"xatol": 1e-6, "maxiter": 200}
    )
    return float(res.x)


def window_objective(inner: InnerEllipse, a: float, t1: float, tol: float) -> float:
    """f(a) evaluated at the window's upper time; also the node-count estimate."""
    return (contour_from_a(inner, a).D * t1 - math.log(tol / math.pi)) / (2.0 * a)


def predicted_nodes(a: float, c: float, D: float, t: float, tol: float) -> int:
    """Theoretical minimum node count: ceil((c/a) (D t - log(tol/(2 pi c))))."""
    n = (c / a) * (D * t - math.log(tol / (TWO_PI * c)))
    return max(2, math.ceil(n))


@dataclass(frozen=True)
class TruncationResult:
    """Truncation parameter c and integrand-scale constant K with iteration count."""

    c: float
    K: float
    iterations: int

    def __post_init__(self):
        if not 0.0 < self.c <= 0.5:
            raise GeometryError(f"truncation parameter c = {self.c} outside (0, 1/2]")
        if not self.K > 0:
            raise GeometryError("K must be positive")


def _c_from_k(params: ContourParams, t: float, tol: float, K: float, allow_clamp: bool):
    arg = math.log(tol / K) / (params.A1 * t) - params.A3 / params.A1
    if arg > 1.0 or arg < -1.0:
        if allow_clamp:
            arg = min(max(arg, -1.0 + 1e-12), 1.0 - 1e-12)
        else:
            raise ArccosDomainError(arg)
    # arg < 0 would put the truncation beyond the quarter arc; cap at c = 1/2.
    arg = max(arg, 0.0)
    return math.acos(arg) / math.pi


def truncation_fixed_point(
    problem,
    params: ContourParams,
    t: float,
    tol: float,
    prec: float = 0.1,
    K_init: float = 100.0,
    max_iter: int = 50,
) -> TruncationResult:
    """Alternate c = c(K) and K = ||u^(z(c pi)) z'(c pi)|| / (2 pi) to a fixed point.

    Each K update costs one shifted solve. Stops when successive K values
    differ by less than prec. The arccos argument is clamped into [-1, 1] on
    the first two iterations only (a large K_init can overshoot transiently);
    afterwards leaving the domain is a hard error.
    """
    if prec <= 0 or K_init <= 0:
        raise ValueError("need prec > 0 and K_init > 0")
    A = problem.operator
    u0 = problem.u0

    def k_update(c):
        z, dz = conformal_map(params, c * math.pi)
        uhat = ShiftedSystem(A, z).solve(u0 + problem.bhat(z))
        return float(np.linalg.norm(uhat) * abs(dz) / TWO_PI)

    K_prev = float(K_init)
    iterations = 0
    for it in range(1, max_iter + 1):
        c = _c_from_k(params, t, tol, K_prev, allow_clamp=(it <= 2))
        K_next = k_update(c)
        iterations = it
        if abs(K_next - K_prev) < prec:
            K_prev = K_next
            break
        K_prev = K_next
    else:
        raise ConvergenceError(
            f"truncation iteration did not settle within {max_iter} steps"
        )
    c_final = _c_from_k(params, t, tol, K_prev, allow_clamp=False)
    return TruncationResult(c_final, K_prev, iterations)


def stability_constant(params: ContourParams, c: float, t: float) -> float:
    """Amplification of per-node solve errors: 2 a2 c e^{(a1 + a2 + z_l) t}."""
    return 2.0 * params.a2 * c * math.exp((params.a1 + params.a2 + params.A3) * t)


def stability_constant_loose(params: ContourParams, c: float, t: float) -> float:
    """Same constant written as c (A1 + A2) e^{(A1 + A3) t} (diagnostic form)."""
    return c * (params.A1 + params.A2) * math.exp((params.A1 + params.A3) * t)


@dataclass(frozen=True)
class FeasibilityReport:
    """Outcome of the attainable-precision check along the arc."""

    passed: bool
    achievable: float
    max_cond: float
    stability: float
    tol: float

    def __str__(self):
        verdict = "pass" if self.passed else "fail"
        return (
            f"{verdict}: achievable precision ~ {self.achievable:.3e} "
            f"(tol {self.tol:.3e}, max cond {self.max_cond:.3e})"
        )


def feasibility_check(
    problem,
    params: ContourParams,
    c: float,
    t: float,
    tol: float,
    n_samples: int = 10,
) -> FeasibilityReport:
    """Estimate the best accuracy the arc supports and compare with tol.

    Samples the condition number of (z(x) I - A) along the truncated arc and
    multiplies the worst one by the stability constant and the unit roundoff.
    A failure is a verdict, not an exception.
    """
    xs = np.linspace(-c * math.pi, c * math.pi, n_samples)
    conds = [resolvent_cond(problem.operator, conformal_map(params, x)[0]) for x in xs]
    max_cond = float(np.max(conds))
    stab = stability_constant(params, c, t)
    unit_roundoff = np.finfo(float).eps / 2.0
    achievable = stab * unit_roundoff * max_cond
    return FeasibilityReport(achievable <= tol, achievable, max_cond, stab, tol)
