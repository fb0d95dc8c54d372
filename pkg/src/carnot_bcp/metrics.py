"""Homogeneous quasi-distances on graded groups, and their evaluators.

Every distance here is left-invariant, so evaluation reduces to the distance
from the identity of the displacement p^-1 q.  The workhorse kinds:

* ``HSDistance``     -- the quasi-distance whose unit ball at the identity is a
  Euclidean ball of radius R in exponential coordinates (Hebisch-Sikora).  The
  value is the unique lambda with sum_i x_i^2 lambda^(-2 w_i) = R^2, found by
  bracketed bisection plus a Newton polish; ball membership is decided exactly
  in rational arithmetic whenever the data permit.
* ``UnitBallDistance`` -- gauge of an arbitrary star-interval unit-ball oracle.
* ``PowerDistance``  -- d^(1/t) on the t-power of the group (snowflakes).
* ``ProductMaxDistance`` / ``LpComboDistance`` -- product combinations.
* ``QuotientDistance`` -- distance induced on the image of a surjective graded
  morphism: minimum of the upstairs distance over the kernel fiber.
* ``CCHeisenbergDistance`` -- the exact sub-Riemannian distance on the first
  Heisenberg group (circular-arc geodesics).
* ``FiniteSpaceDistance`` -- rational distance table.

Exactness contract: ``compare(p, q, rho)`` returns the sign of d(p,q) - rho
decided in exact rational arithmetic, raising ``ExactnessError`` when the kind
or the inputs cannot support it; ``value`` always returns a float.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .algebra import (
    ExactnessError,
    GradedGroup,
    abelian_group,
    dilate,
    dilate_batch,
    heisenberg_group,
    inverse,
    make_group,
    multiply,
    multiply_batch,
    power_group,
    product_group,
)
from .exact_linalg import rref
from .scalars import all_exact, rat_pow
from .structure import MorphismMatrix

TWO_PI = 2.0 * math.pi


class OracleError(RuntimeError):
    """Membership oracle behaved inconsistently with the star-interval property."""


class SolverError(RuntimeError):
    """Root finder or fiber minimizer failed to converge."""


# ---------------------------------------------------------------------------
# base class
# ---------------------------------------------------------------------------

class QuasiDistance:
    """Common interface: float evaluation plus optional exact comparisons."""

    kind = "abstract"
    exact_capable = False
    continuous = True
    homogeneous = True  # one-homogeneous with respect to all dilations

    def __init__(self, group: GradedGroup):
        self.group = group

    @property
    def weights(self):
        return self.group.weights if self.group is not None else ()

    def identity(self):
        return self.group.identity()

    def value(self, p, q) -> float:
        df = multiply(tuple(-float(x) for x in p), tuple(float(x) for x in q), self.group)
        return self.value_from_identity(df)

    def value_from_identity(self, x) -> float:
        raise NotImplementedError

    def value_from_identity_batch(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        return np.array([self.value_from_identity(tuple(row)) for row in X])

    def value_batch(self, P, Q) -> np.ndarray:
        P = np.asarray(P, dtype=float)
        Q = np.asarray(Q, dtype=float)
        return self.value_from_identity_batch(multiply_batch(-P, Q, self.group))

    def compare(self, p, q, rho) -> int:
        """Exact sign of d(p, q) - rho, or raise ExactnessError."""
        raise ExactnessError(f"{self.kind} distance has no exact comparison")

    def compare_from_identity(self, x, rho) -> int:
        raise ExactnessError(f"{self.kind} distance has no exact comparison")

    def exact_value(self, p, q):
        """Exact rational value when representable, else None."""
        return None

    def __repr__(self):
        gname = self.group.name if self.group is not None else "-"
        return f"<{type(self).__name__} on {gname}>"


# ---------------------------------------------------------------------------
# Hebisch-Sikora Euclidean-ball distances
# ---------------------------------------------------------------------------

def _weight_groups(weights):
    """Distinct weights (floats, ascending) with their coordinate index lists."""
    groups = {}
    for i, w in enumerate(weights):
        groups.setdefault(float(w), []).append(i)
    ws = sorted(groups)
    return np.array(ws), [np.array(groups[w]) for w in ws]


def _hs_lambda_batch(X, weights, R, _groups=None, method="auto"):
    """Solve sum x_i^2 lam^(-2 w_i) = R^2 rowwise; X is (m, n) float.

    Coordinates sharing a weight collapse into one squared-sum term, so the
    equation has one term per distinct weight.  One or two weights give closed
    forms; otherwise (or when method="iterative" forces the general route,
    which the closed forms are tested against) the objective is decreasing
    and convex in lam, so Newton from the certified lower bracket
    max_w (s_w / R^2)^(1/2w) increases monotonically to the root with
    quadratic convergence.
    """
    X = np.asarray(X, dtype=float)
    if _groups is None:
        _groups = _weight_groups(weights)
    ws, idx = _groups
    S = np.stack([(X[:, ix] ** 2).sum(axis=1) for ix in idx], axis=1)
    m = len(X)
    R2 = R * R
    lam = np.zeros(m)
    active = S.sum(axis=1) > 0
    if not np.any(active):
        return lam
    Sa = S[active]
    K = len(ws)
    if method == "auto":
        if K == 1:
            lam[active] = (Sa[:, 0] / R2) ** (0.5 / ws[0])
            return lam
        if K == 2 and ws[1] == 2.0 * ws[0]:
            s1, s2 = Sa[:, 0], Sa[:, 1]
            t = (s1 + np.sqrt(s1 * s1 + 4.0 * R2 * s2)) / (2.0 * R2)
            lam[active] = t ** (0.5 / ws[0])
            return lam
    with np.errstate(divide="ignore"):
        l = np.max((Sa / R2) ** (0.5 / ws[None, :]), axis=1)
    for _ in range(60):
        pw = Sa * l[:, None] ** (-2.0 * ws[None, :])
        gl = pw.sum(axis=1) - R2
        dg = (-2.0 * ws[None, :] * pw).sum(axis=1) / l
        step = gl / dg
        nl = l - step
        ok = (nl > 0) & np.isfinite(nl)
        l = np.where(ok, nl, l)
        if np.all(np.abs(step) <= 1e-15 * l):
            break
    lam[active] = l
    return lam


class HSDistance(QuasiDistance):
    """Homogeneous quasi-distance with Euclidean unit ball of radius R.

    A genuine distance for R below an (unspecified) threshold; the package
    measures the quasi-triangle constant empirically instead of assuming it.
    """

    kind = "hs"
    continuous = True

    def __init__(self, group: GradedGroup, R=Fraction(1)):
        super().__init__(group)
        self.R = Fraction(R)
        if self.R <= 0:
            raise ValueError("radius parameter R must be positive")
        # comparisons against radius rho need rho^(2 w_i) rational, which
        # holds for every rational rho exactly when all 2 w_i are integers
        self.exact_capable = all((2 * w).denominator == 1 for w in group.weights)
        self._groups = _weight_groups(group.weights)

    def value_from_identity(self, x):
        xf = tuple(float(v) for v in x)
        if not any(xf):
            return 0.0
        if any(not math.isfinite(v) for v in xf):
            raise SolverError("nonfinite coordinates")
        return float(_hs_lambda_batch(np.array([xf]), self.weights, float(self.R),
                                      self._groups)[0])

    def value_from_identity_batch(self, X):
        return _hs_lambda_batch(X, self.weights, float(self.R), self._groups)

    def compare_from_identity(self, x, rho):
        rho = Fraction(rho)
        if rho <= 0:
            raise ValueError("comparison radius must be positive")
        if not all_exact(x):
            raise ExactnessError("exact comparison needs rational coordinates")
        s = Fraction(0)
        for xi, wi in zip(x, self.weights):
            if xi == 0:
                continue
            pw = rat_pow(rho, 2 * wi)
            if pw is None:
                raise ExactnessError(
                    f"radius {rho} has no exact power for weight {wi}")
            s += Fraction(xi) ** 2 / pw
        target = self.R ** 2
        return (s > target) - (s < target)

    def compare(self, p, q, rho):
        df = multiply(inverse(tuple(Fraction(v) for v in p), self.group),
                      tuple(Fraction(v) for v in q), self.group)
        return self.compare_from_identity(df, rho)

    def exact_value(self, p, q):
        # representable only on a line with unit weight: d = |x| / R
        if self.group.dim == 1 and self.group.weights[0] == 1 and \
                all_exact(p) and all_exact(q):
            return abs(Fraction(q[0]) - Fraction(p[0])) / self.R
        return None


def hs_distance(p, q, R, group: GradedGroup) -> float:
    """Euclidean-unit-ball quasi-distance between two points (float backend)."""
    return HSDistance(group, R).value(p, q)


@dataclass
class MembershipResult:
    label: str            # inside | boundary | outside
    backend: str          # exact | float
    margin: float         # float-mode slack, 0.0 in exact mode

    def to_json(self):
        return {"label": self.label, "backend": self.backend, "margin": self.margin}


def hs_membership(q, center, radius, dist: QuasiDistance) -> MembershipResult:
    """Trichotomy q vs closed ball B(center, radius), exact when possible."""
    try:
        sgn = dist.compare(center, q, radius)
        label = "outside" if sgn > 0 else ("boundary" if sgn == 0 else "inside")
        return MembershipResult(label, "exact", 0.0)
    except ExactnessError:
        v = dist.value(center, q)
        r = float(radius)
        margin = v - r
        label = "outside" if margin > 0 else ("boundary" if margin == 0 else "inside")
        return MembershipResult(label, "float", margin)


def hs_heisenberg_closed_form(p, q, R, group: GradedGroup) -> float:
    """Independent closed form of the HS distance on Heisenberg groups.

    For weights (1,...,1,2) the defining equation is a quadratic in lambda^2:
    with A the squared Euclidean norm of the first-layer displacement and z
    the last coordinate, d^2 = (A + sqrt(A^2 + 4 R^2 z^2)) / (2 R^2).
    Used as an oracle against the generic root finder.
    """
    x = multiply(tuple(-float(v) for v in p), tuple(float(v) for v in q), group)
    A = sum(v * v for v in x[:-1])
    z = x[-1]
    R = float(R)
    if A == 0 and z == 0:
        return 0.0
    lam2 = (A + math.sqrt(A * A + 4.0 * R * R * z * z)) / (2.0 * R * R)
    return math.sqrt(lam2)


# ---------------------------------------------------------------------------
# unit-ball oracle distances
# ---------------------------------------------------------------------------

class UnitBallDistance(QuasiDistance):
    """Gauge distance of a caller-supplied unit-ball membership oracle.

    The oracle must satisfy the star-interval property: for every p the set of
    lambda with delta_(1/lambda)(p) in K is a closed interval [d(e,p), inf).
    bound_radius is a Euclidean radius certainly containing K (for bracketing).
    """

    kind = "unit_ball_oracle"
    continuous = False  # caller knows; the shipped fixtures are discontinuous

    def __init__(self, group: GradedGroup, oracle, bound_radius: float, tol=1e-10):
        super().__init__(group)
        self.oracle = oracle
        self.bound_radius = float(bound_radius)
        self.tol = tol

    def _inside(self, x, lam):
        pt = dilate(tuple(x), 1.0 / lam, self.group, exact=False)
        return bool(self.oracle(pt))

    def value_from_identity(self, x):
        xf = tuple(float(v) for v in x)
        if not any(xf):
            return 0.0
        n = len(xf)
        w = [float(v) for v in self.weights]
        R = self.bound_radius
        lam_hi = max((abs(v) * math.sqrt(n) / (R * 0.5)) ** (1.0 / wi)
                     for v, wi in zip(xf, w) if v != 0)
        lam_hi = max(lam_hi, 1e-300)
        grow = 0
        while not self._inside(xf, lam_hi):
            lam_hi *= 2.0
            grow += 1
            if grow > 200:
                raise OracleError("bracketing failure: oracle never accepts large dilations")
        lam_lo = lam_hi
        shrink = 0
        while self._inside(xf, lam_lo):
            lam_lo *= 0.5
            shrink += 1
            if shrink > 2000:
                raise OracleError("bracketing failure: oracle accepts arbitrarily small dilations")
        for _ in range(200):
            mid = 0.5 * (lam_lo + lam_hi)
            if self._inside(xf, mid):
                lam_hi = mid
            else:
                lam_lo = mid
            if lam_hi - lam_lo <= self.tol * lam_hi:
                break
        return lam_hi


def unit_ball_distance(oracle, p, q, group: GradedGroup, bound_radius: float,
                       tol=1e-10) -> float:
    return UnitBallDistance(group, oracle, bound_radius, tol).value(p, q)


def disk_union_segment_ball() -> UnitBallDistance:
    """Plane quasi-distance whose unit ball is the closed unit disk plus the
    segment [-2, 2] x {0}; its gauge from the origin is discontinuous on the
    punctured x-axis."""
    plane = abelian_group([1, 1])

    def oracle(pt):
        x, y = pt
        return x * x + y * y <= 1.0 or (y == 0.0 and abs(x) <= 2.0)

    return UnitBallDistance(plane, oracle, bound_radius=2.0)


def punctured_disk_ball() -> UnitBallDistance:
    """Plane quasi-distance whose unit ball is the closed unit disk minus the
    half-open x-axis segments [-1, -1/2) and (1/2, 1]."""
    plane = abelian_group([1, 1])

    def oracle(pt):
        x, y = pt
        if x * x + y * y > 1.0:
            return False
        if y == 0.0 and 0.5 < abs(x) <= 1.0:
            return False
        return True

    return UnitBallDistance(plane, oracle, bound_radius=1.0)


# ---------------------------------------------------------------------------
# powers (snowflakes), products, lp-combinations
# ---------------------------------------------------------------------------

class PowerDistance(QuasiDistance):
    """d^(1/t): homogeneous on the t-power of the underlying group."""

    kind = "power"

    def __init__(self, base: QuasiDistance, t):
        self.base = base
        self.t = Fraction(t)
        if self.t <= 0:
            raise ValueError("power exponent must be positive")
        super().__init__(power_group(base.group, self.t))
        self.exact_capable = base.exact_capable
        self.continuous = base.continuous

    def value(self, p, q):
        return self.base.value(p, q) ** (1.0 / float(self.t))

    def value_from_identity(self, x):
        return self.base.value_from_identity(x) ** (1.0 / float(self.t))

    def value_from_identity_batch(self, X):
        return self.base.value_from_identity_batch(X) ** (1.0 / float(self.t))

    def compare(self, p, q, rho):
        rt = rat_pow(Fraction(rho), self.t)
        if rt is None:
            raise ExactnessError(f"radius {rho} has no exact power {self.t}")
        return self.base.compare(p, q, rt)

    def compare_from_identity(self, x, rho):
        rt = rat_pow(Fraction(rho), self.t)
        if rt is None:
            raise ExactnessError(f"radius {rho} has no exact power {self.t}")
        return self.base.compare_from_identity(x, rt)


def power_distance(d: QuasiDistance, t) -> PowerDistance:
    return PowerDistance(d, t)


def euclidean_line(R=Fraction(1)) -> HSDistance:
    """The line with |x - y| / R (HS distance on the 1-dimensional abelian group)."""
    return HSDistance(abelian_group([1]), R)


def snowflake_line(s=Fraction(2)) -> PowerDistance:
    """The line with |x - y|^(1/s)."""
    return PowerDistance(euclidean_line(), s)


class _CombinedDistance(QuasiDistance):
    """Shared plumbing for componentwise combinations on a product group."""

    def __init__(self, d1: QuasiDistance, d2: QuasiDistance):
        self.components = (d1, d2)
        group = product_group(d1.group, d2.group)
        k1 = len(d1.group.factor_slices) if d1.group.factor_slices else 1
        slices = group.factor_slices
        # regroup the flattened factor slices back into the two components
        self.slice1 = tuple(i for sl in slices[:k1] for i in sl)
        self.slice2 = tuple(i for sl in slices[k1:] for i in sl)
        super().__init__(group)
        self.exact_capable = d1.exact_capable and d2.exact_capable
        self.continuous = d1.continuous and d2.continuous

    def split(self, x):
        return (tuple(x[i] for i in self.slice1), tuple(x[i] for i in self.slice2))

    def split_batch(self, X):
        X = np.asarray(X, dtype=float)
        return X[:, list(self.slice1)], X[:, list(self.slice2)]


class ProductMaxDistance(_CombinedDistance):
    """max(d1, d2) on the direct product; preserves the weak covering property."""

    kind = "product_max"

    def value_from_identity(self, x):
        x1, x2 = self.split(x)
        return max(self.components[0].value_from_identity(x1),
                   self.components[1].value_from_identity(x2))

    def value_from_identity_batch(self, X):
        X1, X2 = self.split_batch(X)
        return np.maximum(self.components[0].value_from_identity_batch(X1),
                          self.components[1].value_from_identity_batch(X2))

    def compare_from_identity(self, x, rho):
        x1, x2 = self.split(x)
        s1 = self.components[0].compare_from_identity(x1, rho)
        s2 = self.components[1].compare_from_identity(x2, rho)
        if s1 > 0 or s2 > 0:
            return 1
        if s1 == 0 or s2 == 0:
            return 0
        return -1

    def compare(self, p, q, rho):
        df = multiply(inverse(tuple(Fraction(v) for v in p), self.group),
                      tuple(Fraction(v) for v in q), self.group)
        return self.compare_from_identity(df, rho)


class LpComboDistance(_CombinedDistance):
    """(d1^r + d2^r)^(1/r) on the direct product, r >= 1.

    Exact comparisons are available when r is an integer and the components
    expose exact values, or when r = 1 and one component has an exact rational
    value while the other supports exact comparison (the snowflake-product
    configuration used by the covering counterexamples).
    """

    kind = "lp_combo"

    def __init__(self, d1, d2, r):
        super().__init__(d1, d2)
        self.r = Fraction(r)
        if self.r < 1:
            raise ValueError("lp exponent must be >= 1")

    def value_from_identity(self, x):
        x1, x2 = self.split(x)
        rf = float(self.r)
        v1 = self.components[0].value_from_identity(x1)
        v2 = self.components[1].value_from_identity(x2)
        return (v1 ** rf + v2 ** rf) ** (1.0 / rf)

    def value_from_identity_batch(self, X):
        X1, X2 = self.split_batch(X)
        rf = float(self.r)
        v1 = self.components[0].value_from_identity_batch(X1)
        v2 = self.components[1].value_from_identity_batch(X2)
        return (v1 ** rf + v2 ** rf) ** (1.0 / rf)

    def compare_from_identity(self, x, rho):
        rho = Fraction(rho)
        x1, x2 = self.split(x)
        d1, d2 = self.components
        ex1 = d1.exact_value(tuple(Fraction(0) for _ in self.slice1), x1)
        ex2 = d2.exact_value(tuple(Fraction(0) for _ in self.slice2), x2)
        if ex1 is not None and ex2 is not None and self.r.denominator == 1:
            k = self.r.numerator
            s = ex1 ** k + ex2 ** k
            t = rho ** k
            return (s > t) - (s < t)
        if self.r == 1:
            for (exv, other, xo) in ((ex1, d2, x2), (ex2, d1, x1)):
                if exv is None:
                    continue
                rem = rho - exv
                if rem < 0:
                    return 1
                if rem == 0:
                    # d = exv + other >= rho, strict unless the other leg is 0
                    zo = all(Fraction(v) == 0 for v in xo)
                    return 0 if zo else 1
                return other.compare_from_identity(xo, rem)
        raise ExactnessError("no exact comparison for this lp combination")

    def compare(self, p, q, rho):
        df = multiply(inverse(tuple(Fraction(v) for v in p), self.group),
                      tuple(Fraction(v) for v in q), self.group)
        return self.compare_from_identity(df, rho)


def product_max_distance(d1, d2) -> ProductMaxDistance:
    return ProductMaxDistance(d1, d2)


def lp_combination_distance(d1, d2, r) -> LpComboDistance:
    return LpComboDistance(d1, d2, r)


# ---------------------------------------------------------------------------
# quotient distances through surjective graded morphisms
# ---------------------------------------------------------------------------

class QuotientDistance(QuasiDistance):
    """Distance induced on the target of a surjective graded morphism.

    d(p, q) = min over the kernel fiber of dhat(e, khat * lift(p)^-1 lift(q));
    left-invariance and homogeneity are inherited from upstairs.  The minimum
    is approximated by a deterministic sample batch over kernel coordinates
    followed by a simplex polish; ``grid_value`` is the independent refining
    grid oracle used in tests.
    """

    kind = "quotient"
    exact_capable = False

    def __init__(self, dhat: QuasiDistance, morphism: MorphismMatrix,
                 batch=192, polish=True):
        if not morphism.is_surjective():
            raise ValueError("quotient requires a surjective morphism")
        self.dhat = dhat
        self.morphism = morphism
        self.continuous = dhat.continuous
        target_group = make_group(morphism.target, name="quotient_target")
        super().__init__(target_group)
        self.section = _right_inverse_columns(morphism)   # source_dim x target_dim
        self.kernel = morphism.kernel_basis()              # rows in source coords
        self.batch = batch
        self.polish = polish

    # -- lifting -----------------------------------------------------------
    def lift(self, p):
        pf = [float(v) for v in p]
        return tuple(sum(self.section[r][c] * pf[c] for c in range(len(pf)))
                     for r in range(len(self.section)))

    def _fiber_displacements(self, p, q, T):
        """Displacements lift(p)^-1 * (k(t) * lift(q)) for rows t of T."""
        ghat = self.dhat.group
        phat = np.array(self.lift(p), dtype=float)
        qhat = np.array(self.lift(q), dtype=float)
        K = np.array([[float(v) for v in row] for row in self.kernel])
        kpts = T @ K
        m = len(T)
        Q = multiply_batch(kpts, np.repeat(qhat[None, :], m, axis=0), ghat)
        return multiply_batch(np.repeat(-phat[None, :], m, axis=0), Q, ghat)

    def _objective(self, p, q):
        def f(t):
            D = self._fiber_displacements(p, q, np.atleast_2d(np.asarray(t, float)))
            return float(self.dhat.value_from_identity_batch(D)[0])
        return f

    def value(self, p, q):
        kdim = len(self.kernel)
        if kdim == 0:
            return self.dhat.value(self.lift(p), self.lift(q))
        base = float(self.dhat.value(self.lift(p), self.lift(q)))
        if base == 0.0:
            return 0.0
        L = 4.0 * base
        rng = np.random.default_rng(12345)
        T = rng.uniform(-L, L, size=(self.batch, kdim))
        T[0] = 0.0
        vals = self.dhat.value_from_identity_batch(self._fiber_displacements(p, q, T))
        best_i = int(np.argmin(vals))
        best_t, best_v = T[best_i], float(vals[best_i])
        if self.polish:
            from scipy.optimize import minimize
            res = minimize(self._objective(p, q), best_t, method="Nelder-Mead",
                           options={"xatol": 1e-9, "fatol": 1e-12, "maxiter": 400})
            if res.fun <= best_v:
                best_v = float(res.fun)
        return best_v

    def lift_batch(self, P):
        P = np.asarray(P, dtype=float)
        S = np.array([[float(v) for v in row] for row in self.section])
        return P @ S.T

    def value_batch_refined(self, P, Q, samples=160, levels=4, shrink=3.0,
                            seed=2718):
        """Vectorized fiber minimization for many pairs at once.

        Deterministic multiscale sampling: each level draws kernel offsets in
        a box around the current per-pair best and shrinks the box.  Accuracy
        is set by samples and levels; used for bulk property tests where a
        per-pair simplex polish would be too slow.
        """
        P = np.asarray(P, dtype=float)
        Q = np.asarray(Q, dtype=float)
        m = len(P)
        kdim = len(self.kernel)
        Phat = self.lift_batch(P)
        Qhat = self.lift_batch(Q)
        ghat = self.dhat.group
        base = self.dhat.value_from_identity_batch(
            multiply_batch(-Phat, Qhat, ghat))
        if kdim == 0:
            return base
        K = np.array([[float(v) for v in row] for row in self.kernel])
        rng = np.random.default_rng(seed)
        centers = np.zeros((m, kdim))
        widths = 4.0 * np.maximum(base, 1e-300)
        best = base.copy()
        for _ in range(levels):
            offs = rng.uniform(-1.0, 1.0, size=(m, samples, kdim))
            offs[:, 0, :] = 0.0
            T = centers[:, None, :] + offs * widths[:, None, None]
            kpts = T.reshape(m * samples, kdim) @ K
            Qrep = np.repeat(Qhat, samples, axis=0)
            Prep = np.repeat(Phat, samples, axis=0)
            disp = multiply_batch(-Prep, multiply_batch(kpts, Qrep, ghat), ghat)
            vals = self.dhat.value_from_identity_batch(disp).reshape(m, samples)
            arg = np.argmin(vals, axis=1)
            level_best = vals[np.arange(m), arg]
            improved = level_best < best
            best = np.where(improved, level_best, best)
            centers = np.where(improved[:, None], T[np.arange(m), arg], centers)
            widths = widths / shrink
        return best

    def grid_value(self, p, q, resolution=16, levels=4, shrink=3.0):
        """Refining-grid minimization over the kernel box: the brute oracle."""
        kdim = len(self.kernel)
        if kdim == 0:
            return self.dhat.value(self.lift(p), self.lift(q))
        base = float(self.dhat.value(self.lift(p), self.lift(q)))
        if base == 0.0:
            return 0.0
        center = np.zeros(kdim)
        half = 4.0 * base
        best = base
        for _ in range(levels):
            axes = [np.linspace(c - half, c + half, resolution) for c in center]
            mesh = np.meshgrid(*axes, indexing="ij")
            T = np.stack([m.ravel() for m in mesh], axis=1)
            vals = self.dhat.value_from_identity_batch(
                self._fiber_displacements(p, q, T))
            i = int(np.argmin(vals))
            if vals[i] < best:
                best = float(vals[i])
                center = T[i]
            else:
                center = T[i] if vals[i] == best else center
            half /= shrink
        return best


def _right_inverse_columns(m: MorphismMatrix):
    """Exact right inverse S (source_dim x target_dim) with entries @ S = I."""
    A = m.entries
    nt, ns = len(A), len(A[0])
    aug = [list(A[r]) + [Fraction(1 if c == r else 0) for c in range(nt)]
           for r in range(nt)]
    red, pivots = rref(aug)
    S = [[Fraction(0)] * nt for _ in range(ns)]
    for rrow, pc in zip(red, pivots):
        if pc >= ns:
            raise ValueError("morphism is not surjective")
        for c in range(nt):
            S[pc][c] = rrow[ns + c]
    return tuple(tuple(row) for row in S)


def quotient_distance(dhat: QuasiDistance, morphism: MorphismMatrix,
                      **kw) -> QuotientDistance:
    return QuotientDistance(dhat, morphism, **kw)


# ---------------------------------------------------------------------------
# sub-Riemannian distance on the first Heisenberg group
# ---------------------------------------------------------------------------

def _cc_arc_parameter(mu: float) -> float:
    """Solve (theta - sin theta) / (8 sin^2(theta/2)) = mu for theta in (0, 2pi).

    The left side increases from 0 to infinity; Newton with bisection
    safeguard.  mu is |z| / rho^2 of the target point.
    """

    def f(th):
        s = math.sin(0.5 * th)
        return (th - math.sin(th)) / (8.0 * s * s)

    lo, hi = 1e-12, TWO_PI - 1e-12
    if mu <= f(lo):
        return lo
    if mu >= f(hi):
        return hi
    th = min(max(12.0 * mu, lo), 0.9 * TWO_PI) if mu < 0.5 else 0.5 * TWO_PI
    for _ in range(100):
        s = math.sin(0.5 * th)
        c = math.cos(0.5 * th)
        val = (th - math.sin(th)) / (8.0 * s * s)
        if val > mu:
            hi = th
        else:
            lo = th
        dval = 0.25 - (th - math.sin(th)) * c / (8.0 * s ** 3)
        step = (val - mu) / dval if dval != 0 else 0.0
        nt = th - step
        if not (lo < nt < hi):
            nt = 0.5 * (lo + hi)
        if abs(nt - th) <= 1e-15 * th:
            th = nt
            break
        th = nt
    return th


def cc_distance_h1_from_identity(x: float, y: float, z: float, a: float = 1.0) -> float:
    """Exact sub-Riemannian distance from the identity on the first Heisenberg
    group, for the metric making (aX, aY) orthonormal.

    Planar displacement rho and area budget |z| determine a circular-arc
    geodesic; pure vertical targets are reached by full circles of length
    2 sqrt(pi |z|), pure horizontal ones by straight segments.
    """
    rho2 = x * x + y * y
    zz = abs(z)
    if zz <= 1e-14 * rho2:
        return math.sqrt(rho2) / a
    if rho2 == 0.0:
        return 2.0 * math.sqrt(math.pi * zz) / a
    mu = zz / rho2
    if mu >= 1e10:
        # near-axis asymptotics: full circle minus the chord
        return (2.0 * math.sqrt(math.pi * zz) - math.sqrt(rho2)) / a
    th = _cc_arc_parameter(mu)
    rho = math.sqrt(rho2)
    return rho * th / (2.0 * math.sin(0.5 * th)) / a


class CCHeisenbergDistance(QuasiDistance):
    """Sub-Riemannian distance on the first Heisenberg group (scale a).

    Left-invariant and one-homogeneous with respect to the standard dilations
    (lambda, lambda, lambda^2).  Float backend only.
    """

    kind = "cc_h1"
    exact_capable = False
    continuous = True

    def __init__(self, a=1.0):
        super().__init__(heisenberg_group(1))
        self.a = float(a)
        if self.a <= 0:
            raise ValueError("scale must be positive")

    def value_from_identity(self, x):
        return cc_distance_h1_from_identity(float(x[0]), float(x[1]), float(x[2]), self.a)

    def value_from_identity_batch(self, X):
        X = np.asarray(X, dtype=float)
        return np.array([cc_distance_h1_from_identity(r[0], r[1], r[2], self.a)
                         for r in X])


def cc_distance_h1(p, q, a=1.0) -> float:
    return CCHeisenbergDistance(a).value(p, q)


# ---------------------------------------------------------------------------
# finite metric spaces (rational distance tables)
# ---------------------------------------------------------------------------

class FiniteSpaceDistance(QuasiDistance):
    """Distance given by an exact rational table on labeled points.

    Points are integer indices.  Exact comparisons are table lookups.
    """

    kind = "finite_space"
    exact_capable = True
    homogeneous = False

    def __init__(self, table):
        self.table = table
        self.n = len(table)
        self.group = None

    def identity(self):
        return 0

    def value(self, i, j):
        return float(self.table[int(i)][int(j)])

    def exact(self, i, j) -> Fraction:
        return self.table[int(i)][int(j)]

    def compare(self, i, j, rho):
        d = self.table[int(i)][int(j)]
        rho = Fraction(rho)
        return (d > rho) - (d < rho)

    def exact_value(self, i, j):
        return self.table[int(i)][int(j)]


# ---------------------------------------------------------------------------
# generic utilities
# ---------------------------------------------------------------------------

def boundary_sample(d: QuasiDistance, u) -> tuple:
    """Rescale u by a dilation onto the unit sphere of d (float backend)."""
    lam = d.value(d.identity(), u)
    if lam <= 0:
        raise ValueError("cannot project the identity to the unit sphere")
    return dilate(tuple(float(v) for v in u), 1.0 / lam, d.group, exact=False)


def default_sampler(d: QuasiDistance, shell=(0.05, 1.0)):
    """Gaussian directions pushed to the unit sphere, then spread over dilation
    shells with log-uniform factors; returns f(rng, m) -> (m, n) float array."""
    group = d.group
    n = group.dim
    lo, hi = shell

    def sample(rng, m):
        V = rng.standard_normal((m, n))
        norms = np.linalg.norm(V, axis=1, keepdims=True)
        norms[norms == 0] = 1.0
        V = V / norms
        lam = d.value_from_identity_batch(V)
        lam[lam == 0] = 1.0
        V = dilate_batch(V, 1.0 / lam, group)
        shells = np.exp(rng.uniform(math.log(lo), math.log(hi), size=m))
        return dilate_batch(V, shells, group)

    return sample


def estimate_quasi_triangle_constant(d: QuasiDistance, sample_count: int,
                                     seed=0, sampler=None,
                                     mode="both") -> float:
    """Empirical quasi-triangle constant: max d(p,q) / (d(p,m) + d(m,q)).

    mode "random" draws independent triples; mode "chain" probes the sharper
    configuration (e, u, u*v) with u, v on dilation spheres, where the
    denominator d(e,u) + d(u, u*v) is the two sphere radii exactly; "both"
    takes the larger estimate.
    """
    rng = np.random.default_rng(seed)
    sampler = sampler or default_sampler(d)
    best = 0.0
    if mode in ("random", "both"):
        P = sampler(rng, sample_count)
        M = sampler(rng, sample_count)
        Q = sampler(rng, sample_count)
        num = d.value_batch(P, Q)
        den = d.value_batch(P, M) + d.value_batch(M, Q)
        ok = den > 0
        if np.any(ok):
            best = float(np.max(num[ok] / den[ok]))
    if mode in ("chain", "both") and d.group is not None:
        U = sampler(rng, sample_count)
        V = sampler(rng, sample_count)
        ru = d.value_from_identity_batch(U)
        rv = d.value_from_identity_batch(V)
        W = multiply_batch(U, V, d.group)
        num = d.value_from_identity_batch(W)
        den = ru + rv
        ok = den > 0
        if np.any(ok):
            best = max(best, float(np.max(num[ok] / den[ok])))
    return best


def packing_count(d: QuasiDistance, center, radius, lam, candidates=None,
                  budget=4096, seed=0) -> int:
    """Greedy maximal set of points in B(center, lam * radius) pairwise at
    least ``radius`` apart.  Candidates may be supplied explicitly (for
    exhaustive small cases) or sampled around the center."""
    r = float(radius)
    ball_r = float(lam) * r
    if candidates is None:
        rng = np.random.default_rng(seed)
        sampler = default_sampler(d, shell=(1e-3, 1.0))
        raw = sampler(rng, budget)
        raw = dilate_batch(raw, ball_r, d.group)
        cf = np.array([float(v) for v in center])
        candidates = multiply_batch(np.repeat(cf[None, :], len(raw), axis=0),
                                    raw, d.group)
    chosen = []
    c = tuple(float(v) for v in center)
    for row in np.asarray(candidates, dtype=float):
        pt = tuple(row)
        if d.value(c, pt) > ball_r:
            continue
        if all(d.value(pt, other) >= r for other in chosen):
            chosen.append(pt)
    return len(chosen)


# ---------------------------------------------------------------------------
# negative-type gauge on Heisenberg groups (derived-oracle comparison)
# ---------------------------------------------------------------------------

def lee_naor_gauge(p) -> float:
    """Quartic-root gauge on Heisenberg coordinates (x_1..x_n, y_1..y_n, z):

        ((sum x^2+y^2)^2 + sqrt((sum x^2+y^2)^2 + 16 z^2))^(1/4)

    Shipped verbatim for comparison purposes.  Note the expression is NOT
    one-homogeneous under the standard dilations (the two addends scale with
    different powers), so it cannot globally be a constant multiple of any
    homogeneous distance; see lee_naor_comparison.
    """
    p = tuple(float(v) for v in p)
    A = sum(v * v for v in p[:-1])
    z = p[-1]
    return (A * A + math.sqrt(A * A + 16.0 * z * z)) ** 0.25


def lee_naor_comparison(n=1, samples=2000, seed=0) -> dict:
    """Compare the HS distance at R=2 on the n-th Heisenberg group against the
    quartic gauge and against the homogeneous closed form.

    Reports (a) the maximum relative deviation of d_2 from 8^(-1/4) times the
    quartic gauge (expected to be large: the printed gauge is inhomogeneous),
    and (b) the maximum relative deviation of d_2^2 from
    (A + sqrt(A^2 + 16 z^2)) / 8 (expected at solver tolerance).
    """
    group = heisenberg_group(n)
    d2 = HSDistance(group, Fraction(2))
    rng = np.random.default_rng(seed)
    P = rng.standard_normal((samples, group.dim)) * \
        np.exp(rng.uniform(-3, 3, size=(samples, 1)))
    e = np.zeros((samples, group.dim))
    vals = d2.value_batch(e, P)
    A = (P[:, :-1] ** 2).sum(axis=1)
    z = P[:, -1]
    closed_sq = (A + np.sqrt(A * A + 16.0 * z * z)) / 8.0
    gauge = (A * A + np.sqrt(A * A + 16.0 * z * z)) ** 0.25
    scaled = 8.0 ** -0.25 * gauge
    ok = vals > 0
    dev_closed = float(np.max(np.abs(vals[ok] ** 2 - closed_sq[ok]) / closed_sq[ok]))
    dev_gauge = float(np.max(np.abs(vals[ok] - scaled[ok]) / vals[ok]))
    return {
        "closed_form_rel_dev": dev_closed,
        "quartic_gauge_rel_dev": dev_gauge,
        "quartic_gauge_matches": bool(dev_gauge <= 1e-6),
        "note": ("the quartic gauge as printed is not one-homogeneous under the "
                 "group dilations; only the homogeneous closed form reproduces "
                 "the R=2 Euclidean-ball distance"),
    }
