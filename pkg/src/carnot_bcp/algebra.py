"""Graded nilpotent Lie algebras and their groups, in exponential coordinates.

An algebra is given by structure constants on a weighted basis: basis vector i
carries a positive rational weight w_i (the degree of the layer containing it)
and the bracket is the bilinear extension of a sparse table
[X_i, X_j] = sum_k c_ijk X_k.  The basis is kept in adapted order (weights
non-decreasing) so layer projections are contiguous slices.

The group sits on the same coordinates through the exponential map.  The
product is the Baker-Campbell-Hausdorff series, implemented in closed form
through step 3:

    p * q = p + q + [p,q]/2 + ([p,[p,q]] + [q,[q,p]])/12

which is the exact group law for every group of nilpotency step <= 3 (all the
groups this package constructs).  With rational inputs every operation here is
exact; batch variants operate on float numpy arrays for search workloads.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .exact_linalg import rank, span_basis
from .scalars import fmt_scalar, nth_root_exact, parse_scalar

MAX_SUPPORTED_STEP = 3


class AlgebraError(ValueError):
    """Malformed structure constants or out-of-contract request."""


class UnsupportedStepError(AlgebraError):
    """Group law requested beyond the implemented BCH truncation depth."""


class ExactnessError(AlgebraError):
    """An exact-mode operation would produce an irrational result."""


# ---------------------------------------------------------------------------
# structure constants
# ---------------------------------------------------------------------------

def _normalize_bracket(dim, bracket):
    """Canonicalize a sparse bracket table to keys (i, j) with i < j, 0-based.

    Accepts entries for (i, j) and/or (j, i); when both orientations appear
    they must be antisymmetric negatives of each other.  Zero coefficients
    are dropped.
    """
    table = {}
    for (i, j), terms in bracket.items():
        if not (0 <= i < dim and 0 <= j < dim):
            raise AlgebraError(f"bracket index pair ({i},{j}) out of range for dim {dim}")
        if i == j:
            if any(c != 0 for _, c in terms):
                raise AlgebraError(f"nonzero bracket [X_{i},X_{i}]")
            continue
        sign = 1
        key = (i, j)
        if i > j:
            sign, key = -1, (j, i)
        acc = {}
        for k, c in terms:
            if not 0 <= k < dim:
                raise AlgebraError(f"bracket target index {k} out of range for dim {dim}")
            acc[k] = acc.get(k, Fraction(0)) + Fraction(c) * sign
        entry = tuple(sorted((k, v) for k, v in acc.items() if v != 0))
        if key in table and table[key] != entry:
            raise AlgebraError(
                f"bracket pair {key} given in both orientations with"
                " inconsistent (non-antisymmetric) coefficients")
        table[key] = entry
    return {k: v for k, v in table.items() if v}


@dataclass(frozen=True)
class StructureConstants:
    """A graded Lie algebra: dimension, layer weights, sparse bracket table.

    bracket maps (i, j) with i < j (0-based) to a tuple of (k, coefficient);
    [X_j, X_i] = -[X_i, X_j] is implied.
    """

    dim: int
    weights: tuple
    bracket: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.dim < 1:
            raise AlgebraError("dimension must be >= 1")
        w = tuple(Fraction(x) for x in self.weights)
        if len(w) != self.dim:
            raise AlgebraError("weights length must equal dim")
        if any(x <= 0 for x in w):
            raise AlgebraError("weights must be positive")
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "bracket", _normalize_bracket(self.dim, self.bracket))

    def __hash__(self):
        return hash((self.dim, self.weights, tuple(sorted(self.bracket.items()))))

    def __eq__(self, other):
        return (isinstance(other, StructureConstants)
                and self.dim == other.dim and self.weights == other.weights
                and self.bracket == other.bracket)

    def layers(self):
        """Map weight -> tuple of basis indices (the layer decomposition)."""
        out = {}
        for i, w in enumerate(self.weights):
            out.setdefault(w, []).append(i)
        return {w: tuple(ix) for w, ix in sorted(out.items())}

    def bracket_pair(self, i, j):
        """Coefficient list of [X_i, X_j] as a tuple of (k, c)."""
        if i == j:
            return ()
        if i < j:
            return self.bracket.get((i, j), ())
        return tuple((k, -c) for k, c in self.bracket.get((j, i), ()))

    def step(self) -> int:
        """Nilpotency step: length of the lower central series."""
        full = [_unit(self.dim, i) for i in range(self.dim)]
        current = full
        s = 0
        while current:
            s += 1
            nxt = []
            for a in full:
                for b in current:
                    v = bracket(a, b, self)
                    if any(c != 0 for c in v):
                        nxt.append(v)
            current = span_basis(nxt)
        return s


def _unit(n, i):
    v = [Fraction(0)] * n
    v[i] = Fraction(1)
    return tuple(v)


def bracket(a, b, alg: StructureConstants):
    """[a, b]: bilinear extension of the structure constants. Exact on rationals."""
    if len(a) != alg.dim or len(b) != alg.dim:
        raise AlgebraError("vector length does not match algebra dimension")
    out = [0 * (a[0] + b[0])] * alg.dim
    for (i, j), terms in alg.bracket.items():
        coef = a[i] * b[j] - a[j] * b[i]
        if coef == 0:
            continue
        for k, c in terms:
            out[k] = out[k] + c * coef
    return tuple(out)


# ---------------------------------------------------------------------------
# validation
# ---------------------------------------------------------------------------

@dataclass
class ValidationReport:
    ok: bool
    issues: list

    def __bool__(self):
        return self.ok

    def to_json(self):
        return {"ok": self.ok, "issues": self.issues}


def validate_algebra(alg: StructureConstants) -> ValidationReport:
    """Check grading compatibility, Jacobi, and nilpotency; list every violation.

    Antisymmetry is canonical by construction (only i<j pairs are stored), so
    the report focuses on the two identities that can actually fail for a
    normalized table, plus index sanity already enforced at construction.
    """
    issues = []
    w = alg.weights
    for (i, j), terms in alg.bracket.items():
        for k, c in terms:
            if c != 0 and w[k] != w[i] + w[j]:
                issues.append({
                    "kind": "grading",
                    "pair": [i + 1, j + 1],
                    "target": k + 1,
                    "detail": f"weight {w[k]} != {w[i]} + {w[j]}",
                })
    units = [_unit(alg.dim, i) for i in range(alg.dim)]
    for i in range(alg.dim):
        for j in range(i + 1, alg.dim):
            for k in range(j + 1, alg.dim):
                jac = _vec_add(
                    bracket(units[i], bracket(units[j], units[k], alg), alg),
                    _vec_add(
                        bracket(units[j], bracket(units[k], units[i], alg), alg),
                        bracket(units[k], bracket(units[i], units[j], alg), alg)))
                if any(c != 0 for c in jac):
                    issues.append({
                        "kind": "jacobi",
                        "triple": [i + 1, j + 1, k + 1],
                        "detail": "cyclic bracket sum is nonzero",
                    })
    # positive weights + grading compatibility force nilpotency; surface the
    # computed step so callers can see it, and flag the (impossible for a
    # grading-clean table, but cheap to check) runaway case.
    if not issues:
        s = alg.step()
        if s > len(set(alg.weights)) + alg.dim:
            issues.append({"kind": "nilpotency", "detail": f"step {s} exceeds bound"})
    return ValidationReport(ok=not issues, issues=issues)


def _vec_add(a, b):
    return tuple(x + y for x, y in zip(a, b))


def _vec_scale(a, s):
    return tuple(s * x for x in a)


# ---------------------------------------------------------------------------
# groups
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GradedGroup:
    """A simply connected graded group identified with its algebra coordinates."""

    algebra: StructureConstants
    step: int
    name: str = ""
    # index tuples of the direct factors, for product groups ((),) otherwise
    factor_slices: tuple = ()
    params: tuple = ()

    @property
    def dim(self):
        return self.algebra.dim

    @property
    def weights(self):
        return self.algebra.weights

    def identity(self):
        return tuple(Fraction(0) for _ in range(self.dim))

    def __hash__(self):
        return hash((self.algebra, self.step, self.name))


def make_group(alg: StructureConstants, name="", factor_slices=(), params=()) -> GradedGroup:
    report = validate_algebra(alg)
    if not report.ok:
        raise AlgebraError(f"invalid algebra for group '{name}': {report.issues}")
    return GradedGroup(algebra=alg, step=alg.step(), name=name,
                       factor_slices=factor_slices, params=params)


def multiply(p, q, group: GradedGroup):
    """BCH product in exponential coordinates; exact for rational inputs."""
    if group.step > MAX_SUPPORTED_STEP:
        raise UnsupportedStepError(
            f"group step {group.step} exceeds supported truncation {MAX_SUPPORTED_STEP}")
    alg = group.algebra
    out = _vec_add(tuple(p), tuple(q))
    pq = bracket(p, q, alg)
    if any(c != 0 for c in pq):
        out = _vec_add(out, _vec_scale(pq, Fraction(1, 2)))
    if group.step >= 3:
        ppq = bracket(p, pq, alg)
        qqp = bracket(q, _vec_scale(pq, -1), alg)
        corr = _vec_add(ppq, qqp)
        if any(c != 0 for c in corr):
            out = _vec_add(out, _vec_scale(corr, Fraction(1, 12)))
    return out


def inverse(p, group: GradedGroup):
    """Group inverse: exp(v)^(-1) = exp(-v), exact."""
    if group.step > MAX_SUPPORTED_STEP:
        raise UnsupportedStepError(
            f"group step {group.step} exceeds supported truncation {MAX_SUPPORTED_STEP}")
    return tuple(-x for x in p)


def conjugate_difference(p, q, group: GradedGroup):
    """p^-1 * q, the displacement entering every left-invariant distance."""
    return multiply(inverse(p, group), q, group)


def dilate(p, lam, group: GradedGroup, exact=None):
    """Coordinate i scaled by lam**w_i.

    exact=True demands a rational result: lam must be rational and, when the
    weights have common denominator q > 1, a perfect q-th power.  exact=None
    picks the backend from the input types.
    """
    w = group.weights
    if exact is None:
        exact = isinstance(lam, (Fraction, int)) and all(
            isinstance(x, (Fraction, int)) for x in p)
    if exact:
        lam = Fraction(lam)
        if lam <= 0:
            raise AlgebraError("dilation factor must be positive")
        factors = []
        for wi in w:
            f = None
            if wi.denominator == 1:
                f = lam ** wi.numerator
            else:
                root = nth_root_exact(lam, wi.denominator)
                if root is not None:
                    f = root ** wi.numerator
            if f is None:
                raise ExactnessError(
                    f"lambda={lam} has no exact power for weight {wi}")
            factors.append(f)
        return tuple(x * f for x, f in zip(p, factors))
    lamf = float(lam)
    if lamf <= 0:
        raise AlgebraError("dilation factor must be positive")
    return tuple(float(x) * lamf ** float(wi) for x, wi in zip(p, w))


# ---------------------------------------------------------------------------
# float batch backend (numpy); used by searches and solvers
# ---------------------------------------------------------------------------

def bracket_batch(A, B, alg: StructureConstants):
    """Rowwise bracket of float arrays of shape (m, n)."""
    out = np.zeros_like(A)
    for (i, j), terms in alg.bracket.items():
        coef = A[:, i] * B[:, j] - A[:, j] * B[:, i]
        for k, c in terms:
            out[:, k] += float(c) * coef
    return out


def multiply_batch(P, Q, group: GradedGroup):
    """Rowwise BCH product on float arrays of shape (m, n)."""
    if group.step > MAX_SUPPORTED_STEP:
        raise UnsupportedStepError("unsupported step")
    P = np.asarray(P, dtype=float)
    Q = np.asarray(Q, dtype=float)
    alg = group.algebra
    out = P + Q
    pq = bracket_batch(P, Q, alg)
    out = out + 0.5 * pq
    if group.step >= 3:
        out = out + (bracket_batch(P, pq, alg) + bracket_batch(Q, -pq, alg)) / 12.0
    return out


def dilate_batch(P, lam, group: GradedGroup):
    """Rowwise dilation; lam is a scalar or an (m,) array."""
    P = np.asarray(P, dtype=float)
    lam = np.asarray(lam, dtype=float)
    w = np.array([float(x) for x in group.weights])
    if lam.ndim == 0:
        return P * lam ** w
    return P * lam[:, None] ** w[None, :]


# ---------------------------------------------------------------------------
# built-in groups
# ---------------------------------------------------------------------------

def abelian_group(weights) -> GradedGroup:
    """R^n with the abelian law and dilations lam^w_i per coordinate."""
    w = sorted(Fraction(x) for x in weights)
    alg = StructureConstants(dim=len(w), weights=tuple(w), bracket={})
    return make_group(alg, name=f"abelian{tuple(map(str, w))}")


def heisenberg_group(n: int) -> GradedGroup:
    """n-th Heisenberg group, standard stratification, basis (X_1..X_n, Y_1..Y_n, Z)."""
    if n < 1:
        raise AlgebraError("heisenberg index must be >= 1")
    dim = 2 * n + 1
    weights = tuple([Fraction(1)] * (2 * n) + [Fraction(2)])
    br = {(j, n + j): ((dim - 1, Fraction(1)),) for j in range(n)}
    alg = StructureConstants(dim=dim, weights=weights, bracket=br)
    return make_group(alg, name=f"heisenberg({n})", params=(("n", n),))


def heisenberg_nonstandard_group(alpha) -> GradedGroup:
    """First Heisenberg group graded by weights (1, alpha, alpha+1), alpha > 1.

    Same group law as heisenberg(1); only the dilations differ.  This grading
    is not a stratification and the degree-1 and degree-alpha layers do not
    commute, which is exactly what makes the group the minimal BCP obstruction.
    """
    a = Fraction(alpha)
    if a <= 1:
        raise AlgebraError("nonstandard exponent must be > 1")
    weights = (Fraction(1), a, a + 1)
    br = {(0, 1): ((2, Fraction(1)),)}
    alg = StructureConstants(dim=3, weights=weights, bracket=br)
    return make_group(alg, name=f"heisenberg_nonstandard({a})", params=(("alpha", a),))


def free_step2_group(r: int) -> GradedGroup:
    """Free-nilpotent group of step 2 and rank r.

    Basis X_1..X_r (weight 1) followed by X_ij = [X_i, X_j] for i < j in
    lexicographic order (weight 2); dim = r + r(r-1)/2.
    """
    if r < 2:
        raise AlgebraError("free step-2 rank must be >= 2")
    pairs = [(i, j) for i in range(r) for j in range(i + 1, r)]
    dim = r + len(pairs)
    weights = tuple([Fraction(1)] * r + [Fraction(2)] * len(pairs))
    br = {(i, j): ((r + idx, Fraction(1)),) for idx, (i, j) in enumerate(pairs)}
    alg = StructureConstants(dim=dim, weights=weights, bracket=br)
    return make_group(alg, name=f"free_step2({r})", params=(("rank", r),))


def product_group(g: GradedGroup, h: GradedGroup) -> GradedGroup:
    """Direct product, layers merged weight-by-weight.

    The combined basis is stably re-sorted so weights stay non-decreasing;
    factor_slices records where each factor's coordinates ended up.
    """
    parts = []
    for fi, grp in enumerate((g, h)):
        base_slices = grp.factor_slices or (tuple(range(grp.dim)),)
        parts.append((grp, base_slices))
    combined = []  # (weight, factor_index, local_index)
    offset = 0
    for fi, (grp, _) in enumerate(parts):
        for li, w in enumerate(grp.weights):
            combined.append((w, fi, li))
        offset += grp.dim
    order = sorted(range(len(combined)), key=lambda t: (combined[t][0], combined[t][1], combined[t][2]))
    new_pos = {combined[t][1:]: pos for pos, t in enumerate(order)}
    dim = len(combined)
    weights = tuple(combined[t][0] for t in order)
    br = {}
    for fi, (grp, _) in enumerate(parts):
        for (i, j), terms in grp.algebra.bracket.items():
            ni, nj = new_pos[(fi, i)], new_pos[(fi, j)]
            nterms = tuple((new_pos[(fi, k)], c) for k, c in terms)
            if ni < nj:
                br[(ni, nj)] = nterms
            else:
                br[(nj, ni)] = tuple((k, -c) for k, c in nterms)
    slices = []
    for fi, (grp, base_slices) in enumerate(parts):
        for sl in base_slices:
            slices.append(tuple(new_pos[(fi, li)] for li in sl))
    alg = StructureConstants(dim=dim, weights=weights, bracket=br)
    return make_group(alg, name=f"product({g.name},{h.name})",
                      factor_slices=tuple(slices))


def power_group(g: GradedGroup, t) -> GradedGroup:
    """t-power: same algebra, every layer weight multiplied by t > 0."""
    t = Fraction(t)
    if t <= 0:
        raise AlgebraError("power exponent must be positive")
    alg = StructureConstants(dim=g.dim, weights=tuple(w * t for w in g.weights),
                             bracket=g.algebra.bracket)
    return make_group(alg, name=f"power({g.name},{t})",
                      factor_slices=g.factor_slices, params=(("t", t),))


def step3_rank3_group() -> GradedGroup:
    """Stratified step-3 group of rank 3 with the single relation [e2,e3] = 0.

    dim 10; used as the step-3 fixture: its grading is a stratification, but
    the slanted subspace span{e1, e2+[e1,e2], e3} is in direct sum with the
    derived algebra yet fails to generate a stratification.
    """
    # basis: e1 e2 e3 | f12 f13 | g112 g113 g212 g213 g313
    names = dict(e1=0, e2=1, e3=2, f12=3, f13=4, g112=5, g113=6, g212=7, g213=8, g313=9)
    one = Fraction(1)
    br = {
        (names["e1"], names["e2"]): ((names["f12"], one),),
        (names["e1"], names["e3"]): ((names["f13"], one),),
        (names["e1"], names["f12"]): ((names["g112"], one),),
        (names["e1"], names["f13"]): ((names["g113"], one),),
        (names["e2"], names["f12"]): ((names["g212"], one),),
        (names["e2"], names["f13"]): ((names["g213"], one),),
        (names["e3"], names["f12"]): ((names["g213"], one),),
        (names["e3"], names["f13"]): ((names["g313"], one),),
    }
    weights = tuple([Fraction(1)] * 3 + [Fraction(2)] * 2 + [Fraction(3)] * 5)
    alg = StructureConstants(dim=10, weights=weights, bracket=br)
    return make_group(alg, name="step3_rank3")


_BUILTINS = {
    "abelian": lambda **kw: abelian_group(kw["weights"]),
    "heisenberg": lambda **kw: heisenberg_group(int(kw["n"])),
    "heisenberg_nonstandard": lambda **kw: heisenberg_nonstandard_group(kw["alpha"]),
    "free_step2": lambda **kw: free_step2_group(int(kw["rank"])),
    "step3_rank3": lambda **kw: step3_rank3_group(),
}


def builtin_group(name: str, **params) -> GradedGroup:
    """Construct a validated built-in group by tag.

    Tags: abelian(weights=...), heisenberg(n=...), heisenberg_nonstandard(alpha=...),
    free_step2(rank=...), step3_rank3().  Products and powers are built with
    product_group / power_group on existing groups.
    """
    if name not in _BUILTINS:
        raise AlgebraError(f"unknown built-in group tag '{name}'")
    return _BUILTINS[name](**params)


# ---------------------------------------------------------------------------
# group-definition JSON (rationals as "p/q" strings, 1-based indices)
# ---------------------------------------------------------------------------

def group_to_json(group: GradedGroup) -> dict:
    alg = group.algebra
    return {
        "dim": alg.dim,
        "weights": [fmt_scalar(w) for w in alg.weights],
        "brackets": [
            {"i": i + 1, "j": j + 1,
             "terms": [{"k": k + 1, "c": fmt_scalar(c)} for k, c in terms]}
            for (i, j), terms in sorted(alg.bracket.items())
        ],
        "name": group.name,
    }


def group_from_json(data) -> GradedGroup:
    if isinstance(data, str):
        data = json.loads(data)
    dim = int(data["dim"])
    weights = tuple(parse_scalar(w) for w in data["weights"])
    br = {}
    for ent in data.get("brackets", []):
        i, j = int(ent["i"]) - 1, int(ent["j"]) - 1
        terms = tuple((int(t["k"]) - 1, parse_scalar(t["c"])) for t in ent["terms"])
        br[(i, j)] = terms
    alg = StructureConstants(dim=dim, weights=weights, bracket=br)
    return make_group(alg, name=data.get("name", "from_json"))


def load_group(path) -> GradedGroup:
    with open(path, "r", encoding="utf-8") as fh:
        return group_from_json(json.load(fh))


def save_group(group: GradedGroup, path):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(group_to_json(group), fh, indent=2, sort_keys=True)
        fh.write("\n")
