"""Exact polynomial vector fields on (y, v) and their Lie brackets.

Coordinates are ordered ``y_1..y_d, v_1..v_d``. Polynomials are dicts from
exponent tuples (length 2d) to :class:`fractions.Fraction` coefficients, with
zero coefficients never stored.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Iterable, Mapping, Sequence

Poly = dict  # tuple[int, ...] -> Fraction


def _clean(p: Mapping) -> Poly:
    return {k: c for k, c in p.items() if c != 0}


def poly_add(p: Poly, q: Poly, scale=1) -> Poly:
    out = dict(p)
    for k, c in q.items():
        out[k] = out.get(k, 0) + scale * c
    return _clean(out)


def poly_mul(p: Poly, q: Poly) -> Poly:
    out: Poly = {}
    for k1, c1 in p.items():
        for k2, c2 in q.items():
            k = tuple(a + b for a, b in zip(k1, k2))
            out[k] = out.get(k, 0) + c1 * c2
    return _clean(out)


def poly_diff(p: Poly, var: int) -> Poly:
    out: Poly = {}
    for k, c in p.items():
        e = k[var]
        if e:
            kk = list(k)
            kk[var] = e - 1
            out[tuple(kk)] = c * e
    return out


def poly_degree(p: Poly) -> int:
    return max((sum(k) for k in p), default=-1)


def monomial(nvars: int, var: int, coeff=1) -> Poly:
    k = [0] * nvars
    k[var] = 1
    return {tuple(k): Fraction(coeff)}


@dataclass(frozen=True)
class PolyVectorField:
    dim: int
    components: tuple  # 2*dim polys: y-components then v-components

    def __post_init__(self):
        if len(self.components) != 2 * self.dim:
            raise ValueError("a field on (y, v) needs 2*dim components")
        comps = []
        for c in self.components:
            c = _clean({tuple(k): Fraction(v) for k, v in c.items()})
            for k in c:
                if len(k) != 2 * self.dim or min(k) < 0:
                    raise ValueError(f"bad exponent vector {k}")
            comps.append(c)
        object.__setattr__(self, "components", tuple(comps))

    @property
    def nvars(self) -> int:
        return 2 * self.dim

    def y(self, i: int) -> Poly:
        return self.components[i]

    def v(self, i: int) -> Poly:
        return self.components[self.dim + i]

    def is_zero(self) -> bool:
        return all(not c for c in self.components)

    def apply(self, f: Poly) -> Poly:
        """Lie derivative of the scalar polynomial ``f`` along this field."""
        out: Poly = {}
        for var, comp in enumerate(self.components):
            if comp:
                out = poly_add(out, poly_mul(comp, poly_diff(f, var)))
        return out

    def __add__(self, other: "PolyVectorField") -> "PolyVectorField":
        return PolyVectorField(
            self.dim, tuple(poly_add(a, b) for a, b in zip(self.components, other.components))
        )

    def __sub__(self, other: "PolyVectorField") -> "PolyVectorField":
        return PolyVectorField(
            self.dim, tuple(poly_add(a, b, -1) for a, b in zip(self.components, other.components))
        )

    def scale(self, c) -> "PolyVectorField":
        return PolyVectorField(self.dim, tuple({k: c * x for k, x in p.items()} for p in self.components))

    def __eq__(self, other):
        return (
            isinstance(other, PolyVectorField)
            and self.dim == other.dim
            and self.components == other.components
        )

    def __hash__(self):
        return hash((self.dim, tuple(frozenset(c.items()) for c in self.components)))


def zero_field(dim: int) -> PolyVectorField:
    return PolyVectorField(dim, tuple({} for _ in range(2 * dim)))


def field_A(dim: int) -> PolyVectorField:
    """Drift field: y-components v_i, v-components zero."""
    n = 2 * dim
    comps = [monomial(n, dim + i) for i in range(dim)] + [{} for _ in range(dim)]
    return PolyVectorField(dim, tuple(comps))


def field_B(g: Sequence[Poly]) -> PolyVectorField:
    """Kick field: y-components zero, v-components g_i(y)."""
    dim = len(g)
    for gi in g:
        for k in gi:
            if len(k) != 2 * dim:
                raise ValueError("g must be given over the 2*dim variables (y, v)")
            if any(k[dim:]):
                raise ValueError("g must depend on y only")
    comps = [{} for _ in range(dim)] + [dict(gi) for gi in g]
    return PolyVectorField(dim, tuple(comps))


def bracket(F: PolyVectorField, G: PolyVectorField) -> PolyVectorField:
    """Field of the commutator ``L_F L_G - L_G L_F``.

    Component c is ``sum_k F_k dG_c/dx_k - G_k dF_c/dx_k``, which gives
    ``[A, B] = (-g, (Dg) v)``.
    """
    if F.dim != G.dim:
        raise ValueError("dimension mismatch")
    return PolyVectorField(F.dim, tuple(F.apply(gc) for gc in G.components)) - PolyVectorField(
        F.dim, tuple(G.apply(fc) for fc in F.components)
    )


def nested(pattern: Sequence[str], g: Sequence[Poly]) -> PolyVectorField:
    """``[X1, X2, ..., Xn]`` evaluated right to left, each X in {"A", "B"}."""
    if len(pattern) < 2:
        raise ValueError("pattern needs at least two letters")
    dim = len(g)
    fields = {"A": field_A(dim), "B": field_B(g)}
    acc = fields[pattern[-1]]
    for letter in reversed(pattern[:-1]):
        acc = bracket(fields[letter], acc)
    return acc


def directional(p: Poly, dim: int) -> Poly:
    """``sum_j v_j dp/dy_j`` (v held constant)."""
    n = 2 * dim
    out: Poly = {}
    for j in range(dim):
        out = poly_add(out, poly_mul(monomial(n, dim + j), poly_diff(p, j)))
    return out


def closed_form_AnB(n: int, g: Sequence[Poly]) -> PolyVectorField:
    """Closed form of ``[A, ..., A, B]`` with ``n`` A's.

    v-component i is the n-th derivative of g_i contracted with v n times;
    y-component i is ``-n`` times the (n-1)-th one.
    """
    dim = len(g)
    v_parts = []
    y_parts = []
    for gi in g:
        lower = dict(gi)
        for _ in range(n - 1):
            lower = directional(lower, dim)
        upper = directional(lower, dim)
        v_parts.append(upper)
        y_parts.append({k: -n * c for k, c in lower.items()})
    return PolyVectorField(dim, tuple(y_parts + v_parts))


def random_force(dim: int, degree: int, rng: random.Random, coeff_range: int = 3) -> list[Poly]:
    """Random g(y) with small-integer coefficients and total degree exactly ``degree``."""
    exps = [k for k in product(range(degree + 1), repeat=dim) if sum(k) <= degree]
    g = []
    for _ in range(dim):
        p = {}
        for k in exps:
            c = rng.randint(-coeff_range, coeff_range)
            if c:
                p[tuple(k) + (0,) * dim] = Fraction(c)
        g.append(p)
    # force exact degree: make sure some component has a top-degree term
    if max(poly_degree(p) for p in g) < degree:
        top = tuple([degree] + [0] * (dim - 1)) + (0,) * dim
        g[0][top] = Fraction(rng.choice([c for c in range(-coeff_range, coeff_range + 1) if c]))
    return g


@dataclass
class VanishingTrial:
    n: int
    dim: int
    trial: int
    closed_form_ok: bool
    vanishes: bool
    bbab_vanishes: bool
    below_threshold_nonzero: bool

    @property
    def passed(self) -> bool:
        return self.closed_form_ok and self.vanishes and self.bbab_vanishes


def verify_vanishing(n: int, dim: int, trials: int, seed: int = 0) -> list[VanishingTrial]:
    """Check the commutator identities for random force polynomials of degree ``n``.

    Per trial: ``[A^k, B]`` matches its closed form for k = 1..n+2; the
    ``(n+2)``-fold A-bracket of B vanishes; ``[B, B, A, B]`` vanishes; and
    (recorded, not required) whether ``[A^(n+1), B]`` is nonzero.
    """
    if n not in (1, 2, 3):
        raise ValueError("degree n must be 1, 2 or 3")
    if not 1 <= dim <= 3:
        raise ValueError("dim must be between 1 and 3")
    rng = random.Random(seed)
    out = []
    for t in range(trials):
        g = random_force(dim, n, rng)
        closed_ok = True
        below = None
        top = None
        for k in range(1, n + 3):
            lhs = nested(["A"] * k + ["B"], g)
            closed_ok &= lhs == closed_form_AnB(k, g)
            if k == n + 1:
                below = lhs
            if k == n + 2:
                top = lhs
        bbab = nested(["B", "B", "A", "B"], g)
        out.append(
            VanishingTrial(n, dim, t, closed_ok, top.is_zero(), bbab.is_zero(), not below.is_zero())
        )
    return out


def format_table(rows: Iterable[VanishingTrial]) -> str:
    lines = ["n  dim  trial  closed_form  E_{n+3,1}=0  [B,B,A,B]=0  E_{n+2,1}!=0  result"]
    for r in rows:
        lines.append(
            f"{r.n:<2} {r.dim:<4} {r.trial:<6} {str(r.closed_form_ok):<12} {str(r.vanishes):<12} "
            f"{str(r.bbab_vanishes):<12} {str(r.below_threshold_nonzero):<13} "
            f"{'PASS' if r.passed else 'FAIL'}"
        )
    return "\n".join(lines)
