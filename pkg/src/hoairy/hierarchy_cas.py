"""Exact symbolic generation of the integro-differential Painleve-II and mKdV members.

Expressions live in a commutative algebra generated by the field derivatives
u^(a) (functions of t and x) and the bracket scalars <u^(i), u^(j)>
= int u^(i) u^(j) dsigma (functions of t only). Two representations are used:

* diagonal expressions, keyed by ``(a, brackets, p)`` meaning
  (t+x)^p * u^(a)(x) * prod <.,.>; ``a = UNIT`` marks a pure scalar;
* two-slot kernels, keyed by ``(l, r, brackets)`` meaning
  u^(l)(x) * u^(r)(y) * prod <.,.>; a slot equal to ``UNIT`` holds the constant 1.

Brackets are sorted tuples of pairs ``(i, j)`` with i <= j. A pair containing
``UNIT`` is a first moment <1, u^(a)>; <1,1> = 1 because dsigma has unit mass.
Coefficients are Gaussian rationals so that the operators L+- = i D_t + ...
can be applied literally.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations_with_replacement

import numpy as np

UNIT = -1


class AntiderivativeError(ArithmeticError):
    """The argument of a formal t-antiderivative is not an exact derivative."""


class RouteMismatchError(ArithmeticError):
    """Two generation routes disagree, or the operator route leaves a non-local remainder."""


class GaussQ:
    """Exact Gaussian rational re + i*im."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = Fraction(re)
        self.im = Fraction(im)

    def __add__(self, o):
        o = _gq(o)
        return GaussQ(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __neg__(self):
        return GaussQ(-self.re, -self.im)

    def __sub__(self, o):
        return self + (-_gq(o))

    def __mul__(self, o):
        o = _gq(o)
        return GaussQ(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def __eq__(self, o):
        o = _gq(o)
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        return hash((self.re, self.im))

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __repr__(self):
        return f"GaussQ({self.re}, {self.im})"


def _gq(x):
    return x if isinstance(x, GaussQ) else GaussQ(x)


I = GaussQ(0, 1)


# --------------------------------------------------------------------------
# monomial helpers


def _pair(i, j):
    return (i, j) if i <= j else (j, i)


def _with(brackets, i, j):
    """Bracket multiset with <u^(i), u^(j)> appended; <1,1> = 1 is dropped."""
    if i == UNIT and j == UNIT:
        return brackets
    return tuple(sorted(brackets + (_pair(i, j),)))


def _slot_weight(a):
    return 0 if a == UNIT else a + 1


def _bracket_weight(brackets):
    return sum(_slot_weight(i) + _slot_weight(j) for i, j in brackets)


def _bracket_derivative(brackets):
    """D_t of a bracket product as a list of bracket multisets (one per Leibniz term)."""
    out = []
    for k, (i, j) in enumerate(brackets):
        rest = brackets[:k] + brackets[k + 1:]
        for a, b in ((i, j), (j, i)):
            if a != UNIT:
                out.append(_with(rest, a + 1, b))
    return out


def _moments(brackets):
    return sum(1 for i, _ in brackets if i == UNIT)


def _add(expr, key, c):
    v = expr.get(key)
    v = c if v is None else v + c
    if v:
        expr[key] = v
    elif key in expr:
        del expr[key]


def _scale(expr, c):
    c = _gq(c)
    return {k: v * c for k, v in expr.items() if v * c}


def _sum(*exprs):
    out = {}
    for e in exprs:
        for k, v in e.items():
            _add(out, k, v)
    return out


# --------------------------------------------------------------------------
# derivatives


def d_diag(expr):
    """D_t of a diagonal expression (D_t x = 0, D_t (t+x) = 1)."""
    out = {}
    for (a, br, p), c in expr.items():
        if a != UNIT:
            _add(out, (a + 1, br, p), c)
        for nb in _bracket_derivative(br):
            _add(out, (a, nb, p), c)
        if p:
            _add(out, (a, br, p - 1), c * p)
    return out


def d_two(expr):
    out = {}
    for (l, r, br), c in expr.items():
        if l != UNIT:
            _add(out, (l + 1, r, br), c)
        if r != UNIT:
            _add(out, (l, r + 1, br), c)
        for nb in _bracket_derivative(br):
            _add(out, (l, r, nb), c)
    return out


# --------------------------------------------------------------------------
# formal antiderivative by graded linear solve


def _pair_pool(max_weight, moments):
    pool = []
    for w in range(1, max_weight + 1):
        if moments:
            pool.append(((UNIT, w - 1), w))
        else:
            for i in range(0, w - 1):
                j = w - 2 - i
                if i <= j:
                    pool.append(((i, j), w))
    return pool


def _multisets(n_uu, n_mom, weight):
    """All bracket multisets with n_uu field pairs, n_mom moments and total weight."""
    if weight < 2 * n_uu + n_mom:
        return []
    uu = _pair_pool(weight, False)
    mm = _pair_pool(weight, True)
    out = []
    for A in combinations_with_replacement(uu, n_uu):
        wa = sum(w for _, w in A)
        if wa > weight:
            continue
        for B in combinations_with_replacement(mm, n_mom):
            if wa + sum(w for _, w in B) == weight:
                out.append(tuple(sorted([p for p, _ in A] + [p for p, _ in B])))
    return out


def _solve_exact(columns, rhs_re, rhs_im):
    """Solve sum_c x_c * columns[c] = rhs (dicts keyed by monomial) exactly, or raise."""
    keys = sorted(set().union(*[set(c) for c in columns], rhs_re, rhs_im))
    index = {k: r for r, k in enumerate(keys)}
    ncol = len(columns)
    rows = [[Fraction(0)] * (ncol + 2) for _ in keys]
    for cidx, col in enumerate(columns):
        for k, v in col.items():
            rows[index[k]][cidx] = v
    for k, v in rhs_re.items():
        rows[index[k]][ncol] = v
    for k, v in rhs_im.items():
        rows[index[k]][ncol + 1] = v
    pivots = []
    r0 = 0
    for cidx in range(ncol):
        piv = next((r for r in range(r0, len(rows)) if rows[r][cidx]), None)
        if piv is None:
            continue
        rows[r0], rows[piv] = rows[piv], rows[r0]
        p = rows[r0][cidx]
        rows[r0] = [v / p for v in rows[r0]]
        for r in range(len(rows)):
            if r != r0 and rows[r][cidx]:
                f = rows[r][cidx]
                rows[r] = [a - f * b for a, b in zip(rows[r], rows[r0])]
        pivots.append(cidx)
        r0 += 1
    for r in range(r0, len(rows)):
        if rows[r][ncol] or rows[r][ncol + 1]:
            raise AntiderivativeError("no exact t-antiderivative in the graded candidate space")
    sol = [GaussQ() for _ in range(ncol)]
    for r, cidx in enumerate(pivots):
        sol[cidx] = GaussQ(rows[r][ncol], rows[r][ncol + 1])
    return sol


def _antiderivative(expr, signature, candidates, derivative):
    """Group by (signature, weight) and solve each block D F = E."""
    blocks = {}
    for key, c in expr.items():
        blocks.setdefault(signature(key), {})[key] = c
    out = {}
    for sig, block in sorted(blocks.items()):
        cands = candidates(sig)
        if not cands:
            raise AntiderivativeError(f"no candidates of signature {sig}")
        cols = []
        for cand in cands:
            dc = derivative({cand: GaussQ(1)})
            cols.append({k: v.re for k, v in dc.items()})
        sol = _solve_exact(cols, {k: v.re for k, v in block.items()},
                           {k: v.im for k, v in block.items()})
        for cand, s in zip(cands, sol):
            if s:
                _add(out, cand, s)
    return out


def antiderivative_diag(expr):
    """Formal D_t^{-1} of a diagonal expression without (t+x) factors."""
    if any(p for (_, _, p) in expr):
        raise AntiderivativeError("(t+x) factors are not integrated")

    def sig(key):
        a, br, _ = key
        return (a == UNIT, len(br) - _moments(br), _moments(br),
                _slot_weight(a) + _bracket_weight(br))

    def cands(s):
        scalar, n_uu, n_mom, w = s
        w -= 1
        out = []
        for a in ([UNIT] if scalar else range(w)):
            for br in _multisets(n_uu, n_mom, w - _slot_weight(a)):
                out.append((a, br, 0))
        return out

    return _antiderivative(expr, sig, cands, d_diag)


def antiderivative_two(expr):
    """Formal D_t^{-1} of a two-slot kernel."""

    def sig(key):
        l, r, br = key
        return (l == UNIT, r == UNIT, len(br) - _moments(br), _moments(br),
                _slot_weight(l) + _slot_weight(r) + _bracket_weight(br))

    def cands(s):
        lu, ru, n_uu, n_mom, w = s
        w -= 1
        out = []
        for l in ([UNIT] if lu else range(w)):
            for r in ([UNIT] if ru else range(w - _slot_weight(l))):
                for br in _multisets(n_uu, n_mom, w - _slot_weight(l) - _slot_weight(r)):
                    out.append((l, r, br))
        return out

    return _antiderivative(expr, sig, cands, d_two)


# --------------------------------------------------------------------------
# the operators L+ and L-


FIELD = {(0, (), 0): GaussQ(1)}


def _check_plain(expr):
    for a, br, p in expr:
        if p or a == UNIT:
            raise ValueError("apply_L acts on field-valued expressions without (t+x) factors")


def apply_L(sign, expr):
    """L+ f or L- f for a diagonal expression f (dict ``(a, brackets, 0) -> GaussQ``).

    L- f = i D_t f + i u * D^{-1}[u, f] contracted, L+ f = i D_t f
    - i u * D^{-1}{u, f} contracted - 2 i (D^{-1}<u, f>) u, where
    {u,f}(x,y) = u(x) f(y) + f(x) u(y), [u,f] = u(x) f(y) - f(x) u(y) and the
    contraction integrates the y-slot against u(y) dsigma(y).
    """
    if sign not in ("plus", "minus"):
        raise ValueError("sign must be 'plus' or 'minus'")
    if not expr:
        return {}
    _check_plain(expr)
    s = 1 if sign == "plus" else -1
    kernel = {}
    for (a, br, _), c in expr.items():
        _add(kernel, (0, a, br), c)
        _add(kernel, (a, 0, br), c * s)
    K = antiderivative_two(kernel)
    contracted = {}
    for (l, r, br), c in K.items():
        _add(contracted, (l, _with(br, r, 0), 0), c)
    out = _sum(d_diag(expr), _scale(contracted, -s))
    if sign == "plus":
        scalar = {}
        for (a, br, _), c in expr.items():
            _add(scalar, (UNIT, _with(br, 0, a), 0), c)
        S = antiderivative_diag(scalar)
        times_u = {(0, br, 0): c for (_, br, _), c in S.items()}
        out = _sum(out, _scale(times_u, -2))
    return _scale(out, I)


# --------------------------------------------------------------------------
# canonical members


@dataclass(frozen=True, order=True)
class DiagonalTerm:
    """coeff * (t+x)^p * u^(a) * prod <u^(i), u^(j)>."""

    coeff: Fraction
    derivative_order: int
    brackets: tuple = ()
    t_plus_x_power: int = 0

    @property
    def weight(self):
        return self.derivative_order + 1 + _bracket_weight(self.brackets)

    def sort_key(self):
        return (-self.t_plus_x_power, -self.derivative_order, self.brackets)


def _terms_from(expr):
    terms = []
    for (a, br, p), c in expr.items():
        if c.im:
            raise RouteMismatchError(f"non-real coefficient {c} on term {(a, br, p)}")
        if a == UNIT or any(i == UNIT for i, _ in br):
            raise RouteMismatchError(f"non-local remainder {(a, br, p)}")
        terms.append(DiagonalTerm(c.re, a, br, p))
    return tuple(sorted(terms, key=DiagonalTerm.sort_key))


@dataclass(frozen=True)
class HierarchyMember:
    """One member written as ``lhs = sum(terms)``.

    painleve2: -(t+x) u = (L+ L-)^n u; mkdv: dv/dt_{2n+1} = (L- L+)^n dv/dt_1.
    The leading term carries coefficient (-1)^n in both cases.
    """

    n: int
    kind: str
    terms: tuple
    metadata: dict = field(default_factory=dict, compare=False)

    @property
    def leading(self):
        top = 2 * self.n if self.kind == "painleve2" else 2 * self.n + 1
        lead = [t for t in self.terms if t.derivative_order == top and not t.brackets]
        if len(lead) != 1:
            raise ValueError("member has no unique leading term")
        return lead[0]

    @property
    def variable(self):
        return "u" if self.kind == "painleve2" else "v"

    @property
    def printed_sign(self):
        """Overall sign that makes the leading right-hand term positive (pii) as printed."""
        return (-1) ** self.n if self.kind == "painleve2" else (-1) ** (self.n + 1)


def _power(sign_seq, start, n):
    expr = dict(start)
    for _ in range(n):
        for s in sign_seq:
            expr = apply_L(s, expr)
    return expr


def pii_member(n):
    """-(t+x) u = (L+ L-)^n u with every antiderivative resolved."""
    if n < 1:
        raise ValueError("n must be a positive integer")
    expr = _power(("minus", "plus"), FIELD, n)
    return HierarchyMember(n, "painleve2", _terms_from(expr), {"route": "recursion"})


def mkdv_member(n):
    """dv/dt_{2n+1} = (L- L+)^n v' with every antiderivative resolved."""
    if n < 1:
        raise ValueError("n must be a positive integer")
    expr = _power(("plus", "minus"), {(1, (), 0): GaussQ(1)}, n)
    return HierarchyMember(n, "mkdv", _terms_from(expr), {"route": "recursion"})


# --------------------------------------------------------------------------
# operator route: iterate the coefficient kernels of the Lax matrix


def compose(S, T):
    """(S o T)(x,y) = int S(x,z) T(z,y) dsigma(z) for two-slot kernels."""
    out = {}
    for (l1, r1, b1), c1 in S.items():
        for (l2, r2, b2), c2 in T.items():
            br = tuple(sorted(b1 + b2))
            _add(out, (l1, r2, _with(br, r1, l2)), c1 * c2)
    return out


U_KERNEL = {(0, UNIT, ()): GaussQ(1)}
V_KERNEL = {(UNIT, 0, ()): GaussQ(1)}
OPERATOR_VARIANTS = ("U", "V")


def lax_coefficients(n, variant="U"):
    """Entries A_k^{ab}, k = 1..2n, as dicts ``{(a, b): kernel}`` (index 0 unused).

    ``variant`` selects the last operator in A_{k+1}^{12} = i D A_k^{12}
    - U A_k^{22} + A_k^{11} X with X = U or X = V.
    """
    X = {"U": U_KERNEL, "V": V_KERNEL}[variant]
    U, V = U_KERNEL, V_KERNEL
    A = [None, {(1, 2): _scale(U, -I), (2, 1): _scale(V, I), (1, 1): {}, (2, 2): {}}]
    for k in range(1, 2 * n):
        cur = A[k]
        nxt = {
            (1, 2): _sum(_scale(d_two(cur[1, 2]), I), _scale(compose(U, cur[2, 2]), -1),
                         compose(cur[1, 1], X)),
            (2, 1): _sum(_scale(d_two(cur[2, 1]), -I), _scale(compose(V, cur[1, 1]), -1),
                         compose(cur[2, 2], V)),
        }
        A.append(nxt)
        s11, s22 = {}, {}
        # the diagonal entries at level k+1 only involve levels 1..k
        for j in range(1, k + 1):
            a, b = A[j], A[k + 1 - j]
            s11 = _sum(s11, compose(a[1, 1], b[1, 1]), compose(a[1, 2], b[2, 1]))
            s22 = _sum(s22, compose(a[2, 2], b[2, 2]), compose(a[2, 1], b[1, 2]))
        nxt[1, 1] = _scale(s11, -I)
        nxt[2, 2] = _scale(s22, I)
    return A, X


def pii_member_via_operators(n, variant=None):
    """Painleve-II member from the Lax coefficient recursion (no antiderivatives).

    The terminal relation i D A_{2n}^{12} - U A_{2n}^{22} + A_{2n}^{11} X
    = i (t+x) u(x) 1(y) is read off on its y-independent part. With
    ``variant=None`` every variant is tried and the first that yields a local,
    real member equal to the recursion route is returned.
    """
    if n < 1:
        raise ValueError("n must be a positive integer")
    reference = pii_member(n)
    errors = {}
    for var in ([variant] if variant else OPERATOR_VARIANTS):
        try:
            member = _operator_member(n, var)
        except RouteMismatchError as exc:
            errors[var] = str(exc)
            continue
        if member.terms == reference.terms:
            return member
        errors[var] = "differs from the recursion route"
    raise RouteMismatchError(f"operator route failed for n={n}: {errors}")


def _operator_member(n, variant):
    A, X = lax_coefficients(n, variant)
    top = A[2 * n]
    E = _sum(_scale(d_two(top[1, 2]), I), _scale(compose(U_KERNEL, top[2, 2]), -1),
             compose(top[1, 1], X))
    diag = {}
    for (l, r, br), c in E.items():
        if r != UNIT:
            raise RouteMismatchError(f"terminal kernel depends on y through {(l, r, br)}")
        _add(diag, (l, br, 0), c)
    # -(t+x) u = i E
    terms = _terms_from(_scale(diag, I))
    return HierarchyMember(n, "painleve2", terms, {"route": "operators", "variant": variant})


# --------------------------------------------------------------------------
# ODE form


@dataclass(frozen=True)
class OdeForm:
    """u^(2n) = sum(terms), each term a DiagonalTerm in u and its brackets."""

    n: int
    terms: tuple

    @property
    def order(self):
        return 2 * self.n

    def max_bracket_order(self):
        return max((j for t in self.terms for _, j in t.brackets), default=0)

    def rhs(self, t, x, derivs, brackets):
        """Evaluate F on a grid (see :func:`evaluate_terms`)."""
        return evaluate_terms(self.terms, t, x, derivs, brackets)


def evaluate_terms(terms, t, x, derivs, brackets):
    """Numeric value of a sum of DiagonalTerms.

    ``derivs[j]`` holds u^(j) at the points x and ``brackets[i, j]`` the
    scalar <u^(i), u^(j)>.
    """
    out = np.zeros(np.shape(derivs[0]), dtype=np.float64)
    for term in terms:
        c = float(term.coeff)
        for i, j in term.brackets:
            c *= brackets[i, j]
        val = c * derivs[term.derivative_order]
        if term.t_plus_x_power:
            val = val * (t + x)
        out += val
    return out


def differentiate_terms(terms):
    """D_t of a sum of DiagonalTerms, as a new canonical term tuple."""
    expr = {}
    for tm in terms:
        _add(expr, (tm.derivative_order, tm.brackets, tm.t_plus_x_power), GaussQ(tm.coeff))
    return _terms_from(d_diag(expr))


def to_ode(member):
    """Rearrange -(t+x) u = (-1)^n u^(2n) + rest into u^(2n) = F."""
    if member.kind != "painleve2":
        raise ValueError("to_ode takes a Painleve-II member")
    lead = member.leading
    if lead.coeff not in (1, -1):
        raise ValueError("leading term is not a unit multiple of u^(2n)")
    s = lead.coeff
    terms = [DiagonalTerm(-s, 0, (), 1)]
    for t in member.terms:
        if t is lead:
            continue
        if t.derivative_order >= 2 * member.n or any(j >= 2 * member.n for _, j in t.brackets):
            raise ValueError(f"term {t} is not lower order than the leading derivative")
        terms.append(DiagonalTerm(-s * t.coeff, t.derivative_order, t.brackets, 0))
    return OdeForm(member.n, tuple(sorted(terms, key=DiagonalTerm.sort_key)))


# --------------------------------------------------------------------------
# text and JSON


def _deriv(var, a):
    return var + "'" * a if a <= 3 else f"{var}^({a})"


def _factors(term, var):
    parts = []
    if term.t_plus_x_power:
        parts.append("(t+x)")
    parts.append(_deriv(var, term.derivative_order))
    groups = {}
    for b in term.brackets:
        groups[b] = groups.get(b, 0) + 1
    for (i, j), k in sorted(groups.items()):
        s = f"<{_deriv(var, i)},{_deriv(var, j)}>"
        parts.append(s if k == 1 else f"{s}^{k}")
    return "*".join(parts)


def render_terms(terms, var="u", sign=1):
    if not terms:
        return "0"
    out = []
    for k, t in enumerate(sorted(terms, key=DiagonalTerm.sort_key)):
        c = t.coeff * sign
        mag = abs(c)
        body = _factors(t, var)
        if mag != 1:
            body = f"{mag}*{body}"
        if k == 0:
            out.append(("-" if c < 0 else "") + body)
        else:
            out.append(("- " if c < 0 else "+ ") + body)
    return " ".join(out)


def render(obj):
    """Canonical one-line text of a member, an OdeForm or a bare term sequence."""
    if isinstance(obj, HierarchyMember):
        s = obj.printed_sign
        if obj.kind == "painleve2":
            lhs = "(t+x)*u" if -s > 0 else "-(t+x)*u"
        else:
            lhs = f"v_t{2 * obj.n + 1}" if s > 0 else f"-v_t{2 * obj.n + 1}"
        return f"{lhs} = {render_terms(obj.terms, obj.variable, s)}"
    if isinstance(obj, OdeForm):
        return f"{_deriv('u', obj.order)} = {render_terms(obj.terms)}"
    return render_terms(tuple(obj))


_DERIV_RE = r"([uv])(?:\^\((\d+)\)|('*))"


def _parse_deriv(tok):
    m = re.fullmatch(_DERIV_RE, tok)
    if not m:
        raise ValueError(f"cannot parse factor {tok!r}")
    return m.group(1), int(m.group(2)) if m.group(2) else len(m.group(3))


def parse_terms(text):
    """Inverse of :func:`render_terms`; returns (terms, variable)."""
    text = text.strip()
    if text == "0":
        return (), "u"
    chunks = re.findall(r"([+-]?)\s*([^+\-\s][^ ]*|\(t\+x\)[^ ]*)", text)
    terms, var = [], "u"
    for sgn, body in chunks:
        c = Fraction(-1 if sgn == "-" else 1)
        p, a, br = 0, None, []
        for fac in _split_factors(body):
            if re.fullmatch(r"\d+(/\d+)?", fac):
                c *= Fraction(fac)
            elif fac == "(t+x)":
                p = 1
            elif fac.startswith("<"):
                m = re.fullmatch(r"<([^,]+),([^>]+)>(?:\^(\d+))?", fac)
                if not m:
                    raise ValueError(f"cannot parse bracket {fac!r}")
                (_, i), (_, j) = _parse_deriv(m.group(1)), _parse_deriv(m.group(2))
                br += [_pair(i, j)] * int(m.group(3) or 1)
            else:
                var, a = _parse_deriv(fac)
        if a is None:
            raise ValueError(f"term {body!r} has no field factor")
        terms.append(DiagonalTerm(c, a, tuple(sorted(br)), p))
    return tuple(sorted(terms, key=DiagonalTerm.sort_key)), var


def _split_factors(body):
    out, depth, cur = [], 0, ""
    for ch in body:
        if ch in "(<":
            depth += 1
        elif ch in ")>":
            depth -= 1
        if ch == "*" and depth == 0:
            out.append(cur)
            cur = ""
        else:
            cur += ch
    out.append(cur)
    return out


def parse(text):
    """Parse the output of :func:`render` back into a member or an OdeForm."""
    lhs, _, rhs = text.partition(" = ")
    lhs = lhs.strip()
    terms, _ = parse_terms(rhs)
    if re.fullmatch(r"-?\(t\+x\)\*u", lhs):
        n = max(t.derivative_order for t in terms) // 2
        s = (-1) ** n
        return HierarchyMember(n, "painleve2", _signed(terms, s))
    m = re.fullmatch(r"(-?)v_t(\d+)", lhs)
    if m:
        n = (int(m.group(2)) - 1) // 2
        return HierarchyMember(n, "mkdv", _signed(terms, (-1) ** (n + 1)))
    _, order = _parse_deriv(lhs)
    return OdeForm(order // 2, terms)


def _signed(terms, s):
    return tuple(DiagonalTerm(t.coeff * s, t.derivative_order, t.brackets, t.t_plus_x_power)
                 for t in terms)


def to_json(obj):
    """JSON list of {coeff_num, coeff_den, derivative_order, brackets, t_plus_x_power}.

    For a member the list holds the right-hand side as stored (leading
    coefficient (-1)^n); for an OdeForm it holds F in u^(2n) = F.
    """
    terms = obj.terms if hasattr(obj, "terms") else obj
    rows = [{
        "coeff_num": t.coeff.numerator,
        "coeff_den": t.coeff.denominator,
        "derivative_order": t.derivative_order,
        "brackets": [list(b) for b in t.brackets],
        "t_plus_x_power": t.t_plus_x_power,
    } for t in sorted(terms, key=DiagonalTerm.sort_key)]
    return json.dumps(rows, indent=1)


def from_json(text):
    return tuple(sorted(
        (DiagonalTerm(Fraction(r["coeff_num"], r["coeff_den"]), r["derivative_order"],
                      tuple(sorted(tuple(b) for b in r["brackets"])), r["t_plus_x_power"])
         for r in json.loads(text)), key=DiagonalTerm.sort_key))


# --------------------------------------------------------------------------
# structural checks


def delta_reduce(terms):
    """Collapse <f,g> -> f g (dsigma = point mass at 0); returns {sorted orders: coeff}."""
    out = {}
    for t in terms:
        if t.t_plus_x_power:
            continue
        orders = [t.derivative_order]
        for i, j in t.brackets:
            orders += [i, j]
        key = tuple(sorted(orders, reverse=True))
        out[key] = out.get(key, Fraction(0)) + t.coeff
    return {k: v for k, v in out.items() if v}


def grading(terms):
    """Set of weights of the non-(t+x) terms."""
    return {t.weight for t in terms if not t.t_plus_x_power}
