"""Multivariate polynomials over Q(i) with dense exponent vectors."""

from __future__ import annotations

from itertools import product as _cartesian

from .scalar import ONE, ZERO, Scalar


def grlex_key(exps):
    return (sum(exps), exps)


class Poly:
    """A polynomial in named variables.

    ``terms`` maps exponent tuples (same length as ``variables``) to nonzero Scalars.
    Instances are immutable by convention; every operation returns a new Poly.
    """

    __slots__ = ("variables", "terms")

    def __init__(self, variables=(), terms=None):
        self.variables = tuple(variables)
        n = len(self.variables)
        clean = {}
        for exps, c in (terms or {}).items():
            exps = tuple(exps)
            if len(exps) != n:
                raise ValueError(f"exponent vector {exps} does not match variables {self.variables}")
            c = Scalar.coerce(c)
            if c:
                clean[exps] = c
        self.terms = clean

    @classmethod
    def constant(cls, c, variables=()):
        return cls(variables, {(0,) * len(variables): c})

    @classmethod
    def var(cls, name, variables=None):
        variables = tuple(variables) if variables is not None else (name,)
        k = variables.index(name)
        return cls(variables, {tuple(int(j == k) for j in range(len(variables))): ONE})

    @classmethod
    def monomial(cls, exps, variables, coeff=ONE):
        return cls(variables, {tuple(exps): coeff})

    # --- structure -------------------------------------------------------

    def with_variables(self, variables) -> Poly:
        """Re-express in a superset (or reordering) of the current variables."""
        variables = tuple(variables)
        if variables == self.variables:
            return self
        index = []
        for v in self.variables:
            if v not in variables:
                raise ValueError(f"variable {v!r} missing from {variables}")
            index.append(variables.index(v))
        terms = {}
        for exps, c in self.terms.items():
            new = [0] * len(variables)
            for pos, e in zip(index, exps):
                new[pos] = e
            terms[tuple(new)] = c
        return Poly(variables, terms)

    def _aligned(self, other):
        if isinstance(other, Poly):
            if other.variables == self.variables:
                return self, other
            merged = list(self.variables)
            merged += [v for v in other.variables if v not in merged]
            return self.with_variables(merged), other.with_variables(merged)
        return self, Poly.constant(Scalar.coerce(other), self.variables)

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return all(not any(e) for e in self.terms)

    def constant_term(self) -> Scalar:
        return self.terms.get((0,) * len(self.variables), ZERO)

    def coeff(self, exps) -> Scalar:
        return self.terms.get(tuple(exps), ZERO)

    def degree(self) -> int:
        return max((sum(e) for e in self.terms), default=-1)

    def support(self):
        return sorted(self.terms, key=grlex_key)

    # --- arithmetic ------------------------------------------------------

    def __add__(self, other):
        a, b = self._aligned(other)
        terms = dict(a.terms)
        for e, c in b.terms.items():
            s = terms.get(e, ZERO) + c
            if s:
                terms[e] = s
            else:
                terms.pop(e, None)
        return Poly(a.variables, terms)

    __radd__ = __add__

    def __neg__(self):
        return Poly(self.variables, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        a, b = self._aligned(other)
        return a + (-b)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        a, b = self._aligned(other)
        terms = {}
        for e1, c1 in a.terms.items():
            for e2, c2 in b.terms.items():
                e = tuple(x + y for x, y in zip(e1, e2))
                terms[e] = terms.get(e, ZERO) + c1 * c2
        return Poly(a.variables, terms)

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        s = Scalar.coerce(scalar)
        return Poly(self.variables, {e: c / s for e, c in self.terms.items()})

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            raise ValueError("exponent must be a nonnegative integer")
        result = Poly.constant(ONE, self.variables)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def __eq__(self, other):
        if not isinstance(other, Poly):
            try:
                other = Poly.constant(Scalar.coerce(other), self.variables)
            except TypeError:
                return NotImplemented
        a, b = self._aligned(other)
        return a.terms == b.terms

    def __hash__(self):
        live = [i for i in range(len(self.variables)) if any(e[i] for e in self.terms)]
        names = tuple(self.variables[i] for i in live)
        order = sorted(range(len(live)), key=lambda j: names[j])
        items = frozenset(
            (tuple(e[live[j]] for j in order), c) for e, c in self.terms.items()
        )
        return hash((tuple(names[j] for j in order), items))

    # --- calculus / evaluation -------------------------------------------

    def diff(self, var) -> Poly:
        k = self.variables.index(var) if isinstance(var, str) else var
        terms = {}
        for e, c in self.terms.items():
            if e[k]:
                new = list(e)
                new[k] -= 1
                terms[tuple(new)] = c * e[k]
        return Poly(self.variables, terms)

    def jacobian(self) -> list[Poly]:
        return [self.diff(k) for k in range(len(self.variables))]

    def substitute(self, mapping: dict) -> Poly:
        """Substitute polynomials (or scalars) for variables; unmapped variables are kept."""
        keep = [v for v in self.variables if v not in mapping]
        pieces = {v: (p if isinstance(p, Poly) else Poly.constant(Scalar.coerce(p))) for v, p in mapping.items()}
        target_vars = list(keep)
        for p in pieces.values():
            target_vars += [v for v in p.variables if v not in target_vars]
        target_vars = tuple(target_vars)
        gens = []
        for v in self.variables:
            if v in pieces:
                gens.append(pieces[v].with_variables(target_vars))
            else:
                gens.append(Poly.var(v, target_vars))
        cache = {}

        def power(i, k):
            key = (i, k)
            if key not in cache:
                cache[key] = gens[i] ** k
            return cache[key]

        result = Poly(target_vars)
        for e, c in self.terms.items():
            term = Poly.constant(c, target_vars)
            for i, k in enumerate(e):
                if k:
                    term = term * power(i, k)
            result = result + term
        return result

    def evaluate(self, point: dict) -> Scalar:
        total = ZERO
        values = [Scalar.coerce(point[v]) for v in self.variables]
        for e, c in self.terms.items():
            t = c
            for x, k in zip(values, e):
                if k:
                    t = t * x**k
            total = total + t
        return total

    def hessian(self, variables=None) -> list[list[Poly]]:
        variables = list(variables or self.variables)
        first = [self.diff(v) for v in variables]
        return [[d.diff(v) for v in variables] for d in first]

    def truncate(self, max_degree: int) -> Poly:
        return Poly(self.variables, {e: c for e, c in self.terms.items() if sum(e) <= max_degree})

    def homogeneous_part(self, degree: int) -> Poly:
        return Poly(self.variables, {e: c for e, c in self.terms.items() if sum(e) == degree})

    # --- rendering -------------------------------------------------------

    def render(self) -> str:
        """Canonical text: descending graded-lex order, parseable by parse_poly."""
        if not self.terms:
            return "0"
        out = []
        for e in sorted(self.terms, key=grlex_key, reverse=True):
            c = self.terms[e]
            mono = "*".join(
                v if k == 1 else f"{v}^{k}" for v, k in zip(self.variables, e) if k
            )
            negative = (not c.im and c.re < 0) or (not c.re and c.im < 0)
            mag = -c if negative else c
            if not mono:
                body = mag.expr()
            elif mag == 1:
                body = mono
            else:
                body = f"{mag.expr()}*{mono}"
            if not out:
                out.append(f"-{body}" if negative else body)
            else:
                out.append(f" - {body}" if negative else f" + {body}")
        return "".join(out)

    __str__ = render

    def __repr__(self):
        return f"Poly({self.render()!r}, variables={self.variables})"


def poly_jacobian(f: Poly) -> list[Poly]:
    """Partial derivatives in variable order."""
    return f.jacobian()


def monomials_up_to(nvars: int, max_degree: int):
    """All exponent vectors of total degree <= max_degree, grlex ascending."""
    out = [e for e in _cartesian(range(max_degree + 1), repeat=nvars) if sum(e) <= max_degree]
    out.sort(key=grlex_key)
    return out


def direct_sum(f: Poly, g: Poly, rename: bool = True) -> Poly:
    """f(x) + g(y) on disjoint variable sets; clashing names of g get a prime suffix."""
    gvars = list(g.variables)
    if rename:
        taken = set(f.variables)
        for k, v in enumerate(gvars):
            name = v
            while name in taken:
                name += "_"
            taken.add(name)
            gvars[k] = name
    elif set(gvars) & set(f.variables):
        raise ValueError("variable sets overlap")
    g2 = Poly(gvars, g.terms)
    allvars = tuple(f.variables) + tuple(gvars)
    return f.with_variables(allvars) + g2.with_variables(allvars)
