"""Sparse multivariate polynomials with float or complex coefficients."""
from __future__ import annotations

from typing import Iterable, Mapping

import numpy as np

Monomial = tuple[int, ...]


class Poly:
    """Dict-of-monomials polynomial in a fixed number of variables."""

    __slots__ = ("nvars", "terms")

    def __init__(self, nvars: int, terms: Mapping[Monomial, complex] | None = None):
        self.nvars = nvars
        self.terms: dict[Monomial, complex] = {}
        for mono, c in (terms or {}).items():
            if c != 0:
                self.terms[tuple(mono)] = c

    @classmethod
    def const(cls, nvars: int, c) -> "Poly":
        return cls(nvars, {(0,) * nvars: c})

    @classmethod
    def var(cls, nvars: int, i: int) -> "Poly":
        e = [0] * nvars
        e[i] = 1
        return cls(nvars, {tuple(e): 1.0})

    def copy(self) -> "Poly":
        return Poly(self.nvars, self.terms)

    def __repr__(self):
        return f"Poly({self.nvars}, {self.terms!r})"

    # -- arithmetic --------------------------------------------------------
    def _coerce(self, other) -> "Poly":
        return other if isinstance(other, Poly) else Poly.const(self.nvars, other)

    def __add__(self, other):
        other = self._coerce(other)
        out = dict(self.terms)
        for m, c in other.terms.items():
            out[m] = out.get(m, 0) + c
        return Poly(self.nvars, out)

    __radd__ = __add__

    def __neg__(self):
        return Poly(self.nvars, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, Poly):
            return Poly(self.nvars, {m: c * other for m, c in self.terms.items()})
        out: dict[Monomial, complex] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = tuple(a + b for a, b in zip(m1, m2))
                out[m] = out.get(m, 0) + c1 * c2
        return Poly(self.nvars, out)

    __rmul__ = __mul__

    def __pow__(self, e: int):
        out = Poly.const(self.nvars, 1.0)
        base = self
        while e:
            if e & 1:
                out = out * base
            base = base * base
            e >>= 1
        return out

    # -- inspection ----------------------------------------------------------
    def degree(self) -> int:
        return max((sum(m) for m in self.terms), default=0)

    def is_zero(self) -> bool:
        return not self.terms

    def chop(self, rel: float = 1e-12) -> "Poly":
        """Drop coefficients below rel * max |coefficient| (float cancellation noise)."""
        if not self.terms:
            return self
        scale = max(abs(c) for c in self.terms.values())
        return Poly(self.nvars, {m: c for m, c in self.terms.items() if abs(c) > rel * scale})

    def __call__(self, x) -> complex:
        x = np.asarray(x)
        total = 0
        for m, c in self.terms.items():
            total = total + c * np.prod(x ** np.array(m))
        return total

    def substitute(self, images: list["Poly"]) -> "Poly":
        """Compose: variable i is replaced by images[i] (all in a common new ring)."""
        nv = images[0].nvars if images else 0
        out = Poly(nv)
        cache: dict[tuple[int, int], Poly] = {}

        def power(i, e):
            if (i, e) not in cache:
                cache[(i, e)] = images[i] ** e
            return cache[(i, e)]

        for m, c in self.terms.items():
            term = Poly.const(nv, c)
            for i, e in enumerate(m):
                if e:
                    term = term * power(i, e)
            out = out + term
        return out

    def diff(self, i: int) -> "Poly":
        out = {}
        for m, c in self.terms.items():
            if m[i]:
                mm = list(m)
                mm[i] -= 1
                out[tuple(mm)] = out.get(tuple(mm), 0) + c * m[i]
        return Poly(self.nvars, out)


class PolySystem:
    """A square list of polynomials compiled for fast vectorized evaluation."""

    def __init__(self, equations: Iterable[Poly], names: list[str] | None = None):
        self.equations = list(equations)
        self.nvars = self.equations[0].nvars if self.equations else 0
        self.names = names or [f"x{i}" for i in range(self.nvars)]
        self.degrees = [max(1, e.degree()) for e in self.equations]
        self._value = _compile(self.equations)
        self._jac = _compile([eq.diff(v) for eq in self.equations for v in range(self.nvars)])

    @property
    def total_degree(self) -> int:
        d = 1
        for k in self.degrees:
            d *= k
        return d

    def __len__(self):
        return len(self.equations)

    def __call__(self, x) -> np.ndarray:
        return _evaluate(self._value, x)

    def jacobian(self, x) -> np.ndarray:
        n = len(self.equations)
        return _evaluate(self._jac, x).reshape(n, self.nvars)


def _compile(polys: list[Poly]):
    exps, coefs, owner = [], [], []
    for i, p in enumerate(polys):
        for m, c in p.terms.items():
            exps.append(m)
            coefs.append(c)
            owner.append(i)
    nv = polys[0].nvars if polys else 0
    exps = np.array(exps, dtype=int).reshape(len(coefs), nv)
    return exps, np.array(coefs, dtype=complex), np.array(owner, dtype=int), len(polys)


def _evaluate(compiled, x) -> np.ndarray:
    exps, coefs, owner, count = compiled
    x = np.asarray(x)
    if len(coefs) == 0:
        return np.zeros(count, dtype=complex if np.iscomplexobj(x) else float)
    if exps.shape[1]:
        powers = np.cumprod(np.concatenate([np.ones((len(x), 1), dtype=x.dtype),
                                            np.repeat(x[:, None], exps.max(), axis=1)], axis=1), axis=1)
        mons = np.prod(powers[np.arange(len(x))[None, :], exps], axis=1)
    else:
        mons = np.ones(len(coefs))
    vals = coefs * mons
    re = np.bincount(owner, vals.real, minlength=count)
    if not np.iscomplexobj(x) and not np.any(coefs.imag):
        return re
    return re + 1j * np.bincount(owner, vals.imag, minlength=count)
