"""Truncated Laurent series over F_q.

A series carries an absolute precision ``prec``: coefficients of t^k with
k < prec are exact, nothing is known from t^prec on.  ``prec=None`` means
the series is an exact Laurent polynomial (the uniformizer t, integer
constants, and parsed input are exact).  Every operation returns the
interval-arithmetic bound for the precision of its result, so a value never
claims more than its inputs support.
"""

from __future__ import annotations

import math
import re

from ..errors import FieldMismatchError, ParseError, PrecisionError
from .field import FieldSpec

DEFAULT_PRECISION = 40

_INF = math.inf


def _bound(x):
    return _INF if x is None else x


def _unbound(x):
    return None if x == _INF else int(x)


class LaurentSeries:
    __slots__ = ("field", "_terms", "prec")

    def __init__(self, field: FieldSpec, terms=None, prec: int | None = None):
        self.field = field
        self.prec = prec
        clean = {}
        if terms:
            items = terms.items() if isinstance(terms, dict) else terms
            for k, c in items:
                if c and (prec is None or k < prec):
                    clean[int(k)] = c
        self._terms = clean

    # -- constructors ---------------------------------------------------

    @classmethod
    def zero(cls, field, prec=None):
        return cls(field, None, prec)

    @classmethod
    def one(cls, field):
        return cls(field, {0: 1})

    @classmethod
    def constant(cls, field, c: int, prec=None):
        return cls(field, {0: c}, prec)

    @classmethod
    def monomial(cls, field, c: int, k: int, prec=None):
        return cls(field, {k: c}, prec)

    @classmethod
    def gen(cls, field):
        """The uniformizer t."""
        return cls(field, {1: 1})

    @classmethod
    def from_coeffs(cls, field, coeffs, start: int = 0, prec=None):
        return cls(field, {start + j: c for j, c in enumerate(coeffs)}, prec)

    # -- inspection -----------------------------------------------------

    @property
    def terms(self) -> dict:
        return dict(self._terms)

    def items(self):
        return sorted(self._terms.items())

    @property
    def is_exact(self) -> bool:
        return self.prec is None

    def valuation(self) -> int | None:
        """Smallest known exponent; None when no term is known."""
        return min(self._terms) if self._terms else None

    def degree(self) -> int | None:
        return max(self._terms) if self._terms else None

    def valuation_bound(self):
        """Lower bound for the true valuation (inf for exact zero)."""
        if self._terms:
            return min(self._terms)
        return _bound(self.prec)

    def coefficient(self, k: int) -> int:
        if self.prec is not None and k >= self.prec:
            raise PrecisionError(f"coefficient of t^{k} unknown at precision {self.prec}")
        return self._terms.get(k, 0)

    def is_zero(self) -> bool:
        """Zero on the known window."""
        return not self._terms

    def is_exact_zero(self) -> bool:
        return not self._terms and self.prec is None

    def is_integral(self) -> bool:
        return all(k >= 0 for k in self._terms)

    def is_unit(self) -> bool:
        return self.valuation() == 0

    def truncate(self, n) -> "LaurentSeries":
        if n is None:
            return self
        if self.prec is not None and self.prec <= n:
            return self
        return LaurentSeries(self.field, self._terms, n)

    def with_precision(self, n) -> "LaurentSeries":
        return self.truncate(n)

    def shift(self, k: int) -> "LaurentSeries":
        """Multiply by t^k (exact)."""
        return LaurentSeries(
            self.field,
            {e + k: c for e, c in self._terms.items()},
            None if self.prec is None else self.prec + k,
        )

    def unit_part(self):
        """Return (w, v) with self = t^v * w and w a unit."""
        v = self.valuation()
        if v is None:
            raise PrecisionError(f"series is zero at precision {self.prec}")
        return self.shift(-v), v

    # -- comparison -----------------------------------------------------

    def __eq__(self, other):
        if not isinstance(other, LaurentSeries):
            if isinstance(other, int):
                return self == LaurentSeries.constant(self.field, self.field.from_int(other))
            return NotImplemented
        return self.field == other.field and self.prec == other.prec and self._terms == other._terms

    def __hash__(self):
        return hash((self.field, self.prec, frozenset(self._terms.items())))

    def agrees(self, other: "LaurentSeries", upto=None) -> bool:
        """Equal on the common window of known coefficients (optionally below ``upto``)."""
        d = self - other
        if upto is not None:
            d = d.truncate(upto)
        return d.is_zero()

    # -- arithmetic -----------------------------------------------------

    def _check(self, other):
        if isinstance(other, int):
            return LaurentSeries.constant(self.field, self.field.from_int(other))
        if not isinstance(other, LaurentSeries):
            return None
        if other.field != self.field:
            raise FieldMismatchError(f"{self.field!r} vs {other.field!r}")
        return other

    def __add__(self, other):
        other = self._check(other)
        if other is None:
            return NotImplemented
        prec = _unbound(min(_bound(self.prec), _bound(other.prec)))
        F = self.field
        out = dict(self._terms)
        for k, c in other._terms.items():
            out[k] = F.add(out.get(k, 0), c)
        return LaurentSeries(F, out, prec)

    __radd__ = __add__

    def __neg__(self):
        F = self.field
        return LaurentSeries(F, {k: F.neg(c) for k, c in self._terms.items()}, self.prec)

    def __sub__(self, other):
        other = self._check(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = self._check(other)
        if other is None:
            return NotImplemented
        return other + (-self)

    def scale(self, c: int) -> "LaurentSeries":
        F = self.field
        if c == 0:
            return LaurentSeries(F, None, self.prec)
        return LaurentSeries(F, {k: F.mul(a, c) for k, a in self._terms.items()}, self.prec)

    def __mul__(self, other):
        other = self._check(other)
        if other is None:
            return NotImplemented
        if self.is_exact_zero() or other.is_exact_zero():
            return LaurentSeries(self.field)
        na, nb = _bound(self.prec), _bound(other.prec)
        va, vb = self.valuation_bound(), other.valuation_bound()
        prec = min(va + nb, vb + na, na + nb)
        F = self.field
        a = sorted(self._terms.items())
        b = sorted(other._terms.items())
        if len(a) > len(b):
            a, b = b, a
        out = {}
        get = out.get
        if F.e == 1:
            p = F.p
            for ea, ca in a:
                lim = prec - ea
                for eb, cb in b:
                    if eb >= lim:
                        break
                    k = ea + eb
                    out[k] = (get(k, 0) + ca * cb) % p
        else:
            add, mul = F.add, F.mul
            for ea, ca in a:
                lim = prec - ea
                for eb, cb in b:
                    if eb >= lim:
                        break
                    k = ea + eb
                    out[k] = add(get(k, 0), mul(ca, cb))
        return LaurentSeries(F, out, _unbound(prec))

    __rmul__ = __mul__

    def inverse(self, prec: int | None = None) -> "LaurentSeries":
        """Multiplicative inverse.

        For an inexact input of valuation v and precision N the result has
        precision N - 2v.  An exact non-monomial input needs a target
        precision (DEFAULT_PRECISION if none is given).
        """
        if not self._terms:
            raise PrecisionError(f"insufficient precision: series is zero at precision {self.prec}")
        F = self.field
        v = self.valuation()
        w0inv = F.inv(self._terms[v])
        if self.prec is None:
            if len(self._terms) == 1:
                return LaurentSeries(F, {-v: w0inv})
            target = DEFAULT_PRECISION if prec is None else prec
        else:
            target = self.prec - 2 * v
            if prec is not None:
                target = min(target, prec)
        m = target + v
        if m < 1:
            raise PrecisionError(f"insufficient precision to invert a series of valuation {v}")
        w = [(k - v, c) for k, c in sorted(self._terms.items()) if 0 < k - v < m]
        b = [w0inv]
        neg_w0inv = F.neg(w0inv)
        for k in range(1, m):
            s = 0
            for j, c in w:
                if j > k:
                    break
                bk = b[k - j]
                if bk:
                    s = F.add(s, F.mul(c, bk))
            b.append(F.mul(neg_w0inv, s))
        return LaurentSeries(F, {j - v: c for j, c in enumerate(b)}, target)

    def __truediv__(self, other):
        other = self._check(other)
        if other is None:
            return NotImplemented
        return self * other.inverse()

    def divide(self, other: "LaurentSeries", prec: int | None = None):
        return self * other.inverse(prec)

    def pow(self, n: int, prec: int | None = None) -> "LaurentSeries":
        if n < 0:
            return self.pow(-n, prec).inverse(prec)
        result = LaurentSeries.one(self.field)
        base = self
        while n:
            if n & 1:
                result = (result * base).truncate(prec)
            n >>= 1
            if n:
                base = (base * base).truncate(prec)
        return result

    def __pow__(self, n: int):
        return self.pow(n)

    def frobenius(self) -> "LaurentSeries":
        """x -> x^p, which is additive in characteristic p."""
        F = self.field
        p = F.p
        return LaurentSeries(
            F,
            {p * k: F.frobenius(c) for k, c in self._terms.items()},
            None if self.prec is None else p * self.prec,
        )

    def is_pth_power(self) -> bool:
        p = self.field.p
        return all(k % p == 0 for k in self._terms)

    def pth_root(self) -> "LaurentSeries":
        if not self.is_pth_power():
            raise ValueError("series is not a p-th power")
        F = self.field
        p = F.p
        prec = None if self.prec is None else self.prec // p
        return LaurentSeries(F, {k // p: F.pth_root(c) for k, c in self._terms.items()}, prec)

    def substitute(self, target: "LaurentSeries", prec: int | None = None) -> "LaurentSeries":
        """Compose: replace t by ``target`` (a series of positive valuation).

        The known window of the result is bounded by prec(self) * v(target)
        and by the precision of the powers of ``target`` involved.
        """
        if target.field != self.field:
            raise FieldMismatchError("substitution across fields")
        vt = target.valuation()
        if vt is None:
            raise PrecisionError("substitution target is zero at its precision")
        if vt <= 0:
            raise ValueError(f"substitution target must have positive valuation, got {vt}")
        bound = _INF if self.prec is None else self.prec * vt
        if prec is not None:
            bound = min(bound, prec)
        cap = None if bound == _INF else bound
        F = self.field
        result = LaurentSeries(F, None, cap)
        if not self._terms:
            return result
        ks = sorted(self._terms)
        kmin, kmax = ks[0], ks[-1]
        if kmax >= 0:
            power = LaurentSeries.one(F)
            for k in range(0, kmax + 1):
                if k:
                    power = (power * target).truncate(cap)
                c = self._terms.get(k)
                if c:
                    result = result + power.scale(c)
        if kmin < 0:
            depth = -kmin
            inv_prec = None if cap is None else cap + (depth - 1) * vt
            inv = target.inverse(inv_prec)
            power = LaurentSeries.one(F)
            for j in range(1, depth + 1):
                power = (power * inv).truncate(cap)
                c = self._terms.get(-j)
                if c:
                    result = result + power.scale(c)
        return result.truncate(cap)

    # -- rendering ------------------------------------------------------

    def to_str(self, var: str = "t") -> str:
        F = self.field
        parts = []
        for k, c in sorted(self._terms.items()):
            cs = str(c) if F.e == 1 else "[" + ",".join(map(str, F.coords(c))) + "]"
            if k == 0:
                parts.append(cs)
                continue
            mono = var if k == 1 else f"{var}^{k}"
            parts.append(mono if cs == "1" else f"{cs}*{mono}")
        if self.prec is not None:
            parts.append(f"O({var}^{self.prec})")
        return " + ".join(parts) if parts else "0"

    def __str__(self):
        return self.to_str()

    def __repr__(self):
        return f"LaurentSeries({self.field!r}, {self.to_str()})"


# -- text grammar --------------------------------------------------------

_TERM = re.compile(
    r"""
    (?P<sign>[+-])?
    (?:
        O\((?P<ovar>[a-zA-Z]\w*)(?:\^\(?(?P<oexp>-?\d+)\)?)?\)
      |
        (?P<coef>\[[-\d,]*\]|\d+)?
        (?P<star>\*)?
        (?:(?P<var>[a-zA-Z]\w*)(?:\^\(?(?P<exp>-?\d+)\)?)?)?
    )
    """,
    re.VERBOSE,
)


def parse_series(text: str, field: FieldSpec, var: str = "t", prec: int | None = None) -> LaurentSeries:
    """Parse ``c*t^k + ...`` (integer or ``[c0,c1,...]`` coefficients).

    Parsed series are exact unless an ``O(t^N)`` term or ``prec`` is given.
    """
    s = "".join(text.split())
    if not s:
        raise ParseError("empty series")
    pos = 0
    terms: dict[int, int] = {}
    big_o = None
    first = True
    while pos < len(s):
        m = _TERM.match(s, pos)
        if not m or m.end() == pos:
            raise ParseError(f"cannot parse series at {s[pos:]!r}")
        if not first and not m.group("sign"):
            raise ParseError(f"missing operator before {s[pos:]!r}")
        first = False
        pos = m.end()
        neg = m.group("sign") == "-"
        if m.group("ovar") is not None:
            if m.group("ovar") != var:
                raise ParseError(f"unknown variable {m.group('ovar')!r}")
            n = int(m.group("oexp")) if m.group("oexp") is not None else 1
            big_o = n if big_o is None else min(big_o, n)
            continue
        coef, v = m.group("coef"), m.group("var")
        if coef is None and v is None:
            raise ParseError(f"empty term in {text!r}")
        if m.group("star") and (coef is None or v is None):
            raise ParseError(f"dangling '*' in {text!r}")
        if v is not None and v != var:
            raise ParseError(f"unknown variable {v!r} (expected {var!r})")
        if coef is None:
            c = 1
        elif coef.startswith("["):
            body = coef[1:-1]
            coords = [int(x) for x in body.split(",")] if body else []
            c = field.encode(coords)
        else:
            c = field.from_int(int(coef))
        if v is None:
            k = 0
        else:
            k = int(m.group("exp")) if m.group("exp") is not None else 1
        if neg:
            c = field.neg(c)
        terms[k] = field.add(terms.get(k, 0), c)
    if big_o is not None:
        prec = big_o if prec is None else min(prec, big_o)
    return LaurentSeries(field, terms, prec)
