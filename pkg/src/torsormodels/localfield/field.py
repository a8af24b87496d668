"""Finite fields F_q = F_p[s]/(modulus).

Elements are encoded as integers in [0, q): the base-p digits of the
encoding are the coordinates in the basis 1, s, ..., s^(e-1).  For e = 1
the encoding is the residue itself, so the prime-field path is plain
modular arithmetic.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from itertools import product

# Conway polynomials, coefficients low -> high, monic.
_CONWAY = {
    (2, 2): (1, 1, 1),
    (2, 3): (1, 1, 0, 1),
    (3, 2): (2, 2, 1),
    (3, 3): (1, 2, 0, 1),
    (5, 2): (2, 4, 1),
    (5, 3): (3, 3, 0, 1),
    (7, 2): (3, 6, 1),
    (7, 3): (4, 0, 6, 1),
}

MAX_TABLE_ORDER = 1024


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    k = 2
    while k * k <= n:
        if n % k == 0:
            return False
        k += 1
    return True


def _poly_mod(a, m, p):
    """Remainder of a modulo the monic polynomial m over F_p (lists, low -> high)."""
    a = list(a)
    d = len(m) - 1
    for k in range(len(a) - 1, d - 1, -1):
        c = a[k] % p
        if c:
            for j in range(d + 1):
                a[k - d + j] = (a[k - d + j] - c * m[j]) % p
    return [x % p for x in a[:d]] + [0] * max(0, d - len(a))


def is_irreducible(modulus, p: int) -> bool:
    """Trial division by every monic polynomial of degree <= deg/2."""
    d = len(modulus) - 1
    if d < 1 or modulus[-1] % p != 1:
        return False
    for k in range(1, d // 2 + 1):
        for low in product(range(p), repeat=k):
            divisor = list(low) + [1]
            if not any(_poly_mod(modulus, divisor, p)):
                return False
    return True


def default_modulus(p: int, e: int) -> tuple:
    if (p, e) in _CONWAY:
        return _CONWAY[(p, e)]
    for low in product(range(p), repeat=e):
        cand = tuple(low) + (1,)
        if low[0] != 0 and is_irreducible(cand, p):
            return cand
    raise ValueError(f"no irreducible polynomial of degree {e} over F_{p}")


@dataclass(frozen=True)
class FieldSpec:
    """The residue field F_q, q = p^e."""

    p: int
    e: int = 1
    modulus: tuple | None = field(default=None)

    def __post_init__(self):
        if not is_prime(self.p):
            raise ValueError(f"p = {self.p} is not prime")
        if self.e < 1:
            raise ValueError("extension degree must be >= 1")
        if self.e == 1:
            object.__setattr__(self, "modulus", None)
            return
        mod = self.modulus
        if mod is None:
            mod = default_modulus(self.p, self.e)
        mod = tuple(int(c) % self.p for c in mod)
        if len(mod) != self.e + 1 or not is_irreducible(mod, self.p):
            raise ValueError(f"modulus {mod} is not a monic irreducible of degree {self.e}")
        if self.p ** self.e > MAX_TABLE_ORDER:
            raise ValueError(f"F_q with q > {MAX_TABLE_ORDER} is not supported")
        object.__setattr__(self, "modulus", mod)

    @property
    def q(self) -> int:
        return self.p ** self.e

    def __repr__(self):
        if self.e == 1:
            return f"F_{self.p}"
        return f"F_{self.p}^{self.e}[{','.join(map(str, self.modulus))}]"

    # -- encoding -------------------------------------------------------

    def coords(self, a: int) -> tuple:
        out = []
        for _ in range(self.e):
            a, r = divmod(a, self.p)
            out.append(r)
        return tuple(out)

    def encode(self, coords) -> int:
        coords = list(coords)
        if len(coords) > self.e:
            raise ValueError(f"{len(coords)} coordinates for an extension of degree {self.e}")
        v = 0
        for c in reversed(coords):
            v = v * self.p + int(c) % self.p
        return v

    def from_int(self, n: int) -> int:
        """Image of an integer in the prime field."""
        return n % self.p

    # -- arithmetic -----------------------------------------------------

    @cached_property
    def _tables(self):
        q, p = self.q, self.p
        els = [self.coords(a) for a in range(q)]
        add = [[self.encode([(x + y) % p for x, y in zip(a, b)]) for b in els] for a in els]
        mul = []
        for a in els:
            row = []
            for b in els:
                prod = [0] * (2 * self.e - 1)
                for i, x in enumerate(a):
                    if x:
                        for j, y in enumerate(b):
                            prod[i + j] += x * y
                row.append(self.encode(_poly_mod(prod, self.modulus, p)))
            mul.append(row)
        neg = [self.encode([(-x) % p for x in a]) for a in els]
        return add, mul, neg

    def add(self, a: int, b: int) -> int:
        if self.e == 1:
            return (a + b) % self.p
        return self._tables[0][a][b]

    def neg(self, a: int) -> int:
        if self.e == 1:
            return (-a) % self.p
        return self._tables[2][a]

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def mul(self, a: int, b: int) -> int:
        if self.e == 1:
            return (a * b) % self.p
        return self._tables[1][a][b]

    def pow(self, a: int, n: int) -> int:
        if n < 0:
            return self.pow(self.inv(a), -n)
        if self.e == 1:
            return pow(a, n, self.p)
        r = 1
        while n:
            if n & 1:
                r = self.mul(r, a)
            a = self.mul(a, a)
            n >>= 1
        return r

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("inverse of 0 in a finite field")
        return self.pow(a, self.q - 2)

    def frobenius(self, a: int) -> int:
        return self.pow(a, self.p)

    def pth_root(self, a: int) -> int:
        # Frobenius has order e, so its inverse is x -> x^(p^(e-1)).
        return self.pow(a, self.p ** (self.e - 1))

    def trace(self, a: int) -> int:
        """Absolute trace to F_p, returned as a prime-field element."""
        s, x = 0, a
        for _ in range(self.e):
            s = self.add(s, x)
            x = self.frobenius(x)
        return s

    def elements(self):
        return range(self.q)

    def element(self, value) -> "FieldElement":
        if isinstance(value, (list, tuple)):
            value = self.encode(value)
        return FieldElement(self, int(value) % self.q if self.e == 1 else int(value))


@dataclass(frozen=True)
class FieldElement:
    """User-facing wrapper around an encoded element of F_q."""

    owner: FieldSpec
    value: int

    @property
    def coordinates(self) -> tuple:
        return self.owner.coords(self.value)

    def _other(self, other):
        if isinstance(other, FieldElement):
            if other.owner != self.owner:
                raise ValueError("elements of different fields")
            return other.value
        if isinstance(other, int):
            return self.owner.from_int(other)
        return NotImplemented

    def __add__(self, other):
        b = self._other(other)
        return NotImplemented if b is NotImplemented else FieldElement(self.owner, self.owner.add(self.value, b))

    __radd__ = __add__

    def __sub__(self, other):
        b = self._other(other)
        return NotImplemented if b is NotImplemented else FieldElement(self.owner, self.owner.sub(self.value, b))

    def __rsub__(self, other):
        b = self._other(other)
        return NotImplemented if b is NotImplemented else FieldElement(self.owner, self.owner.sub(b, self.value))

    def __mul__(self, other):
        b = self._other(other)
        return NotImplemented if b is NotImplemented else FieldElement(self.owner, self.owner.mul(self.value, b))

    __rmul__ = __mul__

    def __neg__(self):
        return FieldElement(self.owner, self.owner.neg(self.value))

    def __pow__(self, n: int):
        return FieldElement(self.owner, self.owner.pow(self.value, n))

    def __truediv__(self, other):
        b = self._other(other)
        return NotImplemented if b is NotImplemented else self * FieldElement(self.owner, self.owner.inv(b))

    def inverse(self):
        return FieldElement(self.owner, self.owner.inv(self.value))

    def pth_root(self):
        return FieldElement(self.owner, self.owner.pth_root(self.value))

    def __bool__(self):
        return self.value != 0

    def __str__(self):
        if self.owner.e == 1:
            return str(self.value)
        return "[" + ",".join(map(str, self.coordinates)) + "]"
