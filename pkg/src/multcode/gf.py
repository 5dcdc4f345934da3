"""Prime fields F_q and extension fields F_{q^m}.

Elements are handled internally as plain integers: a prime-field element is
its canonical representative in ``[0, q)``, and an extension-field element
``c_0 + c_1 b + ... + c_{m-1} b^{m-1}`` (``b`` a root of the modulus) is the
integer ``c_0 + c_1 q + ... + c_{m-1} q^{m-1}``.  The same integer codes are
used by the vectorized array operations and by the compiled kernels, so a
field object is mostly a bundle of tables plus arithmetic on those codes.

``FieldElem`` and ``ExtElem`` wrap a code together with its field for
readable scalar arithmetic.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import NamedTuple, Sequence

import numpy as np


class FieldError(ArithmeticError):
    """Raised on division by zero or mismatched fields."""


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    k = 3
    while k * k <= n:
        if n % k == 0:
            return False
        k += 2
    return True


def _prime_factors(n: int) -> list[int]:
    out = []
    k = 2
    while k * k <= n:
        if n % k == 0:
            out.append(k)
            while n % k == 0:
                n //= k
        k += 1
    if n > 1:
        out.append(n)
    return out


def _egcd_inv(a: int, p: int) -> int:
    if a % p == 0:
        raise FieldError("division by zero in F_%d" % p)
    r0, r1 = p, a % p
    s0, s1 = 0, 1
    while r1:
        t = r0 // r1
        r0, r1 = r1, r0 - t * r1
        s0, s1 = s1, s0 - t * s1
    return s0 % p


# --- dense polynomials over F_p as low-to-high int lists (no trailing zeros) ---

def _ptrim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def _pmul(a: Sequence[int], b: Sequence[int], p: int) -> list[int]:
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] = (out[i + j] + x * y) % p
    return _ptrim(out)


def _pdivmod(a: Sequence[int], b: Sequence[int], p: int) -> tuple[list[int], list[int]]:
    a = list(a)
    b = _ptrim(list(b))
    if not b:
        raise FieldError("polynomial division by zero")
    inv_lead = _egcd_inv(b[-1], p)
    db = len(b) - 1
    quot = [0] * max(len(a) - db, 0)
    for k in range(len(a) - 1, db - 1, -1):
        c = a[k] * inv_lead % p
        if c:
            quot[k - db] = c
            for j in range(db + 1):
                a[k - db + j] = (a[k - db + j] - c * b[j]) % p
    return _ptrim(quot), _ptrim(a[:db])


def _psub(a: Sequence[int], b: Sequence[int], p: int) -> list[int]:
    n = max(len(a), len(b))
    out = [((a[i] if i < len(a) else 0) - (b[i] if i < len(b) else 0)) % p for i in range(n)]
    return _ptrim(out)


def _pgcd(a: Sequence[int], b: Sequence[int], p: int) -> list[int]:
    a, b = _ptrim(list(a)), _ptrim(list(b))
    while b:
        a, b = b, _pdivmod(a, b, p)[1]
    return a


def _ppowmod(base: list[int], e: int, mod: list[int], p: int) -> list[int]:
    result = [1]
    base = _pdivmod(base, mod, p)[1]
    while e:
        if e & 1:
            result = _pdivmod(_pmul(result, base, p), mod, p)[1]
        base = _pdivmod(_pmul(base, base, p), mod, p)[1]
        e >>= 1
    return result


def is_irreducible(f: Sequence[int], q: int) -> bool:
    """Irreducibility of ``f`` (low-to-high coefficients) over F_q.

    Checks for roots, then ``gcd(f, X^{q^k} - X) = 1`` for every
    ``1 <= k <= deg(f) // 2``.
    """
    f = _ptrim(list(f))
    n = len(f) - 1
    if n < 1:
        return False
    if n == 1:
        return True
    for x in range(q):
        acc = 0
        for c in reversed(f):
            acc = (acc * x + c) % q
        if acc == 0:
            return False
    xk = [0, 1]
    for _ in range(1, n // 2 + 1):
        xk = _ppowmod(xk, q, f, q)
        g = _pgcd(f, _psub(xk, [0, 1], q), q)
        if len(g) > 1:
            return False
    return True


def find_irreducible(q: int, m: int) -> list[int]:
    """Smallest monic irreducible polynomial of degree ``m`` over F_q.

    Candidates are scanned in the order of the integer ``sum c_k q^k`` of
    their non-leading coefficients.  Returns low-to-high coefficients
    (length ``m + 1``, last entry 1).

    >>> find_irreducible(3, 2)
    [1, 0, 1]
    >>> find_irreducible(2, 3)
    [1, 1, 0, 1]
    """
    if m < 1:
        raise ValueError("degree must be >= 1")
    if not is_prime(q):
        raise ValueError("q must be prime, got %d" % q)
    for code in range(q ** m):
        coeffs = [(code // q ** k) % q for k in range(m)] + [1]
        if is_irreducible(coeffs, q):
            return coeffs
    raise AssertionError("no irreducible polynomial found")  # unreachable


class FieldSpec(NamedTuple):
    """Flat description of a field, consumed by the compiled kernels."""

    p: int
    m: int
    order: int
    exp: np.ndarray
    log: np.ndarray


class _FieldBase:
    p: int
    m: int
    order: int

    # scalar/array arithmetic on integer codes; subclasses fill these in

    def sub(self, a, b):
        return self.add(a, self.neg(b))

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    def pow(self, a: int, e: int) -> int:
        if e < 0:
            a, e = self.inv(a), -e
        result = np.ones_like(a) if isinstance(a, np.ndarray) else 1
        while e:
            if e & 1:
                result = self.mul(result, a)
            a = self.mul(a, a)
            e >>= 1
        return result

    def elements(self) -> range:
        return range(self.order)

    def array(self, values) -> np.ndarray:
        arr = np.asarray(values, dtype=np.int64)
        if arr.size and (arr.min() < 0 or arr.max() >= self.order):
            raise ValueError("value out of range for %r" % self)
        return arr

    def random(self, rng: np.random.Generator, size=None):
        return rng.integers(0, self.order, size=size, dtype=np.int64)

    def from_int(self, n: int) -> int:
        """Image of the integer ``n`` under Z -> F."""
        return n % self.p

    @property
    def spec(self) -> FieldSpec:
        return self._spec

    def sum(self, arr, axis=None):
        raise NotImplementedError


class PrimeField(_FieldBase):
    """The field of integers modulo a prime ``q``."""

    def __init__(self, q: int):
        if not is_prime(q):
            raise ValueError("q must be prime, got %r" % (q,))
        if q >= 1 << 30:
            raise ValueError("q too large for int64 kernels")
        self.q = self.p = self.order = q
        self.m = 1
        empty = np.zeros(1, dtype=np.int64)
        self._spec = FieldSpec(q, 1, q, empty, empty)
        self._inv_table = None

    def __repr__(self):
        return "PrimeField(%d)" % self.q

    def __eq__(self, other):
        return isinstance(other, PrimeField) and other.q == self.q

    def __hash__(self):
        return hash(("F", self.q))

    def __call__(self, value: int) -> "FieldElem":
        return FieldElem(self, int(value) % self.q)

    @property
    def base(self) -> "PrimeField":
        return self

    def add(self, a, b):
        return (a + b) % self.q

    def neg(self, a):
        return (-a) % self.q

    def sub(self, a, b):
        return (a - b) % self.q

    def mul(self, a, b):
        return (a * b) % self.q

    def pow(self, a, e: int):
        if isinstance(a, np.ndarray):
            return super().pow(a, e)
        if e < 0:
            a, e = self.inv(a), -e
        return pow(int(a), e, self.q)

    def inv(self, a):
        if isinstance(a, np.ndarray):
            if np.any(a == 0):
                raise FieldError("division by zero in F_%d" % self.q)
            return self.inv_table[a]
        return _egcd_inv(int(a), self.q)

    @property
    def inv_table(self) -> np.ndarray:
        if self._inv_table is None:
            t = np.zeros(self.q, dtype=np.int64)
            for a in range(1, self.q):
                t[a] = _egcd_inv(a, self.q)
            self._inv_table = t
        return self._inv_table

    def sum(self, arr, axis=None):
        return np.sum(arr, axis=axis) % self.q


class ExtField(_FieldBase):
    """F_{q^m} = F_q[X] / (modulus).

    ``modulus`` defaults to ``find_irreducible(q, m)``.  Multiplication of
    codes goes through exp/log tables built from a primitive element, so
    the field order is limited to a few million.
    """

    MAX_ORDER = 1 << 22

    def __init__(self, base: PrimeField | int, m: int, modulus: Sequence[int] | None = None):
        if isinstance(base, int):
            base = PrimeField(base)
        q = base.q
        if modulus is None:
            modulus = find_irreducible(q, m)
        modulus = [int(c) % q for c in modulus]
        if len(modulus) != m + 1 or modulus[-1] != 1:
            raise ValueError("modulus must be monic of degree %d" % m)
        if not is_irreducible(modulus, q):
            raise ValueError("modulus %r is reducible over F_%d" % (modulus, q))
        if q ** m > self.MAX_ORDER:
            raise ValueError("extension field too large: %d^%d" % (q, m))
        self.base = base
        self.q = self.p = q
        self.m = m
        self.order = q ** m
        self.modulus = tuple(modulus)
        self._pw = np.array([q ** k for k in range(m)], dtype=np.int64)
        self._build_tables()
        self._spec = FieldSpec(q, m, self.order, self._exp, self._log)

    def __repr__(self):
        return "ExtField(%d, %d, modulus=%r)" % (self.q, self.m, list(self.modulus))

    def __eq__(self, other):
        return isinstance(other, ExtField) and (other.q, other.modulus) == (self.q, self.modulus)

    def __hash__(self):
        return hash(("E", self.q, self.modulus))

    def __call__(self, value) -> "ExtElem":
        if isinstance(value, (list, tuple)):
            value = self.from_coeffs(value)
        return ExtElem(self, int(value))

    # --- code <-> coefficient vectors ---

    def to_coeffs(self, x: int) -> list[int]:
        x = int(x)
        return [(x // self.q ** k) % self.q for k in range(self.m)]

    def from_coeffs(self, coeffs: Sequence[int]) -> int:
        if len(coeffs) != self.m:
            raise ValueError("expected %d coefficients" % self.m)
        return sum((int(c) % self.q) * self.q ** k for k, c in enumerate(coeffs))

    def digits(self, arr) -> np.ndarray:
        arr = np.asarray(arr, dtype=np.int64)
        return (arr[..., None] // self._pw) % self.q

    def undigits(self, dig: np.ndarray) -> np.ndarray:
        return dig @ self._pw

    def generator(self) -> int:
        """Code of the root of the modulus (the element ``X``)."""
        return self.from_coeffs([0, 1] + [0] * (self.m - 2)) if self.m > 1 else (-self.modulus[0]) % self.q

    def _polymul_code(self, a: int, b: int) -> int:
        prod = _pmul(self.to_coeffs(a), self.to_coeffs(b), self.q)
        rem = _pdivmod(prod, list(self.modulus), self.q)[1]
        return self.from_coeffs(rem + [0] * (self.m - len(rem)))

    def _build_tables(self):
        n = self.order - 1
        factors = _prime_factors(n) if n > 1 else []
        # the multiplicative group is cyclic; find a generator by order test
        for g in range(1, self.order):
            if all(self._slow_pow(g, n // f) != 1 for f in factors):
                break
        exp = np.zeros(2 * n + 1, dtype=np.int64)
        log = np.zeros(self.order, dtype=np.int64)
        x = 1
        for k in range(n):
            exp[k] = x
            log[x] = k
            x = self._polymul_code(x, g)
        exp[n:2 * n] = exp[:n]
        self._exp, self._log = exp, log
        self.primitive = g

    def _slow_pow(self, a: int, e: int) -> int:
        result = 1
        while e:
            if e & 1:
                result = self._polymul_code(result, a)
            a = self._polymul_code(a, a)
            e >>= 1
        return result

    # --- arithmetic on codes (ints or int64 arrays) ---

    def add(self, a, b):
        if isinstance(a, np.ndarray) or isinstance(b, np.ndarray):
            return self.undigits((self.digits(a) + self.digits(b)) % self.q)
        return self.from_coeffs([(x + y) % self.q for x, y in zip(self.to_coeffs(a), self.to_coeffs(b))])

    def neg(self, a):
        if isinstance(a, np.ndarray):
            return self.undigits((-self.digits(a)) % self.q)
        return self.from_coeffs([(-x) % self.q for x in self.to_coeffs(a)])

    def sub(self, a, b):
        if isinstance(a, np.ndarray) or isinstance(b, np.ndarray):
            return self.undigits((self.digits(a) - self.digits(b)) % self.q)
        return self.from_coeffs([(x - y) % self.q for x, y in zip(self.to_coeffs(a), self.to_coeffs(b))])

    def mul(self, a, b):
        if isinstance(a, np.ndarray) or isinstance(b, np.ndarray):
            a = np.asarray(a, dtype=np.int64)
            b = np.asarray(b, dtype=np.int64)
            out = self._exp[self._log[a] + self._log[b]]
            return np.where((a == 0) | (b == 0), 0, out)
        if a == 0 or b == 0:
            return 0
        return int(self._exp[self._log[a] + self._log[b]])

    def inv(self, a):
        if isinstance(a, np.ndarray):
            if np.any(a == 0):
                raise FieldError("division by zero in %r" % self)
            return self._exp[(self.order - 1 - self._log[a]) % (self.order - 1)]
        return self._egcd_inv(int(a))

    def _egcd_inv(self, a: int) -> int:
        if a == 0:
            raise FieldError("division by zero in %r" % self)
        q = self.q
        r0, r1 = list(self.modulus), _ptrim(self.to_coeffs(a))
        s0, s1 = [], [1]
        while len(r1) > 1:
            t, rem = _pdivmod(r0, r1, q)
            r0, r1 = r1, rem
            s0, s1 = s1, _psub(s0, _pmul(t, s1, q), q)
        # r1 is a nonzero constant
        c = _egcd_inv(r1[0], q)
        s = [x * c % q for x in _pdivmod(s1, list(self.modulus), q)[1]]
        return self.from_coeffs(s + [0] * (self.m - len(s)))

    def pow(self, a, e: int):
        if isinstance(a, np.ndarray):
            a = np.asarray(a, dtype=np.int64)
            if e == 0:
                return np.ones_like(a)
            out = self._exp[(self._log[a] * e) % (self.order - 1)]
            return np.where(a == 0, 0, out)
        if a == 0:
            if e < 0:
                raise FieldError("division by zero in %r" % self)
            return 1 if e == 0 else 0
        return int(self._exp[(int(self._log[a]) * e) % (self.order - 1)])

    def sum(self, arr, axis=None):
        dig = self.digits(arr)
        if axis is None:
            tot = dig.reshape(-1, self.m).sum(axis=0) % self.q
        else:
            ax = axis if axis >= 0 else axis - 1
            tot = dig.sum(axis=ax) % self.q
        return self.undigits(tot)

    def from_base(self, x):
        """Embed base-field codes (identity on codes, by construction)."""
        return x

    def frobenius(self, x, k: int = 1):
        return self.pow(x, self.q ** k)

    def trace(self, x):
        """Absolute trace ``x + x^q + ... + x^{q^{m-1}}``, a code in ``[0, q)``."""
        acc = x
        y = x
        for _ in range(1, self.m):
            y = self.pow(y, self.q)
            acc = self.add(acc, y)
        if isinstance(acc, np.ndarray):
            assert np.all(acc < self.q)
        else:
            assert acc < self.q, "trace left the base field"
        return acc


def trace(x: "ExtElem") -> "FieldElem":
    """Trace of an extension-field element down to F_q."""
    return x.field.base(x.field.trace(x.value))


@dataclass(frozen=True)
class FieldElem:
    field: PrimeField
    value: int

    def _coerce(self, other) -> int:
        if isinstance(other, FieldElem):
            if other.field != self.field:
                raise FieldError("mixed fields: %r, %r" % (self.field, other.field))
            return other.value
        if isinstance(other, int):
            return other % self.field.q
        raise TypeError("cannot combine %r with a field element" % (other,))

    def __add__(self, other):
        o = self._coerce(other)
        return FieldElem(self.field, self.field.add(self.value, o))

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        return FieldElem(self.field, self.field.sub(self.value, o))

    def __rsub__(self, other):
        o = self._coerce(other)
        return FieldElem(self.field, self.field.sub(o, self.value))

    def __mul__(self, other):
        o = self._coerce(other)
        return FieldElem(self.field, self.field.mul(self.value, o))

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        return FieldElem(self.field, self.field.div(self.value, o))

    def __rtruediv__(self, other):
        o = self._coerce(other)
        return FieldElem(self.field, self.field.div(o, self.value))

    def __neg__(self):
        return FieldElem(self.field, self.field.neg(self.value))

    def __pow__(self, e: int):
        return FieldElem(self.field, self.field.pow(self.value, e))

    def inv(self) -> "FieldElem":
        return FieldElem(self.field, self.field.inv(self.value))

    def __int__(self):
        return self.value

    def __repr__(self):
        return "%d (mod %d)" % (self.value, self.field.q)


@dataclass(frozen=True)
class ExtElem:
    field: ExtField
    value: int

    @property
    def coeffs(self) -> tuple[FieldElem, ...]:
        return tuple(self.field.base(c) for c in self.field.to_coeffs(self.value))

    def _coerce(self, other) -> int:
        if isinstance(other, ExtElem):
            if other.field != self.field:
                raise FieldError("mixed fields")
            return other.value
        if isinstance(other, FieldElem) and other.field == self.field.base:
            return other.value
        if isinstance(other, int):
            return other % self.field.q
        raise TypeError("cannot combine %r with a field element" % (other,))

    def __add__(self, other):
        return ExtElem(self.field, self.field.add(self.value, self._coerce(other)))

    __radd__ = __add__

    def __sub__(self, other):
        return ExtElem(self.field, self.field.sub(self.value, self._coerce(other)))

    def __rsub__(self, other):
        return ExtElem(self.field, self.field.sub(self._coerce(other), self.value))

    def __mul__(self, other):
        return ExtElem(self.field, self.field.mul(self.value, self._coerce(other)))

    __rmul__ = __mul__

    def __truediv__(self, other):
        return ExtElem(self.field, self.field.div(self.value, self._coerce(other)))

    def __neg__(self):
        return ExtElem(self.field, self.field.neg(self.value))

    def __pow__(self, e: int):
        return ExtElem(self.field, self.field.pow(self.value, e))

    def inv(self) -> "ExtElem":
        return ExtElem(self.field, self.field.inv(self.value))

    def trace(self) -> FieldElem:
        return trace(self)

    def __int__(self):
        return self.value

    def __repr__(self):
        return "ExtElem(%r)" % [c.value for c in self.coeffs]


Field = PrimeField | ExtField


@lru_cache(maxsize=None)
def prime_field(q: int) -> PrimeField:
    return PrimeField(q)


@lru_cache(maxsize=None)
def ext_field(q: int, m: int) -> ExtField:
    return ExtField(prime_field(q), m)
