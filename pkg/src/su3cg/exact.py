"""Exact arithmetic over finite sums of rational multiples of square roots.

Every coefficient produced by this package is an element of the field
Q(sqrt(2), sqrt(3), sqrt(5), ...).  Values are stored canonically as a sorted
tuple of ``(radicand, coefficient)`` pairs with squarefree positive integer
radicands and nonzero :class:`~fractions.Fraction` coefficients, so equality
of values is equality of representations.

Square roots of products and ratios of factorials are built from prime
exponent vectors (see :func:`sqrt_factorials`), which avoids factoring the
large integers that appear for big representation labels.
"""
from __future__ import annotations

import math
import re
import threading
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping, Sequence, Union

import gmpy2

__all__ = [
    "ExactReal",
    "HalfInt",
    "DivisorNotRationalizable",
    "MalformedHalfInt",
    "canonicalize",
    "factorial",
    "factorial_ratio",
    "binomial",
    "sqrt_factorials",
    "square_split",
]

Number = Union[int, Fraction]


class MalformedHalfInt(ValueError):
    """A label is not an integer or half-integer, or j+m is not integral."""


class DivisorNotRationalizable(ArithmeticError):
    """Conjugate rationalization failed to reach a rational norm."""


# ---------------------------------------------------------------------------
# factorials and primes


class _FactorialCache:
    """Growable process-wide table of n!.  Reads are lock-free; appends lock."""

    def __init__(self) -> None:
        self._table = [1]
        self._lock = threading.Lock()

    def __call__(self, n: int) -> int:
        table = self._table
        if n < len(table):
            return table[n]
        if n < 0:
            raise ValueError(f"factorial of negative number {n}")
        with self._lock:
            table = self._table
            if n >= len(table):
                grown = list(table)
                acc = grown[-1]
                for i in range(len(grown), n + 1):
                    acc *= i
                    grown.append(acc)
                self._table = grown
            return self._table[n]

    def __len__(self) -> int:
        return len(self._table)


factorial = _FactorialCache()


def factorial_ratio(numerator_factorials: Iterable[int], denominator_factorials: Iterable[int]) -> Fraction:
    """Return prod(a!) / prod(b!) exactly."""
    num = 1
    for a in numerator_factorials:
        num *= factorial(a)
    den = 1
    for b in denominator_factorials:
        den *= factorial(b)
    return Fraction(num, den)


def binomial(n: int, k: int) -> int:
    if k < 0 or k > n:
        return 0
    return math.comb(n, k)


_primes: list[int] = [2, 3, 5, 7, 11, 13]
_primes_lock = threading.Lock()


def primes_upto(n: int) -> list[int]:
    """Primes <= n, from a monotonically grown sieve."""
    global _primes
    if _primes[-1] < n:
        with _primes_lock:
            if _primes[-1] < n:
                limit = max(n, 2 * _primes[-1])
                sieve = bytearray([1]) * (limit + 1)
                sieve[0:2] = b"\x00\x00"
                for p in range(2, math.isqrt(limit) + 1):
                    if sieve[p]:
                        sieve[p * p :: p] = bytearray(len(range(p * p, limit + 1, p)))
                _primes = [i for i, flag in enumerate(sieve) if flag]
    primes = _primes
    hi = _bisect_right(primes, n)
    return primes[:hi]


def _bisect_right(seq: Sequence[int], x: int) -> int:
    lo, hi = 0, len(seq)
    while lo < hi:
        mid = (lo + hi) // 2
        if seq[mid] <= x:
            lo = mid + 1
        else:
            hi = mid
    return lo


@lru_cache(maxsize=None)
def factorial_exponents(n: int) -> tuple[tuple[int, int], ...]:
    """Prime factorization of n! via Legendre's formula."""
    if n < 0:
        raise ValueError(f"factorial of negative number {n}")
    out = []
    for p in primes_upto(n):
        e, q = 0, n
        while q:
            q //= p
            e += q
        out.append((p, e))
    return tuple(out)


@lru_cache(maxsize=65536)
def int_exponents(n: int) -> tuple[tuple[int, int], ...]:
    """Prime factorization of a small positive integer by trial division."""
    if n <= 0:
        raise ValueError(f"cannot factor {n}")
    out = []
    for p in primes_upto(math.isqrt(n) + 1):
        if p * p > n:
            break
        if n % p == 0:
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            out.append((p, e))
    if n > 1:
        out.append((n, 1))
    return tuple(out)


_TRIAL_LIMIT = 1 << 14


def _squarefree_int(n: int) -> tuple[int, int]:
    """Split a positive integer as n = s**2 * r with r squarefree.

    Small prime factors are removed by trial division; a cofactor without
    small prime factors is checked for being a perfect square and otherwise
    fully factored when it is small enough.  A large leftover cofactor with no
    factor below the trial limit is taken as squarefree.
    """
    if n <= 0:
        raise ValueError(f"square_split needs a positive integer, got {n}")
    if n < 4:
        return 1, n
    s, r = 1, 1
    for p in primes_upto(_TRIAL_LIMIT):
        if n == 1:
            break
        if p * p > n:
            break
        if n % p:
            continue
        e = 0
        while n % p == 0:
            n //= p
            e += 1
        if e >= 2:
            s *= p ** (e // 2)
        if e & 1:
            r *= p
    if n > 1:
        root, exact = gmpy2.iroot(gmpy2.mpz(n), 2)
        if exact:
            s *= int(root)
        elif n < (1 << 96):
            from sympy import factorint

            for p, e in factorint(n).items():
                s *= p ** (e // 2)
                if e & 1:
                    r *= p
        else:
            r *= n
    return s, r


def square_split(q: Number) -> tuple[Fraction, int]:
    """Write a positive rational q as c**2 * r with c rational and r a squarefree integer.

    sqrt(a/b) is folded as sqrt(a*b)/b before splitting.
    """
    q = Fraction(q)
    if q <= 0:
        raise ValueError(f"square_split needs a positive rational, got {q}")
    num, den = q.numerator, q.denominator
    s, r = _squarefree_int(num * den)
    return Fraction(s, den), r


# ---------------------------------------------------------------------------
# half integers


class HalfInt:
    """An integer or half-integer, stored as twice its value."""

    __slots__ = ("twice",)

    def __init__(self, value: Union[int, Fraction, str, "HalfInt"] = 0, *, twice: int | None = None) -> None:
        if twice is not None:
            object.__setattr__(self, "twice", int(twice))
            return
        object.__setattr__(self, "twice", to_twice(value))

    def __setattr__(self, name, value):
        raise AttributeError("HalfInt is immutable")

    @classmethod
    def from_twice(cls, twice: int) -> "HalfInt":
        return cls(twice=twice)

    @property
    def is_integer(self) -> bool:
        return self.twice % 2 == 0

    def __int__(self) -> int:
        if self.twice % 2:
            raise MalformedHalfInt(f"{self} is not an integer")
        return self.twice // 2

    def __index__(self) -> int:
        return int(self)

    def __float__(self) -> float:
        return self.twice / 2

    def to_fraction(self) -> Fraction:
        return Fraction(self.twice, 2)

    def _coerce(self, other) -> int | None:
        try:
            return to_twice(other)
        except (MalformedHalfInt, TypeError):
            return None

    def __add__(self, other):
        t = self._coerce(other)
        return NotImplemented if t is None else HalfInt(twice=self.twice + t)

    __radd__ = __add__

    def __sub__(self, other):
        t = self._coerce(other)
        return NotImplemented if t is None else HalfInt(twice=self.twice - t)

    def __rsub__(self, other):
        t = self._coerce(other)
        return NotImplemented if t is None else HalfInt(twice=t - self.twice)

    def __neg__(self):
        return HalfInt(twice=-self.twice)

    def __abs__(self):
        return HalfInt(twice=abs(self.twice))

    def __mul__(self, other):
        if isinstance(other, int):
            return HalfInt(twice=self.twice * other)
        return NotImplemented

    __rmul__ = __mul__

    def _cmp_key(self, other):
        t = self._coerce(other)
        if t is None:
            raise TypeError(f"cannot compare HalfInt with {type(other).__name__}")
        return t

    def __eq__(self, other):
        t = self._coerce(other)
        return t is not None and t == self.twice

    def __hash__(self):
        if self.twice % 2 == 0:
            return hash(self.twice // 2)
        return hash(Fraction(self.twice, 2))

    def __lt__(self, other):
        return self.twice < self._cmp_key(other)

    def __le__(self, other):
        return self.twice <= self._cmp_key(other)

    def __gt__(self, other):
        return self.twice > self._cmp_key(other)

    def __ge__(self, other):
        return self.twice >= self._cmp_key(other)

    def __repr__(self) -> str:
        return f"HalfInt({self})"

    def __str__(self) -> str:
        return str(self.twice // 2) if self.twice % 2 == 0 else f"{self.twice}/2"


def to_twice(x) -> int:
    """Twice the value of an integer, half-integer, Fraction, HalfInt or string like '3/2'."""
    if isinstance(x, HalfInt):
        return x.twice
    if isinstance(x, bool):
        raise TypeError("bool is not a half-integer")
    if isinstance(x, int):
        return 2 * x
    if isinstance(x, str):
        x = Fraction(x.strip())
    if isinstance(x, float):
        if (2 * x) != int(2 * x):
            raise MalformedHalfInt(f"{x} is not a half-integer")
        return int(2 * x)
    if isinstance(x, Fraction):
        if x.denominator not in (1, 2):
            raise MalformedHalfInt(f"{x} is not a half-integer")
        return x.numerator * (2 // x.denominator)
    raise TypeError(f"cannot interpret {x!r} as a half-integer")


# ---------------------------------------------------------------------------
# the field element


def _coprime_basis(values: Iterable[int]) -> list[int]:
    """A set of pairwise coprime integers > 1 whose products generate every value."""
    basis: list[int] = []
    for v in values:
        pending = [v]
        while pending:
            x = pending.pop()
            if x == 1:
                continue
            for i, b in enumerate(basis):
                g = math.gcd(x, b)
                if g > 1:
                    del basis[i]
                    pending.extend(y for y in (g, b // g, x // g) if y > 1)
                    break
            else:
                basis.append(x)
    return sorted(set(basis))


class ExactReal:
    """A finite sum of terms ``c * sqrt(r)`` in canonical form.

    ``terms`` is a tuple of ``(r, c)`` sorted by the squarefree radicand ``r``;
    each ``c`` is a nonzero Fraction.  The empty tuple is zero.
    """

    __slots__ = ("terms",)

    def __init__(self, value: Union[int, Fraction, "ExactReal"] = 0) -> None:
        if isinstance(value, ExactReal):
            terms = value.terms
        else:
            value = Fraction(value)
            terms = ((1, value),) if value else ()
        object.__setattr__(self, "terms", terms)

    def __setattr__(self, name, value):
        raise AttributeError("ExactReal is immutable")

    @classmethod
    def _raw(cls, terms: tuple) -> "ExactReal":
        obj = object.__new__(cls)
        object.__setattr__(obj, "terms", terms)
        return obj

    @classmethod
    def _from_dict(cls, acc: Mapping[int, Fraction]) -> "ExactReal":
        return cls._raw(tuple(sorted((r, c) for r, c in acc.items() if c)))

    @classmethod
    def sqrt(cls, q: Number, coeff: Number = 1) -> "ExactReal":
        """coeff * sqrt(q) for rational q >= 0."""
        q = Fraction(q)
        coeff = Fraction(coeff)
        if q < 0:
            raise ValueError("square root of a negative rational")
        if q == 0 or coeff == 0:
            return cls._raw(())
        c, r = square_split(q)
        return cls._raw(((r, coeff * c),))

    @classmethod
    def single(cls, coeff: Fraction, radicand: int) -> "ExactReal":
        """Trusted constructor: radicand must already be squarefree."""
        if not coeff:
            return cls._raw(())
        return cls._raw(((radicand, coeff),))

    # -- inspection ---------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def is_rational(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and self.terms[0][0] == 1)

    def to_fraction(self) -> Fraction:
        if not self.terms:
            return Fraction(0)
        if not self.is_rational():
            raise ValueError(f"{self} is irrational")
        return self.terms[0][1]

    def is_single(self) -> bool:
        return len(self.terms) <= 1

    def square(self) -> "ExactReal":
        return self * self

    def __float__(self) -> float:
        total = 0.0
        for r, c in self.terms:
            total += _frac_float(c) * math.sqrt(r)
        return total

    def sign(self) -> int:
        """Exact sign.

        Distinct squarefree roots are linearly independent over Q, so a
        nonempty canonical form is nonzero; the sign is found by evaluating
        at increasing precision until it exceeds the rounding bound.
        """
        if not self.terms:
            return 0
        if len(self.terms) == 1:
            return 1 if self.terms[0][1] > 0 else -1
        digits = 40
        scale = self._scale()
        while True:
            approx = self.to_decimal_mpf(digits)
            if abs(approx) > scale * len(self.terms) * gmpy2.mpfr(10) ** (-digits + 5):
                return 1 if approx > 0 else -1
            digits *= 2

    def _scale(self):
        return max(abs(gmpy2.mpq(c.numerator, c.denominator)) * gmpy2.sqrt(gmpy2.mpfr(r)) for r, c in self.terms)

    def to_decimal_mpf(self, digits: int = 30):
        ctx = gmpy2.get_context().copy()
        ctx.precision = int(digits * 3.33) + 16
        with gmpy2.context(ctx):
            total = gmpy2.mpfr(0)
            for r, c in self.terms:
                total += gmpy2.mpq(c.numerator, c.denominator) * gmpy2.sqrt(gmpy2.mpfr(r))
            return total

    def to_decimal(self, digits: int = 15) -> str:
        """Display-only decimal rendering with `digits` significant digits."""
        if not self.terms:
            return "0"
        value = self.to_decimal_mpf(digits + 10)
        return f"{float(value):.{digits}g}" if digits <= 17 else gmpy2.mpfr(value).__format__(f".{digits}g")

    # -- ring operations ----------------------------------------------------

    @staticmethod
    def _coerce(x) -> "ExactReal | None":
        if isinstance(x, ExactReal):
            return x
        if isinstance(x, (int, Fraction)) and not isinstance(x, bool):
            return ExactReal(x)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if not o.terms:
            return self
        if not self.terms:
            return o
        acc = dict(self.terms)
        for r, c in o.terms:
            acc[r] = acc.get(r, 0) + c
        return ExactReal._from_dict(acc)

    __radd__ = __add__

    def __neg__(self) -> "ExactReal":
        return ExactReal._raw(tuple((r, -c) for r, c in self.terms))

    def __pos__(self) -> "ExactReal":
        return self

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            if not other:
                return ExactReal._raw(())
            return ExactReal._raw(tuple((r, c * other) for r, c in self.terms))
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if not self.terms or not o.terms:
            return ExactReal._raw(())
        if len(self.terms) == 1 and len(o.terms) == 1:
            (r1, c1), (r2, c2) = self.terms[0], o.terms[0]
            g = math.gcd(r1, r2)
            return ExactReal._raw((((r1 // g) * (r2 // g), c1 * c2 * g),))
        acc: dict[int, Fraction] = {}
        for r1, c1 in self.terms:
            for r2, c2 in o.terms:
                g = math.gcd(r1, r2)
                r = (r1 // g) * (r2 // g)
                acc[r] = acc.get(r, 0) + c1 * c2 * g
        return ExactReal._from_dict(acc)

    __rmul__ = __mul__

    def conjugate_by(self, base: int) -> "ExactReal":
        """Flip the sign of every term whose radicand is divisible by `base`."""
        return ExactReal._raw(tuple((r, -c if r % base == 0 else c) for r, c in self.terms))

    def inverse(self) -> "ExactReal":
        if not self.terms:
            raise ZeroDivisionError("division by exact zero")
        if len(self.terms) == 1:
            r, c = self.terms[0]
            return ExactReal._raw(((r, 1 / (c * r)),))
        num = ExactReal(1)
        den = self
        basis = _coprime_basis(r for r, _ in self.terms if r != 1)
        for base in basis:
            if den.is_rational():
                break
            conj = den.conjugate_by(base)
            num = num * conj
            den = den * conj
        if not den.is_rational():
            raise DivisorNotRationalizable(f"could not rationalize {self}")
        return num * (1 / den.to_fraction())

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if isinstance(other, (int, Fraction)):
            if not other:
                raise ZeroDivisionError("division by exact zero")
            return ExactReal._raw(tuple((r, c / other) for r, c in self.terms))
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o * self.inverse()

    def __pow__(self, n: int) -> "ExactReal":
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return self.inverse() ** (-n)
        result = ExactReal(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    # -- comparison ---------------------------------------------------------

    def __eq__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self.terms == o.terms

    def __hash__(self):
        if self.is_rational():
            return hash(self.to_fraction())
        return hash(self.terms)

    def __lt__(self, other):
        return (self - other).sign() < 0

    def __le__(self, other):
        return (self - other).sign() <= 0

    def __gt__(self, other):
        return (self - other).sign() > 0

    def __ge__(self, other):
        return (self - other).sign() >= 0

    def __abs__(self):
        return -self if self.sign() < 0 else self

    # -- rendering ----------------------------------------------------------

    def __repr__(self) -> str:
        return f"ExactReal({str(self)!r})"

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for i, (r, c) in enumerate(self.terms):
            neg = c < 0
            body = _term_text(abs(c), r)
            if i == 0:
                parts.append(("-" if neg else "") + body)
            else:
                parts.append((" - " if neg else " + ") + body)
        return "".join(parts)

    def to_latex(self) -> str:
        if not self.terms:
            return "0"
        out = []
        for i, (r, c) in enumerate(self.terms):
            neg = c < 0
            c = abs(c)
            if r == 1:
                body = _latex_frac(c)
            elif c == 1:
                body = f"\\sqrt{{{r}}}"
            else:
                body = f"{_latex_frac(c)}\\sqrt{{{r}}}"
            sign = ("-" if neg else "") if i == 0 else (" - " if neg else " + ")
            out.append(sign + body)
        return "".join(out)

    def to_json(self) -> dict:
        return {"terms": [{"num": c.numerator, "den": c.denominator, "rad": r} for r, c in self.terms]}

    @classmethod
    def from_json(cls, data: Mapping) -> "ExactReal":
        return canonicalize((Fraction(t["num"], t["den"]), t["rad"]) for t in data["terms"])

    @classmethod
    def parse(cls, text: str) -> "ExactReal":
        """Inverse of ``str``: sums of ``a/b``, ``sqrt(r)``, ``n*sqrt(r)``, ``(a/b)*sqrt(r)``."""
        s = text.strip().replace(" ", "")
        if not s:
            raise ValueError("empty expression")
        pieces = re.findall(r"[+-]?[^+-]+", s)
        if "".join(pieces) != s:
            raise ValueError(f"cannot parse {text!r}")
        raw = []
        for piece in pieces:
            m = _TERM_RE.fullmatch(piece)
            if not m:
                raise ValueError(f"cannot parse term {piece!r} in {text!r}")
            coeff = Fraction(m.group("coef") or m.group("pcoef") or 1)
            if m.group("sign") == "-":
                coeff = -coeff
            rad = m.group("rad")
            raw.append((coeff, Fraction(rad) if rad else Fraction(1)))
        return canonicalize(raw)


_TERM_RE = re.compile(
    r"(?P<sign>[+-])?"
    r"(?:\((?P<pcoef>\d+(?:/\d+)?)\)\*|(?P<coef>\d+(?:/\d+)?)(?=\*|$)\*?)?"
    r"(?:sqrt\((?P<rad>\d+(?:/\d+)?)\))?"
)


def _term_text(c: Fraction, r: int) -> str:
    if r == 1:
        return str(c)
    if c == 1:
        return f"sqrt({r})"
    if c.denominator == 1:
        return f"{c.numerator}*sqrt({r})"
    return f"({c})*sqrt({r})"


def _latex_frac(c: Fraction) -> str:
    if c.denominator == 1:
        return str(c.numerator)
    return f"\\frac{{{c.numerator}}}{{{c.denominator}}}"


def _frac_float(c: Fraction) -> float:
    try:
        return c.numerator / c.denominator
    except OverflowError:
        return float(gmpy2.mpq(c.numerator, c.denominator))


def canonicalize(terms: Iterable[tuple[Number, Number]]) -> ExactReal:
    """Canonical form of a raw sum of ``coeff * sqrt(radicand)`` terms, with radicand rational >= 0."""
    acc: dict[int, Fraction] = {}
    for coeff, rad in terms:
        coeff = Fraction(coeff)
        rad = Fraction(rad)
        if rad < 0:
            raise ValueError("negative radicand")
        if not coeff or not rad:
            continue
        c, r = square_split(rad)
        acc[r] = acc.get(r, 0) + coeff * c
    return ExactReal._from_dict(acc)


def _accumulate(exps: dict[int, int], items: Iterable[tuple[int, int]], sign: int) -> None:
    for p, e in items:
        exps[p] = exps.get(p, 0) + sign * e


def sqrt_factorials(
    num: Iterable[int] = (),
    den: Iterable[int] = (),
    num_ints: Iterable[int] = (),
    den_ints: Iterable[int] = (),
    coeff: Number = 1,
) -> ExactReal:
    """coeff * sqrt( prod(num)! * prod(num_ints) / (prod(den)! * prod(den_ints)) ).

    Works on prime exponent vectors so no large integer is ever factored.
    Returns zero when any of ``num_ints`` is zero.
    """
    exps: dict[int, int] = {}
    for n in num:
        _accumulate(exps, factorial_exponents(n), 1)
    for n in den:
        _accumulate(exps, factorial_exponents(n), -1)
    for n in num_ints:
        if n == 0:
            return ExactReal()
        if n < 0:
            raise ValueError("negative factor under square root")
        _accumulate(exps, int_exponents(n), 1)
    for n in den_ints:
        if n <= 0:
            raise ZeroDivisionError("nonpositive factor in denominator under square root")
        _accumulate(exps, int_exponents(n), -1)
    return radical_from_exponents(exps, coeff)


def radical_from_exponents(exps: Mapping[int, int], coeff: Number = 1) -> ExactReal:
    """coeff * prod(p ** (e/2))."""
    coeff = Fraction(coeff)
    if not coeff:
        return ExactReal()
    up, down, rad = 1, 1, 1
    for p, e in exps.items():
        if not e:
            continue
        if e & 1:
            rad *= p
        h = e // 2
        if h > 0:
            up *= p**h
        elif h < 0:
            down *= p ** (-h)
    return ExactReal._raw(((rad, coeff * Fraction(up, down)),))
