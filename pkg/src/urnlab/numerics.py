"""Arbitrary-precision scalar tower and combinatorial special functions.

Everything downstream computes in one of three scalar modes: exact rationals
(`fractions.Fraction`), big-floats (`mpmath.mpf` at a configurable bit
precision), or machine floats.  Modes are never mixed silently: combining a
rational Scalar with a float Scalar raises instead of coercing.
"""

from __future__ import annotations

import os
import threading
from fractions import Fraction
from math import floor, log10

import mpmath

RATIONAL = "rational"
BIGFLOAT = "bigfloat"
FLOAT = "float"

_MODES = (RATIONAL, BIGFLOAT, FLOAT)

DEFAULT_PRECISION_BITS = 256


class ScalarModeError(TypeError):
    """Raised when an arithmetic expression mixes incompatible scalar modes."""


def precision_bits() -> int:
    """Working precision for big-float mode, from URNLAB_PRECISION_BITS."""
    raw = os.environ.get("URNLAB_PRECISION_BITS", "")
    if not raw:
        return DEFAULT_PRECISION_BITS
    bits = int(raw)
    if bits < 8:
        raise ValueError("URNLAB_PRECISION_BITS must be at least 8")
    return bits


def _mode_of(value):
    if isinstance(value, bool):
        raise TypeError("bool is not a Scalar value")
    if isinstance(value, (int, Fraction)):
        return RATIONAL
    if isinstance(value, float):
        return FLOAT
    if isinstance(value, mpmath.mpf):
        return BIGFLOAT
    raise TypeError(f"unsupported scalar value type {type(value).__name__}")


class Scalar:
    """A number tagged with its arithmetic mode.

    Plain ints combine with every mode (integers embed exactly everywhere);
    raw Fractions only with rational mode, raw floats only with float mode,
    and raw mpmath values only with bigfloat mode.  Scalar-Scalar arithmetic
    requires equal modes.  Instances are immutable.
    """

    __slots__ = ("mode", "value", "bits")

    def __init__(self, value, mode=None, bits=None):
        if isinstance(value, Scalar):
            mode = mode or value.mode
            bits = bits or value.bits
            value = value.value
        inferred = _mode_of(value)
        mode = mode or inferred
        if mode not in _MODES:
            raise ValueError(f"unknown scalar mode {mode!r}")
        if mode != inferred:
            # ints may be promoted into any mode on request
            if inferred == RATIONAL and isinstance(value, int):
                if mode == FLOAT:
                    value = float(value)
                else:
                    value = mpmath.mpf(value)
            else:
                raise ScalarModeError(
                    f"cannot tag a {inferred} value as {mode}"
                )
        if mode == RATIONAL and isinstance(value, int):
            value = Fraction(value)
        if mode == BIGFLOAT and bits is None:
            bits = precision_bits()
        object.__setattr__(self, "mode", mode)
        object.__setattr__(self, "value", value)
        object.__setattr__(self, "bits", bits if mode == BIGFLOAT else None)

    def __setattr__(self, name, value):
        raise AttributeError("Scalar is immutable")

    def _coerce(self, other):
        """Return other's raw value if it may combine with self's mode."""
        if isinstance(other, Scalar):
            if other.mode != self.mode:
                raise ScalarModeError(
                    f"cannot mix {self.mode} and {other.mode} scalars"
                )
            return other.value
        if isinstance(other, bool):
            raise ScalarModeError("bool operand rejected")
        if isinstance(other, int):
            return other
        if _mode_of(other) != self.mode:
            raise ScalarModeError(
                f"cannot mix {self.mode} scalar with raw {type(other).__name__}"
            )
        return other

    def _wrap(self, value):
        return Scalar(value, self.mode, self.bits)

    def __add__(self, other):
        return self._wrap(self.value + self._coerce(other))

    __radd__ = __add__

    def __sub__(self, other):
        return self._wrap(self.value - self._coerce(other))

    def __rsub__(self, other):
        return self._wrap(self._coerce(other) - self.value)

    def __mul__(self, other):
        return self._wrap(self.value * self._coerce(other))

    __rmul__ = __mul__

    def __truediv__(self, other):
        v = self._coerce(other)
        if self.mode == RATIONAL:
            return self._wrap(Fraction(self.value) / v)
        return self._wrap(self.value / v)

    def __rtruediv__(self, other):
        v = self._coerce(other)
        if self.mode == RATIONAL:
            return self._wrap(Fraction(v) / self.value)
        return self._wrap(v / self.value)

    def __pow__(self, exponent):
        if not isinstance(exponent, int):
            raise TypeError("Scalar exponent must be an int")
        return self._wrap(self.value**exponent)

    def __neg__(self):
        return self._wrap(-self.value)

    def __abs__(self):
        return self._wrap(abs(self.value))

    def __eq__(self, other):
        try:
            return self.value == self._coerce(other)
        except ScalarModeError:
            return NotImplemented

    def __lt__(self, other):
        return self.value < self._coerce(other)

    def __le__(self, other):
        return self.value <= self._coerce(other)

    def __gt__(self, other):
        return self.value > self._coerce(other)

    def __ge__(self, other):
        return self.value >= self._coerce(other)

    def __hash__(self):
        return hash((self.mode, self.value))

    def __float__(self):
        return float(self.value)

    def __repr__(self):
        return f"Scalar({self.value!r}, mode={self.mode!r})"

    def serialize(self) -> str:
        """Render per the wire contract: 'p/q' for rationals, decimal
        string with a trailing '@bits' precision annotation for big-floats."""
        if self.mode == RATIONAL:
            f = self.value
            return f"{f.numerator}/{f.denominator}"
        if self.mode == BIGFLOAT:
            dps = max(1, floor(self.bits * log10(2)))
            return f"{mpmath.nstr(self.value, dps)}@{self.bits}"
        return repr(self.value)


def parse_scalar(text: str) -> Scalar:
    """Inverse of Scalar.serialize."""
    if "@" in text:
        dec, bits = text.rsplit("@", 1)
        with mpmath.workprec(int(bits)):
            return Scalar(mpmath.mpf(dec), BIGFLOAT, int(bits))
    if "/" in text:
        return Scalar(Fraction(text))
    return Scalar(float(text))


def as_raw(x):
    """Unwrap a Scalar to its underlying numeric value; pass others through."""
    return x.value if isinstance(x, Scalar) else x


class Polynomial:
    """Dense univariate polynomial with exact rational coefficients.

    Coefficients are stored ascending by degree with no trailing zeros;
    the zero polynomial has degree -1.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs=()):
        cs = [Fraction(as_raw(c)) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        object.__setattr__(self, "coeffs", tuple(cs))

    def __setattr__(self, name, value):
        raise AttributeError("Polynomial is immutable")

    @classmethod
    def monomial(cls, degree: int, coeff=1) -> "Polynomial":
        return cls([0] * degree + [coeff])

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def leading_coefficient(self) -> Fraction:
        return self.coeffs[-1] if self.coeffs else Fraction(0)

    def coefficient(self, i: int) -> Fraction:
        return self.coeffs[i] if 0 <= i < len(self.coeffs) else Fraction(0)

    def __add__(self, other):
        other = self._as_poly(other)
        n = max(len(self.coeffs), len(other.coeffs))
        return Polynomial(
            [self.coefficient(i) + other.coefficient(i) for i in range(n)]
        )

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-self._as_poly(other))

    def __rsub__(self, other):
        return self._as_poly(other) + (-self)

    def __neg__(self):
        return Polynomial([-c for c in self.coeffs])

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return Polynomial([c * other for c in self.coeffs])
        other = self._as_poly(other)
        if not self.coeffs or not other.coeffs:
            return Polynomial()
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return Polynomial(out)

    __rmul__ = __mul__

    def __call__(self, x):
        acc = 0 * x if not isinstance(x, int) else Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def __eq__(self, other):
        try:
            other = self._as_poly(other)
        except TypeError:
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __repr__(self):
        if not self.coeffs:
            return "Polynomial(0)"
        parts = [f"{c}*X^{i}" for i, c in enumerate(self.coeffs) if c != 0]
        return "Polynomial(" + " + ".join(parts) + ")"

    @staticmethod
    def _as_poly(x):
        if isinstance(x, Polynomial):
            return x
        if isinstance(x, (int, Fraction)):
            return Polynomial([x])
        raise TypeError(f"cannot treat {type(x).__name__} as Polynomial")


def binom_general(x, n: int):
    """Generalized binomial coefficient with arbitrary upper argument.

    Computed as the product of (x - j + 1)/j for j = 1..n, so x may be any
    rational (or float/bigfloat) value; n must be a nonnegative integer.
    The empty product for n = 0 is 1.
    """
    if n < 0:
        raise ValueError("lower index must be nonnegative")
    x = as_raw(x)
    if isinstance(x, int):
        x = Fraction(x)
    acc = None
    for j in range(1, n + 1):
        factor = (x - j + 1) / j
        acc = factor if acc is None else acc * factor
    if acc is None:
        return Fraction(1) if isinstance(x, Fraction) else x**0
    return acc


def falling_factorial(x, s: int):
    """x (x-1) ... (x-s+1); the empty product for s = 0 is 1."""
    if s < 0:
        raise ValueError("order must be nonnegative")
    x = as_raw(x)
    acc = Fraction(1) if isinstance(x, (int, Fraction)) else x**0
    for j in range(s):
        acc = acc * (x - j)
    return acc


# Stirling triangles are grown on demand and shared; the lock keeps
# concurrent growth consistent (reads of finished rows are safe under GIL).
_stirling_lock = threading.Lock()
_stirling2_rows: list[list[int]] = [[1]]
_stirling1_rows: list[list[int]] = [[1]]


def _grow_triangle(rows, n, step):
    with _stirling_lock:
        while len(rows) <= n:
            prev = rows[-1]
            i = len(rows)
            row = [0] * (i + 1)
            for k in range(i + 1):
                above = prev[k] if k < len(prev) else 0
                diag = prev[k - 1] if k >= 1 else 0
                row[k] = step(i, k, above, diag)
            rows.append(row)


def stirling_second(n: int, k: int) -> int:
    """Stirling number of the second kind S(n, k); 0 when k > n."""
    if n < 0 or k < 0:
        raise ValueError("indices must be nonnegative")
    if k > n:
        return 0
    _grow_triangle(_stirling2_rows, n, lambda i, k_, up, dg: k_ * up + dg)
    return _stirling2_rows[n][k]


def stirling_first_unsigned(n: int, k: int) -> int:
    """Unsigned Stirling number of the first kind c(n, k); 0 when k > n."""
    if n < 0 or k < 0:
        raise ValueError("indices must be nonnegative")
    if k > n:
        return 0
    _grow_triangle(_stirling1_rows, n, lambda i, k_, up, dg: (i - 1) * up + dg)
    return _stirling1_rows[n][k]


def ramanujan_q(n: int) -> Fraction:
    """Q(n) = sum over i of n(n-1)...(n-i+1) / n^i, as an exact rational."""
    if n < 1:
        raise ValueError("n must be positive")
    total = Fraction(0)
    term = Fraction(1)
    for i in range(n + 1):
        total += term
        term = term * (n - i) / n
    return total


def kahan_sum(values) -> float:
    """Neumaier-compensated float summation."""
    total = 0.0
    comp = 0.0
    for v in values:
        v = float(v)
        t = total + v
        if abs(total) >= abs(v):
            comp += (total - t) + v
        else:
            comp += (v - t) + total
        total = t
    return total + comp


def compensated_sum(terms, mode: str):
    """Sum a sequence of same-mode terms.

    Rational and bigfloat sums are exact / correctly tracked by their types;
    float mode sorts by magnitude and compensates, which is what keeps the
    alternating closed-form sums usable at machine precision.
    """
    terms = list(terms)
    if not terms:
        return Fraction(0) if mode == RATIONAL else _zero_for(mode)
    if mode == FLOAT:
        return kahan_sum(sorted(terms, key=abs))
    acc = terms[0]
    for t in terms[1:]:
        acc = acc + t
    return acc


def _zero_for(mode: str):
    if mode == BIGFLOAT:
        return mpmath.mpf(0)
    return 0.0


def cast_value(x, mode: str):
    """Convert an exact rational (or int) into the requested mode."""
    x = as_raw(x)
    if mode == RATIONAL:
        return Fraction(x)
    if mode == FLOAT:
        return float(x)
    if mode == BIGFLOAT:
        if isinstance(x, Fraction):
            return mpmath.mpf(x.numerator) / x.denominator
        return mpmath.mpf(x)
    raise ValueError(f"unknown scalar mode {mode!r}")
