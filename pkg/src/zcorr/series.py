"""Exact truncated Laurent series in ``u = r^2`` and the pair-correlation expansions.

A series is ``sum_i coeffs[i] u^(valuation + i) + O(u^precision)``.  A
precision of ``None`` marks an exact (finite) Laurent polynomial.  Every
operation tracks precision, so no coefficient is ever reported beyond what
the inputs determine.
"""

from fractions import Fraction
import json
import math
import numbers

from .correlators.closed import low_codim_formula, point_fm_formula
from .errors import DomainError, NotInvertibleError

__all__ = [
    "RationalLaurentSeries",
    "DEFAULT_ORDER",
    "exp_neg",
    "pqrs_series",
    "kappa_series",
    "parity_violations",
    "parity_check",
]

DEFAULT_ORDER = 16


def _min_prec(*ps):
    finite = [p for p in ps if p is not None]
    return min(finite) if finite else None


class RationalLaurentSeries:
    """Truncated Laurent series with exact rational coefficients.

    Parameters
    ----------
    valuation : int
        Power of ``u`` of ``coeffs[0]``.
    coeffs : sequence of rationals
        Consecutive coefficients.
    precision : int or None
        First power of ``u`` that is not known; ``None`` for an exact polynomial.
    """

    __slots__ = ("_val", "_coeffs", "_prec")

    def __init__(self, valuation, coeffs, precision=None):
        coeffs = [Fraction(c) for c in coeffs]
        if precision is not None:
            coeffs = coeffs[:max(0, precision - valuation)]
        # zeros below the precision are implied
        while coeffs and coeffs[-1] == 0:
            coeffs.pop()
        lead = 0
        while lead < len(coeffs) and coeffs[lead] == 0:
            lead += 1
        coeffs = coeffs[lead:]
        valuation += lead
        if not coeffs:
            valuation = precision if precision is not None else 0
        self._val = valuation
        self._coeffs = tuple(coeffs)
        self._prec = precision

    # -- constructors -------------------------------------------------------
    @classmethod
    def constant(cls, c):
        return cls(0, [c])

    @classmethod
    def variable(cls, precision=None):
        """The series ``u`` (exact unless a precision is given)."""
        return cls(1, [1], precision)

    @classmethod
    def from_terms(cls, terms, precision=None):
        """Build from ``{power: coefficient}``."""
        if not terms:
            return cls(0, [], precision)
        lo, hi = min(terms), max(terms)
        return cls(lo, [terms.get(p, 0) for p in range(lo, hi + 1)], precision)

    # -- accessors ----------------------------------------------------------
    @property
    def valuation(self):
        return self._val

    @property
    def coeffs(self):
        return self._coeffs

    @property
    def precision(self):
        return self._prec

    @property
    def order(self):
        """Number of stored coefficients."""
        return len(self._coeffs)

    def is_zero(self):
        return not self._coeffs

    def is_exact(self):
        return self._prec is None

    def coefficient(self, power):
        if self._prec is not None and power >= self._prec:
            raise ValueError(f"u^{power} is beyond the truncation order u^{self._prec}")
        i = power - self._val
        return self._coeffs[i] if 0 <= i < len(self._coeffs) else Fraction(0)

    def terms(self):
        """Nonzero ``{power: coefficient}``."""
        return {self._val + i: c for i, c in enumerate(self._coeffs) if c != 0}

    def truncate(self, precision):
        return RationalLaurentSeries(self._val, self._coeffs, _min_prec(precision, self._prec))

    def evaluate(self, u):
        """Float value of the truncated sum at ``u``."""
        return math.fsum(float(c) * u ** (self._val + i) for i, c in enumerate(self._coeffs))

    # -- arithmetic ---------------------------------------------------------
    @staticmethod
    def _lift(x):
        if isinstance(x, RationalLaurentSeries):
            return x
        if isinstance(x, numbers.Rational):
            return RationalLaurentSeries.constant(x)
        raise TypeError(f"cannot combine a series with {type(x).__name__}")

    def __add__(self, other):
        try:
            other = self._lift(other)
        except TypeError:
            return NotImplemented
        prec = _min_prec(self._prec, other._prec)
        if self.is_zero() and other.is_zero():
            return RationalLaurentSeries(0, [], prec)
        lo = min(s._val for s in (self, other) if not s.is_zero())
        hi = max(s._val + s.order for s in (self, other))
        out = [Fraction(0)] * (hi - lo)
        for s in (self, other):
            for i, c in enumerate(s._coeffs):
                out[s._val - lo + i] += c
        return RationalLaurentSeries(lo, out, prec)

    __radd__ = __add__

    def __neg__(self):
        return RationalLaurentSeries(self._val, [-c for c in self._coeffs], self._prec)

    def __sub__(self, other):
        try:
            return self + (-self._lift(other))
        except TypeError:
            return NotImplemented

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        try:
            other = self._lift(other)
        except TypeError:
            return NotImplemented
        a, b = self, other
        # a = u^va (A + O(u^la)), so a*b is known up to u^(va + pb) and u^(vb + pa)
        cands = []
        if a._prec is not None:
            cands.append(a._prec + b._val)
        if b._prec is not None:
            cands.append(b._prec + a._val)
        prec = min(cands) if cands else None
        if a.is_zero() or b.is_zero():
            return RationalLaurentSeries(0, [], prec)
        v = a._val + b._val
        n = a.order + b.order - 1
        if prec is not None:
            n = min(n, prec - v)
        out = [Fraction(0)] * max(n, 0)
        for i, x in enumerate(a._coeffs):
            if i >= n:
                break
            for j in range(min(b.order, n - i)):
                out[i + j] += x * b._coeffs[j]
        return RationalLaurentSeries(v, out, prec)

    __rmul__ = __mul__

    def inverse(self):
        """``1 / self``; the unit part is inverted after factoring out ``u^valuation``."""
        if self.is_zero():
            raise NotInvertibleError("division by the zero series")
        v, c = self._val, self._coeffs
        if self._prec is None:
            if len(c) == 1:
                return RationalLaurentSeries(-v, [1 / c[0]])
            raise NotInvertibleError(
                "the inverse of an exact polynomial is an infinite series; truncate it first"
            )
        n = self._prec - v
        inv = [Fraction(0)] * n
        inv[0] = 1 / c[0]
        for i in range(1, n):
            acc = sum(c[j] * inv[i - j] for j in range(1, min(i, len(c) - 1) + 1))
            inv[i] = -acc * inv[0]
        return RationalLaurentSeries(-v, inv, -v + n)

    def __truediv__(self, other):
        if isinstance(other, numbers.Rational):
            if other == 0:
                raise NotInvertibleError("division by zero")
            return RationalLaurentSeries(self._val, [x / other for x in self._coeffs], self._prec)
        if not isinstance(other, RationalLaurentSeries):
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self._lift(other) * self.inverse()

    def __pow__(self, n):
        if not isinstance(n, numbers.Integral):
            return NotImplemented
        if n < 0:
            return self.inverse() ** (-n)
        result = RationalLaurentSeries.constant(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def compose_scale(self, c):
        """``f(c u)`` for a rational ``c``."""
        c = Fraction(c)
        if c == 0:
            raise DomainError("compose_scale needs a nonzero factor")
        return RationalLaurentSeries(
            self._val,
            [x * c ** (self._val + i) for i, x in enumerate(self._coeffs)],
            self._prec,
        )

    def exp_neg(self):
        """``exp(-self)``; needs positive valuation (a rational constant term
        would make the result irrational)."""
        return exp_neg(self)

    # -- comparison / io ----------------------------------------------------
    def __eq__(self, other):
        if isinstance(other, numbers.Rational):
            other = RationalLaurentSeries.constant(other)
        if not isinstance(other, RationalLaurentSeries):
            return NotImplemented
        return (self._val, self._coeffs, self._prec) == (other._val, other._coeffs, other._prec)

    __hash__ = None

    def __repr__(self):
        parts = [f"{c}*u^{p}" for p, c in self.terms().items()] or ["0"]
        tail = "" if self._prec is None else f" + O(u^{self._prec})"
        return " + ".join(parts) + tail

    def to_json_obj(self):
        """JSON-ready dict; every known coefficient up to the precision is listed."""
        coeffs = list(self._coeffs)
        if self._prec is not None:
            coeffs += [Fraction(0)] * (self._prec - self._val - len(coeffs))
        return {"var": "u", "valuation": self._val, "coeffs": [str(c) for c in coeffs]}

    def to_json(self):
        return json.dumps(self.to_json_obj())

    @classmethod
    def from_json(cls, data):
        """Inverse of ``to_json``; the precision is ``valuation + len(coeffs)``."""
        if isinstance(data, str):
            data = json.loads(data)
        if data.get("var") != "u":
            raise ValueError("series JSON must have var 'u'")
        coeffs = [Fraction(c) for c in data["coeffs"]]
        return cls(int(data["valuation"]), coeffs, int(data["valuation"]) + len(coeffs))


def exp_neg(x):
    """``exp(-x)`` for a series with positive valuation, to the precision of ``x``."""
    x = RationalLaurentSeries._lift(x)
    if x.is_zero():
        return RationalLaurentSeries(0, [1], x.precision)
    if x.valuation < 1:
        raise DomainError("exp_neg needs a series without constant or polar part")
    if x.precision is None:
        raise DomainError("exp_neg of an exact polynomial is infinite; give the input a precision")
    prec = x.precision
    term = RationalLaurentSeries(0, [1], prec)
    total = term
    n = 1
    while n * x.valuation < prec:
        term = term * (-x) / n
        total = total + term
        n += 1
    return total


def pqrs_series(order):
    """``P, Q, S, det A`` as exact series in ``u``, each with ``order`` coefficients."""
    if order < 2:
        raise DomainError("pqrs_series needs order >= 2")
    work = order + 3
    u = RationalLaurentSeries.variable(work + 1)
    v = exp_neg(u)
    detA = 1 - v
    P = (detA - u * v) / detA
    S = exp_neg(u.compose_scale(Fraction(1, 2)))
    Q = S * (detA - u) / detA
    return tuple(s.truncate(s.valuation + order) for s in (P, Q, S, detA))


def kappa_series(k, m, order=DEFAULT_ORDER):
    """Laurent series of ``kappa_km`` in ``u``, with ``order + 1`` coefficients
    (powers ``valuation .. valuation + order``).

    Supported for ``k <= 3`` (with ``k <= m``) and for the point case ``k = m``.
    """
    if not 1 <= k <= m:
        raise DomainError(f"need 1 <= k <= m, got k={k}, m={m}")
    if order < 4:
        raise DomainError("kappa_series needs order >= 4")
    if k > 3 and k != m:
        raise DomainError(
            f"no series route for k={k} < m={m}; use the numeric berezin route instead"
        )
    pad = 2 * k + 4
    while True:
        P, Q, S, detA = pqrs_series(order + pad)
        if k == m:
            kap = point_fm_formula(m, P, Q, 1, S, detA)
        else:
            kap = low_codim_formula(k, m, P, Q, 1, S, detA)
        target = kap.valuation + order + 1
        if kap.precision >= target:
            return kap.truncate(target)
        pad += 8


def parity_violations(m, order=DEFAULT_ORDER):
    """Powers of ``u`` in the ``kappa_mm`` series whose parity differs from ``m``'s
    and whose coefficient is nonzero."""
    if m < 1:
        raise DomainError(f"need m >= 1, got m={m}")
    s = kappa_series(m, m, order)
    return [p for p, c in s.terms().items() if (p - m) % 2 != 0 and c != 0]


def parity_check(m, order=DEFAULT_ORDER):
    """True iff ``kappa_mm`` is an odd (``m`` odd) or even (``m`` even) function of ``u``."""
    return not parity_violations(m, order)
