"""Exact arithmetic in the even subalgebra of a finite Grassmann algebra.

The algebra on ``num_pairs = l`` fermion pairs has ``2l`` generators in the
fixed canonical order::

    g_0 = eta_0, g_1 = etabar_0, g_2 = eta_1, g_3 = etabar_1, ...

so pair ``i`` owns bits ``2i`` (eta) and ``2i + 1`` (etabar) of a blade mask.
A blade is stored in canonical order; products record the sign of the
sorting permutation.  The top blade ``eta_0 etabar_0 eta_1 etabar_1 ...`` is
the monomial whose Berezin integral is 1.

Coefficients may be any field type: ``complex``/``float`` for numerical
evaluation, :class:`fractions.Fraction` (or ``int``) for exact work.
"""

import cmath
import math
import numbers
from fractions import Fraction

import numpy as np

from .errors import (
    CapacityError,
    ContractError,
    NotInvertibleError,
    SingularPivotError,
)

__all__ = [
    "MAX_PAIRS",
    "GrassmannEven",
    "GrassmannMatrix",
    "g_mul",
    "g_inv",
    "g_det",
    "g_det_inv",
    "g_exp",
    "berezin",
    "berezin_measure",
    "susy_det",
]

MAX_PAIRS = 16


def _prefix_parity(mask):
    """Bit ``a`` of the result is set iff ``mask`` has an odd number of bits below ``a``."""
    x = mask
    shift = 1
    while shift < 2 * MAX_PAIRS:
        x ^= x << shift
        shift <<= 1
    return (x << 1) & ((1 << (2 * MAX_PAIRS)) - 1)


def _py(x):
    return x.item() if isinstance(x, np.generic) else x


def _reciprocal(c):
    if isinstance(c, numbers.Rational):
        return Fraction(1) / c
    return 1 / c


class GrassmannEven:
    """Element of the even subalgebra on ``num_pairs`` fermion pairs.

    Parameters
    ----------
    num_pairs : int
        Number of (eta, etabar) generator pairs, ``0 <= num_pairs <= 16``.
    terms : mapping, optional
        Blade mask -> coefficient.  Zero coefficients are dropped; odd blades
        are rejected.
    """

    __slots__ = ("num_pairs", "terms")

    def __init__(self, num_pairs, terms=None):
        if not 0 <= num_pairs <= MAX_PAIRS:
            raise CapacityError(
                f"num_pairs={num_pairs} exceeds the cap of {MAX_PAIRS} fermion pairs"
            )
        top = (1 << (2 * num_pairs)) - 1
        clean = {}
        if terms:
            for mask, c in terms.items():
                if mask & ~top or mask < 0:
                    raise ContractError(f"blade {mask:#b} outside {num_pairs} pairs")
                if mask.bit_count() & 1:
                    raise ContractError(f"blade {mask:#b} is odd")
                if c != 0:
                    clean[mask] = c
        self.num_pairs = num_pairs
        self.terms = clean

    @classmethod
    def _raw(cls, num_pairs, terms):
        obj = cls.__new__(cls)
        obj.num_pairs = num_pairs
        obj.terms = terms
        return obj

    @classmethod
    def scalar(cls, num_pairs, c):
        return cls._raw(num_pairs, {0: c} if c != 0 else {})

    @classmethod
    def bilinear(cls, num_pairs, i, j, coeff=1):
        """The element ``coeff * eta_i etabar_j`` (0-based pair indices)."""
        if not (0 <= i < num_pairs and 0 <= j < num_pairs):
            raise ContractError(f"pair index out of range for {num_pairs} pairs")
        a, b = 2 * i, 2 * j + 1
        sign = 1 if a < b else -1
        return cls._raw(num_pairs, {(1 << a) | (1 << b): sign * coeff} if coeff != 0 else {})

    @classmethod
    def monomial(cls, num_pairs, generators, coeff=1):
        """Product ``coeff * g_{i1} g_{i2} ...`` of generators given by bit index."""
        generators = list(generators)
        if len(generators) % 2:
            raise ContractError("odd number of generators")
        if len(set(generators)) < len(generators) or coeff == 0:
            return cls._raw(num_pairs, {})
        # parity of the sorting permutation = parity of its inversion count
        inversions = sum(
            1
            for s in range(len(generators))
            for t in range(s + 1, len(generators))
            if generators[s] > generators[t]
        )
        mask = 0
        for g in generators:
            if not 0 <= g < 2 * num_pairs:
                raise ContractError(f"generator {g} out of range")
            mask |= 1 << g
        return cls._raw(num_pairs, {mask: -coeff if inversions & 1 else coeff})

    @classmethod
    def top(cls, num_pairs, coeff=1):
        """``coeff`` times the top blade ``prod_i eta_i etabar_i``."""
        return cls._raw(num_pairs, {(1 << (2 * num_pairs)) - 1: coeff} if coeff != 0 else {})

    @property
    def scalar_part(self):
        return self.terms.get(0, 0)

    @property
    def degree(self):
        """Highest blade degree present (0 for the zero element)."""
        return max((m.bit_count() for m in self.terms), default=0)

    def is_zero(self):
        return not self.terms

    def map_coefficients(self, fn):
        return GrassmannEven(self.num_pairs, {m: fn(c) for m, c in self.terms.items()})

    def _check(self, other):
        if not isinstance(other, GrassmannEven):
            return False
        if other.num_pairs != self.num_pairs:
            raise ContractError(
                f"mismatched generator sets: {self.num_pairs} vs {other.num_pairs} pairs"
            )
        return True

    def __add__(self, other):
        if not self._check(other):
            if isinstance(other, numbers.Number):
                other = GrassmannEven.scalar(self.num_pairs, other)
            else:
                return NotImplemented
        out = dict(self.terms)
        for m, c in other.terms.items():
            v = out.get(m, 0) + c
            if v != 0:
                out[m] = v
            else:
                out.pop(m, None)
        return GrassmannEven._raw(self.num_pairs, out)

    __radd__ = __add__

    def __neg__(self):
        return GrassmannEven._raw(self.num_pairs, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, GrassmannEven):
            return g_mul(self, other)
        if isinstance(other, numbers.Number):
            if other == 0:
                return GrassmannEven._raw(self.num_pairs, {})
            return GrassmannEven._raw(
                self.num_pairs, {m: c * other for m, c in self.terms.items()}
            )
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, numbers.Number):
            return self * _reciprocal(other)
        if isinstance(other, GrassmannEven):
            return g_mul(self, g_inv(other))
        return NotImplemented

    def __pow__(self, n):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return g_inv(self) ** (-n)
        result = GrassmannEven.scalar(self.num_pairs, 1)
        base = self
        while n:
            if n & 1:
                result = g_mul(result, base)
            n >>= 1
            if n:
                base = g_mul(base, base)
        return result

    def __eq__(self, other):
        if isinstance(other, numbers.Number):
            other = GrassmannEven.scalar(self.num_pairs, other)
        if not isinstance(other, GrassmannEven):
            return NotImplemented
        return self.num_pairs == other.num_pairs and self.terms == other.terms

    __hash__ = None

    def allclose(self, other, atol=1e-12):
        if isinstance(other, numbers.Number):
            other = GrassmannEven.scalar(self.num_pairs, other)
        self._check(other)
        return all(
            abs(self.terms.get(m, 0) - other.terms.get(m, 0)) <= atol
            for m in set(self.terms) | set(other.terms)
        )

    def __repr__(self):
        if not self.terms:
            return f"GrassmannEven({self.num_pairs}, 0)"
        parts = []
        for m in sorted(self.terms, key=lambda m: (m.bit_count(), m)):
            gens = []
            for b in range(2 * self.num_pairs):
                if m >> b & 1:
                    gens.append(("eta" if b % 2 == 0 else "etabar") + str(b // 2))
            parts.append(f"{self.terms[m]!r}" + ("*" + "*".join(gens) if gens else ""))
        return f"GrassmannEven({self.num_pairs}, " + " + ".join(parts) + ")"


def g_mul(a, b):
    """Product of two even elements on a common generator set."""
    if not isinstance(a, GrassmannEven) or not isinstance(b, GrassmannEven):
        raise ContractError("g_mul expects two GrassmannEven operands")
    if a.num_pairs != b.num_pairs:
        raise ContractError(
            f"mismatched generator sets: {a.num_pairs} vs {b.num_pairs} pairs"
        )
    ta, tb = a.terms, b.terms
    if not ta or not tb:
        return GrassmannEven._raw(a.num_pairs, {})
    if len(ta) < len(tb):
        # even elements commute, so iterate the larger operand innermost
        ta, tb = tb, ta
    out = {}
    get = out.get
    for mb, cb in tb.items():
        parity = _prefix_parity(mb)
        for ma, ca in ta.items():
            if ma & mb:
                continue
            c = ca * cb
            if (ma & parity).bit_count() & 1:
                c = -c
            key = ma | mb
            out[key] = get(key, 0) + c
    return GrassmannEven._raw(a.num_pairs, {m: c for m, c in out.items() if c != 0})


def g_inv(a):
    """Inverse of an even element with nonzero scalar part.

    Uses ``a^{-1} = a0^{-1} sum_t (-N/a0)^t`` with ``N = a - a0``; the sum stops
    at ``t = num_pairs`` because ``N`` has blade degree at least 2.
    """
    a0 = a.scalar_part
    if a0 == 0:
        raise NotInvertibleError("scalar part is zero; element is not invertible")
    inv0 = _reciprocal(a0)
    x = GrassmannEven._raw(
        a.num_pairs, {m: c * inv0 for m, c in a.terms.items() if m != 0}
    )
    if not x.terms:
        return GrassmannEven.scalar(a.num_pairs, inv0)
    # Horner: 1 - x(1 - x(1 - ...))
    one = GrassmannEven.scalar(a.num_pairs, 1)
    s = one
    for _ in range(a.num_pairs):
        s = one - g_mul(x, s)
    return s * inv0


def g_exp(a):
    """Exponential of an even element (terminating series on the nilpotent part)."""
    a0 = a.scalar_part
    x = GrassmannEven._raw(a.num_pairs, {m: c for m, c in a.terms.items() if m != 0})
    result = GrassmannEven.scalar(a.num_pairs, 1)
    term = result
    for t in range(1, a.num_pairs + 1):
        term = g_mul(term, x) * Fraction(1, t)
        if term.is_zero():
            break
        result = result + term
    if a0 != 0:
        result = result * (cmath.exp(a0) if isinstance(a0, complex) else math.exp(a0))
    return result


class GrassmannMatrix:
    """Square matrix whose entries are :class:`GrassmannEven` on shared pairs."""

    __slots__ = ("num_pairs", "rows")
    __array_ufunc__ = None  # make ``ndarray @ GrassmannMatrix`` defer to __rmatmul__

    def __init__(self, num_pairs, rows):
        rows = [list(r) for r in rows]
        d = len(rows)
        conv = []
        for r in rows:
            if len(r) != d:
                raise ContractError("GrassmannMatrix must be square")
            row = []
            for e in r:
                if isinstance(e, GrassmannEven):
                    if e.num_pairs != num_pairs:
                        raise ContractError("entries must share num_pairs")
                    row.append(e)
                else:
                    row.append(GrassmannEven.scalar(num_pairs, e))
            conv.append(row)
        self.num_pairs = num_pairs
        self.rows = conv

    @property
    def dim(self):
        return len(self.rows)

    def __getitem__(self, idx):
        i, j = idx
        return self.rows[i][j]

    @classmethod
    def identity(cls, num_pairs, d):
        return cls(num_pairs, [[1 if i == j else 0 for j in range(d)] for i in range(d)])

    @classmethod
    def from_scalar(cls, num_pairs, array):
        array = np.asarray(array)
        return cls(num_pairs, [[_py(array[i, j]) for j in range(array.shape[1])]
                               for i in range(array.shape[0])])

    def __add__(self, other):
        if not isinstance(other, GrassmannMatrix) or other.dim != self.dim:
            return NotImplemented
        return GrassmannMatrix(
            self.num_pairs,
            [[a + b for a, b in zip(ra, rb)] for ra, rb in zip(self.rows, other.rows)],
        )

    def scale(self, c):
        return GrassmannMatrix(self.num_pairs, [[e * c for e in r] for r in self.rows])

    def __matmul__(self, other):
        if isinstance(other, GrassmannMatrix):
            d = self.dim
            out = []
            for i in range(d):
                row = []
                for j in range(d):
                    acc = GrassmannEven._raw(self.num_pairs, {})
                    for t in range(d):
                        a, b = self.rows[i][t], other.rows[t][j]
                        if a.terms and b.terms:
                            acc = acc + g_mul(a, b)
                    row.append(acc)
                out.append(row)
            return GrassmannMatrix(self.num_pairs, out)
        return NotImplemented

    def __rmatmul__(self, other):
        """Scalar ``numpy`` matrix times Grassmann matrix, skipping zero entries."""
        other = np.asarray(other)
        d = self.dim
        if other.shape != (d, d):
            raise ContractError("shape mismatch in scalar @ GrassmannMatrix")
        out = []
        for i in range(d):
            row = []
            nz = [t for t in range(d) if other[i, t] != 0]
            for j in range(d):
                acc = {}
                for t in nz:
                    b = self.rows[t][j]
                    if not b.terms:
                        continue
                    s = _py(other[i, t])
                    for m, c in b.terms.items():
                        acc[m] = acc.get(m, 0) + s * c
                row.append(GrassmannEven(self.num_pairs, acc))
            out.append(row)
        return GrassmannMatrix(self.num_pairs, out)


def _eliminate(M):
    """Gaussian elimination over the commutative ring of even elements.

    Returns ``(sign, pivots, pivot_inverses)``.  Pivots are chosen by largest
    scalar part in the current column; zero entries are skipped, so block
    structure is never filled in.
    """
    if not isinstance(M, GrassmannMatrix):
        raise ContractError("expected a GrassmannMatrix")
    rows = [list(r) for r in M.rows]
    d = len(rows)
    sign = 1
    pivots, inverses = [], []
    for i in range(d):
        best, best_abs = None, 0.0
        for r in range(i, d):
            s = rows[r][i].scalar_part
            if s != 0 and abs(s) > best_abs:
                best, best_abs = r, abs(s)
        if best is None:
            raise SingularPivotError(
                f"column {i} has no entry with nonzero scalar part at or below the diagonal"
            )
        if best != i:
            rows[i], rows[best] = rows[best], rows[i]
            sign = -sign
        piv = rows[i][i]
        pinv = g_inv(piv)
        pivots.append(piv)
        inverses.append(pinv)
        prow = rows[i]
        cols = [c for c in range(i + 1, d) if prow[c].terms]
        for r in range(i + 1, d):
            lead = rows[r][i]
            if not lead.terms:
                continue
            f = g_mul(lead, pinv)
            row = rows[r]
            for c in cols:
                row[c] = row[c] - g_mul(f, prow[c])
    return sign, pivots, inverses


def g_det(M):
    """Determinant of a Grassmann matrix with even entries."""
    sign, pivots, _ = _eliminate(M)
    result = GrassmannEven.scalar(M.num_pairs, sign)
    for p in pivots:
        result = g_mul(result, p)
    return result


def g_det_inv(M):
    """``g_inv(g_det(M))`` computed as the product of inverse pivots.

    Mathematically identical to inverting the determinant, but it avoids the
    large alternating partial sums of the Neumann series for the full
    determinant, which cost several digits in floating point.
    """
    sign, _, inverses = _eliminate(M)
    result = GrassmannEven.scalar(M.num_pairs, sign)
    for p in inverses:
        result = g_mul(result, p)
    return result


def berezin(a):
    """Coefficient of the top blade ``prod_i eta_i etabar_i``."""
    return a.terms.get((1 << (2 * a.num_pairs)) - 1, 0)


def berezin_measure(a):
    """Integral of ``a`` against ``d eta = prod d etabar d eta``.

    The sign is ``(-1)^l`` relative to :func:`berezin`, the orientation under
    which ``int exp(-sum_ij eta_i H_ij etabar_j) d eta = det H`` holds.  For an
    even number of pairs the two agree.
    """
    c = berezin(a)
    return -c if a.num_pairs % 2 else c


def susy_det(H):
    """Determinant of ``H`` as a Gaussian Berezin integral over ``l = dim H`` pairs."""
    H = np.asarray(H)
    if H.ndim != 2 or H.shape[0] != H.shape[1]:
        raise ContractError("susy_det expects a square matrix")
    l = H.shape[0]
    if l == 0:
        return 1
    terms = {}
    for i in range(l):
        for j in range(l):
            h = _py(H[i, j])
            if h == 0:
                continue
            a, b = 2 * i, 2 * j + 1
            mask = (1 << a) | (1 << b)
            s = -h if a < b else h  # -eta_i H_ij etabar_j in canonical order
            terms[mask] = terms.get(mask, 0) + s
    exponent = GrassmannEven(l, terms)
    return berezin_measure(g_exp(exponent))
