"""Exact arithmetic in the deformation parameter q.

Three layers, all exact (no floating point anywhere):

  LaurentPolynomial -- sparse map {exponent: Fraction}, exponents may be
                       negative, zero coefficients never stored.
  RationalFunction  -- quotient of two Laurent polynomials kept in canonical
                       form: numerator and denominator share no polynomial
                       factor, the denominator is an ordinary polynomial
                       (lowest exponent 0) and monic in its leading term.
                       Canonical form makes equality a dict comparison.
  QMatrix           -- dense matrix over any exact scalar type supporting
                       +, -, *, / and truthiness (RationalFunction or
                       Fraction), with Gaussian elimination for kernel,
                       inverse and rank.

Scalars are duck-typed so that the same matrix code runs either fully
symbolically over Q(q) or numerically over Q after substituting an exact
rational value for q; `QQ` and `QPoint` are the two field adapters.
"""

from __future__ import annotations

import json
from fractions import Fraction
from typing import Callable, Iterable, Iterator, Mapping, Sequence, Union


class PoleError(ZeroDivisionError):
    """Raised when a rational function is evaluated at a root of its denominator."""


class SingularMatrixError(ArithmeticError):
    """Raised when a matrix inverse is requested for a singular matrix."""


# ---------------------------------------------------------------------------
# Laurent polynomials
# ---------------------------------------------------------------------------

def _as_fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    raise TypeError(f"expected an exact rational, got {type(value).__name__}")


class LaurentPolynomial:
    """Element of Q[q, q^-1], stored as {exponent: nonzero Fraction}."""

    __slots__ = ("coeffs", "_hash")

    def __init__(self, coeffs: Mapping[int, Union[int, Fraction]] | None = None):
        clean: dict[int, Fraction] = {}
        if coeffs:
            for exp, c in coeffs.items():
                f = _as_fraction(c)
                if f:
                    clean[int(exp)] = f
        self.coeffs = clean
        self._hash = None

    # -- constructors ------------------------------------------------------

    @staticmethod
    def constant(value: Union[int, Fraction]) -> "LaurentPolynomial":
        return LaurentPolynomial({0: value})

    @staticmethod
    def q_power(exp: int, coeff: Union[int, Fraction] = 1) -> "LaurentPolynomial":
        return LaurentPolynomial({exp: coeff})

    # -- structure ---------------------------------------------------------

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    def __bool__(self) -> bool:
        return bool(self.coeffs)

    @property
    def min_exp(self) -> int:
        if not self.coeffs:
            raise ValueError("zero polynomial has no exponents")
        return min(self.coeffs)

    @property
    def max_exp(self) -> int:
        if not self.coeffs:
            raise ValueError("zero polynomial has no exponents")
        return max(self.coeffs)

    def term_count(self) -> int:
        return len(self.coeffs)

    def is_monomial(self) -> bool:
        return len(self.coeffs) == 1

    # -- arithmetic ----------------------------------------------------------

    def __add__(self, other: "LaurentPolynomial") -> "LaurentPolynomial":
        if not other.coeffs:
            return self
        if not self.coeffs:
            return other
        out = dict(self.coeffs)
        for exp, c in other.coeffs.items():
            s = out.get(exp)
            if s is None:
                out[exp] = c
            else:
                s = s + c
                if s:
                    out[exp] = s
                else:
                    del out[exp]
        result = LaurentPolynomial.__new__(LaurentPolynomial)
        result.coeffs = out
        result._hash = None
        return result

    def __sub__(self, other: "LaurentPolynomial") -> "LaurentPolynomial":
        return self + (-other)

    def __neg__(self) -> "LaurentPolynomial":
        result = LaurentPolynomial.__new__(LaurentPolynomial)
        result.coeffs = {e: -c for e, c in self.coeffs.items()}
        result._hash = None
        return result

    def __mul__(self, other: "LaurentPolynomial") -> "LaurentPolynomial":
        if not self.coeffs or not other.coeffs:
            return _LP_ZERO
        a, b = self.coeffs, other.coeffs
        if len(a) > len(b):
            a, b = b, a
        out: dict[int, Fraction] = {}
        for ea, ca in a.items():
            for eb, cb in b.items():
                e = ea + eb
                s = out.get(e)
                if s is None:
                    out[e] = ca * cb
                else:
                    s = s + ca * cb
                    if s:
                        out[e] = s
                    else:
                        del out[e]
        result = LaurentPolynomial.__new__(LaurentPolynomial)
        result.coeffs = out
        result._hash = None
        return result

    def __pow__(self, n: int) -> "LaurentPolynomial":
        if n < 0:
            raise ValueError("negative powers of Laurent polynomials are rational functions")
        result = _LP_ONE
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def scale(self, c: Union[int, Fraction]) -> "LaurentPolynomial":
        f = _as_fraction(c)
        if not f:
            return _LP_ZERO
        result = LaurentPolynomial.__new__(LaurentPolynomial)
        result.coeffs = {e: v * f for e, v in self.coeffs.items()}
        result._hash = None
        return result

    def shift(self, k: int) -> "LaurentPolynomial":
        """Multiply by q^k."""
        if k == 0:
            return self
        result = LaurentPolynomial.__new__(LaurentPolynomial)
        result.coeffs = {e + k: v for e, v in self.coeffs.items()}
        result._hash = None
        return result

    # -- queries -------------------------------------------------------------

    def evaluate(self, q0: Union[int, Fraction]) -> Fraction:
        q0 = _as_fraction(q0)
        if q0 == 0:
            raise ZeroDivisionError("cannot substitute q = 0 into a Laurent polynomial")
        total = Fraction(0)
        for exp, c in self.coeffs.items():
            total += c * q0 ** exp
        return total

    def __eq__(self, other) -> bool:
        if isinstance(other, LaurentPolynomial):
            return self.coeffs == other.coeffs
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(tuple(sorted(self.coeffs.items())))
        return self._hash

    def __repr__(self) -> str:
        if not self.coeffs:
            return "0"
        parts = []
        for exp in sorted(self.coeffs, reverse=True):
            c = self.coeffs[exp]
            if exp == 0:
                term = str(c)
            else:
                qp = "q" if exp == 1 else f"q^{exp}"
                if c == 1:
                    term = qp
                elif c == -1:
                    term = f"-{qp}"
                else:
                    term = f"{c}*{qp}"
            parts.append(term)
        text = " + ".join(parts).replace("+ -", "- ")
        return text

    def to_json(self) -> dict:
        return {str(exp): str(c) for exp, c in sorted(self.coeffs.items())}

    @staticmethod
    def from_json(obj: Mapping[str, str]) -> "LaurentPolynomial":
        return LaurentPolynomial({int(e): Fraction(c) for e, c in obj.items()})


_LP_ZERO = LaurentPolynomial()
_LP_ONE = LaurentPolynomial({0: 1})


# -- dense helpers for gcd / exact division --------------------------------

def _to_list(p: LaurentPolynomial) -> tuple[list[Fraction], int]:
    """Return (dense ascending coefficient list, exponent shift)."""
    lo, hi = p.min_exp, p.max_exp
    out = [Fraction(0)] * (hi - lo + 1)
    for e, c in p.coeffs.items():
        out[e - lo] = c
    return out, lo

def _from_list(coeffs: Sequence[Fraction], shift: int) -> LaurentPolynomial:
    return LaurentPolynomial({i + shift: c for i, c in enumerate(coeffs) if c})

def _list_divmod(a: list[Fraction], b: list[Fraction]) -> tuple[list[Fraction], list[Fraction]]:
    """Ordinary polynomial division of dense ascending coefficient lists."""
    a = list(a)
    db, lb = len(b) - 1, b[-1]
    if db == 0:
        return [c / lb for c in a], []
    quo = [Fraction(0)] * max(len(a) - db, 0)
    for i in range(len(a) - 1, db - 1, -1):
        c = a[i]
        if c:
            f = c / lb
            quo[i - db] = f
            for j in range(db + 1):
                a[i - db + j] -= f * b[j]
    while a and not a[-1]:
        a.pop()
    return quo, a


def laurent_gcd(a: LaurentPolynomial, b: LaurentPolynomial) -> LaurentPolynomial:
    """Monic gcd with lowest exponent 0; gcd(x, 0) = monic shift of x."""
    if a.is_zero and b.is_zero:
        return _LP_ZERO
    def normalized(p: LaurentPolynomial) -> list[Fraction]:
        lst, _ = _to_list(p)
        while lst and not lst[0]:
            lst.pop(0)
        return lst
    if a.is_zero:
        x = normalized(b)
        return _from_list([c / x[-1] for c in x], 0)
    if b.is_zero:
        x = normalized(a)
        return _from_list([c / x[-1] for c in x], 0)
    x, y = normalized(a), normalized(b)
    while y:
        _, r = _list_divmod(x, y)
        x, y = y, r
        while x and not x[0]:
            # strip a q factor that can only have entered through a zero tail
            x.pop(0)
    return _from_list([c / x[-1] for c in x], 0)


def laurent_exact_div(a: LaurentPolynomial, b: LaurentPolynomial) -> LaurentPolynomial:
    """Divide a by b assuming b divides a exactly (up to a q-power unit)."""
    if a.is_zero:
        return _LP_ZERO
    la, sa = _to_list(a)
    lb, sb = _to_list(b)
    quo, rem = _list_divmod(la, lb)
    if rem:
        raise ArithmeticError("exact Laurent division with nonzero remainder")
    return _from_list(quo, sa - sb)


# ---------------------------------------------------------------------------
# Rational functions
# ---------------------------------------------------------------------------

class RationalFunction:
    """Element of Q(q) in canonical reduced form."""

    __slots__ = ("num", "den")

    def __init__(self, num: LaurentPolynomial, den: LaurentPolynomial = _LP_ONE,
                 _reduced: bool = False):
        if den.is_zero:
            raise ZeroDivisionError("rational function with zero denominator")
        if not _reduced:
            num, den = _reduce(num, den)
        self.num = num
        self.den = den

    # -- constructors --------------------------------------------------------

    @staticmethod
    def from_laurent(p: LaurentPolynomial) -> "RationalFunction":
        return RationalFunction(p, _LP_ONE, _reduced=True)

    @staticmethod
    def constant(value: Union[int, Fraction]) -> "RationalFunction":
        return RationalFunction(LaurentPolynomial.constant(value), _LP_ONE, _reduced=True)

    @staticmethod
    def q_power(exp: int, coeff: Union[int, Fraction] = 1) -> "RationalFunction":
        return RationalFunction(LaurentPolynomial.q_power(exp, coeff), _LP_ONE, _reduced=True)

    # -- structure -----------------------------------------------------------

    @property
    def is_zero(self) -> bool:
        return self.num.is_zero

    def __bool__(self) -> bool:
        return not self.num.is_zero

    @property
    def is_laurent(self) -> bool:
        return self.den == _LP_ONE

    def as_laurent(self) -> LaurentPolynomial:
        if self.den != _LP_ONE:
            raise ValueError(f"{self!r} is not a Laurent polynomial")
        return self.num

    def term_count(self) -> int:
        return len(self.num.coeffs) + len(self.den.coeffs)

    # -- arithmetic ------------------------------------------------------------

    def __add__(self, other: "RationalFunction") -> "RationalFunction":
        if not isinstance(other, RationalFunction):
            return NotImplemented
        if other.num.is_zero:
            return self
        if self.num.is_zero:
            return other
        if self.den == other.den:
            num = self.num + other.num
            if self.den == _LP_ONE:
                return RationalFunction(num, _LP_ONE, _reduced=True)
            return RationalFunction(num, self.den)
        return RationalFunction(self.num * other.den + other.num * self.den,
                                self.den * other.den)

    def __sub__(self, other: "RationalFunction") -> "RationalFunction":
        return self + (-other)

    def __neg__(self) -> "RationalFunction":
        return RationalFunction(-self.num, self.den, _reduced=True)

    def __mul__(self, other: "RationalFunction") -> "RationalFunction":
        if not isinstance(other, RationalFunction):
            return NotImplemented
        if self.num.is_zero or other.num.is_zero:
            return RF_ZERO
        if self.den == _LP_ONE and other.den == _LP_ONE:
            return RationalFunction(self.num * other.num, _LP_ONE, _reduced=True)
        # cross-cancel so the product of already-reduced fractions needs no gcd
        n1, d1, n2, d2 = self.num, self.den, other.num, other.den
        g = laurent_gcd(n1, d2)
        if g != _LP_ONE:
            n1, d2 = laurent_exact_div(n1, g), laurent_exact_div(d2, g)
        g = laurent_gcd(n2, d1)
        if g != _LP_ONE:
            n2, d1 = laurent_exact_div(n2, g), laurent_exact_div(d1, g)
        num, den = n1 * n2, d1 * d2
        num, den = _normalize_units(num, den)
        return RationalFunction(num, den, _reduced=True)

    def __truediv__(self, other: "RationalFunction") -> "RationalFunction":
        return self * other.inverse()

    def inverse(self) -> "RationalFunction":
        if self.num.is_zero:
            raise ZeroDivisionError("inverse of zero")
        num, den = _normalize_units(self.den, self.num)
        return RationalFunction(num, den, _reduced=True)

    def __pow__(self, n: int) -> "RationalFunction":
        if n < 0:
            return self.inverse() ** (-n)
        result = RF_ONE
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    # -- queries ---------------------------------------------------------------

    def evaluate(self, q0: Union[int, Fraction]) -> Fraction:
        q0 = _as_fraction(q0)
        if q0 == 0:
            raise ZeroDivisionError("q = 0 is outside the Laurent domain")
        d = self.den.evaluate(q0)
        if d == 0:
            raise PoleError(f"pole at q = {q0}")
        if self.num.is_zero:
            return Fraction(0)
        return self.num.evaluate(q0) / d

    def exponent_bounds(self) -> tuple[int, int]:
        """Conservative (lo, hi) exponent range covering num and -den degrees."""
        if self.num.is_zero:
            return (0, 0)
        lo = self.num.min_exp - self.den.max_exp
        hi = self.num.max_exp - self.den.min_exp
        return (lo, hi)

    def __eq__(self, other) -> bool:
        if isinstance(other, RationalFunction):
            return self.num == other.num and self.den == other.den
        return NotImplemented

    def __hash__(self):
        return hash((self.num, self.den))

    def __repr__(self) -> str:
        if self.den == _LP_ONE:
            return repr(self.num)
        return f"({self.num!r})/({self.den!r})"

    def to_json(self) -> dict:
        return {"num": self.num.to_json(), "den": self.den.to_json()}

    @staticmethod
    def from_json(obj: Mapping[str, Mapping[str, str]]) -> "RationalFunction":
        return RationalFunction(LaurentPolynomial.from_json(obj["num"]),
                                LaurentPolynomial.from_json(obj["den"]))


def _normalize_units(num: LaurentPolynomial, den: LaurentPolynomial):
    """Force denominator to lowest exponent 0 and leading coefficient 1."""
    shift = den.min_exp
    if shift:
        den = den.shift(-shift)
        num = num.shift(-shift)
    lead = den.coeffs[den.max_exp]
    if lead != 1:
        den = den.scale(Fraction(1) / lead)
        num = num.scale(Fraction(1) / lead)
    return num, den


def _reduce(num: LaurentPolynomial, den: LaurentPolynomial):
    if num.is_zero:
        return _LP_ZERO, _LP_ONE
    if den.is_monomial():
        e = den.min_exp
        c = den.coeffs[e]
        return num.shift(-e).scale(Fraction(1) / c), _LP_ONE
    g = laurent_gcd(num, den)
    if g != _LP_ONE:
        num = laurent_exact_div(num, g)
        den = laurent_exact_div(den, g)
    return _normalize_units(num, den)


RF_ZERO = RationalFunction(_LP_ZERO, _LP_ONE, _reduced=True)
RF_ONE = RationalFunction(_LP_ONE, _LP_ONE, _reduced=True)


def rf(num: Mapping[int, Union[int, Fraction]] | int,
       den: Mapping[int, Union[int, Fraction]] | None = None) -> RationalFunction:
    """Shorthand builder: rf({2: 1, -2: -1}) == q^2 - q^-2."""
    np = LaurentPolynomial.constant(num) if isinstance(num, int) else LaurentPolynomial(num)
    if den is None:
        return RationalFunction(np)
    dp = LaurentPolynomial.constant(den) if isinstance(den, int) else LaurentPolynomial(den)
    return RationalFunction(np, dp)


# ---------------------------------------------------------------------------
# Field adapters
# ---------------------------------------------------------------------------

class QQ:
    """Symbolic field adapter: scalars are RationalFunction over Q(q)."""

    zero = RF_ZERO
    one = RF_ONE

    @staticmethod
    def q_power(exp: int, coeff: Union[int, Fraction] = 1) -> RationalFunction:
        return RationalFunction.q_power(exp, coeff)

    @staticmethod
    def of_fraction(c: Union[int, Fraction]) -> RationalFunction:
        return RationalFunction.constant(c)

    @staticmethod
    def convert(x: RationalFunction) -> RationalFunction:
        return x


class QPoint:
    """Numeric field adapter: scalars are exact Fractions with q = q0."""

    def __init__(self, q0: Union[int, Fraction]):
        self.q0 = _as_fraction(q0)
        if self.q0 == 0:
            raise ValueError("q0 must be nonzero")
        self.zero = Fraction(0)
        self.one = Fraction(1)

    def q_power(self, exp: int, coeff: Union[int, Fraction] = 1) -> Fraction:
        return _as_fraction(coeff) * self.q0 ** exp

    def of_fraction(self, c: Union[int, Fraction]) -> Fraction:
        return _as_fraction(c)

    def convert(self, x: RationalFunction) -> Fraction:
        return x.evaluate(self.q0)


def term_count(x) -> int:
    """Pivot-size measure: term count for rational functions, 1 for numbers."""
    if isinstance(x, RationalFunction):
        return x.term_count()
    return 1


# ---------------------------------------------------------------------------
# Matrices
# ---------------------------------------------------------------------------

class QMatrix:
    """Dense matrix over an exact field; treat instances as immutable."""

    __slots__ = ("rows", "cols", "data")

    def __init__(self, data: Sequence[Sequence]):
        self.data = [list(row) for row in data]
        self.rows = len(self.data)
        self.cols = len(self.data[0]) if self.data else 0
        for row in self.data:
            if len(row) != self.cols:
                raise ValueError("ragged matrix rows")

    # -- constructors -----------------------------------------------------------

    @staticmethod
    def zeros(rows: int, cols: int, zero=RF_ZERO) -> "QMatrix":
        return QMatrix([[zero] * cols for _ in range(rows)])

    @staticmethod
    def identity(n: int, zero=RF_ZERO, one=RF_ONE) -> "QMatrix":
        m = QMatrix.zeros(n, n, zero)
        for i in range(n):
            m.data[i][i] = one
        return m

    @staticmethod
    def diagonal(entries: Sequence, zero=RF_ZERO) -> "QMatrix":
        n = len(entries)
        m = QMatrix.zeros(n, n, zero)
        for i, e in enumerate(entries):
            m.data[i][i] = e
        return m

    # -- access -------------------------------------------------------------------

    def __getitem__(self, key: tuple[int, int]):
        return self.data[key[0]][key[1]]

    def row(self, i: int) -> list:
        return list(self.data[i])

    def column(self, j: int) -> list:
        return [self.data[i][j] for i in range(self.rows)]

    def copy(self) -> "QMatrix":
        return QMatrix(self.data)

    @property
    def zero(self):
        for row in self.data:
            for x in row:
                if x:
                    return x - x
        return RF_ZERO if self.data == [] or isinstance(self.data[0][0], RationalFunction) else Fraction(0)

    # -- arithmetic ------------------------------------------------------------------

    def __add__(self, other: "QMatrix") -> "QMatrix":
        self._check_same_shape(other)
        return QMatrix([[a + b for a, b in zip(ra, rb)]
                        for ra, rb in zip(self.data, other.data)])

    def __sub__(self, other: "QMatrix") -> "QMatrix":
        self._check_same_shape(other)
        return QMatrix([[a - b for a, b in zip(ra, rb)]
                        for ra, rb in zip(self.data, other.data)])

    def __neg__(self) -> "QMatrix":
        return QMatrix([[-a for a in row] for row in self.data])

    def __mul__(self, other):
        if isinstance(other, QMatrix):
            if self.cols != other.rows:
                raise ValueError(f"dimension mismatch: {self.shape} * {other.shape}")
            n, m = self.rows, other.cols
            out = [[None] * m for _ in range(n)]
            zero = None
            bdata = other.data
            for i in range(n):
                arow = self.data[i]
                orow = out[i]
                for k in range(self.cols):
                    a = arow[k]
                    if not a:
                        if zero is None:
                            zero = a
                        continue
                    brow = bdata[k]
                    for j in range(m):
                        b = brow[j]
                        if not b:
                            continue
                        prod = a * b
                        orow[j] = prod if orow[j] is None else orow[j] + prod
            if zero is None:
                zero = self.data[0][0] - self.data[0][0] if n and self.cols else RF_ZERO
            for i in range(n):
                orow = out[i]
                for j in range(m):
                    if orow[j] is None:
                        orow[j] = zero
            return QMatrix(out)
        return self.scale(other)

    def scale(self, scalar) -> "QMatrix":
        if not scalar:
            z = scalar - scalar
            return QMatrix([[z] * self.cols for _ in range(self.rows)])
        return QMatrix([[x * scalar if x else x for x in row] for row in self.data])

    def transpose(self) -> "QMatrix":
        return QMatrix([[self.data[i][j] for i in range(self.rows)]
                        for j in range(self.cols)])

    def kron(self, other: "QMatrix") -> "QMatrix":
        """Kronecker (tensor) product."""
        out = []
        for i in range(self.rows):
            for k in range(other.rows):
                row = []
                srow, orow = self.data[i], other.data[k]
                for a in srow:
                    if a:
                        row.extend(a * b if b else b for b in orow)
                    else:
                        z = a
                        row.extend(z for _ in orow)
                out.append(row)
        return QMatrix(out)

    # -- queries -------------------------------------------------------------------------

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    @property
    def is_zero(self) -> bool:
        return all(not x for row in self.data for x in row)

    def __eq__(self, other) -> bool:
        if isinstance(other, QMatrix):
            return self.shape == other.shape and self.data == other.data
        return NotImplemented

    def __hash__(self):
        return hash((self.shape, tuple(tuple(r) for r in self.data)))

    def nonzero_items(self) -> Iterator[tuple[int, int, object]]:
        for i, row in enumerate(self.data):
            for j, x in enumerate(row):
                if x:
                    yield i, j, x

    def commutator(self, other: "QMatrix") -> "QMatrix":
        return self * other - other * self

    def evaluate(self, q0: Union[int, Fraction]) -> "QMatrix":
        """Substitute an exact rational q0, giving a Fraction matrix."""
        return QMatrix([[x.evaluate(q0) if x else Fraction(0) for x in row]
                        for row in self.data])

    def exponent_bounds(self) -> tuple[int, int]:
        lo = hi = 0
        for _, _, x in self.nonzero_items():
            xlo, xhi = x.exponent_bounds()
            lo, hi = min(lo, xlo), max(hi, xhi)
        return lo, hi

    def _check_same_shape(self, other: "QMatrix") -> None:
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch: {self.shape} vs {other.shape}")

    def __repr__(self) -> str:
        return f"QMatrix({self.rows}x{self.cols})"

    def pretty(self) -> str:
        cells = [[repr(x) for x in row] for row in self.data]
        width = max((len(c) for row in cells for c in row), default=1)
        return "\n".join("  ".join(c.rjust(width) for c in row) for row in cells)

    # -- linear algebra --------------------------------------------------------------------

    def _rref(self, pivot_by_terms: bool = True):
        """Reduced row echelon form; returns (rows, pivot column list)."""
        m = [list(row) for row in self.data]
        nrows, ncols = self.rows, self.cols
        pivots: list[int] = []
        r = 0
        for c in range(ncols):
            if r >= nrows:
                break
            best = None
            for i in range(r, nrows):
                if m[i][c]:
                    if not pivot_by_terms:
                        best = i
                        break
                    size = term_count(m[i][c])
                    if best is None or size < best[0]:
                        best = (size, i)
            if best is None:
                continue
            i = best if isinstance(best, int) else best[1]
            m[r], m[i] = m[i], m[r]
            inv = m[r][c]
            if isinstance(inv, RationalFunction):
                inv = inv.inverse()
            else:
                inv = 1 / inv
            m[r] = [x * inv if x else x for x in m[r]]
            for i in range(nrows):
                if i != r and m[i][c]:
                    f = m[i][c]
                    m[i] = [a - f * b if b else a for a, b in zip(m[i], m[r])]
            pivots.append(c)
            r += 1
        return m, pivots

    def rank(self, pivot_by_terms: bool = True) -> int:
        _, pivots = self._rref(pivot_by_terms)
        return len(pivots)

    def kernel(self, pivot_by_terms: bool = True) -> list[list]:
        """Basis of the right null space, one vector per free column."""
        m, pivots = self._rref(pivot_by_terms)
        zero = self.zero
        one = zero + (RF_ONE if isinstance(zero, RationalFunction) else Fraction(1))
        free = [c for c in range(self.cols) if c not in pivots]
        basis = []
        for fc in free:
            v = [zero] * self.cols
            v[fc] = one
            for r, pc in enumerate(pivots):
                x = m[r][fc]
                v[pc] = -x if x else zero
            basis.append(v)
        return basis

    def inverse(self) -> "QMatrix":
        if self.rows != self.cols:
            raise ValueError("inverse of a non-square matrix")
        n = self.rows
        zero = self.zero
        one = zero + (RF_ONE if isinstance(zero, RationalFunction) else Fraction(1))
        aug = QMatrix([list(self.data[i]) + [one if j == i else zero for j in range(n)]
                       for i in range(n)])
        m, pivots = aug._rref()
        if pivots != list(range(n)):
            raise SingularMatrixError("matrix is singular over Q(q)")
        return QMatrix([row[n:] for row in m])

    def to_json(self) -> list:
        return [[x.to_json() for x in row] for row in self.data]

    @staticmethod
    def from_json(obj) -> "QMatrix":
        return QMatrix([[RationalFunction.from_json(x) for x in row] for row in obj])


def solve_linear(matrix: QMatrix, mode: str):
    """Exact linear algebra dispatcher: mode in {'kernel', 'inverse', 'rank'}."""
    if mode == "kernel":
        return matrix.kernel()
    if mode == "inverse":
        return matrix.inverse()
    if mode == "rank":
        return matrix.rank()
    raise ValueError(f"unknown mode {mode!r}")


def write_matrix_json(matrix: QMatrix, path: str) -> None:
    with open(path, "w") as fh:
        json.dump(matrix.to_json(), fh)


def read_matrix_json(path: str) -> QMatrix:
    with open(path) as fh:
        return QMatrix.from_json(json.load(fh))
