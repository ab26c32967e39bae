"""Exact arithmetic: Gaussian rationals and rational functions in one variable.

Coefficient tower used by everything above this module:

    Q  <  Q(i)  <  Q(i)(s)

* ``GaussianRational`` is a + b*i with a, b arbitrary-precision rationals.
* Polynomials over Q(i) are plain tuples of GaussianRational indexed by
  exponent, with no trailing zeros; the empty tuple is the zero polynomial.
* ``RationalFunctionQi`` is a reduced quotient of two such polynomials.
  Canonical form: gcd(num, den) = 1 and the lowest-degree nonzero
  coefficient of the denominator is 1.  With that normalization equality
  is a plain coefficient comparison and 1/(1-s^2)-type denominators print
  the way they are usually written.

Nothing in this module rounds.  Degree growth is never truncated here;
truncation belongs to the series layer.
"""

from __future__ import annotations

from fractions import Fraction


class RingError(ValueError):
    """Base class for exact-arithmetic errors."""


class RationalFunctionDivisionError(RingError):
    """Division by the zero rational function."""


class PoleEvaluationError(RingError):
    """Numeric evaluation hit a (near-)zero denominator."""

    def __init__(self, message, denominator_magnitude):
        super().__init__(message)
        self.denominator_magnitude = denominator_magnitude


_ZERO_F = Fraction(0)
_ONE_F = Fraction(1)


class GaussianRational:
    """An element a + b*i of Q(i), exact and immutable."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = re if type(re) is Fraction else Fraction(re)
        self.im = im if type(im) is Fraction else Fraction(im)

    @staticmethod
    def _new(re, im):
        # fast internal constructor: arguments must already be Fractions
        g = GaussianRational.__new__(GaussianRational)
        g.re = re
        g.im = im
        return g

    @classmethod
    def zero(cls):
        return _GR_ZERO

    @classmethod
    def one(cls):
        return _GR_ONE

    @classmethod
    def i(cls):
        return _GR_I

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __eq__(self, other):
        other = _coerce_gr(other)
        if other is NotImplemented:
            return NotImplemented
        return self.re == other.re and self.im == other.im

    def __hash__(self):
        return hash((self.re, self.im))

    def __neg__(self):
        return GaussianRational._new(-self.re, -self.im)

    def __add__(self, other):
        other = _coerce_gr(other)
        if other is NotImplemented:
            return NotImplemented
        return GaussianRational._new(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __sub__(self, other):
        other = _coerce_gr(other)
        if other is NotImplemented:
            return NotImplemented
        return GaussianRational._new(self.re - other.re, self.im - other.im)

    def __rsub__(self, other):
        other = _coerce_gr(other)
        if other is NotImplemented:
            return NotImplemented
        return other - self

    def __mul__(self, other):
        other = _coerce_gr(other)
        if other is NotImplemented:
            return NotImplemented
        if not self.im and not other.im:
            return GaussianRational._new(self.re * other.re, _ZERO_F)
        return GaussianRational._new(
            self.re * other.re - self.im * other.im,
            self.re * other.im + self.im * other.re,
        )

    __rmul__ = __mul__

    def inverse(self):
        if not self:
            raise ZeroDivisionError("inverse of zero Gaussian rational")
        if not self.im:
            return GaussianRational._new(1 / self.re, _ZERO_F)
        n = self.re * self.re + self.im * self.im
        return GaussianRational._new(self.re / n, -self.im / n)

    def __truediv__(self, other):
        other = _coerce_gr(other)
        if other is NotImplemented:
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        other = _coerce_gr(other)
        if other is NotImplemented:
            return NotImplemented
        return other * self.inverse()

    def __pow__(self, n):
        if not isinstance(n, int) or n < 0:
            raise ValueError("only nonnegative integer powers")
        out = _GR_ONE
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def conjugate(self):
        return GaussianRational._new(self.re, -self.im)

    @property
    def is_rational(self):
        return not self.im

    def is_integer(self):
        return self.im == 0 and self.re.denominator == 1

    def to_complex(self):
        return complex(self.re) + 1j * complex(self.im)

    def __str__(self):
        if not self.im:
            return str(self.re)
        im = self.im
        if im == 1:
            ims = "i"
        elif im == -1:
            ims = "-i"
        else:
            ims = f"{im}i"
        if not self.re:
            return ims
        sign = "+" if im > 0 else ""
        return f"{self.re}{sign}{ims}"

    def __repr__(self):
        return f"GaussianRational({self.re!r}, {self.im!r})"


_GR_ZERO = GaussianRational(0)
_GR_ONE = GaussianRational(1)
_GR_I = GaussianRational(0, 1)


def _coerce_gr(x):
    if type(x) is GaussianRational:
        return x
    if isinstance(x, (int, Fraction)):
        return GaussianRational(x)
    if isinstance(x, GaussianRational):
        return x
    return NotImplemented


# ---------------------------------------------------------------------------
# polynomials over Q(i): tuples of GaussianRational, no trailing zeros


PZERO = ()
PONE = (_GR_ONE,)


def poly_trim(coeffs):
    n = len(coeffs)
    while n and not coeffs[n - 1]:
        n -= 1
    return tuple(coeffs[:n])


def poly_from_ints(values):
    return poly_trim([GaussianRational(v) for v in values])


def poly_monomial(exp, coeff=_GR_ONE):
    if exp < 0:
        raise ValueError("poly_monomial: negative exponent")
    if not coeff:
        return PZERO
    return (_GR_ZERO,) * exp + (coeff,)


def poly_degree(a):
    return len(a) - 1  # -1 for the zero polynomial


def poly_valuation(a):
    """Exponent of the lowest nonzero term; 0 for the zero polynomial."""
    for k, c in enumerate(a):
        if c:
            return k
    return 0


def poly_add(a, b):
    if len(a) < len(b):
        a, b = b, a
    out = list(a)
    for k, c in enumerate(b):
        out[k] = out[k] + c
    return poly_trim(out)


def poly_neg(a):
    return tuple(-c for c in a)


def poly_sub(a, b):
    return poly_add(a, poly_neg(b))


def poly_scale(a, c):
    if not c:
        return PZERO
    return tuple(x * c for x in a)


def poly_mul(a, b):
    if not a or not b:
        return PZERO
    out = [_GR_ZERO] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if not ai:
            continue
        for j, bj in enumerate(b):
            if bj:
                out[i + j] = out[i + j] + ai * bj
    return poly_trim(out)


def poly_shift(a, k):
    """Multiply by s^k (k >= 0)."""
    if not a:
        return PZERO
    return (_GR_ZERO,) * k + tuple(a)


def poly_divmod(a, b):
    """Exact division with remainder over the field Q(i)."""
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    if len(a) < len(b):
        return PZERO, a
    rem = list(a)
    db = len(b) - 1
    lead_inv = b[-1].inverse()
    quot = [_GR_ZERO] * (len(a) - db)
    for k in range(len(a) - 1, db - 1, -1):
        c = rem[k]
        if not c:
            continue
        f = c * lead_inv
        quot[k - db] = f
        for j in range(db + 1):
            rem[k - db + j] = rem[k - db + j] - f * b[j]
    return poly_trim(quot), poly_trim(rem)


def poly_gcd(a, b):
    """Monic gcd via the Euclidean algorithm (remainders normalized monic)."""
    a = poly_trim(a)
    b = poly_trim(b)
    # strip the common power of s first: cheap and very frequent here
    if a and b:
        v = min(poly_valuation(a), poly_valuation(b))
    else:
        v = 0
    if v:
        a = tuple(a[v:])
        b = tuple(b[v:])
    while b:
        _, r = poly_divmod(a, b)
        if r:
            r = poly_scale(r, r[-1].inverse())
        a, b = b, r
    if not a:
        return poly_shift(PONE, v) if v else PZERO
    g = poly_scale(a, a[-1].inverse())
    return poly_shift(g, v)


def poly_eval(a, x):
    """Evaluate at a complex point by Horner's rule."""
    out = 0j
    for c in reversed(a):
        out = out * x + c.to_complex()
    return out


def _coeff_str(c, in_product):
    s = str(c)
    if in_product and (("+" in s[1:]) or ("-" in s[1:]) or "/" in s):
        return f"({s})"
    return s


def poly_str(a, var="s"):
    if not a:
        return "0"
    parts = []
    for k, c in enumerate(a):
        if not c:
            continue
        if k == 0:
            parts.append(str(c))
            continue
        pw = var if k == 1 else f"{var}^{k}"
        if c == _GR_ONE:
            term = pw
        elif c == -_GR_ONE:
            term = f"-{pw}"
        else:
            term = f"{_coeff_str(c, True)}*{pw}"
        parts.append(term)
    out = parts[0]
    for term in parts[1:]:
        out += ("-" + term[1:]) if term.startswith("-") else ("+" + term)
    return out


# ---------------------------------------------------------------------------
# rational functions in s over Q(i)


class RationalFunctionQi:
    """A reduced quotient of polynomials in s over Q(i).

    Negative powers of s are legal inputs (Laurent data); they are cleared
    into the denominator on construction.
    """

    __slots__ = ("num", "den")

    def __init__(self, num, den=PONE, *, _canonical=False):
        if _canonical:
            self.num = num
            self.den = den
            return
        num = poly_trim(num)
        den = poly_trim(den)
        if not den:
            raise RationalFunctionDivisionError("zero denominator")
        self.num, self.den = _reduce(num, den)

    # -- constructors ------------------------------------------------------

    @classmethod
    def zero(cls):
        return _RF_ZERO

    @classmethod
    def one(cls):
        return _RF_ONE

    @classmethod
    def var(cls):
        return _RF_S

    @classmethod
    def from_int(cls, n):
        return cls((GaussianRational(n),))

    @classmethod
    def constant(cls, c):
        c = _coerce_gr(c)
        return cls((c,))

    @classmethod
    def monomial(cls, exp, coeff=_GR_ONE):
        """coeff * s^exp, with exp any integer (negative goes downstairs)."""
        coeff = _coerce_gr(coeff)
        if not coeff:
            return _RF_ZERO
        if exp >= 0:
            return cls(poly_monomial(exp, coeff))
        return cls((coeff,), poly_monomial(-exp))

    @classmethod
    def from_laurent(cls, terms):
        """Build from {exponent: coefficient} with arbitrary integer keys."""
        if not terms:
            return _RF_ZERO
        shift = min(terms)
        shift = min(shift, 0)
        size = max(terms) - shift + 1
        out = [_GR_ZERO] * size
        for e, c in terms.items():
            out[e - shift] = out[e - shift] + _coerce_gr(c)
        num = poly_trim(out)
        if shift < 0:
            return cls(num, poly_monomial(-shift))
        return cls(num)

    # -- structure ---------------------------------------------------------

    def __bool__(self):
        return bool(self.num)

    def __eq__(self, other):
        if isinstance(other, RationalFunctionQi):
            return self.num == other.num and self.den == other.den
        if isinstance(other, (int, Fraction, GaussianRational)):
            return self == RationalFunctionQi.constant(other)
        return NotImplemented

    def __hash__(self):
        return hash((self.num, self.den))

    def is_constant(self):
        return len(self.num) <= 1 and len(self.den) <= 1

    def constant_value(self):
        if not self.is_constant():
            raise RingError("rational function is not constant")
        if not self.num:
            return _GR_ZERO
        return self.num[0] / self.den[0]

    def as_laurent(self):
        """Return {exponent: coefficient} if the denominator is a monomial,
        else None."""
        den = self.den
        v = poly_valuation(den)
        if len(den) != v + 1:
            return None
        c_inv = den[v].inverse()
        return {k - v: c * c_inv for k, c in enumerate(self.num) if c}

    # -- arithmetic ---------------------------------------------------------

    def __neg__(self):
        return RationalFunctionQi(poly_neg(self.num), self.den, _canonical=True)

    def __add__(self, other):
        other = _coerce_rf(other)
        if other is NotImplemented:
            return NotImplemented
        if not other.num:
            return self
        if not self.num:
            return other
        if self.den == other.den:
            return RationalFunctionQi(poly_add(self.num, other.num), self.den)
        num = poly_add(poly_mul(self.num, other.den), poly_mul(other.num, self.den))
        return RationalFunctionQi(num, poly_mul(self.den, other.den))

    __radd__ = __add__

    def __sub__(self, other):
        other = _coerce_rf(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = _coerce_rf(other)
        if other is NotImplemented:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        other = _coerce_rf(other)
        if other is NotImplemented:
            return NotImplemented
        if not self.num or not other.num:
            return _RF_ZERO
        return RationalFunctionQi(
            poly_mul(self.num, other.num), poly_mul(self.den, other.den)
        )

    __rmul__ = __mul__

    def inverse(self):
        if not self.num:
            raise RationalFunctionDivisionError("division by zero rational function")
        return RationalFunctionQi(self.den, self.num)

    def __truediv__(self, other):
        other = _coerce_rf(other)
        if other is NotImplemented:
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        other = _coerce_rf(other)
        if other is NotImplemented:
            return NotImplemented
        return other * self.inverse()

    def __pow__(self, n):
        if not isinstance(n, int):
            raise ValueError("integer powers only")
        if n < 0:
            return self.inverse() ** (-n)
        out = _RF_ONE
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def scale(self, c):
        c = _coerce_gr(c)
        return RationalFunctionQi(poly_scale(self.num, c), self.den)

    # -- substitutions -------------------------------------------------------

    def substitute_scale(self, c):
        """f(c*s) for a scalar c in Q(i)."""
        c = _coerce_gr(c)
        if not c:
            raise RingError("substitute_scale: scalar must be nonzero")
        if not self.num:
            return self
        # a unit substitution is a ring automorphism: reducedness survives,
        # only the denominator normalization has to be redone
        num = list(self.num)
        den = list(self.den)
        ck = _GR_ONE
        for k in range(1, max(len(num), len(den))):
            ck = ck * c
            if k < len(num):
                num[k] = num[k] * ck
            if k < len(den):
                den[k] = den[k] * ck
        v = poly_valuation(tuple(den))
        lead = den[v]
        if lead != _GR_ONE:
            inv = lead.inverse()
            num = [a * inv for a in num]
            den = [a * inv for a in den]
        return RationalFunctionQi(tuple(num), tuple(den), _canonical=True)

    def compose_power(self, a):
        """f(s^a) for a nonzero integer a (negative allowed)."""
        if a == 0:
            raise RingError("compose_power: exponent must be nonzero")
        if a > 0:
            return RationalFunctionQi(_stretch(self.num, a), _stretch(self.den, a))
        b = -a
        dn = poly_degree(self.num)
        dd = poly_degree(self.den)
        num = _stretch(tuple(reversed(self.num)), b)
        den = _stretch(tuple(reversed(self.den)), b)
        e = b * (dd - dn)
        if e >= 0:
            num = poly_shift(num, e)
        else:
            den = poly_shift(den, -e)
        return RationalFunctionQi(num, den)

    # -- numeric bridge ------------------------------------------------------

    def evaluate(self, s0):
        """Float evaluation at a complex point; errors near poles."""
        dv = poly_eval(self.den, s0)
        nv = poly_eval(self.num, s0)
        if abs(dv) <= 1e-13 * (1.0 + abs(nv)):
            raise PoleEvaluationError(
                f"evaluation at a pole: |denominator| = {abs(dv):.3e}", abs(dv)
            )
        return nv / dv

    # -- misc ----------------------------------------------------------------

    def num_degree(self):
        return poly_degree(self.num)

    def den_degree(self):
        return poly_degree(self.den)

    def __str__(self):
        ns = poly_str(self.num)
        if self.den == PONE:
            return ns
        ds = poly_str(self.den)
        if ("+" in ns[1:]) or ("-" in ns[1:]) or ("/" in ns) or ("*" in ns):
            ns = f"({ns})"
        return f"{ns}/({ds})"

    def __repr__(self):
        return f"<RationalFunctionQi {self}>"


def _stretch(a, k):
    """Replace s by s^k in a polynomial (k >= 1)."""
    if not a or k == 1:
        return a
    out = [_GR_ZERO] * ((len(a) - 1) * k + 1)
    for e, c in enumerate(a):
        if c:
            out[e * k] = c
    return tuple(out)


def _reduce(num, den):
    """Canonicalize: strip common s powers, divide by the gcd, then scale so
    the lowest nonzero denominator coefficient is 1."""
    if not num:
        return PZERO, PONE
    v = min(poly_valuation(num), poly_valuation(den))
    if v:
        num = tuple(num[v:])
        den = tuple(den[v:])
    dv = poly_valuation(den)
    if len(den) == dv + 1:
        # monomial denominator: nothing left to cancel but the constant
        c_inv = den[dv].inverse()
        num = poly_scale(num, c_inv)
        den = poly_monomial(dv)
    else:
        g = poly_gcd(num, den)
        if len(g) > 1:
            num, _ = poly_divmod(num, g)
            den, _ = poly_divmod(den, g)
        c_inv = den[poly_valuation(den)].inverse()
        if c_inv != _GR_ONE:
            num = poly_scale(num, c_inv)
            den = poly_scale(den, c_inv)
    return num, den


_RF_ZERO = RationalFunctionQi.__new__(RationalFunctionQi)
_RF_ZERO.num = PZERO
_RF_ZERO.den = PONE
_RF_ONE = RationalFunctionQi.__new__(RationalFunctionQi)
_RF_ONE.num = PONE
_RF_ONE.den = PONE
_RF_S = RationalFunctionQi.__new__(RationalFunctionQi)
_RF_S.num = (_GR_ZERO, _GR_ONE)
_RF_S.den = PONE


def _coerce_rf(x):
    if isinstance(x, RationalFunctionQi):
        return x
    if isinstance(x, (int, Fraction, GaussianRational)):
        return RationalFunctionQi.constant(x)
    return NotImplemented


# ---------------------------------------------------------------------------
# operation-style entry points


def rf_arith(a, b, kind):
    """Field arithmetic on rational functions: kind in {'add', 'mul', 'div'}."""
    if kind == "add":
        return a + b
    if kind == "mul":
        return a * b
    if kind == "div":
        if not b:
            raise RationalFunctionDivisionError("division by zero rational function")
        return a / b
    raise ValueError(f"unknown kind {kind!r}")


def rf_eval(f, s0):
    """Evaluate a rational function at a complex point."""
    return f.evaluate(complex(s0))
