"""The ordered-ring tower.

Base ring R is either the rationals or the polynomial ring Q[lam] ordered
lambda-adically (an element is positive iff its lowest-order nonzero
coefficient is positive; the ordering is non-Archimedean, 0 < n*lam < 1).
C = R(i) is the quadratic extension, FracScalar lives in the ordered quotient
field.  Everything is exact: coefficients are arbitrary-precision Fractions,
all values are canonicalized eagerly so equality and sign are cheap.
"""

from fractions import Fraction

from .errors import BadParams, DenominatorVanishesAtZero, MalformedScalar, NotInRing

RATIONAL = "rational"
DEFORMATION = "deformation"

_F0 = Fraction(0)
_F1 = Fraction(1)


def _combine_mode(a, b):
    return DEFORMATION if (a == DEFORMATION or b == DEFORMATION) else RATIONAL


# -- raw polynomial helpers (tuples of Fraction, no trailing zeros) --------

def _ptrim(cs):
    n = len(cs)
    while n and cs[n - 1] == 0:
        n -= 1
    return tuple(cs[:n])


def _padd(a, b):
    if not a:
        return b
    if not b:
        return a
    n = max(len(a), len(b))
    out = [(a[k] if k < len(a) else _F0) + (b[k] if k < len(b) else _F0) for k in range(n)]
    return _ptrim(out)


def _pneg(a):
    return tuple(-c for c in a)


def _psub(a, b):
    return _padd(a, _pneg(b))


def _pmul(a, b):
    if not a or not b:
        return ()
    out = [_F0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai == 0:
            continue
        for j, bj in enumerate(b):
            out[i + j] += ai * bj
    return _ptrim(out)


def _pscale(a, c):
    if c == 0:
        return ()
    return tuple(x * c for x in a)


def _pdivmod(a, b):
    assert b, "polynomial division by zero"
    q = [_F0] * max(len(a) - len(b) + 1, 0)
    r = list(a)
    db, lb = len(b) - 1, b[-1]
    while len(_ptrim(r)) - 1 >= db and r:
        r = list(_ptrim(r))
        if len(r) - 1 < db:
            break
        k = len(r) - 1 - db
        c = r[-1] / lb
        q[k] = c
        for j in range(len(b)):
            r[k + j] -= c * b[j]
        r = r[:-1]
    return _ptrim(q), _ptrim(r)


def _pgcd(a, b):
    while b:
        a, b = b, _pdivmod(a, b)[1]
    if not a:
        return ()
    return _pscale(a, 1 / a[-1])  # monic


def _pdiv_exact(a, b):
    q, r = _pdivmod(a, b)
    assert not r, "inexact polynomial division"
    return q


def _plcm(a, b):
    if not a or not b:
        return ()
    return _pmul(_pdiv_exact(a, _pgcd(a, b)), b)


class BaseElement:
    """Element of the ordered base ring (plain rational or polynomial in lam)."""

    __slots__ = ("coeffs", "mode", "_hash")

    def __init__(self, coeffs, mode):
        coeffs = _ptrim(tuple(Fraction(c) for c in coeffs))
        if mode == RATIONAL and len(coeffs) > 1:
            raise BadParams("rational-mode element with a lam coefficient")
        if mode not in (RATIONAL, DEFORMATION):
            raise BadParams("unknown ring mode %r" % (mode,))
        object.__setattr__(self, "coeffs", coeffs)
        object.__setattr__(self, "mode", mode)
        object.__setattr__(self, "_hash", None)

    def __setattr__(self, *a):
        raise AttributeError("BaseElement is immutable")

    # -- structure -----------------------------------------------------

    def is_zero(self):
        return not self.coeffs

    def is_one(self):
        return self.coeffs == (_F1,)

    def is_constant(self):
        return len(self.coeffs) <= 1

    def constant_value(self):
        return self.coeffs[0] if self.coeffs else _F0

    def sign(self):
        """Sign of the lowest-order nonzero coefficient; 0 iff zero."""
        for c in self.coeffs:
            if c != 0:
                return 1 if c > 0 else -1
        return 0

    def lambda_order(self):
        """Index of the lowest nonzero coefficient; None encodes +infinity."""
        for k, c in enumerate(self.coeffs):
            if c != 0:
                return k
        return None

    def classical_limit(self):
        """Evaluate lam -> 0 (the order-zero part), landing in the rationals."""
        return BaseElement(self.coeffs[:1], RATIONAL)

    # -- arithmetic ----------------------------------------------------

    def __add__(self, other):
        other = base(other, self.mode)
        return BaseElement(_padd(self.coeffs, other.coeffs), _combine_mode(self.mode, other.mode))

    __radd__ = __add__

    def __sub__(self, other):
        other = base(other, self.mode)
        return BaseElement(_psub(self.coeffs, other.coeffs), _combine_mode(self.mode, other.mode))

    def __rsub__(self, other):
        return base(other, self.mode).__sub__(self)

    def __mul__(self, other):
        other = base(other, self.mode)
        return BaseElement(_pmul(self.coeffs, other.coeffs), _combine_mode(self.mode, other.mode))

    __rmul__ = __mul__

    def __neg__(self):
        return BaseElement(_pneg(self.coeffs), self.mode)

    def __eq__(self, other):
        if not isinstance(other, BaseElement):
            try:
                other = base(other, self.mode)
            except (TypeError, ValueError, MalformedScalar):
                return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self):
        h = self._hash
        if h is None:
            h = hash(self.coeffs)
            object.__setattr__(self, "_hash", h)
        return h

    def __repr__(self):
        return "BaseElement(%s)" % (format_base(self),)


def base(x, mode=RATIONAL):
    """Promote an int, Fraction, 'p/q' string or coefficient list to a BaseElement."""
    if isinstance(x, BaseElement):
        return x
    if isinstance(x, (int, Fraction)):
        return BaseElement((Fraction(x),), mode)
    if isinstance(x, str):
        return BaseElement((parse_rational(x),), mode)
    if isinstance(x, (list, tuple)):
        return BaseElement(tuple(parse_rational(c) if isinstance(c, str) else Fraction(c) for c in x),
                           DEFORMATION)
    raise MalformedScalar("cannot promote %r to a ring element" % (x,))


LAM = BaseElement((0, 1), DEFORMATION)
ONE = BaseElement((1,), RATIONAL)
ZERO = BaseElement((), RATIONAL)


def parse_rational(s):
    """Parse a 'p/q' string with q > 0; '1/0' and garbage raise MalformedScalar."""
    try:
        f = Fraction(s)
    except (ValueError, ZeroDivisionError) as exc:
        raise MalformedScalar("bad rational %r" % (s,)) from exc
    return f


def format_rational(f):
    return "%d/%d" % (f.numerator, f.denominator) if f.denominator != 1 else str(f.numerator)


def format_base(b):
    if b.is_zero():
        return "0"
    if b.is_constant():
        return format_rational(b.coeffs[0])
    terms = []
    for k, c in enumerate(b.coeffs):
        if c == 0:
            continue
        if k == 0:
            terms.append(format_rational(c))
        else:
            mono = "lam" if k == 1 else "lam^%d" % k
            terms.append(mono if c == 1 else "%s*%s" % (format_rational(c), mono))
    return " + ".join(terms).replace("+ -", "- ")


class Scalar:
    """Element of C = R(i): a pair of BaseElements re + i*im."""

    __slots__ = ("re", "im", "_hash")

    def __init__(self, re, im=ZERO):
        re = base(re) if not isinstance(re, BaseElement) else re
        im = base(im) if not isinstance(im, BaseElement) else im
        object.__setattr__(self, "re", re)
        object.__setattr__(self, "im", im)
        object.__setattr__(self, "_hash", None)

    def __setattr__(self, *a):
        raise AttributeError("Scalar is immutable")

    @property
    def mode(self):
        return _combine_mode(self.re.mode, self.im.mode)

    def is_zero(self):
        return self.re.is_zero() and self.im.is_zero()

    def is_real(self):
        return self.im.is_zero()

    def conj(self):
        return Scalar(self.re, -self.im)

    def classical_limit(self):
        return Scalar(self.re.classical_limit(), self.im.classical_limit())

    def __add__(self, other):
        other = scalar(other)
        return Scalar(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __sub__(self, other):
        other = scalar(other)
        return Scalar(self.re - other.re, self.im - other.im)

    def __rsub__(self, other):
        return scalar(other).__sub__(self)

    def __mul__(self, other):
        other = scalar(other)
        return Scalar(self.re * other.re - self.im * other.im,
                      self.re * other.im + self.im * other.re)

    __rmul__ = __mul__

    def __neg__(self):
        return Scalar(-self.re, -self.im)

    def __eq__(self, other):
        if not isinstance(other, Scalar):
            try:
                other = scalar(other)
            except (TypeError, ValueError, MalformedScalar):
                return NotImplemented
        return self.re == other.re and self.im == other.im

    def __hash__(self):
        h = self._hash
        if h is None:
            h = hash((self.re, self.im))
            object.__setattr__(self, "_hash", h)
        return h

    def __repr__(self):
        if self.im.is_zero():
            return "Scalar(%s)" % format_base(self.re)
        return "Scalar(%s + i*(%s))" % (format_base(self.re), format_base(self.im))


def scalar(x, mode=RATIONAL):
    if isinstance(x, Scalar):
        return x
    if isinstance(x, FracScalar):
        return x.try_demote()
    return Scalar(base(x, mode))


I_SCALAR = Scalar(ZERO, ONE)


class FracScalar:
    """Element of the ordered quotient field C-hat: Scalar numerator over a
    positive BaseElement denominator, gcd-reduced with the denominator's
    lowest-order coefficient normalized to 1."""

    __slots__ = ("num", "den", "_hash")

    def __init__(self, num, den=ONE):
        num = scalar(num) if not isinstance(num, Scalar) else num
        den = base(den) if not isinstance(den, BaseElement) else den
        if den.is_zero():
            raise ZeroDivisionError("zero denominator")
        mode = _combine_mode(num.mode, den.mode)
        re, im, dn = num.re.coeffs, num.im.coeffs, den.coeffs
        if dn != (_F1,):
            g = _pgcd(_pgcd(re, im), dn)
            if g and g != (_F1,):
                re, im, dn = _pdiv_exact(re, g), _pdiv_exact(im, g), _pdiv_exact(dn, g)
            low = next(c for c in dn if c != 0)
            if low != 1:
                inv = 1 / low
                re, im, dn = _pscale(re, inv), _pscale(im, inv), _pscale(dn, inv)
        object.__setattr__(self, "num",
                           Scalar(BaseElement(re, mode), BaseElement(im, mode)))
        object.__setattr__(self, "den", BaseElement(dn, mode))
        object.__setattr__(self, "_hash", None)

    def __setattr__(self, *a):
        raise AttributeError("FracScalar is immutable")

    @property
    def mode(self):
        return _combine_mode(self.num.mode, self.den.mode)

    def is_zero(self):
        return self.num.is_zero()

    def is_one(self):
        return self.num.re.is_one() and self.num.im.is_zero() and self.den.is_one()

    def is_real(self):
        return self.num.im.is_zero()

    def sign(self):
        """Sign of a real fraction (the denominator is normalized positive)."""
        assert self.is_real(), "sign of a non-real scalar"
        return self.num.re.sign()

    def conj(self):
        return FracScalar(self.num.conj(), self.den)

    def try_demote(self):
        """Return the underlying Scalar when the reduced denominator is a unit."""
        if not self.den.is_constant():
            raise NotInRing("denominator %s is not a unit" % format_base(self.den))
        d = self.den.constant_value()
        inv = 1 / d
        return Scalar(BaseElement(_pscale(self.num.re.coeffs, inv), self.mode),
                      BaseElement(_pscale(self.num.im.coeffs, inv), self.mode))

    def classical_limit(self):
        """Evaluate lam -> 0; defined only when the denominator is a unit at 0."""
        d0 = self.den.coeffs[0] if self.den.coeffs else _F0
        if d0 == 0:
            raise DenominatorVanishesAtZero(
                "denominator %s vanishes at lam=0" % format_base(self.den))
        inv = 1 / d0
        re0 = self.num.re.coeffs[0] if self.num.re.coeffs else _F0
        im0 = self.num.im.coeffs[0] if self.num.im.coeffs else _F0
        return Scalar(BaseElement((re0 * inv,), RATIONAL), BaseElement((im0 * inv,), RATIONAL))

    def __add__(self, other):
        other = frac(other)
        if self.den.is_one() and other.den.is_one():
            return FracScalar(self.num + other.num)
        return FracScalar(self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __sub__(self, other):
        return self.__add__(frac(other).__neg__())

    def __rsub__(self, other):
        return frac(other).__sub__(self)

    def __mul__(self, other):
        other = frac(other)
        if self.den.is_one() and other.den.is_one():
            return FracScalar(self.num * other.num)
        return FracScalar(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def __neg__(self):
        return FracScalar(-self.num, self.den)

    def __truediv__(self, other):
        other = frac(other)
        if other.is_zero():
            raise ZeroDivisionError("division by zero scalar")
        # make the denominator real: multiply through by the conjugate numerator
        w = other.num.conj()
        nn = other.num * w
        assert nn.im.is_zero()
        return FracScalar(self.num * other.den * w, self.den * nn.re)

    def __rtruediv__(self, other):
        return frac(other).__truediv__(self)

    def inverse(self):
        return frac(1).__truediv__(self)

    def __eq__(self, other):
        if not isinstance(other, FracScalar):
            try:
                other = frac(other)
            except (TypeError, ValueError, MalformedScalar):
                return NotImplemented
        return self.num == other.num and self.den == other.den

    def __hash__(self):
        h = self._hash
        if h is None:
            h = hash((self.num, self.den))
            object.__setattr__(self, "_hash", h)
        return h

    def __repr__(self):
        if self.den.is_one():
            return "Frac(%s)" % (repr(self.num)[7:-1],)
        return "Frac((%s)/(%s))" % (repr(self.num)[7:-1], format_base(self.den))


def frac(x):
    """Promote anything scalar-like to the quotient field."""
    if isinstance(x, FracScalar):
        return x
    if isinstance(x, Scalar):
        return FracScalar(x)
    if isinstance(x, (int, Fraction, str, BaseElement)):
        return FracScalar(scalar(base(x)))
    raise MalformedScalar("cannot promote %r to the quotient field" % (x,))


F_ZERO = frac(0)
F_ONE = frac(1)
F_I = frac(I_SCALAR)
F_LAM = frac(LAM)


def sign(x):
    """Ordered-ring sign of a BaseElement or real FracScalar."""
    if isinstance(x, FracScalar):
        return x.sign()
    return base(x).sign()


def lambda_order(x):
    if isinstance(x, FracScalar):
        raise BadParams("lambda_order is defined on ring elements")
    return base(x).lambda_order()


def classical_limit_scalar(z):
    """Ring homomorphism lam -> 0 on Scalar or FracScalar values."""
    if isinstance(z, (Scalar, FracScalar, BaseElement)):
        return z.classical_limit()
    raise MalformedScalar("no classical limit for %r" % (z,))


def rational_sqrt(f):
    """Exact square root of a non-negative Fraction, or None."""
    f = Fraction(f)
    if f < 0:
        return None
    from math import isqrt
    rn, rd = isqrt(f.numerator), isqrt(f.denominator)
    if rn * rn == f.numerator and rd * rd == f.denominator:
        return Fraction(rn, rd)
    return None


# -- serialization (document format) ---------------------------------------

def base_to_doc(b):
    if b.is_constant():
        return format_rational(b.constant_value())
    return [format_rational(c) for c in b.coeffs]


def scalar_to_doc(s):
    if isinstance(s, FracScalar):
        s = s.try_demote()
    if s.im.is_zero():
        return base_to_doc(s.re)
    return {"re": base_to_doc(s.re), "im": base_to_doc(s.im)}


def base_from_doc(doc, mode):
    if isinstance(doc, (str, int)):
        return base(doc, mode)
    if isinstance(doc, list):
        if mode == RATIONAL and len(_ptrim(tuple(parse_rational(str(c)) for c in doc))) > 1:
            raise MalformedScalar("lam coefficients in a rational-mode document")
        return base(doc, mode) if len(doc) != 1 else base(doc[0], mode)
    raise MalformedScalar("bad ring element %r" % (doc,))


def scalar_from_doc(doc, mode):
    if isinstance(doc, dict):
        if set(doc) - {"re", "im"}:
            raise MalformedScalar("unknown keys in scalar %r" % (doc,))
        return Scalar(base_from_doc(doc.get("re", 0), mode), base_from_doc(doc.get("im", 0), mode))
    return Scalar(base_from_doc(doc, mode))


def frac_from_doc(doc, mode):
    return frac(scalar_from_doc(doc, mode))
