"""Shared strategies and independent oracles for the test suite."""

import random
from fractions import Fraction

from hypothesis import strategies as st

from starmorita.rings import (
    DEFORMATION,
    RATIONAL,
    BaseElement,
    FracScalar,
    Scalar,
    base,
    frac,
)

small_fractions = st.fractions(
    min_value=Fraction(-6), max_value=Fraction(6), max_denominator=6
)


@st.composite
def base_elements(draw, mode=None, max_degree=3):
    m = draw(st.sampled_from([RATIONAL, DEFORMATION])) if mode is None else mode
    if m == RATIONAL:
        return BaseElement((draw(small_fractions),), RATIONAL)
    coeffs = draw(st.lists(small_fractions, min_size=0, max_size=max_degree + 1))
    return BaseElement(tuple(coeffs), DEFORMATION)


@st.composite
def scalars(draw, mode=None):
    m = draw(st.sampled_from([RATIONAL, DEFORMATION])) if mode is None else mode
    return Scalar(draw(base_elements(mode=m)), draw(base_elements(mode=m)))


@st.composite
def frac_scalars(draw, mode=None):
    m = draw(st.sampled_from([RATIONAL, DEFORMATION])) if mode is None else mode
    num = draw(scalars(mode=m))
    den = draw(base_elements(mode=m).filter(lambda b: not b.is_zero()))
    return FracScalar(num, den)


# -- independent polynomial oracle (dict of exponent -> Fraction) ----------

def dict_poly(b):
    return {k: c for k, c in enumerate(b.coeffs) if c != 0}


def dict_mul(a, b):
    out = {}
    for i, ai in a.items():
        for j, bj in b.items():
            out[i + j] = out.get(i + j, Fraction(0)) + ai * bj
    return {k: v for k, v in out.items() if v != 0}


def dict_add(a, b):
    out = dict(a)
    for j, bj in b.items():
        out[j] = out.get(j, Fraction(0)) + bj
    return {k: v for k, v in out.items() if v != 0}


def dict_sign(d):
    if not d:
        return 0
    low = min(d)
    return 1 if d[low] > 0 else -1


def random_rational(rng, span=8):
    return Fraction(rng.randint(-span, span), rng.randint(1, span))


def random_base(rng, mode, max_degree=2, span=6):
    if mode == RATIONAL:
        return base(random_rational(rng, span))
    deg = rng.randint(0, max_degree)
    return BaseElement(tuple(random_rational(rng, span) for _ in range(deg + 1)), DEFORMATION)


def random_frac(rng, mode, max_degree=1, span=4):
    num = Scalar(random_base(rng, mode, max_degree, span), random_base(rng, mode, max_degree, span))
    return FracScalar(num)


def random_vector(rng, n, mode=RATIONAL, span=5):
    return tuple(random_frac(rng, mode, max_degree=0, span=span) for _ in range(n))


def rng_for(name):
    return random.Random(name if isinstance(name, int) else hash(name) % (2**32))
