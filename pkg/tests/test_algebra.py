"""Star algebras: validation, builtins, functional and element positivity."""

import random

import pytest

from conftest import random_frac
from starmorita.algebra import (
    ApproxIdentityWitness,
    LinearFunctional,
    StarAlgebra,
    builtin_algebra,
    classical_limit_functional,
    conjugated_functional,
    deformation_container,
    density_functional,
    direct_sum_algebra,
    element_positivity,
    functional,
    functional_positivity,
    grassmann_algebra,
    identity_structure,
    matrix_algebra,
    nilpotent_normal_scan,
    scalars_algebra,
    tensor_functional,
    tensor_product,
    trace_functional,
    validate_algebra,
    vector_state,
    verify_square_witnesses,
    zero_functional,
)
from starmorita.errors import BadParams, InvalidWitness, NotHermitian
from starmorita.linalg import Matrix, psd_decide, v_add, v_scale, v_zero
from starmorita.rings import DEFORMATION, F_LAM, F_ONE, F_ZERO, RATIONAL, frac


def test_matrix_algebra_valid():
    m2 = matrix_algebra(2)
    assert m2.dim == 4
    assert validate_algebra(m2).ok
    # unit = E11 + E22
    assert m2.unit == (F_ONE, F_ZERO, F_ZERO, F_ONE)


def test_grassmann_valid():
    g2 = grassmann_algebra(2)
    assert g2.dim == 4
    assert validate_algebra(g2).ok
    g1 = grassmann_algebra(1)
    assert g1.dim == 2
    e = g1.basis_vec(1)
    assert g1.mul_vec(e, e) == g1.zero_vec()       # e ^ e = 0
    assert g1.star_vec(e) == e
    assert g1.unit == g1.basis_vec(0)


def test_mutated_multiplication_reports_triple():
    m2 = matrix_algebra(2)
    mul = [list(row) for row in m2.mul]
    bad = list(mul[0][0])
    bad[3] = bad[3] + F_ONE
    mul[0][0] = tuple(bad)
    broken = StarAlgebra(4, mul, m2.star)
    report = validate_algebra(broken)
    assert not report.ok
    assert report.associativity_failures


def test_scalars():
    c = scalars_algebra()
    assert c.dim == 1
    assert validate_algebra(c).ok


def test_bad_params():
    with pytest.raises(BadParams):
        matrix_algebra(0)
    with pytest.raises(BadParams):
        builtin_algebra("nope")


def test_tensor_products():
    m2 = matrix_algebra(2)
    c = scalars_algebra()
    t = tensor_product(m2, c)
    # basis relabeling: structure constants agree with matrix(2) on the nose
    assert t.mul == m2.mul and t.star == m2.star
    t2 = tensor_product(m2, m2)
    assert t2.dim == 16
    assert validate_algebra(t2).ok
    assert t2.matrix_size == 4
    g1 = grassmann_algebra(1)
    t3 = tensor_product(g1, g1)
    assert t3.dim == 4
    assert validate_algebra(t3).ok


def test_direct_sum_algebra():
    m2, c = matrix_algebra(2), scalars_algebra()
    d = direct_sum_algebra(m2, c)
    assert d.dim == 5
    assert validate_algebra(d).ok
    assert d.unit is not None


def test_functional_positivity_trace():
    m2 = matrix_algebra(2)
    tr = trace_functional(m2)
    cert = functional_positivity(m2, tr)
    assert cert.positive


def test_functional_positivity_grassmann_counterexample():
    g1 = grassmann_algebra(1)
    om = functional(g1, [1, 1])        # omega(1) = omega(e) = 1
    cert = functional_positivity(g1, om)
    assert not cert.positive
    assert cert.gram == Matrix([[1, 1], [1, 0]])
    assert cert.witness is not None and cert.witness_value.sign() == -1


def test_zero_functional_positive():
    for a in (matrix_algebra(2), grassmann_algebra(2)):
        assert functional_positivity(a, zero_functional(a)).positive


def test_density_functional():
    m2 = matrix_algebra(2)
    om = density_functional(m2, Matrix.diag([1, 0]))
    assert om(m2.basis_vec(0)) == frac(1)      # omega(E11) = 1
    assert om(m2.basis_vec(3)) == frac(0)      # omega(E22) = 0
    flip = density_functional(m2, Matrix([[0, 1], [1, 0]]))
    assert not functional_positivity(m2, flip).positive
    ident = density_functional(m2, Matrix.identity(2))
    assert ident.values == trace_functional(m2).values
    assert functional_positivity(m2, ident).positive


def test_element_positivity_matrix_kind():
    m2 = matrix_algebra(2)
    v = element_positivity(m2, m2.basis_vec(0))      # E11
    assert v.status == "PositiveCertified"
    a = v_add(m2.basis_vec(1), m2.basis_vec(2))      # E12 + E21
    v = element_positivity(m2, a)
    assert v.status == "NegativeCertified"
    assert functional_positivity(m2, v.functional).positive
    assert v.value.sign() == -1
    with pytest.raises(NotHermitian):
        element_positivity(m2, m2.basis_vec(1))


def test_element_positivity_unknown_and_witnesses():
    g1 = grassmann_algebra(1)
    e = g1.basis_vec(1)
    assert element_positivity(g1, e).status == "Unknown"
    # sum-of-squares witness: 1 = 1 * (1)*(1)
    one = g1.basis_vec(0)
    v = element_positivity(g1, one, witnesses=[(1, one)])
    assert v.status == "AlgebraicallyPositiveCertified"
    with pytest.raises(InvalidWitness):
        element_positivity(g1, e, witnesses=[(1, one)])


def test_square_witness_replay():
    m2 = matrix_algebra(2)
    x = m2.basis_vec(0)
    witnesses = [(frac(1), m2.basis_vec(0))]
    assert verify_square_witnesses(m2, x, witnesses)     # E11* E11 = E11


def test_nilpotent_normal_scan():
    g1 = grassmann_algebra(1)
    cert = nilpotent_normal_scan(g1)
    assert cert is not None
    assert cert.element == g1.basis_vec(1) and cert.exponent == 2
    assert cert.verify(g1)
    assert nilpotent_normal_scan(matrix_algebra(2)) is None
    assert nilpotent_normal_scan(scalars_algebra()) is None
    for n in (2, 3):
        cert = nilpotent_normal_scan(grassmann_algebra(n))
        assert cert is not None and cert.element == grassmann_algebra(n).basis_vec(1)


def test_identity_structure():
    m2 = matrix_algebra(2)
    rep = identity_structure(m2)
    assert rep.has_unit and rep.unit == m2.unit
    g2 = grassmann_algebra(2)
    assert identity_structure(g2).has_unit
    # strictly upper triangular 2x2: dim 1, e^2 = 0, e* = e fails star... use e* = e variant
    nil = StarAlgebra(1, [[ (F_ZERO,) ]], [ (F_ONE,) ])
    assert validate_algebra(nil).ok
    rep = identity_structure(nil)
    assert not rep.has_unit and rep.witness_valid is None
    with pytest.raises(InvalidWitness):
        identity_structure(nil, ApproxIdentityWitness(((F_ONE,),), ((0,),)))


def test_approx_identity_witness_valid():
    m2 = matrix_algebra(2)
    w = ApproxIdentityWitness((m2.unit,), ((0, 1, 2, 3),))
    rep = identity_structure(m2, w)
    assert rep.witness_valid


def _deformed_matrix2():
    m2 = matrix_algebra(2)
    mul = [[tuple(frac(x.num) for x in v) for v in row] for row in m2.mul]
    return StarAlgebra(4, m2.mul, m2.star, kind="matrix", matrix_size=2,
                       unit=m2.unit, psd_rep=m2.psd_rep)


def test_deformation_container_constant_lift():
    a0 = deformation_container(_deformed_matrix2())
    assert a0.mul == matrix_algebra(2).mul
    assert validate_algebra(a0).ok


def test_deformation_container_grassmann_limit():
    # dim-2 deformed algebra {1, e} with e.e = lam*1 contracts to grassmann(1)
    one, e = (F_ONE, F_ZERO), (F_ZERO, F_ONE)
    mul = [[one, e], [e, (F_LAM, F_ZERO)]]
    star = [one, e]
    a_def = StarAlgebra(2, mul, star, unit=one)
    assert validate_algebra(a_def).ok
    a0 = deformation_container(a_def)
    g1 = grassmann_algebra(1)
    assert a0.mul == g1.mul and a0.star == g1.star


def test_classical_limit_of_positive_functional_is_positive():
    one, e = (F_ONE, F_ZERO), (F_ZERO, F_ONE)
    mul = [[one, e], [e, (F_LAM, F_ZERO)]]
    a_def = StarAlgebra(2, mul, [one, e], unit=one)
    # omega(1) = 1, omega(e) = lam is positive for the deformed product:
    # Gram = [[1, lam], [lam, lam]] and lam - lam^2 > 0 lambda-adically
    om = functional(a_def, [F_ONE, F_LAM])
    assert functional_positivity(a_def, om).positive
    a0 = deformation_container(a_def)
    om0 = classical_limit_functional(a0, om)
    assert functional_positivity(a0, om0).positive


def test_positive_functional_is_real_on_unital():
    rng = random.Random(5)
    m2 = matrix_algebra(2)
    for _ in range(10):
        raw = Matrix([[random_frac(rng, RATIONAL, 0, 3) for _ in range(2)] for _ in range(2)])
        rho = raw.adjoint() * raw
        om = density_functional(m2, rho)
        assert functional_positivity(m2, om).positive
        for _ in range(5):
            x = tuple(random_frac(rng, RATIONAL, 0, 3) for _ in range(4))
            assert om(m2.star_vec(x)) == om(x).conj()


def test_functional_cauchy_schwarz():
    rng = random.Random(6)
    m2 = matrix_algebra(2)
    raw = Matrix([[random_frac(rng, RATIONAL, 0, 3) for _ in range(2)] for _ in range(2)])
    om = density_functional(m2, raw.adjoint() * raw)
    for _ in range(20):
        x = tuple(random_frac(rng, RATIONAL, 0, 2) for _ in range(4))
        y = tuple(random_frac(rng, RATIONAL, 0, 2) for _ in range(4))
        xy = om(m2.mul_vec(m2.star_vec(x), y))
        xx = om(m2.mul_vec(m2.star_vec(x), x))
        yy = om(m2.mul_vec(m2.star_vec(y), y))
        gap = xx * yy - xy * xy.conj()
        assert gap.is_real() and gap.sign() >= 0


def test_tensor_functional_positivity():
    m2 = matrix_algebra(2)
    t = tensor_product(m2, m2)
    om1 = density_functional(m2, Matrix.diag([1, 2]))
    om2 = trace_functional(m2)
    om = tensor_functional(t, om1, om2)
    assert functional_positivity(t, om).positive


def test_conjugated_functional_positive():
    rng = random.Random(8)
    m2 = matrix_algebra(2)
    om = trace_functional(m2)
    for _ in range(5):
        c = tuple(random_frac(rng, RATIONAL, 0, 3) for _ in range(4))
        oc = conjugated_functional(m2, om, c)
        assert functional_positivity(m2, oc).positive


def test_vector_state():
    m2 = matrix_algebra(2)
    om = vector_state(m2, (frac(1), frac(-1)))
    assert functional_positivity(m2, om).positive
    a = v_add(m2.basis_vec(1), m2.basis_vec(2))    # E12 + E21
    assert om(a) == frac(-2)
