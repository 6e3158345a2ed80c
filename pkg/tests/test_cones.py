import random
from fractions import Fraction

import pytest
from hypothesis import assume, given, settings, strategies as st

from novikov_cone.arith import Matrix, det
from novikov_cone.cones import (FormFamily, SimplicialBasis, TargetDirection,
                                admissibility_witness, check_xi_regular, dual_basis,
                                forms_from_dual, frame_checks, is_admissible,
                                lattice_point_in_semiopen, lattice_points_in_semiopen,
                                perturb, regular_family, subdivide_step,
                                unimodular_subcones_cover)
from novikov_cone.errors import (FirstCoordinateNonpositive, NonUnimodularFamily,
                                 RayIsLattice, RayOnWall)


# --- admissibility ----------------------------------------------------------

def test_admissible_examples():
    assert not is_admissible(FormFamily([[1], [-1]]))
    g = FormFamily([[1, 0], [0, 1]])
    w = admissibility_witness(g)
    assert w is not None and all(x < 0 for x in g.evaluate(w))
    assert is_admissible(FormFamily([[1, 1]]))


def test_inadmissible_pair_in_higher_rank():
    # xi and -xi on Z^3: the cone is a hyperplane
    assert not is_admissible(FormFamily([[1, 2, 3], [-1, -2, -3]]))


@settings(max_examples=80)
@given(st.lists(st.integers(-5, 5), min_size=2, max_size=3), st.data())
def test_forms_near_xi_are_admissible(xi, data):
    # every eta with |eta - xi| < |xi| is positive on xi, so -xi is a witness direction
    assume(any(xi))
    norm2 = sum(c * c for c in xi)
    m = data.draw(st.integers(1, 4))
    forms = []
    for _ in range(m):
        delta = data.draw(st.lists(st.integers(-2, 2), min_size=len(xi), max_size=len(xi)))
        eta = [3 * a + b for a, b in zip(xi, delta)]
        assume(sum((a - 3 * b) ** 2 for a, b in zip(eta, xi)) < 9 * norm2)
        forms.append(eta)
    assert is_admissible(FormFamily(forms))


@settings(max_examples=80)
@given(st.lists(st.lists(st.integers(-4, 4), min_size=2, max_size=2), min_size=1, max_size=4))
def test_admissibility_witness_is_genuine(rows):
    g = FormFamily(rows)
    w = admissibility_witness(g)
    if w is not None:
        assert all(x < 0 for x in g.evaluate(w))
    else:
        # brute-force oracle on a box: no strictly negative point exists there either
        box = range(-6, 7)
        assert not any(all(x < 0 for x in g.evaluate((a, b))) for a in box for b in box)


# --- regularity and duals -----------------------------------------------------

def test_check_xi_regular_examples():
    assert check_xi_regular(FormFamily([[1, 0], [0, 1]]), (3, 2))
    assert not check_xi_regular(FormFamily([[1, 0], [0, -1]]), (3, 2))
    assert not check_xi_regular(FormFamily([[1, 1], [1, 2]]), (3, 2))


def test_dual_basis_examples():
    assert dual_basis(FormFamily([[-1, 0], [0, -1]])).vectors == ((1, 0), (0, 1))
    assert dual_basis(FormFamily([[-1, 0], [-1, -1]])).vectors == ((1, -1), (0, 1))
    with pytest.raises(NonUnimodularFamily):
        dual_basis(FormFamily([[-2, 0], [0, -1]]))


# --- parallelotopes and subdivision -------------------------------------------

def test_lattice_point_examples():
    assert lattice_point_in_semiopen(SimplicialBasis([(1, 0), (0, 1)])) is None
    assert lattice_point_in_semiopen(SimplicialBasis([(2, 0), (0, 1)])) == (1, 0)
    b = SimplicialBasis([(2, 1), (1, 2)])
    q = lattice_point_in_semiopen(b)
    assert q == (1, 1)
    assert b.coordinates(q) == (Fraction(1, 3), Fraction(1, 3))


@settings(max_examples=60)
@given(st.lists(st.lists(st.integers(-4, 4), min_size=3, max_size=3), min_size=3, max_size=3))
def test_semiopen_points_count(vecs):
    d = det(Matrix.from_columns(vecs, 3))
    assume(d != 0 and abs(d) <= 30)
    b = SimplicialBasis(vecs)
    pts = list(lattice_points_in_semiopen(b))
    assert len(pts) == abs(d) - 1
    assert len({q for q, _ in pts}) == len(pts)
    for q, beta in pts:
        assert all(0 <= x < 1 for x in beta)
        assert b.coordinates(q) == beta


def test_subdivide_step_examples():
    b = SimplicialBasis([(2, 1), (1, 2)])
    j, child = subdivide_step(b, (1, 1), (3, 2))
    assert child.vectors == ((2, 1), (1, 1))
    _, child = subdivide_step(SimplicialBasis([(2, 0), (0, 1)]), (1, 0), (1, 1))
    assert child.vectors == ((1, 0), (0, 1))
    with pytest.raises(RayOnWall):
        subdivide_step(b, (1, 1), (1, 1))


def test_union_of_children_covers_parent():
    rng = random.Random(11)
    checked = 0
    while checked < 12:
        vecs = [tuple(rng.randint(0, 4) for _ in range(2)) for _ in range(2)]
        try:
            b = SimplicialBasis(vecs)
        except Exception:
            continue
        if not 1 < abs(b.det()) <= 6:
            continue
        for q, _ in lattice_points_in_semiopen(b):
            assert unimodular_subcones_cover(b, q)
        checked += 1
    b3 = SimplicialBasis([(1, 0, 0), (0, 1, 0), (1, 1, 2)])
    for q, _ in lattice_points_in_semiopen(b3):
        assert unimodular_subcones_cover(b3, q, max_den=6)


# --- regular families ----------------------------------------------------------

def test_regular_family_dimension_one():
    basis, trace = regular_family(TargetDirection((5,), Fraction(1, 2)))
    assert basis.vectors == ((1,),)
    assert basis.coordinates((5,)) == (5,)


def test_regular_family_fibonacci():
    target = TargetDirection((610, 987), Fraction(1, 1000))
    basis, trace = regular_family(target)
    assert all(frame_checks(basis, target).values())
    assert trace.is_strictly_decreasing() and trace.dets()[-1] == 1


def test_regular_family_lattice_ray():
    with pytest.raises(RayIsLattice):
        regular_family(TargetDirection((1, 1), Fraction(1, 100)))


def test_first_coordinate_must_be_positive():
    with pytest.raises(FirstCoordinateNonpositive):
        TargetDirection((0, 1), Fraction(1, 10))


def test_perturb_escapes_lattice_ray():
    target = TargetDirection(perturb((1, 1)), Fraction(1, 100))
    basis, _ = regular_family(target)
    assert all(frame_checks(basis, target).values())


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 4).flatmap(lambda k: st.lists(
    st.fractions(min_value=Fraction(1, 50), max_value=50, max_denominator=300),
    min_size=k, max_size=k)), st.sampled_from([Fraction(1, 10), Fraction(1, 100)]))
def test_regular_family_properties(v, tol):
    target = TargetDirection(v, tol)
    try:
        basis, trace = regular_family(target)
    except (RayIsLattice, RayOnWall):
        return
    assert all(frame_checks(basis, target).values())
    assert trace.is_strictly_decreasing() and trace.dets()[-1] == 1
    # every step keeps v strictly inside the current cone
    for step in trace.steps:
        assert all(c > 0 for c in step.basis.coordinates(target.v))
    # the forms dual to the frame are regular for the form x -> -<v, x>, whose
    # coordinates <v, u_j> are positive because every u_j is close to v
    forms = forms_from_dual(basis)
    assert dual_basis(forms) == basis
    assert check_xi_regular(forms, [-c for c in target.v])
