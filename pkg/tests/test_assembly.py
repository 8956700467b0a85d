import math

import numpy as np
import pytest

from bruteforce import LagrangeBasis, load_bf, nonlocal_entry_bf, nonlocal_matrix_bf
from fracfem.assembly import (
    ProblemSpec,
    assemble_laplacian,
    assemble_load,
    assemble_nonlocal,
    assemble_recon_mass,
    assemble_system,
)
from fracfem.errors import InvalidArgumentError, UnsupportedExpressionError
from fracfem.expr import parse_function_expr
from fracfem.fraccalc import boundary_vector
from fracfem.mesh import FESpace, Mesh, make_uniform_mesh

NODES6 = [0.0, 0.1, 0.3, 0.45, 0.7, 0.85, 1.0]
NODES4 = [0.0, 0.2, 0.55, 0.8, 1.0]


def _scale(B):
    return np.abs(B).max()


def test_nonlocal_p1_against_brute_force():
    q = parse_function_expr("1 + x")
    bf = nonlocal_matrix_bf(LagrangeBasis(NODES6, 1), q, 1.45)
    B = assemble_nonlocal(FESpace(Mesh(NODES6), 1), q, 1.45)
    np.testing.assert_allclose(B, bf, atol=1e-9 * _scale(bf))


def test_nonlocal_p2_against_brute_force():
    q = parse_function_expr("x")
    bf = nonlocal_matrix_bf(LagrangeBasis(NODES4, 2), q, 1.8)
    B = assemble_nonlocal(FESpace(Mesh(NODES4), 2), q, 1.8)
    np.testing.assert_allclose(B, bf, atol=1e-9 * _scale(bf))


@pytest.mark.parametrize("degree,alpha", [(1, 1.05), (2, 1.55), (1, 1.95)])
def test_nonlocal_entries_on_a_finer_mesh(degree, alpha):
    # a sample of entries on n = 16, including far-field pairs
    n = 16
    q = parse_function_expr("2 - x^2")
    basis = LagrangeBasis(np.arange(n + 1) / n, degree)
    B = assemble_nonlocal(FESpace(make_uniform_mesh(n), degree), q, alpha, method="general")
    N = B.shape[0]
    pairs = [(0, 0), (N - 1, 0), (N - 1, N - 1), (N // 2, N // 2 - 1), (N // 2, N // 2 + 1), (N - 2, 3)]
    for j, i in pairs:
        assert B[j, i] == pytest.approx(nonlocal_entry_bf(basis, q, alpha, j, i), abs=1e-9 * _scale(B))


@pytest.mark.parametrize("degree", [1, 2])
@pytest.mark.parametrize("q", ["1", "x", "3 - 2*x + x^3"])
def test_lattice_assembly_matches_general(degree, q):
    space = FESpace(make_uniform_mesh(24), degree)
    G = assemble_nonlocal(space, q, 1.35, method="general")
    L = assemble_nonlocal(space, q, 1.35, method="lattice")
    np.testing.assert_allclose(L, G, atol=1e-12 * _scale(G))


def test_lattice_needs_uniform_mesh():
    with pytest.raises(InvalidArgumentError):
        assemble_nonlocal(FESpace(Mesh(NODES4), 1), "1", 1.5, method="lattice")
    with pytest.raises(InvalidArgumentError):
        assemble_nonlocal(FESpace(Mesh(NODES4), 1), "1", 1.5, method="bogus")


@pytest.mark.parametrize("degree", [1, 2])
@pytest.mark.parametrize("f", ["x*(1-x)", "(1-x)^(3/5)", "step(0,0.5)", "x^(-0.45)", "x^0.3*step(0.25,0.6)"])
def test_load_against_adaptive_quadrature(degree, f):
    fe = parse_function_expr(f)
    nodes = NODES6
    kinks = fe.breakpoints
    ref = load_bf(LagrangeBasis(nodes, degree), fe, kinks)
    got = assemble_load(FESpace(Mesh(nodes), degree), fe)
    np.testing.assert_allclose(got, ref, rtol=1e-10, atol=1e-13)


@pytest.mark.parametrize("degree", [1, 2])
def test_boundary_vector_against_brute_force(degree):
    basis = LagrangeBasis(NODES6, degree)
    g = boundary_vector(FESpace(Mesh(NODES6), degree), 1.65)
    ref = [basis.frac_deriv(i, 1.65, 1.0) for i in range(basis.N)]
    np.testing.assert_allclose(g, ref, rtol=1e-10, atol=1e-13)


def test_laplacian_is_spd_and_annihilates_nothing():
    for degree in (1, 2):
        L = assemble_laplacian(FESpace(Mesh(NODES6), degree))
        np.testing.assert_allclose(L, L.T, atol=1e-14)
        assert np.linalg.eigvalsh(L).min() > 0


def test_p1_laplacian_on_uniform_mesh():
    L = assemble_laplacian(FESpace(make_uniform_mesh(4), 1))
    np.testing.assert_allclose(L, 4 * np.array([[2, -1, 0], [-1, 2, -1], [0, -1, 2]]))


def test_system_reduces_to_laplacian_for_zero_potential_and_poisson_mu():
    space = FESpace(make_uniform_mesh(16), 2)
    sys = assemble_system(ProblemSpec(1.7, "alpha-1", 0.0, "1"), space)
    assert np.array_equal(sys.A, sys.L)
    assert not np.any(sys.B)


def test_system_parts_add_up():
    space = FESpace(Mesh(NODES6), 1)
    prob = ProblemSpec(1.5, 3.0, "x", "1")
    sys = assemble_system(prob, space)
    np.testing.assert_allclose(sys.A, sys.L + sys.B + np.outer(sys.r, sys.g), atol=1e-15)
    np.testing.assert_allclose(sys.r, assemble_load(space, prob.p), atol=1e-15)
    lean = assemble_system(prob, space, lean=True)
    np.testing.assert_allclose(lean.A, sys.A, atol=1e-14)
    assert lean.L is None and lean.B is None


def test_recon_mass_definition():
    space = FESpace(Mesh(NODES6), 2)
    M = assemble_recon_mass(space, 1.5, 2.0)
    B1 = assemble_nonlocal(space, 1.0, 1.5)
    m = assemble_load(space, "x^2")
    np.testing.assert_allclose(M, B1 - np.outer(m, boundary_vector(space, 1.5)), atol=1e-15)


def test_problem_spec_validation():
    p = ProblemSpec(1.75, "alpha-1")
    assert p.mu == 0.75 and p.mu_is_alpha_minus_one and p.c0 == 0.0
    assert ProblemSpec(1.75, 0.75).mu_is_alpha_minus_one
    for bad in [(1.5, 1.0), (1.5, "alpha+1"), (2.5, 3.0), (1.5, float("inf"))]:
        with pytest.raises(InvalidArgumentError):
            ProblemSpec(*bad)
    with pytest.raises(UnsupportedExpressionError):
        ProblemSpec(1.5, 3.0, q="x^0.5")


def test_p_expression():
    prob = ProblemSpec(1.5, 3.0, "x")
    c0 = math.gamma(4) / math.gamma(2.5)
    assert prob.c0 == pytest.approx(c0, rel=1e-15)
    x = np.array([0.2, 0.9])
    np.testing.assert_allclose(prob.p(x), c0 * x**1.5 - x**4, rtol=1e-14)
