import numpy as np
import pytest

from wickpt.lattice import (
    MirrorProfile,
    OperatorMatrix,
    QuarticDoubleWell,
    SquireWell,
    assemble_hamiltonian,
    build_grid,
    default_grid,
    evaluate_potential,
    load_mirror_csv,
    potential_from_mirror,
)


def test_grid_spacing_and_points():
    g = build_grid(-1.0, 1.0, 9)
    assert g.h == pytest.approx(0.2)
    assert g.x[0] == pytest.approx(-0.8) and g.x[-1] == pytest.approx(0.8)
    assert g.is_symmetric


@pytest.mark.parametrize("args", [(0.0, 0.0, 10), (1.0, 0.0, 10), (0.0, np.inf, 10), (0.0, 1.0, 2)])
def test_grid_rejects_bad_input(args):
    with pytest.raises(ValueError):
        build_grid(*args)


def test_integrate_matches_analytic():
    g = build_grid(0.0, np.pi, 2000)
    assert g.integrate(np.sin(g.x)).real == pytest.approx(2.0, rel=1e-6)


def test_squire_potential_requires_wall_grid():
    s = SquireWell(6.0, 0.05)
    v = evaluate_potential(s, default_grid(s, 50))
    assert np.allclose(v.real, 0)
    with pytest.raises(ValueError):
        evaluate_potential(s, build_grid(-7, 7, 50))


def test_double_well_minima():
    s = QuarticDoubleWell(7e-6, 10.0)
    g = build_grid(-20, 20, 4001)
    v = evaluate_potential(s, g).real
    assert abs(abs(g.x[np.argmin(v)]) - 10.0) < 2 * g.h


def test_mirror_potential_from_reflectance():
    v = potential_from_mirror(np.array([1.0, np.exp(-2.0)]), np.array([0.0, 0.5]))
    assert np.allclose(v, [0.0, 1.0 - 0.5j])
    with pytest.raises(ValueError):
        MirrorProfile(np.array([0.5, 1.5]))


def test_hamiltonian_matches_dense_stencil():
    g = build_grid(-1, 1, 6)
    s = QuarticDoubleWell(0.3, 0.5, 0.2)
    op = assemble_hamiltonian(s, g, g0=0.1)
    h = g.h
    lap = (np.diag(-2 * np.ones(6)) + np.diag(np.ones(5), 1) + np.diag(np.ones(5), -1)) / h**2
    expect = -lap + np.diag(evaluate_potential(s, g)) - 0.1 * np.eye(6)
    assert np.allclose(op.dense(), expect)
    assert op.is_complex_symmetric
    v = np.arange(6) + 1j
    assert np.allclose(op.matvec(v), expect @ v)
    assert np.allclose(op.adjoint().dense(), expect.conj().T)


def test_from_dense_roundtrip():
    a = np.diag([1.0, 2, 3]) + np.diag([0.5, 0.5], 1) + np.diag([0.1, 0.2], -1)
    assert np.allclose(OperatorMatrix.from_dense(a).dense(), a)


def test_load_mirror_csv(tmp_path):
    x = np.linspace(-2, 2, 21)
    path = tmp_path / "m.csv"
    rows = "\n".join(f"{a},{np.exp(-a * a)},{0.1 * a}" for a in x)
    path.write_text("x,R,delta\n" + rows + "\n")
    grid, mirror = load_mirror_csv(path)
    assert grid.n == 21 and np.allclose(grid.x, x)
    assert np.allclose(mirror.R, np.exp(-x * x))
    path.write_text("0,1\n1,1\n3,1\n")
    with pytest.raises(ValueError):
        load_mirror_csv(path)
