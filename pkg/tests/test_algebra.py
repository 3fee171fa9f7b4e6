"""Lie algebra kernel: brackets, coadjoint action, cocycles, extensions.

The independent oracle used throughout is the basis loop
    (ad*_x mu)_j = <mu, [x, e_j]>,
which only relies on `bracket` and `pairing`.
"""

import numpy as np
import pytest

from lieavg.algebra import (
    CentralExtension,
    LieAlgebra,
    averaging_cocycle,
    bracket,
    builtin_algebra,
    coadjoint,
    energy_norm,
    euler_rhs,
    extended_coadjoint,
    extended_euler_rhs,
    jacobi_residual,
    lie_poisson_rhs,
    load_algebra,
    pairing,
)
from lieavg.expr import parse

SO3 = builtin_algebra("so3")
SO3_DIAG = builtin_algebra("so3", inertia=[1.0, 2.0, 3.0])
H3 = builtin_algebra("heisenberg3")
SINE5 = builtin_algebra("sine_truncated", N=5)


def coadjoint_oracle(algebra, x, mu):
    """Brute-force ad*_x mu over the basis via the defining pairing."""
    n = algebra.n
    out = np.empty(n)
    for j in range(n):
        e_j = np.zeros(n)
        e_j[j] = 1.0
        out[j] = pairing(mu, bracket(algebra, x, e_j))
    return out


def basis(n, j):
    v = np.zeros(n)
    v[j] = 1.0
    return v


# ---------------------------------------------------------------------------
# bracket / pairing


def test_so3_bracket_is_cross_product():
    e1, e2, e3 = np.eye(3)
    assert np.array_equal(bracket(SO3, e1, e2), e3)
    assert np.array_equal(bracket(SO3, e2, e3), e1)
    assert np.array_equal(bracket(SO3, e3, e1), e2)
    rng = np.random.default_rng(7)
    for _ in range(20):
        x, y = rng.standard_normal((2, 3))
        assert np.allclose(bracket(SO3, x, y), np.cross(x, y), atol=1e-15)


def test_bracket_antisymmetry_on_diagonal():
    rng = np.random.default_rng(1)
    for algebra in (SO3, H3, SINE5):
        x = rng.standard_normal(algebra.n)
        assert np.allclose(bracket(algebra, x, x), np.zeros(algebra.n), atol=1e-13)


def test_heisenberg_relations():
    e1, e2, e3 = np.eye(3)
    assert np.array_equal(bracket(H3, e1, e2), e3)
    assert np.array_equal(bracket(H3, e1, e3), np.zeros(3))
    assert np.array_equal(bracket(H3, e2, e3), np.zeros(3))


def test_pairing_dual_basis():
    assert pairing(basis(3, 0), basis(3, 0)) == 1.0
    assert pairing(basis(3, 0), basis(3, 1)) == 0.0
    assert pairing([1, 2, 3], [4, 5, 6]) == 32.0


def test_dimension_mismatch_errors():
    with pytest.raises(ValueError):
        bracket(SO3, [1, 0], [0, 1, 0])
    with pytest.raises(ValueError):
        pairing([1, 0], [0, 1, 0])
    with pytest.raises(ValueError):
        coadjoint(SO3, [1, 0, 0, 0], [0, 1, 0])


# ---------------------------------------------------------------------------
# coadjoint action


def test_coadjoint_frozen_examples():
    # values frozen from the basis-loop oracle
    assert np.allclose(coadjoint(SO3, basis(3, 2), basis(3, 0)), [0, -1, 0])
    assert np.allclose(coadjoint(H3, basis(3, 0), [0, 0, 1]), [0, 1, 0])


def test_coadjoint_linearity_zero():
    assert np.array_equal(coadjoint(SO3, basis(3, 2), np.zeros(3)), np.zeros(3))


@pytest.mark.parametrize("algebra", [SO3, SO3_DIAG, H3, SINE5])
def test_coadjoint_matches_basis_loop_oracle(algebra):
    rng = np.random.default_rng(42)
    for _ in range(10):
        x = rng.standard_normal(algebra.n)
        mu = rng.standard_normal(algebra.n)
        assert np.allclose(
            coadjoint(algebra, x, mu), coadjoint_oracle(algebra, x, mu), atol=1e-12
        )


@pytest.mark.parametrize("algebra", [SO3, H3, SINE5])
def test_pairing_identity(algebra):
    rng = np.random.default_rng(3)
    for _ in range(20):
        x, y, mu = rng.standard_normal((3, algebra.n))
        lhs = pairing(coadjoint(algebra, x, mu), y)
        rhs = pairing(mu, bracket(algebra, x, y))
        assert abs(lhs - rhs) < 1e-12 * max(1.0, abs(rhs))


# ---------------------------------------------------------------------------
# Euler flow on the dual


def test_euler_rhs_principal_axis_equilibrium():
    assert np.allclose(euler_rhs(SO3_DIAG, [1, 0, 0]), np.zeros(3), atol=1e-15)


def test_euler_rhs_isotropic_top_degenerate():
    rng = np.random.default_rng(5)
    for _ in range(10):
        m = rng.standard_normal(3)
        assert np.allclose(euler_rhs(SO3, m), np.zeros(3), atol=1e-14)


def test_euler_rhs_heisenberg_hand_value():
    # hand evaluation: mdot = (m2*m3, -m1*m3, 0)
    assert np.allclose(euler_rhs(H3, [1, 1, 1]), [1, -1, 0], atol=1e-15)


@pytest.mark.parametrize("algebra", [SO3, SO3_DIAG, H3, SINE5])
def test_energy_is_first_integral(algebra):
    rng = np.random.default_rng(11)
    for _ in range(20):
        m = rng.standard_normal(algebra.n)
        drift = pairing(euler_rhs(algebra, m), algebra.inertia_inv @ m)
        assert abs(drift) < 1e-12


def test_lie_poisson_rhs_quadratic_matches_euler():
    h = parse("-0.5*(m1^2/1 + m2^2/2 + m3^2/3)")
    m = np.array([0.3, -0.2, 0.9])
    assert np.allclose(
        lie_poisson_rhs(SO3_DIAG, h, m), euler_rhs(SO3_DIAG, m), atol=1e-8
    )


def test_lie_poisson_rhs_constant_hamiltonian():
    assert np.allclose(
        lie_poisson_rhs(SO3, parse("7"), [0.3, 0.1, -0.5]), np.zeros(3), atol=1e-12
    )


def test_lie_poisson_rhs_linear_hamiltonian():
    m = np.array([0.4, -1.2, 0.7])
    expected = coadjoint(SO3, basis(3, 2), m)
    assert np.allclose(lie_poisson_rhs(SO3, parse("m3"), m), expected, atol=1e-9)


# ---------------------------------------------------------------------------
# averaging cocycle and central extension


def test_averaging_cocycle_so3_example():
    ext = averaging_cocycle(SO3, basis(3, 2))
    # w(e1, e2) = <ad*_e3 e1^*, e2> = -1, frozen from the basis-loop oracle
    assert abs(ext.W[0, 1] - (-1.0)) < 1e-15


def test_averaging_cocycle_zero_drift():
    ext = averaging_cocycle(SO3, np.zeros(3))
    assert np.array_equal(ext.W, np.zeros((3, 3)))


def test_cocycle_vanishes_on_diagonal():
    rng = np.random.default_rng(9)
    ext = averaging_cocycle(SO3, rng.standard_normal(3))
    for _ in range(10):
        x = rng.standard_normal(3)
        assert abs(x @ ext.W @ x) < 1e-12


def test_cocycle_and_coboundary_identities():
    rng = np.random.default_rng(13)
    for _ in range(100):
        v0 = rng.standard_normal(3)
        ext = averaging_cocycle(SO3, v0)
        assert CentralExtension.cocycle_residual_of(SO3, ext.W) < 1e-12
        x, y = rng.standard_normal((2, 3))
        w_xy = x @ ext.W @ y
        cob = -pairing(SO3.inertia @ v0, bracket(SO3, x, y))
        assert abs(w_xy - cob) < 1e-12


def test_cocycle_requires_ad_invariant_inertia():
    # diag(1,2,3) is not ad-invariant on so(3): W fails antisymmetry
    with pytest.raises(ValueError):
        averaging_cocycle(SO3_DIAG, basis(3, 2))


def test_extended_coadjoint_reduces_to_coadjoint():
    rng = np.random.default_rng(17)
    ext = averaging_cocycle(SO3, rng.standard_normal(3))
    x, mu = rng.standard_normal((2, 3))
    assert np.allclose(
        extended_coadjoint(ext, x, 0.0, mu), coadjoint(SO3, x, mu), atol=1e-15
    )


def test_extended_coadjoint_zero_x():
    ext = averaging_cocycle(SO3, basis(3, 2))
    assert np.allclose(
        extended_coadjoint(ext, np.zeros(3), 1.0, np.zeros(3)), np.zeros(3)
    )


def test_extended_coadjoint_cocycle_row():
    ext = averaging_cocycle(SO3, basis(3, 2))
    out = extended_coadjoint(ext, basis(3, 0), 1.0, np.zeros(3))
    assert np.allclose(out, [0, -1, 0], atol=1e-15)


def test_extended_euler_zero_momentum():
    ext = averaging_cocycle(SO3, basis(3, 2))
    assert np.array_equal(extended_euler_rhs(ext, np.zeros(3)), np.zeros(3))


def test_extended_euler_shifted_equilibrium():
    v0 = np.array([0.0, 0.0, -0.5])
    ext = averaging_cocycle(SO3, v0)
    assert np.allclose(extended_euler_rhs(ext, basis(3, 2)), np.zeros(3), atol=1e-15)


def test_extended_euler_zero_drift_reduces_to_euler():
    ext = averaging_cocycle(SO3, np.zeros(3))
    rng = np.random.default_rng(23)
    m = rng.standard_normal(3)
    assert np.allclose(extended_euler_rhs(ext, m), euler_rhs(SO3, m), atol=1e-15)


def test_extension_euler_equals_extended_coadjoint():
    # the two realizations of the extended flow must agree to round-off
    rng = np.random.default_rng(29)
    for _ in range(100):
        v0 = rng.standard_normal(3)
        ext = averaging_cocycle(SO3, v0)
        m = rng.standard_normal(3)
        direct = extended_euler_rhs(ext, m)
        via_coad = -extended_coadjoint(ext, SO3.inertia_inv @ m, 1.0, m)
        assert np.max(np.abs(direct - via_coad)) < 1e-12


# ---------------------------------------------------------------------------
# built-ins and the file loader


def test_builtin_jacobi_residuals():
    assert jacobi_residual(SO3) == 0.0
    assert jacobi_residual(H3) == 0.0
    assert jacobi_residual(SINE5) < 1e-12


def test_sine_truncated_dimensions_and_spot_value():
    assert SINE5.n == 24
    _, _, modes = _sine_modes(5)
    i, j = modes.index((1, 0)), modes.index((0, 1))
    k = modes.index((1, 1))
    expected = 5 / (2 * np.pi) * np.sin(2 * np.pi / 5)
    assert abs(SINE5.c[i, j, k] - expected) < 1e-15


def _sine_modes(N):
    half = (N - 1) // 2
    modes = [
        (a, b)
        for a in range(-half, half + 1)
        for b in range(-half, half + 1)
        if (a, b) != (0, 0)
    ]
    return half, N, modes


def test_sine_truncated_rejects_even_n():
    with pytest.raises(ValueError):
        builtin_algebra("sine_truncated", N=4)


def test_unknown_algebra_name():
    with pytest.raises(ValueError):
        builtin_algebra("su2")


def test_energy_norm_diag():
    assert energy_norm(SO3_DIAG, [0.0, 2.0, 0.0]) == pytest.approx(np.sqrt(2.0))


def test_load_algebra_round_trip(tmp_path):
    path = tmp_path / "so3.alg"
    lines = ["3  # dimension"]
    for i in range(3):
        for j in range(3):
            for k in range(3):
                if SO3.c[i, j, k] != 0.0 and i < j:
                    lines.append(f"{i} {j} {k} {SO3.c[i, j, k]}")
    lines.append("2 0 0")
    lines.append("0 1 0")
    lines.append("0 0 1")
    path.write_text("\n".join(lines) + "\n")
    loaded = load_algebra(path)
    assert np.array_equal(loaded.c, SO3.c)
    assert np.array_equal(loaded.inertia, np.diag([2.0, 1.0, 1.0]))


def test_load_algebra_malformed(tmp_path):
    path = tmp_path / "bad.alg"
    path.write_text("3\n0 1 2\n")  # truncated quadruple, no inertia
    with pytest.raises(ValueError):
        load_algebra(path)


def test_constructor_rejects_non_jacobi():
    c = np.zeros((2, 2, 2))
    c[0, 1, 0] = 1.0
    c[1, 0, 0] = -1.0
    c[0, 1, 1] = 0.5
    c[1, 0, 1] = -0.5
    # this IS a Lie algebra (solvable); now break antisymmetry instead
    LieAlgebra(2, c, np.eye(2))
    c_bad = c.copy()
    c_bad[1, 0, 0] = 1.0
    with pytest.raises(ValueError):
        LieAlgebra(2, c_bad, np.eye(2))
