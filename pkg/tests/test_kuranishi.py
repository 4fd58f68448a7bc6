import numpy as np
import pytest
from hypothesis import given, strategies as st

from swtori.kuranishi import (
    I,
    J,
    ONE,
    FixedType,
    Quaternion,
    TauTooLarge,
    admissible_L,
    build_model,
    count_solution_circles,
    domination_constant,
    equivariance_residuals,
    left_matrix,
    model_from_data,
    qconj,
    qmul,
    quad_map_R,
    right_matrix,
)

floats = st.floats(-3, 3, allow_nan=False)
quats = st.tuples(floats, floats, floats, floats).map(np.array)


def rot(theta):
    return np.array([np.cos(theta), np.sin(theta), 0, 0])


def w_of(rep):
    return np.array([rep[4], 0.0, rep[5], rep[6]])


def test_quaternion_relations():
    i, j, k = Quaternion(0, 1), Quaternion(0, 0, 1), Quaternion(0, 0, 0, 1)
    minus_one = Quaternion(-1)
    assert i * i == minus_one and j * j == minus_one and k * k == minus_one
    assert i * j * k == minus_one
    assert i * j == k and j * i == -k
    assert (Quaternion(1, 2, 3, 4).conj()).array().tolist() == [1, -2, -3, -4]


@given(quats, quats)
def test_norm_multiplicative(p, q):
    assert np.linalg.norm(qmul(p, q)) == pytest.approx(np.linalg.norm(p) * np.linalg.norm(q), rel=1e-12, abs=1e-12)


@given(quats, quats, quats)
def test_left_right_matrices(p, q, w):
    assert np.allclose(left_matrix(p) @ w, qmul(p, w))
    assert np.allclose(right_matrix(q) @ w, qmul(w, q))
    assert np.allclose(qconj(qmul(p, q)), qmul(qconj(q), qconj(p)))


def test_R_examples():
    assert np.allclose(quad_map_R(ONE), [1, 0, 0])
    assert np.allclose(quad_map_R(J), [-1, 0, 0])


@given(quats, st.floats(0, 2 * np.pi))
def test_R_properties(w, theta):
    r = quad_map_R(w)
    n2 = float(w @ w)
    assert np.linalg.norm(r) == pytest.approx(n2, rel=1e-12, abs=1e-12)
    assert np.allclose(quad_map_R(qmul(w, rot(theta))), r, atol=1e-10)
    assert np.allclose(quad_map_R(qmul(w, J)), -r, atol=1e-10)


def test_R_surjects_onto_sphere():
    rng = np.random.default_rng(0)
    w = rng.standard_normal((10_000, 4))
    w /= np.linalg.norm(w, axis=1, keepdims=True)
    img = quad_map_R(w)
    # Fibonacci lattice on the target sphere
    n = 2000
    z = 1 - (2 * np.arange(n) + 1) / n
    phi = np.pi * (3 - np.sqrt(5)) * np.arange(n)
    grid = np.column_stack([np.sqrt(1 - z**2) * np.cos(phi), np.sqrt(1 - z**2) * np.sin(phi), z])
    gaps = np.min(np.linalg.norm(grid[:, None, :] - img[None, :, :], axis=-1), axis=1)
    assert gaps.max() < 0.1


def test_L_examples():
    assert np.allclose(admissible_L(ONE, ONE), I)
    out = admissible_L(Quaternion(1), Quaternion(1))
    assert isinstance(out, Quaternion) and np.allclose(out.array(), I)


@given(quats, quats)
def test_L_properties(q, w):
    assert np.allclose(admissible_L(q, qmul(w, J)) + qmul(admissible_L(q, w), J), 0, atol=1e-10)
    assert np.allclose(admissible_L(q, qmul(w, I)), qmul(admissible_L(q, w), I), atol=1e-10)
    op = left_matrix(q) @ right_matrix(I)
    assert np.linalg.norm(op, 2) == pytest.approx(np.linalg.norm(q), rel=1e-12, abs=1e-12)


@pytest.mark.parametrize("kind", list(FixedType))
def test_build_model_equivariant(kind):
    for seed in range(4):
        m = build_model(seed, 0.01, kind)
        assert m.fixed_type is kind and m.seed == seed
        res = equivariance_residuals(m, 1000, seed)
        assert res["u1"] < 1e-9 and res["j"] < 1e-9
        assert m.C > 0 and m.q1_floor() > 0


def test_build_model_deterministic():
    a, b = build_model(5, 0.01, "non-j-fixed"), build_model(5, 0.01, "non-j-fixed")
    assert np.array_equal(a.Q1, b.Q1) and np.array_equal(a.Q2_left, b.Q2_left) and a.C == b.C


def test_tau_too_large():
    m = build_model(7, 0.01)
    with pytest.raises(TauTooLarge, match="C = "):
        build_model(7, m.C)
    with pytest.raises(ValueError):
        build_model(7, -1.0)


def test_domination_constant_j_fixed_is_svd():
    m = build_model(3, 0.01)
    assert m.C == pytest.approx(np.linalg.svd(m.Q2, compute_uv=False)[-1])


def test_domination_bound_holds():
    # for a != 0 the second equation forces w = 0
    rng = np.random.default_rng(1)
    for seed in range(6):
        m = build_model(seed, 0.01, "non-j-fixed")
        blocks = m.q2_blocks()
        a = rng.standard_normal((500, 4))
        ops = np.einsum("nc,cij->nij", a, blocks)
        smin = np.linalg.svd(ops, compute_uv=False)[:, -1]
        assert np.all(smin >= (m.C - m.tau) * np.linalg.norm(a, axis=1) - 1e-12)
        # sampled minimum of Q2 alone is never below the computed constant
        q2 = np.einsum("nc,cij->nij", a / np.linalg.norm(a, axis=1, keepdims=True),
                       blocks - m.tau * np.stack([left_matrix(e) @ right_matrix(I) for e in np.eye(4)]))
        assert np.linalg.svd(q2, compute_uv=False)[:, -1].min() >= m.C - 1e-9


def test_domination_constant_sampling_agrees_with_dense_scan():
    rng = np.random.default_rng(4)
    m = rng.standard_normal((4, 4))
    n = 0.3 * rng.standard_normal((4, 4))
    c = domination_constant(m, n)
    a = rng.standard_normal((20_000, 4))
    a /= np.linalg.norm(a, axis=1, keepdims=True)
    ops = left_matrix(a @ n.T) + left_matrix(a @ m.T) @ right_matrix(I)
    scan = np.linalg.svd(ops, compute_uv=False)[:, -1].min()
    assert c <= scan + 1e-12
    assert c > scan - 0.05


def test_pure_hopf_model_closed_form():
    m = model_from_data(np.zeros((3, 3)), 3 * np.eye(4), 1.0)
    h = np.array([0.0, 0.03, -0.04])
    res = count_solution_circles(m, h)
    assert res.circles == 1 and res.signs[0] in (1, -1)
    w = w_of(res.representatives[0])
    assert float(w @ w) == pytest.approx(np.linalg.norm(h), rel=1e-9)
    assert np.allclose(quad_map_R(w), h, atol=1e-12)
    # the direction opposite to a Hopf image is still hit
    res2 = count_solution_circles(m, -h)
    assert res2.circles == 1


def test_j_fixed_closed_form_oracle():
    rng = np.random.default_rng(12)
    checked = 0
    while checked < 5:
        A = rng.normal(scale=0.5, size=(3, 3))
        tau = 0.01
        if np.linalg.svd(A + tau * np.eye(3), compute_uv=False)[-1] < 0.1:
            continue
        M = np.linalg.qr(rng.standard_normal((4, 4)))[0]
        m = model_from_data(A, M, tau)
        h = rng.standard_normal(3)
        h *= 0.05 / np.linalg.norm(h)
        res = count_solution_circles(m, h)
        target = np.linalg.solve(A + tau * np.eye(3), h)
        assert res.circles == 1
        rep = np.array(res.representatives[0])
        w = w_of(rep)
        assert np.allclose(rep[:4], 0, atol=1e-10)
        assert np.allclose(quad_map_R(w), target, atol=1e-10)
        assert float(w @ w) == pytest.approx(np.linalg.norm(target), rel=1e-9)
        checked += 1


def test_h_zero_reducible_only():
    for kind in FixedType:
        res = count_solution_circles(build_model(2, 0.01, kind), np.zeros(3))
        assert res.reducible_only and res.circles == 0


def test_h_threshold_and_starts():
    m = build_model(0, 0.01)
    with pytest.raises(ValueError):
        count_solution_circles(m, [0.2, 0, 0])
    with pytest.raises(ValueError):
        count_solution_circles(m, [0.05, 0, 0], starts=100)


def test_count_stable_under_new_grid():
    rng = np.random.default_rng(99)
    for k in range(20):
        m = build_model(100 + k, 0.01, list(FixedType)[k % 2])
        h = rng.standard_normal(3)
        h *= 0.05 / np.linalg.norm(h)
        a = count_solution_circles(m, h, starts=1024, seed=0)
        b = count_solution_circles(m, h, starts=2048, seed=17)
        assert (a.circles, a.signs) == (b.circles, b.signs)
        assert np.allclose(a.representatives, b.representatives, atol=1e-6)


def test_solution_is_a_root():
    m = build_model(8, 0.01, "non-j-fixed")
    h = np.array([0.01, -0.02, 0.04])
    res = count_solution_circles(m, h)
    rep = np.array(res.representatives[0])
    w = w_of(rep)
    for theta in np.linspace(0, 2 * np.pi, 9):
        f1, f2 = m(rep[:4], qmul(w, rot(theta)))
        assert np.allclose(f1, h, atol=1e-11) and np.allclose(f2, 0, atol=1e-11)
