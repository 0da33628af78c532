import math

import numpy as np
import pytest

from dualgreedy.functionals import PointEval, RadonLine
from dualgreedy.kernels import (exponential_kernel, gaussian_kernel,
                                weighted_gaussian_kernel)
from dualgreedy.pairings import (GramMatrix, PairingEngine,
                                 UnsupportedPairingError, _point_radon,
                                 condition_number, read_gram_csv,
                                 write_gram_csv)
from dualgreedy.quadrature import QuadratureSpec, line_integral

ALPHA, BETA = 2000.0, 1.5
KW = weighted_gaussian_kernel(ALPHA, BETA)


def random_lines(rng, n):
    return [RadonLine(rng.uniform(-1.4, 1.4), rng.uniform(0, math.pi))
            for _ in range(n)]


def random_points(rng, n):
    return [PointEval(tuple(rng.uniform(-1, 1, size=2))) for _ in range(n)]


def test_point_point_is_kernel_value():
    engine = PairingEngine(KW)
    assert engine.pairing(PointEval((0.0, 0.0)), PointEval((0.0, 0.0))) == 1.0
    x, y = np.array([0.3, -0.1]), np.array([0.0, 0.4])
    got = engine.pairing(PointEval(tuple(x)), PointEval(tuple(y)))
    assert got == pytest.approx(float(KW(x, y)), rel=0, abs=0)


def test_representer_matches_quadrature_on_axis_line():
    # The line r=0, theta=0 is the vertical axis; its representer at a
    # point is the 1-D integral of the kernel along that axis.
    engine = PairingEngine(KW)
    x = np.array([0.5, 0.5])
    analytic = engine.representer_eval(RadonLine(0.0, 0.0), x)
    spec = QuadratureSpec(tol=1e-12, radius=math.sqrt(37 / BETA),
                          max_panels=65536, min_panels=512)
    quad, _ = line_integral(
        lambda s: KW(x, np.stack([np.zeros_like(s), s], axis=-1)), spec)
    assert abs(analytic - quad) <= 1e-10


def test_representer_same_line_raw_parameters():
    # (r, theta) and (-r, theta + pi) parameterize the same line, so the
    # raw closed form must agree before any normalization happens.
    rng = np.random.default_rng(5)
    for _ in range(20):
        r = rng.uniform(-1.4, 1.4)
        t = rng.uniform(0, math.pi)
        x = rng.uniform(-1, 1, size=(100, 2))
        a = _point_radon(ALPHA, BETA, x, r, t)
        b = _point_radon(ALPHA, BETA, x, -r, t + math.pi)
        assert np.max(np.abs(a - b)) <= 1e-12


def test_radon_radon_matches_quadrature():
    analytic = PairingEngine(KW)
    quad = PairingEngine(KW, mode="quadrature")
    a, b = RadonLine(0.2, 0.7), RadonLine(-0.4, 2.1)
    assert abs(analytic.pairing(a, b) - quad.pairing(a, b)) <= 1e-10


def test_point_radon_matches_quadrature():
    analytic = PairingEngine(KW)
    quad = PairingEngine(KW, mode="quadrature")
    rng = np.random.default_rng(11)
    for p, line in zip(random_points(rng, 5), random_lines(rng, 5)):
        va, vq = analytic.pairing(p, line), quad.pairing(p, line)
        assert abs(va - vq) <= 1e-10 + 1e-10 * abs(va)


def test_pairing_symmetry_exact():
    engine = PairingEngine(KW)
    rng = np.random.default_rng(23)
    funcs = random_lines(rng, 20) + random_points(rng, 10)
    for _ in range(500):
        i, j = rng.integers(0, len(funcs), size=2)
        assert engine.pairing(funcs[i], funcs[j]) == engine.pairing(
            funcs[j], funcs[i])


def test_pairing_cache_is_bitwise_stable():
    engine = PairingEngine(KW)
    a, b = RadonLine(0.3, 1.2), RadonLine(-0.8, 0.4)
    first = engine.pairing(a, b)
    assert engine.pairing(a, b) == first
    engine.clear_cache()
    assert engine.pairing(b, a) == first


def test_cauchy_schwarz():
    engine = PairingEngine(KW)
    rng = np.random.default_rng(31)
    funcs = random_lines(rng, 30) + random_points(rng, 30)
    for _ in range(300):
        i, j = rng.integers(0, len(funcs), size=2)
        lam, mu = funcs[i], funcs[j]
        lhs = engine.pairing(lam, mu) ** 2
        rhs = engine.pairing(lam, lam) * engine.pairing(mu, mu)
        assert lhs <= rhs * (1 + 1e-12)


def test_dual_distance_identity_and_points():
    engine = PairingEngine(KW)
    line = RadonLine(0.3, 0.9)
    assert engine.dual_distance(line, line) == 0.0
    x, y = np.array([0.2, 0.1]), np.array([-0.3, 0.5])
    expected = math.sqrt(KW.diagonal(x) - 2 * KW(x, y) + KW.diagonal(y))
    got = engine.dual_distance(PointEval(tuple(x)), PointEval(tuple(y)))
    assert got == pytest.approx(expected, rel=1e-14)


def test_dual_distance_triangle_inequality():
    engine = PairingEngine(KW)
    rng = np.random.default_rng(41)
    funcs = random_lines(rng, 20) + random_points(rng, 10)
    for _ in range(300):
        i, j, k = rng.integers(0, len(funcs), size=3)
        dij = engine.dual_distance(funcs[i], funcs[j])
        dik = engine.dual_distance(funcs[i], funcs[k])
        dkj = engine.dual_distance(funcs[k], funcs[j])
        assert dij <= dik + dkj + 1e-10


def test_dual_distance_against_representer_quadrature():
    # |g_a - g_b|^2 = (a - b)(g_a - g_b): apply each line functional to
    # the closed-form representer difference by 1-D quadrature, which
    # exercises the representer route independently of the line-line
    # closed form.
    engine = PairingEngine(KW)
    spec = QuadratureSpec(tol=1e-13, radius=math.sqrt(37 / BETA),
                          max_panels=65536, min_panels=512)
    rng = np.random.default_rng(53)
    for a, b in zip(random_lines(rng, 5), random_lines(rng, 5)):
        def diff_along(line):
            def f(s):
                pts = line.point(s)
                return (engine.representer_eval(a, pts)
                        - engine.representer_eval(b, pts))
            return line_integral(f, spec)[0]

        d2_oracle = diff_along(a) - diff_along(b)
        d2 = engine.dual_distance(a, b) ** 2
        assert abs(d2 - d2_oracle) <= 1e-8 * abs(d2_oracle)


def test_pairing_column_matches_scalar():
    engine = PairingEngine(KW)
    rng = np.random.default_rng(61)
    funcs = random_lines(rng, 15) + random_points(rng, 15)
    for probe in (funcs[0], funcs[-1]):
        col = engine.pairing_column(probe, funcs)
        scalar = np.array([engine.pairing(probe, g) for g in funcs])
        assert np.max(np.abs(col - scalar)) <= 1e-15


def test_gram_symmetric_and_positive_definite():
    engine = PairingEngine(KW)
    rng = np.random.default_rng(71)
    for funcs in (random_lines(rng, 100), random_points(rng, 100)):
        gram = engine.gram(funcs)
        a = gram.matrix
        assert np.array_equal(a, a.T)
        gram.cholesky()


def test_gram_matches_pairings_and_diagonal():
    engine = PairingEngine(KW)
    rng = np.random.default_rng(73)
    funcs = random_lines(rng, 8) + random_points(rng, 4)
    a = engine.gram(funcs).matrix
    for i in range(len(funcs)):
        for j in range(len(funcs)):
            assert a[i, j] == pytest.approx(
                engine.pairing(funcs[i], funcs[j]), rel=1e-14, abs=1e-300)
    diag = engine.gram_diagonal(funcs)
    assert np.max(np.abs(np.diag(a) - diag)) <= 1e-15


def test_gram_single_functional():
    engine = PairingEngine(KW)
    line = RadonLine(0.4, 0.3)
    gram = engine.gram([line])
    assert gram.matrix.shape == (1, 1)
    assert gram.matrix[0, 0] == engine.pairing(line, line)


@pytest.mark.slow
def test_gram_against_quadrature_20_lines():
    analytic = PairingEngine(KW)
    spec = QuadratureSpec(tol=1e-10, radius=math.sqrt(37 / BETA),
                          max_panels=65536, min_panels=128)
    quad = PairingEngine(KW, mode="quadrature", quad=spec)
    rng = np.random.default_rng(83)
    funcs = random_lines(rng, 20)
    ga = analytic.gram(funcs).matrix
    gq = quad.gram(funcs).matrix
    assert np.max(np.abs(ga - gq)) <= 1e-8


def test_unsupported_combinations():
    plain = PairingEngine(gaussian_kernel(2000.0))
    rough = PairingEngine(exponential_kernel(10.0))
    rough_quad = PairingEngine(exponential_kernel(10.0), mode="quadrature")
    line = RadonLine(0.2, 0.5)
    point = PointEval((0.1, 0.1))
    # points are fine for every kernel
    assert plain.pairing(point, point) > 0
    assert rough.pairing(point, point) > 0
    for engine in (plain, rough, rough_quad):
        with pytest.raises(UnsupportedPairingError):
            engine.pairing(line, line)
        with pytest.raises(UnsupportedPairingError):
            engine.pairing(point, line)
        with pytest.raises(UnsupportedPairingError):
            engine.representer_eval(line, np.array([0.0, 0.0]))


def test_dimension_mismatch_raises():
    engine = PairingEngine(gaussian_kernel(1.0, dim=1))
    with pytest.raises(UnsupportedPairingError):
        engine.pairing(PointEval((0.0, 0.0)), PointEval((0.0, 0.0)))


def test_condition_number_cases():
    assert condition_number(np.eye(3)) == 1.0
    assert condition_number(np.diag([4.0, 1.0])) == 4.0
    rng = np.random.default_rng(97)
    b = rng.standard_normal((10, 10))
    a = b.T @ b
    sv = np.linalg.svd(b, compute_uv=False)
    expected = (sv[0] / sv[-1]) ** 2
    assert condition_number(a) == pytest.approx(expected, rel=1e-8)
    # rank-deficient matrices hit the sentinel
    assert condition_number(np.diag([1.0, 0.0])) == math.inf


def test_combination_eval_linearity():
    engine = PairingEngine(KW)
    rng = np.random.default_rng(101)
    funcs = random_lines(rng, 4)
    coeffs = rng.standard_normal(4)
    x = rng.uniform(-1, 1, size=(6, 2))
    combo = engine.combination_eval(funcs, coeffs, x)
    manual = sum(c * engine.representer_eval(f, x)
                 for c, f in zip(coeffs, funcs))
    assert np.max(np.abs(combo - manual)) <= 1e-14


def test_gram_csv_round_trip(tmp_path):
    engine = PairingEngine(KW)
    rng = np.random.default_rng(103)
    gram = engine.gram(random_lines(rng, 6))
    path = tmp_path / "gram.csv"
    write_gram_csv(gram, path)
    back = read_gram_csv(path)
    assert np.array_equal(back, gram.matrix)
    path.write_text("m,3\n")
    with pytest.raises(ValueError):
        read_gram_csv(path)


def test_gram_matrix_array_protocol():
    engine = PairingEngine(KW)
    gram = engine.gram([RadonLine(0.1, 0.2), RadonLine(-0.5, 1.4)])
    assert isinstance(gram, GramMatrix)
    assert np.asarray(gram).shape == (2, 2)
    assert len(gram) == 2
    assert gram.condition_number() >= 1.0
