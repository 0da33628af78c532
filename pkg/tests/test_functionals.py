import math

import numpy as np
import pytest

from dualgreedy.functionals import (ParameterMetric, PointEval, RadonLine,
                                    line_point, normalize_line_params,
                                    read_functionals_csv,
                                    write_functionals_csv)


def test_line_point_basics():
    # r = 0, theta = 0 is the vertical axis x = 0
    assert np.allclose(line_point(RadonLine(0.0, 0.0), 0.0), [0.0, 0.0])
    assert np.allclose(line_point(RadonLine(0.0, 0.0), 1.0), [0.0, 1.0])
    # r = 1, theta = 0: the line x = 1
    assert np.allclose(line_point(RadonLine(1.0, 0.0), -2.0), [1.0, -2.0])
    # theta = pi/2: horizontal line y = r
    p = line_point(RadonLine(0.5, math.pi / 2), 1.0)
    assert np.allclose(p, [-1.0, 0.5])


def test_line_point_collinear():
    rng = np.random.default_rng(3)
    for _ in range(50):
        line = RadonLine(rng.uniform(-1.4, 1.4), rng.uniform(0, math.pi))
        s = rng.uniform(-3, 3, size=4)
        pts = line.point(s)
        # all points satisfy x . n = r
        n = np.array([math.cos(line.theta), math.sin(line.theta)])
        assert np.max(np.abs(pts @ n - line.r)) <= 1e-12


def test_line_point_rejects_point_functional():
    with pytest.raises(TypeError):
        line_point(PointEval((0.0, 0.0)), 1.0)


def test_normalization_range_and_flip_parity():
    rng = np.random.default_rng(7)
    for _ in range(300):
        r = rng.uniform(-1.4, 1.4)
        theta = rng.uniform(-20.0, 20.0)
        nr, nt = normalize_line_params(r, theta)
        assert 0.0 <= nt < math.pi
        # the wrap removes a whole number of half-turns ...
        k = round((theta - nt) / math.pi)
        assert abs((theta - nt) - k * math.pi) <= 1e-9
        # ... and flips the radius sign once per half-turn
        assert nr == (r if k % 2 == 0 else -r)


def test_normalization_identifies_half_turn():
    r, theta = 0.7, 0.9
    a = RadonLine(r, theta)
    b = RadonLine(-r, theta + math.pi)
    assert b.r == a.r  # sign flip is exact arithmetic
    assert abs(b.theta - a.theta) <= 1e-12
    r2, t2 = normalize_line_params(0.3, 3 * math.pi + 0.1)
    assert abs(t2 - 0.1) <= 1e-12 and r2 == -0.3
    # both parameterizations trace the same geometric line
    s = np.linspace(-2, 2, 9)
    assert np.max(np.abs(a.point(s) - b.point(s))) <= 1e-12


def test_equality_is_bitwise_after_normalization():
    a = RadonLine(0.25, 1.0)
    assert RadonLine(0.25, 1.0) == a
    assert RadonLine(a.r, a.theta).key() == a.key()
    assert RadonLine(0.25, 1.0 + 1e-15) != a
    assert RadonLine(-0.25, 1.0) != a


def test_point_eval_coercion():
    p = PointEval((0.1, -0.2))
    assert p.dim == 2 and p.x == (0.1, -0.2)
    with pytest.raises(ValueError):
        PointEval((math.inf, 0.0))
    with pytest.raises(ValueError):
        RadonLine(math.nan, 0.0)


def test_parameter_metric_values():
    metric = ParameterMetric()
    a = RadonLine(0.3, 1.0)
    assert metric.distance(a, a) == 0.0
    # angular wraparound: 0.01 and pi - 0.01 are 0.02 apart
    near_0 = RadonLine(0.0, 0.01)
    near_pi = RadonLine(0.0, math.pi - 0.01)
    assert abs(metric.distance(near_0, near_pi) - 0.02) <= 1e-12
    # pure radial separation
    assert abs(metric.distance(RadonLine(0.1, 0.5),
                               RadonLine(0.3, 0.5)) - 0.2) <= 1e-15


def test_parameter_metric_axioms():
    rng = np.random.default_rng(17)
    metric = ParameterMetric(theta_scale=0.7)
    lines = [RadonLine(rng.uniform(-1.4, 1.4), rng.uniform(0, math.pi))
             for _ in range(30)]
    for _ in range(1000):
        a, b, c = (lines[i] for i in rng.integers(0, len(lines), size=3))
        dab = metric.distance(a, b)
        assert abs(dab - metric.distance(b, a)) <= 1e-12
        assert dab <= metric.distance(a, c) + metric.distance(c, b) + 1e-12
        if a == b:
            assert dab == 0.0


def test_parameter_metric_rejects_points():
    with pytest.raises(TypeError):
        ParameterMetric().distance(PointEval((0, 0)), RadonLine(0, 0))


def test_csv_round_trip(tmp_path):
    functionals = [RadonLine(0.25, 0.75), PointEval((0.1, -0.4)),
                   RadonLine(-1.2, 3.0)]
    samples = np.array([1.5, -0.25, 0.0])
    path = tmp_path / "cands.csv"
    write_functionals_csv(path, functionals, samples)
    back_f, back_s = read_functionals_csv(path)
    assert back_f == functionals
    assert np.array_equal(back_s, samples)
    # and without samples
    write_functionals_csv(path, functionals)
    back_f, back_s = read_functionals_csv(path)
    assert back_f == functionals and back_s is None


def test_csv_rejects_bad_header(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("a,b,c,d\n")
    with pytest.raises(ValueError):
        read_functionals_csv(path)
