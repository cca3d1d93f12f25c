import math

import numpy as np
import pytest

from implicit_online import (
    Hinge,
    MirrorSetup,
    Square,
    gen_fixed,
    gen_lower_bound,
    gen_sine,
    losses_from_dataset,
    parse_libsvm,
    preprocess,
    serialize_libsvm,
    shuffle_order,
    temporal_variability,
)
from implicit_online.data import Dataset, ExperimentConfig


def test_parse_basic_example():
    ds = parse_libsvm("+1 1:0.5 3:-2\n")
    assert ds.n == 1 and ds.d == 3
    assert ds.labels[0] == 1.0
    np.testing.assert_array_equal(ds.rows[0][0], [1, 3])
    np.testing.assert_allclose(ds.rows[0][1], [0.5, -2.0])
    np.testing.assert_allclose(ds.dense_row(0), [0.5, 0.0, -2.0])


def test_parse_empty_and_comments():
    ds = parse_libsvm("")
    assert ds.n == 0
    ds = parse_libsvm("# header\n\n+1 2:1.0  # trailing comment\n")
    assert ds.n == 1 and ds.d == 2


def test_parse_label_mapping():
    ds = parse_libsvm("0 1:1\n1 1:2\n-1 1:3\n", task="classification")
    np.testing.assert_array_equal(ds.labels, [-1.0, 1.0, -1.0])
    ds = parse_libsvm("3.25 1:1\n", task="regression")
    assert ds.labels[0] == 3.25
    with pytest.raises(ValueError, match="line 1"):
        parse_libsvm("2 1:1\n", task="classification")


def test_parse_errors_carry_line_numbers():
    with pytest.raises(ValueError, match="line 2.*malformed"):
        parse_libsvm("+1 1:1\n+1 1:abc\n")
    with pytest.raises(ValueError, match="line 1.*duplicate"):
        parse_libsvm("+1 1:1 1:2\n")
    with pytest.raises(ValueError, match="line 1.*ascending"):
        parse_libsvm("+1 3:1 2:2\n")
    with pytest.raises(ValueError, match="line 1.*index"):
        parse_libsvm("+1 0:1\n")
    with pytest.raises(ValueError, match="line 3.*label"):
        parse_libsvm("+1 1:1\n-1 1:1\n+7 1:1\n")


def test_roundtrip_bit_identical(rng):
    rows = []
    for _ in range(30):
        nnz = int(rng.integers(1, 5))
        idx = np.sort(rng.choice(8, size=nnz, replace=False)) + 1
        vals = rng.normal(size=nnz) * 10.0
        rows.append((idx.astype(np.int64), vals))
    ds = Dataset(rows=tuple(rows), labels=rng.choice([-1.0, 1.0], size=30), d=8, task="classification")
    text = serialize_libsvm(ds)
    ds2 = parse_libsvm(text)
    assert serialize_libsvm(ds2) == text
    for (i1, v1), (i2, v2) in zip(ds.rows, ds2.rows):
        np.testing.assert_array_equal(i1, i2)
        np.testing.assert_array_equal(v1, v2)


def test_preprocess_scaling_and_bias():
    ds = parse_libsvm("+1 1:2\n-1 1:-4\n")
    out = preprocess(ds)
    col = [out.dense_row(i)[0] for i in range(2)]
    np.testing.assert_allclose(col, [0.5, -1.0])
    # bias appended at d+1 with value 1
    assert out.d == ds.d + 1
    assert all(out.dense_row(i)[-1] == 1.0 for i in range(2))
    assert out.has_bias
    # all values in [-1, 1]
    for i in range(out.n):
        assert np.all(np.abs(out.dense_row(i)) <= 1.0)


def test_preprocess_zero_column_and_idempotence():
    ds = parse_libsvm("+1 1:0 2:3\n-1 1:0 2:-6\n")
    out = preprocess(ds)
    assert out.dense_row(0)[0] == 0.0
    again = preprocess(out)
    assert again.d == out.d
    for i in range(out.n):
        np.testing.assert_array_equal(again.dense_row(i), out.dense_row(i))


def test_preprocess_empty_errors():
    with pytest.raises(ValueError):
        preprocess(parse_libsvm(""))


def test_losses_from_dataset_tasks():
    ds = preprocess(parse_libsvm("+1 1:2\n-1 1:-4\n"))
    losses = losses_from_dataset(ds)
    assert all(isinstance(l, Hinge) for l in losses)
    from implicit_online import Absolute

    ds = preprocess(parse_libsvm("1.5 1:2\n-0.5 1:-4\n", task="regression"))
    losses = losses_from_dataset(ds)
    assert all(isinstance(l, Absolute) for l in losses)
    assert losses[0].y == 1.5


def test_gen_sine_values():
    losses = gen_sine(2000)
    assert len(losses) == 2000
    assert losses[-1].y == pytest.approx(100.0 * math.sin(math.pi / 10.0), rel=1e-12)  # ~30.9017
    assert losses[0].y == pytest.approx(100.0 * math.sin(math.pi / 20000.0), rel=1e-12)  # ~0.0157
    ys = np.array([l.y for l in losses])
    assert np.all(np.diff(ys) > 0)
    assert ys.max() <= 100.0 * math.sin(math.pi / 10.0) + 1e-12 and ys.min() >= 0.0
    with pytest.raises(ValueError):
        gen_sine(0)


def test_gen_fixed():
    losses = gen_fixed(Square(z=np.array([1.0]), y=1.0), 3)
    assert len(losses) == 3 and all(l is losses[0] for l in losses)
    assert temporal_variability(losses, MirrorSetup.ball(1.0)) == 0.0


def test_gen_lower_bound_properties():
    ball = MirrorSetup.ball(1.0)
    seq = gen_lower_bound(10.0, ball, np.zeros(2), 4)
    assert len(seq) == 4
    assert abs(np.linalg.norm(seq[0].g) - 1.0) <= 1e-12
    assert seq[0].s == pytest.approx(10.0)  # L = 2 V' / D with D = 2
    assert all(l.s == 0.0 for l in seq[1:])
    assert temporal_variability(seq, ball) == pytest.approx(10.0, abs=1e-9)

    # orthogonal to a nonzero start point, deterministically
    seq = gen_lower_bound(1.0, ball, np.array([0.0, 1.0]), 2)
    np.testing.assert_allclose(seq[0].g, [1.0, 0.0], atol=1e-12)
    assert abs(float(seq[0].g @ np.array([0.0, 1.0]))) <= 1e-12

    zero = gen_lower_bound(0.0, ball, np.zeros(2), 3)
    assert temporal_variability(zero, ball) == 0.0

    with pytest.raises(ValueError, match="d >= 2"):
        gen_lower_bound(1.0, ball, np.zeros(1), 2)
    with pytest.raises(ValueError, match="ball"):
        gen_lower_bound(1.0, MirrorSetup.unconstrained(), np.zeros(2), 2)


def test_shuffle_order_deterministic():
    a = shuffle_order(100, seed=7, repeat=3)
    b = shuffle_order(100, seed=7, repeat=3)
    np.testing.assert_array_equal(a, b)
    c = shuffle_order(100, seed=7, repeat=4)
    assert not np.array_equal(a, c)
    assert sorted(a.tolist()) == list(range(100))


def test_experiment_config_validation():
    cfg = ExperimentConfig()
    grid = cfg.beta_grid()
    assert len(grid) == 41
    assert grid[0] == 2.0**-20 and grid[-1] == 2.0**20
    with pytest.raises(ValueError):
        ExperimentConfig(repeats=0)
    with pytest.raises(ValueError):
        ExperimentConfig(grid_points=0)
    with pytest.raises(ValueError):
        ExperimentConfig(task="ranking")
    with pytest.raises(ValueError):
        ExperimentConfig(ball_radius=-1.0)
