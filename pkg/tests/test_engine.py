from collections import Counter

import numpy as np
import pytest

from picardnets import (
    MlpConfig,
    ProblemFns,
    ROOT_PATH,
    RandomOracle,
    brownian_increment,
    mlp_estimate_batch,
    mlp_eval,
    uniform_time,
)
from picardnets.sampling import KIND_GAUSS, KIND_TIME


def quad_g(x):
    return float(x @ x)


def test_level_zero_is_identically_zero():
    cfg = MlpConfig(n=0, M=3, horizon=1.0, t=0.2, d=2)
    fns = ProblemFns(f=lambda v: 99.0 * v + 1.0, g=quad_g)
    assert mlp_eval(cfg, np.array([1.0, -2.0]), ROOT_PATH, fns, RandomOracle(5, 2)) == 0.0


def test_level_one_single_branch_unrolls_by_hand():
    # n = M = 1: one terminal sample plus (horizon - t) * f(0), nothing else
    cfg = MlpConfig(n=1, M=1, horizon=1.0, t=0.25, d=3)
    fns = ProblemFns(f=lambda v: 2.0 * v + 0.5, g=quad_g)
    x = np.array([0.5, -1.0, 2.0])
    got = mlp_eval(cfg, x, ROOT_PATH, fns, RandomOracle(9, 3))

    oracle = RandomOracle(9, 3)
    shift = brownian_increment(oracle, (0, 0, -1), cfg.horizon - cfg.t)
    want = quad_g(x + shift) + (cfg.horizon - cfg.t) * fns.f(0.0)
    assert got == want


def test_zero_nonlinearity_reduces_to_monte_carlo_average():
    cfg = MlpConfig(n=2, M=3, horizon=1.5, t=0.5, d=2)
    fns = ProblemFns(f=lambda v: 0.0, g=quad_g)
    x = np.array([1.0, 2.0])
    got = mlp_eval(cfg, x, ROOT_PATH, fns, RandomOracle(77, 2))

    oracle = RandomOracle(77, 2)
    acc = 0.0
    for k in range(1, 3**2 + 1):
        shift = brownian_increment(oracle, (0, 0, -k), cfg.horizon - cfg.t)
        acc += quad_g(x + shift)
    assert got == acc / 3**2


def test_constant_nonlinearity_with_zero_datum():
    # every correction difference cancels, leaving (horizon - t) * c exactly
    cfg = MlpConfig(n=3, M=2, horizon=1.0, t=0.5, d=1)
    fns = ProblemFns(f=lambda v: 0.25, g=lambda x: 0.0)
    got = mlp_eval(cfg, np.array([3.0]), ROOT_PATH, fns, RandomOracle(1, 1))
    assert got == pytest.approx(0.5 * 0.25, rel=1e-13)


class LoggingOracle(RandomOracle):
    def __init__(self, seed, d):
        super().__init__(seed, d)
        self.calls = []

    def uniform01(self, theta, kind, count):
        self.calls.append((theta, kind))
        return super().uniform01(theta, kind, count)


def test_each_branch_draw_happens_exactly_once():
    # the time and displacement of branch (i, k) are shared by both nested
    # recursions, so no (path, kind) pair may ever be hashed twice, and the
    # sign-flipped relabel paths must not draw anything at their own node
    cfg = MlpConfig(n=2, M=2, horizon=1.0, t=0.0, d=1)
    fns = ProblemFns(f=lambda v: 0.1 * v, g=lambda x: float(x[0]))
    oracle = LoggingOracle(3, 1)
    mlp_eval(cfg, np.array([0.0]), ROOT_PATH, fns, oracle)

    counts = Counter(oracle.calls)
    assert max(counts.values()) == 1
    for i, k in [(1, 1), (1, 2)]:
        assert ((0, i, k), KIND_TIME) in counts
        assert ((0, i, k), KIND_GAUSS) in counts
        assert all(theta != (0, -i, k) for theta, _ in oracle.calls)


def test_heat_kernel_mean_for_zero_nonlinearity():
    # E g(x + W) = |x|^2 + d * (horizon - t) for the squared norm datum
    cfg = MlpConfig(n=1, M=16, horizon=1.0, t=0.0, d=4)
    fns = ProblemFns(f=lambda v: 0.0, g=quad_g)
    x = np.array([0.5, -0.5, 1.0, 0.0])
    exact = float(x @ x) + 4.0 * 1.0
    table = mlp_estimate_batch(cfg, x[None, :], list(range(30)), fns)
    mean = table.mean()
    stderr = table.std(ddof=1) / np.sqrt(30)
    assert abs(mean - exact) < 4.0 * stderr + 1e-9


def test_batch_rows_match_single_evaluations():
    cfg = MlpConfig(n=2, M=2, horizon=1.0, t=0.25, d=2)
    fns = ProblemFns(f=lambda v: 0.3 * v, g=quad_g)
    pts = np.array([[0.0, 0.0], [1.0, -1.0], [0.3, 0.7]])
    table = mlp_estimate_batch(cfg, pts, [11, 22], fns)
    assert table.shape == (2, 3)
    for i, seed in enumerate([11, 22]):
        for j in range(3):
            oracle = RandomOracle(seed, 2)
            assert table[i, j] == mlp_eval(cfg, pts[j], ROOT_PATH, fns, oracle)


def test_batch_is_reproducible():
    cfg = MlpConfig(n=1, M=4, horizon=1.0, t=0.0, d=2)
    fns = ProblemFns(f=lambda v: v, g=quad_g)
    pts = np.array([[0.1, 0.2]])
    a = mlp_estimate_batch(cfg, pts, [1, 2, 3], fns)
    b = mlp_estimate_batch(cfg, pts, [1, 2, 3], fns)
    np.testing.assert_array_equal(a, b)


def test_config_validation():
    with pytest.raises(ValueError):
        MlpConfig(n=-1, M=1, horizon=1.0, t=0.0, d=1)
    with pytest.raises(ValueError):
        MlpConfig(n=1, M=0, horizon=1.0, t=0.0, d=1)
    with pytest.raises(ValueError):
        MlpConfig(n=1, M=1, horizon=1.0, t=2.0, d=1)
    with pytest.raises(ValueError):
        MlpConfig(n=1, M=1, horizon=1.0, t=0.0, d=0)
    with pytest.raises(ValueError):
        MlpConfig(n=1, M=1, horizon=float("nan"), t=0.0, d=1)


def test_point_shape_validation():
    cfg = MlpConfig(n=1, M=1, horizon=1.0, t=0.0, d=2)
    fns = ProblemFns(f=lambda v: 0.0, g=quad_g)
    with pytest.raises(ValueError):
        mlp_eval(cfg, np.zeros(3), ROOT_PATH, fns, RandomOracle(0, 2))
    with pytest.raises(ValueError):
        mlp_estimate_batch(cfg, np.zeros((4, 3)), [0], fns)
