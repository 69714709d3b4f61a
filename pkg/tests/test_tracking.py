import numpy as np
import pytest

from gnets.tracking import Homotopy, TrackerConfig, newton, track


def sqrt_homotopy():
    # x^2 = 1 + 3t: follow x = sqrt(1 + 3t) from 1 to 2
    return Homotopy(lambda x, t: x**2 - (1 + 3 * t),
                    lambda x, t: np.diag(2 * x),
                    lambda x, t: np.array([-3.0]))


def test_tracks_to_endpoint():
    path = track(sqrt_homotopy(), np.array([1.0]), TrackerConfig(), 1.0)
    assert path.status == "converged"
    assert path.end.x[0] == pytest.approx(2.0, abs=1e-9)
    ts = [p.t for p in path.points]
    assert all(b > a for a, b in zip(ts, ts[1:]))


def test_newton_converges_quadratically():
    H = sqrt_homotopy()
    x, res, iters, ok = newton(H, np.array([1.9]), 1.0, 1e-14, 20)
    assert ok and iters <= 6 and x[0] == pytest.approx(2.0)


def test_divergence_callback_stops_path():
    H = Homotopy(lambda x, t: (1 - t) * x - 1, lambda x, t: np.diag([1 - t]), lambda x, t: -x)
    path = track(H, np.array([1.0]), TrackerConfig(), 1.0, diverged=lambda x: abs(x[0]) > 1e6)
    assert path.status == "diverged"


def test_step_budget_truncates():
    cfg = TrackerConfig(initial_step=1e-3, max_step=1e-3, max_steps=5)
    path = track(sqrt_homotopy(), np.array([1.0]), cfg, 1.0)
    assert path.status == "truncated"


def test_config_validation():
    with pytest.raises(ValueError):
        TrackerConfig(min_step=0.1, initial_step=0.01)
