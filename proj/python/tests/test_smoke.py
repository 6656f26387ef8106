import numpy as np
import pytest

import invnet


def test_triangular_params_round_trip():
    p = invnet.TriangularParams(2, [0.5], [0.3], [1.0, 1.0])
    np.testing.assert_allclose(p.weight(), [[1.0, 0.3], [0.5, 1.15]])
    y = p.apply(np.array([1.0, 0.0]))
    np.testing.assert_array_equal(y, [1.0, 0.5])
    np.testing.assert_allclose(p.solve(y), [1.0, 0.0], atol=1e-15)
    assert p.determinant() == 1.0


def test_zero_diagonal_names_index():
    with pytest.raises(invnet.SingularityError, match=r"k\[1\]"):
        invnet.TriangularParams(3, [0, 0, 0], [0, 0, 0], [1.0, 0.0, 1.0])


def test_net_inverse_undoes_forward():
    net = invnet.Net.initialize(dim=8, depth=5, alpha=0.3, init_scale=1.0, bias_scale=0.5, seed=3)
    x = np.random.default_rng(0).uniform(-10, 10, size=(200, 8))
    y = net.forward(x)
    assert y.shape == (200, 8)
    assert np.max(np.abs(net.inverse(y) - x)) <= 1e-9
    assert net.round_trip_error(x) <= 1e-9
    np.testing.assert_array_equal(net.noisy_inverse(y[0], 0.0), net.inverse(y[0]))


def test_checkpoint_text_round_trip():
    net = invnet.Net.initialize(dim=4, depth=3, diagonals=[2.0, -1.0, 0.5], seed=1)
    assert net.determinant() == pytest.approx(16 * 1 * 0.0625)
    text = net.to_json()
    assert invnet.Net.from_json(text) == net
    with pytest.raises(invnet.CorruptArtifactError):
        invnet.Net.from_json(text.replace('"format_version": 1', '"format_version": 2'))


def test_train_small_task_is_deterministic():
    cfg = invnet.default_config("sine")
    cfg["task"].update(train_count=256, eval_count=64)
    cfg["train"].update(epochs=5, max_steps=0)
    cfg["seed"] = 4
    data = invnet.generate(cfg)
    assert data["train"]["inputs"].shape == (256, 4)
    net_a, hist_a = invnet.train(cfg, data)
    net_b, hist_b = invnet.train(cfg, data)
    assert net_a == net_b
    assert hist_a == hist_b
    assert len(hist_a) == 5
    assert hist_a[-1]["eval_mse"] < hist_a[0]["eval_mse"]
    m = invnet.evaluate(net_a, data["eval"]["inputs"], data["eval"]["targets"])
    assert m["eval_mse"] == hist_a[-1]["eval_mse"]
    assert m["round_trip_error"] <= 1e-9


def test_embedding_oracle_is_returned():
    cfg = {"task": {"kind": "embedding", "dim": 6, "train_count": 30, "eval_count": 10}, "seed": 2}
    data = invnet.generate(cfg)
    oracle = data["oracle"]
    np.testing.assert_array_equal(oracle.forward(data["train"]["inputs"]), data["train"]["targets"])


def test_bad_config_raises():
    with pytest.raises(invnet.ConfigError, match="net.depht"):
        invnet.generate({"task": {"kind": "sine"}, "net": {"depht": 2}})
