"""Test noise schedule, forward process, posterior step and loss."""
import numpy as np
import pytest
import torch

from gesture_engine.diffusion.process import (
    posterior_coefficients,
    posterior_step,
    q_sample,
    q_step,
    training_loss,
)
from gesture_engine.diffusion.schedule import NoiseSchedule, cosine_schedule


@pytest.mark.parametrize("num_steps", [1, 10, 100, 1000])
def test_cosine_schedule(num_steps):
    """Test boundary values, monotonicity and consistency of the cosine schedule."""
    schedule = cosine_schedule(num_steps)
    assert schedule.num_steps == num_steps
    assert schedule.alpha_bar[0] == 1.0
    assert schedule.alpha_bar[-1] <= 1e-3
    assert np.all(np.diff(schedule.alpha_bar) < 0)
    assert np.all((schedule.alpha[1:] > 0) & (schedule.alpha[1:] < 1))
    np.testing.assert_allclose(schedule.alpha_bar[1:], np.cumprod(schedule.alpha)[1:], atol=1e-9)
    assert schedule.posterior_variance[1] == 0.0


def test_invalid_schedule():
    """Test schedule validation."""
    with pytest.raises(ValueError):
        cosine_schedule(0)
    with pytest.raises(ValueError):
        NoiseSchedule(alpha=np.array([1.0, 0.5]), alpha_bar=np.array([1.0, 0.4]))
    with pytest.raises(ValueError):
        NoiseSchedule.from_alpha_bar([1.0, 1.5])
    with pytest.raises(ValueError):
        cosine_schedule(10).check_step(11)


def test_q_sample_boundaries():
    """Test the forward process at the first and the last step."""
    schedule = cosine_schedule(1000)
    rng = np.random.default_rng(seed=0)
    x0 = rng.standard_normal((5, 4))
    noise = rng.standard_normal((5, 4))
    np.testing.assert_array_equal(q_sample(x0, 0, noise, schedule), x0)
    assert np.sqrt(1.0 - schedule.alpha_bar[-1]) >= 0.9995

    with pytest.raises(ValueError):
        q_sample(x0, 1001, noise, schedule)
    with pytest.raises(ValueError):
        q_sample(x0, 5, noise[:2], schedule)


def test_q_sample_batch():
    """Test per-sample step indices of a batch."""
    schedule = cosine_schedule(100)
    x0 = np.ones((3, 4, 2))
    noise = np.zeros((3, 4, 2))
    out = q_sample(x0, np.array([0, 50, 100]), noise, schedule)
    np.testing.assert_allclose(out[:, 0, 0], np.sqrt(schedule.alpha_bar[[0, 50, 100]]))


def test_q_sample_distribution():
    """Test the closed form against the chained single-step process by Monte Carlo."""
    schedule = cosine_schedule(100)
    rng = np.random.default_rng(seed=0)
    x0 = np.full(1_000_000, 0.7)
    chained = x0
    for step in range(1, 51):
        chained = q_step(chained, step, rng.standard_normal(x0.shape), schedule)
    closed = q_sample(x0, 50, rng.standard_normal(x0.shape), schedule)

    mean = np.sqrt(schedule.alpha_bar[50]) * 0.7
    std = np.sqrt(1.0 - schedule.alpha_bar[50])
    for samples in (chained, closed):
        assert samples.mean() == pytest.approx(mean, abs=0.02 * std)
        assert samples.std() == pytest.approx(std, rel=0.02)


def test_posterior_final_step():
    """Test that the last posterior step returns the prediction."""
    schedule = cosine_schedule(50)
    rng = np.random.default_rng(seed=0)
    x0_hat, x_t = rng.standard_normal((2, 6, 3))
    np.testing.assert_array_equal(posterior_step(x0_hat, x_t, 1, schedule), x0_hat)
    assert posterior_coefficients(1, schedule) == (1.0, 0.0, 0.0)

    with pytest.raises(ValueError):
        posterior_step(x0_hat, x_t, 0, schedule)
    with pytest.raises(ValueError):
        posterior_step(x0_hat, x_t, 2, schedule)
    with pytest.raises(ValueError):
        posterior_step(x0_hat, x_t[:3], 1, schedule)


def test_posterior_noise_free_schedule():
    """Test the identity schedule with alpha_bar = 1."""
    schedule = NoiseSchedule.from_alpha_bar([1.0, 1.0])
    x0_hat = np.arange(6.0).reshape(3, 2)
    np.testing.assert_array_equal(posterior_step(x0_hat, np.zeros((3, 2)), 1, schedule), x0_hat)


def test_posterior_mean():
    """Test the posterior mean of a noise-free iterate."""
    schedule = cosine_schedule(100)
    x0 = np.full((2, 2), 0.3)
    x_t = q_sample(x0, 40, np.zeros_like(x0), schedule)
    _, _, variance = posterior_coefficients(40, schedule)
    mean = posterior_step(x0, x_t, 40, schedule, noise=np.zeros_like(x0))
    np.testing.assert_allclose(mean, np.sqrt(schedule.alpha_bar[39]) * x0, atol=1e-12)
    assert variance == pytest.approx(schedule.posterior_variance[40])


@pytest.mark.parametrize(("error", "expected"), [(0.5, 0.125), (2.0, 1.5), (-2.0, 1.5), (0.0, 0.0)])
def test_huber_loss(error, expected):
    """Test quadratic and linear branches of the Huber loss."""
    x0 = np.zeros((1, 1))
    assert training_loss(x0, x0 + error) == pytest.approx(expected)


def test_loss_variants():
    """Test MSE limit, masking and torch input."""
    rng = np.random.default_rng(seed=0)
    x0, x0_hat = rng.standard_normal((2, 3, 5, 4))
    mse = training_loss(x0, x0_hat, "mse")
    assert mse == pytest.approx(np.mean((x0 - x0_hat) ** 2))
    assert training_loss(x0, x0_hat, "huber", delta=1e6) == pytest.approx(0.5 * mse, abs=1e-9)

    valid = np.ones((3, 5))
    valid[:, 3:] = 0.0
    assert training_loss(x0, x0_hat, "mse", valid=valid) == pytest.approx(
        np.mean((x0[:, :3] - x0_hat[:, :3]) ** 2)
    )

    for loss_kind in ("huber", "mse"):
        torch_loss = training_loss(x0, torch.tensor(x0_hat), loss_kind, valid=torch.tensor(valid))
        assert isinstance(torch_loss, torch.Tensor)
        assert torch_loss.item() == pytest.approx(training_loss(x0, x0_hat, loss_kind, valid=valid))

    with pytest.raises(ValueError):
        training_loss(x0, x0_hat[:, :2])
