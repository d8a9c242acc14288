"""Figure rendering: formats, determinism, and input flexibility."""

import numpy as np
import pytest

from illiqdep import BinarySeries, KernelSpec, dependence_profile_stationary, estimate_probability
from illiqdep.errors import InvalidInput
from illiqdep.plots import close_figure, dependence_figure, probability_figure, save_figure


@pytest.fixture
def profile():
    rng = np.random.default_rng(60)
    bits = (rng.random(400) < 0.6).astype(np.int8)
    return dependence_profile_stationary(BinarySeries(bits), 20)


def test_dependence_svg_deterministic(tmp_path, profile):
    paths = [tmp_path / f"fig{i}.svg" for i in range(2)]
    for path in paths:
        fig = dependence_figure(profile, title="demo")
        save_figure(fig, path)
        close_figure(fig)
    assert paths[0].read_bytes() == paths[1].read_bytes()
    assert paths[0].read_bytes().startswith(b"<?xml")


def test_probability_figure_accepts_estimate_and_array(tmp_path):
    rng = np.random.default_rng(61)
    bits = (rng.random(300) < 0.5).astype(np.int8)
    est = estimate_probability(BinarySeries(bits), KernelSpec.rate_default(300))
    for i, source in enumerate((est, est.p_hat)):
        fig = probability_figure(source, source_id="demo")
        save_figure(fig, tmp_path / f"p{i}.svg")
        close_figure(fig)
    assert (tmp_path / "p0.svg").read_bytes() == (tmp_path / "p1.svg").read_bytes()


def test_png_supported(tmp_path, profile):
    fig = dependence_figure(profile)
    save_figure(fig, tmp_path / "fig.png")
    close_figure(fig)
    assert (tmp_path / "fig.png").stat().st_size > 0


def test_unknown_format_rejected(tmp_path, profile):
    fig = dependence_figure(profile)
    with pytest.raises(InvalidInput):
        save_figure(fig, tmp_path / "fig.bmp")
    close_figure(fig)
