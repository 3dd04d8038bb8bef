from datetime import datetime

import numpy as np
import pytest

from daylight.photometry import (
    EfficacySet,
    PhotometryError,
    PointSource,
    point_source_illuminance,
    split_weather,
    to_illuminance,
)
from daylight.scene import WeatherSample
from daylight.solar import SunState

T = datetime(2008, 2, 10, 12)


def test_to_illuminance_examples():
    assert to_illuminance(100.0, 120.0) == 12_000.0
    assert to_illuminance(0.0, 120.0) == 0.0
    with pytest.raises(PhotometryError):
        to_illuminance(-1.0, 120.0)


def test_to_illuminance_linear():
    rng = np.random.default_rng(0)
    for a, b in rng.uniform(0, 1000, size=(50, 2)):
        assert to_illuminance(a + b, 110.0) == pytest.approx(to_illuminance(a, 110.0) + to_illuminance(b, 110.0))


def test_efficacy_bounds():
    EfficacySet(0.0, 250.0, 100.0)
    with pytest.raises(PhotometryError):
        EfficacySet(k_diffuse=260.0)
    with pytest.raises(PhotometryError):
        EfficacySet(k_beam=-1.0)


def test_split_weather_overcast_has_no_beam():
    k = EfficacySet()
    e_dh, e_bn = split_weather(WeatherSample(T, 300.0, 300.0), SunState(60.0, 10.0), k)
    assert e_bn == 0.0
    # all exterior light is diffuse, so it equals k_diffuse * GHI
    assert e_dh == k.k_diffuse * 300.0


def test_split_weather_beam_example():
    _, e_bn = split_weather(WeatherSample(T, 500.0, 200.0), SunState(30.0, 0.0), EfficacySet(k_beam=105.0))
    assert e_bn == pytest.approx(63_000.0, rel=1e-12)


def test_split_weather_horizon_cutoff():
    _, e_bn = split_weather(WeatherSample(T, 100.0, 20.0), SunState(2.0, 90.0), EfficacySet())
    assert e_bn == 0.0


def test_split_weather_inconsistent():
    class Bad:
        timestamp, ghi, dhi = T, 100.0, 150.0
    with pytest.raises(PhotometryError):
        split_weather(Bad(), SunState(30.0, 0.0), EfficacySet())


def test_point_source_examples():
    assert point_source_illuminance(PointSource((0, 0, 2), 1000.0), (0, 0, 0), (0, 0, 1)) == pytest.approx(250.0)
    assert point_source_illuminance(PointSource((0, 0, -2), 1000.0), (0, 0, 0), (0, 0, 1)) == 0.0
    src = PointSource((np.sin(np.radians(60)), 0, 0.5), 100.0)
    assert point_source_illuminance(src, (0, 0, 0), (0, 0, 1)) == pytest.approx(50.0)


def test_point_source_inverse_square():
    src = PointSource((0.3, -0.2, 0.0), 500.0)
    n = (0.2, 0.1, 1.0)
    near = point_source_illuminance(src, (0.1, 0.1, -1.0), n)
    q2 = np.array([0.3, -0.2, 0.0]) + 2 * (np.array([0.1, 0.1, -1.0]) - np.array([0.3, -0.2, 0.0]))
    assert point_source_illuminance(src, q2, n) / near == pytest.approx(0.25, rel=1e-12)


def test_point_source_errors():
    with pytest.raises(PhotometryError):
        point_source_illuminance(PointSource((1, 1, 1), 10.0), (1, 1, 1), (0, 0, 1))
    with pytest.raises(PhotometryError):
        PointSource((0, 0, 0), -1.0)
