"""
Shared fixtures
"""
import pytest

from tachyon.core.config import settings
from tachyon.core.numerics import PrecisionPolicy
from tachyon.schemas.tunnel_schemas import BarrierProfile


@pytest.fixture(autouse=True)
def isolated_logs(tmp_path, monkeypatch):
    """Keep log files of CLI runs out of the working tree"""
    monkeypatch.setattr(settings, "LOG_FILE", str(tmp_path / "logs" / "tachyon.log"))


@pytest.fixture
def fast_policy():
    """Short ladder for regular-region evaluations"""
    return PrecisionPolicy(start_digits=30, max_digits=120)


@pytest.fixture
def barrier():
    """Plateau of height 3 on [3, 5] with ramps from 2 and to 6"""
    return BarrierProfile(u_max=3.0, x_rise=2.0, x_plateau_start=3.0, x_plateau_end=5.0, x_fall=6.0)


@pytest.fixture
def low_barrier():
    return BarrierProfile(u_max=0.5, x_rise=2.0, x_plateau_start=3.0, x_plateau_end=5.0, x_fall=6.0)
