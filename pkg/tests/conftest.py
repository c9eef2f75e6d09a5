import pathlib

import pytest
from hypothesis import HealthCheck, settings

from ghosttwin.scene import load_scene

settings.register_profile(
    "ci",
    derandomize=True,
    max_examples=40,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("ci")

GOLDEN_DIR = pathlib.Path(__file__).resolve().parent.parent / "src" / "ghosttwin" / "goldens"


@pytest.fixture(scope="session")
def golden_dir() -> pathlib.Path:
    return GOLDEN_DIR


@pytest.fixture(scope="session")
def room_scene_text() -> str:
    return (GOLDEN_DIR / "room_tidy.json").read_text(encoding="utf-8")


@pytest.fixture()
def room_scene(room_scene_text):
    return load_scene(room_scene_text)
