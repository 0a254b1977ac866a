import os
from pathlib import Path

import pytest

FIXTURE_DIR = Path(__file__).resolve().parent / "fixtures"

# Real handwritten-digit data is optional: tests that need the actual
# dataset read its directory from this variable and skip when unset.
MNIST_ENV_VAR = "SPECKLE_CS_MNIST_DIR"


@pytest.fixture(scope="session")
def fixture_dir() -> Path:
    return FIXTURE_DIR


@pytest.fixture(scope="session")
def generator_fixture_path() -> Path:
    path = FIXTURE_DIR / "generator_small.ggw"
    assert path.is_file(), "run tools/make_fixture.py to regenerate fixtures"
    return path


@pytest.fixture(scope="session")
def digits_fixture_dir() -> Path:
    path = FIXTURE_DIR / "digits"
    assert path.is_dir(), "run tools/make_fixture.py to regenerate fixtures"
    return path


@pytest.fixture(scope="session")
def mnist_dir():
    path = os.environ.get(MNIST_ENV_VAR)
    if not path:
        pytest.skip(f"set {MNIST_ENV_VAR} to run tests against the real dataset")
    return Path(path)
