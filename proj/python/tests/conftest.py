import os
import shutil
from pathlib import Path

import pytest

ROOT = Path(os.environ.get("CRNLYAP_SOURCE_DIR", Path(__file__).resolve().parents[2]))


@pytest.fixture(scope="session")
def root():
    return ROOT


@pytest.fixture(scope="session")
def cli():
    path = os.environ.get("CRNLYAP_CLI") or shutil.which("crnlyap")
    if not path:
        candidate = ROOT / "build" / "tools" / "crnlyap"
        path = str(candidate) if candidate.exists() else None
    if not path:
        pytest.skip("crnlyap executable not found")
    return path
