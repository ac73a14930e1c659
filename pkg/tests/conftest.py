import os
from pathlib import Path

import pytest

from spectral_gnn.data import load_cora, planetoid_split

REPO_ROOT = Path(__file__).resolve().parent.parent


def _cora_dir() -> Path:
    return Path(os.environ.get("CORA_DIR", REPO_ROOT / "data" / "cora"))


@pytest.fixture(scope="session")
def cora_paths():
    content = _cora_dir() / "cora.content"
    cites = _cora_dir() / "cora.cites"
    if not content.exists() or not cites.exists():
        pytest.skip(
            f"canonical Cora files not found under {_cora_dir()} "
            "(set CORA_DIR to point at cora.content/cora.cites)"
        )
    return content, cites


@pytest.fixture(scope="session")
def cora_dataset(cora_paths):
    """Canonical Cora with the standard split, loaded once per session."""
    return planetoid_split(load_cora(*cora_paths))
