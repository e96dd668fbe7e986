import os
import sys

# Add the parent directory (backend) to the Python path
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

import pytest

from config import Settings
from core.tokenizer import get_tokenizer
from core.toy_corpus import generate_toy_corpus
from models.training import ModelConfig


def pytest_addoption(parser):
    parser.addoption("--runslow", action="store_true", default=False, help="run the multi-minute acceptance tests")


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: multi-minute training runs, enabled with --runslow")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--runslow"):
        return
    skip_slow = pytest.mark.skip(reason="needs --runslow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


@pytest.fixture(scope="session")
def test_settings():
    # Explicit values so a developer's .env cannot change test expectations.
    return Settings(_env_file=None, LOG_LEVEL="WARNING", NUM_WORKERS=1, FEATURE_CACHE_DIR="")


@pytest.fixture(scope="session")
def tokenizer(test_settings):
    return get_tokenizer(test_settings)


@pytest.fixture
def tiny_config(tokenizer):
    return ModelConfig(
        n_phonemes=len(tokenizer.ipa_inventory), n_styles=len(tokenizer.styles),
        embedding_dim=8, ffn_dim=16, n_heads=2, n_enc_layers=1, n_dec_layers=1,
        dropout=0.0, n_out=5, none_style_id=tokenizer.styles.none_id,
    )


@pytest.fixture(scope="session")
def toy_corpus(tmp_path_factory, test_settings, tokenizer):
    out_dir = tmp_path_factory.mktemp("toy")
    manifest, records = generate_toy_corpus(4, 7, out_dir, s=test_settings, tokenizer=tokenizer)
    return manifest, records
