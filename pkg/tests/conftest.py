from __future__ import annotations

import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from bciui.correction_engine import CorrectionPipeline, train_ngram
from bciui.decoder_sim import bundled_corpus_path, bundled_lexicon_path, load_lexicon
from bciui.correction_engine import load_corpus


TOY_LEXICON = {
    "hello": ("HH", "AH", "L", "OW"),
    "how": ("HH", "AW"),
    "are": ("AA", "R"),
    "did": ("D", "IH", "D"),
    "you": ("Y", "UW"),
}

TOY_CORPUS = (
    [["hello", "how", "are", "you"]] * 8
    + [["how", "are", "you"]] * 4
    + [["hello", "how", "did", "you"]] * 1
    + [["did", "you", "hello"]] * 1
)


@pytest.fixture(scope="session")
def toy_lexicon():
    return dict(TOY_LEXICON)


@pytest.fixture(scope="session")
def toy_lm():
    return train_ngram(TOY_CORPUS, 3, 0.01)


@pytest.fixture(scope="session")
def bundled_lexicon():
    return load_lexicon(bundled_lexicon_path())


@pytest.fixture(scope="session")
def bundled_lm():
    return train_ngram(load_corpus(bundled_corpus_path()), 3, 0.01)


@pytest.fixture(scope="session")
def bundled_pipeline(bundled_lexicon, bundled_lm):
    return CorrectionPipeline(bundled_lexicon, bundled_lm)
