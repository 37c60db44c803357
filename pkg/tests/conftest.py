import pytest

from signum.dtree import TreeParams, fit
from signum.features import build_feature_matrix
from signum.synthdata import GeneratorConfig, SignInstance, generate_corpus


@pytest.fixture(scope="session")
def default_corpus():
    """The seed-7 corpus: 50 signs, 500 jittered instances."""
    cfg = GeneratorConfig()
    db, instances = generate_corpus(cfg)
    return cfg, db, instances


@pytest.fixture(scope="session")
def small_corpus():
    """A fast corpus for tests that only need structure, not statistics."""
    cfg = GeneratorConfig(alphabet_count=4, word_count=2, sentence_count=2,
                          instances_per_sign=4, min_feature_separation=1.0)
    db, instances = generate_corpus(cfg)
    return cfg, db, instances


@pytest.fixture(scope="session")
def tuned_tree(default_corpus):
    _cfg, _db, instances = default_corpus
    x, y = build_feature_matrix(instances, pad_arity=3)
    return fit(x, y, TreeParams(max_depth=6, min_samples_split=8, min_samples_leaf=4))


@pytest.fixture(scope="session")
def overfit_canonical_tree(default_corpus):
    """One pure leaf per sign: trained on the canonical templates alone."""
    _cfg, db, _instances = default_corpus
    canon = [SignInstance(s.id, 0, s) for s in db.signs]
    x, y = build_feature_matrix(canon, pad_arity=3)
    return fit(x, y, TreeParams(max_depth=None, min_samples_split=2,
                                min_samples_leaf=1))
