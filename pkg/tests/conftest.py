import numpy as np
import pytest

from rclass.config import HyperParams
from rclass.model import ModelState, Rule


def make_rule(centroid, inv_cov=None, n_classes=4, class_idx=0, support=1.0,
              out_weights=None, rec=1.0, out_cov_scale=1e3):
    centroid = np.asarray(centroid, dtype=float)
    u = centroid.shape[0]
    if inv_cov is None:
        inv_cov = np.eye(u)
    k = 2 * u + 1
    if out_weights is None:
        out_weights = np.zeros((n_classes, k))
    class_support = np.zeros(n_classes)
    class_support[class_idx] = support
    return Rule(
        centroid=centroid,
        inv_cov=np.asarray(inv_cov, dtype=float),
        out_weights=np.asarray(out_weights, dtype=float),
        rec_weights=np.full(n_classes, float(rec)),
        out_cov=out_cov_scale * np.eye(k),
        support=support,
        class_support=class_support,
    )


def make_model(rules=(), n_features=2, n_classes=4, **config_kwargs):
    model = ModelState(n_features, n_classes, HyperParams(**config_kwargs))
    model.rules = list(rules)
    return model


def random_spd(rng, u, scale=1.0):
    a = rng.standard_normal((u, u))
    return scale * (a @ a.T + u * np.eye(u))


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
