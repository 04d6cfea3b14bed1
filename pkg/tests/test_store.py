import json
from datetime import datetime, timezone

import pytest

from osnbehavior.errors import StoreVersionError
from osnbehavior.gmm import GmmFit, fit_gmm
from osnbehavior.loggrowth import LogGrowthFit
from osnbehavior.store import ModelStore, load_store, save_store


def test_empty_store_round_trip(tmp_path):
    path = tmp_path / "store.json"
    save_store(ModelStore(), path)
    doc = json.loads(path.read_text())
    assert set(doc) == {"format_version", "created_at", "user_fits", "message_fits"}
    assert doc["format_version"] == 1
    assert load_store(path) == ModelStore()


def test_store_with_fits_round_trip(tmp_path):
    import numpy as np

    rng = np.random.default_rng(3)
    samples = np.concatenate([rng.normal(9, 1, 300), rng.normal(20, 2, 300)])
    store = ModelStore(
        user_fits={"u1": {"daily": fit_gmm(samples)}},
        message_fits={"m1": LogGrowthFit(2.0000000000000004, 0.1 + 0.2, -3.5, sse=1e-30,
                                         iterations=7, converged=True)},
        created_at=datetime(2013, 5, 14, 13, 37, 22, tzinfo=timezone.utc),
    )
    path = tmp_path / "store.json"
    save_store(store, path)
    loaded = load_store(path)
    assert loaded == store
    assert loaded.user_fits["u1"]["daily"].mu1 == store.user_fits["u1"]["daily"].mu1
    doc = json.loads(path.read_text())
    assert doc["message_fits"]["m1"]["paper_params"]["k2"] == 0.1 + 0.2
    assert set(doc["user_fits"]["u1"]["daily"]) == {
        "w1", "mu1", "sigma1", "w2", "mu2", "sigma2",
        "n_events", "log_likelihood", "iterations", "converged"}


def test_save_is_byte_stable(tmp_path):
    store = ModelStore(user_fits={"b": {"daily": GmmFit(0.3, 8, 1, 0.7, 18, 2)},
                                  "a": {"daily": GmmFit(0.5, 9, 1, 0.5, 20, 1)}})
    save_store(store, tmp_path / "one.json")
    save_store(load_store(tmp_path / "one.json"), tmp_path / "two.json")
    assert (tmp_path / "one.json").read_bytes() == (tmp_path / "two.json").read_bytes()


def test_version_mismatch(tmp_path):
    path = tmp_path / "store.json"
    doc = ModelStore().to_dict()
    doc["format_version"] = 2
    path.write_text(json.dumps(doc))
    with pytest.raises(StoreVersionError):
        load_store(path)
