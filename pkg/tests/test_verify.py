import json
import math
import re
from pathlib import Path

import numpy as np
import pytest

from tangentgeom import verify as vf
from tangentgeom.errors import ConfigError
from tangentgeom.verify import CONFIRMED, DEVIATION, ERROR, NOT_APPLICABLE, RunConfig, run_suite

from helpers import DOCUMENTED_IDS, MUST


def test_registry_matches_documented_list():
    assert sorted(vf.REGISTRY_IDS) == sorted(DOCUMENTED_IDS)
    assert len(set(vf.REGISTRY_IDS)) == len(vf.REGISTRY_IDS)


def test_readme_lists_every_item():
    readme = (Path(__file__).resolve().parents[1] / "README.md").read_text()
    listed = set(re.findall(r"`((?:oracle|natural|sasaki|cg|geodesics)\.[\w.]+)`", readme))
    assert listed == set(DOCUMENTED_IDS)


def test_must_confirm_set():
    assert {e.id for e in vf.REGISTRY if e.must} == MUST


class _Sample:
    def __init__(self, index):
        self.index = index

    def descriptor(self):
        return {"index": self.index}


def _adjudicate(rows, tol=1e-6):
    col = vf.Collector()
    for i, (a, b) in enumerate(rows):
        col.add(_Sample(i), a, b)
    return vf.adjudicate(vf.Entry("t.item", "t", False, None), col, tol)


def test_absolute_floor():
    r = _adjudicate([([1e-10], [0.0]), ([1.0], [1.0])])
    assert r.status == CONFIRMED and r.max_rel_err == 0.0 and r.max_abs_err == 1e-10


def test_relative_error_and_worst_sample():
    r = _adjudicate([([1.0 + 1e-8], [1.0]), ([2.0], [1.0]), ([1.5], [1.0])])
    assert r.status == DEVIATION
    assert r.max_rel_err == pytest.approx(1.0)
    assert r.worst_sample == {"index": 1}
    assert r.n_samples == 3


def test_nonzero_error_against_zero_reference_is_infinite():
    r = _adjudicate([([1e-3], [0.0])])
    assert r.status == DEVIATION and math.isinf(r.max_rel_err)
    assert r.as_dict()["max_rel_err"] == "inf"


def test_tolerance_boundary():
    assert _adjudicate([([1.0 + 1e-6], [1.0])], tol=1e-6).status == CONFIRMED
    assert _adjudicate([([1.0 + 3e-6], [1.0])], tol=1e-6).status == DEVIATION


def _run_items(ids, cfg):
    ctx = vf.RunContext(cfg)
    return {e.id: vf.run_item(e, ctx) for e in vf.REGISTRY if e.id in ids}


def test_errors_and_inapplicability_are_item_level(monkeypatch):
    ctx = vf.RunContext(RunConfig(manifold="euclidean(2)", samples=2))

    def broken(ctx, col):
        raise RuntimeError("boom")

    def skipped(ctx, col):
        raise vf.NotApplicable("nothing to do")

    r = vf.run_item(vf.Entry("t.broken", "t", True, broken), ctx)
    assert r.status == ERROR and "boom" in r.note
    assert vf.run_item(vf.Entry("t.skip", "t", True, skipped), ctx).status == NOT_APPLICABLE
    rep = vf.VerificationReport({}, [r])
    assert rep.exit_code == 1 and rep.summary["error"] == 1


def test_exit_code_ignores_report_only_items():
    ok = vf.ItemResult("a", CONFIRMED, True, 1e-6)
    dev = vf.ItemResult("b", DEVIATION, False, 1e-6)
    na = vf.ItemResult("c", NOT_APPLICABLE, True, 1e-6)
    assert vf.VerificationReport({}, [ok, dev, na]).exit_code == 0
    assert vf.VerificationReport({}, [vf.ItemResult("d", DEVIATION, True, 1e-6)]).exit_code == 1


@pytest.mark.parametrize("kwargs", [{"samples": 0}, {"tol": 0.0}, {"manifold": "klein(2)"}, {"f": "exp(x1"},
                                    {"variants": ("kaehler",)}, {"suite": "nope"}, {"seed": -1}])
def test_invalid_configs(kwargs):
    with pytest.raises(ConfigError):
        run_suite(RunConfig(**kwargs))


def test_flat_unit_scaling_items_confirmed():
    cfg = RunConfig(manifold="euclidean(2)", f="1", seed=42, samples=5)
    ids = {"sasaki.thm3.5.forward", *[f"sasaki.prop3.2.{r}" for r in ("i", "ii", "iii", "iv")],
           *[f"cg.lemma5.5.{r}" for r in ("i", "ii", "iii")]}
    res = _run_items(ids, cfg)
    assert len(res) == len(ids)
    assert all(r.status == CONFIRMED for r in res.values())


def test_unflat_item_names_sample_and_component():
    res = _run_items({"sasaki.cor3.6.unflat"}, RunConfig(manifold="euclidean(2)", f="1 + 0.5*x1^2", samples=10))
    r = res["sasaki.cor3.6.unflat"]
    assert r.status == CONFIRMED
    assert r.detail["value"] >= 1e-3 and len(r.detail["component"]) == 4
    assert r.worst_sample["index"] == r.detail["sample"]


def test_variant_selection():
    res = _run_items({"cg.prop5.2.i", "sasaki.prop3.2.i"},
                     RunConfig(manifold="euclidean(2)", samples=2, variants=("sasaki",)))
    assert res["cg.prop5.2.i"].status == NOT_APPLICABLE
    assert res["sasaki.prop3.2.i"].status == CONFIRMED


def test_worst_sample_reproduces_error():
    from tangentgeom import sasaki as sk
    from tangentgeom.bundle import BundleMetric, Variant
    from tangentgeom.local import LocalGeometry
    from tangentgeom.manifold import ScalingField, TangentPoint, resolve_manifold
    from tangentgeom.oracle import BundleOracle

    cfg = RunConfig(manifold="sphere_stereo(1)", f="exp(x1)", samples=5)
    r = _run_items({"sasaki.prop3.4.v"}, cfg)["sasaki.prop3.4.v"]
    assert r.status == DEVIATION
    w = r.worst_sample
    M = resolve_manifold(cfg.manifold)
    f = ScalingField.parse(cfg.f, 2)
    tp = TangentPoint(w["x"], w["u"])
    X, Y, Z = (np.array(v) for v in w["vectors"])
    a = sk.curvature(LocalGeometry(M, f, tp), "hhv", X, Y, Z).stacked()
    b = BundleOracle(BundleMetric(Variant.SASAKI, M, f), tp).lifted_curvature("hhv", X, Y, Z).stacked()
    assert np.abs(a - b).max() / np.abs(b).max() == pytest.approx(r.max_rel_err, rel=1e-12)


def test_report_schema_and_determinism():
    cfg = RunConfig(manifold="poincare_disk()", f="1 + x1^2", samples=3, suite="sasaki")
    a, b = run_suite(cfg), run_suite(cfg)
    da, db = json.loads(a.to_json()), json.loads(b.to_json())
    assert da["schema"] == 1
    assert {"config", "items", "summary", "timestamp"} <= set(da)
    assert {"confirmed", "deviation", "error"} <= set(da["summary"])
    assert set(da["items"][0]) >= {"id", "status", "max_abs_err", "max_rel_err", "tol", "worst_sample", "n_samples"}
    da.pop("timestamp"), db.pop("timestamp")
    assert json.dumps(da) == json.dumps(db)
    assert [i["id"] for i in da["items"]] == [e.id for e in vf.selected_entries("sasaki")]
    assert a.to_csv().splitlines()[0].startswith("id,status,must_confirm")
