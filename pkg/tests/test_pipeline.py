import copy
import json
from decimal import Decimal, localcontext

import pytest

from kummer import bqf, discform as d, embed, pipeline as pl
from kummer.errors import SearchExhausted
import oracles


@pytest.fixture(scope="module")
def records():
    return pl.scan_sequence(80)


@pytest.fixture(scope="module")
def result3():
    return pl.construct_examples(3)


def test_record_shape(records):
    assert records[0].D == 5 and (records[0].p, records[0].q) == (1, 5)
    assert records[1].n == 2 and records[1].D == 17
    assert all(r.n != 9 for r in records)  # 325 = 5^2 * 13
    r65 = next(r for r in records if r.n == 4)
    assert (r65.p, r65.q, r65.h_plus) == (5, 13, 2)


def test_record_invariants(records):
    for r in records:
        assert r.check() == [], (r.n, r.check())


def test_records_against_oracle(records):
    for r in records[:30]:
        assert r.h_plus == oracles.narrow_class_number(r.D)


def test_record_h_sequence(records):
    seq = pl.record_h_sequence(records)
    assert seq[:4] == [(5, 1), (65, 2), (145, 4), (401, 5)]
    assert all(a[1] < b[1] for a, b in zip(seq, seq[1:]))


def test_siegel_brauer(records):
    table = pl.siegel_brauer_table(records)
    assert table[0]["ratio"] < 0
    eps = table[0]["epsilon"]
    with localcontext() as ctx:
        ctx.prec = 60
        assert abs(eps - (1 + Decimal(5).sqrt()) / 2) < Decimal(10) ** -45
    with pytest.raises(ValueError):
        pl.siegel_brauer_table([])


def test_construct_small(result3):
    assert pl.construct_examples(1).D == 5
    assert pl.construct_examples(2).D == 145
    assert result3.D == 401 and len(result3.forms) == 3
    ok, report = pl.verify_construction(result3)
    assert ok, report["failed"]
    names = {c["check"] for c in report["checks"]}
    assert {"pairwise_gl2_inequivalent", "complement_form_negated",
            "complement_isometries_onto", "same_genus"} <= names


def test_construction_against_oracle(result3):
    # N=2 and N=3 first appear at 145 and 401: check no smaller D qualifies
    for r in pl.scan_sequence(10):
        if r.D < 401:
            assert max(r.gl2_per_genus) < 3
        if r.D < 145:
            assert max(r.gl2_per_genus) < 2


def test_deterministic_json(result3):
    a = json.dumps(result3.to_json(), sort_keys=True)
    b = json.dumps(pl.construct_examples(3).to_json(), sort_keys=True)
    assert a == b


def test_verify_rejects_tampered_gram(result3):
    data = copy.deepcopy(result3.to_json())
    data["lattices"][1][0][0] += 2
    ok, report = pl.verify_construction(data)
    assert not ok and report["failed"] == "form_matches_gram"


def test_verify_rejects_duplicate_class(result3):
    data = copy.deepcopy(result3.to_json())
    f = bqf.BinaryForm(*data["forms"][0])
    g = bqf.rho(bqf.rho(f))  # same SL2 class, different coefficients
    data["forms"][1] = g.tolist()
    data["lattices"][1] = [list(r) for r in g.gram()]
    data["embeddings"][1] = embed.standard_embedding(g).tolist()
    ok, report = pl.verify_construction(data)
    assert not ok and report["failed"] == "pairwise_gl2_inequivalent"


def test_verify_rejects_wrong_complement(result3):
    data = copy.deepcopy(result3.to_json())
    data["complements"][2] = data["complements"][0] if data["complements"][0] != data["complements"][2] \
        else [[0, 1, 0, 0], [1, 0, 0, 0], [0, 0, 2, 0], [0, 0, 0, -2]]
    ok, report = pl.verify_construction(data)
    assert not ok and report["failed"] == "complement_recorded"


def test_verify_rejects_garbage():
    ok, report = pl.verify_construction({"N_requested": 1})
    assert not ok and report["failed"] == "well_formed"


def test_search_exhausted():
    with pytest.raises(SearchExhausted) as info:
        pl.construct_examples(50, n_max=20)
    assert info.value.n_max == 20 and info.value.best is not None


def test_cache_roundtrip(tmp_path):
    path = tmp_path / "c.json"
    cache = pl.ClassDataCache(path)
    first = pl.scan_sequence(30, cache)
    cache.save()
    assert path.exists()
    stored = json.loads(path.read_text())
    assert str(first[-1].D) in stored
    again = pl.scan_sequence(30, pl.ClassDataCache(path))
    assert [r.to_json() for r in again] == [r.to_json() for r in first]


def test_corrupt_cache_is_ignored(tmp_path):
    path = tmp_path / "c.json"
    path.write_text("{not json")
    cache = pl.ClassDataCache(path)
    assert cache.get(5) is None
    assert pl.scan_sequence(3, cache)[0].D == 5


def test_cache_env_override(tmp_path, monkeypatch):
    monkeypatch.setenv("KUMMER_CACHE", str(tmp_path / "x.json"))
    assert pl.default_cache_path() == tmp_path / "x.json"


def test_scan_rejects_bad_bound():
    with pytest.raises(ValueError):
        pl.scan_sequence(0)
    with pytest.raises(ValueError):
        pl.construct_examples(0)


def test_complement_isometries_onto_every_class():
    # O(T) -> O(A_T) is onto for every complement of a scanned class
    for r in pl.scan_sequence(50):
        for f in r.reps:
            e = embed.standard_embedding(f)
            L, _ = embed.split_complement(e)
            T = embed.complement_lattice(e)
            full = d.orthogonal_group(d.cyclic_from_lattice(T))
            assert d.plane_isometry_units(L) == full, (r.D, f)
