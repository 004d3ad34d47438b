"""Search the discriminants ``4n^2 + 1 = pq`` and build many lattices in one genus.

For such ``D`` the narrow class number grows without bound, the genus of
any form of discriminant ``D`` holds at least ``h(D)/4`` isomorphism
classes of rank-2 lattices, and every one of them embeds primitively into
``U^3`` with the same orthogonal complement up to isometry.
"""
from __future__ import annotations

import json
import logging
import os
import tempfile
from dataclasses import dataclass, field
from decimal import Decimal, localcontext
from fractions import Fraction
from pathlib import Path

from . import bqf
from .discform import (
    CyclicForm,
    cyclic_from_lattice,
    isomorphic_forms,
    orthogonal_group,
    plane_isometry_units,
)
from .embed import (
    EmbeddingMatrix,
    complement_lattice,
    glue_map,
    nikulin_unique_genus,
    split_complement,
    standard_embedding,
)
from .errors import OverflowScope, SearchExhausted
from .lattice import EvenLattice
from .primes import MAX_BITS, pq_shape

log = logging.getLogger(__name__)

DEFAULT_N_MAX = 500

HODGE_NOTE = (
    "lattices and embeddings only: the abelian surfaces A_i exist by the "
    "surjectivity of the period map for complex 2-tori applied to a maximal "
    "Hodge structure on T; isometries T -> T_i exist by uniqueness in the "
    "genus of T and are not constructed"
)


# --------------------------------------------------------------------------
# class data, optionally cached on disk


def default_cache_path() -> Path:
    env = os.environ.get("KUMMER_CACHE")
    if env:
        return Path(env)
    return Path.home() / ".cache" / "kummer" / "classdata.json"


class ClassDataCache:
    """JSON file of per-discriminant class data keyed by ``D``.

    Only an optimization for scans; verification never reads it.  Writes
    go to a temporary file that is renamed over the target.
    """

    def __init__(self, path=None):
        self.path = Path(path) if path is not None else default_cache_path()
        self._data: dict = {}
        self._dirty = False
        if self.path.exists():
            try:
                self._data = json.loads(self.path.read_text())
            except (OSError, ValueError):
                log.warning("ignoring unreadable cache %s", self.path)
                self._data = {}

    def get(self, D: int):
        return self._data.get(str(D))

    def put(self, D: int, entry: dict):
        self._data[str(D)] = entry
        self._dirty = True

    def save(self):
        if not self._dirty:
            return
        self.path.parent.mkdir(parents=True, exist_ok=True)
        fd, tmp = tempfile.mkstemp(dir=self.path.parent, prefix=".classdata-", suffix=".tmp")
        try:
            with os.fdopen(fd, "w") as fh:
                json.dump(self._data, fh, sort_keys=True)
            os.replace(tmp, self.path)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise
        self._dirty = False


def class_data(D: int) -> dict:
    """Class representatives, genera and GL2-pairs of discriminant ``D``."""
    cg = bqf.cached_class_group(D)
    genera = bqf.genus_split(cg)
    gl2 = [bqf.gl2_classes(cg, g) for g in genera]
    return {
        "h_plus": cg.h_plus,
        "reps": [f.tolist() for f in cg.reps],
        "genera": genera,
        "gl2": gl2,
    }


# --------------------------------------------------------------------------
# the scan


@dataclass
class SearchRecord:
    n: int
    D: int
    p: int
    q: int
    h_plus: int
    genus_sizes: list
    gl2_per_genus: list
    unit: bqf.UnitData
    sb_ratio: Decimal
    reps: list = field(default_factory=list, repr=False)
    genera: list = field(default_factory=list, repr=False)
    gl2: list = field(default_factory=list, repr=False)

    def unit_below_bound(self) -> bool:
        """``epsilon <= 2n + sqrt(D)``, decided exactly."""
        t, u = self.unit.t, self.unit.u
        return bqf.quadratic_sign(4 * self.n - t, 2 - u, self.D) >= 0

    def unit_between_one_and_D(self) -> bool:
        t, u = self.unit.t, self.unit.u
        above_one = bqf.quadratic_sign(t - 2, u, self.D) > 0
        below_d = bqf.quadratic_sign(2 * self.D - t, -u, self.D) > 0
        return above_one and below_d

    def check(self) -> list:
        """Names of violated record invariants (empty when all hold)."""
        bad = []
        if 4 * self.n * self.n + 1 != self.D or self.p * self.q != self.D:
            bad.append("factorization")
        if self.unit.norm_sign != -1:
            bad.append("unit_norm")
        if not self.unit_below_bound() or not self.unit_between_one_and_D():
            bad.append("unit_bound")
        if len(set(self.genus_sizes)) != 1:
            bad.append("genus_sizes_equal")
        if 4 * max(self.gl2_per_genus) < self.h_plus:
            bad.append("gl2_quarter_bound")
        return bad

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "D": self.D,
            "p": self.p,
            "q": self.q,
            "h_plus": self.h_plus,
            "genus_sizes": self.genus_sizes,
            "gl2_per_genus": self.gl2_per_genus,
            "unit": self.unit.to_json(),
            "sb_ratio": str(self.sb_ratio),
        }


def siegel_brauer_ratio(D: int, h: int, unit: bqf.UnitData, digits: int = bqf.UNIT_DIGITS) -> Decimal:
    """``log(h log eps) / log D``; tends to 1/2 along fundamental discriminants."""
    with localcontext() as ctx:
        ctx.prec = digits + 10
        eps = (Decimal(unit.t) + Decimal(unit.u) * Decimal(unit.D).sqrt()) / 2
        val = (Decimal(h) * eps.ln()).ln() / Decimal(D).ln()
        ctx.prec = digits
        return +val


def make_record(n: int, cache: ClassDataCache | None = None) -> SearchRecord | None:
    """Record for ``n``, or ``None`` when ``4n^2 + 1`` is not ``p`` or ``pq``."""
    D = 4 * n * n + 1
    if D.bit_length() > MAX_BITS:
        raise OverflowScope(f"D = {D} exceeds {MAX_BITS} bits")
    shape = pq_shape(D)
    if shape is None:
        log.info("n=%d: D=%d is not of the form p or pq, skipped", n, D)
        return None
    p, q = shape
    data = cache.get(D) if cache is not None else None
    if data is None:
        data = class_data(D)
        if cache is not None:
            cache.put(D, data)
    unit = bqf.fundamental_unit(D)
    return SearchRecord(
        n=n, D=D, p=p, q=q,
        h_plus=data["h_plus"],
        genus_sizes=[len(g) for g in data["genera"]],
        gl2_per_genus=[len(g) for g in data["gl2"]],
        unit=unit,
        sb_ratio=siegel_brauer_ratio(D, data["h_plus"], unit),
        reps=[bqf.BinaryForm(*r) for r in data["reps"]],
        genera=data["genera"],
        gl2=data["gl2"],
    )


def scan_sequence(n_max: int, cache: ClassDataCache | None = None) -> list:
    if n_max < 1:
        raise ValueError("n_max must be at least 1")
    records = []
    for n in range(1, n_max + 1):
        rec = make_record(n, cache)
        if rec is not None:
            records.append(rec)
    return records


def record_h_sequence(records) -> list:
    """Successive record-breaking class numbers ``(D, h_plus)`` in scan order."""
    out = []
    best = 0
    for r in records:
        if r.h_plus > best:
            best = r.h_plus
            out.append((r.D, r.h_plus))
    return out


def siegel_brauer_table(records) -> list:
    if not records:
        raise ValueError("siegel_brauer_table needs at least one record")
    return [
        {"n": r.n, "D": r.D, "h_plus": r.h_plus,
         "epsilon": r.unit.epsilon_approx, "ratio": r.sb_ratio}
        for r in records
    ]


# --------------------------------------------------------------------------
# construction


@dataclass
class ConstructionResult:
    N_requested: int
    n: int
    D: int
    p: int
    q: int
    forms: list
    lattices: list
    embeddings: list
    complement: list
    complements: list
    certificates: dict
    notes: list

    def to_json(self) -> dict:
        return {
            "N_requested": self.N_requested,
            "n": self.n,
            "D": self.D,
            "p": self.p,
            "q": self.q,
            "forms": self.forms,
            "lattices": self.lattices,
            "embeddings": self.embeddings,
            "complement": self.complement,
            "complements": self.complements,
            "certificates": self.certificates,
            "notes": self.notes,
        }


def _gl2_cycle_certificate(f: bqf.BinaryForm) -> list:
    forms = set(bqf.cycle(f)) | set(bqf.cycle(f.opposite()))
    return [g.tolist() for g in sorted(forms)]


def _select(rec: SearchRecord, N: int):
    """First genus (in class order) with at least ``N`` GL2-classes, and
    its ``N`` smallest GL2-class representatives.
    """
    for pairs in rec.gl2:
        if len(pairs) >= N:
            reps = sorted(min(rec.reps[i] for i in pair) for pair in pairs)
            return reps[:N]
    return None


def build_result(rec: SearchRecord, forms: list, N: int) -> ConstructionResult:
    lattices, embeddings, complements = [], [], []
    disc, comp_disc = [], []
    for f in forms:
        e = standard_embedding(f)
        T = complement_lattice(e)
        lattices.append([list(r) for r in f.gram()])
        embeddings.append(e.tolist())
        complements.append(T.tolist())
        disc.append(cyclic_from_lattice(EvenLattice(f.gram())).to_json())
        comp_disc.append(cyclic_from_lattice(T).to_json())
    certificates = {
        "gl2_cycles": [_gl2_cycle_certificate(f) for f in forms],
        "discriminant_forms": disc,
        "complement_discriminant_forms": comp_disc,
        "complement_signature": [2, 2],
        "nikulin_unique_genus": True,
    }
    return ConstructionResult(
        N_requested=N, n=rec.n, D=rec.D, p=rec.p, q=rec.q,
        forms=[f.tolist() for f in forms],
        lattices=lattices,
        embeddings=embeddings,
        complement=complements[0],
        complements=complements,
        certificates=certificates,
        notes=[HODGE_NOTE],
    )


def construct_examples(N: int, n_max: int = DEFAULT_N_MAX, cache: ClassDataCache | None = None) -> ConstructionResult:
    """``N`` pairwise non-isomorphic even hyperbolic rank-2 lattices in one
    genus, from the smallest qualifying ``D = 4n^2 + 1``.
    """
    if N < 1:
        raise ValueError("N must be at least 1")
    best = None
    for n in range(1, n_max + 1):
        rec = make_record(n, cache)
        if rec is None:
            continue
        if best is None or max(rec.gl2_per_genus) > max(best.gl2_per_genus):
            best = rec
        forms = _select(rec, N)
        if forms is not None:
            return build_result(rec, forms, N)
    raise SearchExhausted(n_max, best)


# --------------------------------------------------------------------------
# verification (independent of the cache and of construction internals)


def _as_dict(result) -> dict:
    return result.to_json() if isinstance(result, ConstructionResult) else result


def verify_construction(result) -> tuple:
    """Recheck every claim of a construction from its raw data.

    Returns ``(ok, report)``; ``report["failed"]`` names the first failing
    check.
    """
    r = _as_dict(result)
    checks = []
    state = {"failed": None}

    def record(name, ok, detail=""):
        checks.append({"check": name, "ok": bool(ok), "detail": detail})
        if not ok and state["failed"] is None:
            state["failed"] = name
        return ok

    try:
        _run_checks(r, record)
    except Exception as exc:  # malformed input counts as a failed check
        record("well_formed", False, f"{type(exc).__name__}: {exc}")
    ok = state["failed"] is None
    return ok, {"ok": ok, "failed": state["failed"], "checks": checks}


def _certificate_form(d: dict) -> CyclicForm:
    return CyclicForm(d["m"], Fraction(d["q_gen"]))


def _run_checks(r: dict, record):
    N = r["N_requested"]
    D, n, p, q = r["D"], r["n"], r["p"], r["q"]
    forms = [bqf.BinaryForm(*f) for f in r["forms"]]
    grams = r["lattices"]
    if not record("count", len(forms) == N == len(grams) == len(r["embeddings"])):
        return
    record("sequence_shape", 4 * n * n + 1 == D == p * q and pq_shape(D) == (p, q))

    lattices = []
    for f, g in zip(forms, grams):
        lat = EvenLattice(g)
        lattices.append(lat)
        if not record("form_matches_gram", [list(x) for x in f.gram()] == g, str(f.tolist())):
            return
        if not record("hyperbolic_det", lat.det == -D and lat.signature == (1, 1), str(g)):
            return

    cycles = [set(bqf.cycle(f)) | set(bqf.cycle(f.opposite())) for f in forms]
    for i in range(N):
        for j in range(i + 1, N):
            if not record("pairwise_gl2_inequivalent", not (cycles[i] & cycles[j]),
                          f"lattices {i} and {j} share a reduction cycle"):
                return
    cert = r.get("certificates", {}).get("gl2_cycles")
    if cert is not None:
        recomputed = [[g.tolist() for g in sorted(c)] for c in cycles]
        record("cycle_certificate", cert == recomputed)

    disc = [cyclic_from_lattice(lat) for lat in lattices]
    record("same_genus", all(isomorphic_forms(disc[0], d) for d in disc))
    cert_disc = r.get("certificates", {}).get("discriminant_forms")
    if cert_disc is not None:
        record("discriminant_certificate", len(cert_disc) == N and all(
            isomorphic_forms(_certificate_form(c), d) for c, d in zip(cert_disc, disc)))

    comp_disc = []
    for i, (f, rows) in enumerate(zip(forms, r["embeddings"])):
        e = EmbeddingMatrix(rows)
        if not record("embedding_pullback", [list(x) for x in e.pullback_gram()] == grams[i], f"index {i}"):
            return
        if not record("embedding_primitive", e.is_primitive(), f"index {i}"):
            return
        T = complement_lattice(e)
        record("complement_signature", T.signature == (2, 2), f"index {i}")
        record("complement_det", abs(T.det) == D == abs(lattices[i].det), f"index {i}")
        record("complement_recorded", r["complements"][i] == T.tolist(), f"index {i}")
        gm = glue_map(e)
        record("complement_discriminant_form", gm.is_anti_isometry(), f"index {i}")
        cd = cyclic_from_lattice(T)
        record("complement_form_negated", isomorphic_forms(cd, disc[i].negate()), f"index {i}")
        record("nikulin_unique_genus", nikulin_unique_genus(T), f"index {i}")
        # O(T) -> O(A_T) onto, witnessed by explicit isometries of T = L ⊕ U
        L, _ = split_complement(e)
        record("complement_isometries_onto",
               plane_isometry_units(L) == orthogonal_group(cd), f"index {i}")
        comp_disc.append(cd)
    record("complements_one_genus", all(isomorphic_forms(comp_disc[0], c) for c in comp_disc))
    record("common_complement", r["complement"] == r["complements"][0])
