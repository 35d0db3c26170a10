"""Scenario-driven experiment runner.

A scenario is one JSON document (``"schema": 1``)::

    {
      "schema": 1,
      "operator_source": {"kind": "random_psd", "dim": 8, "seed": 42, "spectral_scale": 1.0},
      "projection": {"rank": 4, "seed": 42},            # optional, needed by "zeno"
      "schemes": [{"variant": "trotter_plain"},
                  {"variant": "kato_product", "f": {"variant": "exp"},
                   "g": {"variant": "resolvent_power", "k": 2}}],
      "n_values": [1, 2, 4, 8],
      "T": 1.0,
      "grid": {"panels": 8, "points": 16},
      "h": {"kind": "random", "seed": 42},
      "metrics": [{"kind": "l2"}, {"kind": "measure", "eta": 0.1}],
      "output": "out/run1"
    }

Operator sources: ``random_psd`` (``dim``, ``seed``, ``spectral_scale``),
``explicit`` (``path`` to a JSON file with ``"a"``, ``"b"`` and optional
``"p"`` matrices; entries are numbers or ``[re, im]`` pairs) and
``schrodinger_1d`` (``d``, ``L``, ``potential``: ``{"id": ..., params}``).
``h`` kinds: ``basis`` (``index``), ``random`` (``seed``), ``constant``.
Metric kinds: ``l2``, ``measure`` (``eta``), ``sup`` (real-time schemes),
``operator_l2``, ``chernoff`` (boundary resolvent error at ``tau = 1/n``).
"""
from __future__ import annotations

import hashlib
import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import seeding
from .errors import (
    ConfigParse,
    PotentialSingularOnGrid,
    SchemeRejected,
    TrotterKatoError,
    ValidationError,
)
from .products import (
    REAL_TIME_VARIANTS,
    ConvergenceReport,
    Metric,
    OperatorPair,
    prepare_vector,
    evaluate_metric,
    make_pair,
    normalize,
    reports_to_csv,
    scheme_from_json,
)
from .quadrature import time_grid

SCHEMA_VERSION = 1
MAX_SCHRODINGER_D = 512


# --- Schrodinger operators ---------------------------------------------------

def _zero(x):
    return np.zeros_like(x)


def _harmonic(x, c=1.0):
    return c * x ** 2


def _inverse_power(x, p=1.5, g=1.0):
    with np.errstate(divide="ignore"):
        return g * np.abs(x) ** (-p)


def _barrier(x, height=1.0, width=0.5):
    return np.where(np.abs(x) < width, height, 0.0)


# id -> (function, singular points)
POTENTIALS = {
    "zero": (_zero, ()),
    "harmonic": (_harmonic, ()),
    "inverse_power": (_inverse_power, (0.0,)),
    "barrier": (_barrier, ()),
}


def schrodinger_nodes(d: int, L: float, singular=()) -> np.ndarray:
    """Interior nodes ``-L + j * 2L/(d+1)``; shifted by half a step if a
    singular point of the potential falls on a node."""
    step = 2.0 * L / (d + 1)
    x = -L + step * np.arange(1, d + 1)
    for s in singular:
        if np.min(np.abs(x - s)) < 1e-12 * step:
            x = x + 0.5 * step
            break
    return x


def assemble_schrodinger(d: int, L: float, potential: dict,
                         projection=None) -> OperatorPair:
    """Dense ``A = -Laplacian/2`` (Dirichlet second differences) and ``B = diag(V)``."""
    if int(d) != d or d < 8:
        raise ValidationError(f"d must be an integer >= 8, got {d!r}")
    if not (L > 0 and math.isfinite(L)):
        raise ValidationError(f"L must be a positive finite number, got {L!r}")
    pid = potential.get("id")
    if pid not in POTENTIALS:
        raise ConfigParse(f"unknown potential id {pid!r}", "operator_source.potential.id")
    fn, singular = POTENTIALS[pid]
    params = {k: v for k, v in potential.items() if k != "id"}
    for k, v in params.items():
        if not isinstance(v, (int, float)) or not math.isfinite(v):
            raise ConfigParse(f"potential parameter {k} must be a finite number",
                              f"operator_source.potential.{k}")
    d = int(d)
    x = schrodinger_nodes(d, L, singular)
    try:
        v = np.asarray(fn(x, **params), dtype=float)
    except TypeError as exc:
        raise ConfigParse(str(exc), "operator_source.potential") from exc
    if not np.all(np.isfinite(v)):
        raise PotentialSingularOnGrid(f"potential {pid!r} is infinite at a grid node")
    if np.any(v < 0):
        raise ValidationError(f"potential {pid!r} must be non-negative")
    step = 2.0 * L / (d + 1)
    lap = (np.diag(np.full(d, 2.0)) - np.diag(np.ones(d - 1), 1) - np.diag(np.ones(d - 1), -1))
    a = 0.5 * lap / step ** 2
    return make_pair(a, np.diag(v), projection)


# --- scenario ----------------------------------------------------------------

def _require(obj, key, where):
    if key not in obj:
        raise ConfigParse(f"missing field {key!r}", where)
    return obj[key]


def _number(value, where, positive=False):
    if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
        raise ConfigParse("must be a finite number", where)
    if positive and not value > 0:
        raise ConfigParse("must be > 0", where)
    return value


def _integer(value, where, minimum=None):
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigParse("must be an integer", where)
    if minimum is not None and value < minimum:
        raise ConfigParse(f"must be >= {minimum}", where)
    return value


def _normalize_source(src) -> dict:
    where = "operator_source"
    if not isinstance(src, dict):
        raise ConfigParse("must be an object", where)
    kind = _require(src, "kind", where)
    if kind == "random_psd":
        return {"kind": kind,
                "dim": _integer(_require(src, "dim", where), f"{where}.dim", 1),
                "seed": _integer(_require(src, "seed", where), f"{where}.seed", 0),
                "spectral_scale": float(_number(src.get("spectral_scale", 1.0),
                                                f"{where}.spectral_scale", True))}
    if kind == "explicit":
        path = _require(src, "path", where)
        if not isinstance(path, str):
            raise ConfigParse("must be a string", f"{where}.path")
        return {"kind": kind, "path": path}
    if kind == "schrodinger_1d":
        d = _integer(_require(src, "d", where), f"{where}.d", 8)
        if d & (d - 1) or d > MAX_SCHRODINGER_D:
            raise ConfigParse(f"must be a power of two <= {MAX_SCHRODINGER_D}", f"{where}.d")
        pot = _require(src, "potential", where)
        if not isinstance(pot, dict) or "id" not in pot:
            raise ConfigParse("must be an object with an 'id'", f"{where}.potential")
        if pot["id"] not in POTENTIALS:
            raise ConfigParse(f"unknown potential id {pot['id']!r}", f"{where}.potential.id")
        for k, v in pot.items():
            if k != "id":
                _number(v, f"{where}.potential.{k}")
        return {"kind": kind, "d": d,
                "L": float(_number(_require(src, "L", where), f"{where}.L", True)),
                "potential": dict(pot)}
    raise ConfigParse(f"unknown operator source kind {kind!r}", f"{where}.kind")


def _normalize_h(h) -> dict:
    where = "h"
    if not isinstance(h, dict):
        raise ConfigParse("must be an object", where)
    kind = _require(h, "kind", where)
    if kind == "basis":
        return {"kind": kind, "index": _integer(_require(h, "index", where), "h.index", 0)}
    if kind == "random":
        return {"kind": kind, "seed": _integer(_require(h, "seed", where), "h.seed", 0)}
    if kind == "constant":
        return {"kind": kind}
    raise ConfigParse(f"unknown h kind {kind!r}", "h.kind")


def _normalize_projection(p):
    if p is None:
        return None
    where = "projection"
    if not isinstance(p, dict):
        raise ConfigParse("must be an object", where)
    if "indices" in p:
        idx = p["indices"]
        if not isinstance(idx, list) or not idx or any(
                isinstance(i, bool) or not isinstance(i, int) or i < 0 for i in idx):
            raise ConfigParse("must be a non-empty list of non-negative integers", "projection.indices")
        return {"indices": sorted(set(idx))}
    return {"rank": _integer(_require(p, "rank", where), "projection.rank", 1),
            "seed": _integer(p.get("seed", 0), "projection.seed", 0)}


@dataclass(frozen=True)
class Scenario:
    operator_source: dict
    schemes: tuple
    n_values: tuple
    metrics: tuple
    T: float = 1.0
    grid: dict = field(default_factory=lambda: {"panels": 8, "points": 16})
    h: dict = field(default_factory=lambda: {"kind": "basis", "index": 0})
    projection: dict | None = None
    output: str = "report"

    @classmethod
    def from_json(cls, obj) -> "Scenario":
        if not isinstance(obj, dict):
            raise ConfigParse("scenario must be a JSON object")
        schema = obj.get("schema", SCHEMA_VERSION)
        if schema != SCHEMA_VERSION:
            raise ConfigParse(f"unsupported schema version {schema!r}", "schema")
        known = {"schema", "operator_source", "projection", "schemes", "n_values", "T",
                 "grid", "h", "metrics", "output"}
        extra = sorted(set(obj) - known)
        if extra:
            raise ConfigParse(f"unknown field(s) {extra}", extra[0])

        source = _normalize_source(_require(obj, "operator_source", "operator_source"))

        schemes_raw = _require(obj, "schemes", "schemes")
        if not isinstance(schemes_raw, list) or not schemes_raw:
            raise ConfigParse("schemes must be non-empty", "schemes")
        schemes = []
        for i, s in enumerate(schemes_raw):
            try:
                schemes.append(scheme_from_json(s).to_json())
            except (ConfigParse, SchemeRejected):
                raise
            except ValidationError as exc:
                raise ConfigParse(str(exc), f"schemes[{i}]") from exc

        ns = _require(obj, "n_values", "n_values")
        if not isinstance(ns, list) or not ns:
            raise ConfigParse("n_values must be a non-empty list", "n_values")
        for i, n in enumerate(ns):
            _integer(n, f"n_values[{i}]", 1)
        if any(b <= a for a, b in zip(ns, ns[1:])):
            raise ConfigParse("n_values must be strictly increasing", "n_values")

        T = float(_number(obj.get("T", 1.0), "T", True))
        grid = obj.get("grid", {"panels": 8, "points": 16})
        if not isinstance(grid, dict):
            raise ConfigParse("must be an object", "grid")
        grid = {"panels": _integer(grid.get("panels", 8), "grid.panels", 1),
                "points": _integer(grid.get("points", 16), "grid.points", 1)}

        metrics_raw = _require(obj, "metrics", "metrics")
        if not isinstance(metrics_raw, list) or not metrics_raw:
            raise ConfigParse("metrics must be non-empty", "metrics")
        metrics = []
        for i, m in enumerate(metrics_raw):
            if not isinstance(m, dict) or "kind" not in m:
                raise ConfigParse("metric must be an object with a 'kind'", f"metrics[{i}]")
            try:
                metric = Metric(m["kind"], m.get("eta"))
            except ValidationError as exc:
                raise ConfigParse(str(exc), f"metrics[{i}]") from exc
            metrics.append(metric.to_json())
            if metric.kind == "sup":
                unitary = [s["variant"] for s in schemes if s["variant"] not in REAL_TIME_VARIANTS]
                if unitary:
                    raise ConfigParse(f"sup metric needs real-time schemes, got {unitary}",
                                      f"metrics[{i}]")

        projection = _normalize_projection(obj.get("projection"))
        if any(s["variant"] == "zeno" for s in schemes) and projection is None \
                and source["kind"] != "explicit":
            raise ConfigParse("the zeno scheme needs a projection", "projection")

        output = obj.get("output", "report")
        if not isinstance(output, str) or not output:
            raise ConfigParse("must be a non-empty string", "output")
        return cls(source, tuple(schemes), tuple(ns), tuple(metrics), T, grid,
                   _normalize_h(obj.get("h", {"kind": "basis", "index": 0})),
                   projection, output)

    def to_json(self) -> dict:
        obj = {"schema": SCHEMA_VERSION, "operator_source": self.operator_source,
               "schemes": list(self.schemes), "n_values": list(self.n_values), "T": self.T,
               "grid": self.grid, "h": self.h, "metrics": list(self.metrics),
               "output": self.output}
        if self.projection is not None:
            obj["projection"] = self.projection
        return obj

    def digest(self) -> str:
        text = json.dumps(self.to_json(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(text.encode()).hexdigest()

    @property
    def is_demonstration(self) -> bool:
        return self.operator_source["kind"] == "schrodinger_1d"


def load_scenario(path) -> Scenario:
    path = Path(path)
    text = path.read_text()
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigParse(exc.msg, f"line {exc.lineno}") from exc
    return Scenario.from_json(obj)


def emit_scenario(scenario: Scenario) -> str:
    return json.dumps(scenario.to_json(), indent=2, sort_keys=True) + "\n"


# --- operator assembly -------------------------------------------------------

def _matrix_from_json(m, where):
    try:
        rows = [[complex(x[0], x[1]) if isinstance(x, list) else complex(x) for x in row]
                for row in m]
        arr = np.array(rows, dtype=complex)
    except (TypeError, ValueError, IndexError) as exc:
        raise ConfigParse(f"malformed matrix: {exc}", where) from exc
    if arr.ndim != 2:
        raise ConfigParse("matrix must be a list of equal-length rows", where)
    return arr


def _projection_matrix(spec, dim):
    if spec is None:
        return None
    if "indices" in spec:
        if max(spec["indices"]) >= dim:
            raise ConfigParse(f"index out of range for dim {dim}", "projection.indices")
        diag = np.zeros(dim)
        diag[spec["indices"]] = 1.0
        return np.diag(diag).astype(complex)
    if spec["rank"] > dim:
        raise ConfigParse(f"rank exceeds dim {dim}", "projection.rank")
    return seeding.random_projection(dim, spec["rank"], spec["seed"])


def build_pair(scenario: Scenario, base_dir=None) -> OperatorPair:
    src = scenario.operator_source
    kind = src["kind"]
    if kind == "random_psd":
        a, b = seeding.random_pair(src["dim"], src["seed"], src["spectral_scale"])
        return make_pair(a, b, _projection_matrix(scenario.projection, src["dim"]))
    if kind == "explicit":
        path = Path(src["path"])
        if base_dir is not None and not path.is_absolute():
            path = Path(base_dir) / path
        try:
            obj = json.loads(path.read_text())
        except json.JSONDecodeError as exc:
            raise ConfigParse(exc.msg, f"{path}: line {exc.lineno}") from exc
        a = _matrix_from_json(_require(obj, "a", str(path)), f"{path}: a")
        b = _matrix_from_json(_require(obj, "b", str(path)), f"{path}: b")
        p = _matrix_from_json(obj["p"], f"{path}: p") if "p" in obj else \
            _projection_matrix(scenario.projection, a.shape[0])
        return make_pair(a, b, p)
    d = src["d"]
    return assemble_schrodinger(d, src["L"], src["potential"],
                                _projection_matrix(scenario.projection, d))


def build_vector(scenario: Scenario, dim: int) -> np.ndarray:
    spec = scenario.h
    if spec["kind"] == "basis":
        if spec["index"] >= dim:
            raise ConfigParse(f"index out of range for dim {dim}", "h.index")
        v = np.zeros(dim, dtype=complex)
        v[spec["index"]] = 1.0
        return v
    if spec["kind"] == "random":
        return seeding.random_unit_vector(dim, spec["seed"])
    return np.full(dim, 1.0 / np.sqrt(dim), dtype=complex)


def _h_label(spec) -> str:
    if spec["kind"] == "basis":
        return f"basis:{spec['index']}"
    if spec["kind"] == "random":
        return f"random:{spec['seed']}"
    return "constant"


# --- running -----------------------------------------------------------------

@dataclass
class RunRecord:
    scenario_hash: str
    timestamp: str
    reports: list
    environment: dict
    scenario: dict

    def check_complete(self, scenario: Scenario):
        """Every requested (scheme, metric, n) cell appears exactly once."""
        seen = {}
        for rep in self.reports:
            for n in rep.ns:
                key = (rep.scheme, rep.variant_params, rep.metric, n)
                seen[key] = seen.get(key, 0) + 1
        expected = set()
        for s in scenario.schemes:
            sch = scheme_from_json(s)
            for m in scenario.metrics:
                metric = Metric(m["kind"], m.get("eta"))
                for n in scenario.n_values:
                    expected.add((sch.variant, sch.params(), metric.name(), n))
        if set(seen) != expected or any(c != 1 for c in seen.values()):
            raise TrotterKatoError("run record is incomplete or has duplicate cells")

    def to_csv(self) -> str:
        return reports_to_csv(self.reports)

    def to_json(self) -> dict:
        reps = sorted(self.reports, key=lambda r: (r.scheme, r.variant_params, r.metric))
        return {"scenario_hash": self.scenario_hash, "timestamp": self.timestamp,
                "environment": self.environment, "scenario": self.scenario,
                "reports": [r.to_json() for r in reps]}


TOLERANCES = {
    "hermitian_rtol": 1e-10,
    "psd_rtol": 1e-10,
    "projection_tol": 1e-12,
    "kato_budget_tol": 1e-8,
}


def run(scenario: Scenario, *, base_dir=None, threads: int = 1) -> RunRecord:
    """Execute every (scheme x metric x n) cell of ``scenario`` once."""
    pair = build_pair(scenario, base_dir)
    h = build_vector(scenario, pair.dim)
    grid = time_grid(scenario.T, scenario.grid["panels"], scenario.grid["points"])
    schemes = [scheme_from_json(s) for s in scenario.schemes]
    metrics = [Metric(m["kind"], m.get("eta")) for m in scenario.metrics]
    src = scenario.operator_source
    seed = src["seed"] if src["kind"] == "random_psd" else None

    jobs = []
    vectors = {}
    for si, scheme in enumerate(schemes):
        vectors[si] = prepare_vector(pair, scheme, h)
        for mi, metric in enumerate(metrics):
            for n in scenario.n_values:
                jobs.append((si, mi, n))

    def cell(job):
        si, mi, n = job
        return job, evaluate_metric(pair, schemes[si], metrics[mi], n, vectors[si], grid)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = dict(pool.map(cell, jobs))
    else:
        results = dict(map(cell, jobs))

    reports = []
    for si, scheme in enumerate(schemes):
        h_norm = float(np.linalg.norm(vectors[si]))
        for mi, metric in enumerate(metrics):
            rep = ConvergenceReport(scheme.variant, scheme.params(), metric.name(), grid.T,
                                    pair.dim, seed, grid.describe(), _h_label(scenario.h))
            if scenario.is_demonstration or scheme.variant == "zeno":
                rep.label = "demonstration"
            for n in scenario.n_values:
                err = results[(si, mi, n)]
                rep.add(n, err, normalize(metric, err, h_norm, grid.T))
            reports.append(rep)
    record = RunRecord(scenario.digest(),
                       datetime.now(timezone.utc).isoformat(timespec="seconds"),
                       reports, dict(TOLERANCES), scenario.to_json())
    record.check_complete(scenario)
    return record


def emit(record: RunRecord, prefix=None, formats=("csv", "json"), *, force: bool = False):
    """Write ``<prefix>.report.csv`` / ``<prefix>.report.json``; returns the paths."""
    prefix = prefix or record.scenario["output"]
    targets = {fmt: Path(f"{prefix}.report.{fmt}") for fmt in formats}
    for fmt, path in targets.items():
        if fmt not in ("csv", "json"):
            raise ValidationError(f"unknown output format {fmt!r}")
        if path.exists() and not force:
            raise FileExistsError(f"{path} exists (use --force to overwrite)")
    for fmt, path in targets.items():
        if path.parent and not path.parent.exists():
            os.makedirs(path.parent, exist_ok=True)
        if fmt == "csv":
            path.write_text(record.to_csv())
        else:
            path.write_text(json.dumps(record.to_json(), indent=2) + "\n")
    return list(targets.values())
