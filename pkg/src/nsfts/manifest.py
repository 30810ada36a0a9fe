"""Benchmark manifest: a versioned YAML document naming datasets, methods and parameters.

Schema (version 1)::

    version: 1
    seed: 1                     # required; default seed for synthetic datasets
    output: out/bench           # relative to the manifest's directory
    workers: 4                  # optional; default = available CPUs
    defaults: {k: 35, w: 10, W: 100, R: 10, M: 2, split: 0.75, padding: 0.2}
    options: {normalize: true, sigma_squared: false, universe: range-pad,
              exclude_fallback: false, mape_percent: true}
    datasets:
      - kind: incremental-mean  # synthetic; any DriftSpec field may follow
        noise_ar: 0.9
      - name: sp500             # file reference; path relative to the manifest
        path: data/sp500.csv
        column: close           # index or header name
        header: true
    methods:
      - nsfts
      - {name: time-variant, params: {W: 50}}
"""
from __future__ import annotations

import os
from dataclasses import dataclass, field, fields
from pathlib import Path

import yaml

from .drift import DataError, DriftSpec, generate, load_csv
from .evaluation import DEFAULT_PARAMS, METHODS
from .partitioner import UNIVERSE_MODES

MANIFEST_VERSION = 1
DEFAULTS = {**{k: DEFAULT_PARAMS[k] for k in ("k", "w", "W", "R", "M", "padding")}, "split": 0.75}
OPTIONS = {"normalize": True, "sigma_squared": False, "universe": "range-pad",
           "exclude_fallback": False, "mape_percent": True}
SPEC_FIELDS = {f.name for f in fields(DriftSpec)}


class ManifestError(ValueError):
    pass


@dataclass
class DatasetRef:
    name: str
    spec: DriftSpec | None = None
    path: Path | None = None
    column: int | str = 0
    header: bool = False

    @property
    def seed(self):
        return self.spec.seed if self.spec else None

    def load(self):
        if self.spec is not None:
            return generate(self.spec, self.name)
        return load_csv(self.path, self.column, self.header, self.name)

    def describe(self) -> dict:
        if self.spec is not None:
            return {"name": self.name, "synthetic": self.spec.to_dict()}
        return {"name": self.name, "path": str(self.path), "column": self.column, "header": self.header}


@dataclass
class MethodRef:
    name: str
    params: dict = field(default_factory=dict)


@dataclass
class Manifest:
    seed: int
    output: Path
    datasets: list[DatasetRef]
    methods: list[MethodRef]
    defaults: dict
    options: dict
    workers: int | None = None

    def params_for(self, method: MethodRef) -> dict:
        p = {k: self.defaults[k] for k in ("k", "w", "W", "R", "M", "padding")}
        p["mode"] = self.options["universe"]
        p["normalize"] = self.options["normalize"]
        p["sigma_squared"] = self.options["sigma_squared"]
        p.update(method.params)
        return p


def _mapping(obj, what):
    if not isinstance(obj, dict):
        raise ManifestError(f"{what} must be a mapping, got {type(obj).__name__}")
    return obj


def _merge(base: dict, given, what) -> dict:
    out = dict(base)
    for k, v in _mapping(given or {}, what).items():
        if k not in base:
            raise ManifestError(f"unknown key {k!r} in {what}; expected one of {sorted(base)}")
        out[k] = v
    return out


def parse(doc, base_dir: Path = Path(".")) -> Manifest:
    doc = _mapping(doc, "manifest")
    if doc.get("version") != MANIFEST_VERSION:
        raise ManifestError(f"manifest version must be {MANIFEST_VERSION}, got {doc.get('version')!r}")
    unknown = set(doc) - {"version", "seed", "output", "workers", "defaults", "options", "datasets", "methods"}
    if unknown:
        raise ManifestError(f"unknown top-level keys: {sorted(unknown)}")
    seed = doc.get("seed")
    if not isinstance(seed, int) or isinstance(seed, bool):
        raise ManifestError("manifest needs an integer 'seed' (reproducibility is mandatory)")
    defaults = _merge(DEFAULTS, doc.get("defaults"), "defaults")
    options = _merge(OPTIONS, doc.get("options"), "options")
    if options["universe"] not in UNIVERSE_MODES:
        raise ManifestError(f"options.universe must be one of {UNIVERSE_MODES}")

    datasets, names = [], set()
    for i, d in enumerate(doc.get("datasets") or []):
        d = dict(_mapping(d, f"datasets[{i}]"))
        if "path" in d:
            extra = set(d) - {"name", "path", "column", "header"}
            if extra:
                raise ManifestError(f"datasets[{i}]: unknown keys {sorted(extra)} for a file dataset")
            path = Path(d["path"])
            if not path.is_absolute():
                path = base_dir / path
            if not path.is_file():
                raise ManifestError(f"datasets[{i}]: file not found: {path}")
            ref = DatasetRef(d.get("name") or path.stem, path=path, column=d.get("column", 0),
                             header=bool(d.get("header", False)))
        elif "kind" in d:
            name = d.pop("name", None) or d["kind"]
            extra = set(d) - SPEC_FIELDS
            if extra:
                raise ManifestError(f"datasets[{i}]: unknown keys {sorted(extra)}")
            d.setdefault("seed", seed)
            try:
                ref = DatasetRef(name, spec=DriftSpec(**d))
            except (DataError, TypeError) as e:
                raise ManifestError(f"datasets[{i}]: {e}") from None
        else:
            raise ManifestError(f"datasets[{i}] needs either 'kind' (synthetic) or 'path' (CSV file)")
        if ref.name in names:
            raise ManifestError(f"duplicate dataset name {ref.name!r}")
        names.add(ref.name)
        datasets.append(ref)
    if not datasets:
        raise ManifestError("manifest lists no datasets")

    methods = []
    for i, m in enumerate(doc.get("methods") or []):
        if isinstance(m, str):
            m = {"name": m}
        m = _mapping(m, f"methods[{i}]")
        if m.get("name") not in METHODS:
            raise ManifestError(f"methods[{i}]: unknown method {m.get('name')!r}; expected one of {METHODS}")
        params = _mapping(m.get("params") or {}, f"methods[{i}].params")
        bad = set(params) - set(DEFAULT_PARAMS)
        if bad:
            raise ManifestError(f"methods[{i}]: unknown params {sorted(bad)}")
        methods.append(MethodRef(m["name"], dict(params)))
    if not methods:
        raise ManifestError("manifest lists no methods")
    if len({m.name for m in methods}) != len(methods):
        raise ManifestError("each method may appear only once")

    out = Path(doc.get("output", "bench-out"))
    if not out.is_absolute():
        out = base_dir / out
    workers = doc.get("workers")
    if workers is not None and (not isinstance(workers, int) or workers < 1):
        raise ManifestError("workers must be a positive integer")
    return Manifest(seed, out, datasets, methods, defaults, options, workers)


def load(path) -> Manifest:
    path = Path(path)
    if not path.is_file():
        raise ManifestError(f"manifest not found: {path}")
    try:
        doc = yaml.safe_load(path.read_text(encoding="utf-8"))
    except yaml.YAMLError as e:
        raise ManifestError(f"manifest is not valid YAML: {e}") from None
    return parse(doc, path.parent)


def default_workers() -> int:
    try:
        return len(os.sched_getaffinity(0))
    except AttributeError:
        return os.cpu_count() or 1
