"""Run configuration, verification reports, CSV curves, and reproduce-all."""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
import os
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Iterable, Optional

import numpy as np

from .convexbody import KpBody, disk_in_kp_radius, scalability_lower_bound, standard_position, subquadratic_certify
from .numkernel import DEFAULT_TOL, ToleranceConfig

SCHEMA_VERSION = "1.0"
CONFIG_ENV = "MCX_CONFIG"


@dataclass
class RunConfig:
    seed: int = 7
    tol: ToleranceConfig = DEFAULT_TOL
    n_directions: int = 720
    n_sphere: int = 2000
    r0: float = 0.25
    radius_steps: int = 24
    delta: float = 1e-3
    report_path: Optional[str] = None
    csv_dir: Optional[str] = None
    timings: bool = False

    def to_dict(self) -> dict:
        out = asdict(self)
        out["tol"] = self.tol.to_dict()
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "RunConfig":
        data = dict(data)
        unknown = set(data) - set(cls.__dataclass_fields__)
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        if "tol" in data:
            data["tol"] = ToleranceConfig.from_dict(data["tol"])
        return cls(**data)

    @classmethod
    def load(cls, path: Optional[str] = None) -> "RunConfig":
        """Config from ``path``, else from $MCX_CONFIG, else defaults."""
        path = path or os.environ.get(CONFIG_ENV)
        if not path:
            return cls()
        with open(path) as fh:
            return cls.from_dict(json.load(fh))


def to_jsonable(obj):
    """Plain JSON types; non-finite floats become strings."""
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if math.isfinite(x):
            return x
        return "nan" if math.isnan(x) else ("inf" if x > 0 else "-inf")
    if isinstance(obj, (complex, np.complexfloating)):
        return [to_jsonable(obj.real), to_jsonable(obj.imag)]
    if obj is None or isinstance(obj, str):
        return obj
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def canonical_json(obj) -> str:
    return json.dumps(to_jsonable(obj), sort_keys=True, separators=(",", ":"))


def digest(obj) -> str:
    return hashlib.sha256(canonical_json(obj).encode()).hexdigest()


@dataclass
class VerificationReport:
    config: RunConfig
    command: str
    checks: list = field(default_factory=list)

    def add(self, check) -> None:
        self.checks.append(check)

    @property
    def all_passed(self) -> bool:
        return bool(self.checks) and all(c.status == "pass" for c in self.checks)

    def exit_code(self) -> int:
        return 0 if self.all_passed else 1

    def to_dict(self) -> dict:
        counts = {}
        for c in self.checks:
            counts[c.status] = counts.get(c.status, 0) + 1
        return {
            "schema_version": SCHEMA_VERSION,
            "command": self.command,
            "config": self.config.to_dict(),
            "summary": {"total": len(self.checks), **counts},
            "checks": [
                {
                    "name": c.name,
                    "topic": c.topic,
                    "inputs_digest": digest(c.inputs),
                    "inputs": c.inputs,
                    "status": c.status,
                    "evidence": c.evidence,
                    "tolerances": c.tolerances,
                    "wall_time": c.wall_time,
                }
                for c in self.checks
            ],
        }

    def to_json(self) -> str:
        return json.dumps(to_jsonable(self.to_dict()), sort_keys=True, indent=2) + "\n"

    def write(self, path: Optional[str]) -> None:
        text = self.to_json()
        if path in (None, "-"):
            print(text, end="")
        else:
            Path(path).write_text(text)


def emit_curves(name: str, sweep: dict, out_dir: Optional[str] = None) -> str:
    """Write columns ``sweep`` (header -> values) as CSV; returns the text.

    Floats are written with repr, so they round-trip exactly.
    """
    if not sweep or not any(len(v) for v in sweep.values()):
        raise ValueError("empty sweep")
    lengths = {len(v) for v in sweep.values()}
    if len(lengths) != 1:
        raise ValueError("sweep columns differ in length")
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(list(sweep))
    for row in zip(*sweep.values()):
        w.writerow([repr(float(x)) if isinstance(x, (float, np.floating)) else x for x in row])
    text = buf.getvalue()
    if out_dir is not None:
        Path(out_dir).mkdir(parents=True, exist_ok=True)
        (Path(out_dir) / f"{name}.csv").write_text(text)
    return text


def kp_curves(p: float = 1.5, cs: Iterable[float] = (1e-2, 1e-3)) -> dict:
    cs = list(cs)
    radius = {"c": cs, "r": [disk_in_kp_radius(p, c, samples=16)["r"] for c in cs]}
    bound = {"c": cs, "M_bound": [scalability_lower_bound(p, c)["M_bound"] for c in cs]}
    return {"kp_radius": radius, "kp_bound": bound}


def subquadratic_trace(p: float, r0: float = 0.25, steps: int = 24) -> dict:
    sq = subquadratic_certify(standard_position(KpBody(p), [0, 0], [0, -1]), r0=r0, steps=steps)
    return {"k": list(range(len(sq["rho"]))), "r": sq["radii"], "rho": sq["rho"]}


def reproduce_all(cfg: RunConfig, checks=None) -> VerificationReport:
    from .checks import ALL_CHECKS
    report = VerificationReport(cfg, "reproduce-all")
    for fn in (ALL_CHECKS if checks is None else checks):
        t0 = time.perf_counter()
        c = fn(cfg)
        # timings are opt-in so that reports stay byte-identical across runs
        c.wall_time = time.perf_counter() - t0 if cfg.timings else None
        report.add(c)
    if cfg.csv_dir:
        for name, sweep in kp_curves().items():
            emit_curves(name, sweep, cfg.csv_dir)
        for p in (1.25, 1.5, 1.75):
            emit_curves(f"subquadratic_p{p}", subquadratic_trace(p, cfg.r0, cfg.radius_steps), cfg.csv_dir)
    return report
