"""Run configuration: a flat ``key = value`` file.

Lines starting with ``#`` are comments.  Tuple-valued keys take comma
separated lists.  Unknown keys are an error so that typos do not pass
silently.
"""
from __future__ import annotations

import dataclasses
from dataclasses import dataclass, fields
from pathlib import Path

from .errors import DomainError
from .perturb import FAMILIES
from .unification import CLASS_RTOL, SweepGrid


@dataclass(frozen=True)
class RunConfig:
    class_rtol: float = CLASS_RTOL
    root_tol: float = 1e-12
    audit_tol: float = 1e-9
    # sweep grid (normalised slice V1 = w1 = 1)
    n: int = 3
    v2: tuple = SweepGrid.v2
    w0: tuple = SweepGrid.w0
    w2: tuple = SweepGrid.w2
    epsilons: tuple = SweepGrid.epsilons
    families: tuple = SweepGrid.families
    gauss_samples: int = 1000
    output: str = ""
    seed: int = 0

    def __post_init__(self):
        for name in ("class_rtol", "root_tol", "audit_tol"):
            if not getattr(self, name) > 0:
                raise DomainError(f"{name} must be positive")
        if self.gauss_samples < 2:
            raise DomainError("gauss_samples must be at least 2")
        bad = [f for f in self.families if f not in FAMILIES]
        if bad:
            raise DomainError(f"unknown perturbation families {bad}")
        if any(e < 0 for e in self.epsilons):
            raise DomainError("epsilons must be nonnegative")

    @property
    def grid(self) -> SweepGrid:
        return SweepGrid(self.n, self.v2, self.w0, self.w2, self.epsilons, self.families)

    def items(self) -> list[tuple[str, str]]:
        out = []
        for f in fields(self):
            v = getattr(self, f.name)
            out.append((f.name, ",".join(map(_fmt, v)) if isinstance(v, tuple) else _fmt(v)))
        return out

    def as_dict(self) -> dict:
        return {f.name: list(v) if isinstance(v := getattr(self, f.name), tuple) else v
                for f in fields(self)}

    def header_lines(self) -> list[str]:
        return [f"# {k}={v}" for k, v in self.items()]

    def dumps(self) -> str:
        return "".join(f"{k} = {v}\n" for k, v in self.items())

    def replace(self, **kw) -> "RunConfig":
        return dataclasses.replace(self, **kw)

    @classmethod
    def parse(cls, text: str) -> "RunConfig":
        types = {f.name: f.type for f in fields(cls)}
        kw = {}
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, value = line.partition("=")
            key, value = key.strip(), value.strip()
            if not sep or key not in types:
                raise DomainError(f"config line {lineno}: cannot parse {raw!r}")
            kw[key] = _convert(key, types[key], value)
        return cls(**kw)

    @classmethod
    def load(cls, path) -> "RunConfig":
        return cls.parse(Path(path).read_text())


def _fmt(v) -> str:
    return repr(v) if isinstance(v, float) else str(v)


def _convert(key: str, typ: str, value: str):
    try:
        if typ == "tuple":
            parts = [p.strip() for p in value.split(",") if p.strip()]
            if key == "families":
                return tuple(p.upper() for p in parts)
            return tuple(float(p) for p in parts)
        if typ == "int":
            return int(value)
        if typ == "float":
            return float(value)
        return value
    except ValueError as exc:
        raise DomainError(f"config key {key}: {exc}") from None
