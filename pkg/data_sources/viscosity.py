"""
Viscosity Datasets
==================
Pointwise shear-viscosity measurements mu(T) read from / written to CSV.

File format (UTF-8, LF):
  # gas: N2
  # source: <citation>
  T_K,mu_Pa_s
  300,1.79e-05
  ...

Invariants checked on load: T strictly increasing, mu > 0, at least 3 points.
"""

import io
import logging
import math
import os
from dataclasses import dataclass

import numpy as np
import pandas as pd

from kinetics.errors import ParseError, ValidationError


log = logging.getLogger(__name__)

HEADER     = ["T_K", "mu_Pa_s"]
MIN_POINTS = 3


@dataclass(frozen=True)
class ViscosityDataset:
    gas: str
    points: tuple          # ((T_K, mu_Pa_s), ...)
    source: str = ""

    def __post_init__(self):
        object.__setattr__(self, "points", tuple((float(T), float(mu)) for T, mu in self.points))

    @classmethod
    def from_arrays(cls, gas: str, T, mu, source: str = "") -> "ViscosityDataset":
        return cls(gas, tuple(zip(np.asarray(T, dtype=float), np.asarray(mu, dtype=float))), source)

    @property
    def T(self) -> np.ndarray:
        return np.array([p[0] for p in self.points])

    @property
    def mu(self) -> np.ndarray:
        return np.array([p[1] for p in self.points])

    def validate(self) -> "ViscosityDataset":
        if len(self.points) < MIN_POINTS:
            raise ValidationError("at least 3 points", f"{self.gas}: got {len(self.points)}")
        T, mu = self.T, self.mu
        if not np.all(np.isfinite(T)) or not np.all(np.isfinite(mu)):
            raise ValidationError("finite values", self.gas)
        if np.any(np.diff(T) <= 0.0):
            i = int(np.argmax(np.diff(T) <= 0.0))
            raise ValidationError("T strictly increasing", f"{self.gas}: T={T[i + 1]:g} after T={T[i]:g}")
        if np.any(T <= 0.0):
            raise ValidationError("T > 0", self.gas)
        if np.any(mu <= 0.0):
            raise ValidationError("mu > 0", f"{self.gas}: mu={mu[np.argmax(mu <= 0.0)]:g}")
        return self

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(list(self.points), columns=HEADER)


# ── CSV in ────────────────────────────────────────────────────────────────────

def _parse_metadata(line: str, meta: dict) -> None:
    body = line.lstrip("#").strip()
    if ":" not in body:
        return
    key, value = (part.strip() for part in body.split(":", 1))
    if key.lower() in ("gas", "source"):
        meta[key.lower()] = value


def ingest_csv(path: str) -> ViscosityDataset:
    """Read and validate a `T_K,mu_Pa_s` file. ParseError carries the 1-based file line."""
    with open(path, encoding="utf-8") as fh:
        text = fh.read()

    meta = {"gas": os.path.splitext(os.path.basename(path))[0], "source": ""}
    data_lines: list[int] = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped:
            continue
        if stripped.startswith("#"):
            _parse_metadata(stripped, meta)
            continue
        if stripped.count(",") != 1:
            raise ParseError(f"expected 2 comma-separated fields, got {stripped!r}", lineno, path)
        data_lines.append(lineno)

    if not data_lines:
        raise ParseError("no header line found", None, path)

    df = pd.read_csv(io.StringIO(text), comment="#", skip_blank_lines=True, dtype=str)
    header = [c.strip() for c in df.columns]
    if header != HEADER:
        raise ParseError(f"header must be {','.join(HEADER)}, got {','.join(header)}", data_lines[0], path)
    df.columns = HEADER

    values = df.apply(lambda col: pd.to_numeric(col.str.strip(), errors="coerce"))
    bad = values.isna().any(axis=1).to_numpy()
    if bad.any():
        row = int(np.argmax(bad))
        raise ParseError(f"not a number: {','.join(df.iloc[row].astype(str))}", data_lines[row + 1], path)

    dataset = ViscosityDataset(meta["gas"], tuple(values.itertuples(index=False, name=None)), meta["source"])
    log.info("read %d viscosity points for %s from %s", len(dataset.points), dataset.gas, path)
    return dataset.validate()


# ── CSV out ───────────────────────────────────────────────────────────────────

def write_csv(dataset: ViscosityDataset, path: str) -> str:
    """Write the dataset so that ingest_csv(path) returns an equal dataset."""
    parent = os.path.dirname(path)
    if parent:
        os.makedirs(parent, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(f"# gas: {dataset.gas}\n")
        if dataset.source:
            fh.write(f"# source: {dataset.source}\n")
        dataset.to_frame().to_csv(fh, index=False, lineterminator="\n", float_format="%.17g")
    return path


def synthetic(gas: str, A: float, s: float, T, noise: float = 0.0, seed: int = 0) -> ViscosityDataset:
    """mu = A T^s at the given temperatures, with optional lognormal noise of relative size `noise`."""
    T = np.asarray(T, dtype=float)
    mu = A * T ** s
    if noise > 0.0:
        mu = mu * np.exp(noise * np.random.default_rng(seed).normal(size=T.shape))
    if not math.isfinite(float(np.sum(mu))):
        raise ValidationError("finite values", gas)
    return ViscosityDataset.from_arrays(gas, T, mu, source=f"synthetic A={A:g} s={s:g} noise={noise:g}")
