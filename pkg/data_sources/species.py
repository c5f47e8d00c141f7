"""
Species Config — Gas Name to SpeciesParams
==========================================
Reads the flat `key = value` species file and maps free-text gas names to
SpeciesParams: exact normalized lookup against names and aliases first,
then a fuzzy match (thefuzz, score cutoff 80).

  <GAS>.m, <GAS>.alpha, <GAS>.alpha_high_T, <GAS>.aliases
  interaction.gamma, interaction.K

Set POLYKIN_SPECIES_FILE to point at another config.
"""

import logging
import math
import os
import re
from dataclasses import dataclass
from typing      import Optional

import pandas as pd
from thefuzz import process

from kinetics.errors        import DatasetError, ParseError, UnknownSpecies
from kinetics.microdynamics import InteractionParams, SpeciesParams


log = logging.getLogger(__name__)

_REPO_ROOT   = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
SPECIES_FILE = os.getenv("POLYKIN_SPECIES_FILE", os.path.join(_REPO_ROOT, "data", "species.cfg"))

FUZZY_CUTOFF = 80

SPECIES_FIELDS     = ("m", "alpha", "alpha_high_T", "aliases")
INTERACTION_FIELDS = ("gamma", "K")


def _normalize(name: str) -> str:
    """Lowercase, collapse whitespace."""
    return re.sub(r"\s+", " ", name.lower().strip())


@dataclass(frozen=True)
class SpeciesEntry:
    name: str
    m: float
    alpha: float
    alpha_high_T: Optional[float] = None
    aliases: tuple = ()

    def params(self, high_T: bool = False, dimensionless: bool = False) -> SpeciesParams:
        """
        SpeciesParams for this gas. high_T picks alpha_high_T (vibrational
        modes active); dimensionless keeps alpha but sets m = k = 1.
        """
        alpha = self.alpha
        if high_T:
            if self.alpha_high_T is None:
                raise DatasetError(f"{self.name}: no alpha_high_T in the species config")
            alpha = self.alpha_high_T
        if dimensionless:
            return SpeciesParams.dimensionless(alpha, name=self.name)
        return SpeciesParams(name=self.name, m=self.m, alpha=alpha)


def _number(value: str, key: str, line: int, path: Optional[str]) -> float:
    try:
        x = float(value)
    except ValueError:
        raise ParseError(f"{key}: expected a number, got {value!r}", line, path) from None
    if not math.isfinite(x):
        raise ParseError(f"{key}: value must be finite, got {value!r}", line, path)
    return x


def parse_config(text: str, path: Optional[str] = None) -> tuple[dict, dict]:
    """
    Parse config text into ({name: SpeciesEntry}, {"gamma": .., "K": ..}).
    Raises ParseError naming the offending line.
    """
    raw: dict[str, dict] = {}
    interaction: dict[str, float] = {}
    seen: set = set()

    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ParseError(f"expected 'key = value', got {line!r}", lineno, path)
        key, value = (part.strip() for part in line.split("=", 1))
        if key in seen:
            raise ParseError(f"duplicate key {key!r}", lineno, path)
        seen.add(key)
        if "." not in key:
            raise ParseError(f"key {key!r} must look like GAS.field or interaction.field", lineno, path)
        owner, field = key.rsplit(".", 1)
        if not owner or not value:
            raise ParseError(f"empty name or value in {line!r}", lineno, path)

        if owner == "interaction":
            if field not in INTERACTION_FIELDS:
                raise ParseError(f"unknown interaction key {field!r}; expected one of {INTERACTION_FIELDS}",
                                 lineno, path)
            interaction[field] = _number(value, key, lineno, path)
            continue

        if field not in SPECIES_FIELDS:
            raise ParseError(f"unknown species key {field!r}; expected one of {SPECIES_FIELDS}", lineno, path)
        entry = raw.setdefault(owner, {"_line": lineno})
        if field == "aliases":
            entry["aliases"] = tuple(a.strip() for a in value.split(",") if a.strip())
        else:
            entry[field] = _number(value, key, lineno, path)

    species = {}
    for name, fields in raw.items():
        missing = [f for f in ("m", "alpha") if f not in fields]
        if missing:
            raise ParseError(f"species {name!r} is missing {', '.join(missing)}", fields["_line"], path)
        species[name] = SpeciesEntry(
            name=name,
            m=fields["m"],
            alpha=fields["alpha"],
            alpha_high_T=fields.get("alpha_high_T"),
            aliases=fields.get("aliases", ()),
        )
    return species, interaction


class SpeciesRegistry:
    """
    Resolves gas names against the species config.

    Priority:
    1. Exact normalized lookup of names and aliases
    2. Fuzzy match against the same keys (thefuzz, score >= FUZZY_CUTOFF)
    """

    def __init__(self, path: str = None):
        self.path = path or SPECIES_FILE
        with open(self.path, encoding="utf-8") as fh:
            text = fh.read()
        self.species, self._interaction = parse_config(text, self.path)
        self._build_index()

    @classmethod
    def from_text(cls, text: str) -> "SpeciesRegistry":
        registry = cls.__new__(cls)
        registry.path = None
        registry.species, registry._interaction = parse_config(text)
        registry._build_index()
        return registry

    def _build_index(self) -> None:
        self._index: dict[str, str] = {}
        for name, entry in self.species.items():
            for key in (name, *entry.aliases):
                self._index.setdefault(_normalize(key), name)

    @property
    def names(self) -> list[str]:
        return list(self.species)

    def resolve(self, name: str) -> SpeciesEntry:
        normalized = _normalize(name)
        if normalized in self._index:
            return self.species[self._index[normalized]]

        match = process.extractOne(normalized, list(self._index), score_cutoff=FUZZY_CUTOFF)
        if match is None:
            raise UnknownSpecies(f"unknown species {name!r}; known: {', '.join(self.names)}")
        key, score = match[0], match[1]
        resolved = self._index[key]
        log.info("resolved %r to %s (fuzzy match on %r, score %d)", name, resolved, key, score)
        return self.species[resolved]

    def species_params(self, name: str, high_T: bool = False, dimensionless: bool = False) -> SpeciesParams:
        return self.resolve(name).params(high_T=high_T, dimensionless=dimensionless)

    def interaction(self, gamma: Optional[float] = None, K: Optional[float] = None) -> InteractionParams:
        """Constant-kernel interaction; explicit arguments override the config."""
        gamma = gamma if gamma is not None else self._interaction.get("gamma")
        K = K if K is not None else self._interaction.get("K", 1.0)
        if gamma is None:
            raise ParseError("interaction.gamma is not set", path=self.path)
        return InteractionParams.constant(gamma, K=K)

    def table(self) -> pd.DataFrame:
        rows = [
            {
                "name":         e.name,
                "m":            e.m,
                "alpha":        e.alpha,
                "alpha_high_T": e.alpha_high_T,
                "aliases":      ", ".join(e.aliases),
            }
            for e in self.species.values()
        ]
        return pd.DataFrame(rows, columns=["name", "m", "alpha", "alpha_high_T", "aliases"])
