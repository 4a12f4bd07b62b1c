"""The fixed 45-slot feature schema.

The schema is a versioned document shipped with the package
(``data/feature_schema.json``). Its content hash doubles as the schema
version string, which is embedded in every feature vector and persisted
model so that vectors extracted under one schema can never be fed into a
model trained under another.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from importlib import resources

from .errors import SchemaMismatch

EXPECTED_GROUP_SIZES = {
    "meta": 4,
    "content-simple": 14,
    "content-linguistic": 7,
    "author": 12,
    "network": 4,
    "links": 4,
}

N_FEATURES = 45


@dataclass(frozen=True)
class FeatureDef:
    name: str
    group: str
    description: str


@dataclass(frozen=True)
class FeatureSchema:
    features: tuple[FeatureDef, ...]
    version: str

    def __len__(self) -> int:
        return len(self.features)

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(f.name for f in self.features)

    def index(self, name: str) -> int:
        return self.names.index(name)

    def group_sizes(self) -> dict[str, int]:
        sizes: dict[str, int] = {}
        for f in self.features:
            sizes[f.group] = sizes.get(f.group, 0) + 1
        return sizes


def _schema_hash(doc: dict) -> str:
    canonical = json.dumps(doc, sort_keys=True, separators=(",", ":")).encode("utf-8")
    return hashlib.sha256(canonical).hexdigest()[:16]


def build_schema(doc: dict) -> FeatureSchema:
    """Validate a schema document and derive its version string."""
    features = tuple(
        FeatureDef(name=e["name"], group=e["group"], description=e["description"])
        for e in doc["features"]
    )
    names = [f.name for f in features]
    if len(set(names)) != len(names):
        raise SchemaMismatch("duplicate feature names in schema document")
    sizes: dict[str, int] = {}
    for f in features:
        sizes[f.group] = sizes.get(f.group, 0) + 1
    if sizes != EXPECTED_GROUP_SIZES:
        raise SchemaMismatch(f"bad group partition {sizes}, expected {EXPECTED_GROUP_SIZES}")
    if len(features) != N_FEATURES:
        raise SchemaMismatch(f"schema has {len(features)} features, expected {N_FEATURES}")
    version = f"fs{doc['version']}-{_schema_hash(doc)}"
    return FeatureSchema(features=features, version=version)


def load_schema() -> FeatureSchema:
    raw = resources.files("credscore.data").joinpath("feature_schema.json").read_text("utf-8")
    return build_schema(json.loads(raw))


# Process-wide schema; the document is frozen, so loading once is safe.
SCHEMA = load_schema()


def check_schema_version(found: str, expected: str | None = None) -> None:
    expected = expected if expected is not None else SCHEMA.version
    if found != expected:
        raise SchemaMismatch(f"schema version {found!r} does not match {expected!r}")
