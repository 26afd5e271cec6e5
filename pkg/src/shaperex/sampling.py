"""Dataset sampling, k-fold assignment, and dataset statistics.

Sampling is uniform without replacement over the eligible pool, driven by
an explicit seed so every draw is reproducible.  Datasets drawn in one
session are disjoint by entity (the caller accumulates exclusions).  Folds
partition a dataset; per fold the test slice is the fold itself, the train
slice is its complement, and the eval slice is the next fold (a subset of
train), mirroring a 90/10/10 rotation.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Callable, Iterable

from .corpus import Example, read_jsonl, write_jsonl
from .shapes import Shape, pattern_of, realized_patterns, validates

ANY_PATTERN = "any-pattern"
SHAPE_VALID_ONLY = "s*-valid-only"
CONSTRAINTS = (ANY_PATTERN, SHAPE_VALID_ONLY)

# A scorer estimates how well an abstract supports a graph, in [0, 1];
# returning None leaves the corresponding statistics column empty.
Scorer = Callable[[str, object], float | None]


def null_scorer(abstract: str, graph) -> float | None:
    return None


class InsufficientExamplesError(ValueError):
    """The eligible pool is smaller than the requested sample size."""


class BadKError(ValueError):
    """Fold count incompatible with the dataset size."""


@dataclass(frozen=True)
class Dataset:
    """A named, ordered draw of examples with optional fold assignments."""

    name: str
    examples: tuple[Example, ...]
    seed: int | None = None
    constraint: str = ANY_PATTERN
    folds: tuple[int, ...] | None = None

    def __post_init__(self):
        if self.folds is not None and len(self.folds) != len(self.examples):
            raise ValueError("fold list length must match example count")
        entities = [e.entity for e in self.examples]
        if len(set(entities)) != len(entities):
            raise ValueError("duplicate entities in dataset")

    def __len__(self) -> int:
        return len(self.examples)

    def __iter__(self):
        return iter(self.examples)

    def entities(self) -> tuple[str, ...]:
        return tuple(e.entity for e in self.examples)

    def graphs(self):
        return (e.graph for e in self.examples)

    @property
    def fold_count(self) -> int:
        return max(self.folds) + 1 if self.folds else 0

    def fold_of(self, entity: str) -> int | None:
        if self.folds is None:
            return None
        for example, fold in zip(self.examples, self.folds):
            if example.entity == entity:
                return fold
        return None

    def _slice(self, keep) -> tuple[Example, ...]:
        return tuple(e for e, f in zip(self.examples, self.folds) if keep(f))

    def test_split(self, fold: int) -> tuple[Example, ...]:
        return self._slice(lambda f: f == fold)

    def train_split(self, fold: int) -> tuple[Example, ...]:
        return self._slice(lambda f: f != fold)

    def eval_split(self, fold: int) -> tuple[Example, ...]:
        nxt = (fold + 1) % self.fold_count
        return self._slice(lambda f: f == nxt)


def sample(
    pool: Iterable[Example],
    n: int,
    seed: int,
    shape: Shape,
    constraint: str = ANY_PATTERN,
    exclude: frozenset[str] | set[str] = frozenset(),
    name: str = "sample",
) -> Dataset:
    """Draw ``n`` examples uniformly without replacement.

    ``constraint`` restricts the pool: ``s*-valid-only`` keeps only
    examples whose graph validates the shape, so the resulting dataset has
    a shape-validity rate of exactly 1.  The pool is ordered by entity
    before drawing, making the draw a pure function of (pool, seed).
    """
    if constraint not in CONSTRAINTS:
        raise ValueError(f"unknown constraint {constraint!r}")
    eligible = [e for e in pool if e.entity not in exclude]
    if constraint == SHAPE_VALID_ONLY:
        eligible = [e for e in eligible if validates(e.graph, shape)]
    eligible.sort(key=lambda e: e.entity)
    if len(eligible) < n:
        raise InsufficientExamplesError(
            f"need {n} examples, only {len(eligible)} eligible"
        )
    rng = random.Random(seed)
    chosen = rng.sample(eligible, n)
    return Dataset(name, tuple(chosen), seed=seed, constraint=constraint)


def kfold(dataset: Dataset, k: int) -> Dataset:
    """Assign fold ids round-robin; every example is in exactly one test
    fold and fold sizes differ by at most one."""
    if k < 2 or k > len(dataset):
        raise BadKError(f"k={k} incompatible with |D|={len(dataset)}")
    return replace(dataset, folds=tuple(i % k for i in range(len(dataset))))


@dataclass(frozen=True)
class DatasetStats:
    name: str
    size: int
    mean_properties: float
    realized_pattern_count: int
    shape_valid_rate: float
    scorer_means: dict | None = None

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "size": self.size,
            "mean_properties": self.mean_properties,
            "realized_pattern_count": self.realized_pattern_count,
            "shape_valid_rate": self.shape_valid_rate,
            "scorer_means": self.scorer_means,
        }


def stats(
    dataset: Dataset, shape: Shape, scorers: dict[str, Scorer] | None = None
) -> DatasetStats:
    """Size, mean property count per graph, distinct realized patterns,
    shape-validity rate, and optional scorer means."""
    size = len(dataset)
    if size == 0:
        return DatasetStats(dataset.name, 0, 0.0, 0, 0.0, None)
    mean_props = sum(len(pattern_of(e.graph, shape)) for e in dataset) / size
    realized = len(realized_patterns(dataset.graphs(), shape))
    valid_rate = sum(validates(e.graph, shape) for e in dataset) / size
    means = None
    if scorers:
        means = {}
        for label, scorer in sorted(scorers.items()):
            values = [
                v
                for e in dataset
                if (v := scorer(e.abstract, e.graph)) is not None
            ]
            means[label] = sum(values) / len(values) if values else None
    return DatasetStats(dataset.name, size, mean_props, realized, valid_rate, means)


def write_dataset(dataset: Dataset, directory) -> dict:
    """Materialize a dataset: ``<name>.jsonl`` with the examples plus a
    manifest recording seed, constraint, entity order and fold map."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    examples_path = directory / f"{dataset.name}.jsonl"
    write_jsonl(examples_path, dataset.examples)
    manifest = {
        "name": dataset.name,
        "seed": dataset.seed,
        "constraint": dataset.constraint,
        "size": len(dataset),
        "entities": list(dataset.entities()),
        "folds": list(dataset.folds) if dataset.folds is not None else None,
        "examples_file": examples_path.name,
    }
    manifest_path = directory / f"{dataset.name}.manifest.json"
    manifest_path.write_text(
        json.dumps(manifest, indent=2, sort_keys=True, ensure_ascii=False) + "\n",
        encoding="utf-8",
    )
    return manifest


def read_dataset(directory, name: str) -> Dataset:
    directory = Path(directory)
    with open(directory / f"{name}.manifest.json", encoding="utf-8") as fh:
        manifest = json.load(fh)
    examples = tuple(read_jsonl(directory / manifest["examples_file"]))
    order = {entity: i for i, entity in enumerate(manifest["entities"])}
    examples = tuple(sorted(examples, key=lambda e: order[e.entity]))
    folds = manifest.get("folds")
    return Dataset(
        name=manifest["name"],
        examples=examples,
        seed=manifest.get("seed"),
        constraint=manifest.get("constraint", ANY_PATTERN),
        folds=tuple(folds) if folds is not None else None,
    )
