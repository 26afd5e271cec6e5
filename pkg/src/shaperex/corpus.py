"""Examples (abstract + graph pairs) and their on-disk formats.

The native interchange format is JSON Lines, one record per entity:

    {"entity": "<IRI>", "abstract": "...",
     "triples": [{"p": "<IRI or local>", "o": "...", "dt": "string",
                  "src": "initialKB", "found": false}, ...]}

``src`` and ``found`` are provenance: where a triple came from (initial
store or rule inference) and whether it was confirmed against the abstract.
An N-Triples importer is provided for RDF dumps; it groups triples by
subject and joins abstracts from a second JSONL file keyed by entity IRI.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field, replace
from typing import Iterable, Iterator, Mapping

from .turtle_light import Graph, Literal, Triple, is_local_name

INITIAL_KB = "initialKB"
INFERRED = "inferred"
DISCOVERY = "discovery"
SOURCES = (INITIAL_KB, INFERRED, DISCOVERY)


@dataclass(frozen=True)
class Provenance:
    source: str = INITIAL_KB
    found: bool = False

    def __post_init__(self):
        if self.source not in SOURCES:
            raise ValueError(f"unknown provenance source {self.source!r}")


def local_name(iri: str) -> str:
    """Local name of an IRI: the segment after the last '/', '#' or ':'."""
    name = re.split(r"[/#:]", iri)[-1]
    if not is_local_name(name):
        raise ValueError(f"cannot derive a local name from {iri!r}")
    return name


@dataclass(frozen=True, eq=False)
class Example:
    """One (abstract, graph) pair describing a single entity."""

    entity: str
    abstract: str
    graph: Graph
    provenance: Mapping[Triple, Provenance] = field(default_factory=dict)

    def __post_init__(self):
        if not self.abstract:
            raise ValueError("abstract must be non-empty")
        if self.graph.subject != local_name(self.entity):
            raise ValueError(
                f"graph subject {self.graph.subject!r} does not match entity "
                f"{self.entity!r}"
            )

    def provenance_of(self, triple: Triple) -> Provenance:
        return self.provenance.get(triple, Provenance())

    def with_graph(self, graph: Graph, provenance=None) -> "Example":
        if provenance is None:
            provenance = {
                t: p for t, p in self.provenance.items() if t in graph.triples
            }
        return replace(self, graph=graph, provenance=provenance)


def _sorted_triples(example: Example) -> list[Triple]:
    return sorted(example.graph.triples, key=Triple.sort_key)


def example_to_record(example: Example) -> dict:
    triples = []
    for t in _sorted_triples(example):
        prov = example.provenance_of(t)
        triples.append(
            {
                "p": t.predicate,
                "o": t.object.lexical,
                "dt": t.object.datatype,
                "src": prov.source,
                "found": prov.found,
            }
        )
    return {"entity": example.entity, "abstract": example.abstract, "triples": triples}


def example_from_record(record: dict) -> Example:
    subject = local_name(record["entity"])
    triples = {}
    for item in record["triples"]:
        predicate = local_name(item["p"])
        obj = Literal(item["o"], item.get("dt", "string"))
        triple = Triple(subject, predicate, obj)
        triples[triple] = Provenance(
            source=item.get("src", INITIAL_KB), found=item.get("found", False)
        )
    graph = Graph(subject, frozenset(triples))
    return Example(record["entity"], record["abstract"], graph, triples)


def read_jsonl(path) -> Iterator[Example]:
    """Stream examples from a JSONL file, one record at a time."""
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                yield example_from_record(json.loads(line))


def dump_record(record: dict) -> str:
    return json.dumps(record, ensure_ascii=False, sort_keys=True)


def write_jsonl(path, examples: Iterable[Example]) -> int:
    """Write examples as JSONL; returns the number written.  Output is
    canonical (sorted keys, sorted triples) so identical inputs yield
    identical bytes."""
    count = 0
    with open(path, "w", encoding="utf-8") as fh:
        for example in examples:
            fh.write(dump_record(example_to_record(example)) + "\n")
            count += 1
    return count


_NT_LINE_RE = re.compile(
    r"\s*<(?P<s>[^>]*)>\s*<(?P<p>[^>]*)>\s*"
    r'"(?P<o>(?:[^"\\]|\\.)*)"'
    r"(?:\^\^<(?P<dt>[^>]*)>|@(?P<lang>[A-Za-z0-9-]+))?"
    r"\s*\.\s*$"
)
_NT_ESCAPES = {"\\": "\\", '"': '"', "n": "\n", "t": "\t", "r": "\r"}


def _unescape_nt(value: str) -> str:
    def sub(m: re.Match) -> str:
        key = m.group(1)
        if key.startswith("u"):
            return chr(int(key[1:], 16))
        return _NT_ESCAPES[key]

    return re.sub(r"\\(u[0-9A-Fa-f]{4}|.)", sub, value)


def _nt_datatype(iri: str | None) -> str:
    if iri is None:
        return "string"
    if iri.endswith("#date"):
        return "date"
    if iri.endswith("#gYear"):
        return "gYear"
    return "string"


def import_ntriples(triples_path, abstracts_path) -> Iterator[Example]:
    """Build examples from an N-Triples dump of datatype-property triples
    plus a JSONL file of ``{"entity": IRI, "abstract": text}`` records.

    Triples with non-literal objects or unusable local names are skipped;
    entities without an abstract are dropped (there is nothing to pair
    them with).
    """
    abstracts: dict[str, str] = {}
    with open(abstracts_path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                record = json.loads(line)
                abstracts[record["entity"]] = record["abstract"]

    grouped: dict[str, dict[Triple, Provenance]] = {}
    with open(triples_path, encoding="utf-8") as fh:
        for line in fh:
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            m = _NT_LINE_RE.match(line)
            if not m:
                continue
            entity = m.group("s")
            try:
                subject = local_name(entity)
                predicate = local_name(m.group("p"))
                lexical = _unescape_nt(m.group("o"))
                declared = _nt_datatype(m.group("dt"))
                try:
                    obj = Literal(lexical, declared)
                except ValueError:
                    obj = Literal.of(lexical)
                triple = Triple(subject, predicate, obj)
            except ValueError:
                continue
            grouped.setdefault(entity, {})[triple] = Provenance()

    for entity in sorted(grouped):
        abstract = abstracts.get(entity)
        if not abstract:
            continue
        triples = grouped[entity]
        yield Example(entity, abstract, Graph(local_name(entity), frozenset(triples)), triples)
