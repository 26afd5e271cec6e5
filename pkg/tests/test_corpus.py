import pytest

from shaperex.corpus import (
    INFERRED,
    Example,
    Provenance,
    example_from_record,
    example_to_record,
    import_ntriples,
    local_name,
    read_jsonl,
    write_jsonl,
)
from shaperex.turtle_light import Graph, Literal, Triple


def make_example():
    triples = {
        Triple("Alice_Smith", "label", Literal.of("Alice Smith")): Provenance(),
        Triple("Alice_Smith", "birthYear", Literal.of("1941")): Provenance(
            INFERRED, found=True
        ),
    }
    return Example(
        "http://example.org/person/Alice_Smith",
        "Alice Smith was born in 1941.",
        Graph("Alice_Smith", frozenset(triples)),
        triples,
    )


class TestLocalName:
    def test_slash_iri(self):
        assert local_name("http://example.org/person/Alice_Smith") == "Alice_Smith"

    def test_hash_iri(self):
        assert local_name("http://www.w3.org/2000/01/rdf-schema#label") == "label"

    def test_prefixed_form(self):
        assert local_name("dbo:birthDate") == "birthDate"

    def test_bare_local(self):
        assert local_name("Alice") == "Alice"

    def test_percent_encoding_kept(self):
        assert local_name("http://x.org/Fran%C3%A7ois") == "Fran%C3%A7ois"

    def test_unusable_name_rejected(self):
        with pytest.raises(ValueError):
            local_name("http://x.org/has space")


class TestRecords:
    def test_round_trip_with_provenance(self):
        example = make_example()
        again = example_from_record(example_to_record(example))
        assert again.entity == example.entity
        assert again.graph == example.graph
        for t in example.graph:
            assert again.provenance_of(t) == example.provenance_of(t)

    def test_record_is_canonical(self):
        example = make_example()
        assert example_to_record(example) == example_to_record(
            example_from_record(example_to_record(example))
        )

    def test_empty_abstract_rejected(self):
        with pytest.raises(ValueError):
            Example("e", "", Graph("e", frozenset()))

    def test_subject_must_match_entity(self):
        with pytest.raises(ValueError):
            Example(
                "http://x.org/Alice",
                "text",
                Graph("Bob", frozenset()),
            )


class TestJsonl:
    def test_write_read_round_trip(self, tmp_path):
        path = tmp_path / "examples.jsonl"
        example = make_example()
        assert write_jsonl(path, [example]) == 1
        [back] = list(read_jsonl(path))
        assert back.graph == example.graph
        assert back.abstract == example.abstract

    def test_byte_determinism(self, tmp_path):
        a, b = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
        write_jsonl(a, [make_example()])
        write_jsonl(b, [make_example()])
        assert a.read_bytes() == b.read_bytes()


NT = """\
<http://x.org/p/Alice> <http://www.w3.org/2000/01/rdf-schema#label> "Alice \\u00c9." .
<http://x.org/p/Alice> <http://dbpedia.org/ontology/birthDate> "1941-09-27"^^<http://www.w3.org/2001/XMLSchema#date> .
<http://x.org/p/Alice> <http://dbpedia.org/ontology/alias> "Al"@en .
<http://x.org/p/Alice> <http://dbpedia.org/ontology/knows> <http://x.org/p/Bob> .
<http://x.org/p/Bob> <http://www.w3.org/2000/01/rdf-schema#label> "Bob" .
<http://x.org/p/Carol> <http://www.w3.org/2000/01/rdf-schema#label> "Carol" .
not a triple line
"""

ABSTRACTS = """\
{"entity": "http://x.org/p/Alice", "abstract": "Alice \\u00c9. was born 27 September 1941."}
{"entity": "http://x.org/p/Bob", "abstract": "Bob is around."}
"""


class TestNTriplesImport:
    def test_grouping_and_joining(self, tmp_path):
        nt = tmp_path / "dump.nt"
        nt.write_text(NT, encoding="utf-8")
        abstracts = tmp_path / "abstracts.jsonl"
        abstracts.write_text(ABSTRACTS, encoding="utf-8")
        examples = list(import_ntriples(nt, abstracts))
        # Carol has no abstract; the IRI-object line is skipped
        assert [e.graph.subject for e in examples] == ["Alice", "Bob"]
        alice = examples[0]
        assert len(alice.graph) == 3
        assert alice.graph.objects_of("label") == [Literal.of("Alice É.")]
        [birth] = alice.graph.objects_of("birthDate")
        assert birth.datatype == "date"
        assert alice.abstract.endswith("27 September 1941.")
