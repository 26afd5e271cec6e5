import json
import logging
import re
import unicodedata
from collections import Counter

import pytest

from conftest import FIXTURE200
from shaperex.corpus import INFERRED, INITIAL_KB, Example, Provenance, read_jsonl
from shaperex.distill import (
    InferenceRule,
    ProjectionError,
    apply_rules,
    default_rules,
    distill,
    filter_pattern,
    load_rules,
    store_examples,
    wikicheck,
)
from shaperex.turtle_light import Graph, Literal

VOCAB = {"label", "alias", "birthName", "birthDate", "deathDate", "birthYear",
         "deathYear"}
MONTHS = ["January", "February", "March", "April", "May", "June", "July",
          "August", "September", "October", "November", "December"]
DATE_RE = re.compile(r"[0-9]{4}-(0[1-9]|1[0-2])-(0[1-9]|[12][0-9]|3[01])$")


def oracle_counts(path):
    """Stage-by-stage recomputation straight off the JSONL records, using
    nothing from the package under test."""

    def surface_forms(value):
        if DATE_RE.match(value):
            y, m, d = value.split("-")
            month = MONTHS[int(m) - 1]
            return [f"{int(d)} {month} {y}", f"{month} {int(d)}, {y}", value]
        return [value]

    def present(abstract, value):
        hay = unicodedata.normalize("NFC", abstract)
        return any(
            unicodedata.normalize("NFC", form) in hay for form in surface_forms(value)
        )

    initial, after, found = Counter(), Counter(), Counter()
    entities = {"initial": 0, "found": 0}
    dropped_nonvocab = 0
    no_vocab = 0
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            record = json.loads(line)
            triples = [(t["p"], t["o"]) for t in record["triples"]]
            kept = [(p, o) for p, o in triples if p in VOCAB]
            dropped_nonvocab += len(triples) - len(kept)
            if not kept:
                no_vocab += 1
                continue
            entities["initial"] += 1
            initial.update(p for p, _ in kept)

            properties = {p for p, _ in kept}
            enriched = list(kept)
            for source, target in (("birthDate", "birthYear"),
                                   ("deathDate", "deathYear")):
                if target in properties:
                    continue
                for p, o in sorted(kept):
                    if p == source and DATE_RE.match(o):
                        enriched.append((target, o[:4]))
                        break
            after.update(p for p, _ in enriched)

            surviving = [
                (p, o) for p, o in enriched if present(record["abstract"], o)
            ]
            if surviving:
                entities["found"] += 1
                found.update(p for p, _ in surviving)
    return initial, after, found, entities, dropped_nonvocab, no_vocab


def example_with(abstract, pairs, entity="http://x.org/p/E"):
    graph = Graph.of("E", pairs)
    return Example(entity, abstract, graph, {t: Provenance() for t in graph})


class TestFilterPattern:
    def test_vocabulary_only_graph_kept_intact(self, person_shape):
        ex = example_with("text", [("label", "x"), ("birthYear", "1941")])
        [out] = list(filter_pattern([ex], person_shape))
        assert out.graph == ex.graph

    def test_non_vocabulary_triples_projected_away(self, person_shape):
        ex = example_with("text", [("label", "x"), ("occupation", "poet")])
        [out] = list(filter_pattern([ex], person_shape))
        assert out.graph.predicates() == {"label"}

    def test_zero_vocabulary_example_filtered(self, person_shape):
        ex = example_with("text", [("occupation", "poet")])
        assert list(filter_pattern([ex], person_shape)) == []


class TestApplyRules:
    def test_year_projected_from_date(self):
        ex = example_with("text", [("birthDate", "1941-09-27")])
        [out] = list(apply_rules([ex], default_rules()))
        assert out.graph.objects_of("birthYear") == [Literal.of("1941")]
        [year] = [t for t in out.graph if t.predicate == "birthYear"]
        assert out.provenance_of(year).source == INFERRED

    def test_existing_year_left_alone(self):
        ex = example_with(
            "text", [("birthDate", "1941-09-27"), ("birthYear", "1941")]
        )
        [out] = list(apply_rules([ex], default_rules()))
        assert out.graph == ex.graph

    def test_idempotent(self, fixture200, person_shape):
        once = list(apply_rules(filter_pattern(fixture200, person_shape),
                                default_rules()))
        twice = list(apply_rules(iter(once), default_rules()))
        assert [e.graph for e in twice] == [e.graph for e in once]

    def test_fixture_additions_match_brute_force(self, fixture200, person_shape):
        projected = list(filter_pattern(fixture200, person_shape))
        oracle = 0
        for e in projected:
            for source, target in (("birthDate", "birthYear"),
                                   ("deathDate", "deathYear")):
                if source in e.graph.predicates() and target not in e.graph.predicates():
                    oracle += 1
        enriched = list(apply_rules(iter(projected), default_rules()))
        added = sum(len(b.graph) - len(a.graph) for a, b in zip(projected, enriched))
        assert added == oracle

    def test_malformed_source_skipped_with_warning(self, caplog):
        ex = example_with(
            "text", [("birthDate", Literal("circa 1941")), ("label", "x")]
        )
        with caplog.at_level(logging.WARNING, logger="shaperex.distill"):
            [out] = list(apply_rules([ex], default_rules()))
        assert out.graph == ex.graph
        assert any("skipped" in r.message for r in caplog.records)

    def test_cyclic_rules_rejected(self):
        rules = (InferenceRule("a", "b", "year"), InferenceRule("b", "a", "year"))
        with pytest.raises(ValueError, match="cycle"):
            list(apply_rules([], rules))

    def test_rules_file_round_trip(self, tmp_path):
        path = tmp_path / "rules.json"
        path.write_text(
            json.dumps([{"source": "birthDate", "target": "birthYear"}]),
            encoding="utf-8",
        )
        assert load_rules(path) == (InferenceRule("birthDate", "birthYear", "year"),)

    def test_projection_validates_input(self):
        with pytest.raises(ProjectionError):
            InferenceRule("birthDate", "birthYear").project(Literal("1941"))


class TestWikicheck:
    def test_year_confirmed_inside_prose_date(self):
        ex = example_with(
            "Frederick (born 27 September 1941) played.", [("birthYear", "1941")]
        )
        assert wikicheck(ex).graph.predicates() == {"birthYear"}

    def test_unfound_date_dropped(self):
        ex = example_with("No dates here at all.", [("birthDate", "1944-01-01")])
        out = wikicheck(ex)
        assert out.graph.is_empty

    def test_date_confirmed_by_prose_rendering(self):
        ex = example_with("born 27 September 1941", [("birthDate", "1941-09-27")])
        out = wikicheck(ex)
        assert out.graph.predicates() == {"birthDate"}
        [t] = list(out.graph)
        assert out.provenance_of(t).found is True


class TestDistill:
    def test_fixture_counts_equal_brute_force(self, person_shape, tmp_path):
        report = distill(
            read_jsonl(FIXTURE200), person_shape, default_rules(),
            store_dir=tmp_path / "store",
        )
        initial, after, found, entities, dropped, no_vocab = oracle_counts(FIXTURE200)
        assert report.initial.triples == dict(initial)
        assert report.after_rules.triples == dict(after)
        assert report.found.triples == dict(found)
        assert report.initial.entities == entities["initial"]
        assert report.found.entities == entities["found"]
        assert report.triples_dropped_nonvocab == dropped
        assert report.examples_no_vocabulary == no_vocab
        assert report.examples_read == 200

    def test_monotone_shrinkage(self, person_shape):
        report = distill(read_jsonl(FIXTURE200), person_shape, default_rules())
        for prop, n in report.found.triples.items():
            assert n <= report.after_rules.triples.get(prop, 0)
        assert report.found.entities <= report.initial.entities

    def test_all_found_corpus_keeps_everything(self, person_shape):
        ex = example_with(
            "Ada Lang was born 27 September 1941.",
            [("label", "Ada Lang"), ("birthDate", "1941-09-27"),
             ("birthYear", "1941")],
        )
        report = distill([ex], person_shape, default_rules())
        assert report.found.triples == report.after_rules.triples
        assert report.entity_retention() == 1.0

    def test_distilling_own_output_is_identity(self, person_shape, tmp_path):
        distill(read_jsonl(FIXTURE200), person_shape, default_rules(),
                store_dir=tmp_path / "store")
        survivors = list(store_examples(tmp_path / "store"))
        second = distill(iter(survivors), person_shape, default_rules())
        assert second.initial.triples == second.after_rules.triples
        assert second.after_rules.triples == second.found.triples
        assert second.found.entities == len(survivors)

    def test_partition_provenance(self, person_shape, tmp_path):
        distill(read_jsonl(FIXTURE200), person_shape, default_rules(),
                store_dir=tmp_path / "store")
        for example in read_jsonl(tmp_path / "store" / "initialKB" / "examples.jsonl"):
            for t in example.graph:
                assert example.provenance_of(t).source == INITIAL_KB
        inferred_seen = 0
        for example in store_examples(tmp_path / "store"):
            for t in example.graph:
                prov = example.provenance_of(t)
                assert prov.found is True
                assert prov.source in (INITIAL_KB, INFERRED)
                inferred_seen += prov.source == INFERRED
        assert inferred_seen > 0

    def test_inferences_partition_lists_only_new_triples(self, person_shape, tmp_path):
        distill(read_jsonl(FIXTURE200), person_shape, default_rules(),
                store_dir=tmp_path / "store")
        path = tmp_path / "store" / "inferences" / "examples.jsonl"
        records = [json.loads(line) for line in path.read_text("utf-8").splitlines()]
        assert records
        for record in records:
            for t in record["triples"]:
                assert t["p"] in ("birthYear", "deathYear")
                assert re.fullmatch(r"[0-9]{4}", t["o"])

    def test_retained_triples_rendered_in_abstract(self, person_shape, tmp_path):
        from shaperex.rendering import found_in

        distill(read_jsonl(FIXTURE200), person_shape, default_rules(),
                store_dir=tmp_path / "store")
        for example in store_examples(tmp_path / "store"):
            for t in example.graph:
                assert found_in(example.abstract, t.object)
