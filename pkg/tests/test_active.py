import pytest

from shaperex.active import (
    CATEGORIES,
    AlreadyJudgedError,
    MissingCategoryError,
    PendingItemsError,
    ReviewStore,
    annotation_metrics,
    collect,
    correct,
)
from shaperex.corpus import Example
from shaperex.distill import default_rules, distill, store_examples
from shaperex.evaluation import diff_records, pair_up
from shaperex.gateway import extract_heuristic
from shaperex.rendering import found_in
from shaperex.sampling import Dataset, kfold, sample, stats
from shaperex.turtle_light import Graph, Literal, Triple


def example(name, abstract, pairs):
    return Example(f"http://x.org/p/{name}", abstract, Graph.of(name, pairs))


@pytest.fixture()
def review_world():
    """Three examples with hand-picked defects.

    E1: prediction discovers a real alias (FP+) and omits a real year (FN+).
    E2: the only expected triple is unsupported by the abstract (FN-).
    E3: prediction hallucinates a year absent from the abstract (FP-).
    """
    e1 = example("E1", "Ada Lang, known to friends as Kob, was born in 1941.",
                 [("label", "Ada Lang"), ("birthYear", "1941")])
    e2 = example("E2", "A short note with no usable facts.",
                 [("birthName", "Old Wrong")])
    e3 = example("E3", "Sven Koval is a violinist.", [("label", "Sven Koval")])
    dataset = Dataset("RDt", (e1, e2, e3), seed=1, folds=(0, 1, 0))
    diffs = [
        {"entity": e1.entity, "fold": 0, "parse_ok": True,
         "tp": [{"p": "label", "o": "Ada Lang", "dt": "string"}],
         "fp": [{"p": "alias", "o": "Kob", "dt": "string"}],
         "fn": [{"p": "birthYear", "o": "1941", "dt": "gYear"}]},
        {"entity": e2.entity, "fold": 1, "parse_ok": False, "tp": [], "fp": [],
         "fn": [{"p": "birthName", "o": "Old Wrong", "dt": "string"}]},
        {"entity": e3.entity, "fold": 0, "parse_ok": True,
         "tp": [{"p": "label", "o": "Sven Koval", "dt": "string"}],
         "fp": [{"p": "birthYear", "o": "1930", "dt": "gYear"},
                {"p": "alias", "o": "Vado", "dt": "string"}], "fn": []},
    ]
    return dataset, diffs


class TestCollect:
    def test_counts_and_order(self, review_world):
        dataset, diffs = review_world
        items = collect(diffs, dataset, "m0")
        assert len(items) == 5
        assert sum(1 for i in items if i.kind == "FP") == 3
        assert sum(1 for i in items if i.kind == "FN") == 2
        keys = [(i.entity, i.kind, i.triple.predicate) for i in items]
        assert keys == sorted(keys)

    def test_perfect_model_empty_queue(self, review_world):
        dataset, _ = review_world
        diffs = [{"entity": e.entity, "fold": 0, "parse_ok": True,
                  "tp": [], "fp": [], "fn": []} for e in dataset]
        assert collect(diffs, dataset, "m0") == []

    def test_fold_union_matches_per_fold_diffs(self, review_world):
        dataset, diffs = review_world
        items = collect(diffs, dataset, "m0")
        by_fold = {}
        for item in items:
            by_fold.setdefault(item.fold, 0)
        for fold in by_fold:
            fold_diffs = [d for d in diffs if d["fold"] == fold]
            expected = sum(len(d["fp"]) + len(d["fn"]) for d in fold_diffs)
            assert sum(1 for i in items if i.fold == fold) == expected


class TestJudging:
    def test_judgement_lifecycle(self, review_world, tmp_path):
        dataset, diffs = review_world
        items = collect(diffs, dataset, "m0")
        store = ReviewStore(items, dataset, "m0",
                            log_path=tmp_path / "log.jsonl")
        fp_alias = next(i for i in items if i.triple.predicate == "alias")
        store.judge(fp_alias.id, "+")
        assert store.get(fp_alias.id).status == "judged"
        with pytest.raises(AlreadyJudgedError):
            store.judge(fp_alias.id, "-", "FH")
        assert store.progress()["judged"] == 1

    def test_erroneous_fp_needs_category(self, review_world):
        dataset, diffs = review_world
        items = collect(diffs, dataset, "m0")
        store = ReviewStore(items, dataset, "m0")
        fp_year = next(
            i for i in items if i.kind == "FP" and i.triple.predicate == "birthYear"
        )
        with pytest.raises(MissingCategoryError):
            store.judge(fp_year.id, "-")
        store.judge(fp_year.id, "-", "FH")

    def test_fn_and_positive_fp_need_no_category(self, review_world):
        dataset, diffs = review_world
        items = collect(diffs, dataset, "m0")
        store = ReviewStore(items, dataset, "m0")
        fn = next(i for i in items if i.kind == "FN")
        judgement = store.judge(fn.id, "-", category="FH")
        assert judgement.category is None

    def test_revoke_then_rejudge(self, review_world, tmp_path):
        dataset, diffs = review_world
        items = collect(diffs, dataset, "m0")
        store = ReviewStore(items, dataset, "m0", log_path=tmp_path / "log.jsonl")
        item = items[0]
        store.judge(item.id, "+")
        store.revoke(item.id)
        assert store.get(item.id).status == "pending"
        store.judge(item.id, "-", "WV" if item.kind == "FP" else None)

    def test_replay_reconstructs_state(self, review_world, tmp_path):
        dataset, diffs = review_world
        items = collect(diffs, dataset, "m0")
        log = tmp_path / "log.jsonl"
        store = ReviewStore(items, dataset, "m0", log_path=log)
        for item in items:
            polarity = "+" if item.kind == "FN" else "-"
            category = "WV" if (item.kind == "FP" and polarity == "-") else None
            store.judge(item.id, polarity, category)
        reloaded = ReviewStore(items, dataset, "m0", log_path=log)
        assert reloaded.progress() == store.progress()
        assert {
            (i.id, i.status) for i in reloaded.items()
        } == {(i.id, i.status) for i in store.items()}


def judge_all(store, items, decisions):
    for item in items:
        polarity, category = decisions[
            (item.entity.rsplit("/", 1)[1], item.kind, item.triple.predicate)
        ]
        store.judge(item.id, polarity, category)


class TestCorrect:
    DECISIONS = {
        ("E1", "FP", "alias"): ("+", None),       # discovery, added
        ("E1", "FN", "birthYear"): ("+", None),   # true omission, kept
        ("E2", "FN", "birthName"): ("-", None),   # wrong ground truth, removed
        ("E3", "FP", "birthYear"): ("-", "FH"),   # hallucination, ignored
        ("E3", "FP", "alias"): ("-", "WV"),       # wrong value, ignored
    }

    def gold(self, review_world):
        dataset, diffs = review_world
        items = collect(diffs, dataset, "m0")
        store = ReviewStore(items, dataset, "m0")
        judge_all(store, items, self.DECISIONS)
        store.ensure_complete()
        return dataset, store, correct(dataset, store.judged_items())

    def test_matches_hand_built_expectation(self, review_world):
        dataset, _, (gold, correction) = self.gold(review_world)
        assert gold.name == "RDt+"
        assert len(gold) == 2
        by_subject = {e.graph.subject: e for e in gold}
        assert set(by_subject) == {"E1", "E3"}
        assert by_subject["E1"].graph.triples == {
            Triple("E1", "label", Literal.of("Ada Lang")),
            Triple("E1", "birthYear", Literal.of("1941")),
            Triple("E1", "alias", Literal.of("Kob")),
        }
        assert by_subject["E3"].graph.triples == {
            Triple("E3", "label", Literal.of("Sven Koval")),
        }
        assert correction.dropped_entities == ("http://x.org/p/E2",)
        assert [(e, t.predicate) for e, t in correction.added] == [
            ("http://x.org/p/E1", "alias")
        ]
        assert [(e, t.predicate) for e, t in correction.removed] == [
            ("http://x.org/p/E2", "birthName")
        ]

    def test_identity_when_nothing_actionable(self, review_world):
        dataset, diffs = review_world
        items = collect(diffs, dataset, "m0")
        store = ReviewStore(items, dataset, "m0")
        for item in items:
            # FN judged correct-omission, FP judged erroneous: dataset unchanged
            if item.kind == "FN":
                store.judge(item.id, "+")
            else:
                store.judge(item.id, "-", "FH")
        gold, correction = correct(dataset, store.judged_items())
        assert [e.graph for e in gold] == [e.graph for e in dataset]
        assert not correction.added and not correction.removed
        assert not correction.dropped_entities

    def test_idempotent(self, review_world):
        dataset, store, (gold, _) = self.gold(review_world)
        again, correction = correct(gold, store.judged_items())
        assert [e.graph for e in again] == [e.graph for e in gold]
        assert not correction.added and not correction.removed

    def test_size_never_grows_and_folds_survive(self, review_world):
        dataset, _, (gold, _) = self.gold(review_world)
        assert len(gold) <= len(dataset)
        assert gold.folds == (0, 0)

    def test_pending_items_block_completion(self, review_world):
        dataset, diffs = review_world
        items = collect(diffs, dataset, "m0")
        store = ReviewStore(items, dataset, "m0")
        store.judge(items[0].id, "+" if items[0].kind == "FN" else "-",
                    "FH" if items[0].kind == "FP" else None)
        with pytest.raises(PendingItemsError):
            store.ensure_complete()


class TestAnnotationMetrics:
    def test_hand_fixture(self, review_world):
        dataset, diffs = review_world
        items = collect(diffs, dataset, "m0")
        store = ReviewStore(items, dataset, "m0")
        judge_all(store, items, TestCorrect.DECISIONS)
        metrics = annotation_metrics(store.judged_items(), dataset)
        assert (metrics.fn_minus, metrics.fn_plus) == (1, 1)
        assert (metrics.fp_minus, metrics.fp_plus) == (2, 1)
        assert metrics.discovery_rate == pytest.approx(1 / 3)
        assert metrics.omission_rate == pytest.approx(1 / 4)
        assert metrics.categories["FH"] == 1
        assert metrics.categories["WV"] == 1
        assert metrics.per_fold[0] == {"FN-": 0, "FN+": 1, "FP-": 2, "FP+": 1}
        assert metrics.per_fold[1] == {"FN-": 1, "FN+": 0, "FP-": 0, "FP+": 0}

    def test_recorded_discovery_arithmetic(self):
        # 95 discoveries against 198 erroneous false positives
        e = example("Big", "An abstract.", [("label", "x")])
        dataset = Dataset("big", (e,))
        diffs = [{
            "entity": e.entity, "fold": 0, "parse_ok": True, "tp": [],
            "fp": [{"p": "alias", "o": f"v{i:03d}", "dt": "string"}
                   for i in range(293)],
            "fn": [],
        }]
        items = collect(diffs, dataset, "m0")
        store = ReviewStore(items, dataset, "m0")
        for i, item in enumerate(items):
            if i < 95:
                store.judge(item.id, "+")
            else:
                store.judge(item.id, "-", "FH")
        metrics = annotation_metrics(store.judged_items(), dataset)
        assert (metrics.fp_plus, metrics.fp_minus) == (95, 198)
        assert metrics.discovery_rate == pytest.approx(95 / 293)
        assert round(metrics.discovery_rate, 2) == 0.32

    def test_no_false_positives_leaves_rate_undefined(self, review_world):
        dataset, _ = review_world
        metrics = annotation_metrics([], dataset)
        assert metrics.discovery_rate is None
        assert metrics.omission_rate == 0.0


class TestFixtureLoop:
    def test_scripted_review_raises_shape_validity(self, fixture200, person_shape,
                                                   tmp_path):
        distill(iter(fixture200), person_shape, default_rules(),
                store_dir=tmp_path / "store")
        pool = list(store_examples(tmp_path / "store"))
        dataset = kfold(
            sample(pool, 60, seed=11, shape=person_shape, name="RD1"), 10
        )
        predictions = [
            extract_heuristic(e, person_shape.property_names) for e in dataset
        ]
        pairs = pair_up(dataset, predictions)
        items = collect(diff_records(pairs), dataset, "heuristic")
        assert any(i.kind == "FP" for i in items)
        assert any(i.kind == "FN" for i in items)
        store = ReviewStore(items, dataset, "heuristic")
        by_entity = {e.entity: e for e in dataset}
        for item in items:
            supported = found_in(by_entity[item.entity].abstract, item.triple.object)
            polarity = "+" if supported else "-"
            category = "FH" if (item.kind == "FP" and polarity == "-") else None
            store.judge(item.id, polarity, category)
        gold, _ = correct(dataset, store.judged_items())
        before = stats(dataset, person_shape).shape_valid_rate
        after = stats(gold, person_shape).shape_valid_rate
        assert after >= before
        assert len(gold) <= len(dataset)
        assert set(CATEGORIES) == {"FH", "AC", "IAC", "WV", "TMI", "SG", "ICE",
                                   "LCE", "MCE"}
