import pytest

from shaperex.sampling import (
    ANY_PATTERN,
    SHAPE_VALID_ONLY,
    BadKError,
    Dataset,
    InsufficientExamplesError,
    kfold,
    read_dataset,
    sample,
    stats,
    write_dataset,
)
from shaperex.shapes import pattern_of, realized_patterns, validates
from shaperex.synth import SynthConfig, generate


@pytest.fixture(scope="module")
def pool():
    return generate(SynthConfig(n=300, seed=2024))


class TestSample:
    def test_same_seed_same_draw(self, pool, person_shape):
        a = sample(pool, 40, seed=5, shape=person_shape)
        b = sample(pool, 40, seed=5, shape=person_shape)
        assert a.entities() == b.entities()

    def test_different_seeds_differ(self, pool, person_shape):
        a = sample(pool, 40, seed=5, shape=person_shape)
        b = sample(pool, 40, seed=6, shape=person_shape)
        assert a.entities() != b.entities()

    def test_empty_draw(self, pool, person_shape):
        assert len(sample(pool, 0, seed=1, shape=person_shape)) == 0

    def test_shape_valid_only(self, pool, person_shape):
        draw = sample(pool, 30, seed=9, shape=person_shape,
                      constraint=SHAPE_VALID_ONLY)
        assert all(validates(e.graph, person_shape) for e in draw)
        assert stats(draw, person_shape).shape_valid_rate == 1.0

    def test_exclusion_gives_disjoint_sessions(self, pool, person_shape):
        taken: set[str] = set()
        draws = []
        for name, n in (("RD0", 50), ("RD1", 50), ("RD2", 30)):
            d = sample(pool, n, seed=3, shape=person_shape, exclude=taken, name=name)
            draws.append(d)
            taken |= set(d.entities())
        seen: set[str] = set()
        for d in draws:
            assert not (set(d.entities()) & seen)
            seen |= set(d.entities())

    def test_insufficient_pool(self, pool, person_shape):
        with pytest.raises(InsufficientExamplesError):
            sample(pool, len(pool) + 1, seed=1, shape=person_shape)

    def test_duplicate_entities_rejected(self, pool):
        with pytest.raises(ValueError):
            Dataset("bad", (pool[0], pool[0]))

    def test_large_draws_track_pool_statistics(self, pool, person_shape):
        # smoke check only: draws are exchangeable, so dataset-level
        # statistics concentrate around the pool's values as n grows
        whole = stats(Dataset("pool", tuple(pool)), person_shape)
        draw = stats(
            sample(pool, 240, seed=19, shape=person_shape), person_shape
        )
        assert abs(draw.mean_properties - whole.mean_properties) < 0.25
        assert abs(draw.shape_valid_rate - whole.shape_valid_rate) < 0.1


class TestKfold:
    def test_ten_folds_of_thousand(self, person_shape):
        examples = generate(SynthConfig(n=1100, seed=8))
        dataset = sample(examples, 1000, seed=4, shape=person_shape)
        folded = kfold(dataset, 10)
        for fold in range(10):
            test = folded.test_split(fold)
            train = folded.train_split(fold)
            evaluation = folded.eval_split(fold)
            assert len(test) == 100
            assert len(train) == 900
            assert len(evaluation) == 100
            test_entities = {e.entity for e in test}
            train_entities = {e.entity for e in train}
            eval_entities = {e.entity for e in evaluation}
            assert not test_entities & train_entities
            assert not test_entities & eval_entities
            assert eval_entities <= train_entities

    def test_small_dataset_scales(self, pool, person_shape):
        folded = kfold(sample(pool, 10, seed=2, shape=person_shape), 10)
        for fold in range(10):
            assert len(folded.test_split(fold)) == 1
            assert len(folded.train_split(fold)) == 9
            assert len(folded.eval_split(fold)) == 1

    def test_test_folds_partition_dataset(self, pool, person_shape):
        folded = kfold(sample(pool, 43, seed=2, shape=person_shape), 7)
        union: set[str] = set()
        total = 0
        for fold in range(7):
            entities = {e.entity for e in folded.test_split(fold)}
            assert not entities & union
            union |= entities
            total += len(entities)
        assert total == 43
        assert union == set(folded.entities())

    def test_bad_k(self, pool, person_shape):
        dataset = sample(pool, 5, seed=2, shape=person_shape)
        with pytest.raises(BadKError):
            kfold(dataset, 1)
        with pytest.raises(BadKError):
            kfold(dataset, 6)


class TestStats:
    def test_identical_graphs(self, person_shape):
        examples = generate(SynthConfig(
            n=4, seed=7,
            weights=((frozenset({"label", "birthYear"}), 1.0),),
        ))
        dataset = Dataset("same", tuple(examples))
        s = stats(dataset, person_shape)
        assert s.mean_properties == 2.0
        assert s.realized_pattern_count == 1

    def test_against_brute_force(self, pool, person_shape):
        dataset = sample(pool, 80, seed=30, shape=person_shape)
        s = stats(dataset, person_shape)
        sizes = [len(pattern_of(e.graph, person_shape)) for e in dataset]
        assert s.size == 80
        assert s.mean_properties == pytest.approx(sum(sizes) / 80)
        assert s.realized_pattern_count == len(
            realized_patterns(dataset.graphs(), person_shape)
        )
        oracle_valid = sum(validates(e.graph, person_shape) for e in dataset) / 80
        assert s.shape_valid_rate == pytest.approx(oracle_valid)

    def test_scorer_columns(self, pool, person_shape):
        dataset = sample(pool, 10, seed=1, shape=person_shape)
        s = stats(dataset, person_shape)
        assert s.scorer_means is None
        s = stats(dataset, person_shape,
                  scorers={"constant": lambda w, g: 0.5,
                           "null": lambda w, g: None})
        assert s.scorer_means == {"constant": 0.5, "null": None}

    def test_valid_only_sample_has_fewer_patterns(self, person_shape):
        examples = generate(SynthConfig(n=600, seed=77))
        strict = sample(examples, 60, seed=1, shape=person_shape,
                        constraint=SHAPE_VALID_ONLY, name="strict")
        mixed = sample(examples, 60, seed=1, shape=person_shape, name="mixed")
        assert (
            stats(strict, person_shape).realized_pattern_count
            < stats(mixed, person_shape).realized_pattern_count
        )


class TestPersistence:
    def test_write_read_round_trip(self, pool, person_shape, tmp_path):
        dataset = kfold(sample(pool, 24, seed=3, shape=person_shape, name="RDx"), 6)
        write_dataset(dataset, tmp_path)
        back = read_dataset(tmp_path, "RDx")
        assert back.entities() == dataset.entities()
        assert back.folds == dataset.folds
        assert back.seed == dataset.seed
        assert back.constraint == ANY_PATTERN
        assert [e.graph for e in back] == [e.graph for e in dataset]

    def test_manifest_bytes_deterministic(self, pool, person_shape, tmp_path):
        dataset = kfold(sample(pool, 12, seed=3, shape=person_shape, name="RDy"), 3)
        write_dataset(dataset, tmp_path / "a")
        write_dataset(dataset, tmp_path / "b")
        for name in ("RDy.jsonl", "RDy.manifest.json"):
            assert (tmp_path / "a" / name).read_bytes() == (
                tmp_path / "b" / name
            ).read_bytes()
