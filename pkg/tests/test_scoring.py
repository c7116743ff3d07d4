import random

import pytest

from cupcleaner.corpus import Sample
from cupcleaner.embedding import HashEmbedder
from cupcleaner.errors import EmbedError, TransportError
from cupcleaner.scoring import (
    SCORE_FIELDS,
    score_dataset,
    score_sample,
    write_scores_csv,
)


def make_sample(i=0, **overrides):
    fields = dict(
        id=f"s{i}",
        old_code="public int getValue() { return value; }",
        new_code="public int getLocation() { return location; }",
        old_comment="returns the value.",
        new_comment="returns the location.",
    )
    fields.update(overrides)
    return Sample(**fields)


def random_sample(rng, i):
    alphabet = "ab cd(){};.@!日本語\t\n" + "xyzuvw0123"
    def text(max_len=60):
        return "".join(rng.choice(alphabet) for _ in range(rng.randint(0, max_len)))
    return Sample(
        id=f"r{i}", old_code=text(), new_code=text(),
        old_comment=text(40), new_comment=text(40),
    )


class TestScoreSample:
    def test_identity_sample_scores_one(self, hash_provider):
        sample = make_sample(new_code="public int getValue() { return value; }",
                             new_comment="returns the value.")
        b = score_sample(sample, hash_provider)
        assert b.c_token == pytest.approx(1.0, abs=1e-9)
        assert b.c_sent == pytest.approx(1.0, abs=1e-9)
        assert b.s_token == pytest.approx(1.0, abs=1e-9)
        assert b.s1 == pytest.approx(1.0, abs=1e-9)
        # empty diffs: the change channels contribute nothing
        assert b.d == 0.0 and b.o == 0.0
        assert b.final == pytest.approx(1.0, abs=1e-9)

    def test_degenerate_empty_fields(self, hash_provider):
        sample = make_sample(old_code="", new_code="", old_comment="", new_comment="")
        b = score_sample(sample, hash_provider)
        for name in SCORE_FIELDS:
            assert getattr(b, name) == 0.0

    def test_frozen_fixture_breakdown(self, hash_provider):
        # frozen from the straight-line reference computation for the first
        # sample of the bundled corpus (scripts/golden_oracle.py)
        sample = Sample(
            id="train-0001",
            old_code="public String getValue() {\n    return value;\n}",
            new_code="public String getIndex() {\n    return index;\n}",
            old_comment="clears the value.",
            new_comment="clears the index.",
        )
        b = score_sample(sample, hash_provider)
        assert b.c_token == 0.6972522640994611
        assert b.c_sent == 0.7319250544941366
        assert b.s_token == 0.8408143032612498
        assert b.s1 == 0.4290981457696051
        assert b.d == 0.8323141899824685
        assert b.s2 == 0.6998216757445608
        assert b.o == 1.0
        assert b.s3 == 0.8408143032612498
        assert b.final == 0.8408143032612498

    def test_all_negative_cosines_and_disjoint_diff_score_zero(self):
        # fixed provider mapping each text the sample produces to one of two
        # antiparallel vectors, so every raw cosine is -1; the comment diff
        # shares no characters with the code diff
        import numpy as np

        plus = np.array([1.0, 0.0], dtype=np.float32)
        minus = np.array([-1.0, 0.0], dtype=np.float32)
        vec_map = {"ca": plus, "cb": minus, "xy": plus, "xz": minus,
                   "ca cb": plus, "xy xz": minus}

        class Opposed:
            provider_id = "opposed"
            def embed(self, texts, channel):
                return [vec_map[t] for t in texts]

        sample = Sample(id="neg", old_code="xy", new_code="xz",
                        old_comment="ca", new_comment="cb")
        b = score_sample(sample, Opposed())
        assert b.c_token == b.c_sent == b.s_token == b.d == 0.0
        assert b.o == 0.0
        assert b.final == 0.0

    def test_clamp_off_can_go_negative(self, hash_provider):
        rng = random.Random(9)
        saw_negative = False
        for i in range(80):
            sample = random_sample(rng, i)
            b = score_sample(sample, hash_provider, clamp=False)
            if min(b.c_token, b.c_sent, b.s_token, b.d) < 0.0:
                saw_negative = True
                break
        assert saw_negative, "expected at least one negative raw cosine with clamping off"

    def test_range_and_channel_algebra(self, hash_provider):
        rng = random.Random(1)
        for i in range(150):
            b = score_sample(random_sample(rng, i), hash_provider)
            for name in SCORE_FIELDS:
                value = getattr(b, name)
                assert 0.0 <= value <= 1.0, f"{name}={value}"
            assert b.s1 <= min(b.c_token, b.c_sent, b.s_token) + 1e-15
            assert b.s2 <= max(b.c_token, b.s_token) + 1e-15
            assert b.s3 <= max(b.c_token, b.s_token) + 1e-15
            assert b.final == max(b.s1, b.s2, b.s3)

    def test_cache_transparency(self, hash_provider, disk_cache):
        sample = make_sample()
        cached = score_sample(sample, hash_provider, cache=disk_cache)
        warm = score_sample(sample, hash_provider, cache=disk_cache)
        plain = score_sample(sample, hash_provider)
        assert cached == warm == plain


class TestScoreDataset:
    def test_order_matches_input(self, hash_provider):
        rng = random.Random(2)
        samples = [random_sample(rng, i) for i in range(20)]
        result = score_dataset(samples, hash_provider)
        assert [b.sample_id for b in result.breakdowns] == [s.id for s in samples]

    def test_parallelism_is_bitwise_identical(self, hash_provider):
        rng = random.Random(3)
        samples = [random_sample(rng, i) for i in range(16)]
        serial = score_dataset(samples, hash_provider, workers=1)
        parallel = score_dataset(samples, hash_provider, workers=8)
        assert serial.breakdowns == parallel.breakdowns
        assert serial.unscored == parallel.unscored

    def test_permutation_invariance(self, hash_provider):
        rng = random.Random(4)
        samples = [random_sample(rng, i) for i in range(12)]
        by_id = {b.sample_id: b for b in score_dataset(samples, hash_provider).breakdowns}
        shuffled = samples[:]
        rng.shuffle(shuffled)
        for b in score_dataset(shuffled, hash_provider).breakdowns:
            assert b == by_id[b.sample_id]

    def test_empty_dataset(self, hash_provider):
        result = score_dataset([], hash_provider)
        assert result.breakdowns == [] and result.unscored == []

    def test_unscorable_sample_reported_not_dropped(self):
        class Poisoned(HashEmbedder):
            def embed(self, texts, channel):
                if any("POISON" in t for t in texts):
                    raise EmbedError("poison text")
                return super().embed(texts, channel)

        samples = [make_sample(0), make_sample(1, old_comment="POISON"), make_sample(2)]
        result = score_dataset(samples, Poisoned())
        assert [b.sample_id for b in result.breakdowns] == ["s0", "s2"]
        assert len(result.unscored) == 1
        assert result.unscored[0].sample_id == "s1"
        assert "poison" in result.unscored[0].reason

    def test_systemic_failure_propagates(self):
        class Down(HashEmbedder):
            def embed(self, texts, channel):
                raise TransportError("service unreachable")

        with pytest.raises(TransportError):
            score_dataset([make_sample()], Down())

    def test_timing_fields_populated(self, hash_provider):
        result = score_dataset([make_sample()], hash_provider)
        assert result.embed_seconds >= 0.0
        assert result.score_seconds >= 0.0

    def test_injected_clock(self, hash_provider):
        result = score_dataset([make_sample()], hash_provider, clock=lambda: 0.0)
        assert result.embed_seconds == 0.0 and result.score_seconds == 0.0


class TestScoresCsv:
    def test_format(self, hash_provider, tmp_path):
        samples = [make_sample(0), make_sample(1)]
        result = score_dataset(samples, hash_provider)
        path = tmp_path / "scores.csv"
        write_scores_csv(result.breakdowns, path)
        lines = path.read_text(encoding="utf-8").splitlines()
        assert lines[0] == "id,c_token,c_sent,s_token,s1,d,s2,o,s3,final"
        assert len(lines) == 3
        first = lines[1].split(",")
        assert first[0] == "s0"
        for cell in first[1:]:
            value = float(cell)
            assert 0.0 <= value <= 1.0
            # 9 significant digits max
            digits = cell.replace("-", "").replace(".", "").lstrip("0")
            assert len(digits) <= 9
