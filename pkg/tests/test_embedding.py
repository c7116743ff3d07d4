import json
import random

import numpy as np
import pytest

from cupcleaner.embedding import (
    CHANNELS,
    CODE_TOKEN,
    SENTENCE,
    EmbeddingCache,
    HashEmbedder,
    cached_embed,
    cosine,
    embed_unique,
)
from cupcleaner.errors import EmbedError

from conftest import CONFORMANCE_FIXTURE


class TestHashEmbedder:
    def test_deterministic(self, hash_provider):
        a = hash_provider.embed(["x"], CODE_TOKEN)[0]
        b = hash_provider.embed(["x"], CODE_TOKEN)[0]
        assert np.array_equal(a, b)

    def test_batch_order_and_length(self, hash_provider):
        vecs = hash_provider.embed(["a", "b"], CODE_TOKEN)
        assert len(vecs) == 2
        assert np.array_equal(vecs[0], hash_provider.embed(["a"], CODE_TOKEN)[0])
        assert np.array_equal(vecs[1], hash_provider.embed(["b"], CODE_TOKEN)[0])

    def test_unit_norm(self, hash_provider):
        # vectors are float32-quantized for stable caching/wire transport,
        # so the norm is 1 within float32 resolution
        v = hash_provider.embed(["abc"], CODE_TOKEN)[0]
        assert v.dtype == np.float32
        assert abs(float(np.linalg.norm(v.astype(np.float64))) - 1.0) < 1e-6

    def test_empty_text_is_zero_vector(self, hash_provider):
        v = hash_provider.embed([""], CODE_TOKEN)[0]
        assert not v.any()

    def test_channels_distinct(self, hash_provider):
        a = hash_provider.embed(["same text"], CODE_TOKEN)[0]
        b = hash_provider.embed(["same text"], SENTENCE)[0]
        assert not np.array_equal(a, b)

    def test_dim_and_finite(self, hash_provider):
        for text in ("", "a", "日本語テキスト", "x" * 500):
            for ch in CHANNELS:
                v = hash_provider.embed([text], ch)[0]
                assert v.shape == (hash_provider.dim,)
                assert np.all(np.isfinite(v))

    def test_shared_substrings_raise_cosine(self, hash_provider):
        loc, alloc, xyz = hash_provider.embed(["location", "allocation", "xyzq"], CODE_TOKEN)
        assert cosine(loc, alloc) > cosine(loc, xyz)

    def test_distinctness_spot_check(self, hash_provider):
        rng = random.Random(3)
        seen = set()
        for i in range(10_000):
            text = f"{i}-" + "".join(rng.choice("abcdefghij") for _ in range(8))
            seen.add(hash_provider.embed([text], CODE_TOKEN)[0].tobytes())
        assert len(seen) == 10_000

    def test_unknown_channel_rejected(self, hash_provider):
        with pytest.raises(ValueError):
            hash_provider.embed(["x"], "bogus")


class TestCosine:
    def test_self_similarity(self, hash_provider):
        for text in ("abc", "hello world", "日本語"):
            v = hash_provider.embed([text], CODE_TOKEN)[0]
            assert cosine(v, v) == pytest.approx(1.0, abs=1e-9)

    def test_orthogonal(self):
        assert cosine(np.array([1.0, 0.0], dtype=np.float32),
                      np.array([0.0, 1.0], dtype=np.float32)) == 0.0

    def test_zero_vector_convention(self):
        z = np.zeros(4, dtype=np.float32)
        v = np.ones(4, dtype=np.float32)
        assert cosine(z, v) == 0.0
        assert cosine(z, z) == 0.0

    def test_dim_mismatch_fatal(self):
        with pytest.raises(ValueError):
            cosine(np.zeros(3, dtype=np.float32), np.zeros(4, dtype=np.float32))

    def test_bounds_on_random_vectors(self):
        rng = np.random.default_rng(5)
        for _ in range(200):
            a = rng.normal(size=16).astype(np.float32)
            b = rng.normal(size=16).astype(np.float32)
            v = cosine(a, b)
            assert -1.0 <= v <= 1.0

    def test_antiparallel(self):
        v = np.array([0.5, -2.0, 3.0], dtype=np.float32)
        assert cosine(v, -v) == pytest.approx(-1.0, abs=1e-9)


class TestCache:
    def test_hit_returns_stored_bits(self, hash_provider, disk_cache):
        first = cached_embed("some text", CODE_TOKEN, hash_provider, disk_cache)
        second = cached_embed("some text", CODE_TOKEN, hash_provider, disk_cache)
        assert np.array_equal(first, second)
        assert disk_cache.hits >= 1

    def test_channel_is_part_of_key(self, hash_provider, disk_cache):
        a = cached_embed("text", CODE_TOKEN, hash_provider, disk_cache)
        b = cached_embed("text", SENTENCE, hash_provider, disk_cache)
        assert not np.array_equal(a, b)

    def test_cold_cache_calls_provider_once_per_unique_text(self, disk_cache):
        calls = []

        class Counting(HashEmbedder):
            def embed(self, texts, channel):
                calls.extend(texts)
                return super().embed(texts, channel)

        provider = Counting()
        texts = [f"t{i}" for i in range(10)] * 3
        vectors, failures = embed_unique(texts, CODE_TOKEN, provider, disk_cache)
        assert not failures
        assert len(vectors) == 10
        assert sorted(calls) == sorted(f"t{i}" for i in range(10))

    def test_corrupt_entry_is_a_miss(self, hash_provider, disk_cache, caplog):
        text = "will be corrupted"
        vec = cached_embed(text, CODE_TOKEN, hash_provider, disk_cache)
        path = disk_cache._path(hash_provider.provider_id, CODE_TOKEN, text)
        path.write_bytes(b"\x02")
        again = cached_embed(text, CODE_TOKEN, hash_provider, disk_cache)
        assert np.array_equal(vec, again)

    def test_transparency_bitwise(self, hash_provider, tmp_path):
        texts = ["alpha", "beta", "", "日本語", "alpha"]
        with_cache = []
        cache = EmbeddingCache(tmp_path / "c")
        for t in texts:
            with_cache.append(cached_embed(t, CODE_TOKEN, hash_provider, cache))
        without = [cached_embed(t, CODE_TOKEN, hash_provider, None) for t in texts]
        for a, b in zip(with_cache, without):
            assert a.tobytes() == b.tobytes()


class TestEmbedUnique:
    def test_poison_text_isolated(self, hash_provider):
        class Poisoned(HashEmbedder):
            def embed(self, texts, channel):
                if any(t == "BAD" for t in texts):
                    raise EmbedError("cannot embed BAD")
                return super().embed(texts, channel)

        vectors, failures = embed_unique(["ok1", "BAD", "ok2"], CODE_TOKEN, Poisoned())
        assert set(vectors) == {"ok1", "ok2"}
        assert failures == {"BAD": "cannot embed BAD"}

    def test_non_finite_vector_marked_bad(self):
        class NaNFor(HashEmbedder):
            def embed(self, texts, channel):
                out = super().embed(texts, channel)
                for i, t in enumerate(texts):
                    if t == "NAN":
                        out[i] = np.full(self.dim, np.nan, dtype=np.float32)
                return out

        vectors, failures = embed_unique(["a", "NAN"], CODE_TOKEN, NaNFor())
        assert "a" in vectors
        assert failures == {"NAN": "non-finite embedding"}


class TestProtocolFixture:
    def test_hash_embedder_reproduces_shared_fixture(self):
        fixture = json.loads(CONFORMANCE_FIXTURE.read_text(encoding="utf-8"))
        provider = HashEmbedder(dim=fixture["dim"])
        assert provider.provider_id == fixture["provider"]
        for case in fixture["cases"]:
            req = case["request"]
            got = provider.embed(req["texts"], req["channel"])
            expected = case["response"]["vectors"]
            assert case["response"]["dim"] == provider.dim
            for vec, exp in zip(got, expected, strict=True):
                assert np.array_equal(vec, np.asarray(exp, dtype=np.float32))
