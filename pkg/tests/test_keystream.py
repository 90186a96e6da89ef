import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from conftest import FIXTURES
from lsbmark.keystream import (
    CountExceedsDomainError,
    InvalidKeyError,
    SecretKey,
    derive_permutation,
    keyed_stream,
    keyed_stream_next,
    seed_from_key,
)


class TestSeed:
    def test_single_zero_byte(self):
        assert seed_from_key(b"\x00") == oracles.fnv1a64(b"\x00") == 0xAF63BD4C8601B7DF

    def test_letter_a(self):
        assert seed_from_key(b"a") == oracles.fnv1a64(b"a") == 0xAF63DC4C8601EC8C

    def test_deterministic(self):
        assert seed_from_key(b"owner") == seed_from_key(b"owner")

    @given(st.binary(min_size=1, max_size=64))
    def test_matches_oracle(self, data):
        assert seed_from_key(data) == oracles.fnv1a64(data)


class TestKeyParsing:
    def test_text_is_utf8(self):
        assert SecretKey.from_text("clé").data == "clé".encode("utf-8")

    def test_hex_prefix(self):
        assert SecretKey.from_text("hex:00ff10").data == b"\x00\xff\x10"

    def test_bad_hex(self):
        with pytest.raises(InvalidKeyError):
            SecretKey.from_text("hex:zz")

    @pytest.mark.parametrize("text", ["", "hex:"])
    def test_empty_rejected(self, text):
        with pytest.raises(InvalidKeyError):
            SecretKey.from_text(text)

    def test_repr_hides_material(self):
        assert "hunter2" not in repr(SecretKey(b"hunter2"))

    def test_fingerprint_is_seed_prefix(self):
        key = SecretKey(b"a")
        assert key.fingerprint() == "af63dc4c"


class TestStream:
    def test_seed_zero(self):
        value, state = keyed_stream_next(0)
        assert value == 0xE220A8397B1DCDAF
        assert (value, state) == oracles.splitmix64(0)

    def test_equal_states_equal_outputs(self):
        assert keyed_stream_next(987654321) == keyed_stream_next(987654321)

    def test_vectorised_block_matches_stepping(self):
        state, expected = 2**64 - 5, []
        for _ in range(50):
            value, state = oracles.splitmix64(state)
            expected.append(value)
        assert keyed_stream(2**64 - 5, 50).tolist() == expected

    def test_million_outputs(self):
        out = keyed_stream(1, 10**6)
        assert out.dtype == np.uint64 and out.size == 10**6
        # compare the tail with an independent step-by-step run
        state = 1 + (10**6 - 1) * 0x9E3779B97F4A7C15 % 2**64
        assert int(out[-1]) == oracles.splitmix64(state % 2**64)[0]


class TestPermutation:
    def test_single_pixel(self):
        assert derive_permutation("anything", 1, 1).indices == (0,)

    def test_golden_vector(self):
        golden = json.loads((FIXTURES / "golden_permutation.json").read_text())
        plan = derive_permutation(golden["key"], golden["domain_size"], golden["count"])
        assert list(plan.indices) == golden["indices"]
        assert golden["indices"] == oracles.permutation(b"abc", 10, 10)

    def test_keys_differ(self):
        a = derive_permutation("k1", 100, 100).indices
        b = derive_permutation("k2", 100, 100).indices
        assert oracles.permutation(b"k1", 100, 100) != oracles.permutation(b"k2", 100, 100)
        assert a != b

    def test_count_exceeds_domain(self):
        with pytest.raises(CountExceedsDomainError):
            derive_permutation("k", 5, 6)

    def test_zero_count(self):
        assert derive_permutation("k", 5, 0).indices == ()

    @settings(max_examples=60)
    @given(st.binary(min_size=1, max_size=16), st.integers(1, 300), st.data())
    def test_matches_oracle(self, key, n, data):
        k = data.draw(st.integers(0, n))
        assert list(derive_permutation(key, n, k).indices) == oracles.permutation(key, n, k)

    @settings(max_examples=40)
    @given(st.binary(min_size=1, max_size=16), st.integers(1, 500))
    def test_full_plan_is_permutation(self, key, n):
        plan = derive_permutation(key, n, n)
        assert sorted(plan.indices) == list(range(n))

    @settings(max_examples=40)
    @given(st.binary(min_size=1, max_size=16), st.integers(1, 500), st.data())
    def test_prefix_consistency(self, key, n, data):
        k1 = data.draw(st.integers(0, n))
        k2 = data.draw(st.integers(k1, n))
        short = derive_permutation(key, n, k1).indices
        long = derive_permutation(key, n, k2).indices
        assert long[:k1] == short

    def test_single_bit_flip_changes_plan(self, rng):
        for _ in range(64):
            key = bytearray(rng.integers(0, 256, 12, dtype=np.uint8).tobytes())
            base = derive_permutation(bytes(key), 256, 256).indices
            bit = int(rng.integers(0, 8 * len(key)))
            key[bit // 8] ^= 1 << (bit % 8)
            assert derive_permutation(bytes(key), 256, 256).indices != base

    def test_first_position_uniformity(self, rng):
        n, trials = 10, 1000
        counts = np.zeros(n, dtype=int)
        for _ in range(trials):
            key = rng.integers(0, 256, 8, dtype=np.uint8).tobytes()
            counts[derive_permutation(key, n, 1).indices[0]] += 1
        p = 1 / n
        sigma = (trials * p * (1 - p)) ** 0.5
        assert np.all(np.abs(counts - trials * p) <= 5 * sigma)
