import json
import random
import re

import pytest
from hypothesis import given, settings, strategies as st

from propdetect import corpus
from propdetect.preprocess import normalize, normalize_dataset, normalize_examples

EMOJI = ["😀", "😁", "🎉", "🚨", "🔥", "🧿", "💬"]

WORDS = ["hello", "عاجل", "الناس", "news", "поток", "abc123"]
URLS = ["http://t.co/x", "https://a.b/c?d=1", "www.site.org/p"]
MENTIONS = ["@user", "@مراسل", "@a_b"]
HASHTAGS = ["#tag", "#free_palestine", "#عاجل_الان", "##x"]
ODD = ["@", "#", "_", "@#x", "a_www.y", "#_z", "me@host.com"]

token_strategy = st.one_of(
    st.sampled_from(WORDS), st.sampled_from(URLS), st.sampled_from(MENTIONS),
    st.sampled_from(HASHTAGS), st.sampled_from(EMOJI), st.sampled_from(ODD),
    st.text(max_size=8),
)
text_strategy = st.lists(token_strategy, max_size=12).map(" ".join)


class TestNormalize:
    def test_golden_cases(self, golden_normalize_cases):
        for case in golden_normalize_cases:
            got, _ = normalize(case["input"])
            assert got == case["expected"], f"input: {case['input']!r}"

    def test_golden_file_is_large_enough(self, golden_normalize_cases):
        assert len(golden_normalize_cases) >= 25

    def test_report_counts(self):
        _, report = normalize("@a @b http://x #t_u v_w")
        assert report.mentions_removed == 2
        assert report.urls_removed == 1
        assert report.hashtags_processed == 1
        assert report.underscores_replaced == 2

    def test_drop_hashtag_body(self):
        text, report = normalize("#free_palestine now", drop_hashtag_body=True)
        assert text == "now"
        assert report.hashtags_processed == 1

    @given(text_strategy)
    @settings(max_examples=300)
    def test_idempotent(self, text):
        once, _ = normalize(text)
        twice, _ = normalize(once)
        assert twice == once

    @given(text_strategy)
    @settings(max_examples=300)
    def test_no_markers_survive(self, text):
        out, _ = normalize(text)
        assert "_" not in out
        assert "http://" not in out and "https://" not in out
        assert not re.search(r"#\w", out)
        assert not re.search(r"@\w", out)
        assert not re.search(r"\s\s", out)
        assert out == out.strip()

    @given(st.lists(st.one_of(st.sampled_from(WORDS), st.sampled_from(EMOJI)),
                    min_size=0, max_size=10))
    @settings(max_examples=200)
    def test_emoji_retained_outside_removed_tokens(self, tokens):
        text = " ".join(tokens)
        out, _ = normalize(text)
        for emoji in EMOJI:
            assert out.count(emoji) == text.count(emoji)

    def test_total_function_on_random_unicode(self):
        rng = random.Random(7)
        for _ in range(200):
            chars = [chr(rng.randrange(32, 0x2FFF)) for _ in range(rng.randrange(0, 40))]
            text = "".join(chars)
            once, _ = normalize(text)
            twice, _ = normalize(once)
            assert twice == once


class TestNormalizeDataset:
    def test_file_level(self, tmp_path):
        src = tmp_path / "in.jsonl"
        dst = tmp_path / "out.jsonl"
        rows = [
            {"id": "a", "text": "hello http://t.co/x world", "labels": ["L"]},
            {"id": "b", "text": "plain text", "labels": []},
        ]
        src.write_text("".join(json.dumps(r, ensure_ascii=False) + "\n" for r in rows),
                       encoding="utf-8")
        report = normalize_dataset(src, dst)
        assert report.urls_removed == 1
        out = corpus.load_dataset(dst)
        assert out[0].text == "hello world"
        assert out[0].labels == ("L",)
        assert out[1].text == "plain text"

    def test_idempotent_on_files(self, tmp_path):
        src = tmp_path / "in.jsonl"
        mid = tmp_path / "mid.jsonl"
        dst = tmp_path / "out.jsonl"
        src.write_text('{"id": "a", "text": "x @y #z_w", "labels": []}\n', encoding="utf-8")
        normalize_dataset(src, mid)
        normalize_dataset(mid, dst)
        assert mid.read_bytes() == dst.read_bytes()

    def test_mention_only_text_becomes_empty(self, tmp_path):
        src = tmp_path / "in.jsonl"
        dst = tmp_path / "out.jsonl"
        src.write_text('{"id": "a", "text": "@a", "labels": []}\n', encoding="utf-8")
        normalize_dataset(src, dst)
        assert corpus.load_dataset(dst)[0].text == ""

    def test_ids_and_labels_untouched(self):
        examples = [corpus.Example("id1", "#x_y", ("A", "B"))]
        out, _ = normalize_examples(examples)
        assert out[0].id == "id1"
        assert out[0].labels == ("A", "B")
        assert out[0].text == "x y"

    def test_parse_errors_propagate(self, tmp_path):
        src = tmp_path / "in.jsonl"
        src.write_text("{bad json\n", encoding="utf-8")
        with pytest.raises(Exception, match=":1"):
            normalize_dataset(src, tmp_path / "out.jsonl")
