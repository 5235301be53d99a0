"""Tweet text normalization: drop links and mentions, unwrap hashtags, keep emoji.

Rules, in order: (1) remove URL tokens (``http://``/``https://`` anywhere,
``www.``-prefixed at a token start, each up to the next whitespace);
(2) remove ``@`` mentions entirely; (3) strip the ``#`` marker but keep the
hashtag body (or drop the whole token with ``drop_hashtag_body``);
(4) replace underscores with spaces; (5) collapse whitespace runs and trim.
Everything else — emoji included — passes through unchanged.

Steps 1-4 are re-applied until nothing fires: stripping a marker can expose a
token of an earlier kind (``"@#tag"`` becomes a mention, ``"a_www.x"`` becomes
a URL), and normalization must be idempotent.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from . import corpus

_URL_RE = re.compile(r"https?://\S*|(?<!\S)www\.\S*")
_MENTION_RE = re.compile(r"@\w+")
_HASHTAG_MARK_RE = re.compile(r"#+(?=\w)")
_HASHTAG_TOKEN_RE = re.compile(r"#+\w+")

# Safety cap only; every firing rule strictly shrinks the text or the
# underscore count, so the loop terminates long before this.
_MAX_PASSES = 32


@dataclass
class NormalizationReport:
    urls_removed: int = 0
    mentions_removed: int = 0
    hashtags_processed: int = 0
    underscores_replaced: int = 0

    def merge(self, other: "NormalizationReport") -> None:
        self.urls_removed += other.urls_removed
        self.mentions_removed += other.mentions_removed
        self.hashtags_processed += other.hashtags_processed
        self.underscores_replaced += other.underscores_replaced

    def to_dict(self) -> dict:
        return {
            "urls_removed": self.urls_removed,
            "mentions_removed": self.mentions_removed,
            "hashtags_processed": self.hashtags_processed,
            "underscores_replaced": self.underscores_replaced,
        }


def normalize(text: str, drop_hashtag_body: bool = False) -> tuple[str, NormalizationReport]:
    """Normalize one tweet. Total function: any Unicode string in, no errors."""
    report = NormalizationReport()
    current = text
    hashtag_re = _HASHTAG_TOKEN_RE if drop_hashtag_body else _HASHTAG_MARK_RE
    for _ in range(_MAX_PASSES):
        fired = 0
        current, n = _URL_RE.subn("", current)
        report.urls_removed += n
        fired += n
        current, n = _MENTION_RE.subn("", current)
        report.mentions_removed += n
        fired += n
        current, n = hashtag_re.subn("", current)
        report.hashtags_processed += n
        fired += n
        n = current.count("_")
        if n:
            current = current.replace("_", " ")
        report.underscores_replaced += n
        fired += n
        if not fired:
            break
    return " ".join(current.split()), report


def normalize_examples(examples, drop_hashtag_body: bool = False):
    """Normalize every example's text; ids and labels pass through untouched."""
    total = NormalizationReport()
    out = []
    for example in examples:
        text, report = normalize(example.text, drop_hashtag_body=drop_hashtag_body)
        total.merge(report)
        out.append(corpus.Example(id=example.id, text=text, labels=example.labels))
    return out, total


def normalize_dataset(in_path, out_path, drop_hashtag_body: bool = False) -> NormalizationReport:
    """File-to-file normalization; returns the aggregate report."""
    examples = corpus.load_dataset(in_path)
    normalized, report = normalize_examples(examples, drop_hashtag_body=drop_hashtag_body)
    corpus.save_dataset(normalized, out_path)
    return report
