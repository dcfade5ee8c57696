"""Tokenization, frequent-term extraction, and PMI scoring.

Terms are 1-3 token n-grams counted at the response level (doc frequency),
because the tables built from them answer "how many respondents said X",
not "how often was X said".  PMI compares a term's rate inside a group with
its rate overall, in base-2 log with add-half smoothing so zero-count cells
stay finite for display.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Any, Iterable, Mapping

from .errors import DomainError
from .schema import ResponseSet

# Word = alphanumeric runs; apostrophes and hyphens only *between* runs.
_TOKEN_RE = re.compile(r"[^\W_]+(?:['’\-][^\W_]+)*", re.UNICODE)

PMI_EPSILON = 0.5

# Group label for responses the grouping leaves unlabeled (e.g. noise points).
UNGROUPED = "∅"

# English function words; kept small on purpose (a term list, not a parser).
DEFAULT_STOPWORDS = frozenset("""
a about above after again against all am an and any are as at be because been
before being below between both but by can cannot could did do does doing down
during each few for from further had has have having he her here hers herself
him himself his how i if in into is it its itself just me more most my myself
no nor not now of off on once only or other our ours ourselves out over own
same she should so some such than that the their theirs them themselves then
there these they this those through to too under until up very was we were
what when where which while who whom why will with would you your yours
yourself yourselves it's i'm i've don't can't won't isn't aren't wasn't
""".split())


def tokenize(text: str) -> list[str]:
    """Unicode-aware lowercase tokens; splits on non-alphanumeric runs but
    keeps internal apostrophes and hyphens ("rainy-day", "it's")."""
    return _TOKEN_RE.findall(text.lower())


@dataclass(frozen=True)
class Term:
    tokens: tuple[str, ...]
    doc_count: int

    def __post_init__(self) -> None:
        if not 1 <= len(self.tokens) <= 3:
            raise ValueError("terms are 1-3 tokens")
        if self.doc_count < 1:
            raise ValueError("doc_count must be >= 1")

    @property
    def surface(self) -> str:
        return " ".join(self.tokens)

    def to_json_dict(self) -> dict[str, Any]:
        return {"surface": self.surface, "tokens": list(self.tokens), "doc_count": self.doc_count}


def _response_ngrams(tokens: list[str], max_n: int = 3) -> set[tuple[str, ...]]:
    grams: set[tuple[str, ...]] = set()
    for n in range(1, max_n + 1):
        for i in range(len(tokens) - n + 1):
            grams.add(tuple(tokens[i : i + n]))
    return grams


def response_term_sets(responses: ResponseSet, max_n: int = 3) -> list[set[tuple[str, ...]]]:
    """Distinct n-grams per response; the membership structure every
    counting routine in this module shares."""
    return [_response_ngrams(tokenize(text), max_n) for text in responses.texts]


def extract_terms(
    responses: ResponseSet,
    min_count: int = 2,
    max_terms: int = 50,
    stopwords: frozenset[str] | None = None,
) -> list[Term]:
    """Frequent unigrams/bigrams/trigrams ranked by doc count.

    Stopwords are dropped as unigrams and at n-gram edges.  A bigram/trigram
    additionally needs cohesion: its doc count must exceed half the smallest
    doc count of its constituent (n-1)-grams, which suppresses n-grams that
    merely ride on one frequent word.
    """
    if min_count < 2:
        raise DomainError("min_count must be >= 2")
    stops = DEFAULT_STOPWORDS if stopwords is None else stopwords

    doc_counts: dict[tuple[str, ...], int] = {}
    for grams in response_term_sets(responses):
        for g in grams:
            doc_counts[g] = doc_counts.get(g, 0) + 1

    def cohesive(gram: tuple[str, ...], count: int) -> bool:
        parts = [gram[i : i + len(gram) - 1] for i in range(2)]
        floor = min(doc_counts.get(p, 0) for p in parts)
        return count > 0.5 * floor

    kept: list[Term] = []
    for gram, count in doc_counts.items():
        if count < min_count:
            continue
        if len(gram) == 1:
            if gram[0] in stops:
                continue
        else:
            if gram[0] in stops or gram[-1] in stops:
                continue
            if not cohesive(gram, count):
                continue
        kept.append(Term(tokens=gram, doc_count=count))

    kept.sort(key=lambda t: (-t.doc_count, t.surface))
    return kept[:max_terms]


def pmi_score(c_tg: float, n_g: float, c_t: float, n: float, epsilon: float = PMI_EPSILON) -> float:
    """log2 of the term's smoothed in-group rate over its overall rate."""
    if n_g < 1 or n < n_g or c_tg < 0 or c_t < c_tg:
        raise DomainError(f"bad PMI arguments c_tg={c_tg} n_g={n_g} c_t={c_t} n={n}")
    num = (c_tg + epsilon) / n_g
    den = (c_t + epsilon) / n
    if num == 0.0:
        return float("-inf")
    return math.log2(num / den)


@dataclass(frozen=True)
class TermTable:
    """Term-by-group counts and PMI scores, groups ordered by size descending."""

    terms: tuple[Term, ...]
    groups: tuple[str, ...]
    group_sizes: tuple[int, ...]
    counts: tuple[tuple[int, ...], ...]  # terms x groups
    pmi: tuple[tuple[float, ...], ...]

    def to_json_dict(self) -> dict[str, Any]:
        return {
            "terms": [t.to_json_dict() for t in self.terms],
            "groups": list(self.groups),
            "group_sizes": list(self.group_sizes),
            "counts": [list(r) for r in self.counts],
            "pmi": [list(r) for r in self.pmi],
        }


def term_category_table(
    responses: ResponseSet,
    grouping: Mapping[int, str],
    terms: Iterable[Term],
) -> TermTable:
    """Count, per group, how many responses contain each term, and score
    group affinity with PMI.  Row ids missing from ``grouping`` fall into
    the reserved group ``UNGROUPED``."""
    term_list = list(terms)
    gram_sets = response_term_sets(responses)
    labels = [grouping.get(rid, UNGROUPED) for rid in responses.row_ids]

    sizes: dict[str, int] = {}
    for lab in labels:
        sizes[lab] = sizes.get(lab, 0) + 1
    groups = tuple(sorted(sizes, key=lambda g: (-sizes[g], g)))
    gidx = {g: i for i, g in enumerate(groups)}
    n = len(labels)

    counts = [[0] * len(groups) for _ in term_list]
    totals = [0] * len(term_list)
    for ti, term in enumerate(term_list):
        gram = term.tokens
        row = counts[ti]
        for lab, grams in zip(labels, gram_sets):
            if gram in grams:
                row[gidx[lab]] += 1
                totals[ti] += 1

    pmi_rows = [
        tuple(pmi_score(counts[ti][gi], sizes[g], totals[ti], n) for gi, g in enumerate(groups))
        for ti in range(len(term_list))
    ]

    return TermTable(
        terms=tuple(term_list),
        groups=groups,
        group_sizes=tuple(sizes[g] for g in groups),
        counts=tuple(tuple(r) for r in counts),
        pmi=tuple(pmi_rows),
    )
