"""Survey-feedback analysis engine.

Ingests tabular survey exports, infers which columns are open-ended, and
produces multi-perspective analyses of the open-ended answers: abstractive
summaries, a 2-D topic map with density clusters, PMI term labels,
verified notable examples, and term-by-category tables.
"""

__version__ = "0.1.0"
