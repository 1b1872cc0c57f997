"""Cross-lingual entity label matching over knowledge-graph dumps.

The package covers the full pipeline: streaming dump ingestion and class
filtering, language coverage ranking, candidate pair generation, a family
of string and embedding similarity scorers, greedy best-match selection
with baselines, stratified sampling, and evaluation against ground truth.
"""

__version__ = "0.1.0"
