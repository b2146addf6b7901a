"""Input parsers."""

from .voteview import ingest_ideology, party_label

__all__ = ["ingest_ideology", "party_label"]
