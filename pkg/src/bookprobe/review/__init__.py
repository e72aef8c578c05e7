"""Human review of alignment candidates: durable votes, unanimity filtering, HTTP API."""

from .server import create_app, items_from_passages, load_items
from .store import FinalizedSets, ReviewItem, Vote, VoteStore, finalize_unanimous

__all__ = [
    "create_app",
    "items_from_passages",
    "load_items",
    "FinalizedSets",
    "ReviewItem",
    "Vote",
    "VoteStore",
    "finalize_unanimous",
]
