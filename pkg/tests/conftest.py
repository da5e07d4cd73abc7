import json
from pathlib import Path

import pytest

from trustrec.dataset import REVIEW, TIP, Contribution, Dataset, FriendEdge, Item, User

FIXTURES = Path(__file__).parent / "fixtures"


def make_dataset(ratings, tips=(), friends=(), users=None, items=None, schema="positive-only"):
    """ratings: iterable of (user, item, rating[, useful, funny, cool]); tips: (user, item, like)."""
    contribs = []
    for row in ratings:
        u, i, r, *fb = row
        useful, funny, cool = (list(fb) + [0, 0, 0])[:3]
        contribs.append(Contribution(u, i, REVIEW, r, useful=useful, funny=funny, cool=cool))
    for u, i, like in tips:
        contribs.append(Contribution(u, i, TIP, like=like))
    uids = set(users or ()) | {c.author_id for c in contribs} | {x for e in friends for x in e}
    iids = set(items or ()) | {c.item_id for c in contribs}
    return Dataset(
        {u: User(u) for u in sorted(uids)},
        {i: Item(i, frozenset({"Hotels"})) for i in sorted(iids)},
        tuple(contribs),
        tuple(FriendEdge(a, b) for a, b in friends),
        schema,
    )


def write_jsonl(path: Path, rows) -> None:
    path.write_text("".join(json.dumps(r) + "\n" for r in rows), encoding="utf-8")


@pytest.fixture
def hotel50() -> Path:
    return FIXTURES / "hotel50"
