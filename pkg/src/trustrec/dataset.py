"""Loading, filtering and splitting of Yelp-like social review datasets.

A dataset directory holds JSON-Lines files::

    users.jsonl    {"user_id", "elite_years", "compliments": {"more", "thanks", "great_writer"}, "fans"}
    items.jsonl    {"item_id", "tags": [...]}
    reviews.jsonl  {"user_id", "item_id", "rating", "useful", "funny", "cool",
                    optional "positive_votes", "negative_votes"}
    tips.jsonl     {"user_id", "item_id", "like"}
    friends.jsonl  {"a", "b"}

``tips.jsonl`` and ``friends.jsonl`` may be absent.
"""
from __future__ import annotations

import json
import math
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator, Mapping, Sequence

import numpy as np

POSITIVE_ONLY = "positive-only"
POSITIVE_NEGATIVE = "positive-negative"
SCHEMAS = (POSITIVE_ONLY, POSITIVE_NEGATIVE)

REVIEW = "review"
TIP = "tip"

Pair = tuple[str, str]


class DatasetError(ValueError):
    """Raised for malformed or inconsistent dataset input."""


@dataclass(frozen=True)
class User:
    user_id: str
    elite_years: int = 0
    compliments_more: int = 0
    compliments_thanks: int = 0
    compliments_great_writer: int = 0
    fan_count: int = 0

    @property
    def compliments(self) -> int:
        return self.compliments_more + self.compliments_thanks + self.compliments_great_writer


@dataclass(frozen=True)
class Item:
    item_id: str
    tags: frozenset[str] = frozenset()


@dataclass(frozen=True)
class Contribution:
    author_id: str
    item_id: str
    kind: str
    rating: int | None = None
    useful: int = 0
    funny: int = 0
    cool: int = 0
    like: int = 0
    positive_votes: int | None = None
    negative_votes: int | None = None

    @property
    def key(self) -> tuple[str, str, str]:
        return (self.author_id, self.item_id, self.kind)


@dataclass(frozen=True)
class FriendEdge:
    """Unordered friendship; endpoints are stored sorted so equal pairs compare equal."""

    a: str
    b: str

    def __post_init__(self):
        if self.a == self.b:
            raise DatasetError(f"self friendship for user {self.a!r}")
        if self.a > self.b:
            a, b = self.b, self.a
            object.__setattr__(self, "a", a)
            object.__setattr__(self, "b", b)


@dataclass(frozen=True)
class Dataset:
    users: Mapping[str, User]
    items: Mapping[str, Item]
    contributions: tuple[Contribution, ...]
    friends: tuple[FriendEdge, ...] = ()
    schema: str = POSITIVE_ONLY

    def __post_init__(self):
        _validate(self)

    @property
    def reviews(self) -> tuple[Contribution, ...]:
        return tuple(c for c in self.contributions if c.kind == REVIEW)

    @property
    def tips(self) -> tuple[Contribution, ...]:
        return tuple(c for c in self.contributions if c.kind == TIP)

    def ratings(self) -> dict[Pair, int]:
        """The observed rating cells, keyed by (user_id, item_id)."""
        return {(c.author_id, c.item_id): c.rating for c in self.contributions if c.kind == REVIEW}

    def stats(self) -> dict[str, float]:
        n_users, n_items = len(self.users), len(self.items)
        n_ratings = sum(1 for c in self.contributions if c.kind == REVIEW)
        n_links = 2 * len(self.friends)
        rating_cells = n_users * n_items
        # each friendship is two directed links over ordered user pairs
        friend_cells = n_users * (n_users - 1)
        return {
            "users": n_users,
            "items": n_items,
            "ratings": n_ratings,
            "friend_links": n_links,
            "rating_sparsity": 1.0 - n_ratings / rating_cells if rating_cells else 0.0,
            "friend_sparsity": 1.0 - n_links / friend_cells if friend_cells else 0.0,
        }


def _validate(d: Dataset) -> None:
    if d.schema not in SCHEMAS:
        raise DatasetError(f"unknown schema {d.schema!r}")
    seen = set()
    for c in d.contributions:
        if c.author_id not in d.users:
            raise DatasetError(f"dangling reference: unknown user {c.author_id!r}")
        if c.item_id not in d.items:
            raise DatasetError(f"dangling reference: unknown item {c.item_id!r}")
        if c.key in seen:
            raise DatasetError(f"duplicate contribution {c.key!r}")
        seen.add(c.key)
        _check_contribution(c)
    pairs = set()
    for e in d.friends:
        for u in (e.a, e.b):
            if u not in d.users:
                raise DatasetError(f"dangling reference: unknown user {u!r} in friend edge")
        if (e.a, e.b) in pairs:
            raise DatasetError(f"duplicate friend edge {e.a!r}-{e.b!r}")
        pairs.add((e.a, e.b))


def _check_contribution(c: Contribution) -> None:
    if c.kind == REVIEW:
        if c.rating is None or not 1 <= c.rating <= 5:
            raise DatasetError(f"rating out of range [1,5]: {c.rating!r} for {c.key!r}")
    elif c.kind == TIP:
        if c.rating is not None:
            raise DatasetError(f"tip carries a rating: {c.key!r}")
    else:
        raise DatasetError(f"unknown contribution kind {c.kind!r}")
    counts = [c.useful, c.funny, c.cool, c.like]
    counts += [v for v in (c.positive_votes, c.negative_votes) if v is not None]
    if any(v < 0 for v in counts):
        raise DatasetError(f"negative feedback count in {c.key!r}")


# --------------------------------------------------------------------------- loading

def _read_jsonl(path: Path) -> Iterator[tuple[int, dict]]:
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise DatasetError(f"{path.name}:{lineno}: parse failure: {exc.msg}") from None
            if not isinstance(obj, dict):
                raise DatasetError(f"{path.name}:{lineno}: expected a JSON object")
            yield lineno, obj


def _count(obj: dict, key: str, where: str, default: int | None = 0) -> int | None:
    v = obj.get(key, default)
    if v is None:
        return None
    if isinstance(v, bool) or not isinstance(v, int) or v < 0:
        raise DatasetError(f"{where}: field {key!r} must be a non-negative integer, got {v!r}")
    return v


def _field(obj: dict, key: str, where: str) -> str:
    if key not in obj:
        raise DatasetError(f"{where}: missing field {key!r}")
    return str(obj[key])


def load_dataset(root: str | Path, schema: str = POSITIVE_ONLY) -> Dataset:
    """Read a dataset directory. Errors carry ``file:line`` context."""
    root = Path(root)
    if schema not in SCHEMAS:
        raise DatasetError(f"unknown schema {schema!r}")

    users: dict[str, User] = {}
    for lineno, obj in _read_jsonl(root / "users.jsonl"):
        where = f"users.jsonl:{lineno}"
        uid = _field(obj, "user_id", where)
        if uid in users:
            raise DatasetError(f"{where}: duplicate user {uid!r}")
        comp = obj.get("compliments") or {}
        users[uid] = User(
            uid,
            elite_years=_count(obj, "elite_years", where),
            compliments_more=_count(comp, "more", where),
            compliments_thanks=_count(comp, "thanks", where),
            compliments_great_writer=_count(comp, "great_writer", where),
            fan_count=_count(obj, "fans", where),
        )

    items: dict[str, Item] = {}
    for lineno, obj in _read_jsonl(root / "items.jsonl"):
        where = f"items.jsonl:{lineno}"
        iid = _field(obj, "item_id", where)
        if iid in items:
            raise DatasetError(f"{where}: duplicate item {iid!r}")
        items[iid] = Item(iid, frozenset(str(t) for t in obj.get("tags") or ()))

    contributions: list[Contribution] = []
    seen: set[tuple[str, str, str]] = set()

    def add(c: Contribution, where: str) -> None:
        if c.author_id not in users:
            raise DatasetError(f"{where}: dangling reference: unknown user {c.author_id!r}")
        if c.item_id not in items:
            raise DatasetError(f"{where}: dangling reference: unknown item {c.item_id!r}")
        if c.key in seen:
            raise DatasetError(f"{where}: duplicate contribution {c.key!r}")
        try:
            _check_contribution(c)
        except DatasetError as exc:
            raise DatasetError(f"{where}: {exc}") from None
        seen.add(c.key)
        contributions.append(c)

    for lineno, obj in _read_jsonl(root / "reviews.jsonl"):
        where = f"reviews.jsonl:{lineno}"
        rating = obj.get("rating")
        if isinstance(rating, float) and rating.is_integer():
            rating = int(rating)
        if isinstance(rating, bool) or not isinstance(rating, int):
            raise DatasetError(f"{where}: rating out of range [1,5]: {rating!r}")
        pos = _count(obj, "positive_votes", where, None)
        neg = _count(obj, "negative_votes", where, None)
        if schema == POSITIVE_NEGATIVE:
            pos, neg = pos or 0, neg or 0
        add(Contribution(
            _field(obj, "user_id", where), _field(obj, "item_id", where), REVIEW, rating,
            useful=_count(obj, "useful", where), funny=_count(obj, "funny", where),
            cool=_count(obj, "cool", where), positive_votes=pos, negative_votes=neg,
        ), where)

    tips_path = root / "tips.jsonl"
    if tips_path.exists():
        for lineno, obj in _read_jsonl(tips_path):
            where = f"tips.jsonl:{lineno}"
            add(Contribution(_field(obj, "user_id", where), _field(obj, "item_id", where), TIP,
                             like=_count(obj, "like", where)), where)

    friends: dict[tuple[str, str], FriendEdge] = {}
    friends_path = root / "friends.jsonl"
    if friends_path.exists():
        for lineno, obj in _read_jsonl(friends_path):
            where = f"friends.jsonl:{lineno}"
            a, b = _field(obj, "a", where), _field(obj, "b", where)
            for u in (a, b):
                if u not in users:
                    raise DatasetError(f"{where}: dangling reference: unknown user {u!r}")
            try:
                edge = FriendEdge(a, b)
            except DatasetError as exc:
                raise DatasetError(f"{where}: {exc}") from None
            # both directions of a friendship are commonly listed; keep one
            friends.setdefault((edge.a, edge.b), edge)

    return Dataset(users, items, tuple(contributions), tuple(friends.values()), schema)


def write_dataset(d: Dataset, root: str | Path) -> None:
    """Inverse of :func:`load_dataset`."""
    root = Path(root)
    root.mkdir(parents=True, exist_ok=True)

    def dump(name: str, rows: Iterable[dict]) -> None:
        with open(root / name, "w", encoding="utf-8") as fh:
            for r in rows:
                fh.write(json.dumps(r, sort_keys=True) + "\n")

    dump("users.jsonl", ({
        "user_id": u.user_id, "elite_years": u.elite_years, "fans": u.fan_count,
        "compliments": {"more": u.compliments_more, "thanks": u.compliments_thanks,
                        "great_writer": u.compliments_great_writer},
    } for u in d.users.values()))
    dump("items.jsonl", ({"item_id": i.item_id, "tags": sorted(i.tags)} for i in d.items.values()))

    def review_row(c: Contribution) -> dict:
        row = {"user_id": c.author_id, "item_id": c.item_id, "rating": c.rating,
               "useful": c.useful, "funny": c.funny, "cool": c.cool}
        if c.positive_votes is not None:
            row["positive_votes"] = c.positive_votes
        if c.negative_votes is not None:
            row["negative_votes"] = c.negative_votes
        return row

    dump("reviews.jsonl", (review_row(c) for c in d.contributions if c.kind == REVIEW))
    dump("tips.jsonl", ({"user_id": c.author_id, "item_id": c.item_id, "like": c.like}
                        for c in d.contributions if c.kind == TIP))
    dump("friends.jsonl", ({"a": e.a, "b": e.b} for e in d.friends))


# --------------------------------------------------------------------------- filtering

def filter_dataset(d: Dataset, min_ratings: int = 0, category_tags: Iterable[str] = (),
                   count_on: str = "filtered") -> Dataset:
    """Keep items carrying one of ``category_tags``, then users with at least ``min_ratings`` reviews.

    With ``count_on="filtered"`` (default) reviews are counted on the surviving items only;
    ``count_on="all"`` counts every review the user wrote before item filtering.
    """
    if min_ratings < 0:
        raise ValueError("min_ratings must be >= 0")
    if count_on not in ("filtered", "all"):
        raise ValueError(f"count_on must be 'filtered' or 'all', got {count_on!r}")
    tags = frozenset(category_tags)
    items = {k: v for k, v in d.items.items() if not tags or v.tags & tags}

    pool = d.contributions if count_on == "all" else [c for c in d.contributions if c.item_id in items]
    n_reviews = Counter(c.author_id for c in pool if c.kind == REVIEW)
    users = {k: v for k, v in d.users.items() if n_reviews[k] >= min_ratings}

    contributions = tuple(c for c in d.contributions if c.item_id in items and c.author_id in users)
    friends = tuple(e for e in d.friends if e.a in users and e.b in users)
    return Dataset(users, items, contributions, friends, d.schema)


# --------------------------------------------------------------------------- splitting

@dataclass(frozen=True)
class SplitPlan:
    train: tuple[Pair, ...]
    test: tuple[Pair, ...]
    folds: Mapping[Pair, int] | None = field(default=None)

    def __post_init__(self):
        if set(self.train) & set(self.test):
            raise ValueError("train and test overlap")
        if self.folds is not None and set(self.folds) != set(self.train):
            raise ValueError("fold assignment must partition the training pairs")

    def with_folds(self, k: int, seed: int) -> "SplitPlan":
        return SplitPlan(self.train, self.test, kfold(self.train, k, seed))

    def serialize(self) -> str:
        lines = []
        for u, i in self.train:
            tag = "train" if self.folds is None else f"fold:{self.folds[(u, i)]}"
            lines.append(f"{u}\t{i}\t{tag}")
        lines.extend(f"{u}\t{i}\ttest" for u, i in self.test)
        return "\n".join(lines) + "\n"

    @classmethod
    def parse(cls, text: str) -> "SplitPlan":
        train, test, folds = [], [], {}
        for lineno, line in enumerate(text.splitlines(), 1):
            if not line:
                continue
            parts = line.split("\t")
            if len(parts) != 3:
                raise ValueError(f"line {lineno}: expected 3 tab-separated fields")
            u, i, tag = parts
            if tag == "test":
                test.append((u, i))
            elif tag == "train":
                train.append((u, i))
            elif tag.startswith("fold:"):
                train.append((u, i))
                folds[(u, i)] = int(tag[5:])
            else:
                raise ValueError(f"line {lineno}: unknown split tag {tag!r}")
        if folds and len(folds) != len(train):
            raise ValueError("either all or no training pairs carry a fold")
        return cls(tuple(train), tuple(test), folds or None)


def _round_half_up(x: float) -> int:
    return int(math.floor(x + 0.5))


def split_holdout(d: Dataset, test_fraction: float = 0.1, seed: int = 0) -> SplitPlan:
    """Uniform random hold-out over the observed rating cells."""
    if not 0 < test_fraction < 1:
        raise ValueError("test_fraction must lie in (0, 1)")
    pairs = sorted(d.ratings())
    if len(pairs) < 2:
        raise ValueError("need at least two ratings to split")
    n_test = _round_half_up(test_fraction * len(pairs))
    order = np.random.default_rng(seed).permutation(len(pairs))
    test = sorted(pairs[j] for j in order[:n_test])
    train = sorted(pairs[j] for j in order[n_test:])
    return SplitPlan(tuple(train), tuple(test))


def kfold(train: Sequence[Pair], k: int = 5, seed: int = 0) -> dict[Pair, int]:
    """Assign each training pair to one of ``k`` folds; fold sizes differ by at most one."""
    if k < 2:
        raise ValueError("k must be >= 2")
    pairs = sorted(set(train))
    if len(pairs) < k:
        raise ValueError(f"cannot split {len(pairs)} pairs into {k} folds")
    order = np.random.default_rng(seed).permutation(len(pairs))
    return {pairs[j]: pos % k for pos, j in enumerate(order)}


def fold_members(folds: Mapping[Pair, int]) -> list[list[Pair]]:
    out: list[list[Pair]] = [[] for _ in range(max(folds.values()) + 1)]
    for pair in sorted(folds):
        out[folds[pair]].append(pair)
    return out
