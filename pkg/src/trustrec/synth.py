"""Synthetic social review data with planted reliable and noisy raters.

Reliable raters rate from a shared low-rank preference model and collect plenty
of feedback; noisy raters rate uniformly at random and collect little. Friendships
are denser among reliable raters.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dataset import REVIEW, TIP, Contribution, Dataset, FriendEdge, Item, User

HOTEL_TAGS = ("Hotels", "Mountain Huts", "Residences", "Rest Stops", "Bed & Breakfast", "Hostels", "Resorts")


@dataclass(frozen=True)
class SynthConfig:
    n_users: int = 200
    n_items: int = 200
    noisy_fraction: float = 0.3
    ratings_per_user: tuple[int, int] = (15, 40)
    latent_dim: int = 4
    rating_noise: float = 0.3
    tip_rate: float = 0.2
    friend_degree: float = 6.0
    homophily: float = 0.8
    seed: int = 0


def generate(cfg: SynthConfig = SynthConfig()) -> tuple[Dataset, set[str]]:
    """Returns the dataset and the ids of the planted noisy raters."""
    rng = np.random.default_rng(cfg.seed)
    width = len(str(max(cfg.n_users, cfg.n_items)))
    uids = [f"u{j:0{width}d}" for j in range(cfg.n_users)]
    iids = [f"i{j:0{width}d}" for j in range(cfg.n_items)]
    n_noisy = int(round(cfg.noisy_fraction * cfg.n_users))
    noisy_idx = set(rng.choice(cfg.n_users, n_noisy, replace=False).tolist())
    noisy = {uids[j] for j in noisy_idx}

    P = rng.normal(size=(cfg.n_users, cfg.latent_dim))
    Q = rng.normal(size=(cfg.n_items, cfg.latent_dim))
    item_bias = rng.normal(scale=0.5, size=cfg.n_items)
    raw = P @ Q.T / np.sqrt(cfg.latent_dim) + item_bias

    users = {}
    for j, u in enumerate(uids):
        if j in noisy_idx:
            users[u] = User(u, elite_years=0,
                            compliments_more=int(rng.poisson(0.5)), compliments_thanks=int(rng.poisson(0.5)),
                            compliments_great_writer=int(rng.poisson(0.3)), fan_count=int(rng.poisson(0.5)))
        else:
            users[u] = User(u, elite_years=int(rng.integers(0, 9)),
                            compliments_more=int(rng.poisson(20)), compliments_thanks=int(rng.poisson(30)),
                            compliments_great_writer=int(rng.poisson(10)), fan_count=int(rng.poisson(15)))
    items = {i: Item(i, frozenset({HOTEL_TAGS[int(rng.integers(len(HOTEL_TAGS)))]})) for i in iids}

    contributions = []
    lo, hi = cfg.ratings_per_user
    for j, u in enumerate(uids):
        n_rated = int(rng.integers(lo, hi + 1))
        chosen = np.sort(rng.choice(cfg.n_items, min(n_rated, cfg.n_items), replace=False))
        is_noisy = j in noisy_idx
        for y in chosen:
            if is_noisy:
                rating = int(rng.integers(1, 6))
                useful, funny, cool = (int(v) for v in rng.poisson((0.2, 0.05, 0.05)))
            else:
                z = raw[j, y] + rng.normal(scale=cfg.rating_noise)
                rating = int(np.clip(np.rint(3.2 + 1.1 * z), 1, 5))
                useful, funny, cool = (int(v) for v in rng.poisson((5.0, 1.0, 1.5)))
            contributions.append(Contribution(u, iids[y], REVIEW, rating, useful=useful, funny=funny, cool=cool))
            if rng.random() < cfg.tip_rate:
                like = int(rng.poisson(0.1 if is_noisy else 2.0))
                contributions.append(Contribution(u, iids[y], TIP, like=like))

    friends = set()
    n_edges = int(cfg.friend_degree * cfg.n_users / 2)
    reliable = [j for j in range(cfg.n_users) if j not in noisy_idx]
    while len(friends) < n_edges:
        if reliable and rng.random() < cfg.homophily:
            a, b = rng.choice(reliable, 2, replace=False)
        else:
            a, b = rng.choice(cfg.n_users, 2, replace=False)
        e = FriendEdge(uids[int(a)], uids[int(b)])
        friends.add((e.a, e.b))
    edges = tuple(FriendEdge(a, b) for a, b in sorted(friends))
    return Dataset(users, items, tuple(contributions), edges), noisy
