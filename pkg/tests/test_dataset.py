import pytest
from hypothesis import given, settings, strategies as st

from trustrec.dataset import (DatasetError, SplitPlan, filter_dataset, fold_members, kfold, load_dataset,
                              split_holdout, write_dataset, Dataset, Item, User, Contribution, REVIEW)

from conftest import make_dataset, write_jsonl


def _minimal(tmp_path, reviews, n_users=3):
    write_jsonl(tmp_path / "users.jsonl", [{"user_id": f"u{j}", "elite_years": 1, "fans": 2,
                                            "compliments": {"more": 1, "thanks": 0, "great_writer": 3}}
                                           for j in range(n_users)])
    write_jsonl(tmp_path / "items.jsonl", [{"item_id": "a", "tags": ["Hotels"]}, {"item_id": "b", "tags": []}])
    write_jsonl(tmp_path / "reviews.jsonl", reviews)


def test_load_counts(tmp_path):
    _minimal(tmp_path, [
        {"user_id": "u0", "item_id": "a", "rating": 4, "useful": 2, "funny": 0, "cool": 1},
        {"user_id": "u1", "item_id": "b", "rating": 2},
    ])
    d = load_dataset(tmp_path)
    assert len(d.users) == 3
    assert len(d.contributions) == 2
    assert d.users["u0"].compliments == 4
    assert d.ratings() == {("u0", "a"): 4, ("u1", "b"): 2}


def test_rating_out_of_range(tmp_path):
    _minimal(tmp_path, [{"user_id": "u0", "item_id": "a", "rating": 6}])
    with pytest.raises(DatasetError, match="rating out of range"):
        load_dataset(tmp_path)


def test_duplicate_contribution(tmp_path):
    _minimal(tmp_path, [{"user_id": "u0", "item_id": "a", "rating": 3},
                        {"user_id": "u0", "item_id": "a", "rating": 5}])
    with pytest.raises(DatasetError, match="reviews.jsonl:2: duplicate contribution"):
        load_dataset(tmp_path)


def test_parse_failure_has_line_number(tmp_path):
    _minimal(tmp_path, [{"user_id": "u0", "item_id": "a", "rating": 3}])
    with open(tmp_path / "reviews.jsonl", "a") as fh:
        fh.write("{not json\n")
    with pytest.raises(DatasetError, match="reviews.jsonl:2: parse failure"):
        load_dataset(tmp_path)


def test_dangling_reference(tmp_path):
    _minimal(tmp_path, [{"user_id": "ghost", "item_id": "a", "rating": 3}])
    with pytest.raises(DatasetError, match="dangling reference"):
        load_dataset(tmp_path)


def test_friend_edges_deduplicated_and_self_loops_rejected(tmp_path):
    _minimal(tmp_path, [])
    write_jsonl(tmp_path / "friends.jsonl", [{"a": "u0", "b": "u1"}, {"a": "u1", "b": "u0"}])
    assert len(load_dataset(tmp_path).friends) == 1
    write_jsonl(tmp_path / "friends.jsonl", [{"a": "u0", "b": "u0"}])
    with pytest.raises(DatasetError, match="friends.jsonl:1"):
        load_dataset(tmp_path)


def test_positive_negative_schema_defaults_votes(tmp_path):
    _minimal(tmp_path, [{"user_id": "u0", "item_id": "a", "rating": 3, "positive_votes": 4}])
    d = load_dataset(tmp_path, "positive-negative")
    c = d.contributions[0]
    assert (c.positive_votes, c.negative_votes) == (4, 0)


def test_write_load_roundtrip(tmp_path, hotel50):
    d = load_dataset(hotel50)
    write_dataset(d, tmp_path / "copy")
    assert load_dataset(tmp_path / "copy") == d


# --------------------------------------------------------------------------- filtering

def _tagged():
    users = {u: User(u) for u in ("x", "y")}
    items = {"h1": Item("h1", frozenset({"Hostels"})), "h2": Item("h2", frozenset({"Hotels"})),
             "p": Item("p", frozenset({"Pizza"}))}
    contribs = [Contribution("x", i, REVIEW, 4) for i in ("h1", "h2", "p")]
    contribs += [Contribution("y", "p", REVIEW, 2), Contribution("y", "h1", REVIEW, 5)]
    return Dataset(users, items, tuple(contribs))


def test_filter_identity():
    d = _tagged()
    assert filter_dataset(d, 0, set()) == d


def test_filter_tags_then_users():
    d = _tagged()
    out = filter_dataset(d, 2, {"Hotels", "Hostels"})
    assert set(out.items) == {"h1", "h2"}
    # y keeps only one review on accommodation items
    assert set(out.users) == {"x"}
    assert filter_dataset(d, 2, {"Hotels", "Hostels"}, count_on="all").users.keys() == {"x", "y"}


def test_filter_threshold():
    d = make_dataset([("a", f"i{j}", 3) for j in range(9)] + [("b", f"i{j}", 3) for j in range(10)])
    assert set(filter_dataset(d, 10).users) == {"b"}


def test_filter_idempotent(hotel50):
    d = load_dataset(hotel50)
    once = filter_dataset(d, 25, {"Hotels", "Hostels", "Resorts"})
    assert filter_dataset(once, 25, {"Hotels", "Hostels", "Resorts"}) == once
    assert all(e.a in once.users and e.b in once.users for e in once.friends)


# --------------------------------------------------------------------------- splitting

def test_split_sizes_and_determinism():
    d = make_dataset([(f"u{j % 10}", f"i{j}", 1 + j % 5) for j in range(100)])
    a, b = split_holdout(d, 0.1, 3), split_holdout(d, 0.1, 3)
    assert len(a.test) == 10
    assert a == b
    assert a.serialize() == b.serialize()
    assert set(a.train) | set(a.test) == set(d.ratings())


def test_split_rounding_table_one_size():
    d = make_dataset([(f"u{j % 654}", f"i{j}", 4) for j in range(10081)])
    assert len(split_holdout(d, 0.1, 0).test) == 1008


def test_kfold_sizes():
    pairs = [(f"u{j}", "i") for j in range(11)]
    sizes = sorted((len(f) for f in fold_members(kfold(pairs, 5, 0))), reverse=True)
    assert sizes == [3, 2, 2, 2, 2]
    pairs = [(f"u{j}", "i") for j in range(10)]
    assert [len(f) for f in fold_members(kfold(pairs, 5, 0))] == [2] * 5
    with pytest.raises(ValueError):
        kfold(pairs[:3], 5, 0)


@settings(max_examples=50, deadline=None)
@given(st.sets(st.tuples(st.sampled_from("abcdefg"), st.integers(0, 30)), min_size=5, max_size=120),
       st.integers(2, 5), st.integers(0, 2**31))
def test_kfold_partitions(pairs, k, seed):
    pairs = [(u, f"i{i}") for u, i in pairs]
    folds = fold_members(kfold(pairs, k, seed))
    flat = [p for f in folds for p in f]
    assert len(flat) == len(set(flat)) == len(pairs)
    assert set(flat) == set(pairs)
    assert max(map(len, folds)) - min(map(len, folds)) <= 1


def test_split_serialization_roundtrip(hotel50):
    d = load_dataset(hotel50)
    plan = split_holdout(d, 0.1, 0).with_folds(5, 1)
    again = SplitPlan.parse(plan.serialize())
    assert again == plan
    text = plan.serialize()
    assert text.splitlines()[0].split("\t")[2].startswith("fold:")
    assert split_holdout(load_dataset(hotel50), 0.1, 0).with_folds(5, 1).serialize() == text
