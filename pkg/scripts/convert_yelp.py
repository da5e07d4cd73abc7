"""Convert the public Yelp academic dump into the trustrec JSONL layout.

Reads ``yelp_academic_dataset_{user,business,review,tip}.json`` from one
directory and writes users/items/reviews/tips/friends ``.jsonl`` to another.
Friend lists are symmetrised and restricted to users present in the dump; a
second rating of the same business by the same user keeps the latest review.

    python3 scripts/convert_yelp.py /data/yelp /data/yelp-trustrec
    trustrec ingest --data /data/yelp-trustrec --config hotel.cfg
"""
import argparse
import json
import sys
from pathlib import Path


def _rows(path: Path):
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                yield json.loads(line)


def _dump(rows, path: Path) -> int:
    n = 0
    with open(path, "w", encoding="utf-8") as fh:
        for r in rows:
            fh.write(json.dumps(r, sort_keys=True) + "\n")
            n += 1
    return n


def _elite_years(raw) -> int:
    if isinstance(raw, list):
        return len(raw)
    return len([y for y in str(raw or "").split(",") if y.strip() and y.strip() != "None"])


def _tags(raw) -> list[str]:
    if isinstance(raw, list):
        return raw
    return [t.strip() for t in (raw or "").split(",") if t.strip()]


def convert(src: Path, dst: Path) -> None:
    dst.mkdir(parents=True, exist_ok=True)
    users, friend_lists = [], {}
    for u in _rows(src / "yelp_academic_dataset_user.json"):
        users.append({"user_id": u["user_id"], "elite_years": _elite_years(u.get("elite")),
                      "fans": int(u.get("fans", 0)),
                      "compliments": {"more": int(u.get("compliment_more", 0)),
                                      "thanks": int(u.get("compliment_thanks", 0)),
                                      "great_writer": int(u.get("compliment_writer", 0))}})
        raw = u.get("friends") or []
        friend_lists[u["user_id"]] = raw if isinstance(raw, list) else [f.strip() for f in raw.split(",")]
    known = set(friend_lists)

    items = [{"item_id": b["business_id"], "tags": _tags(b.get("categories"))}
             for b in _rows(src / "yelp_academic_dataset_business.json")]
    item_ids = {i["item_id"] for i in items}

    latest = {}
    for r in _rows(src / "yelp_academic_dataset_review.json"):
        if r["user_id"] not in known or r["business_id"] not in item_ids:
            continue
        key = (r["user_id"], r["business_id"])
        if key not in latest or r.get("date", "") >= latest[key].get("date", ""):
            latest[key] = r
    reviews = [{"user_id": u, "item_id": i, "rating": int(r["stars"]), "useful": int(r.get("useful", 0)),
                "funny": int(r.get("funny", 0)), "cool": int(r.get("cool", 0))}
               for (u, i), r in sorted(latest.items())]

    tips = {}
    tip_file = src / "yelp_academic_dataset_tip.json"
    if tip_file.exists():
        for t in _rows(tip_file):
            key = (t["user_id"], t["business_id"])
            if t["user_id"] in known and t["business_id"] in item_ids:
                tips[key] = tips.get(key, 0) + int(t.get("compliment_count", t.get("likes", 0)))
    tip_rows = [{"user_id": u, "item_id": i, "like": n} for (u, i), n in sorted(tips.items())]

    edges = set()
    for u, fs in friend_lists.items():
        for f in fs:
            if f in known and f != u:
                edges.add((min(u, f), max(u, f)))

    print(f"users {_dump(users, dst / 'users.jsonl')}", file=sys.stderr)
    print(f"items {_dump(items, dst / 'items.jsonl')}", file=sys.stderr)
    print(f"reviews {_dump(reviews, dst / 'reviews.jsonl')}", file=sys.stderr)
    print(f"tips {_dump(tip_rows, dst / 'tips.jsonl')}", file=sys.stderr)
    print(f"friends {_dump(({'a': a, 'b': b} for a, b in sorted(edges)), dst / 'friends.jsonl')}", file=sys.stderr)


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    ap.add_argument("src", type=Path)
    ap.add_argument("dst", type=Path)
    args = ap.parse_args(argv)
    convert(args.src, args.dst)
    return 0


if __name__ == "__main__":
    sys.exit(main())
