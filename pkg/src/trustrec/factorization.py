"""Matrix factorization with trust-weighted ratings and social regularization.

Three objectives share one code path::

    sum_{(x,y)} w_xy (R_xy - u_x.i_y)^2
      + alpha * sum_x sum_{z in N(x)} g_z (S_xz - u_x' H u_z)^2
      + lambda (|U|^2 + |I|^2 + |H|^2)

MF uses w = 1 and no social term; LOCABAL uses w_xy = imp_x, g = 1;
LOCABAL+ uses w_xy = mft_xy, g_z = mgr_z. H (and its penalty) is only
present for the social variants with alpha > 0.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping

import numpy as np
import scipy.sparse as sp

from .dataset import Pair
from .trustgraph import SocialGraph

MF = "MF"
LOCABAL = "LOCABAL"
LOCABALPLUS = "LOCABALPLUS"
VARIANTS = (MF, LOCABAL, LOCABALPLUS)

RATING_MIN, RATING_MAX = 1.0, 5.0
MODEL_HEADER = "trustrec-model 1"
_MAX_HALVINGS = 60


class TrainingDiverged(RuntimeError):
    def __init__(self, epoch: int, value: float):
        super().__init__(f"objective became {value} at epoch {epoch}")
        self.epoch = epoch
        self.value = value


@dataclass(frozen=True)
class HyperParams:
    k: int = 50
    alpha: float = 0.0
    lam: float = 0.1
    learning_rate: float = 0.01
    epochs: int = 100
    seed: int = 0
    init_scale: float = 0.1

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be >= 1")
        if self.alpha < 0 or self.lam < 0:
            raise ValueError("alpha and lambda must be >= 0")
        if self.learning_rate <= 0 or self.init_scale <= 0:
            raise ValueError("learning_rate and init_scale must be > 0")
        if self.epochs < 0:
            raise ValueError("epochs must be >= 0")


@dataclass(frozen=True)
class ObjectiveSpec:
    """Per-rating weights and per-neighbour regularization weights; ``None`` means all ones."""

    variant: str = MF
    weights: Mapping[Pair, float] | None = None
    reg_weights: Mapping[str, float] | None = None

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ValueError(f"unknown variant {self.variant!r}")


def mf_spec() -> ObjectiveSpec:
    return ObjectiveSpec(MF)


def locabal_spec(pairs, importance: Mapping[str, float]) -> ObjectiveSpec:
    return ObjectiveSpec(LOCABAL, {(u, i): importance[u] for u, i in pairs}, None)


def locabal_plus_spec(mft: Mapping[Pair, float], mgr: Mapping[str, float]) -> ObjectiveSpec:
    return ObjectiveSpec(LOCABALPLUS, mft, mgr)


@dataclass
class ModelParams:
    U: np.ndarray  # K x n
    I: np.ndarray  # K x m
    H: np.ndarray | None
    users: tuple[str, ...]
    items: tuple[str, ...]
    global_mean: float
    history: list[float] = field(default_factory=list)

    def __post_init__(self):
        self._uidx = {u: j for j, u in enumerate(self.users)}
        self._iidx = {i: j for j, i in enumerate(self.items)}

    @property
    def k(self) -> int:
        return self.U.shape[0]

    def dump(self, path: str | Path) -> None:
        """Text dump; floats are written in hex so a reload is bit-exact."""
        k, n, m = self.U.shape[0], self.U.shape[1], self.I.shape[1]
        lines = [MODEL_HEADER, f"{k} {n} {m} {int(self.H is not None)}", self.global_mean.hex(),
                 json.dumps(list(self.users)), json.dumps(list(self.items))]
        for mat in (self.U, self.I) + ((self.H,) if self.H is not None else ()):
            lines.extend(" ".join(float(v).hex() for v in row) for row in mat)
        Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")

    @classmethod
    def load(cls, path: str | Path) -> "ModelParams":
        lines = Path(path).read_text(encoding="utf-8").splitlines()
        if not lines or lines[0] != MODEL_HEADER:
            raise ValueError(f"{path}: not a model dump (expected header {MODEL_HEADER!r})")
        k, n, m, has_h = map(int, lines[1].split())
        gmean = float.fromhex(lines[2])
        users, items = tuple(json.loads(lines[3])), tuple(json.loads(lines[4]))
        pos = 5

        def read(rows: int, cols: int) -> np.ndarray:
            nonlocal pos
            block = lines[pos:pos + rows]
            pos += rows
            if rows and cols == 0:
                return np.zeros((rows, 0))
            return np.array([[float.fromhex(v) for v in row.split()] for row in block]).reshape(rows, cols)

        U, I = read(k, n), read(k, m)
        H = read(k, k) if has_h else None
        return cls(U, I, H, users, items, gmean)


@dataclass
class Problem:
    """Index-space view of the training ratings and social pairs."""

    users: tuple[str, ...]
    items: tuple[str, ...]
    rows: np.ndarray
    cols: np.ndarray
    ratings: np.ndarray
    weights: np.ndarray
    s_x: np.ndarray
    s_z: np.ndarray
    s_val: np.ndarray
    s_w: np.ndarray
    variant: str

    @classmethod
    def build(cls, ratings: Mapping[Pair, float], spec: ObjectiveSpec,
              similarity: Mapping[tuple[str, str], float] | None = None) -> "Problem":
        pairs = sorted(ratings)
        users = tuple(sorted({u for u, _ in pairs}))
        items = tuple(sorted({i for _, i in pairs}))
        uidx = {u: j for j, u in enumerate(users)}
        iidx = {i: j for j, i in enumerate(items)}
        if spec.weights is None:
            w = np.ones(len(pairs))
        else:
            missing = [p for p in pairs if p not in spec.weights]
            if missing:
                raise ValueError(f"rating weights missing for {len(missing)} training pairs, e.g. {missing[0]}")
            w = np.array([float(spec.weights[p]) for p in pairs])
        social = []
        if spec.variant != MF and similarity:
            for (x, z), s in sorted(similarity.items()):
                if x in uidx and z in uidx:
                    g = 1.0 if spec.reg_weights is None else float(spec.reg_weights[z])
                    social.append((uidx[x], uidx[z], float(s), g))
        soc = np.array(social, dtype=float).reshape(-1, 4)
        return cls(
            users, items,
            np.array([uidx[u] for u, _ in pairs], dtype=np.intp),
            np.array([iidx[i] for _, i in pairs], dtype=np.intp),
            np.array([float(ratings[p]) for p in pairs]),
            w,
            soc[:, 0].astype(np.intp), soc[:, 1].astype(np.intp), soc[:, 2], soc[:, 3],
            spec.variant,
        )

    @property
    def n(self) -> int:
        return len(self.users)

    @property
    def m(self) -> int:
        return len(self.items)

    def uses_h(self, alpha: float) -> bool:
        return self.variant != MF and alpha > 0

    def _rating_matrix(self, data: np.ndarray) -> sp.csr_matrix:
        return sp.csr_matrix((data, (self.rows, self.cols)), shape=(self.n, self.m))

    def _social_matrix(self, data: np.ndarray) -> sp.csr_matrix:
        return sp.csr_matrix((data, (self.s_x, self.s_z)), shape=(self.n, self.n))


def _check_dims(U, I, H, prob: Problem, alpha: float) -> None:
    if U.shape[1] != prob.n or I.shape[1] != prob.m or U.shape[0] != I.shape[0]:
        raise ValueError(f"dimension mismatch: U{U.shape}, I{I.shape} for n={prob.n}, m={prob.m}")
    if prob.uses_h(alpha) and (H is None or H.shape != (U.shape[0], U.shape[0])):
        raise ValueError("dimension mismatch: H must be K x K for a social objective")


def objective(U: np.ndarray, I: np.ndarray, H: np.ndarray | None, prob: Problem, alpha: float, lam: float) -> float:
    _check_dims(U, I, H, prob, alpha)
    err = prob.ratings - np.einsum("kj,kj->j", U[:, prob.rows], I[:, prob.cols])
    total = float(np.dot(prob.weights, err * err))
    reg = float(np.sum(U * U) + np.sum(I * I))
    if prob.uses_h(alpha):
        if len(prob.s_x):
            s_err = prob.s_val - np.einsum("kj,kj->j", (H.T @ U)[:, prob.s_x], U[:, prob.s_z])
            total += alpha * float(np.dot(prob.s_w, s_err * s_err))
        reg += float(np.sum(H * H))
    return total + lam * reg


def gradients(U: np.ndarray, I: np.ndarray, H: np.ndarray | None, prob: Problem, alpha: float,
              lam: float) -> tuple[np.ndarray, np.ndarray, np.ndarray | None]:
    """Analytic gradient of :func:`objective` with respect to U, I and (when present) H."""
    _check_dims(U, I, H, prob, alpha)
    err = prob.ratings - np.einsum("kj,kj->j", U[:, prob.rows], I[:, prob.cols])
    E = prob._rating_matrix(prob.weights * err)
    # (E @ I.T).T without materialising transposes of the sparse matrix
    gU = -2.0 * (E @ I.T).T + 2.0 * lam * U
    gI = -2.0 * (E.T @ U.T).T + 2.0 * lam * I
    gH = None
    if prob.uses_h(alpha):
        gH = 2.0 * lam * H
        if len(prob.s_x):
            HtU = H.T @ U
            s_err = prob.s_val - np.einsum("kj,kj->j", HtU[:, prob.s_x], U[:, prob.s_z])
            G = prob._social_matrix(-2.0 * alpha * prob.s_w * s_err)
            # d/du_x: sum_z g_xz H u_z ; d/du_z: sum_x g_xz H' u_x ; d/dH: sum g_xz u_x u_z'
            gU = gU + (G @ (H @ U).T).T + (G.T @ HtU.T).T
            gH = gH + U @ (G @ U.T)
    return gU, gI, gH


def init_params(prob: Problem, hp: HyperParams) -> tuple[np.ndarray, np.ndarray, np.ndarray | None]:
    rng = np.random.default_rng(hp.seed)
    s = hp.init_scale
    U = rng.uniform(-s, s, (hp.k, prob.n))
    I = rng.uniform(-s, s, (hp.k, prob.m))
    # drawn last so U and I do not depend on whether H is used
    H = rng.uniform(-s, s, (hp.k, hp.k))
    return U, I, (H if prob.uses_h(hp.alpha) else None)


def train(ratings: Mapping[Pair, float], spec: ObjectiveSpec, hp: HyperParams,
          similarity: Mapping[tuple[str, str], float] | None = None) -> ModelParams:
    """Full-batch gradient descent from a seeded uniform initialisation.

    A step that would raise the objective is retried with half the learning rate,
    and the reduced rate is kept; ``history`` therefore never increases.
    """
    prob = Problem.build(ratings, spec, similarity)
    U, I, H = init_params(prob, hp)
    gmean = float(prob.ratings.mean()) if len(prob.ratings) else (RATING_MIN + RATING_MAX) / 2
    cur = objective(U, I, H, prob, hp.alpha, hp.lam)
    if not math.isfinite(cur):
        raise TrainingDiverged(0, cur)
    history = [cur]
    lr = hp.learning_rate
    for epoch in range(1, hp.epochs + 1):
        gU, gI, gH = gradients(U, I, H, prob, hp.alpha, hp.lam)
        for _ in range(_MAX_HALVINGS):
            nU, nI = U - lr * gU, I - lr * gI
            nH = H - lr * gH if H is not None else None
            new = objective(nU, nI, nH, prob, hp.alpha, hp.lam)
            if new <= cur:
                U, I, H, cur = nU, nI, nH, new
                break
            lr *= 0.5
        if not math.isfinite(cur):
            raise TrainingDiverged(epoch, cur)
        history.append(cur)
    return ModelParams(U, I, H, prob.users, prob.items, gmean, history)


def predict(model: ModelParams, u: str, i: str) -> float:
    """u_x.i_y clamped to the rating scale; unseen users or items get the training mean."""
    x, y = model._uidx.get(u), model._iidx.get(i)
    if x is None or y is None:
        return model.global_mean
    v = float(model.U[:, x] @ model.I[:, y])
    return min(RATING_MAX, max(RATING_MIN, v))


# --------------------------------------------------------------------------- similarity

def pearson(ratings_x: Mapping[str, float], ratings_z: Mapping[str, float], center: str = "user") -> float:
    """Pearson correlation over the items both users rated.

    ``center="user"`` subtracts each user's mean over all their ratings;
    ``center="corated"`` subtracts the mean over the co-rated items only.
    Returns 0 with fewer than two co-rated items or a zero variance.
    """
    common = sorted(set(ratings_x) & set(ratings_z))
    if len(common) < 2:
        return 0.0
    if center == "user":
        mx = sum(ratings_x.values()) / len(ratings_x)
        mz = sum(ratings_z.values()) / len(ratings_z)
    elif center == "corated":
        mx = sum(ratings_x[i] for i in common) / len(common)
        mz = sum(ratings_z[i] for i in common) / len(common)
    else:
        raise ValueError(f"unknown centering {center!r}")
    dx = [ratings_x[i] - mx for i in common]
    dz = [ratings_z[i] - mz for i in common]
    vx = sum(a * a for a in dx)
    vz = sum(b * b for b in dz)
    if vx <= 0 or vz <= 0:
        return 0.0
    r = sum(a * b for a, b in zip(dx, dz)) / math.sqrt(vx * vz)
    return max(-1.0, min(1.0, r))


def ratings_by_user(ratings: Mapping[Pair, float]) -> dict[str, dict[str, float]]:
    out: dict[str, dict[str, float]] = {}
    for (u, i), r in ratings.items():
        out.setdefault(u, {})[i] = float(r)
    return out


def build_similarity(ratings: Mapping[Pair, float], g: SocialGraph, center: str = "user") -> dict[tuple[str, str], float]:
    """S_xz = max(0, pearson(x, z)) for every directed friend link x->z."""
    by_user = ratings_by_user(ratings)
    out = {}
    for x, z in sorted(g.edges):
        out[(x, z)] = max(0.0, pearson(by_user.get(x, {}), by_user.get(z, {}), center))
    return out
