"""Experiment harness: convergence of the N-fold approximation and method comparison."""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .clustering import classical_hc, exact_opt, hc_plus, nfold_approximation
from .datagen import copies_for, planted_copies, random_base_component, random_space
from .dendrogram import DEFAULT_EPSILON, complete_ultrametric, psi
from .dissimilarity import OrderedSpace, pnorm_distance
from .errors import SearchBudgetExceeded
from .metrics import ari, best_cut_by_ari, diff_variance, loops, oari
from .poset import base_space_projection
from .rng import make_rng


def derive_seed(seed: int, *stream: int) -> int:
    """A fresh integer seed determined by ``seed`` and a stream path."""
    return int(np.random.SeedSequence([int(seed), *stream]).generate_state(1)[0])


# -- convergence ----------------------------------------------------------------

@dataclass
class SpaceCurves:
    """Bootstrap curves for one space; arrays are ``len(Ns) x boots``."""

    instance: int
    reference: str
    ari: np.ndarray
    oari: np.ndarray
    norm_fit: np.ndarray
    opt_fit: np.ndarray


def convergence_space(space: OrderedSpace, kind: str, Ns, pool: int = 100, boots: int = 200,
                      eps: float = DEFAULT_EPSILON, p: float = 1, seed: int = 0, instance: int = 0,
                      exact_max_n: int = 10, exact_limit: int = 50_000) -> SpaceCurves:
    """Bootstrap N-fold bests out of one pool of ordered draws.

    The reference is the exhaustive optimum when the space is small enough
    and the search fits the budget, else the best draw of the pool.  Draws
    are resampled with replacement; a bootstrap best is the first minimum
    in draw order.
    """
    nf = nfold_approximation(space, kind, pool, eps, p, seed=derive_seed(seed, 1, instance))
    ref, ref_name = None, "pool"
    if space.n <= exact_max_n:
        try:
            ref, ref_name = exact_opt(space, kind, eps, p, limit=exact_limit)[0], "exact"
        except SearchBudgetExceeded:
            pass
    if ref is None:
        ref = nf.best
    ref_final = ref.dendrogram.final_partition
    ref_proj = base_space_projection(space.poset, ref_final)
    ref_u = complete_ultrametric(ref.dendrogram, eps)

    fits = np.array(nf.fits)
    s_ari = np.empty(pool)
    s_oari = np.empty(pool)
    s_opt = np.empty(pool)
    for k, res in enumerate(nf.samples):
        final = res.dendrogram.final_partition
        s_ari[k] = ari(final, ref_final)
        s_oari[k] = oari(base_space_projection(space.poset, final), ref_proj)[1]
        s_opt[k] = pnorm_distance(complete_ultrametric(res.dendrogram, eps), ref_u, p)

    worst = fits.max()
    fit_span = worst - ref.fit
    opt_span = s_opt.max()
    rng = make_rng(seed, 2, instance)
    shape = (len(Ns), boots)
    out = {key: np.empty(shape) for key in ("ari", "oari", "norm_fit", "opt_fit")}
    for row, N in enumerate(Ns):
        draws = rng.integers(pool, size=(boots, N))
        best = draws[np.arange(boots), np.argmin(fits[draws], axis=1)]
        out["ari"][row] = s_ari[best]
        out["oari"][row] = s_oari[best]
        out["norm_fit"][row] = 1 - (fits[best] - ref.fit) / fit_span if fit_span > 0 else 1.0
        out["opt_fit"][row] = 1 - s_opt[best] / opt_span if opt_span > 0 else 1.0
    return SpaceCurves(instance, ref_name, **out)


CONVERGENCE_COLUMNS = ["instance", "linkage", "N", "E_ARI", "E_oARI", "norm_fit", "opt_fit",
                       "std_ARI", "std_oARI", "reference", "n", "p_link", "t", "pool", "boots",
                       "bootstrap", "seed"]


def convergence(n: int, p_link: float, t: int, kind: str, Ns, spaces: int = 10, pool: int = 100,
                boots: int = 200, eps: float = DEFAULT_EPSILON, p: float = 1, seed: int = 0,
                exact_max_n: int = 10, per_space: bool = False) -> list[dict]:
    """Curves of E(ARI), E(oARI), normalised fit and normalised opt-fit against N.

    Aggregate rows have ``instance == "all"``; their std columns are the
    spread of the per-space means.  Normalisation is per space.
    """
    Ns = list(Ns)
    curves = []
    for s in range(spaces):
        space = random_space(n, p_link, t, make_rng(seed, 0, s))
        curves.append(convergence_space(space, kind, Ns, pool, boots, eps, p, seed, s, exact_max_n))
    common = {"linkage": kind, "n": n, "p_link": p_link, "t": t, "pool": pool, "boots": boots,
              "bootstrap": "with-replacement", "seed": seed}
    rows = []
    for row, N in enumerate(Ns):
        per = {key: np.array([getattr(c, key)[row].mean() for c in curves])
               for key in ("ari", "oari", "norm_fit", "opt_fit")}
        refs = sorted({c.reference for c in curves})
        rows.append({"instance": "all", "N": N, "E_ARI": per["ari"].mean(), "E_oARI": per["oari"].mean(),
                     "norm_fit": per["norm_fit"].mean(), "opt_fit": per["opt_fit"].mean(),
                     "std_ARI": per["ari"].std(), "std_oARI": per["oari"].std(),
                     "reference": "+".join(refs), **common})
        if per_space:
            for c in curves:
                rows.append({"instance": c.instance, "N": N, "E_ARI": c.ari[row].mean(),
                             "E_oARI": c.oari[row].mean(), "norm_fit": c.norm_fit[row].mean(),
                             "opt_fit": c.opt_fit[row].mean(), "std_ARI": c.ari[row].std(),
                             "std_oARI": c.oari[row].std(), "reference": c.reference, **common})
    return [{k: (float(v) if isinstance(v, np.floating) else v) for k, v in r.items()} for r in rows]


# -- method comparison ------------------------------------------------------------

METHODS = ("ordered", "classical", "plus")


@dataclass
class CompareConfig:
    kind: str = "average"
    alphas: tuple = (0.10, 0.15, 0.20, 0.25, 0.30, 0.35, 0.40, 0.45, 0.50)
    reps: int = 5
    base_n: int = 15
    base_p: float = 0.15
    base_t: int = 1
    target: int = 200
    sigma: float = 0.10
    N: int = 10
    max_value: float = 1.0
    eps: float = DEFAULT_EPSILON
    p: float = 1
    seed: int = 0
    extra: dict = field(default_factory=dict)


def evaluate(space: OrderedSpace, planted, theta, fit: float) -> dict:
    cut, score = best_cut_by_ari(theta, planted)
    truth = base_space_projection(space.poset, planted)
    return {"ari": score, "oari": oari(base_space_projection(space.poset, cut), truth)[1],
            "loops": loops(space.poset, cut), "fit": fit, "blocks": cut.m}


def compare_records(cfg: CompareConfig) -> list[dict]:
    """One record per (repetition, alpha, method), all methods on the same instance."""
    m = copies_for(cfg.base_n, cfg.target)
    records = []
    for r in range(cfg.reps):
        base = random_base_component(cfg.base_n, cfg.base_p, cfg.base_t, make_rng(cfg.seed, 0, r))
        for i, alpha in enumerate(cfg.alphas):
            inst = planted_copies(base, m, alpha, cfg.sigma, make_rng(cfg.seed, 1, r, i))
            space, planted = inst.space, inst.planted
            nf = nfold_approximation(space, cfg.kind, cfg.N, cfg.eps, cfg.p,
                                     seed=derive_seed(cfg.seed, 2, r, i))
            classical = classical_hc(space.dist, cfg.kind, make_rng(cfg.seed, 3, r, i))
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                plus = hc_plus(space, cfg.kind, cfg.max_value, make_rng(cfg.seed, 4, r, i))
            runs = {"ordered": (nf.best.dendrogram, nf.best.fit),
                    "classical": (classical, pnorm_distance(psi(classical), space.dist, cfg.p)),
                    "plus": (plus, pnorm_distance(psi(plus), space.dist, cfg.p))}
            for method, (theta, fit) in runs.items():
                rec = {"instance_id": r, "method": method, "linkage": cfg.kind, "alpha": alpha,
                       "copies": m, "n": space.n, "seed": cfg.seed}
                rec.update(evaluate(space, planted, theta, fit))
                records.append(rec)
    return records


COMPARE_COLUMNS = ["instance", "alpha", "linkage", "method", "metric", "mean", "paired_std", "paired_with",
                   "reps", "seed"]


def compare_summary(records: list[dict], metrics=("ari", "oari", "loops")) -> list[dict]:
    """Means per (alpha, method) with the paired-difference std band.

    Ordered and plus carry the std of ``ordered - plus``; classical carries
    the std of ``classical - ordered``.
    """
    rows = []
    alphas = sorted({r["alpha"] for r in records})
    for alpha in alphas:
        sel = [r for r in records if r["alpha"] == alpha]
        by = {m: sorted((r for r in sel if r["method"] == m), key=lambda r: r["instance_id"])
              for m in METHODS}
        for metric in metrics:
            vals = {m: [r[metric] for r in by[m]] for m in METHODS}
            _, std_op = diff_variance(vals["ordered"], vals["plus"])
            _, std_co = diff_variance(vals["classical"], vals["ordered"])
            pairs = {"ordered": (std_op, "plus"), "plus": (std_op, "ordered"),
                     "classical": (std_co, "ordered")}
            for m in METHODS:
                std, other = pairs[m]
                rows.append({"instance": "all", "alpha": alpha, "linkage": sel[0]["linkage"], "method": m,
                             "metric": metric, "mean": float(np.mean(vals[m])), "paired_std": std,
                             "paired_with": other, "reps": len(vals[m]), "seed": sel[0]["seed"]})
    return rows

