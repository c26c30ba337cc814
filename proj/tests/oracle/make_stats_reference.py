#!/usr/bin/env python3
"""Freeze reference values for the C++ statistics tests.

Reference values come from scipy.stats and statsmodels, which share no code
with the C++ implementation. Re-run to regenerate tests/data/stats_reference.json:

    python3 tests/oracle/make_stats_reference.py > tests/data/stats_reference.json
"""
import json
import sys

import numpy as np
from scipy import stats
from statsmodels.stats.multitest import multipletests

SEED = 20240917
N_DATASETS = 100


def draw(rng, n):
    kind = rng.integers(0, 3)
    if kind == 0:
        return rng.normal(rng.uniform(-1, 1), rng.uniform(0.5, 2.0), n).tolist()
    if kind == 1:
        return rng.integers(1, 6, n).astype(float).tolist()
    return np.round(rng.exponential(2.0, n), 1).tolist()


def tie_sum(values):
    _, counts = np.unique(values, return_counts=True)
    return float(np.sum(counts ** 3 - counts))


def dunn_reference(groups):
    pooled = np.concatenate([np.asarray(g) for g in groups])
    ranks = stats.rankdata(pooled)
    n_total = len(pooled)
    mean_ranks, sizes, start = [], [], 0
    for g in groups:
        mean_ranks.append(ranks[start:start + len(g)].mean())
        sizes.append(len(g))
        start += len(g)
    base = n_total * (n_total + 1) / 12.0 - tie_sum(pooled) / (12.0 * (n_total - 1))
    pairs, z, raw = [], [], []
    for i in range(len(groups)):
        for j in range(i + 1, len(groups)):
            var = base * (1.0 / sizes[i] + 1.0 / sizes[j])
            zij = 0.0 if var <= 0 else (mean_ranks[i] - mean_ranks[j]) / np.sqrt(var)
            pairs.append([i, j])
            z.append(float(zij))
            raw.append(float(2.0 * stats.norm.sf(abs(zij))))
    holm = multipletests(raw, method="holm")[1].tolist()
    bonf = multipletests(raw, method="bonferroni")[1].tolist()
    return {"pairs": pairs, "z": z, "p_raw": raw, "p_holm": holm, "p_bonferroni": bonf}


def main():
    rng = np.random.default_rng(SEED)
    out = {"seed": SEED, "generator": "scipy " + __import__("scipy").__version__}

    kw = []
    for _ in range(N_DATASETS):
        k = int(rng.integers(2, 6))
        groups = [draw(rng, int(rng.integers(3, 21))) for _ in range(k)]
        h, p = stats.kruskal(*groups)
        kw.append({"groups": groups, "H": float(h), "p": float(p), "dunn": dunn_reference(groups)})
    out["kruskal"] = kw

    fr = []
    for _ in range(N_DATASETS):
        n = int(rng.integers(3, 26))
        k = int(rng.integers(3, 6))
        if rng.integers(0, 2) == 0:
            block = rng.integers(1, 6, (n, k)).astype(float)
        else:
            block = rng.normal(0, 1, (n, k)) + np.linspace(0, rng.uniform(0, 1), k)
        chi2, p = stats.friedmanchisquare(*[block[:, j] for j in range(k)])
        fr.append({"blocks": block.tolist(), "chi2": float(chi2), "p": float(p)})
    out["friedman"] = fr

    lv = []
    for _ in range(N_DATASETS):
        k = int(rng.integers(2, 5))
        groups = [draw(rng, int(rng.integers(2, 21))) for _ in range(k)]
        w, p = stats.levene(*groups, center="median")
        lv.append({"groups": groups, "W": float(w), "p": float(p)})
    out["levene"] = lv

    es = []
    for _ in range(N_DATASETS):
        a = draw(rng, int(rng.integers(2, 31)))
        b = draw(rng, int(rng.integers(2, 31)))
        na, nb = len(a), len(b)
        pooled = ((na - 1) * np.var(a, ddof=1) + (nb - 1) * np.var(b, ddof=1)) / (na + nb - 2)
        if pooled <= 0:
            continue
        d = (np.mean(a) - np.mean(b)) / np.sqrt(pooled)
        diff = np.sign(np.subtract.outer(np.asarray(a), np.asarray(b)))
        es.append({"a": a, "b": b, "d": float(d), "delta": float(diff.mean())})
    out["effect_sizes"] = es

    sw = []
    for i in range(N_DATASETS):
        n = 3 + i if i < 20 else int(rng.integers(3, 401))
        x = rng.normal(0, 1, n).tolist() if i % 3 else rng.exponential(1.0, n).tolist()
        w, p = stats.shapiro(x)
        sw.append({"values": x, "W": float(w), "p": float(p)})
    out["shapiro"] = sw

    normal50 = np.random.default_rng(7).normal(0, 1, 50).tolist()
    likert50 = np.random.default_rng(7).integers(1, 6, 50).astype(float).tolist()
    w, p = stats.shapiro(normal50)
    out["shapiro_normal50"] = {"values": normal50, "W": float(w), "p": float(p)}
    w, p = stats.shapiro(likert50)
    out["shapiro_likert50"] = {"values": likert50, "W": float(w), "p": float(p)}

    chi = []
    for df in [1, 2, 3, 4, 5, 7, 10, 15, 20, 30, 50]:
        for x in [0.0, 0.01, 0.1, 0.5, 1.0, 2.0, 2.4, 3.84, 5.0, 10.0, 20.0, 40.0, 80.0]:
            chi.append([df, x, float(stats.chi2.sf(x, df))])
    out["chi2_sf"] = chi

    fsf = []
    for d1 in [1, 2, 3, 5, 10]:
        for d2 in [1, 2, 5, 10, 30, 100]:
            for x in [0.0, 0.05, 0.5, 1.0, 2.0, 3.5, 7.0, 15.0, 50.0]:
                fsf.append([d1, d2, x, float(stats.f.sf(x, d1, d2))])
    out["f_sf"] = fsf

    json.dump(out, sys.stdout, separators=(",", ":"))
    sys.stdout.write("\n")


if __name__ == "__main__":
    main()
