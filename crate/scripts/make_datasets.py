"""Regenerate the bundled desk-scale benchmark datasets under data/.

Every file is tab-separated with a header row and a final `target` column,
matching the layout of the PMLB collection. Outputs are deterministic.
"""
import pathlib

import numpy as np
from sklearn import datasets

OUT = pathlib.Path(__file__).resolve().parent.parent / "data"


def write(name, names, X, y):
    OUT.mkdir(exist_ok=True)
    with open(OUT / f"{name}.tsv", "w") as fh:
        fh.write("\t".join(list(names) + ["target"]) + "\n")
        for row, t in zip(X, y):
            fh.write("\t".join(repr(float(v)) for v in row) + f"\t{int(t)}\n")


def clean(names):
    return [n.replace(" ", "_").replace("(", "").replace(")", "").replace("/", "_") for n in names]


def main():
    b = datasets.load_breast_cancer()
    write("breast_cancer", clean(b.feature_names), b.data, b.target)

    i = datasets.load_iris()
    write("iris_virginica", clean(i.feature_names), i.data, (i.target == 2).astype(int))

    w = datasets.load_wine()
    write("wine_class0", clean(w.feature_names), w.data, (w.target == 0).astype(int))

    d = datasets.load_diabetes()
    write("diabetes_binary", clean(d.feature_names), d.data, (d.target > np.median(d.target)).astype(int))

    # 52 firms, 9 financial ratios; solvency driven mostly by profitability
    # and working capital, mirroring the shape of the japansolvent table.
    rng = np.random.default_rng(20210501)
    n = 52
    names = ["EBIT_TA", "WC_TA", "NI_TA", "CA_CL", "SALES_TA", "TL_TA", "RE_TA", "CF_TL", "LOG_TA"]
    ebit = rng.normal(0.05, 0.06, n)
    wc = rng.normal(0.10, 0.15, n)
    ni = 0.6 * ebit + rng.normal(0.0, 0.02, n)
    cacl = 1.2 + 2.0 * wc + rng.normal(0.0, 0.3, n)
    sales = rng.lognormal(0.0, 0.4, n)
    tl = np.clip(0.6 - 0.8 * wc + rng.normal(0.0, 0.1, n), 0.05, 1.5)
    re = 0.5 * ebit + rng.normal(0.0, 0.05, n)
    cf = ebit / np.maximum(tl, 0.05) + rng.normal(0.0, 0.05, n)
    lta = rng.normal(10.0, 1.5, n)
    X = np.column_stack([ebit, wc, ni, cacl, sales, tl, re, cf, lta]).round(4)
    score = 25.0 * ebit + 6.0 * wc + rng.normal(0.0, 0.8, n)
    y = (score > np.median(score)).astype(int)
    write("japansolvent_like", names, X, y)

    # One informative feature plus pure noise.
    rng = np.random.default_rng(7)
    n = 200
    y = np.arange(n) % 2
    signal = y + rng.normal(0.0, 0.5, n)
    noise = rng.normal(0.0, 1.0, (n, 4))
    X = np.column_stack([signal, noise]).round(5)
    write("one_informative", ["signal", "noise1", "noise2", "noise3", "noise4"], X, y)


if __name__ == "__main__":
    main()
