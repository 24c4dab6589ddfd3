"""Writes the sample systems in data/."""
import itertools
import json
import random
from fractions import Fraction as F
from pathlib import Path

OUT = Path(__file__).resolve().parent.parent / "data"


def frac(p):
    return str(p.numerator) if p.denominator == 1 else f"{p.numerator}/{p.denominator}"


def system(inputs, treatments, table_of, outputs=None):
    doc = {"inputs": [{"name": n, "values": v} for n, v in inputs], "treatments": treatments, "tables": []}
    if outputs:
        doc["outputs"] = outputs
    full = treatments == "full"
    ts = list(itertools.product(*[v for _, v in inputs])) if full else [tuple(t) for t in treatments]
    for t in ts:
        probs = [{"outcome": list(o), "p": frac(p)} for o, p in table_of(t) if p != 0]
        doc["tables"].append({"treatment": list(t), "probs": probs})
    return doc


def from_hidden(inputs, treatments, out_values, weights):
    """Marginalizes a joint over all input points (point order: inputs, then values)."""
    points = [(i, v) for i, (_, vals) in enumerate(inputs) for v in vals]
    def table_of(t):
        acc = {}
        for h, w in weights.items():
            o = tuple(h[points.index((i, t[i]))] for i in range(len(inputs)))
            acc[o] = acc.get(o, 0) + w
        return sorted(acc.items())
    return system(inputs, treatments, table_of, {n: out_values for n, _ in inputs})


def random_hidden(rng, n_points, values, support, den):
    cells = [tuple(rng.choice(values) for _ in range(n_points)) for _ in range(support)]
    raw = [rng.randint(1, den) for _ in cells]
    total = sum(raw)
    weights = {}
    for c, r in zip(cells, raw):
        weights[c] = weights.get(c, 0) + F(r, total)
    return weights


def write(name, doc):
    (OUT / name).write_text(json.dumps(doc, indent=2) + "\n")


def main():
    rng = random.Random(20261018)
    ab = [("A", ["x", "x'"]), ("B", ["y", "y'"])]

    def pr(t):
        differ = t == ("x'", "y'")
        return [((a, b), F(1, 2) if (a != b) == differ else F(0)) for a in "01" for b in "01"]
    write("pr_box.json", system(ab, "full", pr, {"A": ["0", "1"], "B": ["0", "1"]}))

    pa = {"x": F(1, 3), "x'": F(1, 2)}
    pb = {"y": F(1, 4), "y'": F(2, 3)}
    def product(t):
        out = []
        for a in "01":
            for b in "01":
                qa = pa[t[0]] if a == "0" else 1 - pa[t[0]]
                qb = pb[t[1]] if b == "0" else 1 - pb[t[1]]
                out.append(((a, b), qa * qb))
        return out
    write("product.json", system(ab, "full", product, {"A": ["0", "1"], "B": ["0", "1"]}))

    write("fine_feasible.json", from_hidden(ab, "full", ["0", "1"], random_hidden(rng, 4, "01", 6, 9)))

    abc = [("A", ["a1", "a2", "a3"]), ("B", ["b1", "b2", "b3"]), ("C", ["c1", "c2", "c3"])]
    write("full3x3.json", from_hidden(abc, "full", ["0", "1"], random_hidden(rng, 9, "01", 12, 20)))

    restricted = [["a1", "b1", "c1"], ["a1", "b2", "c2"], ["a2", "b1", "c2"], ["a2", "b2", "c1"], ["a3", "b3", "c3"]]
    abc2 = [("A", ["a1", "a2", "a3"]), ("B", ["b1", "b2", "b3"]), ("C", ["c1", "c2", "c3"])]
    write("restricted.json", from_hidden(abc2, restricted, ["0", "1"], random_hidden(rng, 9, "01", 8, 10)))

    def leaky(t):
        # the output of A depends on the value of B
        p0 = F(1, 2) if t[1] == "y" else F(1, 4)
        return [(("0", "0"), p0), (("1", "1"), 1 - p0)]
    write("not_selective.json", system(ab, "full", leaky, {"A": ["0", "1"], "B": ["0", "1"]}))

    # signs of a standard bivariate normal pair with rho(v, w) = min(1, v + w)
    def signs(t):
        if t == ("0", "0"):
            return [((a, b), F(1, 4)) for a in ("neg", "pos") for b in ("neg", "pos")]
        return [(("neg", "neg"), F(1, 2)), (("neg", "pos"), F(0)), (("pos", "neg"), F(0)), (("pos", "pos"), F(1, 2))]
    write("normal_sign.json", system([("1", ["0", "1"]), ("2", ["0", "1"])], "full", signs,
                                     {"1": ["neg", "pos"], "2": ["neg", "pos"]}))

    (OUT / "malformed.json").write_text('{"inputs": [{"name": "A", "values": ["x"]}],\n "treatments": "full",\n "tables": [\n')

    metrics = [
        {"kind": "order"},
        {"kind": "order", "name": "order(B at y' reversed)", "point_ranks": {"B": {"y'": {"0": 2, "1": 1}}}},
        {"kind": "classification", "cells": [["0"], ["1"]]},
        {"kind": "p", "p": 1, "embed": {"*": {"0": 0, "1": 1}}},
        {"kind": "p", "p": "inf", "embed": {"*": {"0": 0, "1": 1}}},
        {"kind": "entropy"},
        {"kind": "frechet", "embed": {"*": {"0": 0, "1": 1}}},
        {"kind": "expected_ground", "ground": "discrete", "labels": ["0", "1"]},
        {"kind": "order", "transform": [{"power": "1/2"}, {"bounded": True}]},
    ]
    (OUT / "metrics.json").write_text(json.dumps(metrics, indent=2) + "\n")


if __name__ == "__main__":
    main()
