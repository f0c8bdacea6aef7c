#!/usr/bin/env python3
"""Regenerate the synthetic demo dataset under demo/.

Fully deterministic (fixed seed). Simulates a GARCH-driven price path on
weekday dates, four exogenous indicator series with a few interior gaps,
and keyword-bearing headlines with classifier logits for most records.
"""

from __future__ import annotations

import csv
import datetime as dt
import math
import os

import numpy as np

START = dt.date(2022, 1, 3)
END = dt.date(2024, 7, 17)
SEED = 20220103

POS_TEMPLATES = [
    "Markets rally as {} talks progress",
    "Relief boosts equities despite {} tensions",
    "Stocks gain on hopes of {} ceasefire",
    "Investors upbeat as {} risk eases",
]
NEG_TEMPLATES = [
    "War escalates: {} offensive widens",
    "Markets slump as {} conflict deepens",
    "{} crisis rattles investors",
    "Sanctions loom as {} fighting intensifies",
    "Losses mount after {} strikes",
]
NEUTRAL_TEMPLATES = [
    "Analysts weigh {} scenarios for energy markets",
    "What the {} standoff means for commodities",
    "Explainer: the {} situation so far",
]
SUBJECTS = ["Russia", "Ukraine", "Russia-Ukraine"]
OFFTOPIC_TITLES = [
    "Tech earnings beat expectations",
    "Fed minutes hint at steady rates",
    "Oil inventories rise for third week",
    "Retail sales data comes in mixed",
]
SOURCES = ["Daily Ledger", "Market Wire", "Global Dispatch", "Capital Times"]


def weekdays(start: dt.date, end: dt.date) -> list[dt.date]:
    days = []
    d = start
    while d <= end:
        if d.weekday() < 5:
            days.append(d)
        d += dt.timedelta(days=1)
    return days


def all_days(start: dt.date, end: dt.date) -> list[dt.date]:
    return [start + dt.timedelta(days=i) for i in range((end - start).days + 1)]


def write_csv(path: str, header: list[str], rows) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def main() -> None:
    rng = np.random.default_rng(SEED)
    out_dir = os.path.join(os.path.dirname(__file__), "..", "demo")
    os.makedirs(out_dir, exist_ok=True)

    calendar = all_days(START, END)
    trading = weekdays(START, END)

    # Daily sentiment level: slow AR(1) around a mildly negative mean.
    sent = {}
    level = -0.2
    for d in calendar:
        level = -0.06 + 0.8 * level + 0.12 * rng.standard_normal()
        sent[d] = level

    # Returns: GARCH(1,1)-t noise plus a sentiment term on trading days.
    t_count = len(trading) - 1
    a0, a1, b1, nu = 4.0e-6, 0.08, 0.87, 7.0
    z = rng.standard_t(nu, size=t_count) * math.sqrt((nu - 2.0) / nu)
    s2 = a0 / (1.0 - a1 - b1)
    rets = np.empty(t_count)
    for t in range(t_count):
        eps = math.sqrt(s2) * z[t]
        rets[t] = 0.0003 + 0.012 * sent[trading[t + 1]] + eps
        s2 = a0 + a1 * eps * eps + b1 * s2

    prices = [4700.0]
    for r in rets:
        prices.append(prices[-1] * math.exp(r))
    write_csv(
        os.path.join(out_dir, "sp500.csv"),
        ["date", "value"],
        [(d.isoformat(), f"{p:.4f}") for d, p in zip(trading, prices)],
    )

    # Exogenous indicators on trading days, with interior gaps to exercise
    # the spline fill. Gap indices avoid the first/last rows.
    abs_ret = np.concatenate([[0.01], np.abs(rets)])
    vix = 13.0 + 600.0 * abs_ret + rng.normal(0.0, 1.0, len(trading))
    ofr = np.cumsum(rng.normal(0.0, 0.08, len(trading))) - 0.5
    epu = 110.0 + np.cumsum(rng.normal(0.0, 2.5, len(trading)))
    bond = 4.2 + np.cumsum(rng.normal(0.0, 0.02, len(trading)))

    def with_gaps(values, gaps):
        return [
            (d.isoformat(), f"{v:.4f}")
            for i, (d, v) in enumerate(zip(trading, values))
            if i not in gaps
        ]

    write_csv(os.path.join(out_dir, "vix.csv"), ["date", "value"], with_gaps(vix, {17, 58}))
    write_csv(os.path.join(out_dir, "ofr.csv"), ["date", "value"], with_gaps(ofr, {25, 26, 90}))
    write_csv(os.path.join(out_dir, "epu.csv"), ["date", "value"], with_gaps(epu, {40, 77}))
    write_csv(os.path.join(out_dir, "bond.csv"), ["date", "value"], with_gaps(bond, set()))

    # Headlines: every calendar day gets at least one on-topic record.
    rows = []
    for d in calendar:
        n = 1 + rng.poisson(6)
        for _ in range(n):
            s = sent[d] + 0.35 * rng.standard_normal()
            subject = SUBJECTS[rng.integers(len(SUBJECTS))]
            if rng.random() < 0.18:
                title = OFFTOPIC_TITLES[rng.integers(len(OFFTOPIC_TITLES))]
            elif s > 0.1:
                title = POS_TEMPLATES[rng.integers(len(POS_TEMPLATES))].format(subject)
            elif s < -0.15:
                title = NEG_TEMPLATES[rng.integers(len(NEG_TEMPLATES))].format(subject)
            else:
                title = NEUTRAL_TEMPLATES[rng.integers(len(NEUTRAL_TEMPLATES))].format(subject)
            source = SOURCES[rng.integers(len(SOURCES))]
            if rng.random() < 0.9:
                pos = s + 0.2 * rng.standard_normal()
                neg = -s + 0.2 * rng.standard_normal()
                neu = 0.4 + 0.2 * rng.standard_normal()
                rows.append((d.isoformat(), source, title, "", f"{pos:.4f}", f"{neg:.4f}", f"{neu:.4f}"))
            else:
                rows.append((d.isoformat(), source, title, "", "", "", ""))
    write_csv(
        os.path.join(out_dir, "headlines.csv"),
        ["date", "source", "title", "body", "pos", "neg", "neu"],
        rows,
    )

    with open(os.path.join(out_dir, "demo.cfg"), "w", encoding="utf-8", newline="\n") as fh:
        fh.write(
            "# Demo pipeline configuration\n"
            "headlines = demo/headlines.csv\n"
            "headlines_format = csv\n"
            "market.SP500 = demo/sp500.csv\n"
            "market.VIX = demo/vix.csv\n"
            "market.OFR = demo/ofr.csv\n"
            "market.EPU = demo/epu.csv\n"
            "market.Bond = demo/bond.csv\n"
            "return_series = SP500\n"
            "keywords = war,russia,ukraine\n"
            "score_mode = prob_diff\n"
            "fill = spline\n"
            "dist = t\n"
            "mode = joint\n"
            "out = out\n"
            "seed = 0\n"
        )
    print(f"wrote demo dataset to {os.path.abspath(out_dir)}")


if __name__ == "__main__":
    main()
