#!/usr/bin/env python3
"""Regenerates the JSON and CSV fixtures under data/."""
import json
import pathlib

DATA = pathlib.Path(__file__).resolve().parent.parent / "data"
BALLS = 25


def dump(name, states):
    (DATA / name).write_text(json.dumps({"states": states}, indent=1) + "\n")


def ellsberg():
    bets = {"v": lambda a, c, d: d <= c, "u": lambda a, c, d: d <= a, "r": lambda a, c, d: d <= BALLS - a}
    for name, wins in bets.items():
        states = {}
        for c in range(5, BALLS + 1):
            for a in range(BALLS + 1):
                states[f"A{a}-C{c}"] = {
                    "probs": [1 / BALLS] * BALLS,
                    "payoffs": [100.0 if wins(a, c, d) else 0.0 for d in range(1, BALLS + 1)],
                }
        dump(f"ellsberg_{name}.json", states)


def small():
    dump("single_state.json", {"w": {"probs": [0.7, 0.3], "payoffs": [0, 100]}})
    dump("two_state.json", {
        "w1": {"probs": [0.5, 0.5], "payoffs": [1, 3]},
        "w2": {"probs": [0.25, 0.75], "payoffs": [0, 2]},
    })
    dump("two_state_shifted.json", {
        "w1": {"probs": [0.5, 0.5], "payoffs": [2, 4]},
        "w2": {"probs": [0.25, 0.75], "payoffs": [1, 3]},
    })
    dump("bad_probs.json", {
        "w1": {"probs": [0.5, 0.5], "payoffs": [1, 3]},
        "w2": {"probs": [0.5, 0.49], "payoffs": [0, 2]},
    })
    (DATA / "hedge.csv").write_text(
        "state,prob,outcome,asset_1,asset_2\n"
        "w,0.5,0,0.1,-0.1\n"
        "w,0.5,1,-0.1,0.1\n")
    (DATA / "riskfree.csv").write_text(
        "state,prob,outcome,risky,riskfree\n"
        "w,0.5,0,1,0\n"
        "w,0.5,1,-1,0\n")
    (DATA / "two_state_panel.csv").write_text(
        "state,prob,outcome,asset_1,asset_2,asset_3\n"
        "w1,0.5,0,0.08,0.02,0.01\n"
        "w1,0.5,1,-0.04,0.03,0.01\n"
        "w2,0.3,0,0.12,-0.02,0.01\n"
        "w2,0.7,1,-0.06,0.04,0.01\n")
    (DATA / "table.csv").write_text(
        "w1,w2,penalty\n"
        "1,0,0.5\n"
        "0.5,0.5,0\n"
        "0,1,0.5\n")


if __name__ == "__main__":
    ellsberg()
    small()
