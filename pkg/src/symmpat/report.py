"""Benchmark table: verification of each built-in against its known pattern,
optionally followed by synthesis runs.  Writes a TSV and a bar chart."""
from __future__ import annotations

import csv
import os
import time
from dataclasses import dataclass

from . import coffee, modelio, synth
from .patterns import parse_pattern_name
from .relations import Rel
from .verifier import ParamSystem, verify_symmetry_pattern

# model -> [(pattern label, mode)]
TARGETS = {
    "herman": [("rot@1", "complete")],
    "israeli-jalfon": [("rot@1", "complete")],
    "coffee-can": [("coffee-can", "function")],
    "resource-allocator": [("rot@2", "complete"), ("swap@2", "complete")],
    "dining-philosophers": [("rot@1", "complete")],
}

# model -> synthesis settings used by the bench and the acceptance suite
SYNTH_RUNS = {
    "herman": dict(mode="process", n_max=5),
    "israeli-jalfon": dict(mode="process", n_max=5),
    "coffee-can": dict(mode="homomorphism", n_max=8, image_finite=True),
    "resource-allocator": dict(mode="process", n_max=11),
    "dining-philosophers": dict(mode="process", n_max=17),
}

COLUMNS = ("model", "task", "pattern", "mode", "verdict", "states", "seconds")


@dataclass
class Row:
    model: str
    task: str
    pattern: str
    mode: str
    verdict: str
    states: int | None
    seconds: float

    def cells(self):
        return [self.model, self.task, self.pattern, self.mode, self.verdict,
                "" if self.states is None else str(self.states), f"{self.seconds:.3f}"]


def target_pattern(sys: ParamSystem, label: str) -> Rel:
    if label == "coffee-can":
        return coffee.coffee_can_pattern()
    return parse_pattern_name(label).build(sys.alphabet)


def synth_config(name: str, **over) -> synth.SynthConfig:
    kw = dict(SYNTH_RUNS[name])
    hints = modelio.builtin_hints(name)
    if hints:
        kw["hints"] = hints
    if name == "coffee-can":
        kw["safety"] = coffee.safety_sets()
    kw.update(over)
    return synth.SynthConfig(**kw)


def verify_rows(models) -> list[Row]:
    rows = []
    for name in models:
        sys = modelio.builtin_model(name)
        for label, mode in TARGETS[name]:
            r = target_pattern(sys, label)
            t0 = time.perf_counter()
            rep = verify_symmetry_pattern(sys, r, mode)
            rows.append(Row(name, "verify", label, mode, rep.verdict, r.base.num_states,
                            time.perf_counter() - t0))
    return rows


def synth_rows(models, time_budget: float | None = None) -> list[Row]:
    rows = []
    for name in models:
        sys = modelio.builtin_model(name)
        cfg = synth_config(name, time_budget=time_budget)
        t0 = time.perf_counter()
        res = synth.cegar_loop(sys, cfg)
        rows.append(Row(name, "synth", "-", cfg.mode, res.status, res.n, time.perf_counter() - t0))
    return rows


def write_tsv(rows: list[Row], path: str):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, delimiter="\t", lineterminator="\n")
        w.writerow(COLUMNS)
        for r in rows:
            w.writerow(r.cells())


def plot(rows: list[Row], path: str):
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    tasks = sorted({r.task for r in rows}, key=["verify", "synth"].index)
    fig, axes = plt.subplots(1, len(tasks), figsize=(5.5 * len(tasks), 3.6), squeeze=False)
    for ax, task in zip(axes[0], tasks):
        sel = [r for r in rows if r.task == task]
        labels = [r.model if task == "synth" else f"{r.model}\n{r.pattern}" for r in sel]
        colors = ["tab:green" if r.verdict in ("yes", "found") else "tab:red" for r in sel]
        ax.bar(range(len(sel)), [r.seconds for r in sel], color=colors)
        ax.set_xticks(range(len(sel)))
        ax.set_xticklabels(labels, rotation=35, ha="right", fontsize=7)
        ax.set_ylabel("seconds")
        ax.set_title(task)
        for i, r in enumerate(sel):
            if r.states is not None:
                ax.annotate(str(r.states), (i, r.seconds), ha="center", va="bottom", fontsize=7)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def run_bench(out_dir: str, models=None, with_synth: bool = False,
              time_budget: float | None = None) -> tuple[list[Row], str, str]:
    models = list(models or TARGETS)
    os.makedirs(out_dir, exist_ok=True)
    rows = verify_rows(models)
    if with_synth:
        rows += synth_rows(models, time_budget)
    tsv = os.path.join(out_dir, "bench.tsv")
    png = os.path.join(out_dir, "bench.png")
    write_tsv(rows, tsv)
    plot(rows, png)
    return rows, tsv, png
