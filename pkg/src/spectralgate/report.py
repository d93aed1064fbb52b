"""Rendering of CriterionReport JSON to a text table, CSV ladders and SVG plots.

Everything here is a pure function of the report dictionary: re-rendering an
existing report.json reproduces the same files byte for byte.
"""

from __future__ import annotations

import csv
import io
import json
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

plt.rcParams["svg.hashsalt"] = "spectralgate"
plt.rcParams["svg.fonttype"] = "none"


def load_report(path) -> dict:
    d = json.loads(Path(path).read_text())
    if d.get("schema") != "cr/1":
        raise ValueError(f"{path}: unsupported report schema {d.get('schema')!r}")
    return d


def _fmt(x) -> str:
    if isinstance(x, float):
        return f"{x:.6g}"
    return str(x)


def table(d: dict) -> str:
    lines = [f"proposition : {d['proposition']}",
             f"consistent  : {d.get('consistent')}  ({d.get('rule', '')})"]
    name = d.get("inputs", {}).get("scenario")
    if name:
        lines.insert(0, f"scenario    : {name}")
    lines.append("hypotheses  :")
    for k, v in sorted(d.get("hypothesis_verdicts", {}).items()):
        lines.append(f"  {k:<22} {v['verdict']}")
    sv = d.get("spectral_verdict")
    if sv:
        lines.append("spectral    :")
        if "ladders" in sv and sv.get("kind") == "counting":
            lines.append(f"  {'E':>12}  {'verdict':<12} counts")
            for lad in sv["ladders"]:
                lines.append(f"  {lad['E']:>12.6g}  {lad['verdict']:<12} {lad['counts']}")
        for k, v in sorted(sv.items()):
            if isinstance(v, (str, bool)) and k != "kind":
                lines.append(f"  {k:<22} {v}")
    for e in d.get("errors", []):
        lines.append(f"error       : {e}")
    for n in d.get("notes", []):
        lines.append(f"note        : {n}")
    return "\n".join(lines) + "\n"


def _decay_rows(d):
    """(hypothesis, series, radius, value, stderr, verdict) for every decay ladder."""
    rows = []
    for name, hv in sorted(d.get("hypothesis_verdicts", {}).items()):
        lad = hv.get("evidence", {}).get("ladders")
        if lad is None:
            continue
        groups = lad.items() if isinstance(lad, dict) else [("", lad)]
        for lam, series in groups:
            for i, s in enumerate(series):
                tag = f"lambda={lam} " if lam else ""
                tag += "dir=" + ",".join(f"{x:.3g}" for x in s["direction"]) if "direction" in s else f"#{i}"
                errs = s.get("stderrs") or [0.0] * len(s["values"])
                for r, v, e in zip(s["radii"], s["values"], errs):
                    rows.append((name, tag, r, v, e, s["verdict"]))
    spec = d.get("spectral_verdict") or {}
    if spec.get("kind") == "condition_i":
        for lam, series in spec["evidence"]["ladders"].items():
            for s in series:
                tag = f"lambda={lam} dir=" + ",".join(f"{x:.3g}" for x in s["direction"])
                errs = s.get("stderrs") or [0.0] * len(s["values"])
                for r, v, e in zip(s["radii"], s["values"], errs):
                    rows.append(("spectral_condition_i", tag, r, v, e, s["verdict"]))
    return rows


def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([_fmt(x) for x in r])
    return buf.getvalue()


def _save(fig, path):
    fig.savefig(path, format="svg", metadata={"Date": None, "Creator": None})
    plt.close(fig)


def _plot_decay(rows, path):
    fig, axes = plt.subplots(figsize=(6, 4))
    series = {}
    for name, tag, r, v, _, _ in rows:
        series.setdefault((name, tag), []).append((r, v))
    for (name, tag), pts in sorted(series.items()):
        pts = [(r, v) for r, v in pts if v > 0]
        if pts:
            axes.loglog(*zip(*pts), marker="o", lw=1, label=f"{name} {tag}")
    axes.set_xlabel("a")
    axes.set_ylabel("ladder value")
    if len(series) <= 12:
        axes.legend(fontsize=6)
    _save(fig, path)


def _plot_counts(sv, path):
    fig, axes = plt.subplots(figsize=(6, 4))
    for lad in sv["ladders"]:
        axes.step(lad["Ls"], lad["counts"], where="post", marker="o", label=f"E={lad['E']:.3g}")
    axes.set_xlabel("L")
    axes.set_ylabel("N_L(E)")
    axes.legend(fontsize=7)
    _save(fig, path)


def _plot_lattice(probes, path):
    fig, axes = plt.subplots(figsize=(6, 4))
    Ns = [p["N"] for p in probes]
    for key, label in (("modulation", "modulation norm"), ("translation", "translation norm")):
        axes.loglog(Ns, [p[key] for p in probes], marker="o", label=label)
    axes.loglog(Ns, [max(p["weak"][-1], 1e-300) for p in probes], marker="s", label="weak terminal")
    axes.set_xlabel("N")
    axes.legend(fontsize=7)
    _save(fig, path)


def render(d: dict, out_dir) -> list[Path]:
    """Write report.txt, CSV ladders and SVG plots; returns the written paths."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []

    def put(name, text):
        p = out / name
        p.write_text(text)
        written.append(p)

    put("report.txt", table(d))
    rows = _decay_rows(d)
    if rows:
        put("decay_ladders.csv", _csv(["check", "series", "a", "value", "stderr", "verdict"], rows))
        _plot_decay(rows, out / "decay_ladders.svg")
        written.append(out / "decay_ladders.svg")
    sv = d.get("spectral_verdict") or {}
    if sv.get("kind") == "counting":
        crow = [(lad["E"], L, c, lad["verdict"]) for lad in sv["ladders"]
                for L, c in zip(lad["Ls"], lad["counts"])]
        put("counting.csv", _csv(["E", "L", "count", "verdict"], crow))
        _plot_counts(sv, out / "counting.svg")
        written.append(out / "counting.svg")
    if sv.get("kind") == "lattice" and sv.get("probes"):
        prow = [(p["N"], p["modulation"], p["translation"], p["weak"][-1]) for p in sv["probes"]]
        put("lattice_probes.csv", _csv(["N", "modulation", "translation", "weak_terminal"], prow))
        _plot_lattice(sv["probes"], out / "lattice_probes.svg")
        written.append(out / "lattice_probes.svg")
    return written
