"""Waveform and sweep figures rendered to files (Agg backend, no display)."""

from __future__ import annotations

from pathlib import Path
from typing import Iterable

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .signals import Execution  # noqa: E402
from .timebase import Interval, as_time  # noqa: E402

_META = {"Software": None}


def _steps(sig, lo: float, hi: float):
    xs, ys = [lo], [sig.init]
    v = sig.init
    for t in sig.transitions:
        x = float(t)
        xs += [x, x]
        ys += [v, v ^ 1]
        v ^= 1
    xs.append(hi)
    ys.append(v)
    return xs, ys


def plot_execution(E: Execution, path, ports: Iterable[str] | None = None, title: str = "",
                   faults: Iterable | None = None, marks: Iterable | None = None) -> Path:
    """One step trace per port, stacked; ``faults`` are ``(port, lo, hi)`` windows drawn in red."""
    ports = list(ports if ports is not None else E.ports)
    lo, hi = float(E.interval.lo), float(E.interval.hi)
    fig, ax = plt.subplots(figsize=(8, 0.9 * len(ports) + 1.2))
    for k, p in enumerate(reversed(ports)):
        xs, ys = _steps(E[p], lo, hi)
        base = 1.6 * k
        ax.plot(xs, [base + y for y in ys], color="black", lw=1.2)
        for fp, a, b in faults or ():
            if fp == p:
                sub = E[p].restrict(Interval(as_time(a), as_time(b)))
                fx, fy = _steps(sub, float(a), float(b))
                ax.plot(fx, [base + y for y in fy], color="red", lw=1.8)
    for t in marks or ():
        ax.axvline(float(t), color="grey", ls=":", lw=0.8)
    ax.set_yticks([1.6 * k + 0.5 for k in range(len(ports))])
    ax.set_yticklabels(list(reversed(ports)))
    ax.set_xlim(lo, hi)
    ax.set_xlabel("time")
    if title:
        ax.set_title(title)
    fig.tight_layout()
    out = Path(path)
    fig.savefig(out, metadata=_META)
    plt.close(fig)
    return out


def plot_settling(results, path, title: str = "eSPF settling time") -> Path:
    """Settling time against 1/delta for a sweep of :class:`SettlingResult`."""
    pts = [(1 / float(r.delta), float(r.settle)) for r in results if r.settle is not None]
    fig, ax = plt.subplots(figsize=(5, 3.5))
    if pts:
        xs, ys = zip(*sorted(pts))
        ax.plot(xs, ys, marker="o", color="black")
    ax.set_xlabel("1 / pulse width")
    ax.set_ylabel("settling time")
    ax.set_title(title)
    fig.tight_layout()
    out = Path(path)
    fig.savefig(out, metadata=_META)
    plt.close(fig)
    return out
