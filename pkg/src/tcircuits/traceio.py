"""Signal files, CSV traces and gnuplot step data."""

from __future__ import annotations

import csv
import io
from pathlib import Path
from typing import Iterable

from .signals import Execution, Signal
from .timebase import Interval, Time, Unbounded, parse_bound, parse_time, to_decimal

DECIMALS = 12


class TraceFormatError(ValueError):
    """A signal file could not be parsed."""


def _bound_text(b) -> str:
    if isinstance(b, Unbounded):
        return "inf" if b.sign > 0 else "-inf"
    return str(b)


def format_signal(port: str, sig: Signal) -> str:
    lines = [f"port {port} domain {_bound_text(sig.domain.lo)} {_bound_text(sig.domain.hi)} init {sig.init}"]
    lines += [str(t) for t in sig.transitions]
    return "\n".join(lines) + "\n"


def write_signals(path, signals: dict) -> None:
    """Write one or more signals into a single (bundled) signal file."""
    Path(path).write_text("".join(format_signal(p, s) for p, s in signals.items()))


def parse_signals(text: str, source: str = "<string>") -> dict:
    out: dict = {}
    port = None
    for k, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("port "):
            f = line.split()
            if len(f) != 7 or f[2] != "domain" or f[5] != "init" or f[6] not in ("0", "1"):
                raise TraceFormatError(
                    f"{source}:{k}: header must be 'port <name> domain <lo> <hi> init <0|1>'")
            port = f[1]
            if port in out:
                raise TraceFormatError(f"{source}:{k}: port {port!r} appears twice")
            try:
                dom = Interval(parse_bound(f[3]), parse_bound(f[4]))
            except ValueError as exc:
                raise TraceFormatError(f"{source}:{k}: {exc}") from None
            out[port] = [dom, int(f[6]), []]
            continue
        if port is None:
            raise TraceFormatError(f"{source}:{k}: transition before any 'port' header")
        try:
            out[port][2].append(parse_time(line))
        except ValueError as exc:
            raise TraceFormatError(f"{source}:{k}: {exc}") from None
    sigs = {}
    for p, (dom, init, ts) in out.items():
        try:
            sigs[p] = Signal(dom, init, tuple(ts))
        except ValueError as exc:
            raise TraceFormatError(f"{source}: port {p}: {exc}") from None
    return sigs


def read_signals(path) -> dict:
    return parse_signals(Path(path).read_text(), str(path))


def read_input_dir(path) -> dict:
    """Signals from every regular file in a directory (or from a single file)."""
    p = Path(path)
    if p.is_file():
        return read_signals(p)
    if not p.is_dir():
        raise FileNotFoundError(f"input signal path {path} does not exist")
    out: dict = {}
    for f in sorted(x for x in p.iterdir() if x.is_file() and not x.name.startswith(".")):
        for port, s in read_signals(f).items():
            if port in out:
                raise TraceFormatError(f"{f}: port {port!r} already defined by another file")
            out[port] = s
    return out


def event_rows(E: Execution, ports: Iterable[str]) -> list:
    ports = list(ports)
    lo = E.interval.lo
    times = {t for p in ports for t in E[p].transitions}
    if isinstance(lo, Time):
        times.add(lo)
    times = sorted(times)
    return [(t, [E[p].value_at(t) for p in ports]) for t in times]


def csv_text(E: Execution, ports: Iterable[str] | None = None) -> str:
    """``time_exact,time_decimal,<ports>`` with one row per event time."""
    ports = list(ports if ports is not None else E.ports)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["time_exact", "time_decimal", *ports])
    for t, vals in event_rows(E, ports):
        w.writerow([str(t), to_decimal(t, DECIMALS), *vals])
    return buf.getvalue()


def write_csv(path, E: Execution, ports: Iterable[str] | None = None) -> None:
    Path(path).write_text(csv_text(E, ports))


def gnuplot_text(E: Execution, ports: Iterable[str] | None = None, spacing: float = 1.5) -> str:
    """Step-plot data: column 1 time, then one column per port offset by ``spacing``.

    Every event contributes two rows (value before and after), so ``with lines``
    draws vertical edges.
    """
    ports = list(ports if ports is not None else E.ports)
    lines = ["# " + " ".join(["time", *ports]), f"# port k is drawn at height k*{spacing}"]

    def row(t, vals):
        return " ".join([to_decimal(t, 9)] + [f"{v + k * spacing:g}" for k, v in enumerate(vals)])

    rows = event_rows(E, ports)
    prev = None
    for t, vals in rows:
        if prev is not None:
            lines.append(row(t, prev))
        lines.append(row(t, vals))
        prev = vals
    hi = E.interval.hi
    if isinstance(hi, Time) and prev is not None:
        lines.append(row(hi, prev))
    return "\n".join(lines) + "\n"


def write_gnuplot(path, E: Execution, ports: Iterable[str] | None = None) -> None:
    Path(path).write_text(gnuplot_text(E, ports))
