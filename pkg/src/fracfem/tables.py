"""Plain tables for study reports, written as CSV or aligned markdown."""

from __future__ import annotations

import csv
import io
import math
import os
import sys
from dataclasses import dataclass, field

from .errors import InvalidArgumentError


def format_sci(value, digits=3):
    """Scientific notation with ``digits`` significant digits and a bare exponent.

    ``0.00262 -> '2.62e-3'``, ``1.17 -> '1.17e0'``.
    """
    if value is None:
        return "--"
    v = float(value)
    if math.isnan(v):
        return "nan"
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    mant, exp = f"{v:.{digits - 1}e}".split("e")
    return f"{mant}e{int(exp)}"


def format_rate(rate, theory=None):
    text = "nan" if rate is None or math.isnan(rate) else f"{rate:.2f}"
    if theory is not False:
        text += " (--)" if theory is None else f" ({theory:.2f})"
    return text


@dataclass
class Table:
    """Header plus rows of display strings; ``full`` keeps the unrounded values."""

    title: str
    header: list
    rows: list = field(default_factory=list)
    full: list = field(default_factory=list)

    def add(self, display, values=None):
        if len(display) != len(self.header):
            raise InvalidArgumentError("row length does not match the header")
        self.rows.append([str(c) for c in display])
        self.full.append(list(display if values is None else values))

    def to_csv(self, full=False):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\r\n")
        w.writerow(self.header)
        for row in self.full if full else self.rows:
            w.writerow([repr(c) if isinstance(c, float) else c for c in row])
        return buf.getvalue()

    def to_markdown(self):
        cells = [self.header] + self.rows
        width = [max(len(str(r[k])) for r in cells) for k in range(len(self.header))]

        def line(r):
            return "| " + " | ".join(str(c).ljust(n) for c, n in zip(r, width)) + " |"

        out = [f"**{self.title}**", "", line(self.header),
               "|" + "|".join("-" * (n + 2) for n in width) + "|"]
        out += [line(r) for r in self.rows]
        return "\n".join(out) + "\n"


def convergence_table(reports, title="L2 error"):
    """One row per report: parameters, errors per level, final rate (theory)."""
    levels = reports[0].levels
    if any(r.levels != levels for r in reports):
        raise InvalidArgumentError("reports cover different levels")
    t = Table(title, ["alpha", "mu", "P"] + [f"m={m}" for m in levels] + ["rate"])
    for r in reports:
        head = [f"{r.alpha:g}", f"{r.mu:g}", f"P{r.degree}"]
        t.add(head + [format_sci(e) for e in r.errors] + [format_rate(r.rate, r.theoretical)],
              head + [float(e) for e in r.errors] + [r.rate])
    return t


def eigen_table(report, kind="lambda"):
    """Eigenvalue (``kind='lambda'``) or eigenfunction (``'u'``) errors per level."""
    errs = report.lam_errors if kind == "lambda" else report.fun_errors
    rates = report.lam_rates() if kind == "lambda" else report.fun_rates()
    what = "eigenvalue absolute" if kind == "lambda" else "eigenfunction L2"
    t = Table(f"{what} errors, alpha={report.alpha:g}, q={report.q}, mu={report.mu:g}, "
              f"P{report.degree}, reference {report.reference}",
              ["P", "e"] + [f"m={m}" for m in report.levels] + ["rate"])
    for k, row in enumerate(errs):
        head = [f"P{report.degree}", f"{kind}{k + 1}"]
        t.add(head + [format_sci(e) for e in row] + [format_rate(rates[k][-1], False)],
              head + [float(e) for e in row] + [float(rates[k][-1])])
    return t


def condition_table(reports):
    """Preconditioned (P) and unpreconditioned (W) condition numbers."""
    levels = reports[0].levels
    t = Table("condition numbers, P1 (P preconditioned, W without)",
              ["alpha", "mu", "kind"] + [f"m={m}" for m in levels])
    for r in reports:
        for kind, vals in (("P", r.preconditioned), ("W", r.unpreconditioned)):
            head = [f"{r.alpha:g}", f"{r.mu:g}", kind]
            t.add(head + [format_sci(v) for v in vals], head + [float(v) for v in vals])
    return t


def render(tables, fmt):
    if fmt == "md":
        return "\n".join(t.to_markdown() for t in tables)
    if fmt == "csv":
        return "\r\n".join(t.to_csv() for t in tables)
    raise InvalidArgumentError(f"unknown format {fmt!r}")


def emit_tables(tables, fmt, path):
    """Write ``tables`` to ``path`` (``'-'`` for stdout).

    A file target also gets a sibling ``.full.csv`` holding unrounded values.
    """
    text = render(tables, fmt)
    if path in (None, "-"):
        sys.stdout.write(text)
        return None
    with open(path, "w", newline="") as fh:
        fh.write(text)
    root, _ = os.path.splitext(path)
    full = root + ".full.csv"
    with open(full, "w", newline="") as fh:
        fh.write("\r\n".join(t.to_csv(full=True) for t in tables))
    return full
