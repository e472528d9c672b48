"""Experiment records and their CSV form."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from typing import Iterable, List, Sequence, TextIO

import mpmath
from mpmath import mpf

CSV_HEADER = (
    "experiment",
    "sigma",
    "t",
    "delta1",
    "delta2",
    "delta3",
    "delta4",
    "quantity",
    "value_re",
    "value_im",
    "reference",
    "residual",
    "scale",
    "wall_ms",
)

DIGITS = 30
_PARSE_BITS = 128


def fmt(x) -> str:
    """A real number at 30 significant digits (nan and inf pass through)."""
    with mpmath.workprec(_PARSE_BITS):
        # floats are written by their shortest decimal form, not their binary expansion
        x = mpf(repr(x)) if isinstance(x, float) else mpf(x)
        if mpmath.isnan(x):
            return "nan"
        if mpmath.isinf(x):
            return "inf" if x > 0 else "-inf"
        return mpmath.nstr(x, DIGITS, strip_zeros=False, min_fixed=-4, max_fixed=DIGITS)


@dataclass(frozen=True)
class ExperimentRecord:
    experiment: str
    sigma: mpf
    t: mpf
    deltas: Sequence
    quantity: str
    value_re: mpf
    value_im: mpf
    reference: mpf
    residual: mpf
    scale: mpf
    wall_ms: int = 0

    def __post_init__(self) -> None:
        if len(self.deltas) != 4:
            raise ValueError("deltas must hold four exponents")
        for name in ("residual", "scale"):
            v = mpf(getattr(self, name))
            if not mpmath.isnan(v) and v < 0:
                raise ValueError(f"{name} must be nonnegative")
        if int(self.wall_ms) != self.wall_ms or self.wall_ms < 0:
            raise ValueError("wall_ms must be a nonnegative integer")

    def row(self) -> List[str]:
        return [
            self.experiment,
            fmt(self.sigma),
            fmt(self.t),
            *(fmt(d) for d in self.deltas),
            self.quantity,
            fmt(self.value_re),
            fmt(self.value_im),
            fmt(self.reference),
            fmt(self.residual),
            fmt(self.scale),
            str(int(self.wall_ms)),
        ]

    @classmethod
    def from_row(cls, row: Sequence[str]) -> "ExperimentRecord":
        if len(row) != len(CSV_HEADER):
            raise ValueError(f"expected {len(CSV_HEADER)} fields, got {len(row)}")
        with mpmath.workprec(_PARSE_BITS):
            num = [mpf(v) for v in row[1:7]]
            rest = [mpf(v) for v in row[8:13]]
        return cls(row[0], num[0], num[1], tuple(num[2:6]), row[7], *rest, int(row[13]))


def write_csv(stream: TextIO, records: Iterable[ExperimentRecord]) -> None:
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for rec in records:
        writer.writerow(rec.row())


def read_csv(stream: TextIO) -> List[ExperimentRecord]:
    reader = csv.reader(stream)
    header = next(reader)
    if tuple(header) != CSV_HEADER:
        raise ValueError("unexpected CSV header")
    return [ExperimentRecord.from_row(r) for r in reader]


def to_csv_text(records: Iterable[ExperimentRecord]) -> str:
    buf = io.StringIO()
    write_csv(buf, records)
    return buf.getvalue()
