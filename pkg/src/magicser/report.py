"""Fixtures of known exact counts and estimate-vs-exact comparison reports.

The shipped fixtures file carries every exact value used by the
comparison tables: square/cube/4-cube series counts up to N=1000 (source
tag ``trump-enum``) and the bimagic/trimagic counts (``boyer-enum``).
Large fixture values are stored exactly as published, as scaled integers
``d.ddd...dEXP`` with more digits than the estimates carry.

Report rows compare a high-precision estimate against the exact count:
``rel_residual`` is (exact - estimate)/estimate, ``scaled_residual``
multiplies that by N^k (k=3 for second-order degree-1 reports, k=2 for
first-order degree-2 reports) to expose the next uncomputed series
coefficient; trimagic rows report the exact/estimate ratio instead.
"""
from __future__ import annotations

import csv
import io
import json
import warnings
from dataclasses import dataclass
from fractions import Fraction
from importlib import resources

from .counting import DEFAULT_WORK_CAPS, count_series, dp_work
from .estimates import DEFAULT_DIGITS, SciNumber, corrected_estimate

_FIXTURE_FIELDS = ("alpha", "N", "degree", "exact", "source")


@dataclass(frozen=True)
class Fixture:
    """One published exact count, stored verbatim as printed."""

    alpha: int
    N: int
    degree: int
    exact: str
    source: str

    def value(self) -> int:
        return _parse_exact(self.exact)

    @property
    def key(self) -> tuple[int, int, int]:
        return (self.alpha, self.N, self.degree)


def _parse_exact(text: str) -> int:
    """Parse a decimal or scaled-integer-with-exponent string to an int."""
    text = text.strip()
    mant, _, exp = text.partition("e")
    head, _, frac = mant.partition(".")
    digits = head + frac
    if not digits.isdigit():
        raise ValueError(f"exact value is not a nonnegative number: {text!r}")
    shift = (int(exp) if exp else 0) - len(frac)
    if shift < 0:
        raise ValueError(f"exact value {text!r} is not an integer")
    return int(digits) * 10 ** shift


def _validate_fixture(rec: dict, where: str) -> Fixture:
    missing = [f for f in _FIXTURE_FIELDS if f not in rec]
    if missing:
        raise ValueError(f"{where}: missing fields {missing}")
    fx = Fixture(alpha=int(rec["alpha"]), N=int(rec["N"]),
                 degree=int(rec["degree"]), exact=str(rec["exact"]),
                 source=str(rec["source"]))
    if not fx.source:
        raise ValueError(f"{where}: empty source tag")
    _parse_exact(fx.exact)  # raises with context on malformed values
    return fx


def load_fixtures(path) -> list[Fixture]:
    """Load a fixtures file: a JSON array of records, or one JSON record
    per line.  Fields: alpha, N, degree, exact, source."""
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    if not text.strip():
        warnings.warn(f"fixtures file {path} is empty", stacklevel=2)
        return []
    if text.lstrip().startswith("["):
        records = json.loads(text)
        return [_validate_fixture(rec, f"{path}[{i}]")
                for i, rec in enumerate(records)]
    out = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        if line.strip():
            out.append(_validate_fixture(json.loads(line), f"{path}:{lineno}"))
    return out


def default_fixtures() -> list[Fixture]:
    """The fixtures shipped with the package."""
    ref = resources.files("magicser").joinpath("data/paper_fixtures.json")
    records = json.loads(ref.read_text(encoding="utf-8"))
    return [_validate_fixture(rec, f"paper_fixtures.json[{i}]")
            for i, rec in enumerate(records)]


@dataclass(frozen=True)
class ReportRow:
    alpha: int
    N: int
    degree: int
    estimate: SciNumber
    exact: str | None
    rel_residual: float | None
    scaled_residual: float | None
    ratio: float | None


def default_scale_power(degree: int, correction_order: int) -> int:
    if degree == 1:
        return correction_order + 1
    if degree == 2:
        return correction_order + 1
    return 0


def _residuals(exact_value: int, estimate: SciNumber, N: int, scale_power: int):
    est = estimate.as_fraction()
    rel = Fraction(exact_value - est, est) if est else None
    if rel is None:
        return None, None, None
    return float(rel), float(rel * N ** scale_power), float(Fraction(exact_value) / est)


def build_report(specs, fixtures, correction_order: int,
                 scale_power: int | None = None,
                 digits: int = DEFAULT_DIGITS) -> list[ReportRow]:
    """Comparison rows for the given specs, sorted by (alpha, N).

    Exact counts are computed by DP when the state space fits the default
    caps, otherwise looked up in the fixtures; rows without either carry
    the estimate only.
    """
    by_key = {fx.key: fx for fx in fixtures}
    rows = []
    for spec in sorted(specs, key=lambda s: (s.alpha, s.N)):
        estimate = corrected_estimate(spec, correction_order, digits=digits)
        exact_value = None
        exact_text = None
        if dp_work(spec) <= DEFAULT_WORK_CAPS[spec.degree]:
            exact_value = count_series(spec)
            exact_text = str(exact_value)
        else:
            fx = by_key.get((spec.alpha, spec.N, spec.degree))
            if fx is not None:
                exact_value = fx.value()
                exact_text = fx.exact
        if exact_value is None:
            rows.append(ReportRow(spec.alpha, spec.N, spec.degree, estimate,
                                  None, None, None, None))
            continue
        k = default_scale_power(spec.degree, correction_order) \
            if scale_power is None else scale_power
        rel, scaled, ratio = _residuals(exact_value, estimate, spec.N, k)
        if spec.degree == 3:
            rows.append(ReportRow(spec.alpha, spec.N, spec.degree, estimate,
                                  exact_text, None, None, ratio))
        else:
            rows.append(ReportRow(spec.alpha, spec.N, spec.degree, estimate,
                                  exact_text, rel, scaled, None))
    return rows


# ---------------------------------------------------------------------------
# emitters

def _row_dict(row: ReportRow) -> dict:
    return {
        "alpha": row.alpha,
        "N": row.N,
        "degree": row.degree,
        "estimate": str(row.estimate),
        "exact": row.exact,
        "rel_residual": row.rel_residual,
        "scaled_residual": row.scaled_residual,
        "ratio": row.ratio,
    }


def rows_to_json(rows) -> str:
    return json.dumps([_row_dict(r) for r in rows], indent=2)


def rows_to_csv(rows) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=list(_row_dict(rows[0]).keys())
                            if rows else ["alpha", "N", "degree", "estimate",
                                          "exact", "rel_residual",
                                          "scaled_residual", "ratio"])
    writer.writeheader()
    for r in rows:
        writer.writerow(_row_dict(r))
    return buf.getvalue()


def _fmt(x, spec=".3g"):
    return "" if x is None else format(x, spec)


def rows_to_markdown(rows) -> str:
    header = "| alpha | N | degree | estimate | exact | rel. residual | scaled | exact/est |"
    sep = "|---|---|---|---|---|---|---|---|"
    lines = [header, sep]
    for r in rows:
        lines.append("| {} | {} | {} | {} | {} | {} | {} | {} |".format(
            r.alpha, r.N, r.degree, r.estimate, r.exact or "",
            _fmt(r.rel_residual), _fmt(r.scaled_residual), _fmt(r.ratio)))
    return "\n".join(lines) + "\n"
