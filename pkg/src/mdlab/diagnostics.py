"""Convergence probes over the exact tails, and their serialized reports.

A probe evaluates one family on a grid of levels x and sizes n, turns
each exact log tail into a normalized rate, and compares against the
regime's rate target. Verdicts are three-valued: "pass" needs the final
residual inside tolerance and the residual magnitudes non-increasing
across the sampled n; losing exactly one of the two gives
"inconclusive"; losing both gives "fail". Monte Carlo columns can be
attached for eyeballing but never influence a verdict.

The row schema is shared by all regimes. Weak-limit rows repurpose the
rate columns: normalized_rate holds the finite-n cdf value at x,
rate_target the limit cdf, and residual their difference, so the same
CSV machinery serves every probe.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
from dataclasses import asdict, dataclass
from typing import Optional, Sequence

from .estimators import mc_log_tail
from .families import FamilySpec
from .scalings import (
    ScalingFamily,
    ScalingRejectedError,
    evaluate,
    render_scaling_spec,
    validate,
)

CSV_COLUMNS = [
    "family", "regime", "scaling", "n", "x",
    "log_p_exact", "log_p_mc", "stderr_log",
    "s_n", "normalized_rate", "rate_target", "residual",
]

DEFAULT_TOL_FACTOR = 0.05
MONOTONE_SLACK = 1e-12


@dataclass(frozen=True)
class Row:
    family: str
    regime: str
    scaling: str
    n: int
    x: float
    log_p_exact: float
    log_p_mc: Optional[float]
    stderr_log: Optional[float]
    s_n: float
    normalized_rate: float
    rate_target: float
    residual: float


@dataclass(frozen=True)
class ConvergenceReport:
    family: str
    regime: str
    scaling: str
    rows: tuple
    tolerances: dict
    verdict: str
    notes: tuple = ()

    def rows_for(self, x: float) -> list:
        return [r for r in self.rows if r.x == x]


# ---------------------------------------------------------------------------
# verdict logic (pure over rows, so stored reports can be re-judged)


def _judge(final_ok: bool, monotone: bool) -> str:
    if final_ok and monotone:
        return "pass"
    if final_ok or monotone:
        return "inconclusive"
    return "fail"


def _combine(verdicts: Sequence[str]) -> str:
    if any(v == "fail" for v in verdicts):
        return "fail"
    if any(v == "inconclusive" for v in verdicts):
        return "inconclusive"
    return "pass"


def _rate_group_verdict(rows: Sequence[Row], factor: float, slack: float) -> str:
    target = rows[0].rate_target
    if math.isinf(target):
        # a +inf rate means the tail is superexponential at this speed:
        # exact zeros pass outright, otherwise the normalized rate has
        # to climb monotonically without ever coming back down
        if all(r.log_p_exact == -math.inf for r in rows):
            return "pass"
        rates = [r.normalized_rate for r in rows]
        climbing = all(b >= a for a, b in zip(rates, rates[1:]))
        return "pass" if climbing and rates[-1] > rates[0] else "fail"
    tol = factor * (1.0 + target)
    res = [abs(r.residual) for r in rows]
    final_ok = res[-1] <= tol
    monotone = all(b <= a + slack for a, b in zip(res, res[1:]))
    return _judge(final_ok, monotone)


def _weak_sups(rows: Sequence[Row]) -> list[tuple[int, float]]:
    sups: dict[int, float] = {}
    for r in rows:
        sups[r.n] = max(sups.get(r.n, 0.0), abs(r.residual))
    return sorted(sups.items())


def evaluate_verdict(rows: Sequence[Row], tolerances: dict) -> str:
    """Recompute a report's verdict from its rows alone."""
    factor = tolerances.get("factor", DEFAULT_TOL_FACTOR)
    slack = tolerances.get("slack", MONOTONE_SLACK)
    if not rows:
        raise ValueError("cannot judge an empty report")
    regime = rows[0].regime
    if regime == "weak":
        sups = [s for _, s in _weak_sups(rows)]
        final_ok = sups[-1] <= factor
        monotone = all(b <= a + slack for a, b in zip(sups, sups[1:]))
        return _judge(final_ok, monotone)
    verdicts = []
    for x in sorted({r.x for r in rows}):
        group = sorted((r for r in rows if r.x == x), key=lambda r: r.n)
        verdicts.append(_rate_group_verdict(group, factor, slack))
    return _combine(verdicts)


# ---------------------------------------------------------------------------
# probe input validation


def _check_ns(fam: FamilySpec, n_list, want_decades: bool) -> list[int]:
    ns = [int(n) for n in n_list]
    if not ns:
        raise ValueError("n_list must not be empty")
    if any(b <= a for a, b in zip(ns, ns[1:])):
        raise ValueError(f"n_list must be strictly increasing, got {ns}")
    if ns[0] < fam.least_n:
        raise ValueError(f"{fam.name} needs n >= {fam.least_n}, got {ns[0]}")
    if fam.max_n is not None and ns[-1] > fam.max_n:
        raise ValueError(f"{fam.name} caps n at {fam.max_n}, got {ns[-1]}")
    if want_decades and (len(ns) < 3 or ns[-1] < 1000 * ns[0]):
        raise ValueError(
            f"rate probes need at least 3 sizes spanning 3 decades, got {ns}")
    return ns


def _check_xs(x_list) -> list[float]:
    xs = [float(x) for x in x_list]
    if not xs:
        raise ValueError("x_list must not be empty")
    for x in xs:
        if not math.isfinite(x) or x == 0.0:
            raise ValueError(f"probe levels must be finite and nonzero, got {x}")
    if len(set(xs)) != len(xs):
        raise ValueError(f"duplicate probe levels in {xs}")
    return xs


def _row_seed(seed: int, label: str, n: int, x: float, side: str) -> int:
    # stable per-row substream so attaching MC to several rows never
    # reuses the same (trial, draw) uniforms for different events
    tag = f"{seed}|{label}|{n}|{x!r}|{side}".encode()
    return int.from_bytes(hashlib.blake2b(tag, digest_size=8).digest(), "big")


def _base_notes(fam: FamilySpec) -> list[str]:
    if fam.max_n is not None:
        return [f"n capped at {fam.max_n} by quantile resolution"]
    return []


# ---------------------------------------------------------------------------
# probes


def ldp_probe(fam: FamilySpec, x_list, n_list, trials: int = 0, seed: int = 0,
              partitions: int = 1, tol_factor: float = DEFAULT_TOL_FACTOR) -> ConvergenceReport:
    """Compare -log P / v_n against the large-deviation rate."""
    ns = _check_ns(fam, n_list, want_decades=True)
    xs = _check_xs(x_list)
    rows = []
    for x in xs:
        side = "upper" if x > 0.0 else "lower"
        tail = fam.exact_log_upper_tail if side == "upper" else fam.exact_log_lower_tail
        target = fam.rate_ld(x)
        for n in ns:
            log_p = tail(n, x)
            s_n = fam.speed(n)
            norm = -log_p / s_n
            mc = stderr = None
            if trials > 0:
                est = mc_log_tail(fam, n, x, side, trials,
                                  _row_seed(seed, fam.label, n, x, side), partitions)
                mc, stderr = est.log_p_hat, est.stderr_log
            rows.append(Row(
                family=fam.label, regime="ld", scaling="", n=n, x=x,
                log_p_exact=log_p, log_p_mc=mc, stderr_log=stderr, s_n=s_n,
                normalized_rate=norm, rate_target=target,
                residual=norm - target if math.isfinite(target) else math.nan,
            ))
    tolerances = {"factor": tol_factor, "slack": MONOTONE_SLACK}
    return ConvergenceReport(
        family=fam.label, regime="ld", scaling="", rows=tuple(rows),
        tolerances=tolerances, verdict=evaluate_verdict(rows, tolerances),
        notes=tuple(_base_notes(fam)),
    )


def md_probe(fam: FamilySpec, scaling: ScalingFamily, x_list, n_list,
             trials: int = 0, seed: int = 0, partitions: int = 1,
             tol_factor: float = DEFAULT_TOL_FACTOR,
             enforce_admissible: bool = True) -> ConvergenceReport:
    """Compare -a_n log P against the moderate rate under a scaling.

    The statistic is a_n v_n C_n (square-root normalized for central
    families), so level x maps to the C_n threshold x / (a_n v_n) or
    x / sqrt(a_n v_n). An inadmissible scaling is rejected up front;
    pass enforce_admissible=False to probe a degenerate boundary regime
    on purpose.
    """
    ns = _check_ns(fam, n_list, want_decades=True)
    xs = _check_xs(x_list)
    notes = _base_notes(fam)
    if enforce_admissible:
        report = validate(scaling, fam, ns)
        if not report.ok:
            raise ScalingRejectedError(
                f"scaling {report.label} fails {', '.join(report.failures())} "
                f"for {fam.name} over n in [{ns[0]}, {ns[-1]}]")
        notes.append(f"scaling {report.label} admissible over [{ns[0]}, {ns[-1]}]")
    label = render_scaling_spec(scaling)
    rows = []
    for x in xs:
        side = "upper" if x > 0.0 else "lower"
        tail = fam.exact_log_upper_tail if side == "upper" else fam.exact_log_lower_tail
        target = fam.rate_md(x)
        for n in ns:
            a = evaluate(scaling, n, fam.speed)
            av = a * fam.speed(n)
            threshold = x / math.sqrt(av) if fam.central else x / av
            log_p = tail(n, threshold)
            s_n = 1.0 / a
            norm = -log_p * a
            mc = stderr = None
            if trials > 0:
                est = mc_log_tail(fam, n, threshold, side, trials,
                                  _row_seed(seed, fam.label, n, x, side), partitions)
                mc, stderr = est.log_p_hat, est.stderr_log
            rows.append(Row(
                family=fam.label, regime="md", scaling=label, n=n, x=x,
                log_p_exact=log_p, log_p_mc=mc, stderr_log=stderr, s_n=s_n,
                normalized_rate=norm, rate_target=target,
                residual=norm - target if math.isfinite(target) else math.nan,
            ))
    tolerances = {"factor": tol_factor, "slack": MONOTONE_SLACK}
    return ConvergenceReport(
        family=fam.label, regime="md", scaling=label, rows=tuple(rows),
        tolerances=tolerances, verdict=evaluate_verdict(rows, tolerances),
        notes=tuple(notes),
    )


def default_weak_grid(fam: FamilySpec, points: int = 61) -> list[float]:
    """Evenly spaced levels covering the central 99% of the limit law."""
    if points < 41:
        raise ValueError("weak grids need at least 41 points")

    def invert(p: float) -> float:
        lo, hi = -1.0, 1.0
        while fam.limit_cdf(lo) > p:
            lo *= 2.0
        while fam.limit_cdf(hi) < p:
            hi *= 2.0
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if fam.limit_cdf(mid) < p:
                lo = mid
            else:
                hi = mid
        return 0.5 * (lo + hi)

    a, b = invert(0.004), invert(0.996)
    step = (b - a) / (points - 1)
    return [a + i * step for i in range(points)]


def weak_probe(fam: FamilySpec, n_list, x_grid=None,
               tol_factor: float = DEFAULT_TOL_FACTOR) -> ConvergenceReport:
    """Sup distance between the law of v_n C_n and its limit on a grid.

    Central families use sqrt(v_n) C_n. Rows reuse the rate columns:
    normalized_rate is the exact finite-n cdf at x, rate_target the
    limit cdf, residual their difference; the verdict looks at the sup
    of |residual| per n.
    """
    ns = _check_ns(fam, n_list, want_decades=False)
    if x_grid is None:
        x_grid = default_weak_grid(fam)
    xs = [float(x) for x in x_grid]
    if len(xs) < 41:
        raise ValueError(f"weak grids need at least 41 points, got {len(xs)}")
    if any(b <= a for a, b in zip(xs, xs[1:])):
        raise ValueError("weak grid must be strictly increasing")
    if fam.limit_cdf(xs[0]) > 0.005 or fam.limit_cdf(xs[-1]) < 0.995:
        raise ValueError(
            f"weak grid [{xs[0]}, {xs[-1]}] misses the limit law's central 99%: "
            f"cdf spans [{fam.limit_cdf(xs[0])}, {fam.limit_cdf(xs[-1])}]")
    rows = []
    for n in ns:
        scale = math.sqrt(fam.speed(n)) if fam.central else fam.speed(n)
        for x in xs:
            log_p = fam.exact_log_lower_tail(n, x / scale)
            cdf_n = math.exp(log_p)
            target = fam.limit_cdf(x)
            rows.append(Row(
                family=fam.label, regime="weak", scaling="", n=n, x=x,
                log_p_exact=log_p, log_p_mc=None, stderr_log=None,
                s_n=fam.speed(n), normalized_rate=cdf_n, rate_target=target,
                residual=cdf_n - target,
            ))
    tolerances = {"factor": tol_factor, "slack": MONOTONE_SLACK}
    return ConvergenceReport(
        family=fam.label, regime="weak", scaling="", rows=tuple(rows),
        tolerances=tolerances, verdict=evaluate_verdict(rows, tolerances),
        notes=tuple(_base_notes(fam)),
    )


def weak_sup_distances(report: ConvergenceReport) -> list[tuple[int, float]]:
    """(n, sup |cdf_n - limit|) pairs of a weak report, ascending in n."""
    if report.regime != "weak":
        raise ValueError(f"expected a weak report, got regime {report.regime!r}")
    return _weak_sups(report.rows)


# ---------------------------------------------------------------------------
# slope identity between the two rates


@dataclass(frozen=True)
class SlopeCheck:
    side: str
    measured: float
    target: float
    tol: float
    status: str  # "ok", "mismatch", "not-applicable"


@dataclass(frozen=True)
class SlopeIdentityReport:
    family: str
    h: float
    mode: str  # "slopes" or "curvature"
    checks: tuple

    @property
    def ok(self) -> bool:
        return all(c.status != "mismatch" for c in self.checks)


def slope_identity_check(fam: FamilySpec, h: float = 1e-5) -> SlopeIdentityReport:
    """Tie the moderate rate to the local behavior of the large one.

    Non-central families: the one-sided difference quotients of rate_ld
    at 0 must match the moderate slopes within max(1e-6, 10h); a side
    where the moderate rate is +inf must be a wall of rate_ld too and is
    reported as not-applicable. Central families instead match second
    differences (curvature) of both rates within 1e-4.
    """
    if not 0.0 < h <= 1e-3:
        raise ValueError(f"difference step must lie in (0, 1e-3], got {h}")
    if fam.central:
        d2_ld = (fam.rate_ld(h) - 2.0 * fam.rate_ld(0.0) + fam.rate_ld(-h)) / (h * h)
        d2_md = (fam.rate_md(h) - 2.0 * fam.rate_md(0.0) + fam.rate_md(-h)) / (h * h)
        tol = 1e-4
        status = "ok" if abs(d2_ld - d2_md) <= tol * max(1.0, abs(d2_md)) else "mismatch"
        checks = (SlopeCheck("curvature", d2_ld, d2_md, tol, status),)
        return SlopeIdentityReport(family=fam.label, h=h, mode="curvature",
                                   checks=checks)
    tol = max(1e-6, 10.0 * h)
    checks = []
    for side, sign, target in (("right", 1.0, fam.rate_md.right_slope_at_zero),
                               ("left", -1.0, fam.rate_md.left_slope_at_zero)):
        ld_val = fam.rate_ld(sign * h)
        if math.isinf(target):
            status = "not-applicable" if math.isinf(ld_val) else "mismatch"
            checks.append(SlopeCheck(side, ld_val, target, tol, status))
            continue
        fd = (ld_val - fam.rate_ld(0.0)) / (sign * h)
        status = "ok" if abs(fd - target) <= tol else "mismatch"
        checks.append(SlopeCheck(side, fd, target, tol, status))
    return SlopeIdentityReport(family=fam.label, h=h, mode="slopes",
                               checks=tuple(checks))


# ---------------------------------------------------------------------------
# serialization


def _csv_cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, str):
        return v
    if isinstance(v, int):
        return repr(v)
    return repr(float(v))


def write_csv(reports, path_or_handle) -> None:
    """One CSV with the shared column schema, reports concatenated."""
    if isinstance(reports, ConvergenceReport):
        reports = [reports]
    own = isinstance(path_or_handle, (str, bytes))
    fh = open(path_or_handle, "w", newline="", encoding="utf-8") if own else path_or_handle
    try:
        writer = csv.writer(fh)
        writer.writerow(CSV_COLUMNS)
        for rep in reports:
            for row in rep.rows:
                writer.writerow([_csv_cell(getattr(row, col)) for col in CSV_COLUMNS])
    finally:
        if own:
            fh.close()


def csv_text(reports) -> str:
    buf = io.StringIO()
    write_csv(reports, buf)
    return buf.getvalue()


def _num_out(v):
    if v is None or isinstance(v, (str, int)):
        return v
    v = float(v)
    if math.isnan(v):
        return "nan"
    if v == math.inf:
        return "inf"
    if v == -math.inf:
        return "-inf"
    return v


def _num_in(v):
    if isinstance(v, str) and v in ("nan", "inf", "-inf"):
        return float(v)
    return v


def report_to_dict(report: ConvergenceReport) -> dict:
    return {
        "family": report.family,
        "regime": report.regime,
        "scaling": report.scaling,
        "verdict": report.verdict,
        "tolerances": dict(report.tolerances),
        "notes": list(report.notes),
        "rows": [{k: _num_out(v) for k, v in asdict(r).items()} for r in report.rows],
    }


def report_from_dict(d: dict) -> ConvergenceReport:
    rows = tuple(Row(**{k: _num_in(v) for k, v in r.items()}) for r in d["rows"])
    return ConvergenceReport(
        family=d["family"], regime=d["regime"], scaling=d["scaling"],
        rows=rows, tolerances=dict(d["tolerances"]), verdict=d["verdict"],
        notes=tuple(d.get("notes", ())),
    )


def write_json(reports, path) -> None:
    if isinstance(reports, ConvergenceReport):
        reports = [reports]
    payload = {"reports": [report_to_dict(r) for r in reports]}
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=1)
        fh.write("\n")


def read_json(path) -> list[ConvergenceReport]:
    with open(path, "r", encoding="utf-8") as fh:
        payload = json.load(fh)
    if not isinstance(payload, dict) or "reports" not in payload:
        raise ValueError(f"{path} does not look like a probe report file")
    return [report_from_dict(d) for d in payload["reports"]]


# ---------------------------------------------------------------------------
# residual plot (self-contained SVG, no plotting dependency)


_SVG_W, _SVG_H = 640, 420
_MARGIN_L, _MARGIN_R, _MARGIN_T, _MARGIN_B = 70, 20, 30, 50
_PALETTE = ["#1965b0", "#dc050c", "#4eb265", "#f1932d", "#882e72", "#777777"]
_FLOOR = 1e-16


def render_svg(report: ConvergenceReport) -> str:
    """|residual| against n, both axes log10, one polyline per level x."""
    groups: dict[float, list[tuple[int, float]]] = {}
    for r in report.rows:
        if r.residual is None or math.isnan(r.residual):
            continue
        groups.setdefault(r.x, []).append((r.n, max(abs(r.residual), _FLOOR)))
    if not groups:
        raise ValueError("report has no finite residuals to plot")
    xs_log = [math.log10(n) for pts in groups.values() for n, _ in pts]
    ys_log = [math.log10(v) for pts in groups.values() for _, v in pts]
    x_lo, x_hi = min(xs_log), max(xs_log)
    y_lo, y_hi = math.floor(min(ys_log)), math.ceil(max(ys_log))
    if x_hi == x_lo:
        x_hi = x_lo + 1.0
    if y_hi == y_lo:
        y_hi = y_lo + 1.0
    plot_w = _SVG_W - _MARGIN_L - _MARGIN_R
    plot_h = _SVG_H - _MARGIN_T - _MARGIN_B

    def px(lx: float) -> float:
        return _MARGIN_L + (lx - x_lo) / (x_hi - x_lo) * plot_w

    def py(ly: float) -> float:
        return _MARGIN_T + (y_hi - ly) / (y_hi - y_lo) * plot_h

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_SVG_W}" height="{_SVG_H}" '
        f'viewBox="0 0 {_SVG_W} {_SVG_H}">',
        f'<rect width="{_SVG_W}" height="{_SVG_H}" fill="white"/>',
        f'<text x="{_SVG_W // 2}" y="18" text-anchor="middle" font-size="13" '
        f'font-family="sans-serif">{report.family} {report.regime} residuals</text>',
    ]
    ax_y = _SVG_H - _MARGIN_B
    parts.append(f'<line x1="{_MARGIN_L}" y1="{ax_y}" x2="{_SVG_W - _MARGIN_R}" '
                 f'y2="{ax_y}" stroke="black"/>')
    parts.append(f'<line x1="{_MARGIN_L}" y1="{_MARGIN_T}" x2="{_MARGIN_L}" '
                 f'y2="{ax_y}" stroke="black"/>')
    for d in range(math.floor(x_lo), math.floor(x_hi) + 1):
        if d < x_lo - 1e-9 or d > x_hi + 1e-9:
            continue
        cx = px(d)
        parts.append(f'<line x1="{cx:.2f}" y1="{ax_y}" x2="{cx:.2f}" '
                     f'y2="{ax_y + 5}" stroke="black"/>')
        parts.append(f'<text x="{cx:.2f}" y="{ax_y + 20}" text-anchor="middle" '
                     f'font-size="11" font-family="sans-serif">1e{d}</text>')
    ticks = max(1, (y_hi - y_lo) // 6)
    for d in range(int(y_lo), int(y_hi) + 1, int(ticks)):
        cy = py(d)
        parts.append(f'<line x1="{_MARGIN_L - 5}" y1="{cy:.2f}" x2="{_MARGIN_L}" '
                     f'y2="{cy:.2f}" stroke="black"/>')
        parts.append(f'<text x="{_MARGIN_L - 9}" y="{cy + 4:.2f}" text-anchor="end" '
                     f'font-size="11" font-family="sans-serif">1e{d}</text>')
    parts.append(f'<text x="{_SVG_W // 2}" y="{_SVG_H - 12}" text-anchor="middle" '
                 f'font-size="12" font-family="sans-serif">n</text>')
    parts.append(f'<text x="16" y="{_SVG_H // 2}" text-anchor="middle" font-size="12" '
                 f'font-family="sans-serif" transform="rotate(-90 16 {_SVG_H // 2})">'
                 f'|residual|</text>')
    for i, x in enumerate(sorted(groups)):
        pts = sorted(groups[x])
        color = _PALETTE[i % len(_PALETTE)]
        coords = " ".join(f"{px(math.log10(n)):.2f},{py(math.log10(v)):.2f}"
                          for n, v in pts)
        parts.append(f'<polyline points="{coords}" fill="none" stroke="{color}" '
                     f'stroke-width="1.5"/>')
        parts.append(f'<text x="{_SVG_W - _MARGIN_R - 4}" '
                     f'y="{_MARGIN_T + 14 + 14 * i}" text-anchor="end" font-size="11" '
                     f'font-family="sans-serif" fill="{color}">x={x!r}</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def write_svg(report: ConvergenceReport, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(render_svg(report))
