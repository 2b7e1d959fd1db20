"""Text summary comparing closed-form and Monte Carlo outage columns."""

from __future__ import annotations

from collections import defaultdict

from ..errors import ReportUnavailable
from .sweep import SweepRow

__all__ = ["compare_report"]

# points with fewer expected hits than this cannot support a z-score
_RESOLVED = 1e-4


def compare_report(rows: list[SweepRow], trials: int | None = None) -> str:
    """Per-strategy deviation summary in MC-standard-error units.

    Needs at least one strategy whose rows carry both the analytic and the
    MC outage columns; raises ReportUnavailable otherwise.
    """
    comparable: dict[str, list[tuple[SweepRow, float]]] = defaultdict(list)
    for row in rows:
        if row.op_analytic is None or row.op_mc is None or row.op_mc_stderr is None:
            continue
        comparable[row.strategy].append((row, abs(row.op_analytic - row.op_mc)))
    if not comparable:
        raise ReportUnavailable(
            "no strategy has both analytic and Monte Carlo outage columns; "
            "run the sweep with mc.enabled = true"
        )

    lines = ["analytic vs Monte Carlo outage comparison"]
    for strategy in sorted(comparable):
        entries = comparable[strategy]
        resolved = [
            (row, dev)
            for row, dev in entries
            if row.op_mc is not None and row.op_mc >= _RESOLVED and row.op_mc_stderr > 0.0
        ]
        lines.append(
            f"strategy {strategy}: {len(entries)} compared points, {len(resolved)} resolved"
        )
        if not resolved:
            continue
        worst_row, worst_dev = max(resolved, key=lambda e: e[1] / e[0].op_mc_stderr)
        worst_z = worst_dev / worst_row.op_mc_stderr
        flagged = sum(1 for row, dev in resolved if dev / row.op_mc_stderr > 3.0)
        lines.append(
            f"  max deviation {worst_dev:.3e} = {worst_z:.2f} sigma "
            f"(axis={worst_row.axis_value:g}, user={worst_row.user})"
        )
        lines.append(f"  points beyond 3 sigma: {flagged}")

    if "vbc" in comparable and "cbc" in comparable:
        vbc = {
            (r.axis_value, r.user): dev
            for r, dev in comparable["vbc"]
            if r.op_mc is not None and r.op_mc >= _RESOLVED
        }
        cbc = {
            (r.axis_value, r.user): dev
            for r, dev in comparable["cbc"]
            if r.op_mc is not None and r.op_mc >= _RESOLVED
        }
        shared = sorted(set(vbc) & set(cbc))
        if shared:
            wins = sum(1 for key in shared if vbc[key] <= cbc[key])
            share = wins / len(shared)
            verdict = "yes" if share >= 0.8 else "no"
            lines.append(
                f"vbc at least as close as cbc at {wins}/{len(shared)} resolved points "
                f"({100 * share:.0f}%); >= 80%: {verdict}"
            )
    return "\n".join(lines) + "\n"
