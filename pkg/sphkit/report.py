"""Saving, loading and rendering run reports."""
import json
import logging
import os
from pathlib import Path
from typing import List, Union

import pandas as pd

from sphkit.models import RunReport

LOG = logging.getLogger(__name__)

REPORT_NAME = "report.json"


def series_filename(stage: str, name: str) -> str:
    return f"{stage}_{name}.csv".replace(" ", "_").replace("/", "_")


def save_report(report: RunReport, out_dir: Union[str, Path], deterministic: bool = True) -> Path:
    """Write report.json plus one CSV per emitted series.

    With ``deterministic`` the stage timings are dropped, so that two runs with
    the same seed and settings produce byte-identical files.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    payload = report.model_dump(mode="json")
    if deterministic:
        for stage in payload["stages"]:
            stage["seconds"] = None
    path = out / REPORT_NAME
    with open(path, "w", encoding="utf-8") as f:
        json.dump(payload, f, ensure_ascii=False, indent=2, sort_keys=True)
        f.write("\n")
    for stage in report.stages:
        for name, columns in sorted(stage.series.items()):
            frame = pd.DataFrame(columns)
            frame.to_csv(out / series_filename(stage.stage, name), index=False, float_format="%.17g")
    LOG.info("report saved", extra={"path": str(path), "stages": len(report.stages), "passed": report.passed})
    return path


def load_report(path: Union[str, Path]) -> RunReport:
    """Load a report from report.json or from the directory holding it."""
    path = Path(path)
    if path.is_dir():
        path = path / REPORT_NAME
    if not os.path.exists(path):
        raise FileNotFoundError(f"No report at {path}")
    with open(path, "r", encoding="utf-8") as f:
        return RunReport.model_validate(json.load(f))


def load_series(out_dir: Union[str, Path], stage: str, name: str) -> pd.DataFrame:
    return pd.read_csv(Path(out_dir) / series_filename(stage, name))


def render_report(report: RunReport) -> List[str]:
    """Human-readable lines, one per check."""
    lines = [f"example {report.example} (seed {report.seed}): {'PASSED' if report.passed else 'FAILED'}"]
    for stage in report.stages:
        status = "passed" if stage.passed else "failed"
        lines.append(f"stage {stage.stage}: {status}")
        if stage.error:
            lines.append(f"  error: {stage.error}")
        lines.extend(f"  {check.display_info()}" for check in stage.checks)
    return lines
