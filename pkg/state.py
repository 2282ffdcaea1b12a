"""
state.py — Run state shared by the orchestrator and the analysis stages

RunState is the single record of one CLI invocation. Stages write their
reports and output paths into it; the serialized form is the run manifest
(`<run dir>/manifest.json`) used by `list-runs` and `replay`.
"""

from __future__ import annotations

import dataclasses
import uuid
from dataclasses import dataclass, field
from datetime import datetime
from typing import Any, Optional

from config import TOOLKIT_VERSION, Status


@dataclass
class AuditEntry:
    """One log entry per stage run."""
    stage: str
    status: str
    duration_ms: int = 0
    timestamp: str = field(default_factory=lambda: datetime.now().isoformat())
    notes: str = ""


@dataclass
class RunState:
    """
    The central state object for one run. The orchestrator passes it into the
    stage for the requested command, which fills `reports` and `outputs`.
    """

    # ── Identity ────────────────────────────────────────────────────────────
    run_id: str = field(default_factory=lambda: f"{uuid.uuid4().hex[:8]}-{datetime.now().strftime('%Y%m%d-%H%M%S')}")
    status: str = Status.INIT
    toolkit_version: str = TOOLKIT_VERSION

    # ── Input ────────────────────────────────────────────────────────────────
    command: str = ""
    argv: list[str] = field(default_factory=list)
    options: dict[str, Any] = field(default_factory=dict)     # parsed verb options
    scenario_path: str = ""
    scenario_hash: str = ""
    seed: Optional[int] = None
    force: bool = False

    # ── Results ──────────────────────────────────────────────────────────────
    outputs: list[str] = field(default_factory=list)          # paths relative to the run dir
    reports: dict[str, Any] = field(default_factory=dict)     # scalar summaries per stage
    warnings: list[str] = field(default_factory=list)
    error: Optional[str] = None

    # ── Audit trail ──────────────────────────────────────────────────────────
    audit_trail: list[AuditEntry] = field(default_factory=list)

    # ── Helpers ──────────────────────────────────────────────────────────────

    def log(self, stage: str, notes: str = "", duration_ms: int = 0) -> None:
        """Append a timestamped entry to the audit trail."""
        self.audit_trail.append(AuditEntry(stage=stage, status=self.status, duration_ms=duration_ms,
                                           notes=notes))

    def add_output(self, name: str) -> None:
        if name not in self.outputs:
            self.outputs.append(name)

    def to_dict(self) -> dict:
        """Serialize state to a JSON-compatible dict (the run manifest)."""
        return dataclasses.asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "RunState":
        """Restore state from a manifest. Unknown keys from newer versions are dropped."""
        data = dict(data)
        trail = [AuditEntry(**e) for e in data.pop("audit_trail", [])]
        known = {f.name for f in dataclasses.fields(cls)}
        state = cls(**{k: v for k, v in data.items() if k in known})
        state.audit_trail = trail
        return state
