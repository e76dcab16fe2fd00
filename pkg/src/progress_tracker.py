#!/usr/bin/env python3
"""
Progress Tracker
================

Live stage display for verify-all. Everything is written to stderr so the JSON
report on stdout stays byte-identical between runs.
"""

import sys
import time
from dataclasses import dataclass
from datetime import datetime
from enum import Enum
from typing import Any, Dict, List, Optional, TextIO


class ProgressStage(Enum):
    """Stages of a verify-all run"""
    INITIALIZING = "Initializing"
    GROUP_CHECKS = "Exact group checks"
    MASLOV = "Maslov indices"
    LINKING = "Linking integrals"
    ISOTOPIES = "Isotopy simulations"
    HYGIENE = "Numerical hygiene"
    FINALIZING = "Assembling report"
    COMPLETE = "Complete"


@dataclass
class ProgressUpdate:
    """Individual progress update"""
    timestamp: datetime
    stage: ProgressStage
    message: str
    progress_percent: float
    details: Optional[str] = None


class ProgressTracker:
    """Stage-by-stage progress with per-check lines"""

    def __init__(self, stream: Optional[TextIO] = None, quiet: bool = False):
        self.stream = stream or sys.stderr
        self.quiet = quiet
        self.start_time = time.time()
        self.current_stage = ProgressStage.INITIALIZING
        self.progress_updates: List[ProgressUpdate] = []
        self.stage_timings: Dict[ProgressStage, float] = {}
        self.last_update_time = self.start_time
        self.is_active = False
        self.errors: List[str] = []

    def _print(self, text: str = ""):
        if not self.quiet:
            print(text, file=self.stream, flush=True)

    def start(self, total_checks: int):
        self.is_active = True
        self.total_checks = total_checks
        self._print("=" * 60)
        self._print(f"VERIFY-ALL - {total_checks} checks")
        self._print("=" * 60)

    def update_stage(self, stage: ProgressStage, message: str, details: Optional[str] = None):
        if not self.is_active:
            return
        now = time.time()
        if self.current_stage != ProgressStage.INITIALIZING:
            self.stage_timings[self.current_stage] = now - self.last_update_time
        self.current_stage = stage
        self.last_update_time = now

        stage_index = list(ProgressStage).index(stage)
        update = ProgressUpdate(
            timestamp=datetime.now(),
            stage=stage,
            message=message,
            progress_percent=100.0 * stage_index / (len(ProgressStage) - 1),
            details=details,
        )
        self.progress_updates.append(update)

        bar_length = 30
        filled = int(bar_length * update.progress_percent / 100)
        self._print(f"\n[{'+' * filled}{'-' * (bar_length - filled)}] {update.progress_percent:.0f}%")
        self._print(f"* STAGE: {stage.value}")
        self._print(f"* STATUS: {message}")
        if details:
            self._print(f"* DETAIL: {details}")

    def update_progress(self, message: str, details: Optional[str] = None):
        if not self.is_active:
            return
        self._print(f"  [{datetime.now().strftime('%H:%M:%S')}] {message}")
        if details:
            self._print(f"             -> {details}")

    def complete(self, passed: int, failed: int):
        if self.current_stage != ProgressStage.INITIALIZING:
            self.stage_timings[self.current_stage] = time.time() - self.last_update_time
        self.current_stage = ProgressStage.COMPLETE
        self.is_active = False
        elapsed = time.time() - self.start_time
        self._print("\n" + "=" * 60)
        self._print(f"* {passed} passed, {failed} failed in {elapsed:.1f}s")
        for stage, timing in self.stage_timings.items():
            self._print(f"   {stage.value}: {timing:.1f}s")
        self._print("=" * 60)

    def error(self, error_message: str):
        """Report a failed check; the run carries on"""
        self.errors.append(error_message)
        self._print(f"* ERROR at stage {self.current_stage.value}: {error_message}")

    def get_summary(self) -> Dict[str, Any]:
        return {
            'total_elapsed': time.time() - self.start_time,
            'current_stage': self.current_stage.value,
            'total_updates': len(self.progress_updates),
            'stage_timings': {stage.value: timing for stage, timing in self.stage_timings.items()},
            'is_active': self.is_active,
            'errors': list(self.errors),
        }
