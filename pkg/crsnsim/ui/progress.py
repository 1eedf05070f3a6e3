#!/usr/bin/env python3
"""
Rich-powered progress display for sweeps and oracle suites
"""

from typing import Optional

from rich.progress import BarColumn, MofNCompleteColumn, Progress, SpinnerColumn, TextColumn, TimeElapsedColumn

from .colors import console


class SweepProgress:
    """Progress bar over (seed, sweep point) units of work; silent when disabled"""

    def __init__(self, description: str, total: int, enabled: bool = True):
        self.description = description
        self.total = total
        self.enabled = enabled
        self.progress: Optional[Progress] = None
        self.task_id = None

    def __enter__(self) -> "SweepProgress":
        if self.enabled:
            self.progress = Progress(
                SpinnerColumn(),
                TextColumn("[bold cyan]{task.description}"),
                BarColumn(),
                MofNCompleteColumn(),
                TimeElapsedColumn(),
                console=console,
                transient=True,
            )
            self.progress.start()
            self.task_id = self.progress.add_task(self.description, total=self.total)
        return self

    def advance(self, steps: int = 1):
        if self.progress is not None:
            self.progress.advance(self.task_id, steps)

    def describe(self, text: str):
        if self.progress is not None:
            self.progress.update(self.task_id, description=text)

    def __exit__(self, exc_type, exc, tb):
        if self.progress is not None:
            self.progress.stop()
            self.progress = None
        return False
