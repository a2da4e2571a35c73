"""Output formatting utilities"""

import json
import sys
from collections.abc import Sequence
from typing import Any

from rich.console import Console
from rich.table import Table


class OutputFormatter:
    """Handles output formatting for JSON and human-readable modes"""

    def __init__(self, json_mode: bool = False, console: Console | None = None):
        """Initialize output formatter

        Args:
            json_mode: Enable JSON output mode
            console: Rich console instance (for human mode)
        """
        self.json_mode = json_mode
        self.console = console or Console()
        self.err_console = Console(stderr=True)

    def success(self, message: str, data: Any = None) -> None:
        """Output success message

        Args:
            message: Success message
            data: Optional mapping of result fields
        """
        if self.json_mode:
            output = {"status": "success", "message": message, "data": data}
            print(json.dumps(output, indent=2, default=str))
        else:
            self.console.print(f"[green]✓[/green] {message}")
            if data and isinstance(data, dict):
                for key, value in data.items():
                    self.console.print(f"  {key}: {_fmt(value)}")

    def error(self, message: str, details: str | None = None) -> None:
        """Output error message on stderr

        Args:
            message: Error message naming the failing stage
            details: Optional error details
        """
        if self.json_mode:
            output = {"status": "error", "message": message, "details": details}
            print(json.dumps(output, indent=2), file=sys.stderr)
        else:
            self.err_console.print(f"[red]✗[/red] {message}")
            if details:
                self.err_console.print(f"  {details}")

    def info(self, message: str) -> None:
        """Output info message (human mode only)"""
        if not self.json_mode:
            self.console.print(f"[blue]ℹ[/blue] {message}")

    def table(self, title: str, columns: Sequence[str], rows: Sequence[Sequence[Any]]) -> None:
        """Per-study results (human mode only; JSON mode carries them in success data)"""
        if self.json_mode:
            return
        table = Table(title=title)
        for column in columns:
            table.add_column(column)
        for row in rows:
            table.add_row(*(_fmt(v) for v in row))
        self.console.print(table)


def _fmt(value: Any) -> str:
    if value is None:
        return "-"
    if isinstance(value, float):
        return f"{value:.4f}"
    return str(value)
