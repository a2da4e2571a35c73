"""
fusionseg core.

Shared constants, the exception hierarchy, environment settings and logging
setup used by every other fusionseg package.
"""

from fusionseg_core.constants import HEAD_LABELS, Setup
from fusionseg_core.exceptions import (
    FusionSegError,
    FusionSegRuntimeError,
    FusionSegValidationError,
)

__all__ = [
    "HEAD_LABELS",
    "Setup",
    "FusionSegError",
    "FusionSegRuntimeError",
    "FusionSegValidationError",
]
