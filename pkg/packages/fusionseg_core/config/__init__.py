"""Environment settings for fusionseg."""

from fusionseg_core.config.settings import Settings, settings

__all__ = ["Settings", "settings"]
