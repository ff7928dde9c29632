"""
RAPID APSP - 配置模块

提供统一的配置管理功能。
"""

from rapid_apsp.config.settings import Settings, get_settings

__all__ = ["get_settings", "Settings"]
