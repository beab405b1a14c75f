"""Embedded HTTP JSON API for campaign monitoring, triage and control."""

from .app import SCHEMA_PATH, create_app, generate_schema, serve, write_schema
from .manager import CampaignManager, minimize_stored_bucket

__all__ = [
    "SCHEMA_PATH",
    "CampaignManager",
    "create_app",
    "generate_schema",
    "minimize_stored_bucket",
    "serve",
    "write_schema",
]
