"""Ambient infrastructure: errors, logging, metrics and helpers."""
