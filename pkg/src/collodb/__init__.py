"""Verb collostruction databases: mining, statistics, and error detection."""

__version__ = "0.1.0"
