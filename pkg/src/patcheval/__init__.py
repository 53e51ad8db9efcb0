"""Batch evaluation harness for LLM-generated logical-vulnerability patches."""

__version__ = "0.1.0"
