"""Shared utilities: exceptions, logging and API error handling."""
