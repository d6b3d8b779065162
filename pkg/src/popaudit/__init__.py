"""Population-level audit transaction testing for customer statements.

Generates reproducible statement corpora, trains a lightweight field
extractor, normalizes and reconciles extracted values against a source of
truth, and routes scored exceptions into an auditor triage workflow.
"""

__version__ = "0.1.0"
