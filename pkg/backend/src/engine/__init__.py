"""Matching, metric, rewriting and generative engines."""
