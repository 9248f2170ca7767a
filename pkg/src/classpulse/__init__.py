"""Real-time classroom decision support.

Ingests streaming student activity events, clusters students by
per-knowledge-component performance, and serves KPIs, dendrograms, alerts,
and recommendations to a live instructor dashboard.
"""

__version__ = "0.1.0"
