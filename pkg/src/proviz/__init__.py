"""proviz: an always-listening, proactive chart-generation engine.

Pipeline: speech events -> utterance segmentation -> 3-way intent
classification -> context-aware query refinement -> staged chart reasoning
-> chart spec + summary, with a bounded conversation/chart history in the
middle and an append-only session event log around everything.
"""

__version__ = "0.1.0"
