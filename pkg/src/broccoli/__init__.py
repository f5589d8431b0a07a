"""Incidental vocabulary learning engine.

Pipeline: memory-model scoring, context guessability, density-constrained
selection, and in-context translation, exposed as a library, a CLI, and an
HTTP annotation service, plus corpus compatibility analysis tools.
"""

__version__ = "0.1.0"
