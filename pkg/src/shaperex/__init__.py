"""Shape-focused distillation, extraction and evaluation for text/RDF
dual corpora."""

__version__ = "0.1.0"
