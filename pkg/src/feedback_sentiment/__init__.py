"""Sentiment classification and explanation toolkit for short feedback texts."""
__version__ = "0.1.0"
