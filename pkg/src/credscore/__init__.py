"""Real-time credibility scoring for short social-media messages."""

__version__ = "0.1.0"
