"""
LiftFunnel: privacy mechanisms for the privacy funnel and lift-based leakage measures
"""

__version__ = "1.0.0"
