"""Config-driven preprocessing engine for wearable human activity recognition.

Converts heterogeneous WHAR datasets into a session-centric standardized
format, then runs a staged, cached, optionally parallel pipeline producing
fixed-size windows, metadata tables, splits, normalization statistics, and
class weights.
"""

__version__ = "0.1.0"
