"""snipscan: snippet-tolerant Solidity static analysis and clone detection."""

__version__ = "0.1.0"
