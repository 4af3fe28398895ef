"""Graph-pattern vulnerability detectors for Solidity snippets."""

from .runner import (
    DETECTORS, Detector, Finding, ScanReport, declared_version, detector_ids,
    get_detector, scan,
)

__all__ = [
    "DETECTORS", "Detector", "Finding", "ScanReport", "declared_version",
    "detector_ids", "get_detector", "scan",
]
