"""
Parameter validation utilities
"""

from typing import List, Sequence, Tuple
import io
import math

import structlog
from dotenv.parser import parse_stream

logger = structlog.get_logger()


def validate_epsilon_grid(epsilons: Sequence[float]) -> Tuple[bool, List[str]]:
    """
    Validate an ordered privacy-budget grid
    Returns (is_valid, error_messages)
    """
    errors = []
    if not epsilons:
        errors.append("Epsilon grid is empty")
    for i, eps in enumerate(epsilons):
        if not math.isfinite(eps) or eps <= 0:
            errors.append(f"Epsilon #{i} must be positive and finite, got {eps!r}")
    for i in range(1, len(epsilons)):
        if epsilons[i] <= epsilons[i - 1]:
            errors.append(f"Epsilon grid must be strictly increasing at #{i} ({epsilons[i - 1]!r} >= {epsilons[i]!r})")
    return len(errors) == 0, errors


def validate_refinements(counts: Sequence[int], expected: int) -> Tuple[bool, List[str]]:
    """
    Validate per-interval ladder refinement counts
    Returns (is_valid, error_messages)
    """
    errors = []
    if len(counts) != expected:
        errors.append(f"Expected {expected} refinement counts, got {len(counts)}")
    for i, n in enumerate(counts):
        if n < 1:
            errors.append(f"Refinement count #{i} must be at least 1, got {n}")
    return len(errors) == 0, errors


def arithmetic_grid(start: float, stop: float, step: float) -> List[float]:
    """start, start+step, ... up to stop inclusive, free of accumulated float drift"""
    if step <= 0:
        raise ValueError(f"Grid step must be positive, got {step!r}")
    if stop < start:
        raise ValueError(f"Grid stop {stop!r} lies below start {start!r}")
    count = int(math.floor((stop - start) / step + 1e-9)) + 1
    return [round(start + k * step, 12) for k in range(count)]


def parse_float_list(text: str) -> List[float]:
    """Parse a comma separated list of floats"""
    values = []
    for item in text.split(","):
        item = item.strip()
        if not item:
            continue
        try:
            values.append(float(item))
        except ValueError:
            raise ValueError(f"Invalid number in list: {item!r}")
    return values


def parse_kv_text(text: str) -> dict:
    """Parse a flat key=value file with the dotenv grammar; later keys override earlier ones"""
    entries = {}
    for binding in parse_stream(io.StringIO(text)):
        line = binding.original.line
        if binding.error or (binding.key is not None and binding.value is None):
            raise ValueError(f"Line {line}: expected key=value, got {binding.original.string.strip()!r}")
        if binding.key is None:
            continue
        if binding.key in entries:
            logger.warning("Duplicate config key, last value wins", key=binding.key, line=line)
        entries[binding.key] = binding.value
    return entries
