"""Prometheus metrics for evaluation and verification runs."""

from pathlib import Path

from prometheus_client import Counter, Histogram, generate_latest

# Series evaluation
series_evaluations_total = Counter(
    "series_evaluations_total",
    "Total special-function series evaluations",
    ["function"],
)

series_truncations_total = Counter(
    "series_truncations_total",
    "Series evaluations stopped at max_terms before meeting rel_stop",
    ["function"],
)

# Verification
verifications_total = Counter(
    "verifications_total",
    "Total residual verifications",
    ["equation", "mode", "outcome"],
)

verification_duration_seconds = Histogram(
    "verification_duration_seconds",
    "Residual verification duration in seconds",
    ["mode"],
)

# Identity suite
identity_checks_total = Counter(
    "identity_checks_total",
    "Total identity-suite blocks evaluated",
    ["block", "status"],
)


def get_metrics() -> bytes:
    """Generate Prometheus metrics in text format.

    Returns:
        Metrics in Prometheus text format
    """
    return generate_latest()


def write_metrics(path: str | Path) -> None:
    """Write the text exposition to a file for a textfile collector."""
    Path(path).write_bytes(get_metrics())
